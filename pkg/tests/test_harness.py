import numpy as np
import pytest

from subnyq.harness import (ExperimentConfig, MSERow, SuccessRow, baseline_estimate, draw_frequencies, draw_signal,
                            mse_csv, mse_sweep_config, mse_metric, run_mse_sweep, run_scenario, run_success_sweep,
                            run_trials, scenario_csv, success_csv)
from subnyq.model import SignalSpec


def test_mse_metric_examples():
    assert mse_metric([25, 50], [50, 25]) == 0
    assert mse_metric([10.03, 20.04], [10, 20]) == pytest.approx(0.025)
    assert mse_metric([10.06], [10]) == pytest.approx(0.06)
    assert mse_metric([10.03, 20.04], [10, 20]) < 0.05 <= mse_metric([10.06], [10])
    with pytest.raises(ValueError):
        mse_metric([1, 2], [1])


def test_draw_frequencies_respects_band_and_spacing():
    rng = np.random.default_rng(0)
    for K in range(1, 9):
        f = draw_frequencies(rng, K, (0, 100), 0.1)
        assert np.all((f > 0) & (f < 100))
        if K > 1:
            assert np.diff(f).min() > 0.1


def test_draw_signal_is_keyed_by_trial():
    cfg = ExperimentConfig()
    a, b = draw_signal(cfg, 3, 7), draw_signal(cfg, 3, 7)
    assert a == b
    assert draw_signal(cfg, 3, 8) != a
    assert all(0.1 <= c.amplitude <= 1 for c in a.components)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(factors=(4, 6, 9))
    with pytest.raises(ValueError):
        ExperimentConfig(min_separation=0)
    with pytest.raises(ValueError):
        ExperimentConfig(band=(0, 120))
    with pytest.raises(ValueError):
        ExperimentConfig(amplitude_range=(0, 1))
    cfg = ExperimentConfig()
    assert cfg.window_len == 42 and cfg.num_samples == 141


def test_noiseless_single_tone_always_succeeds():
    cfg = ExperimentConfig(K_values=(1,), snr_db=(), num_trials=25)
    [row] = run_success_sweep(cfg)
    assert row.success_proposed == 1.0 and row.success_baseline == 1.0


def test_noiseless_mse_limit():
    cfg = mse_sweep_config(num_trials=20)
    recs = run_trials(cfg, 3, None)
    assert np.mean([r.mse for r in recs]) <= 1e-6


def test_baseline_noiseless_recovers_up_to_eight_tones():
    rng = np.random.default_rng(9)
    for K in range(1, 9):
        f = draw_frequencies(rng, K, (0, 100), 2.0)
        spec = SignalSpec.from_arrays(f, 100, rng.uniform(0.1, 1, K), rng.uniform(0, 6.28, K))
        np.testing.assert_allclose(baseline_estimate(spec, K, 42, 141), f, atol=1e-6)


def test_baseline_duration_span():
    cfg = ExperimentConfig(baseline_span="duration")
    assert cfg.baseline_samples == 7 * cfg.num_samples
    with pytest.raises(ValueError):
        ExperimentConfig(baseline_span="forever")


def test_scenario_pair_spectra():
    res = run_scenario(SignalSpec.from_arrays([25.0, 50.0], 60))
    assert set(res.pair_spectra) == {(3, 4), (3, 5), (4, 5)}
    np.testing.assert_allclose(res.pipeline.final_freqs, [25, 50], atol=1e-6)
    np.testing.assert_allclose(np.sort(res.pair_spectra[(4, 5)].top(2)), [25, 50], atol=1e-6)


def test_scenario_three_tones():
    res = run_scenario(SignalSpec.from_arrays([25.0, 33.0, 50.0], 60))
    np.testing.assert_allclose(res.pipeline.final_freqs, [25, 33, 50], atol=1e-6)


def test_scenario_with_unit_factor_is_nyquist_esprit():
    res = run_scenario(SignalSpec.from_arrays([12.0, 47.5], 60), factors=(1, 4, 5))
    assert res.pipeline.unfold_factor == 1
    assert len(res.pipeline.eligible) == 2
    np.testing.assert_allclose(res.pipeline.final_freqs, [12, 47.5], atol=1e-6)


def test_csv_schemas():
    s = success_csv([SuccessRow(2, 10, 0.9, 1.0), SuccessRow(1, 10, 1.0, 1 / 3)])
    assert s == "K,trials,success_proposed,success_baseline\n1,10,1,0.333333333\n2,10,0.9,1\n"
    m = mse_csv([MSERow(15.0, 1.23456789012e-3, 0.5)])
    assert m == "snr_db,mse_proposed,mse_baseline\n15,0.00123456789,0.5\n"
    res = run_scenario(SignalSpec.from_arrays([25.0, 50.0], 60))
    lines = scenario_csv(res.pipeline).splitlines()
    assert lines[0] == "candidate_hz,stage2_score,stage3_score,combined,selected"
    assert len(lines) == 7
    selected = [float(l.split(",")[0]) for l in lines[1:] if l.endswith(",1")]
    np.testing.assert_allclose(selected, [25, 50], atol=1e-6)
    assert "\r" not in "".join(lines)


def test_sweeps_deterministic_across_workers():
    cfg = ExperimentConfig(K_values=(2, 4), num_trials=12, seed=7)
    a = success_csv(run_success_sweep(cfg, workers=1))
    b = success_csv(run_success_sweep(cfg, workers=4))
    assert a == b
    cfg5 = mse_sweep_config(num_trials=8, seed=7)
    assert mse_csv(run_mse_sweep(cfg5, workers=1)) == mse_csv(run_mse_sweep(cfg5, workers=3))


def test_env_var_caps_threads(monkeypatch):
    from subnyq.harness import _workers
    monkeypatch.setenv("SUBNYQ_THREADS", "3")
    assert _workers(None) == 3
    assert _workers(2) == 2


@pytest.mark.slow
def test_mse_decreases_with_snr():
    rows = run_mse_sweep(mse_sweep_config(num_trials=60, seed=1))
    mse = np.array([r.mse_proposed for r in rows])
    steps = mse[1:] / mse[:-1]
    # at most one inversion, and no more than 20%
    assert np.sum(steps > 1) <= 1 and steps.max() <= 1.2


@pytest.mark.slow
def test_success_counts_show_binomial_dispersion():
    # 10 batches of 30 trials at K=6 (success rate well inside (0, 1))
    rates = []
    for batch in range(10):
        cfg = ExperimentConfig(K_values=(6,), num_trials=30, seed=100 + batch, snr_db=(10.0,))
        rates.append(run_success_sweep(cfg)[0].success_proposed)
    p = np.mean(rates)
    predicted = p * (1 - p) / 30
    assert np.var(rates, ddof=1) <= 3 * max(predicted, 1 / 30**2)
