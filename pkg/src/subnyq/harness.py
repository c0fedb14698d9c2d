"""Monte Carlo experiments: fixed scenarios, success rate vs K, MSE vs SNR.

Every trial draws its own generator from ``(seed, K, trial)``, so results do
not depend on how trials are scheduled across workers. The baseline samples
the same signal at the full rate fH (factor 1) and runs plain ESPRIT, by
default with the same window and snapshot count as each sub-Nyquist channel.
"""
from __future__ import annotations

import csv
import io
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .model import ChannelConfig, SignalSpec, Sinusoid, noise_variance_for_snr, synthesize, synthesize_multichannel
from .screen import MAX_WINDOW, PipelineResult, pseudo_spectrum, run_pipeline
from .subspace import esprit, fold_to_hertz
from .unfold import check_coprime, unfold

logger = logging.getLogger(__name__)

SUCCESS_THRESHOLD = 0.05

SUCCESS_HEADER = ("K", "trials", "success_proposed", "success_baseline")
MSE_HEADER = ("snr_db", "mse_proposed", "mse_baseline")
SCENARIO_HEADER = ("candidate_hz", "stage2_score", "stage3_score", "combined", "selected")


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo setup. Defaults follow the success-rate experiment.

    ``band`` is the interval frequencies are drawn from; it must lie inside
    (0, fH). ``window`` of None picks the largest multiple of the smallest
    factor up to 48.
    """

    fH: float = 100.0
    factors: tuple[int, int, int] = (7, 8, 9)
    K_values: tuple[int, ...] = tuple(range(1, 9))
    band: tuple[float, float] = (0.0, 100.0)
    min_separation: float = 0.1
    amplitude_range: tuple[float, float] = (0.1, 1.0)
    num_trials: int = 100
    snapshots: int = 100
    window: int | None = None
    snr_db: tuple[float, ...] = (20.0,)
    seed: int = 0
    mode: str = "combined"
    success_threshold: float = SUCCESS_THRESHOLD
    # "snapshots": baseline gets the same N and T as each sub-Nyquist channel.
    # "duration": baseline spans the same time as the unfolding channel.
    baseline_span: str = "snapshots"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))
        object.__setattr__(self, "K_values", tuple(int(k) for k in self.K_values))
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        check_coprime(self.factors)
        if self.min_separation <= 0:
            raise ValueError("min_separation must be positive")
        lo, hi = self.amplitude_range
        if not 0 < lo <= hi:
            raise ValueError("amplitude range must lie in (0, inf)")
        if not 0 <= self.band[0] < self.band[1] <= self.fH:
            raise ValueError(f"band {self.band} must lie inside [0, fH={self.fH}]")
        if self.num_trials < 1 or self.snapshots < 1:
            raise ValueError("num_trials and snapshots must be positive")
        if self.mode not in ("combined", "intersect"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.baseline_span not in ("snapshots", "duration"):
            raise ValueError(f"unknown baseline span {self.baseline_span!r}")

    @property
    def window_len(self) -> int:
        a = min(self.factors)
        return ((MAX_WINDOW if self.window is None else self.window) // a) * a

    @property
    def num_samples(self) -> int:
        return self.snapshots + self.window_len - 1

    @property
    def baseline_samples(self) -> int:
        if self.baseline_span == "duration":
            return min(self.factors) * self.num_samples
        return self.num_samples


def mse_sweep_config(**overrides) -> ExperimentConfig:
    base = dict(K_values=(3,), snr_db=(10.0, 15.0, 20.0, 25.0, 30.0))
    base.update(overrides)
    return ExperimentConfig(**base)


@dataclass
class TrialRecord:
    true_freqs: np.ndarray
    estimated_freqs: np.ndarray
    baseline_freqs: np.ndarray
    mse: float
    mse_baseline: float
    success: bool
    success_baseline: bool
    collision_flag: bool
    timings: dict = field(default_factory=dict)


def mse_metric(estimated, truth) -> float:
    """sqrt(sum_k (f_est_k - f_k)^2) / K with both lists sorted ascending."""
    est = np.sort(np.asarray(estimated, dtype=float))
    tru = np.sort(np.asarray(truth, dtype=float))
    if est.shape != tru.shape or tru.size == 0:
        raise ValueError(f"need equally many estimates and truths, got {est.size} and {tru.size}")
    return float(np.sqrt(np.sum((est - tru) ** 2)) / tru.size)


def draw_frequencies(rng: np.random.Generator, K: int, band: tuple[float, float],
                     min_sep: float, max_tries: int = 10_000) -> np.ndarray:
    """K sorted uniform draws from the open band with pairwise spacing > min_sep."""
    lo, hi = band
    for _ in range(max_tries):
        f = np.sort(rng.uniform(lo, hi, K))
        if f[0] > lo and f[-1] < hi and (K == 1 or np.diff(f).min() > min_sep):
            return f
    raise RuntimeError(f"could not place {K} tones in {band} with spacing {min_sep}")


def draw_signal(cfg: ExperimentConfig, K: int, trial: int) -> SignalSpec:
    """Noiseless random signal for one trial; the noise seed is stored in the spec."""
    rng = np.random.default_rng([cfg.seed, K, trial])
    freqs = draw_frequencies(rng, K, cfg.band, cfg.min_separation)
    amps = rng.uniform(*cfg.amplitude_range, K)
    phases = rng.uniform(0, 2 * np.pi, K)
    noise_seed = int(rng.integers(2**32))
    comps = tuple(Sinusoid(float(f), float(m), float(p)) for f, m, p in zip(freqs, amps, phases))
    return SignalSpec(comps, cfg.fH, 0.0, noise_seed)


def baseline_estimate(spec: SignalSpec, K: int, N: int, num_samples: int) -> np.ndarray:
    """Plain ESPRIT on one full-rate (factor 1) channel."""
    seq = synthesize(spec, ChannelConfig(1), num_samples)
    return np.sort(fold_to_hertz(esprit(seq, K, N), spec.fH, 1))


def run_trial(cfg: ExperimentConfig, spec: SignalSpec) -> TrialRecord:
    K = spec.K
    N, L = cfg.window_len, cfg.num_samples
    t0 = time.perf_counter()
    seqs = synthesize_multichannel(spec, [ChannelConfig(f) for f in cfg.factors], L)
    result = run_pipeline(seqs, K, N, mode=cfg.mode)
    t1 = time.perf_counter()
    base = baseline_estimate(spec, K, N, cfg.baseline_samples)
    t2 = time.perf_counter()
    mse = mse_metric(result.final_freqs, spec.freqs)
    mse_b = mse_metric(base, spec.freqs)
    return TrialRecord(spec.freqs, result.final_freqs, base, mse, mse_b,
                       mse < cfg.success_threshold, mse_b < cfg.success_threshold,
                       result.collision_flag, {"proposed": t1 - t0, "baseline": t2 - t1})


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get("SUBNYQ_THREADS", "1")))


def _map(fn, items: Sequence, workers: int | None):
    n = _workers(workers)
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def run_trials(cfg: ExperimentConfig, K: int, snr_db: float | None,
               workers: int | None = None) -> list[TrialRecord]:
    """All trials for one (K, SNR) point; ``snr_db=None`` means noiseless.

    Trial t uses the same frequencies, amplitudes and noise realization at
    every SNR, only scaled, so SNR curves compare like with like.
    """
    def one(trial):
        spec = draw_signal(cfg, K, trial)
        if snr_db is not None:
            spec = replace(spec, noise_variance=noise_variance_for_snr(spec.signal_power, snr_db))
        return run_trial(cfg, spec)

    return _map(one, range(cfg.num_trials), workers)


@dataclass(frozen=True)
class SuccessRow:
    K: int
    trials: int
    success_proposed: float
    success_baseline: float


@dataclass(frozen=True)
class MSERow:
    snr_db: float
    mse_proposed: float
    mse_baseline: float


def run_success_sweep(cfg: ExperimentConfig, workers: int | None = None,
                      progress=None) -> list[SuccessRow]:
    """Fraction of successful trials per K at ``cfg.snr_db[0]`` (proposed and baseline)."""
    snr = cfg.snr_db[0] if cfg.snr_db else None
    rows = []
    for K in cfg.K_values:
        recs = run_trials(cfg, K, snr, workers)
        rows.append(SuccessRow(K, len(recs),
                               float(np.mean([r.success for r in recs])),
                               float(np.mean([r.success_baseline for r in recs]))))
        if progress:
            progress(f"K={K}: proposed {rows[-1].success_proposed:.3f} baseline {rows[-1].success_baseline:.3f}")
    return rows


def run_mse_sweep(cfg: ExperimentConfig, workers: int | None = None,
                  progress=None) -> list[MSERow]:
    """Mean MSE over trials at each SNR for a single K (the first of ``cfg.K_values``)."""
    K = cfg.K_values[0]
    rows = []
    for snr in cfg.snr_db:
        recs = run_trials(cfg, K, snr, workers)
        rows.append(MSERow(snr, float(np.mean([r.mse for r in recs])),
                           float(np.mean([r.mse_baseline for r in recs]))))
        if progress:
            progress(f"SNR={snr:g} dB: proposed {rows[-1].mse_proposed:.3g} baseline {rows[-1].mse_baseline:.3g}")
    return rows


@dataclass(frozen=True)
class ScenarioResult:
    spec: SignalSpec
    factors: tuple[int, int, int]
    pipeline: PipelineResult
    # pseudo-spectra for every ordered (unfold, screen) channel pair
    pair_spectra: dict = field(repr=False)


def run_scenario(spec: SignalSpec, factors=(3, 4, 5), mode: str = "combined",
                 snapshots: int = 100, window: int | None = None) -> ScenarioResult:
    """One noiseless or noisy run plus the pairwise stage spectra used for plots.

    ``pair_spectra[(x, y)]`` is the pseudo-spectrum of the candidates unfolded
    from the factor-x channel, screened by the factor-y channel, for x < y.
    A factor of 1 reduces the whole thing to Nyquist-rate ESPRIT on that channel.
    """
    factors = tuple(int(f) for f in factors)
    check_coprime(factors)
    a = min(factors)
    N = (MAX_WINDOW // a) * a if window is None else window
    L = snapshots + N - 1
    seqs = synthesize_multichannel(spec, [ChannelConfig(f) for f in factors], L)
    result = run_pipeline(seqs, spec.K, N, mode=mode)
    pairs = {}
    for i, x in enumerate(factors):
        for j, y in enumerate(factors):
            if x >= y:
                continue
            Nx = (N // x) * x
            est = esprit(seqs[i], spec.K, Nx)
            el = unfold(fold_to_hertz(est, spec.fH, x), x, spec.fH).deduplicated()
            pairs[(x, y)] = pseudo_spectrum(el, seqs[j], spec.K, Nx)
    return ScenarioResult(spec, factors, result, pairs)


def fmt(x: float) -> str:
    return f"{x:.9g}"


def success_csv(rows: Sequence[SuccessRow]) -> str:
    return _csv(SUCCESS_HEADER, [(r.K, r.trials, fmt(r.success_proposed), fmt(r.success_baseline))
                                 for r in sorted(rows, key=lambda r: r.K)])


def mse_csv(rows: Sequence[MSERow]) -> str:
    return _csv(MSE_HEADER, [(fmt(r.snr_db), fmt(r.mse_proposed), fmt(r.mse_baseline))
                             for r in sorted(rows, key=lambda r: r.snr_db)])


def scenario_csv(result: PipelineResult) -> str:
    s2, s3 = (s.normalized for s in result.stage_spectra)
    chosen = set(int(i) for i in result.selected)
    freqs = result.eligible.freqs
    rows = [(fmt(freqs[i]), fmt(s2[i]), fmt(s3[i]), fmt(result.combined[i]), int(i in chosen))
            for i in np.argsort(freqs, kind="stable")]
    return _csv(SCENARIO_HEADER, rows)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
