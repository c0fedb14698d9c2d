import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import dft_peaks
from subnyq.model import ChannelConfig, SignalSpec, Sinusoid, fold_down, synthesize, synthesize_multichannel


def test_first_sample_by_hand():
    spec = SignalSpec.from_arrays([25.0], 60)
    seq = synthesize(spec, ChannelConfig(3), 4)
    assert seq.indices[0] == 1
    assert seq.samples[0] == pytest.approx(1j, abs=1e-12)
    expected = [cmath.exp(2j * cmath.pi * 25 * 3 * n / 60) for n in range(1, 5)]
    np.testing.assert_allclose(seq.samples, expected, atol=1e-12)


def test_exact_alias_to_dc():
    spec = SignalSpec.from_arrays([15.0], 60)
    seq = synthesize(spec, ChannelConfig(4), 37)
    np.testing.assert_allclose(seq.samples, 1.0, atol=1e-12)


def test_start_index_windows_the_same_stream():
    spec = SignalSpec.from_arrays([7.3, 21.9], 60, noise_variance=0.3, seed=5)
    full = synthesize(spec, ChannelConfig(4), 50)
    tail = synthesize(spec, ChannelConfig(4, start_index=11), 40)
    np.testing.assert_array_equal(full.samples[10:], tail.samples)


def test_multichannel_fold_downs_match_dft_oracle():
    spec = SignalSpec.from_arrays([25.0, 50.0], 60)
    seqs = synthesize_multichannel(spec, [ChannelConfig(f) for f in (3, 4, 5)], 600)
    expected = {3: [5, 10], 4: [5, 10], 5: [1, 2]}
    for s in seqs:
        peaks = dft_peaks(s.samples, 60 / s.factor, 2)
        np.testing.assert_allclose(peaks, expected[s.factor], atol=0.01)
        np.testing.assert_allclose(np.sort(fold_down(spec.freqs, s.factor, 60)), expected[s.factor])


def test_single_channel_list_matches_synthesize():
    spec = SignalSpec.from_arrays([12.5, 40.0], 60, noise_variance=0.1, seed=3)
    [one] = synthesize_multichannel(spec, [ChannelConfig(7)], 30)
    np.testing.assert_array_equal(one.samples, synthesize(spec, ChannelConfig(7), 30).samples)


def test_seeded_synthesis_is_bit_identical():
    spec = SignalSpec.from_arrays([12.5, 40.0], 60, noise_variance=0.1, seed=3)
    a = synthesize_multichannel(spec, [ChannelConfig(f) for f in (3, 4, 5)], 64)
    b = synthesize_multichannel(spec, [ChannelConfig(f) for f in (3, 4, 5)], 64)
    for x, y in zip(a, b):
        assert x.samples.tobytes() == y.samples.tobytes()


def test_noise_independent_across_channels():
    spec = SignalSpec.from_arrays([10.0], 60, amplitudes=[1e-300], noise_variance=1.0, seed=1)
    a, b = synthesize_multichannel(spec, [ChannelConfig(3), ChannelConfig(4)], 20000)
    corr = np.abs(np.vdot(a.samples, b.samples)) / len(a)
    assert corr < 0.03


def test_noise_statistics():
    # zero amplitude is forbidden, so use a vanishing one
    spec = SignalSpec.from_arrays([10.0], 60, amplitudes=[1e-300], noise_variance=2.5, seed=11)
    x = synthesize(spec, ChannelConfig(3), 100_000).samples
    assert abs(x.mean()) < 0.05 * np.sqrt(2.5)
    assert np.var(x) == pytest.approx(2.5, rel=0.05)
    assert np.var(x.real) == pytest.approx(1.25, rel=0.05)
    assert np.var(x.imag) == pytest.approx(1.25, rel=0.05)


def test_periodic_when_rational():
    # f * factor / fH = 25*3/60 = 5/4 and 50*3/60 = 5/2: common denominator 4
    spec = SignalSpec.from_arrays([25.0, 50.0], 60, amplitudes=[1, 0.5], phases=[0.3, 1.1])
    x = synthesize(spec, ChannelConfig(3), 40).samples
    np.testing.assert_allclose(x[:-4], x[4:], atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(f=st.floats(0.5, 19.0), factor=st.integers(1, 9), m=st.integers(1, 8), phase=st.floats(0, 6.28))
def test_aliasing_identity(f, factor, m, phase):
    fH = 60.0
    shifted = f + m * fH / factor
    if shifted >= fH:
        return
    a = synthesize(SignalSpec.from_arrays([f], fH, phases=[phase]), ChannelConfig(factor), 64)
    b = synthesize(SignalSpec.from_arrays([shifted], fH, phases=[phase]), ChannelConfig(factor), 64)
    np.testing.assert_allclose(a.samples, b.samples, atol=1e-9)


def test_snr_round_trip():
    spec = SignalSpec.from_arrays([10.0, 20.0], 60, amplitudes=[1.0, 0.5]).with_snr(20)
    assert spec.noise_variance == pytest.approx(1.25 / 100)
    assert spec.snr_db == pytest.approx(20)


@pytest.mark.parametrize("kwargs", [
    dict(freqs=[0.0], fH=60),
    dict(freqs=[60.0], fH=60),
    dict(freqs=[10.0, 10.0], fH=60),
    dict(freqs=[10.0], fH=60, amplitudes=[0.0]),
    dict(freqs=[10.0], fH=60, noise_variance=-1),
    dict(freqs=[], fH=60),
])
def test_invalid_specs_rejected(kwargs):
    with pytest.raises(ValueError):
        SignalSpec.from_arrays(**kwargs)


def test_invalid_channel_and_length():
    with pytest.raises(ValueError):
        ChannelConfig(0)
    with pytest.raises(ValueError):
        ChannelConfig(3, start_index=0)
    spec = SignalSpec((Sinusoid(10.0),), 60)
    with pytest.raises(ValueError):
        synthesize(spec, ChannelConfig(3), 0)
    with pytest.raises(ValueError):
        synthesize_multichannel(spec, [], 10)
