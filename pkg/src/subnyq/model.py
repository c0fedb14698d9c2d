"""Signal model and sub-Nyquist sample synthesis.

A signal is a sum of K complex exponentials with frequencies in (0, fH) plus
circular complex white Gaussian noise. A channel with undersampling factor
``a`` samples it at fH/a, i.e. ``x(n) = sum_k s_k exp(j 2 pi f_k n a / fH) + w(n)``
for n = start_index, start_index + 1, ...

All channels share the time origin t = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Sinusoid:
    """One complex exponential component."""

    freq: float
    amplitude: float = 1.0
    phase: float = 0.0

    @property
    def complex_amplitude(self) -> complex:
        return self.amplitude * np.exp(1j * self.phase)


@dataclass(frozen=True)
class SignalSpec:
    """Ground-truth signal: components, band limit ``fH``, noise variance, seed.

    ``noise_variance`` is the total variance of one complex noise sample;
    real and imaginary parts each get half of it.
    """

    components: tuple[Sinusoid, ...]
    fH: float
    noise_variance: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        self.validate()

    @classmethod
    def from_arrays(cls, freqs, fH, amplitudes=None, phases=None,
                    noise_variance=0.0, seed=0) -> "SignalSpec":
        freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
        amplitudes = np.ones_like(freqs) if amplitudes is None else np.broadcast_to(amplitudes, freqs.shape)
        phases = np.zeros_like(freqs) if phases is None else np.broadcast_to(phases, freqs.shape)
        comps = tuple(Sinusoid(float(f), float(m), float(p)) for f, m, p in zip(freqs, amplitudes, phases))
        return cls(comps, float(fH), float(noise_variance), int(seed))

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def freqs(self) -> np.ndarray:
        return np.array([c.freq for c in self.components])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([c.complex_amplitude for c in self.components])

    @property
    def signal_power(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def snr_db(self) -> float:
        """10 log10(sum |s_k|^2 / sigma^2); inf when noiseless."""
        if self.noise_variance == 0:
            return np.inf
        return 10 * np.log10(self.signal_power / self.noise_variance)

    def with_snr(self, snr_db: float) -> "SignalSpec":
        return SignalSpec(self.components, self.fH, noise_variance_for_snr(self.signal_power, snr_db), self.seed)

    def validate(self) -> None:
        if self.fH <= 0:
            raise ValueError(f"fH must be positive, got {self.fH}")
        if len(self.components) < 1:
            raise ValueError("a signal needs at least one component")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be nonnegative")
        if self.seed < 0:
            raise ValueError("seed must be an unsigned integer")
        freqs = self.freqs
        for c in self.components:
            if not 0 < c.freq < self.fH:
                raise ValueError(f"frequency {c.freq} Hz outside (0, {self.fH}) Hz")
            if not c.amplitude > 0:
                raise ValueError(f"amplitude must be positive, got {c.amplitude}")
        if len(np.unique(freqs)) != len(freqs):
            raise ValueError("component frequencies must be pairwise distinct")


def noise_variance_for_snr(signal_power: float, snr_db: float) -> float:
    return signal_power / 10 ** (snr_db / 10)


@dataclass(frozen=True)
class ChannelConfig:
    """Undersampling factor and first sample index of one channel."""

    factor: int
    start_index: int = 1

    def __post_init__(self):
        if int(self.factor) != self.factor or self.factor < 1:
            raise ValueError(f"factor must be a positive integer, got {self.factor}")
        if int(self.start_index) != self.start_index or self.start_index < 1:
            raise ValueError(f"start_index must be a positive integer, got {self.start_index}")

    def rate(self, fH: float) -> float:
        return fH / self.factor


@dataclass(frozen=True)
class ChannelSequence:
    config: ChannelConfig
    samples: np.ndarray = field(repr=False)
    fH: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("a channel sequence needs a 1-D array of at least one sample")
        object.__setattr__(self, "samples", samples)

    @property
    def factor(self) -> int:
        return self.config.factor

    @property
    def indices(self) -> np.ndarray:
        return self.config.start_index + np.arange(len(self.samples))

    def __len__(self) -> int:
        return len(self.samples)


def _noise(spec: SignalSpec, config: ChannelConfig, num_samples: int) -> np.ndarray:
    # The stream is indexed by n from 1, so a sample's noise depends only on
    # (seed, factor, n) and not on the requested window.
    rng = np.random.default_rng([spec.seed, config.factor])
    stop = config.start_index - 1 + num_samples
    z = rng.standard_normal((stop, 2))[config.start_index - 1:]
    return np.sqrt(spec.noise_variance / 2) * (z[:, 0] + 1j * z[:, 1])


def synthesize(spec: SignalSpec, config: ChannelConfig, num_samples: int) -> ChannelSequence:
    """Sample ``spec`` at rate fH/factor.

    Args:
        spec: ground-truth signal.
        config: channel factor and first sample index.
        num_samples: number of samples to draw.

    Returns:
        ChannelSequence with samples for n = start_index ... start_index + num_samples - 1.
    """
    if int(num_samples) != num_samples or num_samples < 1:
        raise ValueError(f"num_samples must be a positive integer, got {num_samples}")
    spec.validate()
    n = config.start_index + np.arange(num_samples)
    # phase in cycles, reduced mod 1 before scaling by 2 pi to keep round-off O(eps)
    cycles = np.mod(np.outer(n, spec.freqs * config.factor / spec.fH), 1.0)
    x = np.exp(2j * np.pi * cycles) @ spec.amplitudes
    if spec.noise_variance > 0:
        x = x + _noise(spec, config, num_samples)
    return ChannelSequence(config, x, spec.fH)


def synthesize_multichannel(spec: SignalSpec, configs: Sequence[ChannelConfig],
                            num_samples: int) -> list[ChannelSequence]:
    """One sequence per channel config, all sampling the same signal."""
    if len(configs) == 0:
        raise ValueError("configs must be nonempty")
    return [synthesize(spec, cfg, num_samples) for cfg in configs]


def fold_down(freqs, factor: int, fH: float) -> np.ndarray:
    """Apparent frequency of ``freqs`` in a channel sampled at fH/factor."""
    return np.mod(np.asarray(freqs, dtype=float), fH / factor)
