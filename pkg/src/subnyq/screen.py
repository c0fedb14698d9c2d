"""MUSIC-like screening of eligible frequencies and the three-channel pipeline.

The eligible set comes from ESPRIT on one channel (factor a). Each candidate
is scored against the noise subspace of another channel (factor b) with the
steering vector that channel would see,

    v(g, alpha)[n-1] = exp(j 2 pi b n (g + alpha / a)),   n = 1..N,

where g = f_hat / fH. A false candidate scores as high as a true one only when
it aliases onto a true tone in the screening channel, so two screening
channels are combined.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import ChannelSequence
from .subspace import FoldedEstimate, build_snapshots, eigen_split, esprit, estimate_covariance, fold_to_hertz
from .unfold import Candidate, EligibleSet, check_coprime, unfold

logger = logging.getLogger(__name__)

# Projection floor relative to |v|^2. Keeps P_MU finite on noiseless data,
# where the true projections are pure round-off.
SCORE_FLOOR = 1e-12
# Scores within this relative distance are tied; ties go to the lower frequency.
TIE_REL_TOL = 1e-9
MAX_WINDOW = 48

MODES = ("combined", "intersect")


@dataclass(frozen=True)
class SteeringVector:
    entries: np.ndarray
    g: float
    alpha: int


def _steering_cycles(freq_fraction, screen_factor: int, N: int) -> np.ndarray:
    # freq_fraction = f / fH; result in cycles reduced mod 1, shape (N, len)
    n = np.arange(1, N + 1)
    return np.mod(np.outer(n, screen_factor * np.atleast_1d(freq_fraction)), 1.0)


def steering(g: float, alpha: int, unfold_factor: int, screen_factor: int, N: int) -> SteeringVector:
    """Steering vector of candidate ``(g + alpha / a) * fH`` seen by a factor-b channel."""
    if N < 1:
        raise ValueError("N must be positive")
    if not 0 <= alpha < unfold_factor:
        raise ValueError(f"alpha must lie in [0, {unfold_factor}), got {alpha}")
    if not 0 <= g < 1 / unfold_factor + 1e-12:
        raise ValueError(f"g must lie in [0, 1/{unfold_factor}), got {g}")
    # exact rational offset alpha*b/a folded before adding g keeps phases tight
    n = np.arange(1, N + 1)
    cycles = np.mod(n * screen_factor * g + np.mod(n * screen_factor * alpha, unfold_factor) / unfold_factor, 1.0)
    return SteeringVector(np.exp(2j * np.pi * cycles), float(g), int(alpha))


def steering_matrix(freqs, fH: float, screen_factor: int, N: int) -> np.ndarray:
    """Columns are steering vectors for candidate frequencies ``freqs`` (Hz)."""
    return np.exp(2j * np.pi * _steering_cycles(np.asarray(freqs, dtype=float) / fH, screen_factor, N))


@dataclass(frozen=True)
class PseudoSpectrum:
    candidates: tuple[Candidate, ...]
    values: np.ndarray
    screening_factor: int

    @property
    def freqs(self) -> np.ndarray:
        return np.array([c.freq for c in self.candidates])

    @property
    def normalized(self) -> np.ndarray:
        return self.values / self.values.max()

    def ranking(self) -> np.ndarray:
        return rank(self.values, self.freqs)

    def top(self, K: int) -> np.ndarray:
        return self.freqs[self.ranking()[:K]]


def rank(scores, freqs, rel_tol: float = TIE_REL_TOL) -> np.ndarray:
    """Indices sorted by descending score, near-ties broken by ascending frequency."""
    scores = np.asarray(scores, dtype=float)
    freqs = np.asarray(freqs, dtype=float)
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], freqs[i]))
    out: list[int] = []
    i = 0
    while i < len(order):
        lead = scores[order[i]]
        j = i + 1
        while j < len(order) and scores[order[j]] >= lead * (1 - rel_tol):
            j += 1
        out.extend(sorted(order[i:j], key=lambda k: freqs[k]))
        i = j
    return np.array(out, dtype=int)


def pseudo_spectrum(eligible: EligibleSet, screen_seq: ChannelSequence, K: int, N: int,
                    floor: float = SCORE_FLOOR) -> PseudoSpectrum:
    """Score every eligible candidate against the noise subspace of ``screen_seq``.

    Args:
        eligible: candidates unfolded from another channel (factor a).
        screen_seq: the screening channel (factor b, coprime to a).
        K: number of tones.
        N: window length; must be a multiple of a so that the a steering
            vectors sharing one fold-down are mutually orthogonal.
        floor: projection floor relative to ``|v|^2``.

    Returns:
        PseudoSpectrum with ``1 / (v^H U_e U_e^H v + floor * N)`` per candidate.
    """
    a, b = eligible.factor, screen_seq.factor
    check_coprime((a, b))
    if N % a:
        raise ValueError(f"window length {N} must be a multiple of the unfolding factor {a}")
    if K >= N:
        raise ValueError(f"no noise subspace: K={K} >= N={N}")
    if screen_seq.fH != eligible.fH:
        raise ValueError("screening channel and eligible set disagree on fH")
    split = eigen_split(estimate_covariance(build_snapshots(screen_seq, N)), K)
    V = steering_matrix(eligible.freqs, eligible.fH, b, N)
    proj = np.sum(np.abs(split.noise_basis.conj().T @ V) ** 2, axis=0)
    return PseudoSpectrum(eligible.candidates, 1.0 / (proj + floor * N), b)


@dataclass(frozen=True)
class PipelineResult:
    final_freqs: np.ndarray
    stage_spectra: tuple[PseudoSpectrum, PseudoSpectrum]
    collision_flag: bool
    mode: str
    eligible: EligibleSet
    folded: FoldedEstimate
    combined: np.ndarray = field(repr=False)
    selected: np.ndarray = field(repr=False)  # indices into eligible.candidates
    filled: tuple[float, ...] = ()  # intersect mode: picks taken from combined rank
    window_len: int = 0

    @property
    def unfold_factor(self) -> int:
        return self.eligible.factor

    @property
    def screen_factors(self) -> tuple[int, int]:
        return tuple(s.screening_factor for s in self.stage_spectra)


def pick_window(factor: int, length: int, limit: int = MAX_WINDOW) -> int:
    """Largest multiple of ``factor`` not above ``min(limit, length // 2)``."""
    N = (min(limit, length // 2) // factor) * factor
    if N < factor:
        raise ValueError(f"sequence of length {length} too short for factor {factor}")
    return N


def run_pipeline(sequences: Sequence[ChannelSequence], K: int, N: int | None = None,
                 mode: str = "combined", unfold_channel: int | None = None) -> PipelineResult:
    """Estimate K frequencies from three coprime sub-Nyquist channels.

    ESPRIT on the unfolding channel gives K fold-downs, which are unfolded to
    K*a eligible candidates and screened against the two other channels.
    In ``combined`` mode the final score is the product of the two stage
    spectra normalized to max 1. In ``intersect`` mode the top K of each stage
    are intersected and any shortfall is filled from the combined ranking.

    Args:
        sequences: three channels sharing fH, pairwise-coprime factors.
        K: number of tones.
        N: window length; rounded down to a multiple of the unfolding factor.
            Defaults to the largest such multiple up to 48.
        mode: ``"combined"`` or ``"intersect"``.
        unfold_channel: index of the channel to run ESPRIT on; defaults to
            the smallest factor.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if len(sequences) != 3:
        raise ValueError(f"need exactly three channels, got {len(sequences)}")
    factors = [s.factor for s in sequences]
    check_coprime(factors)
    if len({s.fH for s in sequences}) != 1:
        raise ValueError("channels disagree on fH")
    fH = sequences[0].fH

    if unfold_channel is None:
        unfold_channel = int(np.argmin(factors))
    first = sequences[unfold_channel]
    others = [s for i, s in enumerate(sequences) if i != unfold_channel]
    a = first.factor
    shortest = min(len(s) for s in sequences)
    if N is None:
        N = pick_window(a, shortest)
    elif N % a:
        logger.info("window %d rounded down to a multiple of %d", N, a)
        N = (N // a) * a
    if N <= K + 1:
        raise ValueError(f"window length {N} must exceed K + 1 = {K + 1}")

    folded = esprit(first, K, N)
    eligible = unfold(fold_to_hertz(folded, fH, a), a, fH).deduplicated()
    spectra = tuple(pseudo_spectrum(eligible, s, K, N) for s in others)
    combined = spectra[0].normalized * spectra[1].normalized
    freqs = eligible.freqs
    order = rank(combined, freqs)

    collision = folded.collision
    filled: list[float] = []
    if mode == "combined":
        selected = order[:K]
    else:
        keep = set(spectra[0].ranking()[:K]) & set(spectra[1].ranking()[:K])
        selected = [i for i in order if i in keep]
        for i in order:
            if len(selected) >= K:
                break
            if i not in keep:
                selected.append(i)
                filled.append(float(freqs[i]))
        selected = np.array(selected[:K], dtype=int)

    if len(selected) < K:
        # fewer distinct candidates than tones: only possible with collisions
        collision = True
        selected = np.resize(selected, K)
    return PipelineResult(
        final_freqs=np.sort(freqs[selected]),
        stage_spectra=spectra,
        collision_flag=collision,
        mode=mode,
        eligible=eligible,
        folded=folded,
        combined=combined,
        selected=np.asarray(selected),
        filled=tuple(filled),
        window_len=N,
    )
