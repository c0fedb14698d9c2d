"""Snapshot covariance, signal/noise subspace split and least-squares ESPRIT."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import ChannelSequence

logger = logging.getLogger(__name__)

# K-th eigenvalue below this fraction of the largest means fewer than K
# resolvable tones (two frequencies share a fold-down).
RANK_TOL = 1e-10


@dataclass(frozen=True)
class SnapshotMatrix:
    """Stride-1 Hankel windows; column t is ``[x(t), ..., x(t+N-1)]``."""

    entries: np.ndarray

    @property
    def window_len(self) -> int:
        return self.entries.shape[0]

    @property
    def num_snapshots(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class CovarianceEstimate:
    matrix: np.ndarray
    num_snapshots: int


@dataclass(frozen=True)
class SubspaceSplit:
    signal_basis: np.ndarray
    noise_basis: np.ndarray
    eigenvalues: np.ndarray  # descending

    @property
    def K(self) -> int:
        return self.signal_basis.shape[1]


@dataclass(frozen=True)
class FoldedEstimate:
    """ESPRIT output for one channel.

    ``fractions`` are Arg(eta)/(2 pi) mapped into [0, 1), i.e. the folded
    frequency in units of the channel sampling rate.
    """

    fractions: np.ndarray
    eigenvalues: np.ndarray
    collision: bool = False


def default_window(length: int) -> int:
    return min(length // 2, 50)


def build_snapshots(seq: ChannelSequence | np.ndarray, window_len: int) -> SnapshotMatrix:
    x = seq.samples if isinstance(seq, ChannelSequence) else np.asarray(seq, dtype=complex)
    if window_len < 2:
        raise ValueError(f"window length must be at least 2, got {window_len}")
    if len(x) < window_len:
        raise ValueError(f"sequence of length {len(x)} is shorter than window {window_len}")
    H = np.lib.stride_tricks.sliding_window_view(x, window_len).T
    return SnapshotMatrix(np.ascontiguousarray(H))


def estimate_covariance(snap: SnapshotMatrix) -> CovarianceEstimate:
    """Sample covariance ``(1/T) sum_t x_t x_t^H``, symmetrized."""
    X = snap.entries
    R = X @ X.conj().T / X.shape[1]
    R = 0.5 * (R + R.conj().T)
    return CovarianceEstimate(R, X.shape[1])


def eigen_split(cov: CovarianceEstimate | np.ndarray, K: int) -> SubspaceSplit:
    """Split eigenvectors into the K-dimensional signal and the noise subspace."""
    R = cov.matrix if isinstance(cov, CovarianceEstimate) else np.asarray(cov)
    N = R.shape[0]
    if not 1 <= K < N:
        raise ValueError(f"need 1 <= K < N, got K={K}, N={N}")
    w, U = np.linalg.eigh(R)
    w, U = w[::-1], U[:, ::-1]
    return SubspaceSplit(U[:, :K], U[:, K:], w)


def _eigvals(Phi: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvals(Phi)
    except np.linalg.LinAlgError:
        T, _ = scipy.linalg.schur(Phi, output="complex")
        return np.diag(T)


def esprit(seq: ChannelSequence, K: int, window_len: int | None = None) -> FoldedEstimate:
    """Least-squares ESPRIT on one channel.

    Args:
        seq: the sample sequence.
        K: number of complex exponentials (trusted, not estimated).
        window_len: snapshot length N; defaults to ``min(len // 2, 50)``.

    Returns:
        FoldedEstimate whose fractions equal ``(f_k * factor / fH) mod 1``
        in the noiseless case. ``collision`` is set when the signal subspace
        is rank deficient, which happens when tones share a fold-down.
    """
    N = default_window(len(seq)) if window_len is None else window_len
    if N <= K + 1:
        raise ValueError(f"window length {N} must exceed K + 1 = {K + 1}")
    if len(seq) < N + 1:
        raise ValueError(f"sequence of length {len(seq)} too short for window {N}")
    split = eigen_split(estimate_covariance(build_snapshots(seq, N)), K)
    Us = split.signal_basis
    U1, U2 = Us[:-1], Us[1:]

    lam = split.eigenvalues
    collision = bool(lam[0] <= 0 or lam[K - 1] <= RANK_TOL * lam[0])
    sv = np.linalg.svd(U1, compute_uv=False)
    if sv[-1] <= RANK_TOL * max(sv[0], 1.0):
        collision = True
    if collision:
        logger.warning("rank-deficient signal subspace on factor-%d channel: "
                       "fewer than %d distinct fold-downs", seq.factor, K)

    Phi = np.linalg.pinv(U1) @ U2
    eta = _eigvals(Phi)
    fractions = np.mod(np.angle(eta) / (2 * np.pi), 1.0)
    # mod can round 1 - tiny up to exactly 1.0
    fractions[fractions >= 1.0] = 0.0
    return FoldedEstimate(fractions, eta, collision)


def fold_to_hertz(est: FoldedEstimate | np.ndarray, fH: float, factor: int) -> np.ndarray:
    """Folded estimates in hertz, each in [0, fH/factor)."""
    if factor < 1:
        raise ValueError("factor must be >= 1")
    g = est.fractions if isinstance(est, FoldedEstimate) else np.asarray(est, dtype=float)
    return g * fH / factor
