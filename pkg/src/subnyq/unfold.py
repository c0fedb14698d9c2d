"""Eligible-frequency unfolding, Bezout matching and ambiguity audits.

A tone folded to ``f_hat`` in a channel sampled at fH/a could be any of the
``a`` eligible frequencies ``f_hat + alpha * fH / a``. Two channels with
coprime factors a and b agree on a candidate iff

    b * alpha - a * beta = a * b * (f_hat_b - f_hat_a) / fH

has an integer right-hand side, and then (alpha, beta) is unique in
[0, a) x [0, b).
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_TOL_INT = 0.02
DUP_REL_TOL = 1e-6


@dataclass(frozen=True)
class Candidate:
    """One eligible frequency and where it came from.

    ``provenance`` lists every (k, alpha) pair that produced this frequency;
    it has more than one entry only after duplicates were merged.
    """

    freq: float
    source_k: int
    alpha: int
    provenance: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not self.provenance:
            object.__setattr__(self, "provenance", ((self.source_k, self.alpha),))


@dataclass(frozen=True)
class EligibleSet:
    candidates: tuple[Candidate, ...]
    factor: int
    fH: float
    folded: tuple[float, ...] = ()

    @property
    def freqs(self) -> np.ndarray:
        return np.array([c.freq for c in self.candidates])

    def __len__(self) -> int:
        return len(self.candidates)

    def deduplicated(self, rel_tol: float = DUP_REL_TOL) -> "EligibleSet":
        """Merge candidates closer than ``rel_tol * fH``, keeping all provenance.

        Merged candidates keep the first member's frequency. Order follows
        ascending frequency.
        """
        eps = rel_tol * self.fH
        merged: list[Candidate] = []
        for c in sorted(self.candidates, key=lambda c: (c.freq, c.source_k, c.alpha)):
            if merged and c.freq - merged[-1].freq <= eps:
                head = merged[-1]
                merged[-1] = Candidate(head.freq, head.source_k, head.alpha,
                                       head.provenance + c.provenance)
            else:
                merged.append(c)
        return EligibleSet(tuple(merged), self.factor, self.fH, self.folded)


def unfold(folded: Sequence[float], factor: int, fH: float) -> EligibleSet:
    """All eligible frequencies ``f_hat_k + alpha * fH / factor``, alpha = 0..factor-1.

    Candidates are ordered by k, then alpha.
    """
    if int(factor) != factor or factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor}")
    folded = np.atleast_1d(np.asarray(folded, dtype=float))
    width = fH / factor
    bad = (folded < 0) | (folded >= width)
    if bad.any():
        raise ValueError(f"folded frequencies {folded[bad]} outside [0, {width})")
    cands = tuple(Candidate(float(f + alpha * width), k, alpha)
                  for k, f in enumerate(folded) for alpha in range(factor))
    return EligibleSet(cands, int(factor), float(fH), tuple(float(f) for f in folded))


@dataclass(frozen=True)
class Match:
    m: int
    l: int
    alpha: int
    beta: int
    freq: float
    residual: float


@dataclass(frozen=True)
class MatchReport:
    pairs: tuple[Match, ...]
    residuals: np.ndarray = field(repr=False)  # every (m, l), RHS minus nearest integer

    @property
    def freqs(self) -> np.ndarray:
        return np.array([p.freq for p in self.pairs])


def check_coprime(factors: Sequence[int]) -> None:
    for x, y in itertools.combinations(factors, 2):
        if gcd(int(x), int(y)) != 1:
            raise ValueError(f"factors {tuple(factors)} are not pairwise coprime "
                             f"(gcd({x}, {y}) = {gcd(int(x), int(y))})")


def solve_bezout(a: int, b: int, rhs: int) -> tuple[int, int] | None:
    """The unique (alpha, beta) in [0, a) x [0, b) with ``b*alpha - a*beta = rhs``.

    Returns None when the solution falls outside the grid.
    """
    alpha = (rhs * pow(b, -1, a)) % a if a > 1 else 0
    beta, rem = divmod(b * alpha - rhs, a)
    assert rem == 0
    if 0 <= beta < b:
        return alpha, beta
    return None


def bezout_match(setA: EligibleSet, setB: EligibleSet, tol_int: float = DEFAULT_TOL_INT) -> MatchReport:
    """Pair folded estimates across two coprime channels.

    Every (m, l) whose right-hand side ``a*b*(f_hat_B[l] - f_hat_A[m]) / fH`` lies
    within ``tol_int`` of an integer yields one match at
    ``f_hat_A[m] + alpha * fH / a``.
    """
    a, b = setA.factor, setB.factor
    check_coprime((a, b))
    if setA.fH != setB.fH:
        raise ValueError("eligible sets have different fH")
    fH = setA.fH
    fa, fb = np.asarray(setA.folded), np.asarray(setB.folded)
    rhs = a * b * (fb[None, :] - fa[:, None]) / fH
    nearest = np.rint(rhs)
    resid = rhs - nearest
    pairs = []
    for m, l in zip(*np.nonzero(np.abs(resid) <= tol_int)):
        sol = solve_bezout(a, b, int(nearest[m, l]))
        if sol is None:
            continue
        alpha, beta = sol
        pairs.append(Match(int(m), int(l), alpha, beta, float(fa[m] + alpha * fH / a),
                           float(resid[m, l])))
    return MatchReport(tuple(pairs), resid)


@dataclass(frozen=True)
class Conflict:
    pair: tuple[int, int]
    channel_pair: tuple[int, int]
    multiple: int


@dataclass(frozen=True)
class AmbiguityReport:
    conflicts: tuple[Conflict, ...]
    # pairs in conflict on all three channel pairs at once; must stay empty
    simultaneous: tuple[tuple[int, int], ...] = ()

    @property
    def consistent(self) -> bool:
        return not self.simultaneous

    def __len__(self) -> int:
        return len(self.conflicts)


def audit_ambiguity(freqs: Sequence[float], factors: Sequence[int], fH: float,
                    tol_int: float = 1e-9) -> AmbiguityReport:
    """List frequency pairs whose spacing is a multiple of fH/(x*y) for a channel pair (x, y).

    Such a pair defeats matching on that channel pair. For pairwise-coprime
    factors no pair with 0 < |f_l - f_m| < fH can conflict on all channel
    pairs simultaneously; if one does it is recorded in ``simultaneous`` and
    logged as an internal-consistency error.
    """
    factors = tuple(int(x) for x in factors)
    check_coprime(factors)
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    if len(np.unique(freqs)) != len(freqs):
        raise ValueError("frequencies must be pairwise distinct")
    chan_pairs = list(itertools.combinations(factors, 2))
    conflicts, simultaneous = [], []
    for m, l in itertools.combinations(range(len(freqs)), 2):
        df = freqs[l] - freqs[m]
        hits = 0
        for x, y in chan_pairs:
            q = df * x * y / fH
            r = round(q)
            if abs(q - r) <= tol_int:
                conflicts.append(Conflict((m, l), (x, y), int(r)))
                hits += 1
        if hits == len(chan_pairs) and len(chan_pairs) > 1:
            logger.error("frequencies %g and %g conflict on every channel pair", freqs[m], freqs[l])
            simultaneous.append((m, l))
    return AmbiguityReport(tuple(conflicts), tuple(simultaneous))
