"""Independent reference computations used by several test modules."""
import itertools
from fractions import Fraction

import numpy as np


def dft_peaks(x, rate, K, pad=64):
    """Frequencies (Hz, in [0, rate)) of the K largest zero-padded DFT peaks."""
    n = len(x) * pad
    mag = np.abs(np.fft.fft(x, n))
    peaks = np.nonzero((mag > np.roll(mag, 1)) & (mag >= np.roll(mag, -1)))[0]
    best = peaks[np.argsort(mag[peaks])[::-1][:K]]
    return np.sort(best * rate / n)


def grid_bezout(a, b, rhs):
    """All (alpha, beta) in the bounded grid with b*alpha - a*beta == rhs."""
    return [(al, be) for al in range(a) for be in range(b) if b * al - a * be == rhs]


def pair_matches(folded_a, a, folded_b, b, fH, eps):
    """Brute force: every pair of eligible frequencies closer than eps."""
    out = set()
    for m, fa in enumerate(folded_a):
        for l, fb in enumerate(folded_b):
            for al, be in itertools.product(range(a), range(b)):
                if abs((fa + al * fH / a) - (fb + be * fH / b)) <= eps:
                    out.add((m, l, al, be))
    return out


def exact_conflicts(freqs, factors, fH):
    """(m, l, (x, y), multiple) for pairs whose spacing * x*y / fH is an integer, in exact arithmetic."""
    fr = [Fraction(str(f)) for f in freqs]
    fH = Fraction(str(fH))
    out = set()
    for m, l in itertools.combinations(range(len(fr)), 2):
        for x, y in itertools.combinations(factors, 2):
            q = (fr[l] - fr[m]) * x * y / fH
            if q.denominator == 1:
                out.add((m, l, (x, y), int(q)))
    return out


def circular_distance(u, v):
    d = np.mod(np.asarray(u) - np.asarray(v), 1.0)
    return np.minimum(d, 1 - d)


def match_circular(est, true):
    """Max circular distance after greedily pairing each true fraction with its nearest estimate."""
    est = list(est)
    worst = 0.0
    for t in true:
        d = circular_distance(est, t)
        i = int(np.argmin(d))
        worst = max(worst, float(d[i]))
        est.pop(i)
    return worst
