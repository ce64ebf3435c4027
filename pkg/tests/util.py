"""Shared helpers for the test suite."""

from fractions import Fraction

import numpy as np

from semirigid.exterior import Bivector, SkewPairing, pair_list, wedge
from semirigid.scalars import ScalarMode, rank

EXACT = ScalarMode.exact()


def projective_distance(w1: Bivector, w2: Bivector) -> float:
    """Sine of the angle between two bivectors seen as projective points."""
    a = np.array([complex(c) for c in w1.coeffs])
    b = np.array([complex(c) for c in w2.coeffs])
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 1.0
    a = a / na
    b = b / nb
    return float(np.linalg.norm(a - np.vdot(b, a) * b))


def random_rank2_bivector(rng, d):
    while True:
        u = [int(x) for x in rng.integers(-3, 4, size=d)]
        v = [int(x) for x in rng.integers(-3, 4, size=d)]
        w = wedge(u, v)
        if not w.is_zero():
            return w, u, v


def planted_kernel_pairing(rng, d, m, plant: Bivector) -> SkewPairing:
    """Random rational pairing corrected so the planted bivector is in its kernel."""
    npairs = len(pair_list(d))
    w = [Fraction(int(c)) for c in plant.coeffs]
    ww = sum(x * x for x in w)
    rows = []
    for _ in range(m):
        row = [Fraction(int(x)) for x in rng.integers(-3, 4, size=npairs)]
        rw = sum(r * x for r, x in zip(row, w))
        row = [r - rw * x / ww for r, x in zip(row, w)]
        rows.append(row)
    entries = tuple(tuple(rows[k][idx] for k in range(m)) for idx in range(npairs))
    return SkewPairing(d, m, entries)


def random_injective_pairing(rng, d, extra=2) -> SkewPairing:
    """Random rational pairing with zero kernel (full column rank tensor)."""
    npairs = len(pair_list(d))
    m = npairs + extra
    while True:
        mat = rng.integers(-3, 4, size=(m, npairs))
        obj = np.empty((m, npairs), dtype=object)
        for i in range(m):
            for j in range(npairs):
                obj[i, j] = Fraction(int(mat[i, j]))
        if rank(obj, EXACT) == npairs:
            entries = tuple(tuple(obj[k, idx] for k in range(m)) for idx in range(npairs))
            return SkewPairing(d, m, entries)
