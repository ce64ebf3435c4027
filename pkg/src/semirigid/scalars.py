"""Scalar and matrix layer with two arithmetic regimes.

All linear algebra in this package runs in one of two modes: exact rational
(Python ``Fraction`` entries, tolerance-free) or complex floating point with
an explicit tolerance policy.  The two regimes are never mixed inside a single
computation; the only supported conversion is rational -> float.

Matrices are plain numpy arrays: ``dtype=object`` holding ``Fraction``/``int``
entries in rational mode, ``dtype=complex`` in float mode.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

RATIONAL = "rational"
COMPLEX = "complex"


class PreconditionError(Exception):
    """An operation was invoked on input violating its mathematical precondition."""


class IrrationalSpectrumError(PreconditionError):
    """Exact eigenvalues requested but the characteristic polynomial does not split over Q."""


@dataclass(frozen=True)
class ScalarMode:
    """Arithmetic regime plus the tolerances used by floating-point decisions.

    ``tol_rank`` is relative to the largest singular value; ``tol_residual``
    bounds accepted residuals relative to the natural scale of the input.
    Both are ignored (with a warning) in rational mode.
    """

    kind: str
    tol_rank: float = 0.0
    tol_residual: float = 0.0

    def __post_init__(self):
        if self.kind not in (RATIONAL, COMPLEX):
            raise ValueError(f"unknown scalar mode {self.kind!r}")
        if self.kind == RATIONAL:
            if self.tol_rank or self.tol_residual:
                warnings.warn("tolerances are ignored in exact rational mode", stacklevel=3)
        else:
            if not (self.tol_rank > 0 and self.tol_residual > 0):
                raise ValueError("complex mode requires strictly positive tolerances")

    @classmethod
    def exact(cls) -> "ScalarMode":
        return cls(RATIONAL)

    @classmethod
    def floating(cls, tol_rank: float = 1e-8, tol_residual: float = 1e-8) -> "ScalarMode":
        return cls(COMPLEX, tol_rank=tol_rank, tol_residual=tol_residual)

    @property
    def is_exact(self) -> bool:
        return self.kind == RATIONAL


def as_fraction(x) -> Fraction:
    """Coerce to Fraction with plain-int internals (numpy ints are normalized)."""
    if isinstance(x, Fraction):
        if isinstance(x.numerator, int) and isinstance(x.denominator, int):
            return x
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(x)


def exact_matrix(rows) -> np.ndarray:
    """Build an object-dtype matrix with Fraction entries."""
    a = np.empty((len(rows), len(rows[0]) if len(rows) else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            a[i, j] = as_fraction(x)
    return a


def float_matrix(rows) -> np.ndarray:
    return np.array(rows, dtype=complex)


def to_float(a: np.ndarray) -> np.ndarray:
    """Explicit (lossy) rational -> complex float conversion."""
    if a.dtype == object:
        out = np.array([complex(x) for x in a.reshape(-1)], dtype=complex)
        return out.reshape(a.shape)
    return np.asarray(a, dtype=complex)


def zeros(shape, mode: ScalarMode) -> np.ndarray:
    if mode.is_exact:
        a = np.empty(shape, dtype=object)
        a[...] = Fraction(0)
        return a
    return np.zeros(shape, dtype=complex)


def identity(n: int, mode: ScalarMode) -> np.ndarray:
    a = zeros((n, n), mode)
    one = Fraction(1) if mode.is_exact else 1.0 + 0j
    for i in range(n):
        a[i, i] = one
    return a


def is_exact_array(a: np.ndarray) -> bool:
    return a.dtype == object


# ---------------------------------------------------------------------------
# rank / nullspace


def _clear_denominators(a: np.ndarray) -> list[list[int]]:
    # Row scaling preserves rank and nullspace.
    out = []
    for row in a:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        out.append([int(x * lcm) for x in row])
    return out


def _rank_exact(a: np.ndarray) -> int:
    # Fraction-free (Bareiss) elimination on the denominator-cleared matrix.
    m = _clear_denominators(exact_matrix(a) if a.dtype != object else a)
    nrows, ncols = len(m), len(m[0]) if m else 0
    rank = 0
    prev = 1
    row = 0
    for col in range(ncols):
        pivot = next((r for r in range(row, nrows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        for r in range(row + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (m[row][col] * m[r][c] - m[r][col] * m[row][c]) // prev
            m[r][col] = 0
        prev = m[row][col]
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def _rref_exact(a: np.ndarray):
    """Reduced row echelon form over Q; returns (rows, pivot column list)."""
    m = [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in a]
    nrows, ncols = len(m), len(m[0]) if m else 0
    pivots = []
    row = 0
    for col in range(ncols):
        pivot = next((r for r in range(row, nrows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for r in range(nrows):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    return m, pivots


def rank(a: np.ndarray, mode: ScalarMode) -> int:
    """Rank of a matrix; exact elimination or SVD with a relative threshold."""
    a = np.asarray(a)
    if a.size == 0:
        return 0
    if mode.is_exact:
        return _rank_exact(a)
    s = np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > mode.tol_rank * s[0]))


def nullspace(a: np.ndarray, mode: ScalarMode) -> list[np.ndarray]:
    """Basis of the right nullspace; len(basis) == cols - rank."""
    a = np.asarray(a)
    nrows, ncols = a.shape
    if nrows == 0 or ncols == 0:
        return [identity(ncols, mode)[:, j] for j in range(ncols)] if ncols else []
    if mode.is_exact:
        m, pivots = _rref_exact(a)
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = np.empty(ncols, dtype=object)
            v[...] = Fraction(0)
            v[fc] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -m[r][fc]
            basis.append(v)
        return basis
    af = np.asarray(a, dtype=complex)
    _, s, vh = np.linalg.svd(af)
    r = 0 if s.size == 0 or s[0] == 0 else int(np.sum(s > mode.tol_rank * s[0]))
    return [np.conj(vh[j]) for j in range(r, ncols)]


# ---------------------------------------------------------------------------
# eigenvalues


def _char_poly_exact(a: np.ndarray) -> list[Fraction]:
    """Monic characteristic polynomial of a rational matrix (Faddeev-LeVerrier).

    Returned coefficients are [c_0, ..., c_{n-1}, 1] for
    p(x) = x^n + c_{n-1} x^{n-1} + ... + c_0.
    """
    n = a.shape[0]
    coeffs = [Fraction(0)] * n + [Fraction(1)]
    m = identity(n, ScalarMode.exact())
    for k in range(1, n + 1):
        m = a @ m
        c = -sum(m[i, i] for i in range(n)) / k
        coeffs[n - k] = c
        for i in range(n):
            m[i, i] = m[i, i] + c
    return coeffs


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return sorted(out)


def _rational_roots(coeffs: list[Fraction], degree: int) -> list[Fraction]:
    """All roots with multiplicity, or raise if the polynomial does not split over Q."""
    roots = []
    poly = list(coeffs[: degree + 1])
    while len(poly) > 1:
        if poly[0] == 0:
            roots.append(Fraction(0))
            poly = poly[1:]
            continue
        lcm = 1
        for c in poly:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        ints = [int(c * lcm) for c in poly]
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        ints = [c // g for c in ints]
        found = None
        for q in _divisors(ints[-1]):
            for p in _divisors(ints[0]):
                if math.gcd(p, q) != 1:
                    continue
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    acc = Fraction(0)
                    for c in reversed(poly):
                        acc = acc * cand + c
                    if acc == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            raise IrrationalSpectrumError(
                "characteristic polynomial does not split over the rationals"
            )
        roots.append(found)
        # synthetic division by (x - root)
        new = [Fraction(0)] * (len(poly) - 1)
        carry = poly[-1]
        for i in range(len(poly) - 2, -1, -1):
            new[i] = carry
            carry = poly[i] + carry * found
        poly = new
    return roots


def eigenvalues(a: np.ndarray, mode: ScalarMode) -> list:
    """Eigenvalues with multiplicity.

    Exact mode requires the characteristic polynomial to split over Q and
    raises :class:`IrrationalSpectrumError` otherwise.
    """
    a = np.asarray(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("eigenvalues require a square matrix")
    if a.shape[0] == 0:
        return []
    if mode.is_exact:
        coeffs = _char_poly_exact(exact_matrix(a) if a.dtype != object else a)
        return _rational_roots(coeffs, a.shape[0])
    return list(np.linalg.eigvals(np.asarray(a, dtype=complex)))
