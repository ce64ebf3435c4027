"""Bivector algebra on V: skew pairings, kernels, ranks, and decomposability.

A skew pairing is the tensor of a linear map from the second exterior power
of V into a target space W, stored on the strictly-upper-triangular index
pairs (i, j), i < j, and extended by antisymmetry.  Bivectors are stored the
same way.  Decomposability (rank 2 of the associated skew matrix) is decided
exactly for dim V <= 4, where the rank-2 locus is cut out by a single
Pfaffian; higher dimensions are handled by the verdict engine's search.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .scalars import ScalarMode, nullspace, rank, to_float

YES = "yes"
NO = "no"
NOT_APPLICABLE = "not_applicable"


def pair_count(d: int) -> int:
    return d * (d - 1) // 2


def pair_list(d: int) -> list[tuple[int, int]]:
    """Index pairs (i, j), i < j, in lexicographic order."""
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def pair_index(i: int, j: int, d: int) -> int:
    if not 0 <= i < j < d:
        raise ValueError(f"need 0 <= i < j < d, got ({i}, {j}) with d={d}")
    return i * d - i * (i + 1) // 2 + (j - i - 1)


def is_rational_scalar(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class Bivector:
    """Element of the second exterior power of V, coefficients on pairs i < j."""

    dim_v: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != pair_count(self.dim_v):
            raise ValueError("coefficient count does not match dim_v")

    @classmethod
    def zero(cls, d: int) -> "Bivector":
        return cls(d, (0,) * pair_count(d))

    @classmethod
    def from_pairs(cls, d: int, values: dict) -> "Bivector":
        coeffs = [0] * pair_count(d)
        for (i, j), v in values.items():
            if i < j:
                coeffs[pair_index(i, j, d)] = v
            elif j < i:
                coeffs[pair_index(j, i, d)] = -v
            elif v != 0:
                raise ValueError("diagonal coefficient must vanish")
        return cls(d, tuple(coeffs))

    @classmethod
    def basis_element(cls, d: int, i: int, j: int) -> "Bivector":
        return cls.from_pairs(d, {(i, j): 1})

    def coefficient(self, i: int, j: int):
        if i == j:
            return 0
        if i < j:
            return self.coeffs[pair_index(i, j, self.dim_v)]
        return -self.coeffs[pair_index(j, i, self.dim_v)]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(is_rational_scalar(c) for c in self.coeffs)

    def skew_matrix(self) -> np.ndarray:
        """The associated d x d skew-symmetric matrix."""
        d = self.dim_v
        m = np.zeros((d, d), dtype=complex)
        if self.is_rational():
            m = np.empty((d, d), dtype=object)
            m[...] = Fraction(0)
        for (i, j), c in zip(pair_list(d), self.coeffs):
            m[i, j] = c
            m[j, i] = -c
        return m

    def coeff_array(self) -> np.ndarray:
        if self.is_rational():
            out = np.empty(len(self.coeffs), dtype=object)
            out[:] = self.coeffs
            return out
        return np.array(self.coeffs, dtype=complex)

    def __add__(self, other: "Bivector") -> "Bivector":
        if self.dim_v != other.dim_v:
            raise ValueError("dimension mismatch")
        return Bivector(self.dim_v, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Bivector") -> "Bivector":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "Bivector":
        return Bivector(self.dim_v, tuple(scalar * c for c in self.coeffs))

    def __neg__(self) -> "Bivector":
        return (-1) * self


def wedge(u, v) -> Bivector:
    """The decomposable bivector u wedge v."""
    d = len(u)
    if len(v) != d:
        raise ValueError("dimension mismatch")
    return Bivector(d, tuple(u[i] * v[j] - u[j] * v[i] for i, j in pair_list(d)))


@dataclass(frozen=True)
class SkewPairing:
    """Skew pairing into W: tensor rows indexed by pairs (i, j), i < j.

    ``entries[p][k]`` is the k-th W-coordinate of the image of the p-th basis
    bivector.  ``dim_w == 0`` encodes the identically-zero pairing.
    """

    dim_v: int
    dim_w: int
    entries: tuple

    def __post_init__(self):
        if self.dim_v < 1 or self.dim_w < 0:
            raise ValueError("need dim_v >= 1 and dim_w >= 0")
        if len(self.entries) != pair_count(self.dim_v):
            raise ValueError("entry rows do not match dim_v")
        if any(len(row) != self.dim_w for row in self.entries):
            raise ValueError("entry row length does not match dim_w")

    @classmethod
    def zero(cls, d: int, m: int) -> "SkewPairing":
        return cls(d, m, tuple((0,) * m for _ in range(pair_count(d))))

    @classmethod
    def identity(cls, d: int) -> "SkewPairing":
        """The identity pairing of V wedge V onto itself."""
        n = pair_count(d)
        rows = []
        for p in range(n):
            row = [0] * n
            row[p] = 1
            rows.append(tuple(row))
        return cls(d, n, tuple(rows))

    @classmethod
    def from_map(cls, d: int, m: int, values: dict) -> "SkewPairing":
        rows = [[0] * m for _ in range(pair_count(d))]
        for (i, j), vec in values.items():
            if not i < j:
                raise ValueError("pairs must satisfy i < j")
            if len(vec) != m:
                raise ValueError("value vector length does not match dim_w")
            rows[pair_index(i, j, d)] = list(vec)
        return cls(d, m, tuple(tuple(r) for r in rows))

    def is_rational(self) -> bool:
        return all(is_rational_scalar(x) for row in self.entries for x in row)

    def matrix(self) -> np.ndarray:
        """The dim_w x pair_count matrix of the pairing."""
        p = pair_count(self.dim_v)
        if self.is_rational():
            m = np.empty((self.dim_w, p), dtype=object)
            for k in range(self.dim_w):
                for idx in range(p):
                    m[k, idx] = self.entries[idx][k]
            return m
        m = np.zeros((self.dim_w, p), dtype=complex)
        for k in range(self.dim_w):
            for idx in range(p):
                m[k, idx] = complex(self.entries[idx][k])
        return m

    def value(self, i: int, j: int):
        """Image of e_i wedge e_j in W, extended by antisymmetry."""
        if i == j:
            return tuple([0] * self.dim_w)
        if i < j:
            return self.entries[pair_index(i, j, self.dim_v)]
        return tuple(-x for x in self.entries[pair_index(j, i, self.dim_v)])


@dataclass(frozen=True)
class KernelSubspace:
    """A subspace of the bivector space, given by linearly independent basis bivectors."""

    dim_v: int
    basis: tuple

    def __post_init__(self):
        for b in self.basis:
            if b.dim_v != self.dim_v:
                raise ValueError("basis bivector dimension mismatch")

    @property
    def dim(self) -> int:
        return len(self.basis)


def apply(p: SkewPairing, omega: Bivector) -> np.ndarray:
    """Evaluate the pairing on a bivector; linear in the bivector."""
    if p.dim_v != omega.dim_v:
        raise ValueError("dimension mismatch")
    out = [0] * p.dim_w
    for row, c in zip(p.entries, omega.coeffs):
        if c != 0:
            for k in range(p.dim_w):
                out[k] = out[k] + c * row[k]
    if all(is_rational_scalar(x) for x in out):
        arr = np.empty(p.dim_w, dtype=object)
        arr[:] = out
        return arr
    return np.array(out, dtype=complex)


def kernel(p: SkewPairing, mode: ScalarMode) -> KernelSubspace:
    """Basis of the kernel of the pairing, as bivectors."""
    if mode.is_exact and not p.is_rational():
        raise ValueError("rational mode requires rational pairing entries")
    m = p.matrix()
    if not mode.is_exact and m.dtype == object:
        m = to_float(m)
    basis = nullspace(m, mode)
    return KernelSubspace(p.dim_v, tuple(Bivector(p.dim_v, tuple(v)) for v in basis))


def bivector_rank(omega: Bivector, mode: ScalarMode) -> int:
    """Rank of the associated skew matrix; always even."""
    m = omega.skew_matrix()
    if not mode.is_exact and m.dtype == object:
        m = np.array([[complex(x) for x in row] for row in m], dtype=complex)
    r = rank(m, mode)
    if r % 2:
        # singular values of a skew matrix pair up; an odd count means the
        # threshold fell inside a pair
        r -= 1
    return r


def quad_list(d: int) -> list[tuple[int, int, int, int]]:
    return list(combinations(range(d), 4))


def plucker_square(omega: Bivector) -> tuple:
    """Coefficients of omega wedge omega on the basis of 4-fold wedges.

    Zero exactly when the rank of omega is at most 2.  For d < 4 the target
    space is zero-dimensional and the empty tuple is returned.
    """
    w = omega.coefficient
    return tuple(
        2 * (w(a, b) * w(c, e) - w(a, c) * w(b, e) + w(a, e) * w(b, c))
        for a, b, c, e in quad_list(omega.dim_v)
    )


def dimension_criterion(k: KernelSubspace) -> bool:
    """Sufficient condition for a nonzero decomposable element in the subspace.

    True when dim K >= C(d - 2, 2) + 1, which forces the projectivised
    subspace to meet the rank-2 locus; false is inconclusive.
    """
    return k.dim >= math.comb(k.dim_v - 2, 2) + 1


@dataclass(frozen=True)
class DecomposableDecision:
    kind: str  # yes / no / not_applicable
    witness: Bivector | None = None


def _pfaffian4(omega: Bivector):
    w = omega.coeffs
    return w[0] * w[5] - w[1] * w[4] + w[2] * w[3]


def _fraction_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def decomposable_exists_exact(k: KernelSubspace, mode: ScalarMode = ScalarMode.exact()
                              ) -> DecomposableDecision:
    """Exact decomposability decision for ambient dimension at most 4.

    For d <= 3 every nonzero bivector has rank 2, so the answer only depends
    on the subspace being nonzero.  For d = 4 the rank-2 locus is the single
    Pfaffian quadric: a one-dimensional subspace is tested directly, and any
    subspace of dimension >= 2 meets the quadric because a complex binary
    quadratic form always has a nontrivial zero.  Witnesses are produced over
    the complex numbers; when the discriminant is not a rational square the
    witness coefficients are floating point even for rational input.
    """
    d = k.dim_v
    if d >= 5:
        return DecomposableDecision(NOT_APPLICABLE)
    if k.dim == 0:
        return DecomposableDecision(NO)
    if d <= 3:
        return DecomposableDecision(YES, k.basis[0])
    if k.dim == 1:
        gen = k.basis[0]
        if bivector_rank(gen, mode) == 2:
            return DecomposableDecision(YES, gen)
        return DecomposableDecision(NO)
    k1, k2 = k.basis[0], k.basis[1]
    a = _pfaffian4(k1)
    c = _pfaffian4(k2)
    b = _pfaffian4(k1 + k2) - a - c
    scale = 1
    if not mode.is_exact:
        scale = max(abs(complex(x)) for x in (*k1.coeffs, *k2.coeffs)) ** 2 or 1.0
    tol = 0 if mode.is_exact else mode.tol_rank * scale

    def small(x):
        return x == 0 if mode.is_exact else abs(complex(x)) <= tol

    if small(a) and small(b) and small(c):
        # the quadric vanishes on the whole plane: every element works
        return DecomposableDecision(YES, k1)
    if small(a):
        return DecomposableDecision(YES, k1)
    if small(c):
        return DecomposableDecision(YES, k2)
    # solve a x^2 + b x + c = 0 for the witness x*k1 + k2
    disc = b * b - 4 * a * c
    if mode.is_exact and isinstance(disc, Fraction | int):
        root = _fraction_sqrt(Fraction(disc))
        if root is not None:
            x = (-b + root) / (2 * a)
            return DecomposableDecision(YES, x * k1 + k2)
    x = (-complex(b) + cmath.sqrt(complex(disc))) / (2 * complex(a))
    witness = Bivector(d, tuple(x * complex(u) + complex(v)
                                for u, v in zip(k1.coeffs, k2.coeffs)))
    return DecomposableDecision(YES, witness)


# ---------------------------------------------------------------------------
# filtered pairings


@dataclass(frozen=True)
class FilteredPairing:
    """A skew pairing compatible with basis-adapted decreasing filtrations.

    Levels are nonnegative integers per basis vector; compatibility means the
    coefficient on (i, j, k) vanishes whenever the W-level of k is below the
    sum of the V-levels of i and j.
    """

    pairing: SkewPairing
    filt_v: tuple
    filt_w: tuple

    def __post_init__(self):
        p = self.pairing
        if len(self.filt_v) != p.dim_v or len(self.filt_w) != p.dim_w:
            raise ValueError("filtration level count does not match dimensions")
        if any(not isinstance(x, int) or x < 0 for x in (*self.filt_v, *self.filt_w)):
            raise ValueError("filtration levels must be nonnegative integers")
        for (i, j), row in zip(pair_list(p.dim_v), p.entries):
            lvl = self.filt_v[i] + self.filt_v[j]
            for kk, x in enumerate(row):
                if self.filt_w[kk] < lvl and x != 0:
                    raise ValueError(
                        f"filtration invariant violated at ({i},{j},{kk}): "
                        f"W-level {self.filt_w[kk]} < {lvl}")

    def pair_level(self, i: int, j: int) -> int:
        return self.filt_v[i] + self.filt_v[j]


def associated_graded(fp: FilteredPairing) -> SkewPairing:
    """Keep only the level-preserving coefficients of the pairing."""
    p = fp.pairing
    rows = []
    for (i, j), row in zip(pair_list(p.dim_v), p.entries):
        lvl = fp.pair_level(i, j)
        rows.append(tuple(x if fp.filt_w[kk] == lvl else x * 0 for kk, x in enumerate(row)))
    return SkewPairing(p.dim_v, p.dim_w, tuple(rows))


def leading_term(fp: FilteredPairing, omega: Bivector) -> Bivector:
    """Component of a nonzero bivector in the deepest filtration step it lies in.

    With the decreasing convention used here, a bivector lies in the step
    indexed by the minimum total level over its nonzero coefficients; the
    returned component is its image in the associated graded at that level.
    If the bivector is in the kernel of the pairing, this component is in the
    kernel of the associated graded pairing.
    """
    if omega.dim_v != fp.pairing.dim_v:
        raise ValueError("dimension mismatch")
    if omega.is_zero():
        raise ValueError("leading term of the zero bivector is undefined")
    levels = [fp.pair_level(i, j) for i, j in pair_list(omega.dim_v)]
    lead = min(lvl for lvl, c in zip(levels, omega.coeffs) if c != 0)
    return Bivector(omega.dim_v,
                    tuple(c if lvl == lead else c * 0 for lvl, c in zip(levels, omega.coeffs)))
