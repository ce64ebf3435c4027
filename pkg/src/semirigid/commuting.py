"""Matrix-tuple layer: commutator maps, spectra, and representation analysis.

A tuple of d square matrices encodes an element of V tensor gl_n.  This
module provides the commutator map and its pairing-contracted quadratic
companion, trace contraction into bivectors, simultaneous triangularization
of commuting tuples with joint spectra, trace-monomial invariants, regular
sl2 triples, and representation-theoretic analysis (commutant, generated
algebra, radical, irreducibility, stability).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exterior import Bivector, SkewPairing, pair_list
from .scalars import (
    IrrationalSpectrumError,
    PreconditionError,
    ScalarMode,
    eigenvalues,
    identity,
    is_exact_array,
    nullspace,
    rank,
    to_float,
    zeros,
)


class NotCommutingError(PreconditionError):
    """An operation requiring a pairwise-commuting tuple received one that is not."""


def _as_matrix(m) -> np.ndarray:
    a = m if isinstance(m, np.ndarray) else np.array(m, dtype=object)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrices must be square")
    return a


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """d square matrices of size n; treat as immutable after construction."""

    n: int
    d: int
    matrices: tuple

    def __post_init__(self):
        if self.d != len(self.matrices):
            raise ValueError("tuple length does not match d")
        for m in self.matrices:
            if m.shape != (self.n, self.n):
                raise ValueError("all matrices must be n x n")

    @classmethod
    def from_matrices(cls, mats) -> "MatrixTuple":
        mats = tuple(_as_matrix(m) for m in mats)
        if not mats:
            raise ValueError("need at least one matrix")
        return cls(mats[0].shape[0], len(mats), mats)

    def is_rational(self) -> bool:
        return all(is_exact_array(m) for m in self.matrices)

    def to_float(self) -> "MatrixTuple":
        return MatrixTuple(self.n, self.d, tuple(to_float(m) for m in self.matrices))

    def scaled(self, factor) -> "MatrixTuple":
        return MatrixTuple(self.n, self.d, tuple(factor * m for m in self.matrices))


def frobenius(m: np.ndarray) -> float:
    if m.dtype == object:
        m = to_float(m)
    return float(np.linalg.norm(m))


def tuple_scale(alpha: MatrixTuple) -> float:
    return max((frobenius(m) for m in alpha.matrices), default=0.0)


def chi(alpha: MatrixTuple) -> tuple:
    """Pairwise commutators, one matrix per basis bivector (i < j)."""
    mats = alpha.matrices
    return tuple(mats[i] @ mats[j] - mats[j] @ mats[i] for i, j in pair_list(alpha.d))


def chi_norm(alpha: MatrixTuple) -> float:
    return max((frobenius(c) for c in chi(alpha)), default=0.0)


def is_commuting(alpha: MatrixTuple, mode: ScalarMode) -> bool:
    if mode.is_exact:
        return all(np.all(c == 0) for c in chi(alpha))
    return chi_norm(alpha) <= mode.tol_residual * tuple_scale(alpha) ** 2


def _require_commuting(alpha: MatrixTuple, mode: ScalarMode):
    if not is_commuting(alpha, mode):
        raise NotCommutingError("tuple is not pairwise commuting within tolerance")


def mu(alpha: MatrixTuple, p: SkewPairing) -> tuple:
    """Pairing-contracted commutators: one matrix per basis vector of W."""
    if alpha.d != p.dim_v:
        raise ValueError("tuple length does not match pairing dimension")
    exact = alpha.is_rational() and p.is_rational()
    if not exact and alpha.is_rational():
        alpha = alpha.to_float()
    mats = alpha.matrices
    mode = ScalarMode.exact() if exact else ScalarMode.floating()
    out = [zeros((alpha.n, alpha.n), mode) for _ in range(p.dim_w)]
    for (i, j), row in zip(pair_list(alpha.d), p.entries):
        comm = None
        for k, c in enumerate(row):
            if c != 0:
                if comm is None:
                    comm = mats[i] @ mats[j] - mats[j] @ mats[i]
                out[k] = out[k] + (c if exact else complex(c)) * comm
    return tuple(out)


def mu_norm(alpha: MatrixTuple, p: SkewPairing) -> float:
    return max((frobenius(m) for m in mu(alpha, p)), default=0.0)


def trace(m: np.ndarray):
    return sum(m[i, i] for i in range(m.shape[0]))


def trace_contraction(alpha: MatrixTuple, h: np.ndarray) -> Bivector:
    """Bivector of traces of the commutators against a fixed matrix."""
    h = _as_matrix(h)
    if h.shape != (alpha.n, alpha.n):
        raise ValueError("contraction matrix must be n x n")
    if alpha.is_rational() != is_exact_array(h):
        alpha = alpha.to_float()
        h = to_float(h)
    mats = alpha.matrices
    coeffs = []
    for i, j in pair_list(alpha.d):
        comm = mats[i] @ mats[j] - mats[j] @ mats[i]
        coeffs.append(trace(comm @ h))
    return Bivector(alpha.d, tuple(coeffs))


# ---------------------------------------------------------------------------
# simultaneous triangularization and joint spectra

_RANDOM_COMBINATION_RETRIES = 8


def _check_regime(alpha: MatrixTuple, mode: ScalarMode) -> MatrixTuple:
    if mode.is_exact:
        if not alpha.is_rational():
            raise ValueError("rational mode requires rational matrix entries")
        return alpha
    return alpha.to_float() if alpha.is_rational() else alpha


def _inverse_exact(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    aug = [[Fraction(a[i, j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [x * inv for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        row += 1
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        out[i, :] = aug[i][n:]
    return out


def _inverse(q: np.ndarray, mode: ScalarMode) -> np.ndarray:
    if mode.is_exact:
        return _inverse_exact(q)
    return np.linalg.inv(q)


def _group_eigenvalues(vals, mode: ScalarMode):
    """Cluster eigenvalues; returns a list of (value, count) groups."""
    if mode.is_exact:
        groups = {}
        for v in vals:
            groups[v] = groups.get(v, 0) + 1
        return sorted(groups.items())
    arr = np.asarray(vals, dtype=complex)
    thr = mode.tol_rank * max(1.0, float(np.max(np.abs(arr))))
    parent = list(range(len(arr)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            if abs(arr[i] - arr[j]) <= thr:
                parent[find(i)] = find(j)
    members = {}
    for i in range(len(arr)):
        members.setdefault(find(i), []).append(arr[i])
    groups = [(np.mean(vs), len(vs)) for vs in members.values()]
    return sorted(groups, key=lambda g: (g[0].real, g[0].imag))


def _restriction(a: np.ndarray, s: np.ndarray, mode: ScalarMode) -> np.ndarray:
    """Matrix of a on the invariant subspace spanned by the columns of s."""
    if mode.is_exact:
        g = _inverse_exact(s.T @ s)
        return g @ (s.T @ (a @ s))
    m, *_ = np.linalg.lstsq(s, a @ s, rcond=None)
    return m


def _common_eigenvector(mats, mode: ScalarMode) -> np.ndarray:
    n = mats[0].shape[0]
    s = identity(n, mode)
    for a in mats:
        if s.shape[1] == 1:
            break
        m = _restriction(a, s, mode)
        vals = eigenvalues(m, mode)
        if mode.is_exact:
            lam = min(vals)
        else:
            lam = sorted(vals, key=lambda z: (z.real, z.imag))[0]
        shifted = m - lam * identity(m.shape[0], mode)
        basis = nullspace(shifted, mode)
        if not basis:
            # defective eigenvalue at the rank tolerance: fall back to the
            # numerically best eigenvector
            w, vecs = np.linalg.eig(np.asarray(m, dtype=complex))
            idx = int(np.argmin(np.abs(w - lam)))
            basis = [vecs[:, idx]]
        cols = np.column_stack(basis)
        s = s @ cols
        if not mode.is_exact:
            s, _ = np.linalg.qr(s)
    v = s[:, 0]
    if not mode.is_exact:
        v = v / np.linalg.norm(v)
    return v


def _complete_basis(v: np.ndarray, mode: ScalarMode) -> np.ndarray:
    """Invertible matrix with first column spanning v (unitary in float mode)."""
    n = v.shape[0]
    if mode.is_exact:
        pivot = next(i for i in range(n) if v[i] != 0)
    else:
        pivot = int(np.argmax(np.abs(np.asarray(v, dtype=complex))))
    m = zeros((n, n), mode)
    m[:, 0] = v
    one = Fraction(1) if mode.is_exact else 1.0 + 0j
    j = 1
    for k in range(n):
        if k != pivot:
            m[k, j] = one
            j += 1
    if mode.is_exact:
        return m
    q, _ = np.linalg.qr(m)
    return q


def _block_diag(top: np.ndarray, bottom: np.ndarray, mode: ScalarMode) -> np.ndarray:
    k, m = top.shape[0], bottom.shape[0]
    out = zeros((k + m, k + m), mode)
    out[:k, :k] = top
    out[k:, k:] = bottom
    return out


def _triangularize(mats, mode: ScalarMode, rng) -> np.ndarray:
    n = mats[0].shape[0]
    if n <= 1:
        return identity(n, mode)
    saw_irrational = False
    for _ in range(_RANDOM_COMBINATION_RETRIES):
        if mode.is_exact:
            coeffs = [Fraction(int(c)) for c in rng.integers(-99, 100, size=len(mats))]
        else:
            coeffs = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
        b = sum(c * m for c, m in zip(coeffs, mats))
        try:
            vals = eigenvalues(b, mode)
        except IrrationalSpectrumError:
            saw_irrational = True
            continue
        groups = _group_eigenvalues(vals, mode)
        if len(groups) < 2:
            continue
        bases = []
        ok = True
        for lam, count in groups:
            shifted = b - lam * identity(n, mode)
            power = shifted
            for _ in range(count - 1):
                power = power @ shifted
            basis = nullspace(power, mode)
            if len(basis) != count:
                ok = False
                break
            bases.append(np.column_stack(basis))
        if not ok:
            continue
        s = np.column_stack(bases)
        if mode.is_exact:
            if rank(s, mode) != n:
                continue
            q0 = s
        else:
            q0, _ = np.linalg.qr(s)
        q0_inv = _inverse(q0, mode)
        transformed = [q0_inv @ a @ q0 for a in mats]
        sizes = [count for _, count in groups]
        offs = np.cumsum([0] + sizes)
        blocks_q = []
        for g in range(len(sizes)):
            lo, hi = offs[g], offs[g + 1]
            sub = [t[lo:hi, lo:hi] for t in transformed]
            blocks_q.append(_triangularize(sub, mode, rng))
        qb = blocks_q[0]
        for extra in blocks_q[1:]:
            qb = _block_diag(qb, extra, mode)
        return q0 @ qb
    if mode.is_exact and saw_irrational:
        raise IrrationalSpectrumError(
            "random combinations have irrational spectra; tuple is not "
            "triangularizable over the rationals")
    # structurally repeated spectrum: deflate by a common eigenvector
    v = _common_eigenvector(mats, mode)
    q0 = _complete_basis(v, mode)
    q0_inv = _inverse(q0, mode)
    transformed = [q0_inv @ a @ q0 for a in mats]
    sub = [t[1:, 1:] for t in transformed]
    q1 = _triangularize(sub, mode, rng)
    one = identity(1, mode)
    return q0 @ _block_diag(one, q1, mode)


def simultaneous_triangularize(alpha: MatrixTuple, mode: ScalarMode, seed: int = 0):
    """Common triangularizing basis change for a commuting tuple.

    Returns (q, transformed) with every transformed matrix upper triangular
    (within tolerance in float mode); q is unitary in float mode.  Uses a
    seeded random linear combination to split the space along eigenvalue
    groups, retrying on accidental collisions, and deflates by a common
    eigenvector when the repetition is structural.
    """
    alpha = _check_regime(alpha, mode)
    _require_commuting(alpha, mode)
    rng = np.random.default_rng(seed)
    q = _triangularize(list(alpha.matrices), mode, rng)
    q_inv = _inverse(q, mode)
    transformed = MatrixTuple(alpha.n, alpha.d,
                              tuple(q_inv @ a @ q for a in alpha.matrices))
    return q, transformed


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    """Multiset of n joint eigenvalue vectors in C^d."""

    points: tuple

    @property
    def n(self) -> int:
        return len(self.points)

    def is_rational(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for p in self.points for x in p)

    def multiset_equal(self, other: "JointSpectrum", mode: ScalarMode) -> bool:
        if self.n != other.n:
            return False
        if mode.is_exact and self.is_rational() and other.is_rational():
            return sorted(self.points) == sorted(other.points)
        a = np.array([[complex(x) for x in p] for p in self.points])
        b = np.array([[complex(x) for x in p] for p in other.points])
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        cost = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
        rows, cols = linear_sum_assignment(cost)
        return bool(np.max(cost[rows, cols]) <= 10 * mode.tol_residual * scale)


def joint_spectrum(alpha: MatrixTuple, mode: ScalarMode) -> JointSpectrum:
    """Diagonal of a simultaneous triangularization, as a multiset of d-vectors."""
    _, tri = simultaneous_triangularize(alpha, mode, seed=0)
    points = tuple(
        tuple(tri.matrices[i][j, j] for i in range(alpha.d)) for j in range(alpha.n))
    return JointSpectrum(points)


def _min_rotation(word: tuple) -> tuple:
    return min(tuple(word[k:] + word[:k]) for k in range(len(word)))


def trace_monomials(alpha: MatrixTuple, max_degree: int) -> dict:
    """Traces of products over words (1-based indices) up to cyclic rotation."""
    out = {}
    for degree in range(1, max_degree + 1):
        for word in product(range(1, alpha.d + 1), repeat=degree):
            if word != _min_rotation(word):
                continue
            m = alpha.matrices[word[0] - 1]
            for idx in word[1:]:
                m = m @ alpha.matrices[idx - 1]
            out[word] = trace(m)
    return out


def chevalley_separates(alpha: MatrixTuple, beta: MatrixTuple, mode: ScalarMode) -> bool:
    """Whether two commuting tuples have equal joint spectra as multisets.

    Equality of the spectra is equivalent to agreement of all conjugation
    invariants (trace monomials of degree up to n suffice), so this decides
    whether the tuples map to the same point of the quotient.
    """
    if (alpha.n, alpha.d) != (beta.n, beta.d):
        raise ValueError("tuples must share matrix size and length")
    return joint_spectrum(alpha, mode).multiset_equal(joint_spectrum(beta, mode), mode)


# ---------------------------------------------------------------------------
# sl2 triples


@dataclass(frozen=True, eq=False)
class Sl2Triple:
    x: np.ndarray
    y: np.ndarray
    h: np.ndarray

    def relation_residual(self) -> float:
        xy = self.x @ self.y - self.y @ self.x - self.h
        hx = self.h @ self.x - self.x @ self.h - 2 * self.x
        hy = self.h @ self.y - self.y @ self.h + 2 * self.y
        return max(frobenius(xy), frobenius(hx), frobenius(hy))


def regular_sl2_triple(n: int) -> Sl2Triple:
    """The sl2 triple through the regular nilpotent single Jordan block.

    x has superdiagonal ones, h = diag(n-1, n-3, ..., 1-n), and the
    subdiagonal of y is k(n-k); the triple relations hold exactly and the
    action on C^n is irreducible.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    mode = ScalarMode.exact()
    x = zeros((n, n), mode)
    y = zeros((n, n), mode)
    h = zeros((n, n), mode)
    for k in range(n - 1):
        x[k, k + 1] = Fraction(1)
        y[k + 1, k] = Fraction((k + 1) * (n - k - 1))
    for k in range(n):
        h[k, k] = Fraction(n - 1 - 2 * k)
    return Sl2Triple(x, y, h)


# ---------------------------------------------------------------------------
# representation analysis


@dataclass(frozen=True)
class RepAnalysis:
    commutant_dim: int
    algebra_dim: int
    radical_dim: int
    irreducible: bool
    semisimple: bool
    stable: bool


class _SpanBuilder:
    """Incremental span of vectors, exact echelon or float orthonormal."""

    def __init__(self, mode: ScalarMode):
        self.mode = mode
        self.rows = []
        self.pivots = []

    def add(self, v: np.ndarray) -> bool:
        if self.mode.is_exact:
            w = [Fraction(x) for x in v]
            for row, piv in zip(self.rows, self.pivots):
                if w[piv] != 0:
                    f = w[piv]
                    w = [a - f * b for a, b in zip(w, row)]
            piv = next((i for i, x in enumerate(w) if x != 0), None)
            if piv is None:
                return False
            inv = 1 / w[piv]
            self.rows.append([x * inv for x in w])
            self.pivots.append(piv)
            return True
        w = np.asarray(v, dtype=complex)
        orig = np.linalg.norm(w)
        if orig == 0:
            return False
        for row in self.rows:
            w = w - np.vdot(row, w) * row
        # re-orthogonalize once for stability
        for row in self.rows:
            w = w - np.vdot(row, w) * row
        norm = np.linalg.norm(w)
        if norm <= self.mode.tol_rank * orig:
            return False
        self.rows.append(w / norm)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)


def rep_analysis(alpha: MatrixTuple, mode: ScalarMode) -> RepAnalysis:
    """Commutant, generated algebra, radical, and the derived stability flags.

    The commutant is the nullspace of the stacked Sylvester operators; the
    algebra is the multiplicative closure of identity and generators, capped
    at n^2; the radical is the kernel of the trace form on the algebra
    (characteristic zero).  Irreducibility is algebra_dim == n^2 and
    stability (closed orbit with scalar stabilizer) coincides with it.
    """
    alpha = _check_regime(alpha, mode)
    n = alpha.n
    eye = identity(n, mode)

    blocks = [np.kron(a, eye) - np.kron(eye, a.T) for a in alpha.matrices]
    stacked = np.concatenate(blocks, axis=0)
    commutant_dim = n * n - rank(stacked, mode)

    span = _SpanBuilder(mode)
    basis_mats = []
    for m in (eye, *alpha.matrices):
        if span.add(m.reshape(-1)):
            basis_mats.append(m)
    frontier = list(basis_mats)
    while frontier and span.dim < n * n:
        new_frontier = []
        for b in frontier:
            for g in alpha.matrices:
                cand = b @ g
                if span.add(cand.reshape(-1)):
                    basis_mats.append(cand)
                    new_frontier.append(cand)
                    if span.dim == n * n:
                        break
            if span.dim == n * n:
                break
        frontier = new_frontier
    algebra_dim = span.dim

    gram = zeros((algebra_dim, algebra_dim), mode)
    for i, bi in enumerate(basis_mats):
        for j in range(i, algebra_dim):
            val = trace(bi @ basis_mats[j])
            gram[i, j] = val
            gram[j, i] = val
    radical_dim = algebra_dim - rank(gram, mode)

    irreducible = algebra_dim == n * n
    semisimple = radical_dim == 0
    return RepAnalysis(
        commutant_dim=commutant_dim,
        algebra_dim=algebra_dim,
        radical_dim=radical_dim,
        irreducible=irreducible,
        semisimple=semisimple,
        stable=irreducible,
    )


def regular_locus_test(alpha: MatrixTuple, mode: ScalarMode) -> bool:
    """Whether the commuting tuple has n pairwise distinct joint eigenvalue vectors.

    For a commuting tuple, distinctness forces the joint generalized
    eigenspaces to be lines, so it already implies simultaneous
    diagonalizability.
    """
    spectrum = joint_spectrum(alpha, mode)
    pts = spectrum.points
    if mode.is_exact:
        return len(set(pts)) == len(pts)
    arr = np.array([[complex(x) for x in p] for p in pts])
    scale = max(1.0, float(np.max(np.abs(arr))) if arr.size else 1.0)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.linalg.norm(arr[i] - arr[j]) <= mode.tol_rank * scale:
                return False
    return True
