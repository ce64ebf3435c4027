"""Semi-rigidity verdict engine.

Decides whether the kernel of a skew pairing contains a nonzero decomposable
bivector.  A zero kernel or the exact low-dimensional decision yields a
certified answer; otherwise a sufficient dimension bound certifies existence,
and a seeded numerical search over the kernel hunts for an explicit rank-2
witness.  The engine also converts witnesses to matrix tuples built on a
regular sl2 triple (giving stable points of the quadratic cone at every
matrix size), back again via trace contractions, and samples the cone by
Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .commuting import (
    MatrixTuple,
    chi,
    chi_norm,
    frobenius,
    mu,
    regular_sl2_triple,
    trace_contraction,
    tuple_scale,
)
from .exterior import (
    NO,
    YES,
    Bivector,
    KernelSubspace,
    SkewPairing,
    apply,
    bivector_rank,
    decomposable_exists_exact,
    dimension_criterion,
    kernel,
    pair_index,
    pair_list,
    quad_list,
)
from .scalars import PreconditionError, ScalarMode, to_float, zeros

SEMI_RIGID = "semi_rigid"
NOT_SEMI_RIGID = "not_semi_rigid"
UNKNOWN = "unknown"

CERT_KERNEL_ZERO = "kernel_zero"
CERT_EXACT_LOW_DIM = "exact_low_dim"
CERT_DIMENSION_CRITERION = "dimension_criterion"
CERT_SEARCH_WITNESS = "search_witness"
CERT_SEARCH_EXHAUSTED = "search_exhausted"


class MuNonzeroError(PreconditionError):
    """An operation requiring a mu-zero tuple received one with nonzero residual."""


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    max_iterations: int = 200
    seed: int = 0
    tol_plucker: float = 1e-18
    tol_rank: float = 1e-8

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise ValueError("restarts and max_iterations must be positive")
        if not (self.tol_plucker > 0 and self.tol_rank > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class Evidence:
    kernel_dim: int
    restarts_used: int = 0
    best_residual: float | None = None


@dataclass(frozen=True)
class Verdict:
    status: str
    certificate: str
    witness: Bivector | None
    evidence: Evidence


@dataclass(frozen=True)
class SearchResult:
    witness: Bivector | None
    best_residual: float
    restarts_used: int


def _default_mode(p: SkewPairing, mode: ScalarMode | None) -> ScalarMode:
    if mode is not None:
        return mode
    return ScalarMode.exact() if p.is_rational() else ScalarMode.floating()


def _float_coeffs(omega: Bivector) -> np.ndarray:
    return np.array([complex(c) for c in omega.coeffs])


def _witness_residual(p: SkewPairing, omega: Bivector) -> float:
    """Relative residual of the pairing applied to a bivector."""
    m = p.matrix()
    mf = m if m.dtype != object else to_float(m)
    w = _float_coeffs(omega)
    scale = np.linalg.norm(mf) * np.linalg.norm(w)
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(mf @ w) / scale)


def _verify_witness(p: SkewPairing, omega: Bivector, mode: ScalarMode, cfg: SearchConfig):
    """Independent re-check of an emitted witness; raises on failure."""
    if omega.is_rational() and mode.is_exact:
        if not all(x == 0 for x in apply(p, omega)):
            raise RuntimeError("witness is not in the kernel")
        if bivector_rank(omega, mode) != 2:
            raise RuntimeError("witness does not have rank 2")
        return
    check_mode = ScalarMode.floating(tol_rank=cfg.tol_rank)
    if _witness_residual(p, omega) > check_mode.tol_residual:
        raise RuntimeError("witness is not in the kernel within tolerance")
    if bivector_rank(omega, check_mode) != 2:
        raise RuntimeError("witness does not have rank 2 within tolerance")


# ---------------------------------------------------------------------------
# witness search on the Plucker quadrics


def _plucker_bilinear_tensor(basis: np.ndarray, d: int) -> np.ndarray:
    """T[q, a, b]: coefficient on the q-th 4-wedge of basis_a wedge basis_b,
    symmetrized; the search residual is R(x) = sum_ab x_a x_b T[:, a, b]."""
    quads = quad_list(d)
    idx = np.array(
        [[pair_index(a, b, d), pair_index(c, e, d),
          pair_index(a, c, d), pair_index(b, e, d),
          pair_index(a, e, d), pair_index(b, c, d)]
         for a, b, c, e in quads], dtype=int)
    b1, b2, b3, b4, b5, b6 = (basis[idx[:, k], :] for k in range(6))
    half = (np.einsum('qa,qb->qab', b1, b2)
            - np.einsum('qa,qb->qab', b3, b4)
            + np.einsum('qa,qb->qab', b5, b6))
    return half + half.transpose(0, 2, 1)


def witness_search(k: KernelSubspace, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Seeded random-restart Gauss-Newton search for a rank-2 element.

    Minimizes the squared norm of the wedge square over unit coefficient
    vectors in the given subspace; accepts when the normalized residual drops
    below tol_plucker and the singular values confirm rank exactly 2.  The
    per-restart seed is derived from (seed, restart index), so results do not
    depend on scheduling.
    """
    if k.dim == 0:
        return SearchResult(None, float("inf"), 0)
    d = k.dim_v
    raw = np.column_stack([_float_coeffs(b) for b in k.basis])
    basis, _ = np.linalg.qr(raw)
    m = basis.shape[1]
    tensor = _plucker_bilinear_tensor(basis, d)
    best = float("inf")

    def residual(x):
        return np.einsum('qab,a,b->q', tensor, x, x)

    for r in range(cfg.restarts):
        rng = np.random.default_rng((cfg.seed, r))
        x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        x /= np.linalg.norm(x)
        for _ in range(cfg.max_iterations):
            res = residual(x)
            f = float(np.linalg.norm(res) ** 2)
            best = min(best, f)
            if f <= cfg.tol_plucker:
                omega = Bivector(d, tuple(basis @ x))
                s = np.linalg.svd(omega.skew_matrix(), compute_uv=False)
                if s[0] > 0 and int(np.sum(s > cfg.tol_rank * s[0])) == 2:
                    return SearchResult(omega, f, r + 1)
                break
            # restrict the step to the tangent space of the unit sphere: the
            # residual is homogeneous quadratic, so the unrestricted step is
            # purely radial (Euler) and the renormalization would undo it
            jac = 2 * np.einsum('qab,b->qa', tensor, x)
            jac = jac - np.outer(jac @ x, np.conj(x))
            step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
            if not np.all(np.isfinite(step)):
                break
            step = step - np.vdot(x, step) * x
            x = x + step
            norm = np.linalg.norm(x)
            if norm == 0:
                break
            x /= norm
    return SearchResult(None, best, cfg.restarts)


# ---------------------------------------------------------------------------
# decision pipeline


def decide(p: SkewPairing, mode: ScalarMode | None = None,
           cfg: SearchConfig = SearchConfig()) -> Verdict:
    """Three-valued semi-rigidity verdict with a mandatory certificate.

    Pipeline: zero kernel is certified immediately; ambient dimension at most
    4 is decided exactly; when the dimension bound certifies existence the
    status is decided even if the search fails to produce the witness; an
    exhausted search alone yields Unknown, never a semi-rigid claim.
    """
    mode = _default_mode(p, mode)
    k = kernel(p, mode)
    kd = k.dim
    if kd == 0:
        return Verdict(SEMI_RIGID, CERT_KERNEL_ZERO, None, Evidence(kernel_dim=0))
    if p.dim_v <= 4:
        dec = decomposable_exists_exact(k, mode)
        if dec.kind == YES:
            _verify_witness(p, dec.witness, mode, cfg)
            return Verdict(NOT_SEMI_RIGID, CERT_EXACT_LOW_DIM, dec.witness,
                           Evidence(kernel_dim=kd))
        assert dec.kind == NO
        return Verdict(SEMI_RIGID, CERT_EXACT_LOW_DIM, None, Evidence(kernel_dim=kd))
    result = witness_search(k, cfg)
    if result.witness is not None:
        _verify_witness(p, result.witness, mode, cfg)
    evidence = Evidence(kernel_dim=kd, restarts_used=result.restarts_used,
                        best_residual=result.best_residual)
    if dimension_criterion(k):
        return Verdict(NOT_SEMI_RIGID, CERT_DIMENSION_CRITERION, result.witness, evidence)
    if result.witness is not None:
        return Verdict(NOT_SEMI_RIGID, CERT_SEARCH_WITNESS, result.witness, evidence)
    return Verdict(UNKNOWN, CERT_SEARCH_EXHAUSTED, None, evidence)


# ---------------------------------------------------------------------------
# witness <-> tuple constructions


def _rank2_factor_exact(omega: Bivector):
    m = omega.skew_matrix()
    d = omega.dim_v
    j1 = next(j for j in range(d) if any(m[i, j] != 0 for i in range(d)))
    # skewness puts every nonzero entry of the first nonzero column below j1
    j2 = next(j for j in range(j1 + 1, d) if m[j1, j] != 0)
    c1 = m[:, j1].copy()
    c2 = m[:, j2].copy()
    a = m[j1, j2]
    # restrict to rows (j1, j2): the 2x2 block [[0, a], [-a, 0]] is invertible,
    # and the skew rank-2 matrix factors through its first two pivot columns
    crr = np.empty((2, 2), dtype=object)
    crr[0, 0], crr[0, 1] = c1[j1], c2[j1]
    crr[1, 0], crr[1, 1] = c1[j2], c2[j2]
    det = crr[0, 0] * crr[1, 1] - crr[0, 1] * crr[1, 0]
    inv = np.empty((2, 2), dtype=object)
    inv[0, 0], inv[0, 1] = crr[1, 1] / det, -crr[0, 1] / det
    inv[1, 0], inv[1, 1] = -crr[1, 0] / det, crr[0, 0] / det
    omega_rr = np.empty((2, 2), dtype=object)
    omega_rr[0, 0], omega_rr[0, 1] = Fraction(0), a
    omega_rr[1, 0], omega_rr[1, 1] = -a, Fraction(0)
    mm = inv @ omega_rr @ inv.T
    u = mm[0, 1] * c1
    v = c2
    check = np.outer(u, v) - np.outer(v, u)
    if not np.all(check == m):
        raise RuntimeError("exact rank-2 factorization failed to reconstruct the bivector")
    return u, v


def _rank2_factor_float(omega: Bivector, tol: float):
    m = to_float(omega.skew_matrix())
    uu, s, _ = np.linalg.svd(m)
    c = uu[:, :2]
    mm = c.conj().T @ m @ c.conj()
    mm = (mm - mm.T) / 2
    scale = math.sqrt(abs(mm[0, 1])) or 1.0
    u = (mm[0, 1] / scale) * c[:, 0]
    v = scale * c[:, 1]
    check = np.outer(u, v) - np.outer(v, u)
    if np.linalg.norm(check - m) > tol * max(1.0, np.linalg.norm(m)):
        raise RuntimeError("rank-2 factorization failed to reconstruct the bivector")
    return u, v


def witness_to_tuple(omega: Bivector, n: int, mode: ScalarMode | None = None) -> MatrixTuple:
    """Matrix tuple u (x) X + v (x) Y from a rank-2 bivector u wedge v.

    X, Y belong to the regular sl2 triple of size n, so the associated
    representation is irreducible; if the bivector is in the kernel of a
    pairing, the contracted quadratic map vanishes on the tuple while the
    commutator map does not.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if mode is None:
        mode = ScalarMode.exact() if omega.is_rational() else ScalarMode.floating()
    if bivector_rank(omega, mode) != 2:
        raise ValueError("bivector must have rank exactly 2")
    triple = regular_sl2_triple(n)
    if mode.is_exact and omega.is_rational():
        u, v = _rank2_factor_exact(omega)
        x, y = triple.x, triple.y
    else:
        u, v = _rank2_factor_float(omega, mode.tol_residual)
        x, y = to_float(triple.x), to_float(triple.y)
    mats = tuple(u[i] * x + v[i] * y for i in range(omega.dim_v))
    return MatrixTuple(n, omega.dim_v, mats)


def _sl_n_scan(n: int, exact: bool, seed: int):
    """Traceless scan candidates: elementary, diagonal-traceless, then random."""
    mode = ScalarMode.exact() if exact else ScalarMode.floating()
    out = []
    for a in range(n):
        for b in range(n):
            if a != b:
                h = zeros((n, n), mode)
                h[a, b] = Fraction(1) if exact else 1.0 + 0j
                out.append(h)
    for a in range(n - 1):
        h = zeros((n, n), mode)
        one = Fraction(1) if exact else 1.0 + 0j
        h[a, a] = one
        h[a + 1, a + 1] = -one
        out.append(h)
    rng = np.random.default_rng(seed)
    for _ in range(16):
        if exact:
            h = np.empty((n, n), dtype=object)
            vals = rng.integers(-9, 10, size=(n, n))
            for i in range(n):
                for j in range(n):
                    h[i, j] = Fraction(int(vals[i, j]))
            tr = sum(h[i, i] for i in range(n))
            h[n - 1, n - 1] -= tr
        else:
            h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            h -= (np.trace(h) / n) * np.eye(n)
        out.append(h)
    return out


def tuple_to_witness(alpha: MatrixTuple, p: SkewPairing,
                     mode: ScalarMode | None = None, seed: int = 0) -> Bivector | None:
    """Extract a kernel bivector from a mu-zero tuple by trace contraction.

    Scans traceless matrices (elementary, diagonal, then seeded random) and
    returns the first nonzero contraction, which lands in the kernel of the
    pairing.  For 2 x 2 tuples the result is returned only with rank exactly
    2, which the contraction bound guarantees for any nonzero value.  Returns
    None when the tuple commutes (or no nonzero contraction is found).
    """
    exact = alpha.is_rational() and p.is_rational()
    if mode is None:
        mode = ScalarMode.exact() if exact else ScalarMode.floating()
    exact = exact and mode.is_exact
    scale = tuple_scale(alpha)
    mus = mu(alpha, p)
    if exact:
        if any(np.any(m != 0) for m in mus):
            raise MuNonzeroError("tuple does not satisfy mu = 0")
    else:
        mres = max((frobenius(m) for m in mus), default=0.0)
        if mres > mode.tol_residual * max(scale ** 2, 1e-300):
            raise MuNonzeroError("tuple does not satisfy mu = 0 within tolerance")
    commutators = chi(alpha)
    chiscale = max((frobenius(c) for c in commutators), default=0.0)
    if exact:
        if all(np.all(c == 0) for c in commutators):
            return None
    elif chiscale <= mode.tol_residual * max(scale ** 2, 1e-300):
        return None
    for h in _sl_n_scan(alpha.n, exact, seed):
        w = trace_contraction(alpha, h)
        if exact:
            nonzero = not w.is_zero()
        else:
            hnorm = frobenius(h if isinstance(h, np.ndarray) else np.asarray(h))
            wnorm = float(np.linalg.norm(_float_coeffs(w)))
            nonzero = wnorm > mode.tol_residual * chiscale * max(hnorm, 1e-300)
        if not nonzero:
            continue
        if alpha.n == 2 and bivector_rank(w, mode) != 2:
            continue
        return w
    return None


def construct_stable_point(p: SkewPairing, omega: Bivector, n: int, epsilon,
                           mode: ScalarMode | None = None) -> MatrixTuple:
    """Scaled sl2-tuple through a rank-2 kernel element.

    The output satisfies mu = 0 and is stable (irreducible representation)
    at every scale, so shrinking epsilon produces stable points arbitrarily
    close to the origin of the cone.
    """
    if not (complex(epsilon).real > 0 and complex(epsilon).imag == 0):
        raise ValueError("epsilon must be a positive real")
    mode = _default_mode(p, mode) if omega.is_rational() else ScalarMode.floating()
    if omega.is_rational() and p.is_rational() and mode.is_exact:
        if not all(x == 0 for x in apply(p, omega)):
            raise ValueError("bivector is not in the kernel of the pairing")
    else:
        check = ScalarMode.floating()
        if _witness_residual(p, omega) > check.tol_residual:
            raise ValueError("bivector is not in the kernel within tolerance")
    alpha = witness_to_tuple(omega, n, mode)
    if alpha.is_rational():
        factor = epsilon if isinstance(epsilon, (int, Fraction)) else Fraction(epsilon)
        factor = Fraction(factor)
    else:
        factor = complex(epsilon)
    return alpha.scaled(factor)


# ---------------------------------------------------------------------------
# Newton sampling of the quadratic cone


@dataclass(frozen=True)
class MuZeroSample:
    alpha: MatrixTuple
    commuting: bool
    mu_residual: float
    chi_residual: float


@dataclass(frozen=True)
class SamplerResult:
    samples: tuple
    attempted: int
    converged: int


def _mu_system(pmat: np.ndarray, n: int, d: int):
    """Return F(z) and J(z) callables for the stacked quadratic system."""
    m = pmat.shape[0]
    eye = np.eye(n)

    def unpack(z):
        return z.reshape(d, n, n)

    def f(z):
        mats = unpack(z)
        out = np.zeros((m, n, n), dtype=complex)
        for idx, (i, j) in enumerate(pair_list(d)):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            for k in range(m):
                c = pmat[k, idx]
                if c != 0:
                    out[k] += c * comm
        return out.reshape(-1)

    def jac(z):
        mats = unpack(z)
        out = np.zeros((m * n * n, d * n * n), dtype=complex)
        for b in range(d):
            for k in range(m):
                s = np.zeros((n, n), dtype=complex)
                for i in range(d):
                    if i == b:
                        continue
                    if i < b:
                        c = pmat[k, pair_index(i, b, d)]
                    else:
                        c = -pmat[k, pair_index(b, i, d)]
                    if c != 0:
                        s += c * mats[i]
                block = np.kron(s, eye) - np.kron(eye, s.T)
                out[k * n * n:(k + 1) * n * n, b * n * n:(b + 1) * n * n] = block
        return out

    return f, jac


def mu_zero_sampler(p: SkewPairing, n: int, cfg: SearchConfig = SearchConfig(),
                    mode: ScalarMode | None = None) -> SamplerResult:
    """Newton samples of the quadratic cone, labeled commuting/non-commuting.

    Starts are drawn with unit total Frobenius norm; when the kernel exposes
    a rank-2 generator, the sl2 construction through it is used as the first
    start (it solves the system exactly, so Newton accepts it immediately).
    Residual acceptance is scaled by the squared tuple norm, matching the
    quadratic scaling of the system.  Non-converged starts are dropped and
    counted.
    """
    if mode is None or mode.is_exact:
        mode = ScalarMode.floating()
    d = p.dim_v
    pm = p.matrix()
    pmat = pm if pm.dtype != object else to_float(pm)
    pmat = np.asarray(pmat, dtype=complex)
    f, jac = _mu_system(pmat, n, d)

    starts = []
    k = kernel(p, ScalarMode.floating())
    for b in k.basis:
        if bivector_rank(b, ScalarMode.floating()) == 2:
            seed_tuple = witness_to_tuple(b, n, ScalarMode.floating())
            z0 = np.concatenate([np.asarray(m, complex).reshape(-1)
                                 for m in seed_tuple.matrices])
            norm = np.linalg.norm(z0)
            if norm > 0:
                starts.append(z0 / norm)
            break
    idx = 0
    while len(starts) < cfg.restarts:
        rng = np.random.default_rng((cfg.seed, idx))
        z0 = rng.standard_normal(d * n * n) + 1j * rng.standard_normal(d * n * n)
        starts.append(z0 / np.linalg.norm(z0))
        idx += 1

    samples = []
    converged = 0
    for z in starts:
        z = z.copy()
        ok = False
        for _ in range(cfg.max_iterations):
            res = f(z)
            mats = z.reshape(d, n, n)
            scale = max(np.linalg.norm(m) for m in mats)
            bound = mode.tol_residual * max(scale ** 2, 1e-300)
            if np.linalg.norm(res) <= bound or res.size == 0:
                ok = True
                break
            step, *_ = np.linalg.lstsq(jac(z), -res, rcond=None)
            if not np.all(np.isfinite(step)):
                break
            z = z + step
        if not ok:
            continue
        converged += 1
        alpha = MatrixTuple(n, d, tuple(z.reshape(d, n, n).copy()))
        scale = tuple_scale(alpha)
        chires = chi_norm(alpha)
        mures = float(np.linalg.norm(f(z)))
        commuting = scale == 0 or chires <= mode.tol_residual * scale ** 2
        samples.append(MuZeroSample(alpha, commuting, mures, chires))
    return SamplerResult(tuple(samples), len(starts), converged)


def split_component_dimension(n: int, dim_m: int) -> int:
    """Dimension of the split component through the n-fold direct sum point."""
    if n < 1:
        raise ValueError("need n >= 1")
    if dim_m < 0:
        raise ValueError("dim_m must be nonnegative")
    return n * dim_m
