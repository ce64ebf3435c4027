from fractions import Fraction

import numpy as np
import pytest

from semirigid.exterior import (
    NO,
    NOT_APPLICABLE,
    YES,
    Bivector,
    FilteredPairing,
    KernelSubspace,
    SkewPairing,
    apply,
    associated_graded,
    bivector_rank,
    decomposable_exists_exact,
    dimension_criterion,
    kernel,
    leading_term,
    pair_index,
    pair_list,
    plucker_square,
    wedge,
)
from semirigid.scalars import ScalarMode

EXACT = ScalarMode.exact()
FLOAT = ScalarMode.floating()


def symplectic_pairing(d):
    # nondegenerate skew form into a one-dimensional W
    values = {(2 * k, 2 * k + 1): (1,) for k in range(d // 2)}
    return SkewPairing.from_map(d, 1, values)


def random_bivector(rng, d, lo=-3, hi=4):
    return Bivector(d, tuple(int(x) for x in rng.integers(lo, hi, size=len(pair_list(d)))))


class TestIndexing:
    def test_pair_index_roundtrip(self):
        for d in range(2, 7):
            for idx, (i, j) in enumerate(pair_list(d)):
                assert pair_index(i, j, d) == idx

    def test_antisymmetric_coefficient(self):
        w = Bivector.from_pairs(3, {(0, 1): 5})
        assert w.coefficient(0, 1) == 5
        assert w.coefficient(1, 0) == -5
        assert w.coefficient(2, 2) == 0


class TestApply:
    def test_symplectic_d2(self):
        p = symplectic_pairing(2)
        out = apply(p, Bivector.basis_element(2, 0, 1))
        assert list(out) == [1]

    def test_zero_bivector(self):
        p = symplectic_pairing(4)
        assert all(x == 0 for x in apply(p, Bivector.zero(4)))

    def test_identity_pairing(self):
        p = SkewPairing.identity(2)
        out = apply(p, Bivector.basis_element(2, 0, 1))
        assert list(out) == [1]

    def test_bilinear(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            d = int(rng.integers(2, 6))
            m = int(rng.integers(1, 4))
            p = SkewPairing.from_map(
                d, m,
                {pair: tuple(int(v) for v in rng.integers(-3, 4, size=m))
                 for pair in pair_list(d)})
            w1, w2 = random_bivector(rng, d), random_bivector(rng, d)
            a, b = Fraction(2, 3), Fraction(-5)
            left = apply(p, a * w1 + b * w2)
            right = a * apply(p, w1) + b * apply(p, w2)
            assert all(x == y for x, y in zip(left, right))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply(symplectic_pairing(2), Bivector.zero(3))


class TestKernel:
    def test_symplectic_d2_injective(self):
        assert kernel(symplectic_pairing(2), EXACT).dim == 0

    def test_symplectic_d4_hyperplane(self):
        assert kernel(symplectic_pairing(4), EXACT).dim == 5

    def test_zero_pairing(self):
        assert kernel(SkewPairing.zero(3, 0), EXACT).dim == 3

    def test_kernel_elements_map_to_zero(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            d = int(rng.integers(3, 6))
            m = int(rng.integers(1, 4))
            p = SkewPairing.from_map(
                d, m,
                {pair: tuple(int(v) for v in rng.integers(-2, 3, size=m))
                 for pair in pair_list(d)})
            for b in kernel(p, EXACT).basis:
                assert all(x == 0 for x in apply(p, b))


class TestRankAndPlucker:
    def test_rank_examples(self):
        assert bivector_rank(Bivector.basis_element(4, 0, 1), EXACT) == 2
        w = Bivector.from_pairs(4, {(0, 1): 1, (2, 3): 1})
        assert bivector_rank(w, EXACT) == 4
        assert bivector_rank(Bivector.zero(4), EXACT) == 0

    def test_plucker_examples(self):
        assert all(x == 0 for x in plucker_square(Bivector.basis_element(4, 0, 1)))
        w = Bivector.from_pairs(4, {(0, 1): 1, (2, 3): 1})
        assert plucker_square(w) == (2,)
        assert plucker_square(random_bivector(np.random.default_rng(0), 3)) == ()

    def test_rank_invariant_under_basis_change(self):
        rng = np.random.default_rng(9)
        for d in (4, 5):
            for _ in range(10):
                w = random_bivector(rng, d)
                m = w.skew_matrix()
                p = np.array(rng.integers(-2, 3, size=(d, d)), dtype=object)
                while _exact_det_is_zero(p):
                    p = np.array(rng.integers(-2, 3, size=(d, d)), dtype=object)
                t = p.T @ m @ p
                transformed = Bivector(d, tuple(t[i, j] for i, j in pair_list(d)))
                assert bivector_rank(transformed, EXACT) == bivector_rank(w, EXACT)

    def test_plucker_vanishes_iff_rank_at_most_two(self):
        rng = np.random.default_rng(21)
        for d in (4, 5, 6):
            for k in range(1000):
                if k % 2:
                    u = rng.integers(-3, 4, size=d)
                    v = rng.integers(-3, 4, size=d)
                    w = wedge([int(x) for x in u], [int(x) for x in v])
                else:
                    w = random_bivector(rng, d)
                vanishes = all(x == 0 for x in plucker_square(w))
                assert vanishes == (bivector_rank(w, EXACT) <= 2)


def _exact_det_is_zero(p):
    from semirigid.scalars import rank as _rank
    return _rank(p, EXACT) < p.shape[0]


class TestDimensionCriterion:
    def test_bound_cases(self):
        k5 = KernelSubspace(4, tuple(Bivector.basis_element(4, i, j)
                                     for i, j in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]))
        assert dimension_criterion(k5) is True
        k3 = KernelSubspace(5, tuple(Bivector.basis_element(5, 0, j) for j in (1, 2, 3)))
        assert dimension_criterion(k3) is False
        k1 = KernelSubspace(3, (Bivector.basis_element(3, 0, 1),))
        assert dimension_criterion(k1) is True


def _pf4(w):
    c = w.coeffs
    return c[0] * c[5] - c[1] * c[4] + c[2] * c[3]


def _net_finds_pf_zero(k1, k2, n_grid):
    """Brute-force net scan of the plane spanned by two bivectors for a zero
    of the restricted Pfaffian quadric.

    Works on the two affine charts x*k1 + k2 and k1 + y*k2, which together
    cover the projective line of the plane with parameters of modulus <= 3.
    The acceptance threshold 5*h (h = grid spacing, quadric scaled by its
    largest coefficient) is guaranteed to fire at a net point next to a true
    zero, so refining the net can only help.
    """
    a = complex(_pf4(k1))
    c = complex(_pf4(k2))
    b = complex(_pf4(k1 + k2)) - a - c
    maxcoef = max(abs(a), abs(b), abs(c))
    if maxcoef == 0:
        return True
    h = 6.0 / (n_grid - 1)
    grid = np.linspace(-3, 3, n_grid)
    x = (grid[:, None] + 1j * grid[None, :]).ravel()
    for lead, mid, last in ((a, b, c), (c, b, a)):
        vals = np.abs(lead * x * x + mid * x + last) / maxcoef
        if vals.min() <= 5 * h:
            return True
    return False


class TestDecomposableExistsExact:
    def test_low_dim_cases(self):
        assert decomposable_exists_exact(KernelSubspace(3, ())).kind == NO
        dec = decomposable_exists_exact(KernelSubspace(2, (Bivector.basis_element(2, 0, 1),)))
        assert dec.kind == YES
        assert dec.witness.coeffs == (1,)
        assert decomposable_exists_exact(KernelSubspace(5, ())).kind == NOT_APPLICABLE

    def test_symplectic_hyperplane_witness(self):
        k = kernel(symplectic_pairing(4), EXACT)
        dec = decomposable_exists_exact(k)
        assert dec.kind == YES
        assert bivector_rank(dec.witness, FLOAT if not dec.witness.is_rational() else EXACT) == 2
        assert _net_finds_pf_zero(k.basis[0], k.basis[1], 41)

    def test_rank4_generator_is_no(self):
        gen = Bivector.from_pairs(4, {(0, 1): 1, (2, 3): 1})
        dec = decomposable_exists_exact(KernelSubspace(4, (gen,)))
        assert dec.kind == NO
        assert _pf4(gen) != 0

    def test_irrational_discriminant_gives_complex_witness(self):
        # Pfaffian form x^2 - 2 y^2 on the plane: no rational zero
        k1 = Bivector.from_pairs(4, {(0, 1): 1, (2, 3): 1})
        k2 = Bivector.from_pairs(4, {(0, 2): 1, (1, 3): 2})
        dec = decomposable_exists_exact(KernelSubspace(4, (k1, k2)))
        assert dec.kind == YES
        assert not dec.witness.is_rational()
        assert bivector_rank(dec.witness, FLOAT) == 2

    def test_definite_form_needs_complex_point(self):
        # Pfaffian form x^2 + y^2: zeros only at complex parameters
        k1 = Bivector.from_pairs(4, {(0, 1): 1, (2, 3): 1})
        k2 = Bivector.from_pairs(4, {(0, 2): 1, (1, 3): -1})
        dec = decomposable_exists_exact(KernelSubspace(4, (k1, k2)))
        assert dec.kind == YES
        assert bivector_rank(dec.witness, FLOAT) == 2

    def test_agrees_with_net_oracle_on_random_instances(self):
        from semirigid.scalars import rank as _rank
        rng = np.random.default_rng(33)
        for _ in range(40):
            dim_k = int(rng.integers(1, 4))
            basis = []
            while len(basis) < dim_k:
                cand = random_bivector(rng, 4, -2, 3)
                stacked = np.array([list(b.coeffs) for b in basis + [cand]], dtype=object)
                if not cand.is_zero() and _rank(stacked, EXACT) == len(basis) + 1:
                    basis.append(cand)
            k = KernelSubspace(4, tuple(basis))
            dec = decomposable_exists_exact(k)
            if dim_k == 1:
                # exhaustive check of the one-dimensional space is exact
                assert (dec.kind == YES) == (_pf4(basis[0]) == 0)
            else:
                assert dec.kind == YES
                found = any(_net_finds_pf_zero(basis[0], basis[1], n) for n in (41, 81, 161))
                assert found
            if dec.kind == YES:
                mode = EXACT if dec.witness.is_rational() else FLOAT
                assert bivector_rank(dec.witness, mode) == 2


class TestFiltered:
    def test_construction_rejects_violations(self):
        p = SkewPairing.from_map(3, 1, {(0, 1): (1,)})
        with pytest.raises(ValueError):
            FilteredPairing(p, (1, 1, 0), (0,))

    def test_trivial_filtration_is_identity(self):
        p = symplectic_pairing(4)
        fp = FilteredPairing(p, (0,) * 4, (0,))
        assert associated_graded(fp) == p

    def test_strictly_increasing_coefficient_dropped(self):
        # one coefficient sitting strictly above its source level
        p = SkewPairing.from_map(3, 1, {(0, 1): (1,)})
        fp = FilteredPairing(p, (0, 0, 0), (1,))
        gr = associated_graded(fp)
        assert all(x == 0 for row in gr.entries for x in row)

    def test_zero_pairing(self):
        p = SkewPairing.zero(3, 2)
        fp = FilteredPairing(p, (1, 0, 0), (2, 1))
        assert associated_graded(fp) == SkewPairing.zero(3, 2)

    def test_leading_term_homogeneous(self):
        p = SkewPairing.zero(3, 0)
        fp = FilteredPairing(p, (1, 1, 0), ())
        w = Bivector.basis_element(3, 0, 1)
        assert leading_term(fp, w) == w

    def test_leading_term_mixed_levels(self):
        # deepest step of the decreasing filtration wins: with levels
        # (1, 1, 0) the pair (0, 1) has level 2 and (0, 2) has level 1;
        # the level-1 component is the leading term
        p = SkewPairing.zero(3, 0)
        fp = FilteredPairing(p, (1, 1, 0), ())
        w = Bivector.from_pairs(3, {(0, 1): 3, (0, 2): 5})
        lead = leading_term(fp, w)
        assert lead == Bivector.from_pairs(3, {(0, 2): 5})

    def test_leading_term_zero_rejected(self):
        fp = FilteredPairing(SkewPairing.zero(3, 0), (0, 0, 0), ())
        with pytest.raises(ValueError):
            leading_term(fp, Bivector.zero(3))

    def test_gr_injective_implies_injective(self):
        from semirigid.scalars import rank as _rank
        rng = np.random.default_rng(44)
        hits = 0
        for _ in range(30):
            d = int(rng.integers(3, 5))
            npairs = len(pair_list(d))
            extra = int(rng.integers(1, 3))
            filt_v = tuple(0 for _ in range(d))
            filt_w = tuple([0] * npairs + [1] * extra)
            rows = []
            block = rng.integers(-2, 3, size=(npairs, npairs))
            noise = rng.integers(-2, 3, size=(npairs, extra))
            for idx in range(npairs):
                rows.append(tuple(int(x) for x in block[idx]) + tuple(int(x) for x in noise[idx]))
            p = SkewPairing(d, npairs + extra, tuple(rows))
            fp = FilteredPairing(p, filt_v, filt_w)
            gr = associated_graded(fp)
            if _rank(gr.matrix(), EXACT) == npairs:
                hits += 1
                assert _rank(p.matrix(), EXACT) == npairs
        assert hits >= 5

    def test_leading_term_of_kernel_element_lies_in_graded_kernel(self):
        # d = 4, levels (1, 1, 0, 0); u = e0 + e2, v = e1 + e3 gives the
        # rank-2 kernel element with leading term e2 ^ e3
        values = {
            (0, 3): (0, 1, 0),
            (1, 2): (0, 1, 1),
            (0, 1): (0, 0, 1),
            (1, 3): (0, 0, 1),
        }
        p = SkewPairing.from_map(4, 3, values)
        fp = FilteredPairing(p, (1, 1, 0, 0), (0, 1, 2))
        u = [1, 0, 1, 0]
        v = [0, 1, 0, 1]
        omega = wedge(u, v)
        assert all(x == 0 for x in apply(p, omega))
        lead = leading_term(fp, omega)
        assert lead == Bivector.from_pairs(4, {(2, 3): 1})
        assert bivector_rank(lead, EXACT) == 2
        assert all(x == 0 for x in apply(associated_graded(fp), lead))

    def test_leading_term_after_plane_reduction(self):
        # proportional leading terms in the factors still give a rank-2
        # leading term for the wedge
        p = SkewPairing.zero(3, 0)
        fp = FilteredPairing(p, (1, 1, 0), ())
        omega = wedge([1, 0, 1], [0, 1, 1])
        lead = leading_term(fp, omega)
        assert bivector_rank(lead, EXACT) == 2
        assert lead == Bivector.from_pairs(3, {(0, 2): 1, (1, 2): -1})
