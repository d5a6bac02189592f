"""Cyclic-vector machinery: Wronskians, bounds, scalar equations."""

from fractions import Fraction

import pytest

from meroconn import (
    Connection,
    Divisor,
    GaussRat,
    Poly,
    RatFun,
    ScalarODE,
    Section,
    SplittingType,
    apparent_singularities,
    covariant_derivative,
    cyclic_reduce,
    estimate_H,
    fixture,
    fuchs_check,
    generation_bound,
    generation_index_at,
    h_bound,
    infinity_degree,
    iterated,
    parse_divisor,
    pole_profile,
    residue,
    residue_identity_check,
    section_space_basis,
    valuation,
    wronskian_determinant,
)
from meroconn.errors import NotCyclic, SingularEvaluationPoint, ZeroSection
from helpers import random_poly_section, random_rank2_connection, rng_for

ONE = RatFun.const(1)
ZERO = RatFun.const(0)
T = RatFun.t()


def zero_rank1(point=0):
    return Connection(SplittingType([0]), Divisor([(GaussRat(point), 1)]),
                      [[ZERO]])


def zero_rank2(point=0):
    return Connection(SplittingType([0, 0]), Divisor([(GaussRat(point), 1)]),
                      [[ZERO, ZERO], [ZERO, ZERO]])


def reducible_mu_quarter():
    """M = [[0,1],[mu,0]]/(t(t-1)) with mu = 1/4."""
    return fixture("two-point-reducible")


class TestIterated:
    def test_k_zero(self):
        conn = fixture("euler-half")
        omega = Section([ONE], conn.splitting)
        assert iterated(conn, omega, 0) == [omega]

    def test_plain_derivatives(self):
        conn = zero_rank1()
        its = iterated(conn, Section([T ** 2], conn.splitting), 2)
        assert [s.comps[0] for s in its] == \
            [T ** 2, RatFun.const(2) * T, RatFun.const(2)]

    def test_triangle_unit_vector(self):
        conn = fixture("triangle-nilpotent")
        its = iterated(conn, Section([ONE, ZERO], conn.splitting), 1)
        assert its[1].comps == (conn.matrix[0][0], conn.matrix[1][0])


class TestWronskianDeterminant:
    def test_rank1_is_component(self):
        conn = fixture("euler-half")
        omega = Section([T + ONE], conn.splitting)
        assert wronskian_determinant(conn, omega) == T + ONE

    def test_rank2_direct_expansion(self):
        conn = reducible_mu_quarter()
        omega = Section([ONE, ZERO], conn.splitting)
        mu_over = RatFun.const(Fraction(1, 4)) / (T * (T - ONE))
        assert wronskian_determinant(conn, omega) == mu_over

    def test_zero_section_rejected(self):
        conn = fixture("euler-half")
        with pytest.raises(ZeroSection):
            wronskian_determinant(conn, Section([ZERO], conn.splitting))

    def test_irreducible_fixtures_nonzero_wronskian(self):
        rng = rng_for("nonzero-wronskian")
        for name in ("triangle-nilpotent", "triangle-diag"):
            conn = fixture(name)
            for _ in range(20):
                omega = random_poly_section(rng, conn, deg=3)
                assert not wronskian_determinant(conn, omega).is_zero()


class TestHBound:
    def test_line_bundle_case(self):
        assert h_bound(fixture("euler-half"), 2) == 3

    def test_formula_rank2(self):
        conn = fixture("triangle-nilpotent")  # alpha=2, sum m = 3, c = 0
        assert h_bound(conn, 1) == 3 + 4 - 1 + 0

    def test_formula_rank3(self):
        conn = Connection(
            SplittingType([0, 0, 0]),
            Divisor([(GaussRat(k), 1) for k in range(3)]),
            [[ZERO] * 3 for _ in range(3)],
        )
        assert h_bound(conn, 0) == 6 + 3 - 3


class TestGenerationBound:
    def test_rank1_multiplicity(self):
        conn = zero_rank1(point=5)
        omega = Section([T ** 2 * (T - ONE)], conn.splitting)
        assert generation_bound(conn, omega) == 3
        assert generation_index_at(conn, omega, 0) == 3
        assert generation_index_at(conn, omega, 2) == 1

    def test_rank2_constant_numerator(self):
        conn = reducible_mu_quarter()
        omega = Section([ONE, ZERO], conn.splitting)
        assert generation_bound(conn, omega) == 2

    def test_soundness_at_random_points(self):
        rng = rng_for("generation-soundness")
        for name in ("triangle-nilpotent", "triangle-diag"):
            conn = fixture(name)
            sing = set(conn.singular_points)
            for _ in range(10):
                omega = random_poly_section(rng, conn, deg=2)
                a = wronskian_determinant(conn, omega)
                bound = generation_bound(conn, omega)
                for _ in range(5):
                    b = GaussRat(rng.randint(6, 30))
                    if b in sing:
                        continue
                    h = generation_index_at(conn, omega, b)
                    assert h <= bound
                    if not a.eval(b).is_zero():
                        assert h == conn.rank

    def test_singular_point_rejected(self):
        conn = fixture("triangle-diag")
        omega = Section([ONE, ZERO], conn.splitting)
        with pytest.raises(SingularEvaluationPoint):
            generation_index_at(conn, omega, 0)


class TestCyclicReduce:
    def test_free_rank2(self):
        conn = zero_rank2()
        ode = cyclic_reduce(conn, Section([ONE, T], conn.splitting))
        assert ode.order == 2
        assert ode.coeffs == (ZERO, ZERO)

    def test_rank1_reads_off_matrix(self):
        conn = fixture("euler-half")
        ode = cyclic_reduce(conn, Section([ONE], conn.splitting))
        assert ode.coeffs == (conn.matrix[0][0],)

    def test_not_cyclic(self):
        conn = zero_rank2()
        with pytest.raises(NotCyclic):
            cyclic_reduce(conn, Section([ONE, ONE], conn.splitting))

    def test_log_coefficient_identity(self):
        # c_{alpha-1} * A = A' + tr(M) * A, exactly
        rng = rng_for("cyclic-identity")
        for name in ("triangle-nilpotent", "triangle-diag"):
            conn = fixture(name)
            tr = conn.trace()
            for _ in range(10):
                omega = random_poly_section(rng, conn, deg=2)
                a = wronskian_determinant(conn, omega)
                ode = cyclic_reduce(conn, omega)
                assert ode.coeffs[-1] * a == a.derivative() + tr * a

    def test_derivative_of_determinant_identity(self):
        # det[omega, grad^alpha omega] = A' + tr(M) A for alpha = 2
        from meroconn import det_ratfun

        rng = rng_for("det-derivative")
        conn = fixture("triangle-diag")
        tr = conn.trace()
        for _ in range(10):
            omega = random_poly_section(rng, conn, deg=2)
            its = iterated(conn, omega, 2)
            a = wronskian_determinant(conn, omega)
            mat = [[its[0].comps[i], its[2].comps[i]] for i in range(2)]
            assert det_ratfun(mat) == a.derivative() + tr * a


class TestFuchsCheck:
    def test_trivial_equation(self):
        ode = ScalarODE(order=2, coeffs=(ZERO, ZERO))
        verdicts = fuchs_check(ode, [GaussRat(0), GaussRat(1)])
        assert all(ok for _, ok, _ in verdicts)

    def test_order_violation(self):
        ode = ScalarODE(order=2, coeffs=(ZERO, ONE / T ** 2))
        [(point, ok, bad)] = fuchs_check(ode, [GaussRat(0)])
        assert not ok
        assert bad[0][0] == 1 and bad[0][1] == 2

    def test_fixture_equations_fuchsian(self):
        for name in ("triangle-nilpotent", "triangle-diag"):
            conn = fixture(name)
            ode = cyclic_reduce(conn, Section([ONE, ZERO], conn.splitting))
            verdicts = fuchs_check(ode, conn.singular_points)
            assert all(ok for _, ok, _ in verdicts)


class TestResidueIdentity:
    def test_rank1_double_zero(self):
        conn = zero_rank1(point=5)
        omega = Section([T ** 2], conn.splitting)
        records = residue_identity_check(conn, omega)
        at0 = next(r for r in records if r.point == GaussRat(0))
        assert at0.lhs == GaussRat(2) and at0.equal

    def test_divisor_point_correction(self):
        conn = reducible_mu_quarter()
        omega = Section([ONE, ZERO], conn.splitting)
        a = wronskian_determinant(conn, omega)
        for rec in residue_identity_check(conn, omega):
            assert rec.equal
            if rec.in_divisor:
                corr = GaussRat(valuation(a, rec.point)) + \
                    residue(conn.trace(), rec.point)
                assert rec.rhs == corr

    def test_scale_invariance(self):
        conn = fixture("triangle-diag")
        omega = Section([ONE, T], conn.splitting)
        scaled = omega.scale(RatFun.const(GaussRat(3, 7)))
        assert residue_identity_check(conn, omega) == \
            residue_identity_check(conn, scaled)


class TestApparentSingularities:
    def test_empty_report(self):
        conn = reducible_mu_quarter()
        omega = Section([ONE, ZERO], conn.splitting)
        assert apparent_singularities(conn, omega).records == []

    def test_simple_rational_zero(self):
        conn = zero_rank1(point=5)
        omega = Section([T - RatFun.const(3)], conn.splitting)
        [rec] = apparent_singularities(conn, omega).records
        assert rec.exact
        assert rec.location == GaussRat(3)
        assert rec.val_wronskian == 1
        assert rec.res_log_coeff == GaussRat(1)

    def test_irrational_zeros_flagged(self):
        conn = zero_rank1(point=5)
        omega = Section([T ** 2 - RatFun.const(2)], conn.splitting)
        records = apparent_singularities(conn, omega).records
        assert len(records) == 2
        locs = sorted(r.location.real for r in records)
        assert abs(locs[0] + 2 ** 0.5) < 1e-9
        assert abs(locs[1] - 2 ** 0.5) < 1e-9
        assert all(not r.exact and r.val_wronskian == 1 for r in records)


class TestEstimateH:
    def test_zero_samples_floor(self):
        conn = fixture("triangle-nilpotent")
        report = estimate_H(conn, 1, parse_divisor("inf^1"), 0, seed=1)
        assert report.max_observed_generation == conn.rank
        assert not report.violated

    def test_euler_attains_line_bundle_value(self):
        conn = fixture("euler-half")
        report = estimate_H(conn, 2, parse_divisor("inf^2"), 50, seed=7)
        assert report.bound == 3
        assert report.max_observed_generation == 3
        assert not report.violated

    def test_triangle_constant_sections(self):
        conn = fixture("triangle-nilpotent")
        report = estimate_H(conn, 0, Divisor([]), 20, seed=3)
        assert report.bound == 1 * 3 + 2 - 1
        assert report.max_observed_generation <= report.bound


class TestInfinityOrderBookkeeping:
    def test_wronskian_infinity_degree(self):
        # trivial splitting, omega with infinity pole order m >= alpha:
        # infinity_degree(A) <= alpha*m - alpha*(alpha-1)/2 always.  For
        # alpha = 2 the top coefficient of omega ^ omega' cancels
        # identically (a*mb - b*ma = 0), so the generic value is one lower;
        # that value should be attained on most random draws.
        rng = rng_for("infinity-bookkeeping")
        conn = fixture("triangle-diag")
        hits = 0
        total = 0
        for _ in range(20):
            omega = random_poly_section(rng, conn, deg=rng.randint(2, 4))
            _, m, _ = pole_profile(omega, set(conn.singular_points))
            if m < conn.rank:
                continue
            total += 1
            a = wronskian_determinant(conn, omega)
            bound = conn.rank * m - conn.rank * (conn.rank - 1) // 2
            assert infinity_degree(a) <= bound
            if infinity_degree(a) == bound - 1:
                hits += 1
        assert total >= 10 and hits >= total // 2


def test_line_bundle_collapse():
    conn = fixture("euler-half")
    basis = section_space_basis(conn.splitting, parse_divisor("inf^2"))
    best = max(generation_bound(conn, s) for s in basis)
    from meroconn import spanning_sections

    shifted = spanning_sections(conn, parse_divisor("inf^2"))
    best = max(best, max(generation_bound(conn, s) for s in shifted))
    assert best == 2 + 0 + 1 == h_bound(conn, 2)
