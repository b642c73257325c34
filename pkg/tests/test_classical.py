import cmath
import math

import numpy as np
import pytest

from cubespectral.classical import (
    L1L2_CONSTANT,
    BOUND_IDS,
    ErdelyiResult,
    LensDomain,
    beckner_membership,
    bound_value,
    chebyshev_coefficients,
    chebyshev_deriv_at_one,
    chebyshev_t,
    chebyshev_t_recurrence,
    erdelyi_evaluate,
    lens_exterior_at_exp,
    lens_interior_at_exp,
    lens_map,
    moment_comp1_constant,
    refined_max,
    theta_and_radius,
    theta_p,
)

cheb = np.polynomial.chebyshev


# ---------------------------------------------------------------------------
# Chebyshev polynomials
# ---------------------------------------------------------------------------


def test_t3_values():
    assert chebyshev_t(3, 0.5) == pytest.approx(-1.0, abs=1e-14)  # 4x^3 - 3x
    assert chebyshev_t(3, 2.0) == pytest.approx(4 * 8 - 6, rel=1e-14)


def test_t_d_at_one_and_derivative():
    for d in range(1, 12):
        assert chebyshev_t(d, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert chebyshev_deriv_at_one(d, 1) == d * d


def test_second_derivative_example():
    assert chebyshev_deriv_at_one(4, 2) == 80  # 16*15/3


def test_three_evaluation_routes_agree():
    rng = np.random.default_rng(0)
    for d in (1, 3, 7, 16, 31):
        for x in rng.uniform(-1, 1, 20):
            assert chebyshev_t(d, x) == pytest.approx(
                chebyshev_t_recurrence(d, x), abs=1e-10
            )
        for y in (1.01, 1.5, 2.0, -1.2, -3.0):
            ident = chebyshev_t(d, y)
            recur = chebyshev_t_recurrence(d, y)
            assert ident == pytest.approx(recur, rel=1e-10)
        z = complex(0.3, 0.4)
        assert chebyshev_t(d, z) == pytest.approx(chebyshev_t_recurrence(d, z), rel=1e-10)


def test_deriv_at_one_matches_symbolic_differentiation_exactly():
    # integer-coefficient differentiation oracle, d <= 10, k <= 4
    for d in range(1, 11):
        coeffs = chebyshev_coefficients(d)
        for k in range(1, 5):
            dc = list(coeffs)
            for _ in range(k):
                dc = [i * c for i, c in enumerate(dc)][1:]
            symbolic = sum(dc)  # evaluate at x = 1 in exact integers
            assert chebyshev_deriv_at_one(d, k) == symbolic


def test_deriv_above_degree_is_zero():
    assert chebyshev_deriv_at_one(3, 4) == 0


# ---------------------------------------------------------------------------
# theta_p, r_p, lens geometry
# ---------------------------------------------------------------------------


def test_theta_and_radius_p2():
    theta, r = theta_and_radius(2.0)
    assert theta == pytest.approx(math.pi, abs=1e-14)
    assert r == pytest.approx(1.0, abs=1e-14)


def test_theta_p4_closed_form():
    theta, r = theta_and_radius(4.0)
    assert theta == pytest.approx(2 * math.asin(math.sqrt(3) / 2), rel=1e-14)
    assert theta == pytest.approx(2 * math.pi / 3, rel=1e-12)


def test_radius_angle_identity():
    for p in (1.01, 4 / 3, 1.5, 2.0, 3.0, 10.0, 100.0):
        theta, r = theta_and_radius(p)
        assert r == pytest.approx(1.0 / math.sin(theta / 2.0), rel=1e-12)
        assert 0 < theta <= math.pi


def test_theta_maximal_only_at_two():
    assert theta_p(2.0) == pytest.approx(math.pi)
    for p in (4 / 3, 1.9, 2.1, 4.0):
        assert theta_p(p) < math.pi


def test_theta_endpoint_conventions():
    assert theta_p(1.0) == 0.0
    assert theta_p(math.inf) == 0.0
    with pytest.raises(ValueError):
        theta_and_radius(1.0)
    with pytest.raises(ValueError):
        theta_and_radius(0.5)


def test_p_four_thirds_direct_evaluation():
    # evaluated directly from the defining formula, no duality shortcut
    theta, r = theta_and_radius(4 / 3)
    arg = 2 * math.sqrt(1 / 3) / (4 / 3)
    assert theta == pytest.approx(2 * math.asin(arg), rel=1e-14)
    assert r == pytest.approx((4 / 3) / (2 * math.sqrt(1 / 3)), rel=1e-14)


def test_lens_interior_map_fixes_zero():
    assert abs(lens_map(1.3, 0.0, "interior")) < 1e-14


def test_lens_interior_real_axis_matches_closed_form():
    for r in (1.05, 1.4, 2.5):
        theta = LensDomain(r).theta
        for t in (0.05, 0.4, 1.3, 3.0):
            got = lens_map(r, math.exp(-t), "interior")
            assert got.imag == pytest.approx(0.0, abs=1e-13)
            assert got.real == pytest.approx(lens_interior_at_exp(theta, t), rel=1e-12)
            got2 = lens_map(r, math.exp(t), "exterior")
            assert got2.real == pytest.approx(lens_exterior_at_exp(theta, t), rel=1e-12)


def test_lens_interior_endpoint_limit():
    # w -> 1^- along the reals: map -> 1
    val = lens_map(1.5, 1.0 - 1e-9, "interior")
    assert abs(val - 1.0) < 1e-5
    assert lens_interior_at_exp(LensDomain(1.5).theta, 1e-12) == pytest.approx(1.0, abs=1e-6)


def test_lens_boundary_modulus_oracle():
    for r in (1.05, 1.3, 2.0):
        dom = LensDomain(r)
        pts = dom.boundary_points(1000)
        for w in pts:
            assert abs(abs(lens_map(r, w * (1 - 1e-10), "interior")) - 1.0) < 1e-9
            assert abs(abs(lens_map(r, w * (1 + 1e-10), "exterior")) - 1.0) < 1e-9


def test_lens_map_rejects_boundary_and_wrong_side():
    dom = LensDomain(1.3)
    w = dom.boundary_points(10)[3]
    with pytest.raises(ValueError):
        lens_map(1.3, w, "interior")
    with pytest.raises(ValueError):
        lens_map(1.3, 0.1, "exterior")
    with pytest.raises(ValueError):
        lens_map(1.3, 5.0, "interior")
    with pytest.raises(ValueError):
        lens_map(1.3, 0.1, "sideways")


def test_unit_radius_lens_is_identity_map():
    for w in (0.3, -0.2 + 0.4j):
        assert lens_map(1.0, w, "interior") == pytest.approx(w, rel=1e-12)


# ---------------------------------------------------------------------------
# bound registry
# ---------------------------------------------------------------------------


def test_heat_lower_general_value():
    # 1/T_2(2) with T_2(x) = 2x^2-1 -> 1/7
    assert bound_value("HEAT_LOWER_GENERAL", d=2, t=math.log(2)) == pytest.approx(1 / 7)


def test_moment_general_value():
    assert bound_value("MOMENT_GENERAL", d=1, p=3.0, q=2.0) == pytest.approx(math.sqrt(2))


def test_laplacian_scalar_value_at_p2():
    for d in (1, 2, 5):
        assert bound_value("LAPLACIAN_SCALAR", d=d, p=2.0) == pytest.approx(10.0 * d)


def test_markov_values():
    assert bound_value("MARKOV_D2", d=3) == 9.0
    assert bound_value("MARKOV_HIGHER_K", d=4, k=2) == 80.0


def test_heat_scalar_factors_reduce_to_exponential_at_p2():
    for t in (0.2, 1.0):
        assert bound_value("HEAT_LOWER_SCALAR", d=3, p=2.0, t=t) == pytest.approx(
            math.exp(-3 * t), rel=1e-12
        )
        assert bound_value("HEAT_UPPER_TAIL", d=3, p=2.0, t=t) == pytest.approx(
            math.exp(-3 * t), rel=1e-12
        )


def test_bonami_threshold_and_endpoints():
    assert bound_value("BONAMI", p=4.0, q=2.0) == pytest.approx(0.5 * math.log(3))
    assert bound_value("GRAD_INF_ENDPOINT", d=6) == 12.0
    assert bound_value("GRAD_L1_ENDPOINT", d=2) == pytest.approx(L1L2_CONSTANT**2 * math.sqrt(2))
    assert bound_value("HEAT_GRAD_DECAY_INF", t=0.5) == pytest.approx(1 / math.sqrt(math.e - 1))
    assert bound_value("NAOS_INTERP", beta=0.5, delta_norm=4.0, g_norm=1.0) == pytest.approx(8.0)


def test_bound_registry_errors():
    with pytest.raises(KeyError):
        bound_value("NOT_A_BOUND", d=1)
    with pytest.raises(ValueError):
        bound_value("MARKOV_D2")  # missing d
    with pytest.raises(ValueError):
        bound_value("MOMENT_GENERAL", d=1, p=2.0, q=3.0)  # p <= q
    with pytest.raises(ValueError):
        bound_value("INFLUENCE", d=2, p=1.5)  # outside (1, 4/3)
    assert len(BOUND_IDS) == 20


def test_chsqrt_bound_holds_on_grid():
    for d in (1, 2, 4, 8, 16, 32, 64):
        for t in np.linspace(0.01, 3.0, 40):
            assert chebyshev_t(d, math.exp(t)) <= bound_value("CHSQRT", d=d, t=t)


# ---------------------------------------------------------------------------
# extremality property suites
# ---------------------------------------------------------------------------


def _random_poly_sup(rng, d):
    coef = rng.standard_normal(d + 1)
    sup = refined_max(lambda x: np.abs(cheb.chebval(x, coef)), -1.0, 1.0, nodes=2048)[1]
    return coef, sup


def test_chebyshev_growth_extremality_suite():
    rng = np.random.default_rng(99)
    points = (1.1, 2.0, math.e)
    for _ in range(1000):
        d = int(rng.integers(1, 24))
        coef, sup = _random_poly_sup(rng, d)
        for x0 in points:
            assert abs(cheb.chebval(x0, coef)) <= chebyshev_t(d, x0) * sup * (1 + 1e-6)


def test_markov_derivative_extremality_suite():
    rng = np.random.default_rng(100)
    for _ in range(1000):
        d = int(rng.integers(1, 24))
        coef, sup = _random_poly_sup(rng, d)
        deriv_at_1 = cheb.chebval(1.0, cheb.chebder(coef))
        assert abs(deriv_at_1) <= d * d * sup * (1 + 1e-6)


def test_markov_equality_for_chebyshev():
    for d in (2, 5, 9, 16):
        coef = np.zeros(d + 1)
        coef[d] = 1.0
        deriv = cheb.chebval(1.0, cheb.chebder(coef))
        assert abs(deriv - d * d) <= 1e-9 * d * d


# ---------------------------------------------------------------------------
# Erdelyi's reverse Bernstein inequality
# ---------------------------------------------------------------------------


def test_erdelyi_monomial_example():
    # P = x^4 declared with m = 1 (a_5 = 0): lhs = 1,
    # rhs = 6 sqrt(1/4) max sqrt(1-x^2) * 4x^3
    res = erdelyi_evaluate([1.0, 0.0], d=4)
    grid = np.linspace(0, 1, 400001)
    oracle = (np.sqrt(1 - grid**2) * 4 * grid**3).max()
    assert res.lhs == pytest.approx(1.0)
    assert res.rhs == pytest.approx(6 * 0.5 * oracle, rel=1e-9)
    assert res.lhs <= res.rhs


def test_erdelyi_cancelling_coefficients():
    res = erdelyi_evaluate([1.0, -2.0, 1.0], d=3)
    assert res.lhs == pytest.approx(0.0, abs=1e-15)
    assert res.rhs >= 0.0


def test_erdelyi_random_suite():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        d = int(rng.integers(1, 31))
        m = int(rng.integers(1, 11))
        coeffs = rng.standard_normal(m + 1)
        res = erdelyi_evaluate(coeffs, d=d)
        assert res.lhs <= res.rhs * (1 + res.certificate)


def test_erdelyi_degenerate_m0():
    with pytest.raises(ValueError):
        erdelyi_evaluate([2.0], d=3)
    res = erdelyi_evaluate([0.0], d=3)
    assert res == ErdelyiResult(0.0, 0.0, 0.0, 1e-6)


# ---------------------------------------------------------------------------
# Beckner domain and the L1-L2 constant
# ---------------------------------------------------------------------------


def test_beckner_zero_is_member():
    for p in (2.5, 3.0, 4.0, 10.0):
        assert beckner_membership(p, 0.0)


def test_beckner_boundary_points_are_members():
    for p in (2.5, 3.0, 4.0, 8.0):
        p_star = p / (p - 1.0)
        w = 1j * math.sqrt(p_star - 1.0)
        assert beckner_membership(p, w)
        assert beckner_membership(p, -w)
        assert not beckner_membership(p, w * 1.01)


def test_beckner_requires_p_above_two():
    with pytest.raises(ValueError):
        beckner_membership(2.0, 0.0)


def test_moment_scalar_equals_inverse_heat_lower_at_critical_time():
    # the sharpened moment factor is the heat lower-bound factor inverted at
    # t = (1/2) log((p-1)/(q-1)); both formulas are implemented independently
    for d in (1, 3, 6):
        for p, q in ((2.0, 1.5), (3.0, 2.0), (4.0, 1.5)):
            t_c = 0.5 * math.log((p - 1) / (q - 1))
            lower = bound_value("HEAT_LOWER_SCALAR", d=d, p=p, t=t_c)
            moment = bound_value("MOMENT_SCALAR", d=d, p=p, q=q)
            assert moment == pytest.approx(1.0 / lower, rel=1e-12)


def test_lens_exterior_growth_never_exceeds_segment_growth():
    # the lens contains the segment [-1,1], so its exterior map grows no
    # faster than the Joukowski growth factor e^t + sqrt(e^{2t}-1): the
    # per-degree base of the scalar heat lower bound beats the Chebyshev
    # base even though the d=1 prefactor can favor 1/T_d
    for p in (1.1, 4 / 3, 2.0, 3.0, 7.0, 40.0):
        theta, _ = theta_and_radius(p)
        for t in (0.05, 0.3, 1.0, 2.5):
            joukowski = math.exp(t) + math.sqrt(math.exp(2 * t) - 1.0)
            assert lens_exterior_at_exp(theta, t) <= joukowski * (1 + 1e-12)


def test_lens_theta_matches_exponent_theta():
    for p in (4 / 3, 1.5, 2.0, 3.0, 4.0):
        theta, r = theta_and_radius(p)
        assert LensDomain(r).theta == pytest.approx(theta, rel=1e-12)


def test_moment_comp1_constant_window():
    value, meta = moment_comp1_constant(details=True)
    assert 2.0 < value < L1L2_CONSTANT
    assert 2.0 < meta["p_star"] < 1000.0
    assert meta["grid"]["points"] == 10_000
