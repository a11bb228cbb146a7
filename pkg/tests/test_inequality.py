"""Inequality analytics: closed forms vs quadrature, dominance, empirical."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from kappagen import (
    CurveNonexistenceError,
    DegenerateDataError,
    DegenerateNormalizationError,
    DomainError,
    EKG2Params,
    KappaGenParams,
    LorenzCurve,
    LorenzOrdering,
    MomentDivergenceError,
    NetWealthMixtureParams,
    WeibullParams,
    WeightedSample,
    ekg2_lorenz,
    ekg2_quantile,
    empirical_gini,
    empirical_lorenz,
    kgen_ge,
    kgen_gini,
    kgen_inequality_report,
    kgen_lorenz,
    kgen_mean,
    kgen_mld,
    kgen_quantile,
    kgen_sample,
    kgen_theil,
    kgen_variance,
    lorenz_dominates,
    mixture_gini,
    mixture_lorenz,
    mixture_mean,
    quantile_gini,
    quantile_lorenz,
    quantile_mean,
)

EULER_GAMMA = np.euler_gamma


def lorenz_by_quadrature(quantile_fn, u):
    mean, _ = quad(quantile_fn, 0, 1, limit=400)
    part, _ = quad(quantile_fn, 0, u, limit=400)
    return part / mean


def gini_by_quadrature(quantile_fn):
    mean, _ = quad(quantile_fn, 0, 1, limit=400)
    damped, _ = quad(lambda t: quantile_fn(t) * (1.0 - t), 0, 1, limit=400)
    return 1.0 - 2.0 * damped / mean


class TestKgenLorenz:
    def test_endpoints(self):
        p = KappaGenParams(2.0, 1.0, 0.75)
        assert kgen_lorenz(0.0, p) == 0.0
        assert kgen_lorenz(1.0, p) == 1.0

    def test_exponential_analytic_form(self):
        p = KappaGenParams(1.0, 2.0, 0.0)
        for u in (0.1, 0.5, 0.9):
            want = u + (1.0 - u) * math.log(1.0 - u)
            assert kgen_lorenz(u, p) == pytest.approx(want, abs=1e-12)

    def test_quadrature_oracle(self):
        p = KappaGenParams(2.0, 1.0, 0.75)
        want = lorenz_by_quadrature(lambda t: kgen_quantile(t, p), 0.5)
        assert kgen_lorenz(0.5, p) == pytest.approx(want, abs=1e-8)

    def test_below_diagonal_and_convex(self):
        p = KappaGenParams(1.7, 1.0, 0.4)
        u = np.linspace(0.0, 1.0, 201)
        ell = kgen_lorenz(u, p)
        assert np.all(ell <= u + 1e-12)
        second = ell[2:] - 2 * ell[1:-1] + ell[:-2]
        assert np.all(second >= -1e-10)

    def test_nonexistence(self):
        with pytest.raises(CurveNonexistenceError):
            kgen_lorenz(0.5, KappaGenParams(0.5, 1.0, 0.6))

    def test_domain(self):
        with pytest.raises(DomainError):
            kgen_lorenz(1.5, KappaGenParams(2.0, 1.0, 0.5))


class TestLorenzDominance:
    def test_identical_params_equivalent(self):
        p = KappaGenParams(2.0, 1.0, 0.5)
        q = KappaGenParams(2.0, 3.0, 0.5)  # scale does not matter
        assert lorenz_dominates(p, q) is LorenzOrdering.EQUIVALENT

    def test_clear_dominance_with_grid_check(self):
        p1 = KappaGenParams(3.0, 1.0, 0.3)
        p2 = KappaGenParams(2.0, 1.0, 0.5)
        assert lorenz_dominates(p1, p2) is LorenzOrdering.FIRST_DOMINATES
        u = np.linspace(0.001, 0.999, 1000)
        assert np.all(kgen_lorenz(u, p1) >= kgen_lorenz(u, p2) - 1e-12)

    def test_crossing_with_grid_check(self):
        # alpha1 > alpha2 but alpha1/kappa1 < alpha2/kappa2
        p1 = KappaGenParams(3.0, 1.0, 0.9)
        p2 = KappaGenParams(2.0, 1.0, 0.35)
        assert lorenz_dominates(p1, p2) is LorenzOrdering.CROSSING
        u = np.linspace(0.001, 0.9999, 2000)
        diff = kgen_lorenz(u, p1) - kgen_lorenz(u, p2)
        assert diff.min() < 0 < diff.max()

    def test_nonexistent_curve_rejected(self):
        with pytest.raises(CurveNonexistenceError):
            lorenz_dominates(KappaGenParams(0.5, 1.0, 0.6), KappaGenParams(2.0, 1.0, 0.5))


class TestKgenGini:
    def test_exponential_anchor(self):
        assert kgen_gini(KappaGenParams(1.0, 1.0, 0.0)) == pytest.approx(0.5, abs=1e-12)

    def test_weibull_anchor(self):
        for alpha in (0.8, 1.0, 2.0, 3.0):
            want = 1.0 - 2.0 ** (-1.0 / alpha)
            assert kgen_gini(KappaGenParams(alpha, 1.7, 0.0)) == pytest.approx(want, abs=1e-12)

    def test_quadrature_oracle(self):
        p = KappaGenParams(2.0, 1.0, 0.75)
        want = gini_by_quadrature(lambda t: kgen_quantile(t, p))
        assert kgen_gini(p) == pytest.approx(want, abs=1e-8)

    def test_monotonicity_in_shape_parameters(self):
        kappas = np.linspace(0.1, 0.8, 8)
        ginis = [kgen_gini(KappaGenParams(2.0, 1.0, k)) for k in kappas]
        assert np.all(np.diff(ginis) > 0)
        alphas = np.linspace(1.0, 4.0, 8)
        ginis = [kgen_gini(KappaGenParams(a, 1.0, 0.5)) for a in alphas]
        assert np.all(np.diff(ginis) < 0)

    def test_scale_invariance(self):
        p1 = KappaGenParams(2.0, 1.0, 0.6)
        p2 = KappaGenParams(2.0, 173.2, 0.6)
        assert kgen_gini(p1) == pytest.approx(kgen_gini(p2), abs=1e-10)

    def test_nonexistence(self):
        with pytest.raises(CurveNonexistenceError):
            kgen_gini(KappaGenParams(0.6, 1.0, 0.7))


class TestEntropyIndices:
    def test_mld_exponential_anchor(self):
        assert kgen_mld(KappaGenParams(1.0, 1.0, 0.0)) == pytest.approx(
            EULER_GAMMA, abs=1e-12)

    def test_theil_exponential_anchor(self):
        assert kgen_theil(KappaGenParams(1.0, 1.0, 0.0)) == pytest.approx(
            1.0 - EULER_GAMMA, abs=1e-12)

    def test_mld_quadrature(self):
        from kappagen import kgen_pdf
        p = KappaGenParams(2.0, 1.0, 0.5)
        m = kgen_mean(p)
        want, _ = quad(lambda x: math.log(m / x) * kgen_pdf(x, p), 0, np.inf, limit=400)
        assert kgen_mld(p) == pytest.approx(want, abs=1e-7)

    def test_theil_quadrature(self):
        from kappagen import kgen_pdf
        p = KappaGenParams(2.0, 3.0, 0.75)
        m = kgen_mean(p)
        want, _ = quad(lambda x: (x / m) * math.log(x / m) * kgen_pdf(x, p),
                       0, np.inf, limit=400)
        assert kgen_theil(p) == pytest.approx(want, abs=1e-7)

    def test_ge2_is_half_squared_cv(self):
        p = KappaGenParams(2.0, 1.0, 0.4)
        want = 0.5 * kgen_variance(p) / kgen_mean(p) ** 2
        assert kgen_ge(2.0, p) == pytest.approx(want, rel=1e-10)

    def test_ge_limits_dispatch(self):
        p = KappaGenParams(2.0, 1.0, 0.5)
        assert abs(kgen_ge(1e-6, p) - kgen_mld(p)) <= 1e-4
        assert abs(kgen_ge(1.0 - 1e-6, p) - kgen_theil(p)) <= 1e-4

    def test_ge_continuity_outside_window(self):
        p = KappaGenParams(2.0, 1.0, 0.5)
        assert kgen_ge(1e-4, p) == pytest.approx(kgen_mld(p), abs=1e-3)
        assert kgen_ge(1.0 + 1e-4, p) == pytest.approx(kgen_theil(p), abs=1e-3)

    def test_ge_divergence(self):
        p = KappaGenParams(2.0, 1.0, 0.5)  # tail exponent 4
        with pytest.raises(MomentDivergenceError):
            kgen_ge(5.0, p)

    def test_scale_invariance_of_indices(self):
        p1 = KappaGenParams(1.8, 1.0, 0.55)
        p2 = KappaGenParams(1.8, 42.0, 0.55)
        assert kgen_mld(p1) == pytest.approx(kgen_mld(p2), abs=1e-10)
        assert kgen_theil(p1) == pytest.approx(kgen_theil(p2), abs=1e-10)
        assert kgen_ge(2.0, p1) == pytest.approx(kgen_ge(2.0, p2), abs=1e-10)
        assert kgen_ge(-0.5, p1) == pytest.approx(kgen_ge(-0.5, p2), abs=1e-10)

    def test_report_bundle(self):
        p = KappaGenParams(2.0, 1.0, 0.3)
        rep = kgen_inequality_report(p, thetas=(-1.0, 2.0))
        assert rep.gini == kgen_gini(p)
        assert len(rep.ge_values) == 2
        assert rep.ge_values[0][0] == -1.0


FIG_MIXTURE = NetWealthMixtureParams(
    negative_branch=WeibullParams(0.7, 1.0),
    theta1=0.2, theta2=0.1, theta3=0.7,
    positive_branch=KappaGenParams(2.0, 10.0, 0.75))


def mixture_quantile(t, p):
    """Inverse of the mixture CDF, for quadrature oracles."""
    if t < p.theta1:
        return -p.negative_branch.scale * math.log(p.theta1 / t) ** (
            1.0 / p.negative_branch.shape)
    if t <= p.rho:
        return 0.0
    return float(kgen_quantile((t - p.rho) / (1.0 - p.rho), p.positive_branch))


class TestMixtureLorenz:
    def test_flat_branch_value(self):
        p = FIG_MIXTURE
        m = mixture_mean(p)
        s, lam = p.negative_branch.shape, p.negative_branch.scale
        want = -(lam * p.theta1 / m) * math.gamma(1.0 + 1.0 / s)
        for u in (p.theta1, 0.25, p.rho):
            assert mixture_lorenz(u, p) == pytest.approx(want, rel=1e-12)

    def test_reduction_to_base_lorenz(self):
        kp = KappaGenParams(2.0, 1.0, 0.5)
        p = NetWealthMixtureParams(WeibullParams(1.0, 1.0), 0.0, 0.0, 1.0, kp)
        u = np.linspace(0.0, 1.0, 21)
        np.testing.assert_allclose(mixture_lorenz(u, p), kgen_lorenz(u, kp), atol=1e-12)

    def test_quadrature_oracle_at_half(self):
        p = FIG_MIXTURE
        m = mixture_mean(p)
        part, _ = quad(lambda t: mixture_quantile(t, p), 0, 0.5,
                       points=[p.theta1, p.rho], limit=400)
        assert mixture_lorenz(0.5, p) == pytest.approx(part / m, abs=1e-8)

    def test_endpoints_and_negativity(self):
        p = FIG_MIXTURE
        assert mixture_lorenz(0.0, p) == 0.0
        assert mixture_lorenz(1.0, p) == 1.0
        u = np.linspace(0.01, p.rho, 30)
        assert np.all(mixture_lorenz(u, p) < 0.0)  # m > 0 case

    def test_continuity_across_branches(self):
        p = FIG_MIXTURE
        eps = 1e-9
        assert mixture_lorenz(p.theta1 - eps, p) == pytest.approx(
            mixture_lorenz(p.theta1, p), abs=1e-6)
        assert mixture_lorenz(p.rho + eps, p) == pytest.approx(
            mixture_lorenz(p.rho, p), abs=1e-6)


class TestMixtureGini:
    def test_reduction(self):
        kp = KappaGenParams(2.0, 1.0, 0.5)
        p = NetWealthMixtureParams(WeibullParams(1.0, 1.0), 0.0, 0.0, 1.0, kp)
        assert mixture_gini(p) == pytest.approx(kgen_gini(kp), rel=1e-12)

    def test_numeric_form_agreement(self):
        p = FIG_MIXTURE
        integral, _ = quad(lambda u: mixture_lorenz(u, p), 0, 1,
                           points=[p.theta1, p.rho], limit=400)
        l_th1 = mixture_lorenz(p.theta1, p)
        want = (1.0 - 2.0 * integral) / (1.0 - p.rho * l_th1)
        assert mixture_gini(p) == pytest.approx(want, abs=1e-7)

    def test_negative_mean_reported_with_warning(self):
        p = NetWealthMixtureParams(WeibullParams(0.7, 30.0), 0.2, 0.1, 0.7,
                                   KappaGenParams(2.0, 10.0, 0.75))
        assert mixture_mean(p) < 0.0
        with pytest.warns(RuntimeWarning):
            g = mixture_gini(p)
        assert not 0.0 <= g <= 1.0  # reported, not clamped, no error

    def test_large_nonpositive_share_can_exceed_one(self):
        p = NetWealthMixtureParams(WeibullParams(0.7, 3.0), 0.45, 0.3, 0.25,
                                   KappaGenParams(2.0, 10.0, 0.75))
        g = mixture_gini(p)
        assert g > 1.0


class TestEkg2Lorenz:
    def test_reduction(self):
        alpha, kappa = 2.0, 0.6
        kp = KappaGenParams(alpha, 1.0, kappa)
        e2 = EKG2Params(a=alpha, b=1.0, p=1.0, q=1.0 / (2.0 * kappa))
        u = np.linspace(0.0, 1.0, 21)
        np.testing.assert_allclose(ekg2_lorenz(u, e2), kgen_lorenz(u, kp), atol=1e-10)

    def test_endpoints(self):
        p = EKG2Params(2.0, 1.0, 0.5, 1.0)
        assert ekg2_lorenz(0.0, p) == 0.0
        assert ekg2_lorenz(1.0, p) == 1.0

    def test_quadrature_oracle(self):
        p = EKG2Params(2.0, 1.0, 0.5, 1.0)
        want = lorenz_by_quadrature(lambda t: ekg2_quantile(t, p), 0.5)
        assert ekg2_lorenz(0.5, p) == pytest.approx(want, abs=1e-7)

    def test_nonexistence(self):
        with pytest.raises(CurveNonexistenceError):
            ekg2_lorenz(0.5, EKG2Params(2.0, 1.0, 0.5, 0.25))  # q = 1/(2a)


class TestQuantileFallback:
    def test_uniform_case(self):
        qf = lambda t: np.asarray(t, dtype=float)
        assert quantile_mean(qf) == pytest.approx(0.5, abs=1e-12)
        # L(u) = u^2 for the uniform quantile
        assert quantile_lorenz(0.3, qf, 0.5) == pytest.approx(0.09, abs=1e-10)
        assert quantile_gini(qf) == pytest.approx(1.0 / 3.0, abs=1e-10)

    def test_matches_base_closed_forms(self):
        p = KappaGenParams(2.0, 1.3, 0.6)
        qf = lambda t: kgen_quantile(t, p)
        mean = quantile_mean(qf)
        assert mean == pytest.approx(kgen_mean(p), rel=1e-9)
        for u in (0.2, 0.5, 0.8):
            assert quantile_lorenz(u, qf, mean) == pytest.approx(
                kgen_lorenz(u, p), abs=1e-7)
        assert quantile_gini(qf) == pytest.approx(kgen_gini(p), abs=1e-7)

    def test_divergent_mean_detected(self):
        qf = lambda t: (1.0 - np.asarray(t, dtype=float)) ** (-1.2)
        with pytest.raises(MomentDivergenceError):
            quantile_mean(qf)

    def test_zero_mean_rejected(self):
        with pytest.raises(DegenerateNormalizationError):
            quantile_lorenz(0.5, lambda t: np.asarray(t, dtype=float), 0.0)


class TestEmpirical:
    def test_perfect_equality(self):
        s = WeightedSample(np.full(50, 3.0))
        assert empirical_gini(s) == pytest.approx(0.0, abs=1e-12)
        curve = empirical_lorenz(s)
        np.testing.assert_allclose(curve.interpolate([0.25, 0.5, 0.75]),
                                   [0.25, 0.5, 0.75], atol=1e-12)

    def test_two_unit_hand_value(self):
        s = WeightedSample(np.array([0.0, 1.0]))
        assert empirical_gini(s) == pytest.approx(0.5, abs=1e-12)

    def test_tie_grouping_matches_weight_merging(self):
        a = WeightedSample(np.array([1.0, 1.0, 2.0]), np.array([1.0, 2.0, 1.0]))
        b = WeightedSample(np.array([1.0, 2.0]), np.array([3.0, 1.0]))
        assert empirical_gini(a) == pytest.approx(empirical_gini(b), abs=1e-14)
        np.testing.assert_allclose(empirical_lorenz(a).points,
                                   empirical_lorenz(b).points)

    def test_matches_model_gini_in_large_samples(self):
        p = KappaGenParams(2.0, 1.0, 0.5)
        x = kgen_sample(200000, p, seed=21)
        got = empirical_gini(WeightedSample(x))
        assert got == pytest.approx(kgen_gini(p), abs=0.005)

    def test_degenerate_inputs(self):
        with pytest.raises(DegenerateDataError):
            empirical_lorenz(WeightedSample(np.array([1.0, 2.0]), np.array([0.0, 0.0])))
        with pytest.raises(DegenerateNormalizationError):
            empirical_gini(WeightedSample(np.array([-1.0, 1.0])))


class TestLorenzCurveType:
    def test_validation(self):
        with pytest.raises(DomainError):
            LorenzCurve(np.array([[0.0, 0.0], [0.5, 0.2], [0.9, 0.8]]))
        with pytest.raises(DomainError):
            LorenzCurve(np.array([[0.0, 0.1], [1.0, 1.0]]))

    def test_interpolation(self):
        curve = LorenzCurve(np.array([[0.0, 0.0], [0.5, 0.2], [1.0, 1.0]]))
        assert curve.interpolate(0.25) == pytest.approx(0.1)
