import math

import numpy as np
import pytest
from scipy.integrate import dblquad
from scipy.stats import kendalltau, kstest

from maxzonoid import (
    MaxStableModel,
    MaxZonoid,
    AnalyticNorm,
    cdf,
    copula,
    exponent_density,
    make_family,
    max_stability_check,
    pickands,
    quantile_curve,
    simulate,
    support_function,
    unit_cross_polytope,
    unit_cube,
)

from conftest import random_model


@pytest.fixture(scope="module")
def models():
    return {
        "ind": MaxStableModel(unit_cube(2)),
        "dep": MaxStableModel(unit_cross_polytope(2)),
        "log2": MaxStableModel(make_family("logistic", 2, p=2.0)),
        "mo": MaxStableModel(make_family("marshall_olkin", 2, alpha1=0.5, alpha2=0.5)),
    }


class TestCdf:
    def test_reference_values(self, models):
        assert cdf(models["ind"], [1, 1]) == pytest.approx(math.exp(-2))
        assert cdf(models["dep"], [1, 1]) == pytest.approx(math.exp(-1))
        assert cdf(models["log2"], [1, 1]) == pytest.approx(math.exp(-math.sqrt(2)))

    def test_zero_coordinate(self, models):
        assert cdf(models["log2"], [0.0, 1.0]) == 0.0

    def test_marginalization_via_inf(self, models):
        assert cdf(models["log2"], [2.0, np.inf]) == pytest.approx(math.exp(-0.5))

    def test_subvector_law_is_projection(self, rng):
        from maxzonoid import project

        model = random_model(rng, d=3, m=5)
        sub = MaxStableModel(project(model.K, [0, 2]))
        x = rng.random(2) + 0.3
        padded = np.array([x[0], np.inf, x[1]])
        assert cdf(model, padded) == pytest.approx(cdf(sub, x), rel=1e-12)

    def test_negative_rejected(self, models):
        with pytest.raises(ValueError, match="orthant"):
            cdf(models["ind"], [-1.0, 1.0])

    def test_unit_frechet_marginals(self, rng, models):
        xs = rng.random(8) * 3 + 0.1
        for model in models.values():
            for i in range(2):
                pts = np.full((8, 2), np.inf)
                pts[:, i] = xs
                np.testing.assert_allclose(
                    cdf(model, pts), np.exp(-1.0 / xs), rtol=1e-12
                )

    def test_monotone(self, rng, models):
        x = rng.random(2) + 0.2
        for model in models.values():
            assert cdf(model, x + 0.5) >= cdf(model, x)


class TestCopula:
    def test_independence_product(self, rng):
        u = rng.random(2)
        assert copula(MaxStableModel(unit_cube(2)), u) == pytest.approx(u.prod())

    def test_dependence_min(self, rng):
        u = rng.random(2)
        assert copula(MaxStableModel(unit_cross_polytope(2)), u) == pytest.approx(
            u.min()
        )

    def test_uniform_marginals(self, rng, models):
        us = rng.random(10)
        for model in models.values():
            np.testing.assert_allclose(
                copula(model, np.column_stack([us, np.ones(10)])), us, atol=1e-12
            )

    def test_consistency_with_cdf(self, rng, models):
        x = rng.random(2) + 0.3
        for model in models.values():
            u = np.exp(-1.0 / x)
            assert copula(model, u) == pytest.approx(cdf(model, x), rel=1e-12)

    def test_range_validation(self, models):
        with pytest.raises(ValueError, match="0, 1"):
            copula(models["ind"], [0.5, 1.2])


class TestPickands:
    def test_endpoint_values(self, models):
        for model in models.values():
            assert pickands(model, 0.0) == pytest.approx(1.0)
            assert pickands(model, 1.0) == pytest.approx(1.0)

    def test_reference_values(self, models):
        assert pickands(models["ind"], 0.5) == pytest.approx(1.0)
        assert pickands(models["dep"], 0.5) == pytest.approx(0.5)
        assert pickands(models["log2"], 0.5) == pytest.approx(1 / math.sqrt(2))

    def test_bounds_and_convexity(self, rng, models):
        t = np.linspace(0.0, 1.0, 101)
        for model in models.values():
            A = pickands(model, t)
            assert np.all(A <= 1.0 + 1e-12)
            assert np.all(A >= np.maximum(t, 1 - t) - 1e-12)
            second = A[:-2] - 2 * A[1:-1] + A[2:]
            assert second.min() >= -1e-9

    def test_trivariate(self):
        model = MaxStableModel(make_family("logistic", 3, p=2.0))
        val = pickands(model, [1 / 3, 1 / 3])
        assert val == pytest.approx(np.sqrt(3 * (1 / 3) ** 2), rel=1e-12)

    def test_outside_simplex_rejected(self, models):
        with pytest.raises(ValueError, match="simplex"):
            pickands(models["ind"], 1.5)


class TestQuantileCurve:
    def test_defining_property(self, models):
        for model in models.values():
            for alpha in (0.1, math.exp(-1), 0.9):
                pts = quantile_curve(model, alpha, points_n=64)
                np.testing.assert_allclose(cdf(model, pts), alpha, atol=1e-9)

    def test_independence_passes_through_ones(self, models):
        pts = quantile_curve(models["ind"], math.exp(-2), points_n=4097)
        gap = np.abs(pts - 1.0).sum(axis=1).min()
        assert gap < 1e-3

    def test_dependence_corner(self, models):
        pts = quantile_curve(models["dep"], math.exp(-1), points_n=4097)
        assert np.abs(pts - 1.0).sum(axis=1).min() < 1e-3

    def test_alpha_validation(self, models):
        with pytest.raises(ValueError, match="alpha"):
            quantile_curve(models["ind"], 1.0)


class TestSimulate:
    def test_complete_dependence_coordinates_equal(self):
        model = MaxStableModel(unit_cross_polytope(3))
        s = simulate(model, 500, seed=3)
        assert np.abs(s.values - s.values[:, [0]]).max() < 1e-12

    def test_determinism(self, models):
        a = simulate(models["mo"], 300, seed=11).values
        b = simulate(models["mo"], 300, seed=11).values
        assert np.array_equal(a, b)

    def test_independence_kendall_tau_near_zero(self):
        s = simulate(MaxStableModel(unit_cube(2)), 100_000, seed=5)
        tau = kendalltau(s.values[:, 0], s.values[:, 1]).statistic
        assert abs(tau) < 0.02

    def test_needs_discrete_form(self):
        model = MaxStableModel(make_family("logistic", 2, p=2.0))
        with pytest.raises(ValueError, match="discretize"):
            simulate(model, 10, seed=0)
        assert model.with_discrete(64).discrete is not None

    def test_marginal_ks(self, rng):
        model = random_model(rng, d=2, m=4)
        s = simulate(model, 20_000, seed=17)
        for i in range(2):
            p = kstest(s.values[:, i], lambda x: np.exp(-1.0 / x)).pvalue
            assert p > 0.01

    def test_law_matches_cdf(self, rng):
        model = random_model(rng, d=2, m=3)
        n = 40_000
        s = simulate(model, n, seed=23)
        pts = rng.random((25, 2)) * 2.5 + 0.2
        F = cdf(model, pts)
        emp = (s.values[:, None, :] <= pts[None, :, :]).all(axis=2).mean(axis=0)
        tol = 3 * np.sqrt(F * (1 - F) / n)
        assert np.all(np.abs(emp - F) <= tol + 1e-12)


class TestExponentDensity:
    def test_discrete_model_directed_to_atoms(self):
        model = MaxStableModel(unit_cube(2))
        with pytest.raises(ValueError, match="atoms"):
            exponent_density(model, [1.0, 1.0])

    def test_analytic_independence_density_vanishes(self, rng):
        K = MaxZonoid(
            d=2, norm=AnalyticNorm("sum", 2, lambda X: X.sum(axis=1))
        )
        for _ in range(5):
            z = rng.random(2) * 3 + 0.2
            assert abs(exponent_density(K, z)) <= 1e-6

    def test_logistic_symbolic_oracle(self):
        model = MaxStableModel(make_family("logistic", 2, p=2.0))
        # d2/dx1dx2 of hypot = -x1 x2 r^-3; density at z: -(that)(z*) * prod z^-2
        for z in ([1.0, 1.0], [0.5, 2.0], [1.7, 0.9]):
            z = np.asarray(z)
            zs = 1.0 / z
            r = np.hypot(*zs)
            oracle = (zs[0] * zs[1] / r**3) * (zs[0] ** 2 * zs[1] ** 2)
            val = exponent_density(model, z)
            assert val == pytest.approx(oracle, rel=1e-6)

    def test_nonnegative_for_families(self, rng):
        fams = [
            make_family("logistic", 2, p=1.7),
            make_family("husler_reiss", 2, lam=0.9),
            make_family("neg_logistic", 2, lam=0.5, p=-2.0),
        ]
        for K in fams:
            for _ in range(5):
                z = rng.random(2) * 2 + 0.3
                assert exponent_density(MaxStableModel(K), z) >= -1e-6

    def test_box_mass_inclusion_exclusion(self):
        model = MaxStableModel(make_family("logistic", 2, p=2.0))

        def nu(x1, x2):
            return support_function(model.K, [1.0 / x1, 1.0 / x2])

        boxes = [(1.0, 2.0, 1.0, 2.0), (0.5, 1.5, 2.0, 3.0)]
        for a1, b1, a2, b2 in boxes:
            target = nu(b1, a2) + nu(a1, b2) - nu(b1, b2) - nu(a1, a2)
            # the integrand carries ~1e-8 finite-difference noise
            val, err = dblquad(
                lambda z2, z1: exponent_density(model, [z1, z2]),
                a1,
                b1,
                a2,
                b2,
                epsabs=1e-8,
            )
            assert val == pytest.approx(target, abs=1e-6)

    def test_trivariate_logistic(self):
        model = MaxStableModel(make_family("logistic", 3, p=2.0))
        # mixed third derivative of the l2 norm: 3 x1 x2 x3 r^-5
        z = np.array([1.0, 1.0, 1.0])
        zs = 1.0 / z
        r = np.sqrt((zs**2).sum())
        oracle = 3 * zs.prod() / r**5 * np.prod(zs**2)
        assert exponent_density(model, z) == pytest.approx(oracle, rel=1e-5)


class TestMaxStability:
    def test_identity_for_models(self, rng, models):
        zoo = list(models.values()) + [random_model(rng, 3, 4)]
        for model in zoo:
            for n in (2, 5):
                assert max_stability_check(model, n) < 1e-12

    def test_detector_flags_corruption(self):
        bad = MaxZonoid(
            d=2,
            norm=AnalyticNorm(
                "corrupt", 2, lambda X: np.hypot(X[:, 0], X[:, 1]) + 0.1
            ),
        )
        assert max_stability_check(bad, 5) > 0.01

    def test_nfold_validation(self, models):
        with pytest.raises(ValueError, match="n_fold"):
            max_stability_check(models["ind"], 1)
