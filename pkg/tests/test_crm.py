import math

import numpy as np
import pytest
from scipy.optimize import minimize

from airt import (
    AirtFitWarning,
    CrmModel,
    DegenerateItemError,
    FitConfig,
    FitError,
    Item,
    ItemParameters,
    PriorConfig,
    TraitPosterior,
    density,
    e_step,
    fit,
    heatmap_grid,
    latent_trait,
    log_likelihood,
    m_step,
    predict,
)

from conftest import model_data, responses_from_z


def posterior_by_quadrature(z_i, alpha, beta, gamma, mu0, sigma0, nodes=201):
    """Gauss-Hermite mean and variance of the exact trait posterior."""
    t, w = np.polynomial.hermite.hermgauss(nodes)
    theta = mu0 + math.sqrt(2.0) * sigma0 * t
    ll = -0.5 * np.sum(
        alpha[None, :] ** 2
        * (theta[:, None] - beta[None, :] - gamma[None, :] * z_i[None, :]) ** 2,
        axis=1,
    )
    ll -= ll.max()
    weight = w * np.exp(ll)
    total = weight.sum()
    mean = (weight * theta).sum() / total
    var = (weight * theta**2).sum() / total - mean**2
    return mean, var


def random_signed_items(rng, n):
    signs = rng.choice([-1.0, 1.0], n)
    alpha = signs * rng.uniform(0.4, 2.2, n)
    gamma = signs * rng.uniform(0.4, 2.2, n)
    beta = rng.uniform(-1.5, 1.5, n)
    return alpha, beta, gamma


class TestEStep:
    def test_single_item_posterior_variance(self):
        z = responses_from_z(np.array([[0.0], [1.0]]))
        params = ItemParameters([1.0], [0.0], [1.0], names=("a0",))
        post = e_step(z, params, PriorConfig(0.0, 1.0))
        assert post.sigma2 == pytest.approx(0.5)

    def test_single_item_posterior_mean(self):
        z = responses_from_z(np.array([[2.0]]))
        params = ItemParameters([1.0], [0.0], [1.0], names=("a0",))
        post = e_step(z, params, PriorConfig(0.0, 1.0))
        assert post.mu[0] == pytest.approx(1.0)

    def test_matches_quadrature_with_mixed_signs(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 6))
            alpha, beta, gamma = random_signed_items(rng, n)
            z_i = rng.normal(0.0, 2.0, n)
            mu0 = float(rng.uniform(-1.0, 1.0))
            params = ItemParameters(alpha, beta, gamma)
            post = e_step(responses_from_z(z_i[None, :]), params,
                          PriorConfig(mu0, 1.0))
            mean, var = posterior_by_quadrature(z_i, alpha, beta, gamma, mu0, 1.0)
            assert post.mu[0] == pytest.approx(mean, abs=1e-6)
            assert post.sigma2 == pytest.approx(var, abs=1e-6)

    def test_posterior_no_more_diffuse_than_prior(self, rng):
        alpha, beta, gamma = random_signed_items(rng, 4)
        params = ItemParameters(alpha, beta, gamma)
        prior = PriorConfig(0.0, 1.0)
        post = e_step(responses_from_z(rng.normal(0, 1, (10, 4))), params, prior)
        assert post.sigma2 <= prior.sigma**2


def expected_loglik(flat_params, z, mu, sigma2):
    n = z.shape[1]
    N = z.shape[0]
    a, b, g = flat_params[:n], flat_params[n:2 * n], flat_params[2 * n:]
    resid = b[None, :] + g[None, :] * z - mu[:, None]
    return (N * np.sum(np.log(np.abs(a)) + np.log(np.abs(g)))
            - 0.5 * np.sum(a**2 * (resid**2 + sigma2)))


class TestMStep:
    def test_negative_covariance_propagates_sign(self, rng):
        # one column increasing with the trait proxy, one decreasing
        mu = np.linspace(-2, 2, 40)
        z = np.column_stack([mu + rng.normal(0, 0.1, 40),
                             -mu + rng.normal(0, 0.1, 40)])
        post = TraitPosterior(mu=mu, sigma2=0.1)
        params = m_step(responses_from_z(z), post)
        assert params.gamma[0] > 0 and params.alpha[0] > 0
        assert params.gamma[1] < 0 and params.alpha[1] < 0
        assert np.all(np.sign(params.alpha) == np.sign(params.gamma))

    def test_matches_numerical_maximiser(self, rng):
        for _ in range(8):
            N, n = 40, 2
            z = rng.normal(0.0, 1.5, (N, n))
            mu = rng.normal(0.0, 1.0, N)
            sigma2 = float(rng.uniform(0.05, 0.5))
            post = TraitPosterior(mu=mu, sigma2=sigma2)
            params = m_step(responses_from_z(z), post)
            closed = np.concatenate([params.alpha, params.beta, params.gamma])
            res = minimize(
                lambda p: -expected_loglik(p, z, mu, sigma2),
                closed * 1.2 + 0.03,
                method="Nelder-Mead",
                options={"maxiter": 40000, "xatol": 1e-10, "fatol": 1e-12},
            )
            assert expected_loglik(closed, z, mu, sigma2) >= -res.fun - 1e-4

    def test_single_coordinate_perturbations_never_improve(self, rng):
        N, n = 30, 3
        z = rng.normal(0.0, 1.2, (N, n))
        mu = rng.normal(0.0, 1.0, N)
        post = TraitPosterior(mu=mu, sigma2=0.2)
        params = m_step(responses_from_z(z), post)
        closed = np.concatenate([params.alpha, params.beta, params.gamma])
        base = expected_loglik(closed, z, mu, 0.2)
        for idx in range(closed.size):
            for delta in (1e-3, -1e-3):
                nudged = closed.copy()
                nudged[idx] += delta
                assert expected_loglik(nudged, z, mu, 0.2) <= base + 1e-9

    def test_zero_variance_item_raises_with_name(self):
        z = np.column_stack([np.full(10, 0.3), np.linspace(-1, 1, 10)])
        post = TraitPosterior(mu=np.linspace(-1, 1, 10), sigma2=0.5)
        with pytest.raises(DegenerateItemError, match="a0") as err:
            m_step(responses_from_z(z), post)
        assert "a0" in err.value.algorithms

    def test_radicand_floor_warns(self):
        # two perfectly correlated columns make the residual spread vanish,
        # pushing the radicand to zero before flooring
        mu = np.linspace(-1.5, 1.5, 20)
        z = np.column_stack([mu, 2.0 * mu])
        post = TraitPosterior(mu=mu, sigma2=1e-12)
        with pytest.warns(AirtFitWarning, match="floored"):
            params = m_step(responses_from_z(z), post, radicand_floor=1e-6)
        assert np.all(np.abs(params.alpha) <= 1e-6**-0.5 + 1e-9)
        assert np.all(np.sign(params.alpha) == np.sign(params.gamma))


class TestLogLikelihood:
    def test_unit_magnitudes_zero_first_term(self):
        z = responses_from_z(np.zeros((3, 2)) + [[0.1, -0.2]] * 3)
        params = ItemParameters([1.0, -1.0], [0.0, 0.0], [1.0, -1.0])
        post = TraitPosterior(mu=np.zeros(3), sigma2=0.5)
        value = log_likelihood(z, params, post)
        resid = params.beta + params.gamma * z.z - 0.0
        expected = -0.5 * np.sum(params.alpha**2 * (resid**2 + 0.5))
        assert value == pytest.approx(expected)

    def test_larger_sigma2_decreases_value(self, rng):
        z = responses_from_z(rng.normal(0, 1, (5, 3)))
        params = ItemParameters(*random_signed_items(rng, 3))
        lo = log_likelihood(z, params, TraitPosterior(np.zeros(5), 0.3))
        hi = log_likelihood(z, params, TraitPosterior(np.zeros(5), 0.6))
        assert hi < lo

    def test_independent_formula(self, rng):
        for _ in range(10):
            N, n = int(rng.integers(2, 12)), int(rng.integers(2, 5))
            z = rng.normal(0, 1.5, (N, n))
            alpha, beta, gamma = random_signed_items(rng, n)
            mu = rng.normal(0, 1, N)
            sigma2 = float(rng.uniform(0.05, 1.0))
            params = ItemParameters(alpha, beta, gamma)
            post = TraitPosterior(mu=mu, sigma2=sigma2)
            ours = log_likelihood(responses_from_z(z), params, post)
            # plain-loop second implementation
            ref = 0.0
            for j in range(n):
                ref += N * (math.log(abs(alpha[j])) + math.log(abs(gamma[j])))
            for i in range(N):
                for j in range(n):
                    ref -= 0.5 * alpha[j] ** 2 * (
                        (beta[j] + gamma[j] * z[i, j] - mu[i]) ** 2 + sigma2
                    )
            assert ours == pytest.approx(ref, rel=1e-12)


class TestFit:
    def test_synthetic_recovery(self):
        data = model_data(
            200, 8,
            alpha=[1.5, 0.8, -0.9, 2.0, 0.8, 1.2, -0.7, 1.0],
            beta=[0.5, -1.0, 1.2, 0.0, 2.0, -0.5, 0.8, 1.5],
            gamma=[1.5, 1.2, -0.8, 2.5, 1.5, 1.0, -0.9, 1.8],
            seed=42,
        )
        model = fit(responses_from_z(data["z"]))
        assert model.converged
        assert np.all(np.sign(model.params.alpha) == np.sign(data["alpha"]))
        corr = np.corrcoef(model.params.alpha, data["alpha"])[0, 1]
        assert corr > 0.95

    def test_flipped_column_flagged_negative(self, rng):
        data = model_data(150, 5, alpha=[1.2, 0.9, 1.5, 0.7, 1.1],
                          beta=[0.3, -0.5, 0.8, 0.0, 1.0],
                          gamma=[1.5, 1.2, 2.0, 0.8, 1.4], seed=11)
        z = data["z"].copy()
        order = np.argsort(data["theta"])
        flipped = z[:, 3].copy()
        flipped[order] = flipped[order][::-1]
        z[:, 3] = flipped
        model = fit(responses_from_z(z))
        assert model.converged
        assert model.params.alpha[3] < 0
        assert np.all(model.params.alpha[[0, 1, 2, 4]] > 0)

    def test_trace_monotone_on_scenario_fixture(self, tmp_path):
        from conftest import structured_matrix
        from airt import transform_performance

        for seed in (1, 2, 3):
            m = structured_matrix(N=60, n=4, seed=seed, maximize=False)
            model = fit(transform_performance(m))
            diffs = np.diff(model.loglik_trace)
            assert np.all(diffs >= -1e-8)

    def test_degenerate_item_excluded_and_reported(self):
        data = model_data(80, 3, alpha=[1.0, 1.4, 0.9], beta=[0.0, 0.5, -0.3],
                          gamma=[1.2, 1.8, 1.0], seed=5)
        z = data["z"].copy()
        z[:, 1] = 0.42  # constant responses
        model = fit(responses_from_z(z))
        assert model.degenerate == ("a1",)
        assert math.isnan(model.params.alpha[1])
        assert any("degenerate" in w for w in model.warnings)
        assert np.isfinite(model.theta).all()

    def test_all_degenerate_is_fit_error(self):
        z = np.tile([[0.2, -0.1]], (10, 1))
        with pytest.raises(FitError):
            fit(responses_from_z(z))

    def test_deterministic_trajectories(self):
        data = model_data(50, 4, alpha=[1.0, 1.2, 0.8, 1.5],
                          beta=[0.0, 0.4, -0.2, 0.9],
                          gamma=[1.0, 1.3, 0.9, 1.6], seed=9)
        a = fit(responses_from_z(data["z"]))
        b = fit(responses_from_z(data["z"]))
        assert a.loglik_trace == b.loglik_trace
        np.testing.assert_array_equal(a.params.alpha, b.params.alpha)
        np.testing.assert_array_equal(a.theta, b.theta)

    def test_perturbed_start_converges_to_same_ranking(self):
        data = model_data(120, 5, alpha=[1.3, 0.7, 1.9, 1.0, 0.5],
                          beta=[0.2, -0.6, 1.0, 0.0, 1.4],
                          gamma=[1.4, 1.0, 2.1, 1.2, 0.8], seed=21)
        z = responses_from_z(data["z"])
        base = fit(z)
        rng = np.random.default_rng(0)
        mu0 = base.posterior.mu + rng.normal(0, 0.25, base.posterior.mu.size)
        shifted = fit(z, initial_mu=mu0)
        tau = _kendall_tau(np.argsort(np.argsort(base.params.alpha)),
                           np.argsort(np.argsort(shifted.params.alpha)))
        assert tau >= 0.9

    def test_respects_max_cycles(self):
        data = model_data(40, 3, alpha=[1.0, 1.1, 0.9], beta=[0, 0.2, -0.1],
                          gamma=[1.0, 1.2, 0.8], seed=2)
        model = fit(responses_from_z(data["z"]), cfg=FitConfig(max_cycles=3))
        assert model.cycles_used <= 3
        assert len(model.loglik_trace) <= 3

    def test_non_finite_objective_reports_cycle(self):
        from airt import NumericalError

        z = np.array([[0.4, np.nan], [0.1, 0.7], [-0.3, 0.2]])
        with pytest.raises(NumericalError, match="cycle 1"):
            fit(responses_from_z(z))


def _kendall_tau(a, b):
    from scipy.stats import kendalltau

    return kendalltau(a, b).statistic


class TestDensity:
    def test_standard_normal_peak(self):
        item = Item(1.0, 0.5, 1.0)
        assert density(0.0, 0.5, item) == pytest.approx(1 / math.sqrt(2 * math.pi))

    def test_mode_at_gaussian_centre(self):
        item = Item(1.3, 0.4, 1.7)
        theta = 1.1
        z_grid = np.linspace(-5, 5, 20001)
        dens = density(z_grid, theta, item)
        assert z_grid[np.argmax(dens)] == pytest.approx((theta - 0.4) / 1.7,
                                                        abs=1e-3)

    def test_integral_one_for_reported_parameters(self):
        # parameters of the scale observed in a constraint-solving portfolio
        item = Item(1.73, 1.16, 2.72)
        z_grid = np.linspace(-30, 30, 400001)
        for theta in (-1.0, 0.0, 1.5):
            dens = density(z_grid, theta, item)
            assert np.trapezoid(dens, z_grid) == pytest.approx(1.0, abs=1e-3)

    def test_negative_pair_is_positive_density(self):
        item = Item(-1.2, 0.3, -0.9)
        assert density(0.7, -0.1, item) > 0


class TestHeatmapGrid:
    def test_single_cell(self):
        item = Item(1.0, 0.0, 1.0)
        grid = heatmap_grid(item, [0.3], [0.1])
        assert grid.shape == (1, 1)
        assert grid[0, 0] == pytest.approx(density(0.3, 0.1, item))

    def test_ridge_traces_line(self):
        item = Item(1.4, 0.5, 1.2)
        z_grid = np.linspace(-2, 2, 41)
        theta_grid = np.linspace(-3, 3, 1201)
        surface = heatmap_grid(item, z_grid, theta_grid)
        ridge = theta_grid[np.argmax(surface, axis=1)]
        np.testing.assert_allclose(ridge, 0.5 + 1.2 * z_grid, atol=0.01)

    def test_sharper_for_larger_alpha(self):
        z_grid = np.linspace(-2, 2, 21)
        theta_grid = np.linspace(-4, 4, 801)
        widths = []
        for alpha in (0.6, 1.8):
            surface = heatmap_grid(Item(alpha, 0.0, 1.0), z_grid, theta_grid)
            col = surface[10] / surface[10].sum()
            centre = (col * theta_grid).sum()
            widths.append(((col * (theta_grid - centre) ** 2).sum()) ** 0.5)
        assert widths[1] < widths[0]

    def test_rejects_unsorted_grid(self):
        with pytest.raises(Exception):
            heatmap_grid(Item(1, 0, 1), [0.2, 0.1], [0.0])

    def test_ridge_order_for_observed_solver_parameters(self):
        # two parameter sets of the scale seen in constraint-solver
        # portfolios: the higher-difficulty item keeps its ridge at larger
        # trait values over the common response range
        shifted = Item(0.65, 2.6, 1.65)
        baseline = Item(1.14, 1.15, 2.49)
        z_grid = np.linspace(-2.0, 1.0, 31)
        theta_grid = np.linspace(-6, 10, 3201)
        for item, other in ((shifted, baseline),):
            ridge_a = theta_grid[np.argmax(heatmap_grid(item, z_grid,
                                                        theta_grid), axis=1)]
            ridge_b = theta_grid[np.argmax(heatmap_grid(other, z_grid,
                                                        theta_grid), axis=1)]
            assert np.all(ridge_a > ridge_b)


class TestLatentTrait:
    def test_single_item_reduces_to_location(self):
        z = responses_from_z(np.array([[0.5], [-0.2]]))
        params = ItemParameters([1.7], [0.3], [1.1])
        theta = latent_trait(z, params)
        np.testing.assert_allclose(theta, 0.3 + 1.1 * z.z[:, 0])

    def test_identical_items_match_single(self):
        z_col = np.array([[0.4], [-0.6], [1.0]])
        z3 = responses_from_z(np.repeat(z_col, 3, axis=1))
        single = latent_trait(responses_from_z(z_col),
                              ItemParameters([0.9], [0.1], [1.3]))
        triple = latent_trait(z3, ItemParameters([0.9] * 3, [0.1] * 3, [1.3] * 3))
        np.testing.assert_allclose(triple, single)

    def test_flat_prior_limit_of_posterior_mean(self, rng):
        alpha, beta, gamma = random_signed_items(rng, 5)
        params = ItemParameters(alpha, beta, gamma)
        z = responses_from_z(rng.normal(0, 1.5, (12, 5)))
        post = e_step(z, params, PriorConfig(mu=0.7, sigma=1e8))
        np.testing.assert_allclose(latent_trait(z, params), post.mu, atol=1e-8)


class TestPredict:
    def test_midpoint_at_difficulty(self):
        assert predict(0.7, Item(2.0, 0.7, 1.5), k=1.0) == pytest.approx(0.5)
        assert predict(0.7, Item(2.0, 0.7, 1.5), k=4.0) == pytest.approx(2.0)

    def test_logistic_limit(self):
        assert predict(60.0, Item(1.0, 0.0, 1.0), k=1.0) == pytest.approx(1.0)
        assert predict(-60.0, Item(1.0, 0.0, 1.0), k=1.0) == pytest.approx(0.0)

    def test_mode_matches_grid_argmax(self, rng):
        for _ in range(10):
            sign = rng.choice([-1.0, 1.0])
            item = Item(sign * rng.uniform(0.5, 2.0), rng.uniform(-1, 1),
                        sign * rng.uniform(0.5, 2.0))
            theta = float(rng.uniform(-2, 2))
            z_grid = np.linspace(-8, 8, 160001)
            dens = density(z_grid, theta, item)
            z_star = (theta - item.beta) / item.gamma
            assert z_grid[np.argmax(dens)] == pytest.approx(z_star, abs=1e-4)


class TestSerialization:
    def test_round_trip_lossless(self):
        data = model_data(60, 4, alpha=[1.0, -0.8, 1.4, 0.9],
                          beta=[0.0, 0.5, -0.4, 1.0],
                          gamma=[1.1, -1.0, 1.6, 0.9], seed=33)
        z = data["z"].copy()
        z[:, 2] = -0.25  # force one degenerate item through the sentinel path
        model = fit(responses_from_z(z))
        restored = CrmModel.from_json(model.to_json())
        np.testing.assert_array_equal(model.params.alpha, restored.params.alpha)
        np.testing.assert_array_equal(model.params.beta, restored.params.beta)
        np.testing.assert_array_equal(model.params.gamma, restored.params.gamma)
        np.testing.assert_array_equal(model.theta, restored.theta)
        np.testing.assert_array_equal(model.posterior.mu, restored.posterior.mu)
        assert model.loglik_trace == restored.loglik_trace
        assert model.converged == restored.converged
        assert model.warnings == restored.warnings
        assert model.params.names == restored.params.names
        assert restored.to_json() == model.to_json()
