import numpy as np
import pytest

from spillover import irfmatch as im
from spillover.dsge import DsgeParams, solve_model


@pytest.fixture(scope="module")
def model_target():
    """Targets generated by the model itself at a known parameter point."""
    theta = dict(sigma_rstar=0.0020, a22=0.93, kappa=1.8, mu=0.26,
                 sigma_omega=0.25, rho_fx=0.2, theta_rstar=0.8)
    base = DsgeParams()
    solved = solve_model(base.override(**theta))
    irfs = solved.irf_observables("eps_rstar", 11)
    variables = list(im.DEFAULT_VARIABLE_MAP.keys())
    means = np.vstack([irfs[im.DEFAULT_VARIABLE_MAP[v]] for v in variables])
    scale = np.maximum(np.abs(means).max(axis=1, keepdims=True) * 0.1, 1e-4)
    target = im.MatchTarget(tuple(variables), means, np.tile(scale**2, (1, 12)))
    return theta, base, target


class TestQuarterly:
    def test_three_months_average(self):
        assert im.monthly_to_quarterly([1.0, 2.0, 3.0]).tolist() == [2.0]

    def test_constant_series(self):
        out = im.monthly_to_quarterly(np.full(12, 0.7))
        assert np.allclose(out, 0.7)

    def test_ramp_oracle(self):
        out = im.monthly_to_quarterly(np.arange(36.0))
        assert out.tolist() == [1.0 + 3.0 * k for k in range(12)]

    def test_partial_quarter_dropped(self):
        assert im.monthly_to_quarterly(np.arange(7.0)).size == 2

    def test_linearity(self):
        rng = np.random.default_rng(0)
        x, y = rng.standard_normal(36), rng.standard_normal(36)
        assert np.allclose(
            im.monthly_to_quarterly(2 * x + y),
            2 * im.monthly_to_quarterly(x) + im.monthly_to_quarterly(y),
        )


class TestWeights:
    def test_inverse_variance(self):
        target = im.MatchTarget(("a",), np.zeros((1, 3)), np.full((1, 3), 4.0))
        assert np.allclose(im.build_weight(target), 0.25)

    def test_equal_variances_give_sse(self, model_target):
        theta, base, target = model_target
        flat = im.MatchTarget(target.variables, target.means, np.ones_like(target.variances))
        problem = im.EstimationProblem(target=flat, fixed_params=base)
        theta_vec = np.array([theta[n] for n in problem.free_names])
        shifted = theta_vec.copy()
        shifted[2] *= 1.1
        moments = im.model_moments(problem, shifted)
        sse = float(np.sum((moments - flat.means) ** 2))
        assert im.objective(shifted, problem) == pytest.approx(sse, rel=1e-12)

    def test_weighted_sum_oracle(self):
        means = np.array([[0.0, 0.0]])
        variances = np.array([[4.0, 0.25]])
        target = im.MatchTarget(("a",), means, variances)
        # V' Omega V with V = (1, 2): 1/4 + 4*4 = 16.25
        v = np.array([1.0, 2.0])
        w = im.build_weight(target)
        assert float(v @ (w * v)) == pytest.approx(0.25 + 16.0)


class TestObjective:
    def test_zero_at_generating_point(self, model_target):
        theta, base, target = model_target
        problem = im.EstimationProblem(target=target, fixed_params=base)
        theta_vec = np.array([theta[n] for n in problem.free_names])
        assert im.objective(theta_vec, problem) < 1e-12

    def test_positive_away_from_generating_point(self, model_target):
        theta, base, target = model_target
        problem = im.EstimationProblem(target=target, fixed_params=base)
        theta_vec = np.array([theta[n] for n in problem.free_names])
        for k in range(len(theta_vec)):
            bumped = theta_vec.copy()
            bumped[k] *= 1.2
            bumped[k] = np.clip(bumped[k], *problem.bounds[problem.free_names[k]])
            assert im.objective(bumped, problem) > 1e-10

    def test_penalty_outside_bounds(self, model_target):
        _, base, target = model_target
        problem = im.EstimationProblem(target=target, fixed_params=base)
        theta = problem.upper() + 1.0
        assert im.objective(theta, problem) >= im.PENALTY

    def test_penalty_where_model_unsolvable(self, model_target, monkeypatch):
        _, base, target = model_target
        problem = im.EstimationProblem(target=target, fixed_params=base)
        from spillover.dsge import SolutionError

        def boom(*args, **kwargs):
            raise SolutionError("no stable solution")

        monkeypatch.setattr(im, "solve_model", boom)
        theta = 0.5 * (problem.lower() + problem.upper())
        value = im.objective(theta, problem)
        assert np.isfinite(value) and value >= im.PENALTY

    def test_stacking_order_invariance(self, model_target):
        theta, base, target = model_target
        perm = [3, 0, 6, 2, 5, 1, 4]
        permuted = im.MatchTarget(
            tuple(target.variables[i] for i in perm), target.means[perm], target.variances[perm]
        )
        p1 = im.EstimationProblem(target=target, fixed_params=base)
        p2 = im.EstimationProblem(target=permuted, fixed_params=base)
        theta_vec = np.array([theta[n] for n in p1.free_names])
        theta_vec[2] *= 1.05
        assert im.objective(theta_vec, p1) == pytest.approx(im.objective(theta_vec, p2), rel=1e-12)


class TestTargetFromDraws:
    def test_moments_after_quarterly_transform(self):
        rng = np.random.default_rng(1)
        draws = rng.standard_normal((500, 2, 36))
        target = im.target_from_draws(["a", "b"], draws, n_quarters=12)
        quarterly = draws.reshape(500, 2, 12, 3).mean(axis=3)
        assert np.allclose(target.means, quarterly.mean(axis=0))
        assert np.allclose(target.variances, quarterly.var(axis=0, ddof=1))


class TestEstimate:
    def test_deterministic_given_seed(self, model_target):
        theta, base, target = model_target
        problem = im.EstimationProblem(target=target, fixed_params=base)
        a = im.estimate(problem, n_starts=2, seed=4, maxiter=40, polish=False)
        b = im.estimate(problem, n_starts=2, seed=4, maxiter=40, polish=False)
        assert np.array_equal(a.estimates, b.estimates)

    def test_free_name_validation(self, model_target):
        _, base, target = model_target
        with pytest.raises(im.MatchError):
            im.EstimationProblem(target=target, fixed_params=base, free_names=("beta",))
