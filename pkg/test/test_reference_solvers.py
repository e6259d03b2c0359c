__author__ = 'drsim developers'

import pytest
import numpy as np
import numpy.testing as npt
from scipy.optimize import minimize

from drsim.Pricing import algorithms, objective, reference_solvers
from drsim.Pricing.algorithms import PrimalDualPoint
from drsim.Scenarios.scenarios import build_single_node_scenario, build_static_scenario
from drsim.exceptions import InfeasibleProblemError, DualCapError, ConfigurationError


class TestLCQP(object):

    def setup_method(self):
        self.problem = build_single_node_scenario().problem_at(0)

    def test_single_node(self):
        x, certificate = reference_solvers.solve_lcqp(*self.problem)
        npt.assert_almost_equal(x, [0.5], decimal=8)
        npt.assert_almost_equal(certificate.multiplier, 2.5, decimal=6)
        assert certificate.passed()

    def test_inactive(self):
        problem = build_single_node_scenario(overrides={'p_ref': 2.5}).problem_at(0)
        x, certificate = reference_solvers.solve_lcqp(*problem)
        npt.assert_almost_equal(x, [1. / 7], decimal=12)
        assert certificate.multiplier == 0.
        assert certificate.passed()

    def test_infeasible(self):
        problem = build_single_node_scenario(overrides={'x_max': 0.2}).problem_at(0)
        with pytest.raises(InfeasibleProblemError) as excinfo:
            reference_solvers.solve_lcqp(*problem)
        npt.assert_almost_equal(excinfo.value.max_achievable, 0.2, decimal=14)

    def test_grid(self):
        feeder, response, tariff, target, params = build_static_scenario([1., 2.], master_seed=3).problem_at(0)
        x_star, certificate = reference_solvers.solve_lcqp(feeder, response, tariff, target, params)
        assert certificate.passed()
        lo, hi = tariff.bounds(2)
        axes = [np.linspace(lo[i], hi[i], int(np.ceil((hi[i] - lo[i]) / 1e-3)) + 1) for i in range(2)]
        g1, g2 = np.meshgrid(*axes)
        beta, slope = response.beta, feeder.s * response.beta
        drift = beta * (tariff.pi - tariff.pi0 * feeder.s) - feeder.d_pre

        def cost(x1, x2):
            return (beta[0] + params.kappa / 2.) * x1**2 + (beta[1] + params.kappa / 2.) * x2**2 \
                + drift[0] * x1 + drift[1] * x2

        values = cost(g1, g2)
        grid_min = np.min(values[slope[0] * g1 + slope[1] * g2 >= target.p0_tilde])
        assert cost(x_star[0], x_star[1]) <= grid_min + 1e-5
        assert slope.dot(x_star) >= target.p0_tilde - 1e-9

    def test_against_slsqp(self):
        feeder, response, tariff, target, params = build_static_scenario([1., 0.5, 2.], master_seed=8).problem_at(0)
        x_star, certificate = reference_solvers.solve_lcqp(feeder, response, tariff, target, params)
        lo, hi = tariff.bounds(3)
        result = minimize(lambda x: objective.expected_operational_cost(x, feeder, response, tariff, params),
                          x0=0.5 * (lo + hi), method='SLSQP', bounds=list(zip(lo, hi)),
                          constraints=[{'type': 'ineq',
                                        'fun': lambda x: feeder.s.dot(response.beta * x) - target.p0_tilde}],
                          options={'ftol': 1e-12, 'maxiter': 500})
        npt.assert_allclose(result.x, x_star, atol=1e-4)


class TestSaddlePoint(object):

    def setup_method(self):
        self.problem = build_single_node_scenario().problem_at(0)
        self.feeder, self.response, self.tariff, self.target, self.params = self.problem

    def test_single_node(self):
        z = reference_solvers.regularized_saddle_point(*self.problem)
        npt.assert_almost_equal(z.lam, 2.3364, decimal=3)
        npt.assert_almost_equal(z.x, [0.4766], decimal=3)
        npt.assert_almost_equal(objective.expected_regulation_error(z.x, self.feeder, self.response, self.target),
                                self.params.eta * z.lam, decimal=10)
        assert reference_solvers.verify_fixed_point(z, *self.problem, eps=0.1) <= 1e-9

    def test_regularization_gap(self):
        x_lcqp, certificate = reference_solvers.solve_lcqp(*self.problem)
        distances = []
        for eta in (0.1, 0.01, 0.001):
            params = self.params._replace(eta=eta)
            z = reference_solvers.regularized_saddle_point(self.feeder, self.response, self.tariff, self.target,
                                                           params)
            distances.append(np.linalg.norm(z.x - x_lcqp))
        assert distances[0] > distances[1] > distances[2]
        assert distances[2] < 3e-3

    def test_inactive_constraint(self):
        problem = build_single_node_scenario(overrides={'p_ref': 2.5}).problem_at(0)
        z = reference_solvers.regularized_saddle_point(*problem)
        x_lcqp, certificate = reference_solvers.solve_lcqp(*problem)
        assert z.lam == 0.
        npt.assert_almost_equal(z.x, x_lcqp, decimal=12)

    def test_dual_cap(self):
        params = self.params._replace(lambda_cap=2.)
        with pytest.raises(DualCapError) as excinfo:
            reference_solvers.regularized_saddle_point(self.feeder, self.response, self.tariff, self.target, params)
        assert excinfo.value.lambda_cap == 2.

    def test_saddle_inequalities(self):
        z = reference_solvers.regularized_saddle_point(*self.problem)
        rng = np.random.default_rng(2)

        def value(x, lam):
            return objective.reg_lagrangian(x, lam, self.feeder, self.response, self.tariff, self.target,
                                            self.params)
        center = value(z.x, z.lam)
        for i in range(50):
            assert value(z.x, rng.uniform(0., self.params.lambda_cap)) <= center + 1e-9
            assert value(rng.uniform(0., 1., 1), z.lam) >= center - 1e-9

    def test_verify_fixed_point(self):
        z = reference_solvers.regularized_saddle_point(*self.problem)
        perturbed = PrimalDualPoint(x=z.x + 0.1, lam=z.lam)
        assert reference_solvers.verify_fixed_point(perturbed, *self.problem, eps=0.1) > 1e-4
        assert reference_solvers.verify_fixed_point(perturbed, *self.problem, eps=0.) == 0.


class TestOfflineFixedPoints(object):

    def setup_method(self):
        self.problem = build_single_node_scenario().problem_at(0)

    def test_stable_point(self):
        z_eq = reference_solvers.offline_fixed_point(self.problem, 'PS')
        npt.assert_almost_equal(z_eq.x, [1. / 3], decimal=12)
        residuals = reference_solvers.verify_stable_point(z_eq, *self.problem)
        assert residuals.primal <= 1e-9
        assert residuals.dual <= 1e-9
        z_star = reference_solvers.regularized_saddle_point(*self.problem)
        residuals = reference_solvers.verify_stable_point(z_star, *self.problem)
        npt.assert_almost_equal(residuals.primal, 0.4766, decimal=3)

    def test_matches_iteration(self):
        for variant, beta_hat in (('PO', None), ('InPO', [2.]), ('PS', None)):
            cfg = algorithms.make_solver_config(epsilon=0.1, variant=variant, beta_hat=beta_hat)
            trajectory = algorithms.run_offline(cfg, self.problem)
            assert trajectory.status == algorithms.CONVERGED
            z = reference_solvers.offline_fixed_point(self.problem, variant, beta_hat)
            assert trajectory.final.distance(z) <= 1e-7

    def test_inpo(self):
        z = reference_solvers.offline_fixed_point(self.problem, 'InPO', np.array([2.]))
        npt.assert_almost_equal(z.lam, 0.5 / (0.01 + 4. / 9), decimal=10)
        npt.assert_almost_equal(z.x, [2. * z.lam / 9], decimal=10)
        z_true = reference_solvers.offline_fixed_point(self.problem, 'InPO')
        z_po = reference_solvers.offline_fixed_point(self.problem, 'PO')
        npt.assert_array_equal(z_true.stacked(), z_po.stacked())

    def test_small_sensitivity(self):
        problem = build_single_node_scenario(overrides={'beta': 1e-9}).problem_at(0)
        x_po = reference_solvers.offline_fixed_point(problem, 'PO').x
        x_ps = reference_solvers.offline_fixed_point(problem, 'PS').x
        npt.assert_allclose(x_po, x_ps, atol=1e-6)
        npt.assert_almost_equal(x_po, [0.4], decimal=6)

    def test_unknown_variant(self):
        with pytest.raises(ConfigurationError):
            reference_solvers.offline_fixed_point(self.problem, 'StochasticInPO')

    def test_schedule(self):
        scenario = build_single_node_scenario(overrides={'steps': 12})
        cfg = algorithms.make_solver_config(variant='PS')
        schedule = reference_solvers.offline_schedule(cfg, scenario)
        assert len(schedule) == 12
        assert all(z is schedule[0] for z in schedule)


if __name__ == '__main__':
    pytest.main()
