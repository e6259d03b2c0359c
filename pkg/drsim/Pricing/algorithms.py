__author__ = 'drsim developers'

"""
the four pricing schemes as pure projected primal-dual steps, and the drivers running them

PO      exact step with the true sensitivities and closed-form expectations
InPO    the same step with the estimates beta_hat
PS      step that ignores the price dependence of the response (converges to a stable point)
StochasticInPO  estimated primal step and a dual step fed by one measurement of the aggregate power
"""

import logging
from collections import namedtuple

import numpy as np

from drsim.constants import EPSILON, MAX_ITERS, CONVERGENCE_TOL, DIVERGENCE_FACTOR, VARIANTS, OFFLINE_VARIANTS
from drsim.exceptions import ConfigurationError, ValidationError, MeasurementError, DivergenceError
from drsim.exceptions import CertifiedRegimeError
from drsim.Analysis import bounds
from drsim.Feeder import grid_model, response_model
from drsim.Pricing import objective

logger = logging.getLogger(__name__)

RUNNING = 'running'
CONVERGED = 'converged'
UNCONVERGED = 'unconverged'
COMPLETED = 'completed'
FAILED = 'failed'


class PrimalDualPoint(namedtuple('PrimalDualPoint', ['x', 'lam'])):
    """
    iterate z = (x, lambda): price adjustments and the dual variable of the power constraint
    """
    __slots__ = ()

    def stacked(self):
        return np.append(self.x, self.lam)

    @classmethod
    def from_stacked(cls, z):
        z = np.asarray(z, dtype=float)
        return cls(x=z[:-1].copy(), lam=float(z[-1]))

    def distance(self, other):
        return float(np.linalg.norm(self.stacked() - other.stacked()))


class SolverConfig(namedtuple('SolverConfig', ['epsilon', 'variant', 'beta_hat', 'max_iters', 'convergence_tol',
                                               'literal', 'strict', 'divergence_factor'])):
    """
    step size, scheme, operator estimates (None means the true sensitivities), offline stopping rule,
    literal-equation mode, strict certified-step mode and the divergence guard factor
    """
    __slots__ = ()


class IterationRecord(namedtuple('IterationRecord', ['t', 'z', 'p0_measured', 'realized_cost', 'expected_cost'])):
    __slots__ = ()


class Problem(namedtuple('Problem', ['feeder', 'response', 'tariff', 'target', 'params'])):
    """
    everything one step needs: feeder, response model, tariff, event target and objective parameters.
    A problem acts as its own static scenario through problem_at.
    """
    __slots__ = ()

    def problem_at(self, t):
        return self

    def price_box(self):
        """
        box of the price adjustments
        """
        return self.tariff.bounds(self.feeder.node_count)

    def start(self):
        """
        pre-event prices x = 0 and lambda = 0, projected onto the sets
        """
        lo, hi = self.price_box()
        return PrimalDualPoint(x=project_box(np.zeros(self.feeder.node_count), lo, hi), lam=0.)


class Trajectory(object):
    """
    append-only sequence of IterationRecord with strictly increasing step index and a status
    """
    def __init__(self, variant):
        self.variant = variant
        self.records = []
        self.status = RUNNING
        self.error = None
        self.terminal = None

    def append(self, record):
        if self.records and record.t <= self.records[-1].t:
            raise ValueError("step index %s does not increase after %s" % (record.t, self.records[-1].t))
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def fail(self, error):
        self.status = FAILED
        self.error = str(error)

    @property
    def final(self):
        return self.records[-1].z

    @property
    def steps(self):
        return np.array([rec.t for rec in self.records], dtype=int)

    @property
    def prices(self):
        return np.array([rec.z.x for rec in self.records])

    @property
    def duals(self):
        return np.array([rec.z.lam for rec in self.records])

    @property
    def power(self):
        return np.array([rec.p0_measured for rec in self.records])

    @property
    def realized_costs(self):
        return np.array([rec.realized_cost for rec in self.records])

    @property
    def expected_costs(self):
        return np.array([rec.expected_cost for rec in self.records])


def make_solver_config(epsilon=EPSILON, variant='StochasticInPO', beta_hat=None, max_iters=MAX_ITERS,
                       convergence_tol=CONVERGENCE_TOL, literal=False, strict=False,
                       divergence_factor=DIVERGENCE_FACTOR):
    if variant not in VARIANTS:
        raise ConfigurationError("unknown variant '%s', choose from %s" % (variant, VARIANTS))
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise ConfigurationError("step size epsilon must be positive, got %s" % epsilon)
    if max_iters < 0:
        raise ConfigurationError("max_iters must be non-negative")
    if beta_hat is not None:
        beta_hat = np.array(beta_hat, dtype=float)
        if not np.all(np.isfinite(beta_hat)) or np.any(beta_hat <= 0):
            raise ValidationError("estimated sensitivities beta_hat must be positive and finite")
        beta_hat.setflags(write=False)
    return SolverConfig(epsilon=float(epsilon), variant=variant, beta_hat=beta_hat, max_iters=int(max_iters),
                        convergence_tol=float(convergence_tol), literal=bool(literal), strict=bool(strict),
                        divergence_factor=float(divergence_factor))


def resolve_beta_hat(cfg, response):
    """
    operator estimates of a configuration, broadcast to the node count; the true sensitivities when unset
    """
    if cfg.beta_hat is None:
        return response.beta
    beta_hat = np.asarray(cfg.beta_hat, dtype=float)
    if beta_hat.ndim == 0 or len(beta_hat) == 1:
        return np.full(response.node_count, float(beta_hat.ravel()[0]))
    if len(beta_hat) != response.node_count:
        raise ConfigurationError("beta_hat has %s entries for %s nodes" % (len(beta_hat), response.node_count))
    return beta_hat


def project_box(v, lo, hi):
    """
    elementwise clamp of v onto [lo, hi]
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise ConfigurationError("projection onto an empty box, lo > hi")
    return np.minimum(np.maximum(v, lo), hi)


def _guard(x_raw, lam_raw, lo, hi, params, cfg):
    radius = np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))) + params.lambda_cap + 1.
    size = np.sqrt(x_raw.dot(x_raw) + lam_raw**2)
    if not np.isfinite(size) or size > cfg.divergence_factor * radius:
        raise DivergenceError("iterate norm %s exceeds the guard %s at step size %s"
                              % (size, cfg.divergence_factor * radius, cfg.epsilon))


def _project(x_raw, lam_raw, feeder, tariff, params, cfg):
    lo, hi = tariff.bounds(feeder.node_count)
    _guard(x_raw, lam_raw, lo, hi, params, cfg)
    return PrimalDualPoint(x=project_box(x_raw, lo, hi), lam=float(np.clip(lam_raw, 0., params.lambda_cap)))


def _dual_decay(cfg, params, printed_sign=False):
    if printed_sign and cfg.literal:
        return 1. + cfg.epsilon * params.eta
    return 1. - cfg.epsilon * params.eta


def _dual_step(z, beta, feeder, target, params, cfg):
    eps = cfg.epsilon
    return _dual_decay(cfg, params) * z.lam - eps * feeder.s.dot(beta * z.x) + eps * target.p0_tilde


def po_step(z, feeder, response, tariff, target, params, cfg):
    """
    one exact primal-dual step, z+ = [z - eps G(z)]

    :param z: PrimalDualPoint
    :return: PrimalDualPoint
    """
    eps = cfg.epsilon
    x_raw = z.x - eps * objective.primal_gradient(z.x, z.lam, feeder, response, tariff, params)
    lam_raw = _dual_step(z, response.beta, feeder, target, params, cfg)
    return _project(x_raw, lam_raw, feeder, tariff, params, cfg)


def inpo_step(z, beta_hat, feeder, response, tariff, target, params, cfg):
    """
    exact step with the estimates beta_hat in place of beta. In literal mode the dual step keeps the true
    sensitivities.
    """
    eps = cfg.epsilon
    x_raw = z.x - eps * objective.approx_primal_gradient(z.x, z.lam, beta_hat, feeder, tariff, params)
    dual_beta = response.beta if cfg.literal else beta_hat
    lam_raw = _dual_step(z, dual_beta, feeder, target, params, cfg)
    return _project(x_raw, lam_raw, feeder, tariff, params, cfg)


def ps_step(z, feeder, response, tariff, target, params, cfg):
    """
    repeated-retraining step, x+ = [((1 - eps kappa) - eps B) x + eps d_pre]; the primal update does not see lambda
    """
    eps = cfg.epsilon
    x_raw = ((1. - eps * params.kappa) - eps * response.beta) * z.x + eps * feeder.d_pre
    lam_raw = _dual_step(z, response.beta, feeder, target, params, cfg)
    return _project(x_raw, lam_raw, feeder, tariff, params, cfg)


def stochastic_inpo_step(z, beta_hat, p0_measured, feeder, tariff, target, params, cfg):
    """
    online step: estimated primal gradient, dual ascent along the measured regulation error
    lambda+ = [(1 - eps eta) lambda + eps (p0_measured - p_ref)]

    :param p0_measured: aggregate power measured after dispatching z.x [kW]
    """
    if not np.isfinite(p0_measured):
        raise MeasurementError("non-finite power measurement %s" % p0_measured)
    eps = cfg.epsilon
    x_raw = z.x - eps * objective.approx_primal_gradient(z.x, z.lam, beta_hat, feeder, tariff, params)
    lam_raw = _dual_decay(cfg, params, printed_sign=True) * z.lam \
        + eps * grid_model.regulation_error(p0_measured, target)
    return _project(x_raw, lam_raw, feeder, tariff, params, cfg)


def offline_step(z, problem, cfg, beta_hat=None):
    """
    dispatches one step of an offline variant
    """
    feeder, response, tariff, target, params = problem
    if cfg.variant == 'PO':
        return po_step(z, feeder, response, tariff, target, params, cfg)
    if cfg.variant == 'InPO':
        if beta_hat is None:
            beta_hat = resolve_beta_hat(cfg, response)
        return inpo_step(z, beta_hat, feeder, response, tariff, target, params, cfg)
    if cfg.variant == 'PS':
        return ps_step(z, feeder, response, tariff, target, params, cfg)
    raise ConfigurationError("variant '%s' is not an offline scheme, choose from %s"
                             % (cfg.variant, OFFLINE_VARIANTS))


def check_step_size(cfg, problem):
    """
    in strict mode the step must lie in the certified range (0, 2 nu / L^2)
    """
    if not cfg.strict:
        return
    nu = bounds.strong_monotonicity_modulus(problem.params, problem.response)
    lip = bounds.lipschitz_constant(problem.params, problem.feeder, problem.response)
    if not 0 < cfg.epsilon < 2 * nu / lip**2:
        raise CertifiedRegimeError("strict mode: step %s outside the certified range (0, %s)"
                                   % (cfg.epsilon, 2 * nu / lip**2))


def _expected_record(t, z, problem):
    feeder, response, tariff, target, params = problem
    p0 = target.p_ref + objective.expected_regulation_error(z.x, feeder, response, target)
    cost = objective.expected_operational_cost(z.x, feeder, response, tariff, params)
    return IterationRecord(t=t, z=z, p0_measured=p0, realized_cost=cost, expected_cost=cost)


def run_offline(cfg, problem, z0=None):
    """
    iterates an offline scheme until two successive iterates are closer than cfg.convergence_tol or cfg.max_iters
    steps are done. Records carry the expected power and cost of each iterate.

    :param cfg: SolverConfig with variant PO, InPO or PS
    :param problem: Problem
    :param z0: start point (pre-event prices by default)
    :return: Trajectory with status 'converged' or 'unconverged'
    """
    if cfg.variant not in OFFLINE_VARIANTS:
        raise ConfigurationError("run_offline needs one of %s, got '%s'" % (OFFLINE_VARIANTS, cfg.variant))
    check_step_size(cfg, problem)
    beta_hat = resolve_beta_hat(cfg, problem.response)
    z = problem.start() if z0 is None else z0
    trajectory = Trajectory(cfg.variant)
    trajectory.append(_expected_record(0, z, problem))
    trajectory.status = UNCONVERGED
    for t in range(1, cfg.max_iters + 1):
        z_new = offline_step(z, problem, cfg, beta_hat)
        trajectory.append(_expected_record(t, z_new, problem))
        step = z_new.distance(z)
        z = z_new
        if step <= cfg.convergence_tol:
            trajectory.status = CONVERGED
            break
    if trajectory.status == CONVERGED:
        logger.debug("%s converged after %s steps", cfg.variant, len(trajectory) - 1)
    else:
        logger.warning("%s did not converge within %s steps", cfg.variant, cfg.max_iters)
    return trajectory


class SimulatedPlant(object):
    """
    in-process plant: draws the customer response to dispatched prices and measures the aggregate power.

    A plant offers dispatch(x, t) returning the measured p0 and cost(x, t) returning the realized operating cost of
    the last dispatch.
    """
    def __init__(self, scenario, stream):
        """

        :param scenario: object with problem_at(t) (a Scenario or a Problem)
        :param stream: numpy.random.Generator owned by this plant
        """
        self._scenario = scenario
        self._stream = stream
        self.last_response = None

    def dispatch(self, x, t):
        problem = self._scenario.problem_at(t)
        self.last_response = response_model.sample_response(problem.response, problem.feeder, x, self._stream)
        return grid_model.aggregate_power(problem.feeder, problem.feeder.d_hat, self.last_response)

    def cost(self, x, t):
        problem = self._scenario.problem_at(t)
        return objective.operational_cost(x, self.last_response, problem.feeder, problem.tariff, problem.params)


def run_online(cfg, scenario, plant, steps=None, z0=None):
    """
    closed loop of the stochastic scheme: dispatch x(t), measure p0(t), update z(t+1), for every step of the event.
    Record t holds the dispatched iterate z(t) with its measurement and costs.

    :param cfg: SolverConfig with variant StochasticInPO
    :param scenario: Scenario (or Problem) providing problem_at(t)
    :param plant: object with dispatch(x, t) and cost(x, t)
    :param steps: number of steps (scenario.steps() by default)
    :return: Trajectory; a plant failure truncates it with status 'failed'
    """
    if cfg.variant != 'StochasticInPO':
        raise ConfigurationError("run_online drives StochasticInPO, got '%s'" % cfg.variant)
    steps = scenario.steps() if steps is None else steps
    first = scenario.problem_at(0)
    check_step_size(cfg, first)
    beta_hat = resolve_beta_hat(cfg, first.response)
    z = first.start() if z0 is None else z0
    trajectory = Trajectory(cfg.variant)
    for t in range(steps):
        problem = scenario.problem_at(t)
        feeder, response, tariff, target, params = problem
        try:
            p0 = plant.dispatch(z.x, t)
            realized = plant.cost(z.x, t)
            z_next = stochastic_inpo_step(z, beta_hat, p0, feeder, tariff, target, params, cfg)
        except DivergenceError:
            raise
        except Exception as err:
            logger.warning("plant failure at step %s: %s", t, err)
            trajectory.fail(err)
            return trajectory
        expected = objective.expected_operational_cost(z.x, feeder, response, tariff, params)
        trajectory.append(IterationRecord(t=t, z=z, p0_measured=p0, realized_cost=realized, expected_cost=expected))
        z = z_next
    trajectory.status = COMPLETED
    trajectory.terminal = z
    return trajectory


def run_dispatch(schedule, scenario, plant, variant, steps=None):
    """
    open loop: dispatches precomputed points (converged offline prices) and records the measurements

    :param schedule: sequence of PrimalDualPoint indexed by step
    :param variant: label of the scheme that produced the schedule
    :return: Trajectory
    """
    steps = scenario.steps() if steps is None else steps
    trajectory = Trajectory(variant)
    for t in range(steps):
        problem = scenario.problem_at(t)
        z = schedule[t]
        try:
            p0 = plant.dispatch(z.x, t)
            realized = plant.cost(z.x, t)
        except Exception as err:
            logger.warning("plant failure at step %s: %s", t, err)
            trajectory.fail(err)
            return trajectory
        if not np.isfinite(p0):
            trajectory.fail(MeasurementError("non-finite power measurement at step %s" % t))
            return trajectory
        expected = objective.expected_operational_cost(z.x, problem.feeder, problem.response, problem.tariff,
                                                       problem.params)
        trajectory.append(IterationRecord(t=t, z=z, p0_measured=p0, realized_cost=realized, expected_cost=expected))
    trajectory.status = COMPLETED
    return trajectory
