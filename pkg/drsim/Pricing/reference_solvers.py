__author__ = 'drsim developers'

"""
reference solutions: the constrained optimum of the pricing problem, the saddle point of the regularized Lagrangian,
the limits of the offline schemes, and residual checks of fixed and stable points

All problems here have a diagonal quadratic, one scalar linear inequality and a box. For a fixed multiplier the
minimizer is an elementwise clamp, so every solve reduces to a monotone scalar root search on the multiplier.
"""

import logging
from collections import namedtuple

import numpy as np
from scipy.optimize import brentq

from drsim.constants import KKT_TOL, DUAL_CAP_MARGIN, OFFLINE_VARIANTS
from drsim.exceptions import InfeasibleProblemError, DualCapError, ConfigurationError
from drsim.Pricing import objective
from drsim.Pricing.algorithms import PrimalDualPoint, project_box, resolve_beta_hat

logger = logging.getLogger(__name__)

_XTOL = 1e-14
_RTOL = 4 * np.finfo(float).eps
_MAX_DOUBLING = 200


class KktCertificate(namedtuple('KktCertificate', ['stationarity_residual', 'primal_feasibility',
                                                   'dual_feasibility', 'complementarity', 'multiplier', 'scale'])):
    """
    residuals of the optimality conditions of the constrained problem. dual_feasibility is the violation
    max(0, -mu) of the multiplier sign; scale normalizes the tolerance to the problem data.
    """
    __slots__ = ()

    def residuals(self):
        return np.array([self.stationarity_residual, self.primal_feasibility, self.dual_feasibility,
                         self.complementarity])

    def passed(self, tol=KKT_TOL):
        return bool(np.all(self.residuals() <= tol * self.scale))


class StablePointResiduals(namedtuple('StablePointResiduals', ['primal', 'dual'])):
    __slots__ = ()


def max_achievable_reduction(feeder, beta, tariff):
    """
    largest s.Bx over the price box
    """
    lo, hi = tariff.bounds(feeder.node_count)
    slope = feeder.s * beta
    return float(np.sum(np.maximum(slope * lo, slope * hi)))


def kkt_certificate(x, mu, feeder, response, tariff, target, params):
    """
    optimality residuals of (x, mu) for
    min x.(B + kappa/2 I)x + x.(B(pi 1 - pi0 s) - d_pre)  s.t.  s.Bx >= p0_tilde, x in X
    """
    lo, hi = tariff.bounds(feeder.node_count)
    beta = response.beta
    slope = feeder.s * beta
    drift = beta * (tariff.pi - tariff.pi0 * feeder.s) - feeder.d_pre
    grad = (2 * beta + params.kappa) * x + drift - mu * slope
    slack = slope.dot(x) - target.p0_tilde
    scale = max(1., float(np.linalg.norm(drift)), abs(target.p0_tilde))
    return KktCertificate(stationarity_residual=float(np.linalg.norm(x - project_box(x - grad, lo, hi))),
                          primal_feasibility=max(0., -slack),
                          dual_feasibility=max(0., -mu),
                          complementarity=abs(mu * slack),
                          multiplier=float(mu),
                          scale=scale)


def solve_lcqp(feeder, response, tariff, target, params):
    """
    unique minimizer of the constrained pricing problem

    :return: x*, KktCertificate
    :raises InfeasibleProblemError: when no price in the box achieves s.Bx >= p0_tilde
    """
    lo, hi = tariff.bounds(feeder.node_count)
    beta = response.beta
    hess = 2 * beta + params.kappa
    slope = feeder.s * beta
    drift = beta * (tariff.pi - tariff.pi0 * feeder.s) - feeder.d_pre
    p0_tilde = target.p0_tilde
    achievable = max_achievable_reduction(feeder, beta, tariff)
    if achievable < p0_tilde - KKT_TOL * max(1., abs(p0_tilde)):
        raise InfeasibleProblemError("the price box achieves s.Bx <= %s < p0_tilde = %s" % (achievable, p0_tilde),
                                     achievable)

    def minimizer(mu):
        return project_box((mu * slope - drift) / hess, lo, hi)

    def excess(mu):
        return slope.dot(minimizer(mu)) - p0_tilde

    mu = 0.
    if excess(0.) < 0:
        upper = 1.
        for i in range(_MAX_DOUBLING):
            if excess(upper) >= 0:
                break
            upper *= 2.
        mu = brentq(excess, 0., upper, xtol=_XTOL, rtol=_RTOL)
    x = minimizer(mu)
    certificate = kkt_certificate(x, mu, feeder, response, tariff, target, params)
    logger.debug("LCQP solved with multiplier %.6g, KKT residuals %s", mu, certificate.residuals())
    return x, certificate


def _affine_saddle(hess, a, c, g, lo, hi, p0_tilde, eta, cap):
    """
    solves x = clip((lambda a - c) / hess, lo, hi), lambda = clip((p0_tilde - g.x) / eta, 0, cap).
    a_n g_n >= 0 makes g.x(lambda) non-decreasing, so lambda - clip(...) is strictly increasing.
    """
    def primal(lam):
        return project_box((lam * a - c) / hess, lo, hi)

    def gap(lam):
        return lam - np.clip((p0_tilde - g.dot(primal(lam))) / eta, 0., cap)

    if gap(0.) >= 0:
        lam = 0.
    elif gap(cap) <= 0:
        lam = cap
    else:
        lam = brentq(gap, 0., cap, xtol=_XTOL, rtol=_RTOL)
    return PrimalDualPoint(x=primal(lam), lam=float(lam))


def offline_fixed_point(problem, variant, beta_hat=None, literal=False):
    """
    limit point of an offline scheme, obtained directly from its fixed-point equations

    :param problem: Problem
    :param variant: 'PO', 'InPO' or 'PS'
    :param beta_hat: estimates used by InPO
    :param literal: InPO dual step with the true sensitivities
    :return: PrimalDualPoint
    """
    feeder, response, tariff, target, params = problem
    lo, hi = tariff.bounds(feeder.node_count)
    beta = response.beta
    if variant == 'PO':
        est = beta
    elif variant == 'InPO':
        est = beta if beta_hat is None else np.asarray(beta_hat, dtype=float)
    elif variant == 'PS':
        return _affine_saddle(beta + params.kappa, np.zeros_like(beta), -feeder.d_pre, feeder.s * beta, lo, hi,
                              target.p0_tilde, params.eta, params.lambda_cap)
    else:
        raise ConfigurationError("no fixed point for variant '%s', choose from %s" % (variant, OFFLINE_VARIANTS))
    dual_beta = beta if literal else est
    return _affine_saddle(2 * est + params.kappa, feeder.s * est, est * (tariff.pi - tariff.pi0 * feeder.s)
                          - feeder.d_pre, feeder.s * dual_beta, lo, hi, target.p0_tilde, params.eta,
                          params.lambda_cap)


def regularized_saddle_point(feeder, response, tariff, target, params):
    """
    unique saddle point z* of the regularized Lagrangian over X x [0, Lambda]

    :raises DualCapError: if lambda* >= 0.9 Lambda, the cap may cut off the dual optimum
    """
    z = offline_fixed_point((feeder, response, tariff, target, params), 'PO')
    if z.lam >= DUAL_CAP_MARGIN * params.lambda_cap:
        raise DualCapError("dual optimum %s too close to the cap %s, increase lambda_cap"
                           % (z.lam, params.lambda_cap), z.lam, params.lambda_cap)
    logger.debug("saddle point lambda* = %.6g, fixed-point residual %.3g", z.lam,
                 verify_fixed_point(z, feeder, response, tariff, target, params, 1.))
    return z


def verify_fixed_point(z, feeder, response, tariff, target, params, eps):
    """
    |z - [z - eps G(z)]|, zero exactly at the saddle point
    """
    lo, hi = tariff.bounds(feeder.node_count)
    step = z.stacked() - eps * objective.saddle_operator(z.x, z.lam, feeder, response, tariff, target, params)
    image = np.append(project_box(step[:-1], lo, hi), np.clip(step[-1], 0., params.lambda_cap))
    return float(np.linalg.norm(z.stacked() - image))


def verify_stable_point(z_eq, feeder, response, tariff, target, params):
    """
    first-order conditions with the response distribution frozen at the one z_eq induces: the primal residual
    of the frozen gradient kappa x + Bx - d_pre and the regularized dual residual
    |lambda - [lambda + E xi(x) - eta lambda]|

    :return: StablePointResiduals
    """
    lo, hi = tariff.bounds(feeder.node_count)
    x, lam = z_eq.x, z_eq.lam
    frozen_grad = params.kappa * x + response.beta * x - feeder.d_pre
    primal = float(np.linalg.norm(x - project_box(x - frozen_grad, lo, hi)))
    lam_image = np.clip(lam + objective.expected_regulation_error(x, feeder, response, target) - params.eta * lam,
                        0., params.lambda_cap)
    return StablePointResiduals(primal=primal, dual=float(abs(lam - lam_image)))


def offline_schedule(cfg, scenario, steps=None):
    """
    converged prices of an offline scheme at every step of a scenario, solved once per distinct baseline

    :param cfg: SolverConfig with an offline variant
    :param scenario: object with problem_at(t) and steps()
    :return: list of PrimalDualPoint, one per step
    """
    steps = scenario.steps() if steps is None else steps
    cache = {}
    schedule = []
    beta_hat = resolve_beta_hat(cfg, scenario.problem_at(0).response)
    for t in range(steps):
        problem = scenario.problem_at(t)
        key = problem.feeder.d_hat.tobytes()
        if key not in cache:
            cache[key] = offline_fixed_point(problem, cfg.variant, beta_hat, cfg.literal)
        schedule.append(cache[key])
    logger.info("%s schedule: %s distinct baselines over %s steps", cfg.variant, len(cache), steps)
    return schedule
