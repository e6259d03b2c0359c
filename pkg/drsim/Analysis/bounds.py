__author__ = 'drsim developers'

"""
certified constants of the primal-dual iteration and the error bounds they imply

the saddle operator G(z) = A z + b is affine, so its monotonicity modulus and Lipschitz constant are read off A
"""

import logging
from collections import namedtuple

import numpy as np

from drsim.exceptions import CertifiedRegimeError
from drsim.Feeder import response_model
from drsim.Pricing import objective

logger = logging.getLogger(__name__)


class BoundParams(namedtuple('BoundParams', ['nu', 'L', 'c_eps', 'X_norm', 'Lambda_cap', 'B_const', 'e_xi_bar',
                                             'beta_err', 'epsilon', 'Delta'])):
    """
    strong monotonicity modulus nu, Lipschitz constant L, contraction factor c(eps), price norm bound X, dual cap
    Lambda, gradient error constant B, deviation bound e_xi_bar, estimation error |beta_hat - beta|, the step size
    and the path variation Delta (zero for static loads)
    """
    __slots__ = ()

    @property
    def noise_term(self):
        """
        |beta_hat - beta| B + e_xi_bar
        """
        return self.beta_err * self.B_const + self.e_xi_bar


def strong_monotonicity_modulus(params, response):
    """
    nu = min(kappa + 2 min_n beta_n, eta), the smallest eigenvalue of the symmetric part of A
    """
    return min(params.kappa + 2 * float(np.min(response.beta)), params.eta)


def lipschitz_constant(params, feeder, response, tol=1e-10, max_iter=100000):
    """
    spectral norm of A by power iteration on A^T A, checked against the singular value decomposition

    :param tol: relative change of the estimate at which the iteration stops
    :return: L
    """
    a = objective.operator_matrix(response.beta, feeder, params)
    ata = a.T.dot(a)
    v = np.ones(len(a)) / np.sqrt(len(a))
    value = 0.
    for i in range(max_iter):
        w = ata.dot(v)
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.
        v = w / norm
        new_value = np.sqrt(v.dot(ata.dot(v)))
        if abs(new_value - value) <= tol * new_value:
            value = new_value
            break
        value = new_value
    exact = np.linalg.norm(a, 2)
    if abs(value - exact) > 1e-8 * exact:
        logger.warning("power iteration stalled at %s, spectral norm is %s", value, exact)
        return float(exact)
    return float(value)


def contraction_factor(epsilon, nu, L):
    """
    c(eps) = (1 - 2 eps nu + eps^2 L^2)^(1/2)

    :raises CertifiedRegimeError: unless 0 < eps < 2 nu / L^2
    """
    if not 0 < epsilon < 2 * nu / L**2:
        raise CertifiedRegimeError("step %s outside the certified range (0, %s)" % (epsilon, 2 * nu / L**2))
    c = np.sqrt(1 - 2 * epsilon * nu + epsilon**2 * L**2)
    assert c < 1
    return float(c)


def certified_step(nu, L):
    """
    step nu / L^2 minimizing c(eps)
    """
    return nu / L**2


def max_price_norm(tariff, node_count):
    """
    X = max over the price box of |x|
    """
    lo, hi = tariff.bounds(node_count)
    return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))


def gradient_error_constant(X_norm, feeder, tariff, lambda_cap):
    """
    B = 2X + max_n |pi - pi0 s_n| + Lambda max_n |s_n|, so that |g - grad| <= |beta_hat - beta| B on X x Y
    """
    return 2 * X_norm + float(np.max(np.abs(tariff.pi - tariff.pi0 * feeder.s))) \
        + lambda_cap * float(np.max(np.abs(feeder.s)))


def bound_params(problem, epsilon, beta_hat=None, e_xi_bar=None, Delta=0., strict=True, stream=None):
    """
    assembles the constants of a problem

    :param problem: Problem
    :param epsilon: step size
    :param beta_hat: operator estimates (the true sensitivities if None)
    :param e_xi_bar: deviation bound (closed form of the response family if None)
    :param Delta: path variation of the optimal points
    :param strict: if False, c_eps is nan outside the certified range instead of raising
    :param stream: numpy Generator; with the truncated family the sampled deviation bound replaces the untruncated
        closed form when it is smaller
    :return: BoundParams
    """
    feeder, response, tariff, target, params = problem
    nu = strong_monotonicity_modulus(params, response)
    lip = lipschitz_constant(params, feeder, response)
    try:
        c_eps = contraction_factor(epsilon, nu, lip)
    except CertifiedRegimeError:
        if strict:
            raise
        c_eps = np.nan
    X_norm = max_price_norm(tariff, feeder.node_count)
    beta_hat = response.beta if beta_hat is None else np.asarray(beta_hat, dtype=float)
    if e_xi_bar is None:
        e_xi_bar = response_model.abs_deviation_bound(response, feeder, tariff)
        if response.family == 'truncated_gaussian' and stream is not None:
            sampled = response_model.sampled_deviation_bound(response, feeder, tariff, stream)
            logger.debug("deviation bound: closed form %.6g, sampled %.6g", e_xi_bar, sampled)
            e_xi_bar = min(e_xi_bar, sampled)
    return BoundParams(nu=nu, L=lip, c_eps=c_eps, X_norm=X_norm, Lambda_cap=params.lambda_cap,
                       B_const=gradient_error_constant(X_norm, feeder, tariff, params.lambda_cap),
                       e_xi_bar=float(e_xi_bar), beta_err=float(np.linalg.norm(beta_hat - response.beta)),
                       epsilon=float(epsilon), Delta=float(Delta))


def tracking_error_bound(t, e0, bounds, epsilon, Delta, floor_scale=1.):
    """
    c^t e0 + (Delta + eps (|beta_hat - beta| B + e_xi_bar)) / (1 - c)

    :param t: step index (scalar or array)
    :param e0: initial expected distance to the optimum
    :param floor_scale: multiplies the asymptotic floor
    """
    c = contraction_factor(epsilon, bounds.nu, bounds.L)
    t = np.asarray(t, dtype=float)
    floor = (Delta + epsilon * bounds.noise_term) / (1 - c)
    return c**t * e0 + floor_scale * floor


def static_error_bound(t, e0, bounds, epsilon, floor_scale=1.):
    """
    c^t e0 + eps (|beta_hat - beta| B + e_xi_bar) / (1 - c)
    """
    return tracking_error_bound(t, e0, bounds, epsilon, 0., floor_scale)


def path_variation(points):
    """
    Delta = max_t |z*(t) - z*(t-1)|

    :param points: sequence of PrimalDualPoint or array with one stacked point per row
    """
    stacked = np.array([p.stacked() if hasattr(p, 'stacked') else p for p in points], dtype=float)
    if len(stacked) < 2:
        return 0.
    return float(np.max(np.linalg.norm(np.diff(stacked, axis=0), axis=1)))


class PathVariation(object):
    """
    streaming computation of the path variation
    """
    def __init__(self):
        self._last = None
        self.value = 0.

    def update(self, point):
        point = np.asarray(point.stacked() if hasattr(point, 'stacked') else point, dtype=float)
        if self._last is not None:
            self.value = max(self.value, float(np.linalg.norm(point - self._last)))
        self._last = point
        return self.value
