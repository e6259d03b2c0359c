__author__ = 'drsim developers'

"""
payments, the utility's cost, their closed-form expectations under the linear mean response, the regularized
Lagrangian and its exact and inexact primal gradients

all functions are pure; vectors index the customer nodes
"""

from collections import namedtuple

import numpy as np

from drsim.constants import KAPPA, ETA, LAMBDA_CAP_MIN, LAMBDA_CAP_FACTOR
from drsim.exceptions import ValidationError


class ObjectiveParams(namedtuple('ObjectiveParams', ['kappa', 'eta', 'lambda_cap'])):
    """
    price penalty weight kappa, dual regularization eta and the cap Lambda of the dual set Y = [0, Lambda]
    """
    __slots__ = ()


def make_objective_params(kappa=KAPPA, eta=ETA, lambda_cap=LAMBDA_CAP_MIN):
    for name, value in (('kappa', kappa), ('eta', eta), ('lambda_cap', lambda_cap)):
        if not (np.isfinite(value) and value > 0):
            raise ValidationError("%s must be positive and finite, got %s" % (name, value))
    return ObjectiveParams(kappa=float(kappa), eta=float(eta), lambda_cap=float(lambda_cap))


def default_lambda_cap(feeder, beta_hat, p0_tilde):
    """
    Lambda = 10 max(p0_tilde) / min_n(s_n beta_hat_n), at least 10

    :param feeder: FeederModel
    :param beta_hat: sensitivities available to the operator
    :param p0_tilde: scalar or series of p0_tilde values (the worst one counts)
    """
    slope = feeder.s * np.asarray(beta_hat, dtype=float)
    slope = slope[slope > 0]
    demand = max(0., float(np.max(p0_tilde)))
    if len(slope) == 0 or demand == 0:
        return LAMBDA_CAP_MIN
    return max(LAMBDA_CAP_MIN, LAMBDA_CAP_FACTOR * demand / np.min(slope))


def customer_cost(tariff, x_n, d_hat_n, w_n, r_n):
    """
    payment of the customer at one node, c_n = (pi + x_n)(d_hat_n + w_n - r_n) + omega.
    Vector arguments give the payments of all nodes at once.
    """
    return (tariff.pi + np.asarray(x_n, dtype=float)) * (d_hat_n + np.asarray(w_n, dtype=float) - r_n) + tariff.omega


def utility_cost(x, w, feeder, tariff, d_hat_now=None):
    """
    c0(x, w) = (pi0 s - pi 1 - x).(d_hat + w - r) - N omega

    :param x: price adjustments
    :param w: realized flexible loads
    :param d_hat_now: inflexible loads at the current step (defaults to feeder.d_hat)
    """
    d_hat_now = feeder.d_hat if d_hat_now is None else d_hat_now
    x = np.asarray(x, dtype=float)
    net = d_hat_now + np.asarray(w, dtype=float) - feeder.r
    return float((tariff.pi0 * feeder.s - tariff.pi - x).dot(net) - feeder.node_count * tariff.omega)


def operational_cost(x, w, feeder, tariff, params, d_hat_now=None):
    """
    realized cost of operating the grid, c0(x, w) + kappa/2 |x|^2
    """
    x = np.asarray(x, dtype=float)
    return utility_cost(x, w, feeder, tariff, d_hat_now) + params.kappa / 2. * x.dot(x)


def expected_regulation_error(x, feeder, response, target):
    """
    E xi = -s.Bx + p0_tilde
    """
    return float(-feeder.s.dot(response.beta * np.asarray(x, dtype=float)) + target.p0_tilde)


def expected_utility_cost(x, feeder, response, tariff):
    """
    E c0 = x.Bx + x.(B(pi 1 - pi0 s) - d_pre) + (pi0 s - pi 1).d_pre - N omega
    """
    x = np.asarray(x, dtype=float)
    beta = response.beta
    d_pre = feeder.d_pre
    drift = beta * (tariff.pi - tariff.pi0 * feeder.s) - d_pre
    return float(x.dot(beta * x) + x.dot(drift) + (tariff.pi0 * feeder.s - tariff.pi).dot(d_pre)
                 - feeder.node_count * tariff.omega)


def expected_operational_cost(x, feeder, response, tariff, params):
    x = np.asarray(x, dtype=float)
    return expected_utility_cost(x, feeder, response, tariff) + params.kappa / 2. * x.dot(x)


def lagrangian(x, lam, feeder, response, tariff, target, params):
    """
    unregularized Lagrangian E c0 + kappa/2 |x|^2 + lambda E xi
    """
    return expected_operational_cost(x, feeder, response, tariff, params) \
        + lam * expected_regulation_error(x, feeder, response, target)


def reg_lagrangian(x, lam, feeder, response, tariff, target, params):
    """
    regularized Lagrangian E c0 + kappa/2 |x|^2 + lambda E xi - eta/2 lambda^2, convex in x and strongly concave in
    lambda
    """
    return lagrangian(x, lam, feeder, response, tariff, target, params) - params.eta / 2. * lam**2


def _gradient(x, lam, beta, feeder, tariff, params):
    x = np.asarray(x, dtype=float)
    return (2 * beta + params.kappa) * x + beta * (tariff.pi - tariff.pi0 * feeder.s) - feeder.d_pre \
        - lam * beta * feeder.s


def primal_gradient(x, lam, feeder, response, tariff, params):
    """
    gradient of the regularized Lagrangian in x with the true sensitivities,
    (2B + kappa I)x + B(pi 1 - pi0 s) - d_pre - lambda Bs

    :param x: price adjustments
    :param lam: dual variable
    :return: gradient vector
    """
    return _gradient(x, lam, response.beta, feeder, tariff, params)


def approx_primal_gradient(x, lam, beta_hat, feeder, tariff, params):
    """
    the same affine map with the estimates beta_hat in place of beta (beta_hat = 1 is the sign approximation)
    """
    beta_hat = np.asarray(beta_hat, dtype=float)
    if np.any(beta_hat <= 0):
        raise ValidationError("estimated sensitivities beta_hat must be positive")
    return _gradient(x, lam, beta_hat, feeder, tariff, params)


def operator_matrix(beta, feeder, params):
    """
    linear part A of the saddle operator G(z) = A z + b, z = (x, lambda)

    A = [[2B + kappa I, -Bs], [(Bs)^T, eta]]
    """
    beta = np.asarray(beta, dtype=float)
    n = feeder.node_count
    coupling = beta * feeder.s
    a = np.zeros((n + 1, n + 1))
    a[:n, :n] = np.diag(2 * beta + params.kappa)
    a[:n, n] = -coupling
    a[n, :n] = coupling
    a[n, n] = params.eta
    return a


def operator_offset(beta, feeder, tariff, target):
    """
    constant part b of the saddle operator, b = (B(pi 1 - pi0 s) - d_pre, -p0_tilde)
    """
    beta = np.asarray(beta, dtype=float)
    return np.append(beta * (tariff.pi - tariff.pi0 * feeder.s) - feeder.d_pre, -target.p0_tilde)


def saddle_operator(x, lam, feeder, response, tariff, target, params):
    """
    G(z) = (grad_x L_hat, -grad_lambda L_hat) = (primal_gradient, s.Bx - p0_tilde + eta lambda).
    The projected step z+ = [z - eps G(z)] is the exact primal-dual iteration.

    :return: stacked vector of length N + 1
    """
    grad = primal_gradient(x, lam, feeder, response, tariff, params)
    return np.append(grad, -expected_regulation_error(x, feeder, response, target) + params.eta * lam)


def approx_saddle_operator(x, lam, beta_hat, p0_measured, feeder, tariff, target, params):
    """
    sampled operator of the stochastic scheme: estimated gradient and the measured regulation error,
    (g(x, lambda), -xi + eta lambda)
    """
    grad = approx_primal_gradient(x, lam, beta_hat, feeder, tariff, params)
    return np.append(grad, -(p0_measured - target.p_ref) + params.eta * lam)
