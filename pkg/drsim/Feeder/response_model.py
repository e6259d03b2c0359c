__author__ = 'drsim developers'

"""
decision-dependent distribution maps of the flexible load response

w_n ~ D_n(x_n) with mean delta_n - beta_n x_n and spread sigma0_n exp(-zeta beta_n x_n)
"""

import re
from collections import namedtuple

import numpy as np

from drsim import util
from drsim.constants import FAMILIES, ZETA, SIGMA0_FRACTION, DEVIATION_SAFETY, BETA_RANGE
from drsim.exceptions import ConfigurationError, ValidationError
from drsim.prob_density import TruncatedGaussian, mean_absolute_deviation, empirical_mean_absolute_deviation

_truncated = TruncatedGaussian()

# spawn keys of the independent stream families derived from one master seed
RUN_KEY = 0
SCENARIO_KEY = 1
PROFILE_KEY = 2
BOUND_KEY = 3


class ResponseModel(namedtuple('ResponseModel', ['beta', 'sigma0', 'zeta', 'family'])):
    """
    per-node sensitivities beta, baseline spreads sigma0, spread decay zeta and the distribution family.
    The zero-mean residual of the family plays the role of the location-scale noise.
    """
    __slots__ = ()

    @property
    def node_count(self):
        return len(self.beta)


class RandomStreams(object):
    """
    reproducible random streams derived from one master seed with numpy SeedSequence spawn keys.
    Run k owns the stream with key (RUN_KEY, k); streams depend on the key only, never on the execution order.
    """
    def __init__(self, master_seed):
        self.master_seed = int(master_seed)

    def _generator(self, *key):
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(self.master_seed, spawn_key=key)))

    def run_stream(self, run):
        """
        stream of Monte Carlo run number run
        """
        return self._generator(RUN_KEY, int(run))

    def substream(self, run, step):
        """
        stream attached to one (run, step) pair
        """
        return self._generator(RUN_KEY, int(run), int(step))

    def scenario_stream(self):
        return self._generator(SCENARIO_KEY)

    def profile_stream(self):
        return self._generator(PROFILE_KEY)

    def bound_stream(self):
        """
        stream of the sampled deviation bound
        """
        return self._generator(BOUND_KEY)


def make_response(beta, sigma0, zeta=ZETA, family='gaussian'):
    """
    builds a validated ResponseModel

    :param beta: price sensitivities (> 0)
    :param sigma0: baseline spreads (>= 0), scalar or vector
    :param zeta: spread decay rate (>= 0)
    :param family: one of 'gaussian', 'deterministic', 'truncated_gaussian'
    """
    beta = util.mk_array(beta, name='beta')
    sigma0 = util.mk_array(sigma0, len(beta), 'sigma0')
    util.check_finite(beta, 'beta')
    util.check_finite(sigma0, 'sigma0')
    if family not in FAMILIES:
        raise ConfigurationError("unknown response family '%s', choose from %s" % (family, FAMILIES))
    if np.any(beta <= 0):
        raise ValidationError("price sensitivities beta must be positive, got min %s" % np.min(beta))
    if np.any(sigma0 < 0):
        raise ValidationError("baseline spreads sigma0 must be non-negative")
    if not zeta >= 0:
        raise ValidationError("spread decay zeta must be non-negative, got %s" % zeta)
    return ResponseModel(beta=util.frozen(beta), sigma0=util.frozen(sigma0), zeta=float(zeta), family=family)


def load_response(config_doc, feeder, stream=None):
    """
    response model from a configuration document

    :param config_doc: dict with keys beta (vector, or 'uniform[a,b]' with key seed), sigma0 (vector, scalar or
        'fraction:f' of delta), zeta, family
    :param feeder: FeederModel the response belongs to
    :param stream: numpy Generator used for 'uniform[a,b]' when no seed is given
    """
    n = feeder.node_count
    beta = config_doc.get('beta', 'uniform[%s,%s]' % BETA_RANGE)
    if isinstance(beta, str):
        match = re.match(r'^\s*uniform\[\s*([-+\d.eE]+)\s*,\s*([-+\d.eE]+)\s*\]\s*$', beta)
        if match is None:
            raise ConfigurationError("cannot parse beta entry '%s'" % beta)
        low, high = float(match.group(1)), float(match.group(2))
        if 'seed' in config_doc:
            stream = np.random.default_rng(int(config_doc['seed']))
        elif stream is None:
            raise ConfigurationError("beta '%s' needs a seed" % beta)
        beta = stream.uniform(low, high, n)
    sigma0 = config_doc.get('sigma0', 'fraction:%s' % SIGMA0_FRACTION)
    if isinstance(sigma0, str):
        if not sigma0.startswith('fraction:'):
            raise ConfigurationError("cannot parse sigma0 entry '%s'" % sigma0)
        sigma0 = float(sigma0.split(':')[1]) * feeder.delta
    return make_response(util.mk_array(beta, n, 'beta'), util.mk_array(sigma0, n, 'sigma0'),
                         zeta=config_doc.get('zeta', ZETA), family=config_doc.get('family', 'gaussian'))


def response_document(model):
    """
    configuration document of a ResponseModel, readable by load_response
    """
    return {'beta': model.beta.tolist(), 'sigma0': model.sigma0.tolist(), 'zeta': model.zeta,
            'family': model.family}


def check_nonnegative_mean(model, feeder, tariff):
    """
    raises if some price in the box drives the mean response below zero (x_max,n > delta_n / beta_n)
    """
    lo, hi = tariff.bounds(feeder.node_count)
    excess = hi * model.beta - feeder.delta
    if np.any(excess > 1e-12):
        raise ValidationError("upper price bound exceeds delta/beta at nodes %s"
                              % list(np.flatnonzero(excess > 1e-12)))


def mean_response(model, feeder, x):
    """
    mu_n(x_n) = delta_n - beta_n x_n
    """
    x = np.asarray(x, dtype=float)
    util.check_length(x, feeder.node_count, 'x')
    return feeder.delta - model.beta * x


def std_response(model, x):
    """
    sigma_n(x_n) = sigma0_n exp(-zeta beta_n x_n), zero for the deterministic family
    """
    x = np.asarray(x, dtype=float)
    if model.family == 'deterministic':
        return np.zeros_like(x)
    return model.sigma0 * np.exp(-model.zeta * model.beta * x)


def sample_response(model, feeder, x, stream):
    """
    one draw w ~ D(x)

    :param model: ResponseModel
    :param feeder: FeederModel
    :param x: price adjustments
    :param stream: numpy.random.Generator, advanced by the draw
    :return: flexible load realization [kW]
    """
    mu = mean_response(model, feeder, x)
    if model.family == 'deterministic':
        return mu
    sigma = std_response(model, x)
    if model.family == 'truncated_gaussian':
        return _truncated.draw(mu, sigma, 0., feeder.delta, stream)
    return mu + sigma * stream.standard_normal(len(mu))


def deviation_std(model, feeder, x):
    """
    standard deviation of xi(w) = s.(w - mu(x)) for independent nodes
    """
    return float(np.sqrt(np.sum((feeder.s * std_response(model, x))**2)))


def abs_deviation_bound(model, feeder, tariff):
    """
    e_xi_bar: the maximum over the box of E|xi - E xi| = sqrt(2/pi) sigma_xi(x). sigma_n is non-increasing in x_n,
    so the maximum sits at the lower corner of the box. For the truncated family the untruncated spread gives a
    conservative value.
    """
    if model.family == 'deterministic':
        return 0.
    lo, hi = tariff.bounds(feeder.node_count)
    corner = np.where(model.zeta * model.beta >= 0, lo, hi)
    return float(mean_absolute_deviation(deviation_std(model, feeder, corner)))


def sampled_deviation_bound(model, feeder, tariff, stream, num_samples=10000, num_grid=11):
    """
    sampled fallback for e_xi_bar: maximum over a grid of the box diagonal of the empirical mean absolute deviation
    of s.w, times a safety factor
    """
    if model.family == 'deterministic':
        return 0.
    lo, hi = tariff.bounds(feeder.node_count)
    worst = 0.
    for theta in np.linspace(0., 1., num_grid):
        x = lo + theta * (hi - lo)
        p0 = np.array([feeder.s.dot(sample_response(model, feeder, x, stream)) for i in range(num_samples)])
        worst = max(worst, empirical_mean_absolute_deviation(p0))
    return DEVIATION_SAFETY * worst
