__author__ = 'drsim developers'

"""
experiment setups: static loads, minute-level time-varying loads during the event window, and the one-node hand
instance; scenario documents in YAML
"""

import logging

import numpy as np
import yaml

from drsim import util
from drsim.constants import BETA_RANGE, BETA_FLOOR, DELTA_FACTOR, SIGMA0_FRACTION, ZETA, KAPPA, ETA, PI, PI0, \
    OMEGA, X_MIN, X_MAX, STATIC_STEPS, DRE_START, DRE_END, SOLAR_FRACTION, DUAL_CAP_MARGIN
from drsim.exceptions import ConfigurationError, ValidationError, InfeasibleProblemError, DualCapError
from drsim.Feeder import grid_model, response_model
from drsim.Feeder.response_model import RandomStreams
from drsim.Pricing import objective, reference_solvers
from drsim.Pricing.algorithms import Problem
from drsim.Scenarios.load_profiles import LoadProfileSet, synth_load_profiles

logger = logging.getLogger(__name__)

_OVERRIDES = ('kappa', 'eta', 'lambda_cap', 'pi', 'pi0', 'omega', 'x_min', 'x_max', 'p_ref', 'sigma0', 'zeta',
              'family', 'beta', 'delta', 'r', 's', 'steps', 'solar_fraction')
_CAP_GROWTH = 10.
_CAP_ATTEMPTS = 5


class Scenario(object):
    """
    a complete experiment: feeder, tariff, target, response model, objective parameters, optional time-varying
    baseline profiles and the master seed. Treated as immutable once built. The event window of the target sets the
    number of steps; time-varying profiles must cover it exactly.
    """
    def __init__(self, feeder, tariff, target, response, params, profiles=None, master_seed=0, name='static'):
        if profiles is not None:
            if profiles.node_count != feeder.node_count:
                raise ConfigurationError("profiles cover %s buses, the feeder has %s"
                                         % (profiles.node_count, feeder.node_count))
            if profiles.steps != target.steps:
                raise ConfigurationError("profiles cover %s steps, the event window %s has %s"
                                         % (profiles.steps, target.window, target.steps))
        self.feeder = feeder
        self.tariff = tariff
        self.target = target
        self.response = response
        self.params = params
        self.profiles = profiles
        self.master_seed = int(master_seed)
        self.name = name
        self._problems = {}

    def steps(self):
        """
        length of the event window
        """
        return self.target.steps

    def with_steps(self, steps):
        """
        the same scenario over an event window of the given length
        """
        return self.replace(target=self.target._replace(window=(self.target.window[0],
                                                                self.target.window[0] + int(steps))))

    def feeder_at(self, t):
        if self.profiles is None:
            return self.feeder
        return self.feeder.with_d_hat(self.profiles.at(t))

    def target_at(self, t):
        """
        event target with p0_tilde(t) = s.d_pre(t) - p_ref
        """
        if self.profiles is None:
            return self.target
        return grid_model.retarget(self.target, self.feeder_at(t))

    def problem_at(self, t):
        key = 0 if self.profiles is None else t
        if key not in self._problems:
            feeder = self.feeder_at(t)
            self._problems[key] = Problem(feeder=feeder, response=self.response, tariff=self.tariff,
                                          target=grid_model.retarget(self.target, feeder), params=self.params)
        return self._problems[key]

    def static(self):
        """
        the same scenario without baseline profiles
        """
        return self.replace(profiles=None, name='static' if self.name == 'timevarying' else self.name)

    def replace(self, **kwargs):
        fields = dict(feeder=self.feeder, tariff=self.tariff, target=self.target, response=self.response,
                      params=self.params, profiles=self.profiles, master_seed=self.master_seed,
                      name=self.name)
        fields.update(kwargs)
        return Scenario(**fields)

    def __getstate__(self):
        state = self.__dict__.copy()
        state['_problems'] = {}
        return state


def _check_overrides(overrides):
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(_OVERRIDES)
    if unknown:
        raise ConfigurationError("unknown scenario overrides %s" % sorted(unknown))
    return overrides


def _draw_beta(stream, n):
    """
    beta_n ~ U[0, 2], redrawing entries below the floor
    """
    beta = stream.uniform(BETA_RANGE[0], BETA_RANGE[1], n)
    low = beta < BETA_FLOOR
    if np.any(low):
        logger.warning("resampled %s sensitivities below the floor %s", int(np.sum(low)), BETA_FLOOR)
    while np.any(low):
        beta[low] = stream.uniform(BETA_RANGE[0], BETA_RANGE[1], int(np.sum(low)))
        low = beta < BETA_FLOOR
    return beta


def _price_box(overrides, delta, beta):
    """
    price box with the upper bound capped at delta_n / beta_n so that the mean response stays non-negative
    """
    x_min = overrides.get('x_min', X_MIN)
    x_max = np.minimum(util.mk_array(overrides.get('x_max', X_MAX), len(beta), 'x_max'), delta / beta)
    if np.any(x_max < util.mk_array(x_min, len(beta), 'x_min')):
        raise ConfigurationError("x_min exceeds delta/beta at some node")
    return grid_model.make_tariff(pi=overrides.get('pi', PI), pi0=overrides.get('pi0', PI0),
                                  omega=overrides.get('omega', OMEGA), x_min=x_min, x_max=x_max)


def _target(feeder, response, tariff, overrides):
    """
    p_ref from the overrides or the midpoint of the reachable interval, raised if the price box can not deliver it.
    The event window spans the static horizon.
    """
    window = (0, overrides.get('steps', STATIC_STEPS))
    lower, upper = grid_model.reference_range(feeder)
    achievable = reference_solvers.max_achievable_reduction(feeder, response.beta, tariff)
    if 'p_ref' in overrides:
        target = grid_model.make_target(feeder, overrides['p_ref'], window)
        if target.p0_tilde > achievable:
            raise InfeasibleProblemError("p_ref = %s needs s.Bx >= %s, the price box reaches %s"
                                         % (target.p_ref, target.p0_tilde, achievable), achievable)
        return target
    target = grid_model.make_target(feeder, 0.5 * (lower + upper), window)
    if target.p0_tilde > achievable:
        p_ref = feeder.p_pre - 0.9 * achievable
        logger.warning("midpoint reference %.4f is out of reach, raised p_ref to %.4f", target.p_ref, p_ref)
        target = grid_model.make_target(feeder, p_ref, window)
    return target


def _params(feeder, response, target, overrides, p0_series=None):
    """
    objective parameters; the default dual cap grows until the saddle point sits safely inside
    """
    p0_series = target.p0_tilde if p0_series is None else p0_series
    kappa, eta = overrides.get('kappa', KAPPA), overrides.get('eta', ETA)
    if 'lambda_cap' in overrides:
        return objective.make_objective_params(kappa, eta, overrides['lambda_cap'])
    params = objective.make_objective_params(kappa, eta,
                                             objective.default_lambda_cap(feeder, response.beta, p0_series))
    return params


def _ensure_cap(scenario, overrides):
    """
    raises the default dual cap until lambda*(t) < 0.9 Lambda at every step; an explicit cap is only checked
    """
    for attempt in range(_CAP_ATTEMPTS):
        try:
            for t in sorted(set(_distinct_steps(scenario))):
                reference_solvers.regularized_saddle_point(*scenario.problem_at(t))
            return scenario
        except DualCapError as err:
            if 'lambda_cap' in overrides:
                raise
            cap = _CAP_GROWTH * scenario.params.lambda_cap
            logger.warning("lambda* = %.4g too close to the cap, raising it to %.4g", err.lambda_star, cap)
            scenario = scenario.replace(params=scenario.params._replace(lambda_cap=cap))
    raise DualCapError("no dual cap up to %s contains lambda* with margin %s"
                       % (scenario.params.lambda_cap, DUAL_CAP_MARGIN), np.nan, scenario.params.lambda_cap)


def _distinct_steps(scenario):
    if scenario.profiles is None:
        return [0]
    seen = {}
    for t in range(scenario.steps()):
        seen.setdefault(scenario.profiles.at(t).tobytes(), t)
    return seen.values()


def _response(feeder, beta, overrides):
    sigma0 = overrides.get('sigma0', SIGMA0_FRACTION * feeder.delta)
    if isinstance(sigma0, str):
        return response_model.load_response({'beta': beta.tolist(), 'sigma0': sigma0,
                                             'zeta': overrides.get('zeta', ZETA),
                                             'family': overrides.get('family', 'gaussian')}, feeder)
    return response_model.make_response(beta, sigma0, overrides.get('zeta', ZETA),
                                        overrides.get('family', 'gaussian'))


def build_static_scenario(nominal_loads, master_seed, overrides=None):
    """
    static loads d_hat = nominal loads with delta_n ~ U[0, 2 d_hat_n] and beta_n ~ U[0, 2] drawn from the scenario
    stream of master_seed

    :param nominal_loads: positive nominal bus loads [kW]
    :param master_seed: integer seed
    :param overrides: dict replacing drawn or default values (kappa, eta, lambda_cap, pi, pi0, omega, x_min, x_max,
        p_ref, sigma0, zeta, family, beta, delta, r, s, steps)
    :return: Scenario
    """
    overrides = _check_overrides(overrides)
    d_hat = util.mk_array(nominal_loads, name='nominal_loads')
    n = len(d_hat)
    if n == 0:
        raise ValidationError("empty load set")
    if np.any(d_hat <= 0):
        raise ValidationError("nominal loads must be positive")
    stream = RandomStreams(master_seed).scenario_stream()
    delta = stream.uniform(0., DELTA_FACTOR * d_hat)
    beta = _draw_beta(stream, n)
    if 'delta' in overrides:
        delta = util.mk_array(overrides['delta'], n, 'delta')
    if 'beta' in overrides:
        beta = util.mk_array(overrides['beta'], n, 'beta')
    feeder = grid_model.make_feeder(d_hat, delta, r=overrides.get('r'), s=overrides.get('s'))
    response = _response(feeder, beta, overrides)
    tariff = _price_box(overrides, feeder.delta, response.beta)
    response_model.check_nonnegative_mean(response, feeder, tariff)
    target = _target(feeder, response, tariff, overrides)
    params = _params(feeder, response, target, overrides)
    scenario = Scenario(feeder, tariff, target, response, params, master_seed=master_seed, name='static')
    scenario = _ensure_cap(scenario, overrides)
    logger.info("static scenario: %s nodes, p_ref %.4f, p0_tilde %.4f, lambda cap %.4g", n, target.p_ref,
                target.p0_tilde, scenario.params.lambda_cap)
    return scenario


def build_timevarying_scenario(nominal_loads, master_seed, overrides=None, profiles=None):
    """
    static scenario parameters plus minute-level baselines over the event window 10:00-15:00

    :param profiles: LoadProfileSet (synthetic profiles of master_seed if None)
    :return: Scenario
    """
    overrides = _check_overrides(overrides)
    solar_fraction = overrides.pop('solar_fraction', SOLAR_FRACTION)
    static = build_static_scenario(nominal_loads, master_seed, overrides)
    if profiles is None:
        profiles = synth_load_profiles(static.feeder.node_count, (DRE_START, DRE_END), master_seed, solar_fraction,
                                       nominal=static.feeder.d_hat)
    scenario = static.replace(profiles=profiles, target=static.target._replace(window=(0, profiles.steps)),
                              name='timevarying')
    p0_series = [scenario.target_at(t).p0_tilde for t in set(_distinct_steps(scenario))]
    if 'lambda_cap' not in overrides:
        cap = max(static.params.lambda_cap, objective.default_lambda_cap(static.feeder, static.response.beta,
                                                                         p0_series))
        scenario = scenario.replace(params=static.params._replace(lambda_cap=cap))
    scenario = _ensure_cap(scenario, overrides)
    logger.info("time-varying scenario: %s steps from %s", profiles.steps, profiles.clock(0))
    return scenario


def build_single_node_scenario(master_seed=0, overrides=None):
    """
    the one-node hand instance: kappa 5, beta 1, s 1, pi 2, pi0 1, d_hat 1, delta 1, p_ref 1.5, X = [0, 1],
    sigma0 0.1, eta 0.01, Lambda 10
    """
    overrides = _check_overrides(overrides)
    feeder = grid_model.make_feeder([1.], overrides.get('delta', [1.]), r=overrides.get('r'), s=overrides.get('s'))
    beta = util.mk_array(overrides.get('beta', 1.), 1, 'beta')
    response = response_model.make_response(beta, overrides.get('sigma0', 0.1), overrides.get('zeta', ZETA),
                                            overrides.get('family', 'gaussian'))
    tariff = grid_model.make_tariff(pi=overrides.get('pi', PI), pi0=overrides.get('pi0', PI0),
                                    omega=overrides.get('omega', OMEGA), x_min=overrides.get('x_min', 0.),
                                    x_max=overrides.get('x_max', 1.))
    response_model.check_nonnegative_mean(response, feeder, tariff)
    target = grid_model.make_target(feeder, overrides.get('p_ref', 1.5), (0, overrides.get('steps', STATIC_STEPS)))
    params = objective.make_objective_params(overrides.get('kappa', KAPPA), overrides.get('eta', ETA),
                                             overrides.get('lambda_cap', 10.))
    return Scenario(feeder, tariff, target, response, params, master_seed=master_seed, name='single')


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def scenario_document(scenario):
    """
    plain-data form of a scenario, readable by scenario_from_document
    """
    tariff = scenario.tariff
    doc = {'name': scenario.name,
           'master_seed': scenario.master_seed,
           'feeder': grid_model.feeder_document(scenario.feeder),
           'response': response_model.response_document(scenario.response),
           'tariff': {'pi': tariff.pi, 'pi0': tariff.pi0, 'omega': tariff.omega, 'x_min': _plain(tariff.x_min),
                      'x_max': _plain(tariff.x_max)},
           'target': {'p_ref': scenario.target.p_ref, 'window': list(scenario.target.window)},
           'params': dict(scenario.params._asdict()),
           'profiles': None}
    if scenario.profiles is not None:
        doc['profiles'] = {'start': scenario.profiles.start, 'resolution': scenario.profiles.resolution,
                           'loads': scenario.profiles.loads.tolist()}
    return doc


def scenario_from_document(doc):
    try:
        feeder = grid_model.load_feeder(doc['feeder'])
        response = response_model.load_response(doc['response'], feeder)
        tariff = grid_model.make_tariff(**doc['tariff'])
        target = grid_model.make_target(feeder, doc['target']['p_ref'], tuple(doc['target']['window']))
        params = objective.make_objective_params(**doc['params'])
        profiles = doc.get('profiles')
    except (KeyError, TypeError) as err:
        raise ConfigurationError("malformed scenario document: %s" % err)
    if profiles is not None:
        profiles = LoadProfileSet(loads=util.frozen(profiles['loads']), resolution=int(profiles['resolution']),
                                  start=int(profiles['start']))
    return Scenario(feeder, tariff, target, response, params, profiles=profiles,
                    master_seed=doc.get('master_seed', 0), name=doc.get('name', 'static'))


def save_scenario(scenario, path):
    with open(path, 'w') as f:
        yaml.safe_dump(scenario_document(scenario), f, default_flow_style=None, sort_keys=False)


def load_scenario(path):
    """
    reads a scenario written by save_scenario
    """
    with open(path) as f:
        doc = yaml.safe_load(f)
    if not isinstance(doc, dict):
        raise ConfigurationError("scenario file %s is not a mapping" % path)
    return scenario_from_document(doc)
