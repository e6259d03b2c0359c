__author__ = 'drsim developers'

"""
Monte Carlo ensembles of closed-loop (and open-loop dispatch) runs with per-step statistics
"""

import logging
import os
from collections import namedtuple

import numpy as np
from joblib import Parallel, delayed

from drsim.constants import N_RUNS
from drsim.exceptions import ConfigurationError
from drsim.Feeder.response_model import RandomStreams
from drsim.Pricing import algorithms, reference_solvers

logger = logging.getLogger(__name__)

THREADS_ENV = 'DRSIM_THREADS'


class TrajectoryStats(namedtuple('TrajectoryStats', ['steps', 'error_mean', 'error_stderr', 'p0_mean', 'p0_stderr',
                                                     'cost_mean', 'cost_stderr', 'expected_cost_mean',
                                                     'price_mean', 'dual_mean', 'runs', 'failures',
                                                     'stderr_flagged'])):
    """
    per-step ensemble mean and standard error of the distance e(t) = |z(t) - z*(t)|, the aggregate power p0(t)
    and the realized cost, plus the mean prices and duals. stderr_flagged marks undefined standard errors (one run).
    """
    __slots__ = ()

    @property
    def steps_count(self):
        return len(self.steps)


def worker_count():
    """
    number of joblib workers, from the environment variable DRSIM_THREADS (1 if unset)
    """
    value = os.environ.get(THREADS_ENV, '1')
    try:
        n_jobs = int(value)
    except ValueError:
        raise ConfigurationError("%s must be an integer, got '%s'" % (THREADS_ENV, value))
    if n_jobs == 0:
        raise ConfigurationError("%s must not be 0" % THREADS_ENV)
    return n_jobs


def optimal_path(scenario, steps=None):
    """
    saddle points z*(t) of every step, solved once per distinct baseline

    :return: list of PrimalDualPoint
    """
    steps = scenario.steps() if steps is None else steps
    cache = {}
    path = []
    for t in range(steps):
        problem = scenario.problem_at(t)
        key = problem.feeder.d_hat.tobytes()
        if key not in cache:
            cache[key] = reference_solvers.regularized_saddle_point(*problem)
        path.append(cache[key])
    return path


class _Accumulator(object):
    """
    running mean and sum of squared deviations, updated in run order
    """
    def __init__(self):
        self.count = 0
        self.mean = None
        self._m2 = None

    def add(self, sample):
        sample = np.asarray(sample, dtype=float)
        self.count += 1
        if self.mean is None:
            self.mean = sample.copy()
            self._m2 = np.zeros_like(sample)
            return
        delta = sample - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (sample - self.mean)

    def stderr(self):
        if self.count < 2:
            return np.full_like(self.mean, np.nan)
        return np.sqrt(self._m2 / (self.count - 1) / self.count)


def _single_run(scenario, cfg, run, master_seed, steps, z0, optimum, schedule):
    """
    one ensemble member; returns per-step arrays or the failure message
    """
    plant = algorithms.SimulatedPlant(scenario, RandomStreams(master_seed).run_stream(run))
    if schedule is None:
        trajectory = algorithms.run_online(cfg, scenario, plant, steps=steps, z0=z0)
    else:
        trajectory = algorithms.run_dispatch(schedule, scenario, plant, cfg.variant, steps=steps)
    if trajectory.status == algorithms.FAILED or len(trajectory) < steps:
        return {'run': run, 'error': trajectory.error}
    stacked = np.column_stack([trajectory.prices, trajectory.duals])
    return {'run': run, 'error': None,
            'distance': np.linalg.norm(stacked - optimum, axis=1),
            'p0': trajectory.power,
            'cost': trajectory.realized_costs,
            'expected_cost': trajectory.expected_costs,
            'price': trajectory.prices,
            'dual': trajectory.duals}


def monte_carlo_ensemble(scenario, cfg, runs=N_RUNS, master_seed=None, steps=None, z0=None, optimum=None,
                         n_jobs=None, chunk_size=None):
    """
    runs independent realizations of a scheme on a scenario and reduces them to per-step statistics.
    Run k draws from its own stream, so the result depends on master_seed only, not on the worker count.
    StochasticInPO runs in closed loop; offline variants dispatch their converged prices.

    :param scenario: Scenario
    :param cfg: SolverConfig
    :param runs: ensemble size M >= 1
    :param master_seed: seed of the run streams (scenario.master_seed if None)
    :param steps: horizon (scenario.steps() if None)
    :param z0: start point of the closed loop
    :param optimum: precomputed optimal path (list of PrimalDualPoint)
    :param n_jobs: joblib workers (DRSIM_THREADS if None)
    :return: TrajectoryStats
    """
    if runs < 1:
        raise ConfigurationError("ensemble size must be at least 1, got %s" % runs)
    steps = scenario.steps() if steps is None else steps
    master_seed = scenario.master_seed if master_seed is None else master_seed
    n_jobs = worker_count() if n_jobs is None else n_jobs
    if optimum is None:
        optimum = optimal_path(scenario, steps)
    optimum = np.array([z.stacked() for z in optimum])
    schedule = None
    if cfg.variant in algorithms.OFFLINE_VARIANTS:
        schedule = reference_solvers.offline_schedule(cfg, scenario, steps)
    chunk_size = chunk_size or max(1, 4 * abs(n_jobs))
    acc = dict((key, _Accumulator()) for key in ('distance', 'p0', 'cost', 'expected_cost', 'price', 'dual'))
    failures = 0
    for start in range(0, runs, chunk_size):
        results = Parallel(n_jobs=n_jobs)(
            delayed(_single_run)(scenario, cfg, run, master_seed, steps, z0, optimum, schedule)
            for run in range(start, min(runs, start + chunk_size)))
        for result in results:
            if result['error'] is not None:
                failures += 1
                logger.warning("run %s failed: %s", result['run'], result['error'])
                continue
            for key, accumulator in acc.items():
                accumulator.add(result[key])
        logger.debug("%s: %s of %s runs done", cfg.variant, min(runs, start + chunk_size), runs)
    completed = runs - failures
    logger.info("%s ensemble: %s runs completed, %s failed", cfg.variant, completed, failures)
    if completed == 0:
        nan = np.full(steps, np.nan)
        return TrajectoryStats(steps=np.arange(steps), error_mean=nan, error_stderr=nan, p0_mean=nan,
                               p0_stderr=nan, cost_mean=nan, cost_stderr=nan, expected_cost_mean=nan,
                               price_mean=np.full((steps, optimum.shape[1] - 1), np.nan), dual_mean=nan,
                               runs=0, failures=failures, stderr_flagged=True)
    return TrajectoryStats(steps=np.arange(steps),
                           error_mean=acc['distance'].mean, error_stderr=acc['distance'].stderr(),
                           p0_mean=acc['p0'].mean, p0_stderr=acc['p0'].stderr(),
                           cost_mean=acc['cost'].mean, cost_stderr=acc['cost'].stderr(),
                           expected_cost_mean=acc['expected_cost'].mean,
                           price_mean=acc['price'].mean, dual_mean=acc['dual'].mean,
                           runs=completed, failures=failures, stderr_flagged=completed < 2)
