__author__ = 'drsim developers'

"""
command line surface: run a scheme, compare the four schemes, sweep the sensitivity estimates and verify the
error bounds; every command writes CSV tables to the output directory

exit codes: 0 success, 2 configuration, 3 divergence or failed runs, 4 bound violation
"""

import argparse
import logging
import os
import sys
from collections import namedtuple

import numpy as np
import pandas as pd

from drsim import util
from drsim.constants import EPSILON, N_RUNS, VARIANTS, STDERR_MARGIN, TAIL_FRACTION, STATIC_SEED
from drsim.exceptions import ConfigurationError, InfeasibleProblemError, DualCapError, CertifiedRegimeError
from drsim.exceptions import DivergenceError, MeasurementError, BoundViolationError, DrsimError
from drsim.Analysis import bounds, monte_carlo
from drsim.Feeder import grid_model
from drsim.Feeder.response_model import RandomStreams
from drsim.Pricing import algorithms, reference_solvers
from drsim.Scenarios import scenarios, load_profiles

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_BOUND = 4

BUILTIN_SCENARIOS = ('static', 'timevarying', 'single')
DEFAULT_SCALES = '0.25,0.5,1,2,4'


class RunOptions(namedtuple('RunOptions', ['scenario', 'seed', 'variants', 'epsilon', 'beta_hat', 'runs', 'out',
                                           'literal', 'steps', 'start', 'strict', 'floor_scale', 'beta_scales',
                                           'feeder', 'profiles'])):
    """
    everything a command needs: scenario source (built-in name or YAML file) and seed, schemes, solver settings,
    ensemble size and output directory
    """
    __slots__ = ()


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--scenario', default='static',
                        help="built-in scenario (static, timevarying, single) or a scenario YAML file")
    common.add_argument('--seed', type=int, default=None,
                        help="master seed (%s for the built-in static scenario, 0 otherwise)" % STATIC_SEED)
    common.add_argument('--runs', type=int, default=N_RUNS, help="Monte Carlo runs")
    common.add_argument('--epsilon', type=float, default=None, help="step size")
    common.add_argument('--beta-hat', default=None,
                        help="operator sensitivities: true, ones, a scalar or a comma separated list")
    common.add_argument('--out', default='.', help="output directory")
    common.add_argument('--literal-paper-equations', dest='literal', action='store_true',
                        help="printed dual sign of the stochastic step and true beta in the InPO dual step")
    common.add_argument('--steps', type=int, default=None, help="horizon of static scenarios")
    common.add_argument('--start', choices=('zero', 'optimum'), default='zero', help="start point of the loop")
    common.add_argument('--feeder', default=None, help="feeder YAML with the nominal loads")
    common.add_argument('--profiles', default=None, help="bus_id,t,kw minute data for the time-varying scenario")
    common.add_argument('--verbose', action='store_true')

    parser = argparse.ArgumentParser(prog='drsim', description="real-time demand response pricing simulator")
    sub = parser.add_subparsers(dest='command')
    run = sub.add_parser('run', parents=[common], help="ensemble of one scheme")
    run.add_argument('--variant', choices=VARIANTS, default='StochasticInPO')
    run.add_argument('--strict', action='store_true', help="require a certified step size")
    sub.add_parser('compare', parents=[common], help="all four schemes on one scenario")
    sweep = sub.add_parser('sweep-beta', parents=[common], help="StochasticInPO for scaled estimates beta_hat")
    sweep.add_argument('--beta-scale', default=DEFAULT_SCALES, help="comma separated scalings of the true beta")
    verify = sub.add_parser('verify-bounds', parents=[common], help="empirical error against the certified bound")
    verify.add_argument('--floor-scale', type=float, default=1., help="multiplies the theoretical floor")
    return parser


def _float_list(text, name):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ConfigurationError("cannot parse %s '%s'" % (name, text))


def make_options(args):
    """
    RunOptions from parsed arguments
    """
    variants = VARIANTS
    if args.command == 'run':
        variants = (args.variant,)
    elif args.command in ('sweep-beta', 'verify-bounds'):
        variants = ('StochasticInPO',)
    beta_hat = args.beta_hat
    if beta_hat is None:
        beta_hat = 'ones' if args.command == 'compare' else 'true'
    if args.runs < 1:
        raise ConfigurationError("--runs must be at least 1, got %s" % args.runs)
    if args.steps is not None and args.steps < 1:
        raise ConfigurationError("--steps must be at least 1, got %s" % args.steps)
    scales = _float_list(getattr(args, 'beta_scale', DEFAULT_SCALES), 'beta scales')
    seed = args.seed
    if seed is None:
        seed = STATIC_SEED if args.scenario == 'static' else 0
    if not scales or min(scales) <= 0:
        raise ConfigurationError("beta scales must be positive")
    return RunOptions(scenario=args.scenario, seed=seed, variants=variants, epsilon=args.epsilon,
                      beta_hat=beta_hat, runs=args.runs, out=args.out, literal=args.literal, steps=args.steps,
                      start=args.start, strict=getattr(args, 'strict', False),
                      floor_scale=getattr(args, 'floor_scale', 1.), beta_scales=scales, feeder=args.feeder,
                      profiles=args.profiles)


def make_scenario(opts):
    """
    builds or loads the scenario of a RunOptions
    """
    overrides = {} if opts.steps is None else {'steps': opts.steps}
    if opts.scenario == 'single':
        return scenarios.build_single_node_scenario(opts.seed, overrides)
    if opts.scenario in ('static', 'timevarying'):
        loads = grid_model.nominal_loads(opts.feeder)
        if opts.scenario == 'static':
            return scenarios.build_static_scenario(loads, opts.seed, overrides)
        profiles = None
        if opts.profiles is not None:
            ids = grid_model.load_feeder(opts.feeder or grid_model.default_feeder_path()).ids
            profiles = load_profiles.load_profiles_csv(opts.profiles, loads, ids)
        return scenarios.build_timevarying_scenario(loads, opts.seed, overrides, profiles)
    if not os.path.isfile(opts.scenario):
        raise ConfigurationError("scenario '%s' is neither built-in %s nor a file" % (opts.scenario,
                                                                                  BUILTIN_SCENARIOS))
    scenario = scenarios.load_scenario(opts.scenario)
    if opts.steps is not None and scenario.profiles is None:
        scenario = scenario.with_steps(opts.steps)
    return scenario


def parse_beta_hat(text, response):
    """
    'true' gives None (the true sensitivities), 'ones' the sign approximation, a scalar is broadcast
    """
    if text is None or text == 'true':
        return None
    if text == 'ones':
        return np.ones(response.node_count)
    values = _float_list(text, 'beta_hat')
    if len(values) == 1:
        return np.full(response.node_count, values[0])
    if len(values) != response.node_count:
        raise ConfigurationError("beta_hat has %s entries for %s nodes" % (len(values), response.node_count))
    return np.array(values)


def _steps(opts, scenario):
    steps = scenario.steps()
    if opts.steps is not None and scenario.profiles is not None:
        if opts.steps > steps:
            raise ConfigurationError("--steps %s exceeds the %s profile steps" % (opts.steps, steps))
        steps = opts.steps
    return steps


def _start(opts, optimum):
    return optimum[0] if opts.start == 'optimum' else None


def _epsilon(opts):
    return EPSILON if opts.epsilon is None else opts.epsilon


def _finite(values):
    """
    undefined standard errors (a single run) are written as zero
    """
    return np.nan_to_num(np.asarray(values, dtype=float), nan=0.)


def write_csv(frame, out, name):
    if not os.path.isdir(out):
        os.makedirs(out)
    path = os.path.join(out, name)
    frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n', encoding='utf-8')
    logger.info("wrote %s", path)
    return path


def _check_runs(stats, variant):
    if stats.runs == 0:
        raise MeasurementError("all %s runs of %s failed" % (stats.failures, variant))


def _floor_at(problem, epsilon, beta_hat):
    """
    floor of the static bound at epsilon if certified, otherwise at the certified step; returns (floor, step)
    """
    bp = bounds.bound_params(problem, epsilon, beta_hat, strict=False)
    if not np.isfinite(bp.c_eps):
        epsilon = bounds.certified_step(bp.nu, bp.L)
    return float(bounds.static_error_bound(np.inf, 0., bp, epsilon)), epsilon


def _summary_row(variant, stats, scenario, steps, optimum, beta_hat, epsilon):
    final = scenario.problem_at(steps - 1)
    x_lcqp, certificate = reference_solvers.solve_lcqp(*final)
    z_star = optimum[steps - 1]
    terminal_p0 = float(util.tail_mean(stats.p0_mean, TAIL_FRACTION))
    floor, floor_step = _floor_at(final, epsilon, beta_hat)
    row = {'variant': variant, 'runs': stats.runs, 'failures': stats.failures,
           'stderr_flagged': int(stats.stderr_flagged),
           'p_ref': final.target.p_ref, 'terminal_p0': terminal_p0,
           'terminal_p0_stderr': float(_finite(stats.p0_stderr)[-1]),
           'terminal_gap': abs(terminal_p0 - final.target.p_ref),
           'terminal_cost': float(util.tail_mean(stats.cost_mean, TAIL_FRACTION)),
           'terminal_error': float(util.tail_mean(stats.error_mean, TAIL_FRACTION)),
           'lambda_star': z_star.lam, 'regularization_gap': final.params.eta * z_star.lam,
           'lcqp_multiplier': certificate.multiplier, 'floor': floor, 'floor_epsilon': floor_step}
    for i, (x_opt, x_ref) in enumerate(zip(z_star.x, x_lcqp)):
        row['x_star_%s' % (i + 1)] = x_opt
        row['x_lcqp_%s' % (i + 1)] = x_ref
    return row


def _trajectory_frame(stats):
    frame = pd.DataFrame({'t': stats.steps})
    for i in range(stats.price_mean.shape[1]):
        frame['x_%s' % (i + 1)] = stats.price_mean[:, i]
    frame['lambda'] = stats.dual_mean
    frame['p0'] = stats.p0_mean
    frame['p0_stderr'] = _finite(stats.p0_stderr)
    frame['realized_cost'] = stats.cost_mean
    frame['realized_cost_stderr'] = _finite(stats.cost_stderr)
    frame['expected_cost'] = stats.expected_cost_mean
    frame['err_to_opt'] = stats.error_mean
    frame['err_stderr'] = _finite(stats.error_stderr)
    return frame


def _ensemble(opts, scenario, variant, beta_hat, steps, optimum, epsilon=None):
    cfg = algorithms.make_solver_config(epsilon=_epsilon(opts) if epsilon is None else epsilon, variant=variant,
                                        beta_hat=beta_hat, literal=opts.literal, strict=opts.strict)
    stats = monte_carlo.monte_carlo_ensemble(scenario, cfg, opts.runs, opts.seed, steps, _start(opts, optimum),
                                             optimum)
    _check_runs(stats, variant)
    return stats


def cmd_run(opts):
    """
    ensemble of one scheme: trajectory.csv with per-step means and summary.csv with terminal statistics
    """
    scenario = make_scenario(opts)
    steps = _steps(opts, scenario)
    beta_hat = parse_beta_hat(opts.beta_hat, scenario.response)
    optimum = monte_carlo.optimal_path(scenario, steps)
    variant = opts.variants[0]
    stats = _ensemble(opts, scenario, variant, beta_hat, steps, optimum)
    write_csv(_trajectory_frame(stats), opts.out, 'trajectory.csv')
    summary = _summary_row(variant, stats, scenario, steps, optimum, beta_hat, _epsilon(opts))
    write_csv(pd.DataFrame([summary]), opts.out, 'summary.csv')
    logger.info("%s: terminal |E p0 - p_ref| = %.6g over %s runs", variant, summary['terminal_gap'], stats.runs)
    return EXIT_OK


def cmd_compare(opts):
    """
    per-step ensemble means of power and cost for PO, InPO, PS and StochasticInPO; offline schemes dispatch their
    converged prices
    """
    scenario = make_scenario(opts)
    steps = _steps(opts, scenario)
    beta_hat = parse_beta_hat(opts.beta_hat, scenario.response)
    optimum = monte_carlo.optimal_path(scenario, steps)
    power = pd.DataFrame({'t': np.arange(steps),
                          'p_ref': [scenario.problem_at(t).target.p_ref for t in range(steps)]})
    cost = pd.DataFrame({'t': np.arange(steps)})
    rows = []
    for variant in opts.variants:
        stats = _ensemble(opts, scenario, variant, beta_hat, steps, optimum)
        power[variant] = stats.p0_mean
        power[variant + '_stderr'] = _finite(stats.p0_stderr)
        cost[variant] = stats.cost_mean
        cost[variant + '_stderr'] = _finite(stats.cost_stderr)
        rows.append(_summary_row(variant, stats, scenario, steps, optimum, beta_hat, _epsilon(opts)))
        logger.info("%s: terminal |E p0 - p_ref| = %.6g, cost %.6g", variant, rows[-1]['terminal_gap'],
                    rows[-1]['terminal_cost'])
    write_csv(power, opts.out, 'compare_p0.csv')
    write_csv(cost, opts.out, 'compare_cost.csv')
    write_csv(pd.DataFrame(rows), opts.out, 'compare_summary.csv')
    return EXIT_OK


def _lcqp_path(scenario, steps):
    cache = {}
    path = []
    for t in range(steps):
        problem = scenario.problem_at(t)
        key = problem.feeder.d_hat.tobytes()
        if key not in cache:
            cache[key] = reference_solvers.solve_lcqp(*problem)[0]
        path.append(cache[key])
    return np.array(path)


def cmd_sweep_beta(opts):
    """
    StochasticInPO with beta_hat = scale * beta for every scale: sweep.csv with the asymptotic distance of the mean
    prices to the constrained optimum, the terminal power gap and the theoretical floor, and sweep_trajectory.csv
    with the distance per step
    """
    scenario = make_scenario(opts)
    steps = _steps(opts, scenario)
    optimum = monte_carlo.optimal_path(scenario, steps)
    x_star = _lcqp_path(scenario, steps)
    saddle = np.array([z.x for z in optimum])
    beta = scenario.response.beta
    final = scenario.problem_at(steps - 1)
    rows = []
    distances = pd.DataFrame({'t': np.arange(steps)})
    for scale in opts.beta_scales:
        beta_hat = scale * beta
        stats = _ensemble(opts, scenario, 'StochasticInPO', beta_hat, steps, optimum)
        distance = np.linalg.norm(stats.price_mean - x_star, axis=1)
        distances['scale_%g' % scale] = distance
        terminal_p0 = float(util.tail_mean(stats.p0_mean, TAIL_FRACTION))
        floor, floor_step = _floor_at(final, _epsilon(opts), beta_hat)
        rows.append({'beta_scale': scale, 'beta_err': float(np.linalg.norm(beta_hat - beta)),
                     'distance_to_lcqp': float(util.tail_mean(distance, TAIL_FRACTION)),
                     'distance_to_saddle': float(util.tail_mean(np.linalg.norm(stats.price_mean - saddle, axis=1),
                                                                TAIL_FRACTION)),
                     'p0_gap': abs(terminal_p0 - final.target.p_ref),
                     'p0_gap_stderr': float(_finite(stats.p0_stderr)[-1]),
                     'regularization_gap': final.params.eta * optimum[steps - 1].lam,
                     'floor': floor, 'floor_epsilon': floor_step, 'runs': stats.runs})
    write_csv(pd.DataFrame(rows), opts.out, 'sweep.csv')
    write_csv(distances, opts.out, 'sweep_trajectory.csv')
    return EXIT_OK


def cmd_verify_bounds(opts):
    """
    runs StochasticInPO at a certified step (nu / L^2 unless --epsilon is given) and checks that the ensemble mean
    distance to the optimal path stays below the bound plus three standard errors at every step. Writes bounds.csv
    and prints the constants.

    :raises BoundViolationError: at the first violating step
    """
    scenario = make_scenario(opts)
    steps = _steps(opts, scenario)
    first = scenario.problem_at(0)
    beta_hat = parse_beta_hat(opts.beta_hat, scenario.response)
    optimum = monte_carlo.optimal_path(scenario, steps)
    delta_path = bounds.path_variation(optimum)
    nu = bounds.strong_monotonicity_modulus(first.params, first.response)
    lip = bounds.lipschitz_constant(first.params, first.feeder, first.response)
    epsilon = bounds.certified_step(nu, lip) if opts.epsilon is None else opts.epsilon
    bp = bounds.bound_params(first, epsilon, beta_hat, Delta=delta_path,
                             stream=RandomStreams(opts.seed).bound_stream())
    stats = _ensemble(opts, scenario, 'StochasticInPO', beta_hat, steps, optimum, epsilon=epsilon)
    e0 = float(stats.error_mean[0])
    bound = bounds.tracking_error_bound(stats.steps, e0, bp, epsilon, delta_path, opts.floor_scale)
    margin = STDERR_MARGIN * _finite(stats.error_stderr)
    tolerance = 1e-12 * max(1., e0)
    ok = stats.error_mean <= bound + margin + tolerance
    write_csv(pd.DataFrame({'t': stats.steps, 'error_mean': stats.error_mean,
                            'error_stderr': _finite(stats.error_stderr), 'bound': bound, 'margin': margin,
                            'ok': ok.astype(int)}), opts.out, 'bounds.csv')
    for name, value in (('nu', bp.nu), ('L', bp.L), ('c_eps', bp.c_eps), ('B', bp.B_const),
                        ('e_xi_bar', bp.e_xi_bar), ('Delta', bp.Delta), ('epsilon', epsilon),
                        ('beta_err', bp.beta_err)):
        print("%-9s %.10g" % (name, value))
    if not np.all(ok):
        step = int(stats.steps[np.flatnonzero(~ok)[0]])
        raise BoundViolationError("mean error %.6g exceeds the bound %.6g at step %s"
                                  % (stats.error_mean[step], bound[step], step), step)
    logger.info("bound holds at all %s steps", steps)
    return EXIT_OK


COMMANDS = {'run': cmd_run, 'compare': cmd_compare, 'sweep-beta': cmd_sweep_beta,
            'verify-bounds': cmd_verify_bounds}


def main(argv=None):
    """
    entry point of the drsim command

    :param argv: argument list (sys.argv[1:] if None)
    :return: exit code
    """
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_CONFIG if err.code else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    try:
        opts = make_options(args)
        return COMMANDS[args.command](opts)
    except BoundViolationError as err:
        logger.error("bound violated: %s", err)
        return EXIT_BOUND
    except (DivergenceError, MeasurementError) as err:
        logger.error("run failed: %s", err)
        return EXIT_DIVERGENCE
    except (ConfigurationError, InfeasibleProblemError, DualCapError, CertifiedRegimeError) as err:
        logger.error("configuration error: %s", err)
        return EXIT_CONFIG
    except (DrsimError, OSError) as err:
        logger.error("%s", err)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
