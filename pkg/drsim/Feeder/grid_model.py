__author__ = 'drsim developers'

"""
feeder, tariff and demand response event target

vectors index the customer nodes 1..N; the substation (node 0) carries no load and is not stored
"""

import logging
import os
from collections import namedtuple

import numpy as np
import yaml

from drsim import util
from drsim.constants import PI, PI0, OMEGA, X_MIN, X_MAX
from drsim.exceptions import ConfigurationError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_FEEDER = 'ieee37_feeder.yaml'


class FeederModel(namedtuple('FeederModel', ['s', 'd_hat', 'delta', 'r', 'ids'])):
    """
    node-indexed baseline loads d_hat, flexible capacities delta, generation r and aggregation coefficients s
    """
    __slots__ = ()

    @property
    def node_count(self):
        return len(self.d_hat)

    @property
    def d_pre(self):
        """
        pre-event demand d_hat + delta - r
        """
        return self.d_hat + self.delta - self.r

    @property
    def p_pre(self):
        """
        aggregate pre-event power s.d_pre
        """
        return float(self.s.dot(self.d_pre))

    def with_d_hat(self, d_hat):
        """
        same feeder with new inflexible baseline loads (used along time-varying profiles)
        """
        d_hat = util.mk_array(d_hat, self.node_count, 'd_hat')
        util.check_finite(d_hat, 'd_hat')
        return self._replace(d_hat=util.frozen(d_hat))


class TariffParams(namedtuple('TariffParams', ['pi', 'pi0', 'omega', 'x_min', 'x_max'])):
    """
    retail rate pi, utility energy cost pi0, surcharge omega and the price adjustment box [x_min, x_max].
    x_min and x_max are scalars or per-node vectors.
    """
    __slots__ = ()

    def bounds(self, n):
        """
        :param n: number of nodes
        :return: lower and upper bound vectors of the box X
        """
        return util.mk_array(self.x_min, n, 'x_min'), util.mk_array(self.x_max, n, 'x_max')


class DreTarget(namedtuple('DreTarget', ['p_ref', 'p0_tilde', 'window'])):
    """
    desired upper bound p_ref on the aggregate power, p0_tilde = s.d_pre - p_ref, and the event window (start, end)
    """
    __slots__ = ()

    @property
    def steps(self):
        return self.window[1] - self.window[0]


def make_feeder(d_hat, delta, r=None, s=None, ids=None):
    """
    builds a validated FeederModel. Missing r defaults to zero, missing s to the all-ones (meter aggregation) vector.

    :param d_hat: inflexible baseline demand [kW]
    :param delta: flexible capacity [kW], >= 0
    :param r: non-dispatchable generation [kW]
    :param s: aggregation coefficients
    :param ids: node labels
    :return: FeederModel
    """
    d_hat = util.mk_array(d_hat, name='d_hat')
    n = len(d_hat)
    if n < 1:
        raise ValidationError("a feeder needs at least one load node")
    delta = util.mk_array(delta, n, 'delta')
    r = np.zeros(n) if r is None else util.mk_array(r, n, 'r')
    s = np.ones(n) if s is None else util.mk_array(s, n, 's')
    for name, vec in (('d_hat', d_hat), ('delta', delta), ('r', r), ('s', s)):
        util.check_finite(vec, name)
    if np.any(delta < 0):
        raise ValidationError("flexible capacity delta must be non-negative, got min %s" % np.min(delta))
    if ids is None:
        ids = tuple(range(1, n + 1))
    elif len(ids) != n:
        raise ConfigurationError("got %s node ids for %s nodes" % (len(ids), n))
    return FeederModel(s=util.frozen(s), d_hat=util.frozen(d_hat), delta=util.frozen(delta), r=util.frozen(r),
                       ids=tuple(ids))


def make_tariff(pi=PI, pi0=PI0, omega=OMEGA, x_min=X_MIN, x_max=X_MAX):
    """
    builds validated tariff parameters
    """
    if not pi > 0:
        raise ValidationError("retail rate pi must be positive, got %s" % pi)
    lo, hi = np.asarray(x_min, dtype=float), np.asarray(x_max, dtype=float)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValidationError("price bounds must be finite")
    if np.any(lo > hi):
        raise ConfigurationError("empty price box: x_min > x_max")
    if lo.ndim == 0:
        x_min = float(lo)
    else:
        x_min = util.frozen(lo)
    if hi.ndim == 0:
        x_max = float(hi)
    else:
        x_max = util.frozen(hi)
    return TariffParams(pi=float(pi), pi0=float(pi0), omega=float(omega), x_min=x_min, x_max=x_max)


def make_target(feeder, p_ref, window=(0, 1)):
    """
    :param feeder: FeederModel
    :param p_ref: desired upper bound on the aggregate power [kW]
    :param window: (start, end) step indices of the event
    :return: DreTarget with p0_tilde consistent with feeder
    """
    if window[1] <= window[0]:
        raise ConfigurationError("event window %s is empty" % (window,))
    return DreTarget(p_ref=float(p_ref), p0_tilde=feeder.p_pre - float(p_ref), window=(int(window[0]), int(window[1])))


def retarget(target, feeder):
    """
    recomputes p0_tilde for a feeder whose baseline changed
    """
    return target._replace(p0_tilde=feeder.p_pre - target.p_ref)


def reference_range(feeder):
    """
    interval of references reachable without curtailing inflexible demand: [s.(d_hat - r), s.(d_hat + delta - r)]
    """
    lower = float(feeder.s.dot(feeder.d_hat - feeder.r))
    return lower, lower + float(feeder.s.dot(feeder.delta))


def aggregate_power(feeder, d_hat_now, w):
    """
    p0(w) = s.(d_hat + w - r)

    :param feeder: FeederModel
    :param d_hat_now: inflexible demand at the current step [kW]
    :param w: realized flexible load [kW]
    :return: aggregate power [kW]
    """
    n = feeder.node_count
    d_hat_now = np.asarray(d_hat_now, dtype=float)
    w = np.asarray(w, dtype=float)
    util.check_length(d_hat_now, n, 'd_hat_now')
    util.check_length(w, n, 'w')
    return float(feeder.s.dot(d_hat_now + w - feeder.r))


def regulation_error(p0_value, target):
    """
    xi = p0 - p_ref
    """
    return p0_value - target.p_ref


def _node_table(config_doc):
    """
    reads the per-node columns from either a list of node records or from column vectors
    """
    if 'nodes' in config_doc:
        records = config_doc['nodes']
        if not records:
            raise ConfigurationError("feeder document has an empty node list")
        table = {}
        for key in ('d_hat', 'delta', 'r', 's'):
            values = [rec.get(key) for rec in records]
            given = [v is not None for v in values]
            if all(given):
                table[key] = values
            elif any(given):
                if key in ('r', 's'):
                    raise ConfigurationError("entry '%s' must be given for all nodes or for none" % key)
                raise ConfigurationError("entry '%s' is missing for some nodes" % key)
        table['ids'] = [rec.get('id', i + 1) for i, rec in enumerate(records)]
        return table
    return dict((key, config_doc[key]) for key in ('d_hat', 'delta', 'r', 's', 'ids') if key in config_doc)


def load_feeder(config_doc):
    """
    builds a FeederModel from a configuration document

    :param config_doc: dict (parsed YAML) or path to a YAML file. Per-node records {id, d_hat, delta, r, s}
        under 'nodes', or column vectors d_hat, delta, r, s. 'aggregation: meter' selects s = 1.
    :return: FeederModel
    """
    if isinstance(config_doc, str):
        with open(config_doc) as f:
            config_doc = yaml.safe_load(f)
    if not isinstance(config_doc, dict):
        raise ConfigurationError("feeder document must be a mapping")
    table = _node_table(config_doc)
    for key in ('d_hat', 'delta'):
        if key not in table:
            raise ConfigurationError("feeder document lacks '%s'" % key)
    d_hat = util.mk_array(table['d_hat'], name='d_hat')
    n = len(d_hat)
    delta = util.mk_array(table['delta'], name='delta')
    util.check_length(delta, n, 'delta')
    r = table.get('r')
    if r is not None:
        r = util.mk_array(r, name='r')
        util.check_length(r, n, 'r')
    s = table.get('s')
    if config_doc.get('aggregation', 'meter' if s is None else 'explicit') == 'meter':
        if s is not None:
            logger.warning("aggregation 'meter' overrides the explicit coefficients s")
        s = None
    elif s is None:
        raise ConfigurationError("aggregation 'explicit' requires coefficients s")
    else:
        s = util.mk_array(s, name='s')
        util.check_length(s, n, 's')
    feeder = make_feeder(d_hat, delta, r=r, s=s, ids=table.get('ids'))
    logger.debug("loaded feeder with %s nodes, pre-event power %.4f", n, feeder.p_pre)
    return feeder


def feeder_document(feeder):
    """
    column form of a FeederModel, readable by load_feeder
    """
    return {'aggregation': 'explicit',
            'ids': list(feeder.ids),
            'd_hat': feeder.d_hat.tolist(),
            'delta': feeder.delta.tolist(),
            'r': feeder.r.tolist(),
            's': feeder.s.tolist()}


def default_feeder_path():
    """
    path of the bundled 25 load bus dataset
    """
    return os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'PackageData', DEFAULT_FEEDER))


def nominal_loads(path=None):
    """
    nominal inflexible loads of a feeder document (the bundled one by default)
    """
    return load_feeder(path or default_feeder_path()).d_hat
