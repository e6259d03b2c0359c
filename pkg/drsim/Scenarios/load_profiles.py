__author__ = 'drsim developers'

"""
minute-level inflexible load profiles per bus

Each bus aggregates a number of synthetic households; the bus series is scaled so that its peak inside the event
window equals the nominal bus load.
"""

import logging
from collections import namedtuple

import numpy as np
import pandas as pd

from drsim import util
from drsim.constants import HOUSES_PER_BUS, SOLAR_FRACTION, PROFILE_RESOLUTION, DRE_START, DRE_END
from drsim.exceptions import ConfigurationError, ValidationError
from drsim.Feeder.response_model import RandomStreams

logger = logging.getLogger(__name__)

MORNING_PEAK = 7.5 * 60
EVENING_PEAK = 19. * 60
SOLAR_NOON = 13. * 60


class LoadProfileSet(namedtuple('LoadProfileSet', ['loads', 'resolution', 'start'])):
    """
    loads[t, n] is the inflexible demand of bus n at step t [kW]; resolution in minutes per step, start is the
    minute of the day of step 0
    """
    __slots__ = ()

    @property
    def steps(self):
        return self.loads.shape[0]

    @property
    def node_count(self):
        return self.loads.shape[1]

    def at(self, t):
        return self.loads[t]

    def clock(self, t):
        return util.minute2clock(self.start + t * self.resolution)


def _check_window(window):
    start, end = util.clock2minute(window[0]), util.clock2minute(window[1])
    if end <= start:
        raise ConfigurationError("profile window %s is empty" % (window,))
    return start, end


def _bell(minutes, center, width):
    return np.exp(-0.5 * ((minutes - center) / width)**2)


def household_profile(minutes, stream, solar=False):
    """
    one synthetic household: base load, morning and evening peaks and random appliance pulses; solar households
    subtract a midday bell curve

    :param minutes: minutes of the day
    :param stream: numpy Generator
    :return: net demand [kW]
    """
    base = stream.uniform(0.2, 0.6)
    load = base + stream.uniform(0.5, 1.5) * _bell(minutes, MORNING_PEAK + stream.normal(0, 30), 60.) \
        + stream.uniform(1., 2.5) * _bell(minutes, EVENING_PEAK + stream.normal(0, 30), 90.)
    span = minutes[-1] - minutes[0] + 1
    num_pulses = stream.poisson(span / 60. * 1.5)
    for start, duration, power in zip(stream.uniform(minutes[0], minutes[-1] + 1, num_pulses),
                                      stream.uniform(5., 30., num_pulses), stream.uniform(0.5, 3., num_pulses)):
        load = load + power * ((minutes >= start) & (minutes < start + duration))
    if solar:
        load = load - stream.uniform(1., 4.) * _bell(minutes, SOLAR_NOON, 120.)
    return load


def normalize_peaks(series, nominal):
    """
    scales every column so that its maximum equals the nominal load; negative net values are clipped at zero

    :param series: array (steps, buses)
    :param nominal: nominal bus loads
    :return: normalized array
    """
    peaks = np.max(series, axis=0)
    if np.any(peaks <= 0):
        raise ValidationError("buses %s have no positive demand in the window" % list(np.flatnonzero(peaks <= 0)))
    loads = series * (nominal / peaks)
    negative = loads < 0
    if np.any(negative):
        logger.warning("clipped %s negative net load values at zero", int(np.sum(negative)))
        loads = np.where(negative, 0., loads)
    return loads


def synth_load_profiles(node_count, window=(DRE_START, DRE_END), master_seed=0, solar_fraction=SOLAR_FRACTION,
                        nominal=None, houses=HOUSES_PER_BUS, resolution=PROFILE_RESOLUTION):
    """
    synthetic per-bus profiles over the window, peak-normalized to the nominal loads

    :param node_count: number of buses
    :param window: (start, end) as minutes of the day or 'hh:mm'
    :param master_seed: seed; the profile stream is independent of the scenario and run streams
    :param solar_fraction: share of households with rooftop generation
    :param nominal: nominal bus loads (all ones if None)
    :param houses: households per bus
    :param resolution: minutes per step
    :return: LoadProfileSet
    """
    start, end = _check_window(window)
    nominal = np.ones(node_count) if nominal is None else util.mk_array(nominal, node_count, 'nominal')
    if not 0 <= solar_fraction <= 1:
        raise ConfigurationError("solar_fraction must lie in [0, 1], got %s" % solar_fraction)
    stream = RandomStreams(master_seed).profile_stream()
    minutes = np.arange(start, end, resolution, dtype=float)
    series = np.zeros((len(minutes), node_count))
    for n in range(node_count):
        for h in range(houses):
            series[:, n] += household_profile(minutes, stream, solar=stream.uniform() < solar_fraction)
    loads = normalize_peaks(series, nominal)
    logger.info("synthesized %s x %s load profile steps from %s households per bus", len(minutes), node_count,
                houses)
    return LoadProfileSet(loads=util.frozen(loads), resolution=int(resolution), start=int(start))


def load_profiles_csv(path, nominal, bus_ids, window=(DRE_START, DRE_END), resolution=PROFILE_RESOLUTION):
    """
    reads user supplied minute data with header bus_id,t,kw (t the minute of the day) and applies the same peak
    normalization as the synthetic generator

    :param path: csv file
    :param nominal: nominal bus loads, ordered as bus_ids
    :param bus_ids: bus labels in feeder order
    :return: LoadProfileSet
    """
    start, end = _check_window(window)
    frame = pd.read_csv(path)
    missing = {'bus_id', 't', 'kw'} - set(frame.columns)
    if missing:
        raise ConfigurationError("profile file %s lacks columns %s" % (path, sorted(missing)))
    frame = frame[(frame['t'] >= start) & (frame['t'] < end)]
    table = frame.pivot_table(index='t', columns='bus_id', values='kw', aggfunc='mean')
    minutes = np.arange(start, end, resolution)
    try:
        table = table.reindex(index=minutes, columns=list(bus_ids))
    except (KeyError, ValueError) as err:
        raise ConfigurationError("profile file %s does not match the feeder buses: %s" % (path, err))
    if table.isnull().values.any():
        raise ValidationError("profile file %s has gaps in the window %s-%s"
                              % (path, util.minute2clock(start), util.minute2clock(end)))
    loads = normalize_peaks(table.values.astype(float), util.mk_array(nominal, len(bus_ids), 'nominal'))
    return LoadProfileSet(loads=util.frozen(loads), resolution=int(resolution), start=int(start))
