__author__ = 'drsim developers'

"""
this file contains standard routines shared by the feeder, pricing and analysis modules
"""

import numpy as np

from drsim.exceptions import ConfigurationError, ValidationError


def mk_array(input_var, n=None, name='input'):
    """
    makes sure that the input is a float numpy array. Scalars are broadcast to length n if n is given.

    :param input_var: float, int, list or numpy array
    :param n: expected length (optional)
    :param name: name used in error messages
    :return: 1d numpy array of floats
    """
    if isinstance(input_var, (int, float, np.integer, np.floating)):
        if n is None:
            output_var = np.array([float(input_var)])
        else:
            output_var = np.full(n, float(input_var))
    elif isinstance(input_var, (list, tuple, np.ndarray)):
        output_var = np.array(input_var, dtype=float).ravel()
    else:
        raise ConfigurationError("input type %s for %s not recognised. Please use a float, list or numpy array"
                                 % (type(input_var), name))
    if n is not None:
        check_length(output_var, n, name)
    return output_var


def check_length(array, n, name='input'):
    """
    raises if the array has not length n
    """
    if len(array) != n:
        raise ConfigurationError("length of %s is %s, expected %s" % (name, len(array), n))


def check_finite(array, name='input'):
    """
    raises if any entry of array is nan or inf
    """
    if not np.all(np.isfinite(array)):
        raise ValidationError("%s contains non-finite entries" % name)


def frozen(array):
    """
    returns a read-only copy of array
    """
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


def tail_mean(series, fraction):
    """
    mean over the last fraction of a series (at least one element)
    """
    series = np.asarray(series, dtype=float)
    num = max(1, int(round(len(series) * fraction)))
    return np.mean(series[-num:], axis=0)


def clock2minute(clock):
    """
    converts 'hh:mm' into the minute of the day
    """
    if isinstance(clock, (int, np.integer)):
        return int(clock)
    hours, minutes = clock.split(':')
    return int(hours) * 60 + int(minutes)


def minute2clock(minute):
    """
    converts the minute of the day into 'hh:mm'
    """
    return '%02d:%02d' % (int(minute) // 60, int(minute) % 60)
