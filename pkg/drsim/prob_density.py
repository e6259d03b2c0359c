__author__ = 'drsim developers'

"""
distributions used to model the flexible load response
"""

import numpy as np
import scipy.stats as stats

from drsim.constants import MAD_GAUSS


class TruncatedGaussian(object):
    """
    class for the Gaussian distribution restricted to an interval [lower, upper].
    Draws are obtained by rejection, so the result is a proper truncated density and not a clipped one.
    """
    def __init__(self, max_rounds=50):
        """

        :param max_rounds: rejection rounds before the remaining entries are drawn by inverse cdf
        """
        self._max_rounds = max_rounds

    def draw(self, mu, sigma, lower, upper, rng):
        """
        one draw per entry of mu

        :param mu: location (array)
        :param sigma: scale (array, >= 0)
        :param lower: lower end of the support (array)
        :param upper: upper end of the support (array)
        :param rng: numpy.random.Generator
        :return: array of draws
        """
        mu, sigma, lower, upper = np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in (mu, sigma, lower, upper)])
        out = np.clip(mu, lower, upper)
        pending = sigma > 0
        for i in range(self._max_rounds):
            if not np.any(pending):
                return out
            idx = np.flatnonzero(pending)
            sample = rng.normal(mu[idx], sigma[idx])
            accept = (sample >= lower[idx]) & (sample <= upper[idx])
            out[idx[accept]] = sample[accept]
            pending[idx[accept]] = False
        if np.any(pending):
            # far tails: fall back to the inverse cdf of the same density
            idx = np.flatnonzero(pending)
            a = (lower[idx] - mu[idx]) / sigma[idx]
            b = (upper[idx] - mu[idx]) / sigma[idx]
            out[idx] = stats.truncnorm.rvs(a, b, loc=mu[idx], scale=sigma[idx], random_state=rng)
        return out

    def mean(self, mu, sigma, lower, upper):
        """
        mean of the truncated density (it differs from mu whenever the truncation is asymmetric)
        """
        mu, sigma, lower, upper = np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in (mu, sigma, lower, upper)])
        out = np.clip(mu, lower, upper)
        mask = sigma > 0
        a = (lower[mask] - mu[mask]) / sigma[mask]
        b = (upper[mask] - mu[mask]) / sigma[mask]
        out[mask] = stats.truncnorm.mean(a, b, loc=mu[mask], scale=sigma[mask])
        return out


def mean_absolute_deviation(sigma):
    """
    E|w - E w| of a Gaussian with standard deviation sigma
    """
    return MAD_GAUSS * np.asarray(sigma, dtype=float)


def empirical_mean_absolute_deviation(samples):
    """
    :param samples: 1d sample
    :return: mean of |samples - mean(samples)|
    """
    samples = np.asarray(samples, dtype=float)
    return np.mean(np.abs(samples - np.mean(samples)))
