__author__ = 'drsim developers'

import numpy as np


class NumericGradient(object):
    """
    this class computes numerical differentials of scalar functions of a vector argument
    """
    def __init__(self, function, diff=1e-5):
        """

        :param function: callable f(x, *args, **kwargs) returning a float
        :param diff: finite difference step
        """
        self.function = function
        self._diff = diff

    def gradient(self, x, *args, **kwargs):
        """
        central differences of the function at x
        :return: gradient vector
        """
        x = np.array(x, dtype=float)
        grad = np.zeros_like(x)
        diff = self._diff
        for i in range(len(x)):
            x_up = x.copy()
            x_down = x.copy()
            x_up[i] += diff
            x_down[i] -= diff
            grad[i] = (self.function(x_up, *args, **kwargs) - self.function(x_down, *args, **kwargs)) / (2 * diff)
        return grad

    def derivative(self, t, *args, **kwargs):
        """
        central difference of a function of a scalar argument
        """
        diff = self._diff
        return (self.function(t + diff, *args, **kwargs) - self.function(t - diff, *args, **kwargs)) / (2 * diff)

    def second_difference(self, t, *args, **kwargs):
        """
        second central difference of a function of a scalar argument
        """
        diff = self._diff
        f_up = self.function(t + diff, *args, **kwargs)
        f_ = self.function(t, *args, **kwargs)
        f_down = self.function(t - diff, *args, **kwargs)
        return (f_up - 2 * f_ + f_down) / diff**2
