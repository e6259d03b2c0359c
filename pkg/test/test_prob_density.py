__author__ = 'drsim developers'

"""
Tests for `prob_density` module.
"""

from drsim.prob_density import TruncatedGaussian, mean_absolute_deviation, empirical_mean_absolute_deviation

import pytest
import numpy as np
import numpy.testing as npt


class TestTruncatedGaussian(object):

    def setup_method(self):
        self.truncated = TruncatedGaussian()
        self.rng = np.random.default_rng(42)

    def test_draw_support(self):
        mu = np.array([0.5, 0.1, 0.9])
        sigma = np.array([0.3, 0.5, 0.5])
        for i in range(200):
            w = self.truncated.draw(mu, sigma, 0., 1., self.rng)
            assert np.all(w >= 0)
            assert np.all(w <= 1)

    def test_zero_spread(self):
        w = self.truncated.draw(np.array([0.5, 2.]), np.array([0., 0.]), 0., 1., self.rng)
        npt.assert_array_equal(w, [0.5, 1.])

    def test_far_tail(self):
        w = self.truncated.draw(np.array([-20.]), np.array([1.]), 0., 1., self.rng)
        assert 0 <= w[0] <= 1

    def test_mean(self):
        mean = self.truncated.mean(np.array([0.5]), np.array([0.2]), 0., 1.)
        npt.assert_almost_equal(mean, [0.5], decimal=10)
        mean = self.truncated.mean(np.array([0.1]), np.array([0.2]), 0., 1.)
        assert mean[0] > 0.1
        samples = np.array([self.truncated.draw(np.array([0.1]), np.array([0.2]), 0., 1., self.rng)[0]
                            for i in range(20000)])
        npt.assert_almost_equal(np.mean(samples), mean[0], decimal=2)


def test_mean_absolute_deviation():
    npt.assert_almost_equal(mean_absolute_deviation(1.), np.sqrt(2 / np.pi), decimal=14)
    npt.assert_almost_equal(mean_absolute_deviation(0.1), 0.0797885, decimal=6)
    assert empirical_mean_absolute_deviation([-1., 1.]) == 1.
    assert empirical_mean_absolute_deviation([3., 3., 3.]) == 0.


if __name__ == '__main__':
    pytest.main()
