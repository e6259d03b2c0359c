__author__ = 'drsim developers'

import pytest
import numpy as np
import numpy.testing as npt
import scipy.stats as stats

from drsim.Feeder import grid_model, response_model
from drsim.Feeder.response_model import RandomStreams
from drsim.prob_density import empirical_mean_absolute_deviation
from drsim.exceptions import ConfigurationError, ValidationError


class TestResponseModel(object):

    def setup_method(self):
        self.feeder = grid_model.make_feeder(d_hat=[1., 2., 1.5], delta=[1., 2., 0.5])
        self.response = response_model.make_response(beta=[2., 1., 0.5], sigma0=[0.1, 0.2, 0.05], zeta=1.)
        self.tariff = grid_model.make_tariff(x_min=0., x_max=[0.5, 1., 1.])
        self.x = np.array([0.25, 0.5, 1.])

    def test_mean(self):
        mu = response_model.mean_response(self.response, self.feeder, np.zeros(3))
        npt.assert_array_equal(mu, self.feeder.delta)
        mu = response_model.mean_response(self.response, self.feeder, self.x)
        npt.assert_almost_equal(mu, [0.5, 1.5, 0.], decimal=14)

    def test_std(self):
        sigma = response_model.std_response(self.response, np.zeros(3))
        npt.assert_array_equal(sigma, self.response.sigma0)
        grid = np.linspace(0., 1., 11)
        values = [response_model.std_response(self.response, np.full(3, v)) for v in grid]
        assert np.all(np.diff(values, axis=0) <= 0)
        flat = self.response._replace(zeta=0.)
        npt.assert_array_equal(response_model.std_response(flat, self.x), self.response.sigma0)

    def test_deterministic(self):
        model = self.response._replace(family='deterministic')
        w = response_model.sample_response(model, self.feeder, self.x, np.random.default_rng(0))
        npt.assert_array_equal(w, response_model.mean_response(model, self.feeder, self.x))
        assert response_model.abs_deviation_bound(model, self.feeder, self.tariff) == 0.

    def test_reproducible(self):
        w1 = response_model.sample_response(self.response, self.feeder, self.x, RandomStreams(7).run_stream(0))
        w2 = response_model.sample_response(self.response, self.feeder, self.x, RandomStreams(7).run_stream(0))
        w3 = response_model.sample_response(self.response, self.feeder, self.x, RandomStreams(7).run_stream(1))
        npt.assert_array_equal(w1, w2)
        assert not np.array_equal(w1, w3)

    def test_mean_power(self):
        stream = RandomStreams(11).run_stream(0)
        num = 20000
        target = grid_model.make_target(self.feeder, p_ref=4.)
        p0 = np.array([grid_model.aggregate_power(self.feeder, self.feeder.d_hat,
                                                  response_model.sample_response(self.response, self.feeder, self.x,
                                                                                 stream))
                       for i in range(num)])
        expected = -self.feeder.s.dot(self.response.beta * self.x) + target.p0_tilde
        error = np.mean(p0 - target.p_ref)
        assert abs(error - expected) <= 4 * np.std(p0) / np.sqrt(num)

    def test_truncated(self):
        model = self.response._replace(family='truncated_gaussian', sigma0=np.array([1., 1., 1.]))
        stream = np.random.default_rng(5)
        for i in range(500):
            w = response_model.sample_response(model, self.feeder, self.x, stream)
            assert np.all(w >= 0)
            assert np.all(w <= self.feeder.delta)

    def test_location_scale(self):
        feeder = grid_model.make_feeder([1.], [1.])
        model = response_model.make_response([1.], [0.1], zeta=0.)
        stream = RandomStreams(3).run_stream(0)
        w0 = np.array([response_model.sample_response(model, feeder, np.array([0.]), stream)[0]
                       for i in range(2000)])
        w1 = np.array([response_model.sample_response(model, feeder, np.array([0.5]), stream)[0]
                       for i in range(2000)])
        assert stats.ks_2samp(w0 - 1., w1 - 0.5).pvalue > 0.001

    def test_nonnegative_mean(self):
        response_model.check_nonnegative_mean(self.response, self.feeder, self.tariff)
        with pytest.raises(ValidationError):
            response_model.check_nonnegative_mean(self.response, self.feeder, grid_model.make_tariff(x_max=2.))

    def test_make_response(self):
        with pytest.raises(ValidationError):
            response_model.make_response([1., 0.], 0.1)
        with pytest.raises(ValidationError):
            response_model.make_response([1.], -0.1)
        with pytest.raises(ConfigurationError):
            response_model.make_response([1.], 0.1, family='poisson')
        model = response_model.make_response([1., 2.], 0.3)
        npt.assert_array_equal(model.sigma0, [0.3, 0.3])


class TestDeviationBound(object):

    def setup_method(self):
        self.feeder = grid_model.make_feeder([1.], [1.])
        self.response = response_model.make_response([1.], [0.1])
        self.tariff = grid_model.make_tariff(x_min=0., x_max=1.)

    def test_single_node(self):
        bound = response_model.abs_deviation_bound(self.response, self.feeder, self.tariff)
        npt.assert_almost_equal(bound, 0.0798, decimal=4)

    def test_empirical(self):
        stream = RandomStreams(1).run_stream(0)
        bound = response_model.abs_deviation_bound(self.response, self.feeder, self.tariff)
        for x in (0., 0.5, 1.):
            p0 = np.array([response_model.sample_response(self.response, self.feeder, np.array([x]), stream)[0]
                           for i in range(40000)])
            assert empirical_mean_absolute_deviation(p0) <= 1.02 * bound

    def test_sampled(self):
        stream = RandomStreams(2).run_stream(0)
        sampled = response_model.sampled_deviation_bound(self.response, self.feeder, self.tariff, stream,
                                                          num_samples=5000, num_grid=3)
        bound = response_model.abs_deviation_bound(self.response, self.feeder, self.tariff)
        assert sampled >= bound
        assert sampled <= 1.2 * bound


class TestLoadResponse(object):

    def setup_method(self):
        self.feeder = grid_model.make_feeder([1., 2., 3.], [0.5, 1., 2.])

    def test_uniform(self):
        model = response_model.load_response({'beta': 'uniform[0.5, 1.5]', 'seed': 4, 'sigma0': 'fraction:0.1'},
                                             self.feeder)
        assert np.all(model.beta >= 0.5)
        assert np.all(model.beta <= 1.5)
        npt.assert_almost_equal(model.sigma0, [0.05, 0.1, 0.2], decimal=14)
        same = response_model.load_response({'beta': 'uniform[0.5, 1.5]', 'seed': 4}, self.feeder)
        npt.assert_array_equal(same.beta, model.beta)

    def test_explicit(self):
        doc = {'beta': [1., 2., 3.], 'sigma0': 0.2, 'zeta': 0.5, 'family': 'truncated_gaussian'}
        model = response_model.load_response(doc, self.feeder)
        assert model.family == 'truncated_gaussian'
        model_new = response_model.load_response(response_model.response_document(model), self.feeder)
        npt.assert_array_equal(model_new.beta, model.beta)
        npt.assert_array_equal(model_new.sigma0, model.sigma0)
        assert model_new.zeta == 0.5

    def test_raise(self):
        with pytest.raises(ConfigurationError):
            response_model.load_response({'beta': 'uniform[0, 2]'}, self.feeder)
        with pytest.raises(ConfigurationError):
            response_model.load_response({'beta': 'normal(1)', 'seed': 1}, self.feeder)
        with pytest.raises(ConfigurationError):
            response_model.load_response({'beta': [1., 1.]}, self.feeder)


class TestRandomStreams(object):

    def test_independent(self):
        streams = RandomStreams(0)
        a = streams.run_stream(0).standard_normal(5)
        b = streams.run_stream(1).standard_normal(5)
        c = streams.scenario_stream().standard_normal(5)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)
        npt.assert_array_equal(streams.substream(2, 3).standard_normal(5),
                               RandomStreams(0).substream(2, 3).standard_normal(5))
        assert not np.array_equal(RandomStreams(1).run_stream(0).standard_normal(5), a)


if __name__ == '__main__':
    pytest.main()
