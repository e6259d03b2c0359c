__author__ = 'drsim developers'

import pytest
import numpy as np
import numpy.testing as npt

from drsim.Feeder import grid_model
from drsim.exceptions import ConfigurationError, ValidationError


class TestFeederModel(object):

    def setup_method(self):
        self.feeder = grid_model.make_feeder(d_hat=[1., 2., 0.5], delta=[0.5, 1., 0.], r=[0., 0.5, 0.])
        self.target = grid_model.make_target(self.feeder, p_ref=3.)

    def test_defaults(self):
        feeder = grid_model.make_feeder([1., 1.], [0., 0.])
        npt.assert_array_equal(feeder.s, [1., 1.])
        npt.assert_array_equal(feeder.r, [0., 0.])
        assert feeder.node_count == 2
        assert feeder.ids == (1, 2)
        assert grid_model.aggregate_power(feeder, feeder.d_hat, np.zeros(2)) == 2.

    def test_pre_event(self):
        npt.assert_almost_equal(self.feeder.d_pre, [1.5, 2.5, 0.5], decimal=14)
        npt.assert_almost_equal(self.feeder.p_pre, 4.5, decimal=14)
        npt.assert_almost_equal(self.target.p0_tilde, 1.5, decimal=14)

    def test_aggregate_power(self):
        w = np.array([0.2, 0.3, 0.])
        p0 = grid_model.aggregate_power(self.feeder, self.feeder.d_hat, w)
        npt.assert_almost_equal(p0, 1.2 + 1.8 + 0.5, decimal=14)
        npt.assert_almost_equal(grid_model.regulation_error(p0, self.target), 0.5, decimal=14)
        # pre-event power: full flexible load
        p_pre = grid_model.aggregate_power(self.feeder, self.feeder.d_hat, self.feeder.delta)
        npt.assert_almost_equal(grid_model.regulation_error(p_pre, self.target), self.target.p0_tilde, decimal=14)

    def test_linearity(self):
        rng = np.random.default_rng(3)
        feeder = grid_model.make_feeder(rng.uniform(0, 2, 5), rng.uniform(0, 1, 5), s=rng.uniform(0.5, 1.5, 5))
        w1, w2 = rng.uniform(0, 1, 5), rng.uniform(0, 1, 5)
        base = grid_model.aggregate_power(feeder, feeder.d_hat, np.zeros(5))
        p1 = grid_model.aggregate_power(feeder, feeder.d_hat, w1) - base
        p2 = grid_model.aggregate_power(feeder, feeder.d_hat, w2) - base
        p12 = grid_model.aggregate_power(feeder, feeder.d_hat, 2. * w1 + 3. * w2) - base
        npt.assert_almost_equal(p12, 2. * p1 + 3. * p2, decimal=12)

    def test_immutable(self):
        with pytest.raises(ValueError):
            self.feeder.d_hat[0] = 5.

    def test_with_d_hat(self):
        feeder = self.feeder.with_d_hat([2., 2., 2.])
        npt.assert_almost_equal(feeder.p_pre, 6. + 1.5 - 0.5, decimal=14)
        target = grid_model.retarget(self.target, feeder)
        npt.assert_almost_equal(target.p0_tilde, feeder.p_pre - 3., decimal=14)
        npt.assert_array_equal(self.feeder.d_hat, [1., 2., 0.5])

    def test_reference_range(self):
        lower, upper = grid_model.reference_range(self.feeder)
        npt.assert_almost_equal(lower, 3., decimal=14)
        npt.assert_almost_equal(upper, 4.5, decimal=14)

    def test_validation(self):
        with pytest.raises(ValidationError):
            grid_model.make_feeder([1.], [-0.1])
        with pytest.raises(ValidationError):
            grid_model.make_feeder([1., np.nan], [0., 0.])
        with pytest.raises(ConfigurationError):
            grid_model.make_feeder([1., 1.], [0.])
        with pytest.raises(ConfigurationError):
            grid_model.aggregate_power(self.feeder, self.feeder.d_hat, np.zeros(2))
        with pytest.raises(ConfigurationError):
            grid_model.make_target(self.feeder, 3., window=(5, 5))


class TestTariff(object):

    def test_defaults(self):
        tariff = grid_model.make_tariff()
        assert tariff.pi == 2.
        assert tariff.pi0 == 1.
        lo, hi = tariff.bounds(3)
        npt.assert_array_equal(lo, [0., 0., 0.])
        npt.assert_array_equal(hi, [2., 2., 2.])

    def test_vector_box(self):
        tariff = grid_model.make_tariff(x_max=[1., 0.5])
        lo, hi = tariff.bounds(2)
        npt.assert_array_equal(hi, [1., 0.5])
        with pytest.raises(ConfigurationError):
            tariff.bounds(3)

    def test_raise(self):
        with pytest.raises(ValidationError):
            grid_model.make_tariff(pi=0.)
        with pytest.raises(ConfigurationError):
            grid_model.make_tariff(x_min=1., x_max=0.5)


class TestLoadFeeder(object):

    def test_records(self):
        doc = {'nodes': [{'id': 'a', 'd_hat': 1., 'delta': 0.5}, {'id': 'b', 'd_hat': 2., 'delta': 0.2}]}
        feeder = grid_model.load_feeder(doc)
        assert feeder.ids == ('a', 'b')
        npt.assert_array_equal(feeder.r, [0., 0.])
        npt.assert_array_equal(feeder.s, [1., 1.])

    def test_partial_records(self):
        doc = {'nodes': [{'d_hat': 1., 'delta': 0.5, 'r': 0.1}, {'d_hat': 2., 'delta': 0.2}]}
        with pytest.raises(ConfigurationError):
            grid_model.load_feeder(doc)
        doc = {'nodes': [{'d_hat': 1., 'delta': 0.5}, {'d_hat': 2.}]}
        with pytest.raises(ConfigurationError):
            grid_model.load_feeder(doc)

    def test_columns(self):
        doc = {'d_hat': [1., 2.], 'delta': [0.5, 0.5], 's': [1., 0.9], 'aggregation': 'explicit'}
        feeder = grid_model.load_feeder(doc)
        npt.assert_array_equal(feeder.s, [1., 0.9])
        with pytest.raises(ConfigurationError):
            grid_model.load_feeder({'d_hat': [1.], 'delta': [0.5], 'aggregation': 'explicit'})
        with pytest.raises(ConfigurationError):
            grid_model.load_feeder({'d_hat': [1.]})
        with pytest.raises(ValidationError):
            grid_model.load_feeder({'d_hat': [1.], 'delta': [np.inf]})

    def test_document(self):
        feeder = grid_model.make_feeder([1., 2.], [0.5, 0.1], r=[0.2, 0.], s=[1., 0.95])
        feeder_new = grid_model.load_feeder(grid_model.feeder_document(feeder))
        npt.assert_array_equal(feeder_new.s, feeder.s)
        npt.assert_array_equal(feeder_new.d_hat, feeder.d_hat)
        npt.assert_array_equal(feeder_new.r, feeder.r)
        assert feeder_new.ids == feeder.ids

    def test_bundled(self):
        feeder = grid_model.load_feeder(grid_model.default_feeder_path())
        assert feeder.node_count == 25
        npt.assert_array_equal(feeder.s, np.ones(25))
        loads = grid_model.nominal_loads()
        assert np.all(loads > 0)
        assert len(loads) == 25


if __name__ == '__main__':
    pytest.main()
