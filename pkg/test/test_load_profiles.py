__author__ = 'drsim developers'

import logging

import pytest
import numpy as np
import numpy.testing as npt
import pandas as pd

from drsim.Scenarios import load_profiles
from drsim.exceptions import ConfigurationError, ValidationError


class TestSyntheticProfiles(object):

    def setup_method(self):
        self.nominal = np.array([1., 2.5, 0.4])

    def test_shape(self):
        profiles = load_profiles.synth_load_profiles(3, master_seed=1, nominal=self.nominal, houses=5)
        assert profiles.steps == 300
        assert profiles.node_count == 3
        assert profiles.clock(0) == '10:00'
        assert profiles.clock(299) == '14:59'
        npt.assert_allclose(np.max(profiles.loads, axis=0), self.nominal, rtol=1e-9)
        profiles = load_profiles.synth_load_profiles(3, window=('10:00', '11:00'), master_seed=1, houses=5,
                                                     resolution=5)
        assert profiles.steps == 12

    def test_no_solar(self, caplog):
        with caplog.at_level(logging.WARNING):
            profiles = load_profiles.synth_load_profiles(3, master_seed=2, nominal=self.nominal, solar_fraction=0.,
                                                         houses=5)
        assert np.all(profiles.loads >= 0)
        assert 'negative' not in caplog.text

    def test_reproducible(self):
        a = load_profiles.synth_load_profiles(2, master_seed=3, houses=4)
        b = load_profiles.synth_load_profiles(2, master_seed=3, houses=4)
        c = load_profiles.synth_load_profiles(2, master_seed=4, houses=4)
        npt.assert_array_equal(a.loads, b.loads)
        assert not np.array_equal(a.loads, c.loads)

    def test_raise(self):
        with pytest.raises(ConfigurationError):
            load_profiles.synth_load_profiles(2, window=(900, 600))
        with pytest.raises(ConfigurationError):
            load_profiles.synth_load_profiles(2, solar_fraction=1.5)
        with pytest.raises(ValidationError):
            load_profiles.normalize_peaks(np.array([[1., -1.], [2., -0.5]]), np.ones(2))


def test_normalize_peaks():
    series = np.array([[1., 2.], [2., 4.], [-1., 1.]])
    loads = load_profiles.normalize_peaks(series, np.array([4., 1.]))
    npt.assert_almost_equal(loads, [[2., 0.5], [4., 1.], [0., 0.25]], decimal=14)


class TestCsvProfiles(object):

    def _write(self, path, minutes, buses):
        rows = [{'bus_id': bus, 't': t, 'kw': 1. + 0.01 * (t % 17) + i} for i, bus in enumerate(buses)
                for t in minutes]
        pd.DataFrame(rows).to_csv(path, index=False)

    def test_read(self, tmp_path):
        path = str(tmp_path / 'loads.csv')
        self._write(path, range(590, 910), [701, 712])
        profiles = load_profiles.load_profiles_csv(path, [2., 3.], [701, 712])
        assert profiles.steps == 300
        npt.assert_allclose(np.max(profiles.loads, axis=0), [2., 3.], rtol=1e-12)

    def test_gap(self, tmp_path):
        path = str(tmp_path / 'loads.csv')
        self._write(path, [t for t in range(600, 900) if t != 700], [701, 712])
        with pytest.raises(ValidationError):
            load_profiles.load_profiles_csv(path, [2., 3.], [701, 712])

    def test_columns(self, tmp_path):
        path = str(tmp_path / 'loads.csv')
        pd.DataFrame({'bus': [701], 't': [600], 'kw': [1.]}).to_csv(path, index=False)
        with pytest.raises(ConfigurationError):
            load_profiles.load_profiles_csv(path, [2.], [701])

    def test_missing_bus(self, tmp_path):
        path = str(tmp_path / 'loads.csv')
        self._write(path, range(600, 900), [701])
        with pytest.raises(ValidationError):
            load_profiles.load_profiles_csv(path, [2., 3.], [701, 712])


if __name__ == '__main__':
    pytest.main()
