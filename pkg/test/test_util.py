__author__ = 'drsim developers'

import drsim.util as Util
from drsim.exceptions import ConfigurationError, ValidationError

import numpy as np
import pytest
import numpy.testing as npt


def test_mk_array():
    a = Util.mk_array(2., 3)
    npt.assert_array_equal(a, [2., 2., 2.])
    a = Util.mk_array([1, 2])
    assert a.dtype == float
    assert len(a) == 2
    a = Util.mk_array(5)
    npt.assert_array_equal(a, [5.])
    with pytest.raises(ConfigurationError):
        Util.mk_array('1,2')
    with pytest.raises(ConfigurationError):
        Util.mk_array([1, 2], 3, 'd_hat')


def test_check_finite():
    Util.check_finite(np.array([1., 2.]))
    with pytest.raises(ValidationError):
        Util.check_finite(np.array([1., np.nan]), 'delta')
    with pytest.raises(ValidationError):
        Util.check_finite(np.array([np.inf]))


def test_frozen():
    a = Util.frozen([1, 2])
    assert a.flags.writeable is False
    with pytest.raises(ValueError):
        a[0] = 3.


def test_tail_mean():
    series = np.arange(10.)
    assert Util.tail_mean(series, 0.2) == 8.5
    assert Util.tail_mean(series, 0.) == 9.
    assert Util.tail_mean(series, 1.) == 4.5


def test_clock():
    assert Util.clock2minute('10:00') == 600
    assert Util.clock2minute('15:00') == 900
    assert Util.clock2minute(615) == 615
    assert Util.minute2clock(600) == '10:00'
    assert Util.minute2clock(899) == '14:59'
    assert Util.clock2minute(Util.minute2clock(754)) == 754


if __name__ == '__main__':
    pytest.main()
