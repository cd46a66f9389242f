import math

import numpy as np
import pytest

from distcolor.errors import DomainError
from distcolor.geometry import RadiusSchedule
from distcolor.theory import (
    c_ratio_indicator,
    h_function,
    h_inverse_upper,
    k_n,
    theory_table,
    xi_indicator,
)

E = math.e


def test_k_n_examples():
    assert k_n(E**2, 2 / E) == pytest.approx(2, rel=1e-12)
    assert k_n(E**4, 4 / E**2) == pytest.approx(2, rel=1e-12)
    with pytest.raises(DomainError):
        k_n(1000, math.log(1000))
    with pytest.raises(DomainError):
        k_n(1000, 0)


def test_k_n_grows_along_sub_schedule():
    sched = RadiusSchedule("sub", 0.5)
    ns = np.geomspace(100, 1e15, 40)
    ks = [k_n(n, sched.target(n)) for n in ns]
    assert all(b > a for a, b in zip(ks, ks[1:]))


def test_h_examples():
    assert h_function(1) == 0
    assert h_function(E) == pytest.approx(1, rel=1e-15)
    assert h_function(E**2) == pytest.approx(E**2 + 1, rel=1e-15)
    with pytest.raises(DomainError):
        h_function(0)


def test_h_near_one_keeps_quadratic_term():
    for eps in (1e-3, 1e-5, 1e-7):
        assert h_function(1 + eps) == pytest.approx(eps**2 / 2 - eps**3 / 6, rel=1e-6)


def test_h_inverse_examples():
    assert h_inverse_upper(0) == 1.0
    assert h_inverse_upper(1) == pytest.approx(E, abs=1e-12)
    assert h_inverse_upper(E**2 + 1) == pytest.approx(E**2, abs=1e-12)
    assert h_inverse_upper(math.inf) == math.inf
    with pytest.raises(DomainError):
        h_inverse_upper(-1e-3)


def test_h_inverse_round_trip_below_ulp_floor():
    # the absolute 1e-10 target is only representable where ulp(y) < 1e-10
    for y in np.geomspace(1, 2**19, 200):
        assert abs(h_inverse_upper(h_function(y)) - y) <= 1e-10


def test_xi_examples():
    assert xi_indicator(1, 1, 1) == pytest.approx(E, abs=1e-9)
    assert xi_indicator(3.5, math.inf, 2) == 3.5
    x1, x2 = xi_indicator(1, 1, 1), xi_indicator(1, 2, 1)
    assert 0.5 * x1 <= x2 <= x1
    with pytest.raises(DomainError):
        xi_indicator(0, 1, 1)
    with pytest.raises(DomainError):
        xi_indicator(1, -1, 1)


def test_xi_nonincreasing_in_t():
    ts = np.geomspace(1e-4, 1e6, 200)
    xs = [xi_indicator(2.0, t, 0.7) for t in ts]
    assert all(b <= a for a, b in zip(xs, xs[1:]))


def test_c_ratio_examples():
    for t in (1e-3, 1, 1e3):
        assert c_ratio_indicator(1, 2, t) == 1.0
    assert abs(c_ratio_indicator(2, 2, 1e6) - 1) < 1e-3


@pytest.mark.parametrize("l, d", [(2, 1), (2, 2), (3, 2), (2, 3), (4, 3)])
def test_c_ratio_bounds_and_monotone(l, d):
    ts = np.geomspace(1e-6, 1e8, 80)
    cs = [c_ratio_indicator(l, d, t) for t in ts]
    assert all(l**-d <= c <= 1 for c in cs)
    assert all(b >= a for a, b in zip(cs, cs[1:]))
    # the approach to l^-d as t -> 0 is only logarithmic
    assert cs[0] < 2 * l**-d
    assert cs[-1] > 0.999


def test_theory_table_rows():
    rows = theory_table([1.0, math.inf], 2, 2)
    assert rows[0][1] == pytest.approx(E, abs=1e-9)
    assert rows[1][1:] == (1.0, 1.0)
