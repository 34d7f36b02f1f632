import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptive_sta import heaviside_select, heaviside_set, sgn_select, sgn_set, signed_power
from adaptive_sta.errors import InvalidInputError
from adaptive_sta.inclusions import IntervalValue

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12)


@pytest.mark.parametrize("x, expected", [(2.5, (1, 1)), (-1e-300, (-1, -1)), (0.0, (-1, 1)), (-0.0, (-1, 1))])
def test_sgn_set_values(x, expected):
    assert tuple(sgn_set(x)) == expected


@pytest.mark.parametrize("x, expected", [(3.0, (0, 0)), (0.0, (-1, 0)), (-4.0, (-1, -1))])
def test_heaviside_set_values(x, expected):
    assert tuple(heaviside_set(x)) == expected


def test_selections_at_zero():
    assert sgn_select(0.0) == 0.0
    assert heaviside_select(0.0) == -0.5


@pytest.mark.parametrize("fn", [sgn_set, sgn_select, heaviside_set, heaviside_select])
@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_rejected(fn, bad):
    with pytest.raises(InvalidInputError):
        fn(bad)


@given(finite)
def test_selection_lies_in_set(x):
    assert sgn_select(x) in sgn_set(x)
    assert heaviside_select(x) in heaviside_set(x)


@given(finite)
def test_sgn_odd(x):
    assert sgn_set(-x) == -sgn_set(x)


def test_interval_negation_and_membership():
    iv = IntervalValue(-1.0, 0.0)
    assert -iv == IntervalValue(0.0, 1.0)
    assert -0.3 in iv and 0.5 not in iv


@given(finite, st.sampled_from([0.5, 1.0 / 3.0, 2.0 / 3.0, 1.0, 2.0]))
def test_signed_power_properties(x, p):
    y = signed_power(x, p)
    assert math.copysign(1.0, y) == math.copysign(1.0, x) or y == 0.0
    assert math.isclose(abs(y), abs(x) ** p, rel_tol=1e-15, abs_tol=0.0)
    assert signed_power(-x, p) == -y


def test_signed_power_examples():
    assert signed_power(-4.0, 0.5) == -2.0
    assert signed_power(8.0, 1.0 / 3.0) == pytest.approx(2.0, rel=1e-15)
    assert signed_power(0.0, 0.5) == 0.0


@pytest.mark.parametrize("p", [0.0, -1.0])
def test_signed_power_rejects_nonpositive_exponent(p):
    with pytest.raises(InvalidInputError):
        signed_power(1.0, p)
