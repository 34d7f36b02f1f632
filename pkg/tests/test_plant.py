import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptive_sta import GainState, LtiPlant, SlidingSurface, control, default_plant, default_surface, plant_rhs, surface_value
from adaptive_sta.errors import InvalidInputError, SingularSurfaceError
from adaptive_sta.plant import ecb_terms, phi_rate

P, S = default_plant(), default_surface()
coord = st.floats(-1e3, 1e3)


def test_default_matrices():
    assert P.A[0] == (0.0, 1.0, 0.0, 0.0)
    assert P.A[1] == (-209.6, -2.0, 838.4, 1.7)
    assert P.A[3] == (77.9, 0.15, -311.8, -2.47)
    assert P.B == (0.0, 2306.0, 0.0, 0.0)
    _, GB, GD = ecb_terms(P, S)
    assert GB == 1.0 and GD == 1.0


@pytest.mark.parametrize(
    "x, expected",
    [((0, 0, 0, 0), 0.0), ((1, 1, 1, 1), 3.0 + 1.0 / 2306.0), ((0, 1, 0, 0), 1.0 / 2306.0)],
)
def test_surface_value(x, expected):
    assert surface_value(S.G, x) == pytest.approx(expected, rel=1e-15)


def test_surface_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        surface_value(S.G, (1.0, 2.0))


def test_control_examples():
    g = GainState(2.0, 1.0)
    assert control((0, 0, 0, 0), 0.0, g, 0.0, P, S) == (0.0, 0.0, 0.0)
    _, u_s, _ = control((0, 0, 0, 0), 1.0, g, 0.0, P, S)
    assert u_s == -2.0


def test_singular_surface_rejected():
    with pytest.raises(SingularSurfaceError):
        ecb_terms(P, SlidingSurface((1.0, 0.0, 1.0, 1.0)))


def test_bad_dimensions_rejected():
    with pytest.raises(InvalidInputError):
        LtiPlant(B=(1.0, 2.0))
    with pytest.raises(InvalidInputError):
        SlidingSurface((1.0, 2.0, 3.0))


def test_zero_input_rest():
    assert plant_rhs(P, (0, 0, 0, 0), 0.0, 0.0) == (0.0, 0.0, 0.0, 0.0)


def test_constant_perturbation_channel():
    # G D phi' = rho0, so the D phi term feeds s through GD times the integrated phi
    assert phi_rate(3.5, P, S) == 3.5
    x0 = (0.0, 0.0, 0.0, 0.0)
    assert surface_value(S.G, plant_rhs(P, x0, 0.0, 2.0)) == 2.0


@given(coord, coord, coord, coord, st.floats(-1e3, 1e3), st.floats(0.1, 50), st.floats(0.1, 50), st.floats(-10, 10))
def test_closed_loop_reduction(x1, x2, x3, x4, sigma, a, b, phi):
    """G (A x + B u + D phi) = -alpha |s|^(1/2) sgn s + sigma + G D phi."""
    x = (x1, x2, x3, x4)
    s = surface_value(S.G, x)
    u_c, u_s, u = control(x, s, GainState(a, b), sigma, P, S)
    GA, GB, GD = ecb_terms(P, S)
    scale = 1.0 + max(map(abs, x))
    assert abs(sum(g * xi for g, xi in zip(GA, x)) + GB * u_c) <= 1e-9 * scale
    sdot = surface_value(S.G, plant_rhs(P, x, u, phi))
    expected = -a * abs(s) ** 0.5 * (1 if s > 0 else -1 if s < 0 else 0) + sigma + GD * phi
    assert sdot == pytest.approx(expected, abs=1e-9 * (scale * 1e3 + abs(sigma)))
