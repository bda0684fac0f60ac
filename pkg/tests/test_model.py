"""Kernel-level checks: geometry, gating, limits, frozen reference values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nsse.model import (KZ_FRACTION_LIMIT, WavePacket, delta_k,
                        emission_weight, front, kernel, mode_geometry,
                        sse_amplitude_beta, tau)
from nsse.units import default_atom, to_internal


# -- geometry and retarded time -------------------------------------------

def test_mode_geometry_at_line_center(units):
    geo = mode_geometry(0.0, math.pi / 3, units)
    assert geo.k == pytest.approx(2.0 * math.pi, rel=1e-12)
    assert geo.kx == pytest.approx(2.0 * math.pi * math.sin(math.pi / 3))
    assert geo.kz == pytest.approx(2.0 * math.pi * 0.5)
    assert geo.omega_ratio == pytest.approx(1.0)


def test_mode_geometry_detuning_shifts_k(units):
    geo = mode_geometry(3.0, 0.0, units)
    assert geo.omega_ratio == pytest.approx(
        1.0 + 3.0 / units.omega0_over_gamma, rel=1e-14)
    assert geo.k > 2.0 * math.pi


def test_mode_geometry_rejects_bad_inputs(units):
    with pytest.raises(ValueError):
        mode_geometry(0.0, -0.1, units)
    with pytest.raises(ValueError):
        mode_geometry(0.0, 3.2, units)
    with pytest.raises(ValueError):
        mode_geometry(-1.1 * units.omega0_over_gamma, 0.0, units)


def test_delta_k_frozen_values(units):
    # at line center the recoil term alone survives: eps * 1
    assert delta_k(mode_geometry(0.0, 0.3, units)) == pytest.approx(
        0.26656, abs=1e-12)
    # one gamma blue: eps*(1 + 1/Omega)^2 adds ~1e-8 on top of 1 + eps
    assert delta_k(mode_geometry(1.0, 0.3, units)) == pytest.approx(
        1.26656001081205, abs=1e-12)
    # the recoil-cancelling red detuning leaves a residual quadratic in
    # eps/Omega; the 9-digit cancellation costs ~1e-17 absolute in doubles
    geo = mode_geometry(-units.eps_recoil, 1.0, units)
    assert delta_k(geo) == pytest.approx(-2.88205875493e-9, abs=1e-17)
    predicted = -2.0 * units.eps_recoil ** 2 / units.omega0_over_gamma
    assert delta_k(geo) == pytest.approx(predicted, rel=1e-6)


def test_retarded_time(units):
    fr = front(2.0, units)
    assert tau(1.0, 0.0, fr) == pytest.approx(1.0)
    assert tau(1.0, 0.3, fr) == pytest.approx(1.0 + 0.3 / fr.v_internal)
    z = np.array([-0.2, 0.0, 0.4])
    np.testing.assert_allclose(tau(0.5, z, fr), 0.5 + z / fr.v_internal)


def test_instant_front_tau_ignores_z(units):
    fr = front(float("inf"), units)
    assert fr.instant
    np.testing.assert_array_equal(tau(2.0, np.array([-5.0, 0.0, 5.0]), fr),
                                  np.full(3, 2.0))


def test_front_requires_positive_speed(units):
    with pytest.raises(ValueError):
        front(0.0, units)
    with pytest.raises(ValueError):
        front(-1.0, units)


def test_packet_widths():
    p = WavePacket(a=2.0)
    assert p.sigma_x == pytest.approx(1.0)
    assert p.sigma_p == pytest.approx(0.5)
    with pytest.raises(ValueError):
        WavePacket(a=-1.0)


# -- kernel ----------------------------------------------------------------

def test_kernel_vanishes_before_switch_on(units, packet):
    fr = front(1.0, units)
    geo = mode_geometry(0.5, 2.0, units)
    # tau(t=-1, z=0) = -1 < 0: not yet coupled
    ker = kernel(0.0, 0.1, -1.0, geo, fr, packet, units)
    assert ker.F == 0.0
    # exactly at tau = 0 the two kernel pieces cancel
    t_edge = -0.3 / fr.v_internal
    ker = kernel(0.3, 0.0, t_edge, geo, fr, packet, units)
    assert abs(ker.F) < 1e-14


def test_kernel_spreading_enters_at_sq(units, packet):
    fr = front(1.0, units)
    geo = mode_geometry(0.0, 1.0, units)
    ker = kernel(0.1, 0.0, 2.0, geo, fr, packet, units)
    assert ker.at_sq == pytest.approx(
        1.0 - 2j * ker.tau / units.mass, rel=1e-12)
    assert ker.Delta_k.imag == pytest.approx(1.0)


def test_kernel_record_term_drifts_with_recoil(units, packet):
    fr = front(1.0, units)
    geo = mode_geometry(0.0, 2.5, units)
    ker = kernel(0.2, 0.0, 3.0, geo, fr, packet, units)
    assert ker.b1 == pytest.approx(0.2j)
    assert ker.b2 == pytest.approx(1j * (0.2 + geo.kz * ker.tau / units.mass))


def test_singular_dispatch_threshold(units, packet):
    """The transverse limit and the direct branch meet continuously.

    Just above the |k_z|/k threshold the direct formula runs; just below,
    the limiting form.  The physical O(k_z) difference at the threshold
    is ~3.5|k_z|/k, far below any observable tolerance.
    """
    fr = front(1.0, units)
    t = 2.0
    eps = KZ_FRACTION_LIMIT
    geo_above = mode_geometry(0.0, math.acos(2.0 * eps), units)
    geo_below = mode_geometry(0.0, math.acos(0.5 * eps), units)
    f_above = kernel(0.3, 0.4, t, geo_above, fr, packet, units).F
    f_below = kernel(0.3, 0.4, t, geo_below, fr, packet, units).F
    assert abs(f_above - f_below) / abs(f_below) < 5e-7


def test_exact_transverse_direction(units, packet):
    # theta = pi/2 puts k_z at exactly 0; the limit branch must produce
    # the finite transverse closed form
    fr = front(1.0, units)
    geo = mode_geometry(0.0, math.pi / 2.0, units)
    ker = kernel(0.1, 0.2, 1.5, geo, fr, packet, units)
    at = np.sqrt(ker.at_sq)
    want = (-2.0 * math.sqrt(math.pi) / (at * ker.Delta_k)
            * np.exp(-0.1 ** 2 / ker.at_sq)
            * (1.0 - np.exp(-1j * ker.Delta_k * ker.tau)))
    assert ker.F == pytest.approx(complex(want), rel=1e-9)


_UNITS = to_internal(default_atom(), a=1.0)


@settings(max_examples=60, deadline=None)
@given(z=st.floats(-3.0, 3.0), px=st.floats(-2.0, 2.0),
       t=st.floats(-2.0, 6.0), delta=st.floats(-8.0, 8.0),
       theta=st.floats(0.0, math.pi), v=st.sampled_from([0.2, 1.0, 10.0]))
def test_emission_weight_nonnegative_and_gated(z, px, t, delta, theta, v):
    units = _UNITS
    fr = front(v, units)
    geo = mode_geometry(delta, theta, units)
    w = float(emission_weight(z, px, tau(t, z, fr), delta_k(geo),
                              geo.kx, geo.kz, 1.0, units.mass))
    assert w >= 0.0
    assert np.isfinite(w)
    if tau(t, z, fr) <= 0.0:
        assert w == 0.0


def test_emission_weight_matches_kernel(units, packet):
    fr = front(1.0, units)
    geo = mode_geometry(0.7, 1.1, units)
    t, z, px = 1.8, -0.2, 0.5
    ker = kernel(z, px, t, geo, fr, packet, units)
    w = float(emission_weight(z, px, ker.tau, delta_k(geo),
                              geo.kx, geo.kz, packet.a, units.mass))
    assert w == pytest.approx(
        math.exp(-2.0 * ker.tau) * abs(ker.F) ** 2, rel=1e-12)


# -- simultaneous decay reference amplitude --------------------------------

def test_sse_amplitude_frozen_point(units):
    # at p = 0 and the recoil-cancelling detuning the modulus is exactly
    # the resonant two-exponential value (1 - e^{-t})^2 at gamma = 1
    geo = mode_geometry(-0.26656, 0.4, units)
    amp = sse_amplitude_beta((0.0, 0.0, 0.0), geo, 10.0, units)
    assert abs(amp) ** 2 == pytest.approx(0.999909202201629, rel=1e-9)


def test_sse_amplitude_gate_and_phase(units):
    geo = mode_geometry(1.0, 1.0, units)
    assert sse_amplitude_beta((0.0, 0.0, 0.0), geo, -0.5, units) == 0.0
    # modulus is phase-convention independent; check the closed form
    amp = sse_amplitude_beta((0.0, 0.0, 0.0), geo, 2.0, units)
    x = delta_k(geo)  # p = 0: detuning is the full phase mismatch
    want = (math.exp(-4.0) - 2.0 * math.exp(-2.0) * math.cos(2.0 * x) + 1.0) \
        / (1.0 + x * x)
    # the amplitude assembles x from the +-omega0/2 route, which rounds
    # the detuning at ~5e-9 absolute; compare at that honesty level
    assert abs(amp) ** 2 == pytest.approx(want, rel=1e-8)
