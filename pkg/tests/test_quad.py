"""Quadrature engine: rules, windows, and the assembled spectral density."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nsse.model import WavePacket, emission_weight, front
from nsse.quad import (QuadSpec, QuadratureError, _filon_integral,
                       _filon_weights, _q_constant, _z_window, adaptive_batch,
                       gauss_hermite, norms, p_theta, q_oracle,
                       q_spectrum_batch)


# -- Gauss-Hermite ----------------------------------------------------------

def _hermite_moment(k: int) -> float:
    # int u^k e^{-u^2} du = sqrt(pi) (k-1)!! / 2^(k/2) for even k, else 0
    if k % 2:
        return 0.0
    val = math.sqrt(math.pi)
    for m in range(1, k, 2):
        val *= m / 2.0
    return val


@pytest.mark.parametrize("order", [8, 24, 40])
def test_gauss_hermite_polynomial_exactness(order):
    u, w = gauss_hermite(order)
    scale = math.sqrt(math.pi)
    # exact through degree 2*order - 1; probe the top even degree too
    for k in range(0, min(2 * order - 1, 15)):
        got = float((w * u ** k).sum())
        assert got == pytest.approx(_hermite_moment(k), rel=1e-13, abs=1e-13 * scale)


def test_gauss_hermite_cached_and_frozen():
    u1, w1 = gauss_hermite(24)
    u2, w2 = gauss_hermite(24)
    assert u1 is u2 and w1 is w2
    assert not u1.flags.writeable and not w1.flags.writeable
    with pytest.raises(ValueError):
        u1[0] = 0.0


# -- adaptive Gauss-Kronrod -------------------------------------------------

def test_adaptive_batch_smooth_integrand():
    I, err = adaptive_batch(lambda x: np.exp(x)[None, :], 0.0, 1.0,
                            rel_tol=1e-10, max_panels=64)
    assert float(I[0]) == pytest.approx(math.e - 1.0, rel=1e-12)
    assert float(err[0]) <= 1e-10 * (math.e - 1.0)


def test_adaptive_batch_rows_converge_individually():
    # second row is six orders down; per-row tolerance must still hold
    def f(x):
        return np.stack([np.exp(x), 1e-6 * np.sin(x)])

    I, err = adaptive_batch(f, 0.0, math.pi / 2, rel_tol=1e-9, max_panels=128)
    assert float(I[0]) == pytest.approx(math.e ** (math.pi / 2) - 1.0, rel=1e-10)
    assert float(I[1]) == pytest.approx(1e-6, rel=1e-10)
    assert err[1] <= 1e-9 * 1e-6


def test_adaptive_batch_degenerate_interval_is_zero():
    I, err = adaptive_batch(lambda x: np.ones((3, x.size)), 2.0, 2.0,
                            rel_tol=1e-8, max_panels=16)
    assert I.shape == (3,)
    assert np.all(I == 0.0) and np.all(err == 0.0)


def test_adaptive_batch_break_resolves_kink():
    I, _ = adaptive_batch(lambda x: np.abs(x)[None, :], -1.0, 2.0,
                          rel_tol=1e-12, max_panels=64, breaks=(0.0,))
    assert float(I[0]) == pytest.approx(2.5, rel=1e-13)


def test_adaptive_batch_failure_keeps_estimate():
    # 40 rad/unit over 20 units cannot converge on six panels
    with pytest.raises(QuadratureError) as info:
        adaptive_batch(lambda x: np.cos(40.0 * x)[None, :], 0.0, 20.0,
                       rel_tol=1e-13, max_panels=6, init_panels=2,
                       label="wiggle")
    exc = info.value
    assert "wiggle" in str(exc)
    assert exc.estimate.shape == (1,)
    assert np.all(np.isfinite(exc.estimate))
    assert float(exc.error_bound[0]) > 0.0


@settings(max_examples=30, deadline=None)
@given(
    coeffs=st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=7),
    lo=st.floats(-2.0, 1.0),
    width=st.floats(0.1, 3.0),
)
def test_adaptive_batch_exact_on_polynomials(coeffs, lo, width):
    hi = lo + width
    c = np.array(coeffs)

    def f(x):
        return np.polynomial.polynomial.polyval(x, c)[None, :]

    I, _ = adaptive_batch(f, lo, hi, rel_tol=1e-9, max_panels=32)
    anti = np.polynomial.polynomial.polyint(c)
    exact = np.polynomial.polynomial.polyval(hi, anti) \
        - np.polynomial.polynomial.polyval(lo, anti)
    assert float(I[0]) == pytest.approx(float(exact), rel=1e-11, abs=1e-11)


# -- Filon panels -----------------------------------------------------------

def test_filon_weights_reduce_to_simpson():
    qm, q0, qp = _filon_weights(np.array(0.0))
    assert complex(qm) == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert complex(q0) == pytest.approx(4.0 / 3.0, rel=1e-14)
    assert complex(qp) == pytest.approx(1.0 / 3.0, rel=1e-14)


@pytest.mark.parametrize("beta,tol", [
    # series branch: truncation ~ |beta|^6 / 3240, largest at the switch
    (0.30, 6e-7), (0.30j, 6e-7), (0.2 + 0.25j, 6e-7),
    # closed forms past the switch carry only roundoff
    (0.40, 1e-12), (0.40j, 1e-12), (3.0 - 2.0j, 1e-12),
])
def test_filon_weights_match_basis_integrals(beta, tol):
    """Each branch against the defining Lagrange-basis integrals."""
    basis = (lambda s: 0.5 * s * (s - 1.0),
             lambda s: 1.0 - s * s,
             lambda s: 0.5 * s * (s + 1.0))
    got = _filon_weights(np.array(beta))
    for q, L in zip(got, basis):
        ref_re = integrate.quad(
            lambda s: (L(s) * np.exp(beta * s)).real, -1.0, 1.0,
            epsabs=1e-14)[0]
        ref_im = integrate.quad(
            lambda s: (L(s) * np.exp(beta * s)).imag, -1.0, 1.0,
            epsabs=1e-14)[0]
        assert abs(complex(q) - complex(ref_re, ref_im)) < tol


def test_filon_matches_direct_quadrature():
    # one oscillatory envelope integral, shaped like the production call
    w_lo, w_hi = 0.0, 4.0
    n_p = 96
    mu0 = -0.5 + 6.0j

    def g_fn(w):
        return np.exp(-((w - 2.0) ** 2)) * (1.0 + 0.3 * w)

    wn = np.linspace(w_lo, w_hi, 2 * n_p + 1)
    g = g_fn(wn)[None, :, None].astype(complex)
    mu = np.array([[mu0]])
    got = _filon_integral(g, w_lo, (w_hi - w_lo) / (2 * n_p), n_p, mu)[0, 0]

    ref_re = integrate.quad(
        lambda w: (g_fn(w) * np.exp(mu0 * (w - w_lo))).real, w_lo, w_hi,
        epsabs=1e-13, limit=200)[0]
    ref_im = integrate.quad(
        lambda w: (g_fn(w) * np.exp(mu0 * (w - w_lo))).imag, w_lo, w_hi,
        epsabs=1e-13, limit=200)[0]
    # quadratic panels: O(h^4) truncation, ~1e-8 absolute at this h
    assert got.real == pytest.approx(ref_re, abs=2e-8)
    assert got.imag == pytest.approx(ref_im, abs=2e-8)


# -- z window ---------------------------------------------------------------

def test_z_window_mirrors_with_mode_direction(units, packet, quadspec):
    fr = front(1.0, units)
    t = 5.0
    k0 = units.k0
    lo_p, hi_p = _z_window(t, fr, packet, quadspec, units, +k0)
    lo_m, hi_m = _z_window(t, fr, packet, quadspec, units, -k0)
    assert hi_p == pytest.approx(-lo_m, rel=1e-12)
    assert lo_p == pytest.approx(-hi_m, rel=1e-12)
    # always wide enough for the undrifted packet core
    assert lo_p < -packet.a and hi_p > packet.a


def test_z_window_widens_with_time(units, packet, quadspec):
    fr = front(1.0, units)
    k0 = units.k0
    w1 = _z_window(2.0, fr, packet, quadspec, units, k0)
    w2 = _z_window(12.0, fr, packet, quadspec, units, k0)
    assert (w2[1] - w2[0]) > (w1[1] - w1[0])


# -- spectral density -------------------------------------------------------

def test_theta_zero_drops_transverse_momentum(units, packet, quadspec):
    # on-axis modes have no k_x, so the Hermite order cannot matter
    fr = front(1.0, units)
    deltas = np.array([-2.0, 0.0, 2.0])
    fine = q_spectrum_batch(deltas, 0.0, 3.0, fr, packet, quadspec, units)
    coarse = q_spectrum_batch(deltas, 0.0, 3.0, fr, packet,
                              QuadSpec(hermite_order=8), units)
    assert fine == pytest.approx(coarse, rel=1e-10)


@pytest.mark.parametrize("v,t,theta,delta", [
    (1.0, 8.0, 2.2, -1.3),
    (10.0, 3.0, 0.9, 2.0),
])
def test_term_split_matches_direct_z_integral(units, packet, quadspec,
                                              v, t, theta, delta):
    """The decay/record/cross decomposition against one plain quadrature."""
    fr = front(v, units)
    ratio = 1.0 + delta / units.omega0_over_gamma
    k = units.k0 * ratio
    kx = k * math.sin(theta)
    kz = k * math.cos(theta)
    dk = delta + units.eps_recoil * ratio ** 2
    a = packet.a
    mass = units.mass
    u, w = gauss_hermite(quadspec.hermite_order)
    px = math.sqrt(2.0) / a * u
    pxw = w * (math.sqrt(2.0) / a)

    window = _z_window(t, fr, packet, quadspec, units, kz)

    def integrand(z):
        tau = t + z / fr.v_internal
        wt = emission_weight(z, px, tau, dk, kx, kz, a, mass)
        return float((wt * pxw).sum())

    z_edge = -fr.v_internal * t
    pts = [z_edge] if window[0] < z_edge < window[1] else None
    direct, _ = integrate.quad(integrand, window[0], window[1],
                               points=pts, limit=400, epsabs=0.0,
                               epsrel=1e-9)
    direct *= float(_q_constant(a, np.array([ratio]))[0])

    split = float(q_spectrum_batch(np.array([delta]), theta, t, fr, packet,
                                   quadspec, units, window=window)[0])
    assert split == pytest.approx(direct, rel=5e-4)


def test_density_nonnegative_across_regimes(units, packet, quadspec):
    deltas = np.array([-4.0, 0.5, 3.0])
    peak = 0.0
    vals = []
    for v in (0.3, 10.0):
        fr = front(v, units)
        for t in (-2.0, 1.0, 6.0):
            for theta in (0.3, 1.7, 3.0):
                q = q_spectrum_batch(deltas, theta, t, fr, packet, quadspec,
                                     units)
                vals.append(q)
                peak = max(peak, float(q.max()))
    low = min(float(q.min()) for q in vals)
    assert low >= -1e-10 * peak


def test_window_insensitivity_for_fast_front(units, packet, quadspec):
    # at v = 10 the drifted record tail sits inside both windows
    fr = front(10.0, units)
    deltas = np.array([-1.0, 0.0, 2.0])
    base = q_spectrum_batch(deltas, 1.1, 2.0, fr, packet, quadspec, units)
    import dataclasses
    wide = dataclasses.replace(quadspec, z_window_sigmas=16.0)
    other = q_spectrum_batch(deltas, 1.1, 2.0, fr, packet, wide, units)
    assert other == pytest.approx(base, rel=3e-4)


# -- angular integral and norms ---------------------------------------------

def test_p_theta_reports_tail_and_error(units, packet, quadspec):
    fr = front(float("inf"), units)
    value, info = p_theta(1.0, 1.0, fr, packet, quadspec, units,
                          return_info=True)
    assert value > 0.0
    # the spectral window cuts a known Lorentzian-like tail, order 1/W
    assert 0.0 < info["tail_estimate"] < 0.05 * value
    assert info["quad_error"] <= quadspec.omega_rel_tol * value


def test_norms_instant_front_closed_form(units, packet):
    spec = QuadSpec().figures()
    import dataclasses
    spec = dataclasses.replace(spec, theta_order=12)
    fr = front(float("inf"), units)

    photons = []
    for t in (0.3, 1.0, 1.5):
        excited, photon = norms(t, fr, packet, spec, units)
        assert excited == pytest.approx(math.exp(-2.0 * t), rel=1e-12)
        unitary = 1.0 - math.exp(-2.0 * t)
        # the +-W window cuts a 1/omega^2 tail whose mass scales like
        # 2 (1 + e^{-2t}) / (pi W); allow 30% slack on that estimate
        tail_bound = 1.3 * 2.0 * (1.0 + math.exp(-2.0 * t)) / (math.pi * 60.0)
        assert 0.0 < unitary - photon < tail_bound
        photons.append(photon)
    assert photons[0] < photons[1] < photons[2]


def test_norms_pre_switch_is_vacuum(units, packet, quadspec):
    fr = front(float("inf"), units)
    excited, photon = norms(-1.0, fr, packet, quadspec, units)
    assert excited == 1.0
    assert photon == pytest.approx(0.0, abs=1e-12)


# -- brute-force oracle -----------------------------------------------------

def test_oracle_agrees_at_fresh_points(units, packet):
    # seed distinct from the validate suite; same physical ranges
    from nsse.model import kernel, mode_geometry

    rng = np.random.default_rng(7)
    a = units.a
    worst = 0.0
    for v in (0.5, 10.0):
        fr = front(v, units)
        tau_v = float(rng.uniform(0.5, 4.0))
        z = float(rng.uniform(-1.0, 1.0))
        t = tau_v - z / fr.v_internal
        px = float(rng.uniform(-1.0, 1.0))
        delta = float(rng.uniform(-3.0, 3.0))
        theta = float(rng.uniform(0.2, math.pi - 0.2))
        brute = q_oracle(z, px, delta, theta, t, fr, packet, units)
        geo = mode_geometry(delta, theta, units)
        ker = kernel(z, px, t, geo, fr, packet, units)
        pref = (a / math.sqrt(2.0 * math.pi)) ** 3 \
            * math.exp(-(px * a) ** 2 / 2.0) * math.sqrt(2.0 * math.pi) / a
        mine = pref * abs(ker.F) ** 2
        worst = max(worst, abs(mine - brute) / abs(brute))
    assert worst < 1e-4


# -- configuration surface --------------------------------------------------

def test_quadspec_presets():
    base = QuadSpec()
    assert base.hermite_order == 40
    assert base.z_rel_tol == 1e-5 and base.omega_rel_tol == 1e-4
    assert base.z_window_sigmas == 8.0 and base.omega_window_gammas == 60.0

    fig = base.figures()
    assert fig.hermite_order == 24
    # everything else untouched
    assert fig.z_rel_tol == base.z_rel_tol
    assert fig.omega_window_gammas == base.omega_window_gammas

    fast = base.relaxed()
    assert fast.hermite_order < fig.hermite_order
    assert fast.z_rel_tol > base.z_rel_tol
    assert fast.omega_window_gammas < base.omega_window_gammas
