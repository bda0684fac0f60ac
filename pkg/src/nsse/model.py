"""Emission kernel for decay switched on by a moving front.

The excited packet starts coupling to the vacuum at the retarded time
tau(t, z) = t + z/v: a step front sweeping in the -z direction at speed
v (v = inf recovers the ordinary, everywhere-simultaneous decay).  For
a Gaussian initial packet the momentum integrals of the one-photon
amplitude collapse to a closed form per (z, p_x):

    F = i*pi*M/|k_z| * [ exp(b1^2/a_t^2) W(eta1)
                         - exp(-i*Delta_k*tau) exp(b2^2/a_t^2) W(eta2) ]

with a_t^2 = a^2 - 2i*tau/M (packet spreading), b1 = i z,
b2 = i(z + k_z tau / M) (recoil drift of the emission record),
Delta_k = delta_k + i*gamma - p_x k_x / M (complex Doppler-shifted
detuning) and eta_j = (M a_t / (2|k_z|)) (Delta_k - 2 k_z b_j/(M a_t^2)).
W is the Faddeeva function.  Everything below is expressed in internal
units hbar = gamma = lambda0 = 1 (see units.py).

As k_z -> 0 both Faddeeva arguments diverge and the kernel tends to the
finite transverse-direction limit

    F -> -2*sqrt(pi)/(a_t Delta_k) * exp(-z^2/a_t^2) * (1 - exp(-i*Delta_k*tau)),

used below a calibrated |cos(theta)| threshold.

The second term of F grows like exp(gamma*tau) against the global
exp(-2*gamma*tau) damping of the emission probability, so the kernel is
evaluated in (mantissa, log_scale) form throughout; only the combination
exp(-2*tau)|F|^2 is ever collapsed to a plain float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import ComplexScaled, _scaled_pair
from .units import UnitSystem

__all__ = [
    "ModeGeometry", "Front", "WavePacket", "EmissionKernel",
    "mode_geometry", "front", "tau", "delta_k", "kernel",
    "sse_amplitude_beta", "KZ_FRACTION_LIMIT",
]

# |k_z|/k below this uses the transverse-direction limit of F.  The
# direct branch is numerically stable arbitrarily close to k_z = 0 (the
# bracket never cancels catastrophically because the switched term
# carries e^{gamma tau}), so the limit only guards the exact zero; the
# two branches differ by the physical O(k_z) correction, about
# 3.5 |k_z|/k, which keeps the dispatch continuous to ~1e-8.  See
# test_model.py::test_singular_dispatch_threshold.
KZ_FRACTION_LIMIT = 3e-9


@dataclass(frozen=True)
class ModeGeometry:
    """One photon mode: detuning [gamma units] and polar angle [rad].

    The azimuth is fixed to zero (k_y = 0); observables depend on it
    only through the dipole factor, which is handled separately.
    Derived fields are internal: k = omega/c with k0 = 2*pi exactly.
    """

    delta: float
    theta: float
    eps_recoil: float
    omega_ratio: float   # omega_k / omega0
    k: float
    kx: float
    kz: float


def mode_geometry(delta: float, theta: float, units: UnitSystem) -> ModeGeometry:
    """Build a ModeGeometry from detuning [gamma] and angle [rad]."""
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    ratio = 1.0 + delta / units.omega0_over_gamma
    if ratio <= 0.0:
        raise ValueError("detuning places the mode at negative frequency")
    k = units.k0 * ratio
    return ModeGeometry(
        delta=delta,
        theta=theta,
        eps_recoil=units.eps_recoil,
        omega_ratio=ratio,
        k=k,
        kx=k * math.sin(theta),
        kz=k * math.cos(theta),
    )


@dataclass(frozen=True)
class Front:
    """Switching front: speed in v_recoil units, sweeping along -z.

    v = inf marks the simultaneous (everywhere switched at t = 0) mode.
    """

    v: float
    v_internal: float

    def __post_init__(self) -> None:
        if not self.v > 0.0:
            raise ValueError("front speed must be positive (or inf)")

    @property
    def instant(self) -> bool:
        return math.isinf(self.v)


def front(v: float, units: UnitSystem) -> Front:
    return Front(v=v, v_internal=units.velocity_to_internal(v))


@dataclass(frozen=True)
class WavePacket:
    """Gaussian center-of-mass packet, width parameter a [lambda0 units].

    The initial position density per axis is exp(-2 r^2 / a^2): r.m.s.
    width a/2.  The momentum density has r.m.s. width hbar/a.
    """

    a: float

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError("packet width a must be positive")

    @property
    def sigma_p(self) -> float:
        return 1.0 / self.a

    @property
    def sigma_x(self) -> float:
        return self.a / 2.0


def tau(t: float, z, fr: Front):
    """Retarded switch-on time t + z/v (= t for the instant front)."""
    if fr.instant:
        return t + 0.0 * np.asarray(z, float)
    return t + np.asarray(z, float) / fr.v_internal


def delta_k(mode: ModeGeometry) -> float:
    """Detuning including the quadratic recoil term [gamma units]."""
    return mode.delta + mode.eps_recoil * mode.omega_ratio ** 2


@dataclass(frozen=True)
class EmissionKernel:
    """All intermediate quantities of one kernel evaluation."""

    tau: float
    at_sq: complex
    delta_k: float
    Delta_k: complex
    b1: complex
    b2: complex
    eta1: complex
    eta2: complex
    F_scaled: ComplexScaled

    @property
    def F(self) -> complex:
        return self.F_scaled.value


def kernel_terms(z, px, tau_v, dk, kx, kz, a, mass):
    """Vectorized scaled evaluation of the two kernel pieces.

    F splits as T1 - exp(tau) exp(-i rho tau) T2 with rho = Re(Delta_k):
    T1 is the decaying freshly-switched part, T2 the persistent record
    of the switch-on moment, and the explicit exponential carries every
    fast z-oscillation and all growth against the exp(-2 gamma tau)
    damping.  Returns (m1, l1, m2, l2, rho, extras) with T_j given by
    m_j exp(l_j); both logs stay moderate, so the pieces can be combined
    without overflow.  tau_v <= 0 entries evaluate at tau = 0, where the
    two pieces coincide and the recombined kernel cancels exactly; the
    switch-on gate itself lives in the recombining callers.
    """
    z = np.asarray(z, float)
    px = np.asarray(px, float)
    tau_v = np.asarray(tau_v, float)
    dk = np.asarray(dk, float)
    kx = np.asarray(kx, float)
    kz = np.asarray(kz, float)
    z, px, tau_v, dk, kx, kz = np.broadcast_arrays(z, px, tau_v, dk, kx, kz)

    tau_s = np.maximum(tau_v, 0.0)

    at_sq = a * a - 2j * tau_s / mass
    at = np.sqrt(at_sq)                     # principal root, Re > 0
    Delta = dk + 1j - px * kx / mass
    rho = Delta.real

    b1 = 1j * z
    b2 = 1j * (z + kz * tau_s / mass)

    k = np.hypot(kx, kz)
    kz_abs = np.abs(kz)
    singular = kz_abs < KZ_FRACTION_LIMIT * k

    # regular branch; clamp |k_z| on the singular lanes to avoid 1/0,
    # their values are overwritten below
    kz_safe = np.where(singular, k * KZ_FRACTION_LIMIT, kz)
    kz_abs_safe = np.abs(kz_safe)
    pref = mass * at / (2.0 * kz_abs_safe)
    eta1 = pref * (Delta - 2.0 * kz_safe * b1 / (mass * at_sq))
    eta2 = pref * (Delta - 2.0 * kz_safe * b2 / (mass * at_sq))

    m1, l1 = _scaled_pair(b1 * b1 / at_sq, eta1)
    m2, l2 = _scaled_pair(b2 * b2 / at_sq, eta2)
    logk = np.log(math.pi * mass / kz_abs_safe)
    m1 = 1j * m1
    m2 = 1j * m2
    l1 = l1 + logk
    l2 = l2 + logk

    if np.any(singular):
        # both pieces tend to -2 sqrt(pi)/(a_t Delta) exp(-z^2/a_t^2)
        s1 = -z * z / at_sq
        c = -2.0 * math.sqrt(math.pi) / (at * Delta)
        m_lim = (c / np.abs(c)) * np.exp(1j * s1.imag)
        l_lim = s1.real + np.log(np.abs(c))
        m1 = np.where(singular, m_lim, m1)
        m2 = np.where(singular, m_lim, m2)
        l1 = np.where(singular, l_lim, l1)
        l2 = np.where(singular, l_lim, l2)

    extras = (at_sq, Delta, b1, b2, eta1, eta2)
    return m1, l1, m2, l2, rho, extras


def _kernel_scaled(z, px, tau_v, dk, kx, kz, a, mass):
    """Recombined scaled kernel F; see kernel_terms for the pieces.

    Applies the switch-on gate: entries with tau_v <= 0 are zero.
    """
    m1, l1, m2, l2, rho, extras = kernel_terms(
        z, px, tau_v, dk, kx, kz, a, mass)
    tau_b = np.broadcast_to(np.asarray(tau_v, float), m1.shape)
    on = tau_b > 0.0
    tau_s = np.maximum(tau_b, 0.0)
    e2 = l2 + tau_s
    top = np.maximum(l1, e2)
    mant = m1 * np.exp(l1 - top) \
        - m2 * np.exp(e2 - top) * np.exp(-1j * rho * tau_s)
    mant = np.where(on, mant, 0.0)
    log = np.where(on, top, 0.0)
    return mant, log, extras


def emission_weight(z, px, tau_v, dk, kx, kz, a, mass):
    """exp(-2*gamma*tau) |F|^2, overflow-safe, vectorized."""
    mant, log, _ = _kernel_scaled(z, px, tau_v, dk, kx, kz, a, mass)
    tau_c = np.maximum(np.asarray(tau_v, float), 0.0)
    expo = 2.0 * log - 2.0 * tau_c
    out = (mant.real ** 2 + mant.imag ** 2) * np.exp(expo)
    return np.where(np.abs(mant) > 0.0, out, 0.0)


def kernel(z: float, px: float, t: float, mode: ModeGeometry, fr: Front,
           packet: WavePacket, units: UnitSystem) -> EmissionKernel:
    """Scalar kernel evaluation with all intermediates exposed.

    z in lambda0 units, px in internal momentum (hbar/lambda0), t in
    internal time (1/gamma); callers holding tau_natural times convert
    with units.time_to_internal first.
    """
    tv = tau(t, z, fr)
    dk = delta_k(mode)
    mant, log, extras = _kernel_scaled(
        z, px, tv, dk, mode.kx, mode.kz, packet.a, units.mass)
    at_sq, Delta, b1, b2, eta1, eta2 = extras
    return EmissionKernel(
        tau=float(tv),
        at_sq=complex(at_sq),
        delta_k=float(dk),
        Delta_k=complex(Delta),
        b1=complex(b1),
        b2=complex(b2),
        eta1=complex(eta1),
        eta2=complex(eta2),
        F_scaled=ComplexScaled(complex(mant), float(log)),
    )


def _s0(px: float, py: float, pz: float, units: UnitSystem) -> complex:
    """i (p^2/2M + omega0/2), internal units."""
    p_sq = px * px + py * py + pz * pz
    return 1j * (p_sq / (2.0 * units.mass) + units.omega0_over_gamma / 2.0)


def _s_k(px: float, py: float, pz: float, mode: ModeGeometry,
         units: UnitSystem) -> complex:
    """i ((p - k)^2/2M - omega0/2 + omega_k), internal units."""
    q_sq = (px - mode.kx) ** 2 + py * py + (pz - mode.kz) ** 2
    omega_k = units.omega0_over_gamma + mode.delta
    return 1j * (q_sq / (2.0 * units.mass) - units.omega0_over_gamma / 2.0
                 + omega_k)


def sse_amplitude_beta(p, mode: ModeGeometry, t: float,
                       units: UnitSystem) -> complex:
    """One-photon amplitude of simultaneous decay, coupling stripped.

    -Theta(t) [exp(-(gamma+s0)t) - exp(-s_k t)] / (gamma + s0 - s_k)
    for momentum p = (px, py, pz) in internal units.  The common phase
    exp(-s0 t) is kept; moduli are what observables use.
    """
    if t <= 0.0:
        return 0.0 + 0.0j
    px, py, pz = p
    s0 = _s0(px, py, pz, units)
    sk = _s_k(px, py, pz, mode, units)
    # s0 - sk is purely imaginary: i*(p.k/M - delta_k).  Take the clean
    # imaginary part to keep the fast-phase cancellation stable.
    x = (s0 - sk).imag
    den = 1.0 + 1j * x   # gamma + s0 - s_k, gamma = 1
    num = np.exp(-t) - np.exp(1j * x * t)
    return complex(-np.exp(-s0 * t) * num / den)
