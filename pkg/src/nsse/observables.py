"""User-facing observables: spectra, angular distributions, references.

This layer turns the quadrature engine's raw emission densities into the
quantities the figures plot: peak- or area-normalized spectral densities
with a natural-lineshape reference, mean-normalized reduced angular
distributions, and the simultaneous-switching (instant front) reference
model evaluated from the analytic amplitude rather than the z-integral
engine, so limit checks compare genuinely different code paths.

Times at this layer are in tau_natural units, angles in radians,
detunings in gamma units. Internal conversions happen at the quad
boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import WavePacket, front, mode_geometry, delta_k
from .quad import QuadSpec, gauss_hermite, norms, p_theta, q_spectrum_batch
from .units import UnitSystem

NORMALIZATIONS = ("peak", "area", "raw")

# numpy renamed trapz; support both generations
_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class SpectrumDataset:
    """Spectral density on a detuning grid at one (theta, t, v) point.

    detunings are (omega - omega0)/gamma; t is in tau_natural units and
    v in recoil-velocity units (inf marks the simultaneous model).
    """

    detunings: np.ndarray
    values: np.ndarray
    theta: float
    t: float
    v: float
    normalization: str

    def __post_init__(self) -> None:
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        if self.detunings.shape != self.values.shape or self.detunings.ndim != 1:
            raise ValueError("detunings and values must be matching 1-d grids")
        if self.values.size and self.values.min() < 0.0:
            raise ValueError("spectral density must be nonnegative")


@dataclass(frozen=True)
class AngularDataset:
    """Reduced angular distribution P_t(theta) on a (times, thetas) grid.

    values[i, j] belongs to times[i], thetas[j]. The dipole factor is not
    included; a flat distribution means pure dipole radiation. times are
    in tau_natural units.
    """

    thetas: np.ndarray
    times: np.ndarray
    values: np.ndarray
    mean_normalized: bool
    v: float

    def __post_init__(self) -> None:
        if self.values.shape != (self.times.size, self.thetas.size):
            raise ValueError("values must have shape (len(times), len(thetas))")
        if self.values.size and self.values.min() < 0.0:
            raise ValueError("angular distribution must be nonnegative")


def dipole_factor(theta_pk: float) -> float:
    """Angular emission weight 1 - cos^2 = sin^2 of the dipole-photon angle."""
    return math.sin(theta_pk) ** 2


def _finalize(values: np.ndarray, detunings: np.ndarray, normalization: str,
              norm_sq: float | None) -> np.ndarray:
    # tiny negatives are quadrature roundoff on causality-suppressed points
    values = np.maximum(values, 0.0)
    if normalization == "raw":
        return values if norm_sq is None else values / norm_sq
    if normalization == "peak":
        top = values.max()
        if not top > 0.0:
            raise ValueError("cannot peak-normalize an all-zero spectrum")
        return values / top
    area = _trapezoid(values, detunings)
    if not area > 0.0:
        raise ValueError("cannot area-normalize an all-zero spectrum")
    return values / area


def assemble_spectrum(detunings, values, theta: float, t: float, v: float,
                      normalization: str,
                      norm_sq: float | None = None) -> SpectrumDataset:
    """Normalize raw density values and wrap them in a SpectrumDataset.

    Split out of nsse_spectrum so drivers that evaluate the grid in
    deterministic chunks (the CLI) can still normalize over the full
    grid at once.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    detunings = np.asarray(detunings, dtype=float)
    values = np.asarray(values, dtype=float)
    return SpectrumDataset(
        detunings=detunings,
        values=_finalize(values, detunings, normalization, norm_sq),
        theta=theta, t=t, v=v, normalization=normalization,
    )


def assemble_angular(thetas, times, values, v: float,
                     mean_normalized: bool = True) -> AngularDataset:
    """Row-normalize a raw P_t(theta) matrix and wrap it in an AngularDataset.

    Rows whose mean is zero (no emitted signal yet) are left as zeros.
    """
    thetas = np.asarray(thetas, dtype=float)
    times = np.asarray(times, dtype=float)
    values = np.maximum(np.asarray(values, dtype=float), 0.0)
    if mean_normalized:
        row_mean = values.mean(axis=1, keepdims=True)
        live = row_mean[:, 0] > 0.0
        values = values.copy()
        values[live] /= row_mean[live]
    return AngularDataset(thetas=thetas, times=times, values=values,
                          mean_normalized=mean_normalized, v=v)


def nsse_spectrum(detunings, theta: float, t: float, v: float,
                  packet: WavePacket, spec: QuadSpec, units: UnitSystem,
                  normalization: str = "peak") -> SpectrumDataset:
    """Emission spectral density for a front of speed v (recoil units).

    t is the observation time in tau_natural units. In raw mode the
    density is divided by the state norm (excited + emitted), which the
    switched construction conserves only approximately; the factor
    cancels in peak and area modes and is skipped there.
    """
    detunings = np.asarray(detunings, dtype=float)
    fr = front(v, units)
    t_int = units.time_to_internal(t)
    values = q_spectrum_batch(detunings, theta, t_int, fr, packet, spec, units)
    norm_sq = None
    if normalization == "raw":
        excited, photon = norms(t_int, fr, packet, spec, units)
        norm_sq = excited + photon
    return assemble_spectrum(detunings, values, theta, t, v, normalization,
                             norm_sq)


def sse_spectrum(detunings, theta: float, t: float, packet: WavePacket,
                 spec: QuadSpec, units: UnitSystem,
                 normalization: str = "peak") -> SpectrumDataset:
    """Simultaneous-switching reference spectrum from the analytic amplitude.

    The squared switched amplitude depends on atomic momentum only through
    the Doppler projection p.k/M, so an isotropic Gaussian packet reduces
    to a single Gauss-Hermite average of

        (1 - 2 e^{-t} cos(x t) + e^{-2t}) / (x^2 + 1),

    x = p k/M - delta_k, in internal units. t = inf drops the transient
    and leaves the stationary Voigt-like profile; a -> inf collapses the
    momentum spread and recovers the natural Lorentzian at delta_k = 0.
    No z-quadrature is involved, which keeps this reference independent
    of the finite-v engine it validates.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    detunings = np.asarray(detunings, dtype=float)
    t_int = units.time_to_internal(t) if math.isfinite(t) else math.inf
    if not t_int > 0.0:
        raise ValueError("the reference spectrum needs t > 0")
    u, w = gauss_hermite(spec.hermite_order)
    p = np.sqrt(2.0) * u / packet.a
    wn = w / math.sqrt(math.pi)
    values = np.empty(detunings.size)
    for i, d in enumerate(detunings):
        geo = mode_geometry(float(d), theta, units)
        x = p * geo.k / units.mass - delta_k(geo)
        lorentz = 1.0 / (x * x + 1.0)
        if math.isinf(t_int):
            kern = lorentz
        else:
            kern = (1.0 - 2.0 * math.exp(-t_int) * np.cos(x * t_int)
                    + math.exp(-2.0 * t_int)) * lorentz
        values[i] = geo.omega_ratio ** 3 * 3.0 / (8.0 * math.pi ** 2) * (wn * kern).sum()
    return SpectrumDataset(
        detunings=detunings,
        values=_finalize(values, detunings, normalization, None),
        theta=theta, t=t, v=math.inf, normalization=normalization,
    )


def lorentzian_reference(detunings, units: UnitSystem,
                         normalization: str = "peak") -> np.ndarray:
    """Natural lineshape: HWHM gamma, centered on the recoil-shifted line.

    The center solves delta_k(delta) = 0, i.e. delta = -eps_recoil up to
    a correction of order eps_recoil/omega0 (~1e-9 gamma), which is far
    below plotting resolution and dropped.
    """
    detunings = np.asarray(detunings, dtype=float)
    offs = detunings + units.eps_recoil
    values = 1.0 / (math.pi * (offs * offs + 1.0))
    return _finalize(values, detunings, normalization, None)


def reduced_angular(times, thetas, v: float, packet: WavePacket,
                    spec: QuadSpec, units: UnitSystem,
                    mean_normalized: bool = True) -> AngularDataset:
    """Reduced angular distribution over a (times, thetas) grid.

    times in tau_natural units. With mean normalization each row is
    divided by its own theta-average, the scale-free form the surface
    and cut figures use; rows of an instant front come out flat.
    Rows at times with no emitted signal yet are left as zeros rather
    than normalized.
    """
    times = np.asarray(times, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    if times.size == 0 or thetas.size == 0:
        raise ValueError("times and thetas must be non-empty grids")
    fr = front(v, units)
    values = np.empty((times.size, thetas.size))
    for i, tt in enumerate(times):
        t_int = units.time_to_internal(float(tt))
        for j, th in enumerate(thetas):
            values[i, j] = p_theta(float(th), t_int, fr, packet, spec, units)
    return assemble_angular(thetas, times, values, v, mean_normalized)
