"""Faddeeva function with overflow-safe scaled evaluation.

W(xi) = exp(-xi^2) * erfc(-i*xi) is entire, bounded on the closed upper
half-plane and growing like 2*exp(-xi^2) below the real axis, where it
quickly leaves the range of double precision.  The emission kernel only
ever needs products exp(s) * W(eta) whose logarithms stay moderate even
when both factors are extreme, so everything here is built around a
(mantissa, log_scale) representation:

    value = mantissa * exp(log_scale),   |mantissa| in [1e-2, 1e2].

Upper half-plane values come straight from scipy's wofz; the lower
half-plane uses the reflection W(xi) = 2*exp(-xi^2) - W(-xi) with the
two terms combined at a common log scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import wofz

__all__ = ["ComplexScaled", "FaddeevaOverflowError", "faddeeva", "scaled_exp_w"]

# exp() overflows just above this; leave headroom for the mantissa band
_LOG_MAX = 700.0


class FaddeevaOverflowError(OverflowError):
    """Plain-valued result exceeds double range; use the scaled form."""


@dataclass(frozen=True)
class ComplexScaled:
    """A complex number stored as mantissa * exp(log_scale)."""

    mantissa: complex
    log_scale: float

    @property
    def value(self) -> complex:
        """Collapse to a plain complex; raises if out of double range."""
        if self.mantissa == 0.0:
            return 0.0 + 0.0j
        total = self.log_scale + np.log(abs(self.mantissa))
        if total > _LOG_MAX:
            raise FaddeevaOverflowError(
                f"scaled value exp({total:.1f}) exceeds double range"
            )
        return self.mantissa * np.exp(self.log_scale)

    def abs_log(self) -> float:
        """log|value|, computed without overflow."""
        if self.mantissa == 0.0:
            return -np.inf
        return self.log_scale + float(np.log(abs(self.mantissa)))


def _scaled_pair(s, eta):
    """Vectorized core of scaled_exp_w.

    Both arguments broadcast; returns (mantissa, log_scale) arrays with
    |mantissa| renormalized into [1e-2, 1e2] wherever it is nonzero.
    """
    s = np.asarray(s, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    s, eta = np.broadcast_arrays(s, eta)

    lower = eta.imag < 0.0
    eta_up = np.where(lower, -eta, eta)
    w_up = wofz(eta_up)

    # upper half-plane: exp(s) * W(eta) directly
    log = s.real.copy()
    mant = w_up * np.exp(1j * s.imag)

    if np.any(lower):
        # reflected: exp(s) * (2*exp(-eta^2) - W(-eta))
        e2 = s - eta * eta           # log of the reflected term, complex
        log_a = e2.real
        log_b = s.real
        top = np.maximum(log_a, log_b)
        mant_l = (
            2.0 * np.exp(1j * e2.imag) * np.exp(log_a - top)
            - w_up * np.exp(1j * s.imag) * np.exp(log_b - top)
        )
        mant = np.where(lower, mant_l, mant)
        log = np.where(lower, top, log)

    # renormalize mantissa into the contract band
    mag = np.abs(mant)
    off = (mag > 0.0) & ((mag < 1e-2) | (mag > 1e2))
    if np.any(off):
        shift = np.where(off, np.log(np.where(mag > 0.0, mag, 1.0)), 0.0)
        mant = mant * np.exp(-shift)
        log = log + shift
    log = np.where(mag == 0.0, 0.0, log)
    return mant, log


def scaled_exp_w(b_sq_over_at_sq: complex, eta: complex) -> ComplexScaled:
    """Overflow-safe product exp(b^2/a_t^2) * W(eta).

    The first argument is the complex exponent appearing in front of the
    Faddeeva factor of the emission kernel; passing 0 yields W(eta)
    itself in scaled form.
    """
    mant, log = _scaled_pair(b_sq_over_at_sq, eta)
    return ComplexScaled(complex(mant), float(log))


def faddeeva(xi):
    """Faddeeva function W(xi) on the full complex plane.

    Accepts scalars or arrays.  Upper half-plane points are evaluated
    directly; lower half-plane points via the reflection formula with
    scaled arithmetic.  Raises FaddeevaOverflowError if any requested
    plain value exceeds the double range (deep lower half-plane); use
    scaled_exp_w(0, xi) there instead.
    """
    scalar = np.isscalar(xi) or (isinstance(xi, np.ndarray) and xi.ndim == 0)
    mant, log = _scaled_pair(0.0, xi)
    mag = np.abs(mant)
    total = np.where(mag > 0.0, log + np.log(np.where(mag > 0.0, mag, 1.0)), -np.inf)
    if np.any(total > _LOG_MAX):
        raise FaddeevaOverflowError(
            "W overflows double precision at some requested points; "
            "use scaled_exp_w(0, xi)"
        )
    out = mant * np.exp(log)
    if scalar:
        return complex(out)
    return out
