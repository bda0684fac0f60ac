"""Self-check suites behind the `validate` command.

Each suite re-derives a property of the implementation against an
independent reference: high-precision special functions, a brute-force
momentum-integral oracle, the analytic simultaneous-switching model, and
physical constraints (causality, norm conservation, late-time isotropy).
Point counts are kept small enough for an interactive run; the pytest
suite runs the same checks at full size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import WavePacket, front, kernel, mode_geometry
from .observables import sse_spectrum
from .quad import QuadSpec, norms, p_theta, q_oracle, q_spectrum_batch
from .special import scaled_exp_w
from .units import UnitSystem


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def check_special(units: UnitSystem, spec: QuadSpec,
                  n_points: int = 400, limit: float = 1e-12) -> SuiteResult:
    """Scaled Faddeeva values against mpmath at 25 significant digits."""
    import mpmath

    rng = np.random.default_rng(20250107)
    pts = rng.uniform(-50.0, 50.0, size=(n_points, 2))
    worst = 0.0
    with mpmath.workdps(25):
        for re, im in pts:
            xi = mpmath.mpc(re, im)
            cs = scaled_exp_w(0.0 + 0.0j, complex(re, im))
            ref = mpmath.exp(-xi * xi) * mpmath.erfc(-1j * xi)
            # rescale the oracle instead of unscaling ours: exp(-xi^2)
            # alone can pass 1e1000 in the deep lower half-plane
            ref_scaled = complex(ref * mpmath.exp(-cs.log_scale))
            err = abs(cs.mantissa - ref_scaled) / abs(ref_scaled)
            worst = max(worst, err)
    return SuiteResult("special", worst <= limit,
                       f"max rel err {worst:.2e} over {n_points} pts (limit {limit:g})")


def check_oracle(units: UnitSystem, spec: QuadSpec,
                 n_points: int = 4, limit: float = 1e-4) -> SuiteResult:
    """|F|^2 from the closed form against brute-force momentum quadrature."""
    rng = np.random.default_rng(42)
    packet = WavePacket(a=units.a)
    a = units.a
    worst = 0.0
    for _ in range(n_points):
        v = float(rng.choice([0.3, 1.0, 10.0]))
        fr = front(v, units)
        # draw the retarded time directly so every sample is causal
        tau_v = float(rng.uniform(0.3, 5.0))
        z = float(rng.uniform(-1.5, 1.5))
        t = tau_v - z / fr.v_internal
        px = float(rng.uniform(-1.5, 1.5))
        delta = float(rng.uniform(-4.0, 4.0))
        theta = float(rng.uniform(0.1, math.pi - 0.1))
        brute = q_oracle(z, px, delta, theta, t, fr, packet, units)
        geo = mode_geometry(delta, theta, units)
        ker = kernel(z, px, t, geo, fr, packet, units)
        gy = math.sqrt(2.0 * math.pi) / a
        pref = (a / math.sqrt(2.0 * math.pi)) ** 3 \
            * math.exp(-(px * a) ** 2 / 2.0)
        mine = pref * gy * abs(ker.F) ** 2
        err = abs(mine - brute) / max(abs(brute), 1e-300)
        worst = max(worst, err)
    return SuiteResult("oracle", worst <= limit,
                       f"max rel err {worst:.2e} over {n_points} random points (limit {limit:g})")


def check_sse_limit(units: UnitSystem, spec: QuadSpec,
                    limit_peak: float = 5e-3, limit_grid: float = 2e-2) -> SuiteResult:
    """Fast front against the analytic simultaneous model, theta = 0."""
    packet = WavePacket(a=units.a)
    fr = front(1e3, units)
    t_tau = 5.0
    t_int = units.time_to_internal(t_tau)
    deltas = np.linspace(-10.0, 10.0, 21)
    mine = q_spectrum_batch(deltas, 0.0, t_int, fr, packet, spec, units)
    ref = sse_spectrum(deltas, 0.0, t_tau, packet, spec, units,
                       normalization="raw").values
    peak = ref.max()
    ipk = int(np.argmax(ref))
    err_peak = abs(mine[ipk] - ref[ipk]) / peak
    err_grid = np.abs(mine - ref).max() / peak
    ok = err_peak <= limit_peak and err_grid <= limit_grid
    return SuiteResult("sse-limit", ok,
                       f"peak err {err_peak:.2e} (limit {limit_peak:g}), "
                       f"grid err {err_grid:.2e} of peak (limit {limit_grid:g})")


def check_causality(units: UnitSystem, spec: QuadSpec,
                    limit_prob: float = 1e-6, limit_spec: float = 1e-10) -> SuiteResult:
    """Front five packet widths ahead: nothing may have been emitted."""
    packet = WavePacket(a=units.a)
    fr = front(1.0, units)
    t_ahead = -5.0 * units.a / fr.v_internal
    _, photon = norms(t_ahead, fr, packet, spec, units)
    deltas = np.linspace(-10.0, 10.0, 11)
    quiet = q_spectrum_batch(deltas, 0.0, t_ahead, fr, packet, spec, units)
    t_after = 0.5 / fr.v_internal  # edge at -0.5 lambda0, past the center
    loud = q_spectrum_batch(deltas, 0.0, t_after, fr, packet, spec, units)
    ratio = np.abs(quiet).max() / loud.max()
    ok = photon < limit_prob and ratio < limit_spec
    return SuiteResult("causality", ok,
                       f"emitted prob {photon:.2e} (limit {limit_prob:g}), "
                       f"spectrum ratio {ratio:.2e} (limit {limit_spec:g})")


def check_norms(units: UnitSystem, spec: QuadSpec,
                lo: float = 0.95, hi: float = 1.02) -> SuiteResult:
    """Excited + emitted stays near one where the model conserves it.

    Gates the fast-front regimes: the instant switch (exact unitarity up
    to the spectral-window tail) and a v = 10 transit, where the
    retarded-time patching artifact is below a percent.  Near
    v ~ v_recoil the patched state genuinely inflates the photon norm
    (see the quad module notes); that regime is reported by the
    acceptance tests rather than gated here.
    """
    packet = WavePacket(a=units.a)
    sums = []
    fr_inf = front(float("inf"), units)
    for t_int in (0.5, 2.5):
        excited, photon = norms(t_int, fr_inf, packet, spec, units)
        sums.append(excited + photon)
    fr10 = front(10.0, units)
    for t_tau in (0.0, 10.0):
        excited, photon = norms(units.time_to_internal(t_tau), fr10, packet,
                                spec, units)
        sums.append(excited + photon)
    ok = all(lo <= s <= hi for s in sums)
    shown = ", ".join(f"{s:.4f}" for s in sums)
    return SuiteResult("norms", ok,
                       f"excited+emitted = [{shown}] (v=inf t=0.5,2.5; "
                       f"v=10 t~=0,10; band [{lo}, {hi}])")


def check_flatness(units: UnitSystem, spec: QuadSpec,
                   limit: float = 2e-2, n_theta: int = 13) -> SuiteResult:
    """Reduced angular distribution is direction-free for instant switching.

    The v = 1 late-time distribution keeps an order-one imprint of the
    patching artifact (quad module notes), so the regression gate runs
    the simultaneous mode, where flatness is exact.
    """
    packet = WavePacket(a=units.a)
    fr = front(float("inf"), units)
    t_int = units.time_to_internal(300.0)
    thetas = np.linspace(0.0, math.pi, n_theta)
    vals = np.array([
        p_theta(float(th), t_int, fr, packet, spec, units) for th in thetas
    ])
    dev = np.abs(vals / vals.mean() - 1.0).max()
    return SuiteResult("flatness", dev <= limit,
                       f"max |P/mean - 1| = {dev:.2e} at t = 300 (v = inf) "
                       f"over {n_theta} angles (limit {limit:g})")


_SUITES = (
    check_special,
    check_oracle,
    check_sse_limit,
    check_causality,
    check_norms,
    check_flatness,
)

SUITE_NAMES = tuple(fn.__name__.removeprefix("check_").replace("_", "-")
                    for fn in _SUITES)


def run_suites(units: UnitSystem, spec: QuadSpec,
               only: str | None = None) -> list[SuiteResult]:
    """Run all suites, or the one named by `only`; [] when the name is unknown."""
    results = []
    for fn, name in zip(_SUITES, SUITE_NAMES):
        if only is not None and name != only:
            continue
        results.append(fn(units, spec))
    return results
