"""Command-line driver: figure datasets, validation suites, CSV emission.

Commands
--------
spectrum   Emission spectra on a detuning grid (one CSV, or the full
           six-curve transit family when no velocity is given).
angular    Reduced angular distribution, long-format CSV over a time
           grid or at a single front-edge position.
validate   Self-check suites; exits nonzero when any check fails.

All user-facing numbers are in the natural units of the problem: times
in tau_natural, lengths in lambda0, front speeds in recoil-velocity
units, detunings in gamma. A flat ``key = value`` config file can set
any parameter; command-line flags override the file.

Determinism: grids are evaluated in fixed-size chunks whose boundaries
do not depend on the worker count, so CSV bytes are identical whether
the chunks run serially or in a process pool (NSSE_THREADS workers,
0 or unset = one per CPU).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .model import WavePacket, front
from .observables import (NORMALIZATIONS, assemble_angular, assemble_spectrum,
                          lorentzian_reference, sse_spectrum)
from .quad import QuadSpec, QuadratureError, norms, p_theta, q_spectrum_batch
from .units import TAU_CONVENTIONS, AtomParams, UnitSystem, default_atom, to_internal

EXIT_OK = 0
EXIT_VALIDATE_FAIL = 1
EXIT_BAD_ARGS = 2
EXIT_NO_CONVERGENCE = 3

# grid points per task; fixed so output bytes never depend on worker count
SPECTRUM_CHUNK = 64

PRESETS = ("default", "relaxed", "full")

# transit family reproduced when `spectrum` is called without --v
FIG1_VELOCITIES = (10.0, 1.0)
FIG1_EDGES = (0.5, 0.0, -0.5)


class ConfigError(Exception):
    """Bad configuration; the message names the offending key."""


# -- config file ------------------------------------------------------------

_FLOAT_KEYS = (
    "gamma_rad_s", "lambda0_m", "v_recoil_m_s", "omega_recoil_rad_s",
    "a", "v", "theta_deg", "edge_z", "t", "omega_min", "omega_max",
    "t_min", "t_max", "z_rel_tol", "omega_rel_tol", "z_window_sigmas",
    "omega_window_gammas",
)
_INT_KEYS = (
    "points", "t_points", "theta_points", "hermite_order", "theta_order",
    "max_z_panels", "max_omega_panels", "init_z_panels", "init_omega_panels",
)
_STR_KEYS = ("tau_convention", "preset", "normalize", "out")

_QUADSPEC_KEYS = (
    "hermite_order", "z_rel_tol", "omega_rel_tol", "z_window_sigmas",
    "omega_window_gammas", "theta_order", "max_z_panels", "max_omega_panels",
    "init_z_panels", "init_omega_panels",
)


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in _FLOAT_KEYS:
            try:
                out[key] = float(value)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: key '{key}' needs a number, got {value!r}") from None
        elif key in _INT_KEYS:
            try:
                out[key] = int(value)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: key '{key}' needs an integer, got {value!r}") from None
        elif key in _STR_KEYS:
            out[key] = value
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
    return out


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read(), source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None


def merge_settings(file_cfg: dict, flag_cfg: dict) -> dict:
    """Flags override the file; None flag values mean 'not given'."""
    merged = dict(file_cfg)
    for key, value in flag_cfg.items():
        if value is not None:
            merged[key] = value
    return merged


def build_atom(cfg: dict) -> AtomParams:
    base = default_atom()
    try:
        return AtomParams(
            gamma=cfg.get("gamma_rad_s", base.gamma),
            lambda0=cfg.get("lambda0_m", base.lambda0),
            v_recoil=cfg.get("v_recoil_m_s", base.v_recoil),
            omega_recoil=cfg.get("omega_recoil_rad_s", base.omega_recoil),
        )
    except ValueError as exc:
        raise ConfigError(f"atom parameters: {exc}") from None


def build_units(cfg: dict) -> UnitSystem:
    atom = build_atom(cfg)
    a = cfg.get("a", 1.0)
    conv = cfg.get("tau_convention", "1/(2gamma)")
    if conv not in TAU_CONVENTIONS:
        raise ConfigError(f"key 'tau_convention' must be one of {TAU_CONVENTIONS}")
    try:
        return to_internal(atom, a=a, tau_convention=conv)
    except ValueError as exc:
        raise ConfigError(f"key 'a': {exc}") from None


def build_quadspec(cfg: dict) -> QuadSpec:
    # "default" is the figure preset (Hermite 24); "full" keeps the
    # conservative order-40 dataclass defaults; "relaxed" is for sweeps
    preset = cfg.get("preset", "default")
    if preset not in PRESETS:
        raise ConfigError(f"key 'preset' must be one of {PRESETS}")
    spec = QuadSpec()
    if preset == "default":
        spec = spec.figures()
    elif preset == "relaxed":
        spec = spec.relaxed()
    overrides = {k: cfg[k] for k in _QUADSPEC_KEYS if k in cfg}
    try:
        return replace(spec, **overrides)
    except ValueError as exc:
        raise ConfigError(f"quadrature settings: {exc}") from None


def worker_count() -> int:
    raw = os.environ.get("NSSE_THREADS", "").strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"NSSE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("NSSE_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _run_tasks(fn, tasks: list, workers: int) -> list:
    """Map fn over tasks, preserving order; pool only when it can help."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


# -- CSV emission -----------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12e}"


def write_csv(path: str, meta: dict, columns: list[str], rows) -> None:
    """UTF-8 CSV with '#'-prefixed metadata, enough to regenerate the file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {value}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _common_meta(command: str, cfg: dict, units: UnitSystem,
                 spec: QuadSpec) -> dict:
    atom = build_atom(cfg)
    meta = {
        "generator": f"nsse {__version__}",
        "command": command,
        "gamma_rad_s": repr(atom.gamma),
        "lambda0_m": repr(atom.lambda0),
        "v_recoil_m_s": repr(atom.v_recoil),
        "omega_recoil_rad_s": repr(atom.omega_recoil),
        "a_lambda0": repr(units.a),
        "tau_convention": units.tau_convention,
        "preset": cfg.get("preset", "default"),
    }
    for key in _QUADSPEC_KEYS:
        meta[key] = repr(getattr(spec, key))
    return meta


# -- spectrum command -------------------------------------------------------

def _spectrum_chunk(task) -> np.ndarray:
    """Raw spectral density for one detuning chunk (picklable task)."""
    deltas, theta, t_tau, v, a, spec, units = task
    packet = WavePacket(a=a)
    if math.isinf(v):
        ds = sse_spectrum(deltas, theta, t_tau, packet, spec, units,
                          normalization="raw")
        return ds.values
    fr = front(v, units)
    t_int = units.time_to_internal(t_tau)
    return q_spectrum_batch(deltas, theta, t_int, fr, packet, spec, units)


def _resolve_time(cfg: dict, v: float) -> tuple[float, float | None]:
    """Return (t in tau_natural, edge position or None) from --t/--edge-z."""
    has_t = "t" in cfg
    has_edge = "edge_z" in cfg
    if has_t and has_edge:
        raise ConfigError("give either 't' or 'edge_z', not both")
    if has_edge:
        if math.isinf(v):
            raise ConfigError("key 'edge_z' needs a finite front speed")
        return None, cfg["edge_z"]
    if has_t:
        return cfg["t"], None
    raise ConfigError("one of 't' or 'edge_z' is required")


def _spectrum_dataset(cfg: dict, units: UnitSystem, spec: QuadSpec,
                      v: float, t_tau: float, workers: int):
    theta = math.radians(cfg.get("theta_deg", 0.0))
    if not 0.0 <= theta <= math.pi:
        raise ConfigError("key 'theta_deg' must lie in [0, 180]")
    lo = cfg.get("omega_min", -15.0)
    hi = cfg.get("omega_max", 15.0)
    n = cfg.get("points", 601)
    if not hi > lo:
        raise ConfigError("key 'omega_max' must exceed omega_min")
    if n < 2:
        raise ConfigError("key 'points' must be at least 2")
    normalization = cfg.get("normalize", "peak")
    if normalization not in NORMALIZATIONS:
        raise ConfigError(f"key 'normalize' must be one of {NORMALIZATIONS}")

    detunings = np.linspace(lo, hi, n)
    packet = WavePacket(a=units.a)
    tasks = [
        (detunings[i:i + SPECTRUM_CHUNK], theta, t_tau, v, units.a, spec, units)
        for i in range(0, n, SPECTRUM_CHUNK)
    ]
    values = np.concatenate(_run_tasks(_spectrum_chunk, tasks, workers))
    norm_sq = None
    if normalization == "raw" and not math.isinf(v):
        fr = front(v, units)
        excited, photon = norms(units.time_to_internal(t_tau), fr, packet,
                                spec, units)
        norm_sq = excited + photon
    dataset = assemble_spectrum(detunings, values, theta, t_tau, v,
                                normalization, norm_sq)
    reference = lorentzian_reference(detunings, units, normalization)
    return dataset, reference


def _emit_spectrum_csv(path: str, cfg: dict, units: UnitSystem,
                       spec: QuadSpec, v: float, t_tau: float,
                       edge_z: float | None, workers: int) -> None:
    dataset, reference = _spectrum_dataset(cfg, units, spec, v, t_tau, workers)
    meta = _common_meta("spectrum", cfg, units, spec)
    meta["v_recoil_units"] = repr(v)
    meta["theta_deg"] = repr(cfg.get("theta_deg", 0.0))
    meta["t_tau_nat"] = repr(t_tau)
    if edge_z is not None:
        meta["edge_z_lambda0"] = repr(edge_z)
    meta["omega_min_gamma"] = repr(dataset.detunings[0])
    meta["omega_max_gamma"] = repr(dataset.detunings[-1])
    meta["points"] = str(dataset.detunings.size)
    meta["normalize"] = dataset.normalization
    rows = zip(dataset.detunings, dataset.values, reference)
    write_csv(path, meta, ["detuning_gamma", "q_norm", "lorentzian_ref"], rows)


def _edge_tag(edge: float) -> str:
    sign = "m" if edge < 0 else "p"
    return f"{sign}{abs(edge):.2f}".replace(".", "")


def cmd_spectrum(cfg: dict) -> int:
    units = build_units(cfg)
    spec = build_quadspec(cfg)
    workers = worker_count()

    if "v" not in cfg:
        # no velocity: emit the whole transit family into a directory
        out_dir = cfg.get("out", "fig1")
        os.makedirs(out_dir, exist_ok=True)
        for v in FIG1_VELOCITIES:
            fr = front(v, units)
            for edge in FIG1_EDGES:
                t_int = -edge / fr.v_internal
                t_tau = units.time_from_internal(t_int)
                name = f"fig1_v{v:g}_edge{_edge_tag(edge)}.csv"
                path = os.path.join(out_dir, name)
                sub = dict(cfg)
                sub.pop("t", None)
                sub["edge_z"] = edge
                _emit_spectrum_csv(path, sub, units, spec, v, t_tau, edge,
                                   workers)
                print(path)
        return EXIT_OK

    v = cfg["v"]
    if not v > 0.0:
        raise ConfigError("key 'v' must be positive (or inf)")
    t_tau, edge_z = _resolve_time(cfg, v)
    if t_tau is None:
        fr = front(v, units)
        t_tau = units.time_from_internal(-edge_z / fr.v_internal)
    out = cfg.get("out", "spectrum.csv")
    _emit_spectrum_csv(out, cfg, units, spec, v, t_tau, edge_z, workers)
    print(out)
    return EXIT_OK


# -- angular command --------------------------------------------------------

def _angular_row(task) -> np.ndarray:
    """One time-row of the reduced angular distribution (picklable task)."""
    thetas, t_tau, v, a, spec, units = task
    packet = WavePacket(a=a)
    fr = front(v, units)
    t_int = units.time_to_internal(t_tau)
    return np.array([
        p_theta(float(th), t_int, fr, packet, spec, units) for th in thetas
    ])


def cmd_angular(cfg: dict) -> int:
    units = build_units(cfg)
    spec = build_quadspec(cfg)
    workers = worker_count()

    v = cfg.get("v", 1.0)
    if not v > 0.0:
        raise ConfigError("key 'v' must be positive (or inf)")
    n_theta = cfg.get("theta_points", 61)
    if n_theta < 2:
        raise ConfigError("key 'theta_points' must be at least 2")
    thetas = np.linspace(0.0, math.pi, n_theta)

    edge_z = None
    if "edge_z" in cfg:
        if "t_min" in cfg or "t_max" in cfg or "t_points" in cfg:
            raise ConfigError("key 'edge_z' selects single-time mode; drop the t grid keys")
        if math.isinf(v):
            raise ConfigError("key 'edge_z' needs a finite front speed")
        edge_z = cfg["edge_z"]
        fr = front(v, units)
        times = np.array([units.time_from_internal(-edge_z / fr.v_internal)])
    else:
        t_lo = cfg.get("t_min", -50.0)
        t_hi = cfg.get("t_max", 40.0)
        n_t = cfg.get("t_points", 91)
        if not t_hi > t_lo:
            raise ConfigError("key 't_max' must exceed t_min")
        if n_t < 1:
            raise ConfigError("key 't_points' must be at least 1")
        times = np.linspace(t_lo, t_hi, n_t)

    tasks = [(thetas, float(tt), v, units.a, spec, units) for tt in times]
    rows = _run_tasks(_angular_row, tasks, workers)
    dataset = assemble_angular(thetas, times, np.vstack(rows), v)

    meta = _common_meta("angular", cfg, units, spec)
    meta["v_recoil_units"] = repr(v)
    if edge_z is not None:
        meta["edge_z_lambda0"] = repr(edge_z)
        meta["t_tau_nat"] = repr(float(times[0]))
    else:
        meta["t_min_tau_nat"] = repr(float(times[0]))
        meta["t_max_tau_nat"] = repr(float(times[-1]))
        meta["t_points"] = str(times.size)
    meta["theta_points"] = str(thetas.size)
    meta["mean_normalized"] = "true"

    out = cfg.get("out", "angular.csv")
    thetas_deg = np.degrees(thetas)
    rows_iter = (
        (float(times[i]), thetas_deg[j], dataset.values[i, j])
        for i in range(times.size) for j in range(thetas.size)
    )
    write_csv(out, meta, ["t_tau_nat", "theta_deg", "p_reduced"], rows_iter)
    print(out)
    return EXIT_OK


# -- validate command -------------------------------------------------------

def cmd_validate(cfg: dict, suite: str | None) -> int:
    from . import validation
    units = build_units(cfg)
    spec = build_quadspec(cfg)
    results = validation.run_suites(units, spec, only=suite)
    if not results:
        raise ConfigError(f"unknown suite '{suite}' (choose from "
                          f"{', '.join(validation.SUITE_NAMES)})")
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATE_FAIL


# -- entry point ------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--a", type=float, dest="a",
                   help="packet width in lambda0 units (default 1)")
    p.add_argument("--preset", choices=PRESETS,
                   help="quadrature preset (default: full accuracy)")
    p.add_argument("--out", help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsse",
        description="Spontaneous emission from a wave packet under a moving coupling front.",
    )
    parser.add_argument("--version", action="version", version=f"nsse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="emission spectrum on a detuning grid")
    _add_common(sp)
    sp.add_argument("--v", type=float, help="front speed in recoil units; inf for simultaneous")
    sp.add_argument("--theta", type=float, dest="theta_deg", help="emission angle in degrees (default 0)")
    sp.add_argument("--edge-z", type=float, dest="edge_z", help="front edge position in lambda0 units")
    sp.add_argument("--t", type=float, help="observation time in tau_natural units")
    sp.add_argument("--omega-min", type=float, dest="omega_min", help="grid start in gamma units (default -15)")
    sp.add_argument("--omega-max", type=float, dest="omega_max", help="grid end in gamma units (default 15)")
    sp.add_argument("--points", type=int, help="grid size (default 601)")
    sp.add_argument("--normalize", choices=NORMALIZATIONS, help="peak (default), area, or raw")

    ap = sub.add_parser("angular", help="reduced angular distribution")
    _add_common(ap)
    ap.add_argument("--v", type=float, help="front speed in recoil units (default 1)")
    ap.add_argument("--t-min", type=float, dest="t_min", help="time grid start, tau_natural (default -50)")
    ap.add_argument("--t-max", type=float, dest="t_max", help="time grid end, tau_natural (default 40)")
    ap.add_argument("--t-points", type=int, dest="t_points", help="time grid size (default 91)")
    ap.add_argument("--theta-points", type=int, dest="theta_points", help="angle grid size (default 61)")
    ap.add_argument("--edge-z", type=float, dest="edge_z", help="single-time mode: front edge position")

    vp = sub.add_parser("validate", help="run self-check suites")
    _add_common(vp)
    vp.add_argument("--suite", help="run a single suite by name")

    return parser


_FLAG_KEYS = (
    "a", "preset", "out", "v", "theta_deg", "edge_z", "t", "omega_min",
    "omega_max", "points", "normalize", "t_min", "t_max", "t_points",
    "theta_points",
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_cfg = load_config(args.config) if args.config else {}
        flag_cfg = {k: getattr(args, k) for k in _FLAG_KEYS if hasattr(args, k)}
        cfg = merge_settings(file_cfg, flag_cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "angular":
            return cmd_angular(cfg)
        return cmd_validate(cfg, args.suite)
    except ConfigError as exc:
        print(f"nsse: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except ValueError as exc:
        print(f"nsse: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except QuadratureError as exc:
        print(f"nsse: quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
