"""Synthetic CSV factories matching the simulator's dataset contract."""

import numpy as np
import pytest


def _fmt(x: float) -> str:
    return f"{x:.12e}"


def _write(path, meta_lines, columns, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in meta_lines:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    return str(path)


@pytest.fixture
def spectrum_csv(tmp_path):
    def make(name="spec.csv", v=10.0, edge=0.0, points=41, center=0.3,
             drop_column=None, drop_meta=None):
        deltas = np.linspace(-15.0, 15.0, points)
        q = np.exp(-0.5 * (deltas - center) ** 2)
        ref = 1.0 / (1.0 + deltas**2)
        meta = {
            "generator": "nsse 0.1.0",
            "command": "spectrum",
            "tau_convention": "1/(2gamma)",
            "v_recoil_units": repr(v),
            "theta_deg": "0.0",
            "t_tau_nat": "5.0",
            "edge_z_lambda0": repr(edge),
            "normalize": "peak",
        }
        if drop_meta:
            del meta[drop_meta]
        columns = ["detuning_gamma", "q_norm", "lorentzian_ref"]
        data = np.column_stack([deltas, q, ref])
        if drop_column:
            keep = [i for i, c in enumerate(columns) if c != drop_column]
            columns = [columns[i] for i in keep]
            data = data[:, keep]
        lines = [f"# {k} = {val}" for k, val in meta.items()]
        return _write(tmp_path / name, lines, columns, data)

    return make


@pytest.fixture
def angular_grid_csv(tmp_path):
    def make(name="grid.csv", v=1.0, n_t=5, n_theta=9, t_points_meta=None):
        times = np.linspace(-50.0, 40.0, n_t)
        thetas = np.linspace(0.0, 180.0, n_theta)
        meta = {
            "generator": "nsse 0.1.0",
            "command": "angular",
            "tau_convention": "1/(2gamma)",
            "v_recoil_units": repr(v),
            "t_min_tau_nat": repr(times[0]),
            "t_max_tau_nat": repr(times[-1]),
            "t_points": str(t_points_meta if t_points_meta else n_t),
            "theta_points": str(n_theta),
            "mean_normalized": "true",
        }
        rows = [
            (t, th, 1.0 + 0.3 * np.sin(np.radians(th)) * np.exp(-abs(t) / 20))
            for t in times for th in thetas
        ]
        lines = [f"# {k} = {val}" for k, val in meta.items()]
        return _write(tmp_path / name, lines,
                      ["t_tau_nat", "theta_deg", "p_reduced"], rows)

    return make


@pytest.fixture
def angular_cut_csv(tmp_path):
    def make(name="cut.csv", v=1.0, edge=-0.5, n_theta=13, drop_meta=None):
        thetas = np.linspace(0.0, 180.0, n_theta)
        meta = {
            "generator": "nsse 0.1.0",
            "command": "angular",
            "tau_convention": "1/(2gamma)",
            "v_recoil_units": repr(v),
            "edge_z_lambda0": repr(edge),
            "t_tau_nat": "2.5",
            "theta_points": str(n_theta),
            "mean_normalized": "true",
        }
        if drop_meta:
            del meta[drop_meta]
        rows = [(2.5, th, 1.0 + 0.5 * np.cos(np.radians(th))) for th in thetas]
        lines = [f"# {k} = {val}" for k, val in meta.items()]
        return _write(tmp_path / name, lines,
                      ["t_tau_nat", "theta_deg", "p_reduced"], rows)

    return make
