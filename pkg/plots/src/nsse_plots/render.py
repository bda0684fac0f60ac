"""The three figure recipes.

fig1  overlaid emission spectra (one curve per CSV) plus the Lorentzian
      reference column of the first CSV, dash-dotted
fig2  time-angle surface of the reduced angular distribution (one CSV)
fig3  single-time angular cuts, one curve per CSV / front speed

All inputs are validated before any drawing starts, so a schema error
never leaves a partial image behind. Rendering is deterministic: fixed
SVG hash salt, no embedded dates.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .schema import SchemaError, Table, read_table, require_command  # noqa: E402

FIGURES = ("fig1", "fig2", "fig3")

# figure conventions: dotted/solid/dashed for the three edge positions,
# dash-dotted reserved for the reference curve
EDGE_STYLES = (":", "-", "--")
CUT_STYLES = ("-", "--", "-.", ":")
REFERENCE_STYLE = "-."

plt.rcParams["svg.hashsalt"] = "nsse-plots"


@dataclass(frozen=True)
class FigureRecipe:
    figure: str                      # one of FIGURES
    csv_paths: tuple[str, ...]
    out_path: str                    # .png or .svg picks the format
    styles: tuple[str, ...] = ()     # optional per-curve overrides
    dpi: int = 150

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(
                f"unknown figure id '{self.figure}' (choose from "
                f"{', '.join(FIGURES)})")
        if not self.csv_paths:
            raise ValueError("recipe needs at least one input CSV")


def _style(recipe: FigureRecipe, index: int, defaults: tuple[str, ...]) -> str:
    pool = recipe.styles or defaults
    return pool[index % len(pool)]


def _time_unit_label(table: Table) -> str:
    return f"t  [tau_natural = {table.meta_value('tau_convention')}]"


def _curve_label(table: Table) -> str:
    v = table.meta_value("v_recoil_units")
    try:
        v_txt = f"{float(v):g}"
    except ValueError:
        v_txt = v
    if "edge_z_lambda0" in table.meta:
        edge = table.meta_float("edge_z_lambda0")
        return f"v = {v_txt}, edge at {edge:+g} lambda0"
    t = table.meta_float("t_tau_nat")
    return f"v = {v_txt}, t = {t:g}"


def _load_spectra(recipe: FigureRecipe) -> list[Table]:
    tables = []
    for path in recipe.csv_paths:
        t = read_table(path)
        require_command(t, "spectrum")
        for name in ("detuning_gamma", "q_norm", "lorentzian_ref"):
            t.column(name)
        t.meta_value("normalize")
        tables.append(t)
    return tables


def _draw_fig1(recipe: FigureRecipe, tables: list[Table], ax) -> None:
    for i, t in enumerate(tables):
        ax.plot(t.column("detuning_gamma"), t.column("q_norm"),
                linestyle=_style(recipe, i, EDGE_STYLES),
                label=_curve_label(t))
    first = tables[0]
    ax.plot(first.column("detuning_gamma"), first.column("lorentzian_ref"),
            linestyle=REFERENCE_STYLE, color="0.4",
            label="Lorentzian reference")
    ax.set_xlabel("detuning  [gamma]")
    ax.set_ylabel(f"spectral density  ({first.meta_value('normalize')}"
                  " normalized)")
    ax.legend(fontsize=8)


def _load_surface(recipe: FigureRecipe) -> Table:
    if len(recipe.csv_paths) != 1:
        raise SchemaError("fig2 takes exactly one angular CSV")
    t = read_table(recipe.csv_paths[0])
    require_command(t, "angular")
    for name in ("t_tau_nat", "theta_deg", "p_reduced"):
        t.column(name)
    n_t = int(t.meta_float("t_points"))
    n_th = int(t.meta_float("theta_points"))
    if n_t * n_th != t.data.shape[0]:
        raise SchemaError(
            f"{t.path}: metadata keys 't_points' x 'theta_points' "
            f"({n_t} x {n_th}) do not match {t.data.shape[0]} rows")
    return t


def _draw_fig2(recipe: FigureRecipe, t: Table, ax, fig) -> None:
    n_t = int(t.meta_float("t_points"))
    n_th = int(t.meta_float("theta_points"))
    times = t.column("t_tau_nat").reshape(n_t, n_th)[:, 0]
    thetas = t.column("theta_deg").reshape(n_t, n_th)[0, :]
    values = t.column("p_reduced").reshape(n_t, n_th)
    mesh = ax.pcolormesh(thetas, times, values, shading="nearest",
                         rasterized=True)
    fig.colorbar(mesh, ax=ax, label="reduced angular distribution")
    ax.set_xlabel("theta  [deg]")
    ax.set_ylabel(_time_unit_label(t))
    ax.set_title(f"v = {float(t.meta_value('v_recoil_units')):g}"
                 " recoil units")


def _load_cuts(recipe: FigureRecipe) -> list[Table]:
    tables = []
    for path in recipe.csv_paths:
        t = read_table(path)
        require_command(t, "angular")
        for name in ("theta_deg", "p_reduced"):
            t.column(name)
        # single-time mode stamps the edge position and one time
        t.meta_value("edge_z_lambda0")
        t.meta_value("t_tau_nat")
        tables.append(t)
    return tables


def _draw_fig3(recipe: FigureRecipe, tables: list[Table], ax) -> None:
    for i, t in enumerate(tables):
        ax.plot(t.column("theta_deg"), t.column("p_reduced"),
                linestyle=_style(recipe, i, CUT_STYLES),
                label=_curve_label(t))
    ax.set_xlabel("theta  [deg]")
    ax.set_ylabel("reduced angular distribution")
    ax.legend(fontsize=8)


def render(recipe: FigureRecipe) -> str:
    """Write recipe.out_path (format from its extension); return the path."""
    ext = os.path.splitext(recipe.out_path)[1].lower()
    if ext not in (".png", ".svg"):
        raise ValueError(
            f"output path must end in .png or .svg, got '{recipe.out_path}'")

    # load + validate everything up front; nothing is written on failure
    if recipe.figure == "fig1":
        loaded: object = _load_spectra(recipe)
    elif recipe.figure == "fig2":
        loaded = _load_surface(recipe)
    else:
        loaded = _load_cuts(recipe)

    fig, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    try:
        if recipe.figure == "fig1":
            _draw_fig1(recipe, loaded, ax)
        elif recipe.figure == "fig2":
            _draw_fig2(recipe, loaded, ax, fig)
        else:
            _draw_fig3(recipe, loaded, ax)
        metadata = {"Date": None} if ext == ".svg" else {}
        fig.savefig(recipe.out_path, dpi=recipe.dpi, metadata=metadata)
    finally:
        plt.close(fig)
    return recipe.out_path


def render_outputs(recipe: FigureRecipe) -> list[str]:
    """Render the recipe; a bare output stem produces both PNG and SVG."""
    ext = os.path.splitext(recipe.out_path)[1].lower()
    if ext in (".png", ".svg"):
        return [render(recipe)]
    written = []
    for suffix in (".png", ".svg"):
        one = FigureRecipe(figure=recipe.figure, csv_paths=recipe.csv_paths,
                           out_path=recipe.out_path + suffix,
                           styles=recipe.styles, dpi=recipe.dpi)
        written.append(render(one))
    return written
