"""Figure builders for the five supported kinds.

Inputs are the documented CSV formats (`t,sup_norm,mass,zeta` run series,
`xi,f` / `r,W` profiles, `eta,Y,Z` orbits) with optional JSON sidecars.
Rendering is read-only and writes a single raster image of fixed dimensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("snapshots", "blowup_fit", "support_growth", "phase_portrait", "profile")
FIGSIZE = (6.4, 4.8)
DPI = 120


class PlotkitError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    output: str
    logx: bool = False
    logy: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotkitError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise PlotkitError("at least one input path is required")


def _read_table(path) -> dict:
    """Columns of a headed CSV as a dict of float arrays."""
    path = Path(path)
    if not path.exists():
        raise PlotkitError(f"input file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines:
        raise PlotkitError(f"empty data: {path} has no header")
    header = [c.strip() for c in lines[0].split(",")]
    rows = [ln for ln in lines[1:] if ln.strip()]
    if not rows:
        raise PlotkitError(f"empty data: {path} has a header but no rows")
    data = np.array([[float(v) for v in ln.split(",")] for ln in rows])
    if data.shape[1] != len(header):
        raise PlotkitError(f"{path}: rows do not match the header width")
    return {name: data[:, i] for i, name in enumerate(header)}


def _require_columns(table: dict, names, path) -> None:
    missing = [n for n in names if n not in table]
    if missing:
        raise PlotkitError(
            f"{path}: missing columns {missing}; found {sorted(table)}"
        )


def _sidecar(spec: FigureSpec) -> dict | None:
    """Explicit second input if it is JSON, else the CSV's sibling .json."""
    for p in spec.inputs[1:]:
        if str(p).endswith(".json"):
            return json.loads(Path(p).read_text())
    sib = Path(spec.inputs[0]).with_suffix(".json")
    if sib.exists():
        return json.loads(sib.read_text())
    return None


def _alpha_from_problem(problem: dict) -> float:
    m, p, sigma = problem["m"], problem["p"], problem["sigma"]
    return (sigma + 2) / (sigma * (m - 1) + 2 * (p - 1))


def _new_axes(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    return fig, ax


def _draw_snapshots(spec: FigureSpec, ax) -> None:
    table = _read_table(spec.inputs[0])
    _require_columns(table, ["t", "sup_norm", "mass", "zeta"], spec.inputs[0])
    ax.plot(table["t"], table["sup_norm"], label="sup norm")
    ax.plot(table["t"], table["mass"], label="mass")
    ax.plot(table["t"], table["zeta"], label="support radius")
    ax.set_xlabel("t")
    ax.legend()
    ax.set_title("run time series")


def _draw_blowup_fit(spec: FigureSpec, ax) -> None:
    table = _read_table(spec.inputs[0])
    _require_columns(table, ["t", "sup_norm"], spec.inputs[0])
    side = _sidecar(spec)
    if side is None or "problem" not in side:
        raise PlotkitError("blowup_fit needs a JSON sidecar with the problem block")
    alpha = _alpha_from_problem(side["problem"])
    t, s = table["t"], table["sup_norm"]
    pos = s > 0
    t, s = t[pos], s[pos]
    y = s ** (-1.0 / alpha)
    ax.plot(t, y, ".", ms=3, label=r"sup$^{-1/\alpha}$")

    window = s >= np.max(s) / 10
    if np.count_nonzero(window) >= 3:
        b, a = np.polyfit(t[window], y[window], 1)
        tt = np.linspace(t[window][0], -a / b if b < 0 else t[-1], 50)
        ax.plot(tt, a + b * tt, "-", lw=1, label="final-decade fit")
    t_hat = side.get("blowup_time_estimate")
    if t_hat is None and np.count_nonzero(window) >= 3 and b < 0:
        t_hat = -a / b
    if t_hat is not None:
        ax.axvline(t_hat, color="k", ls="--", lw=1)
        ax.annotate(f"$\\hat{{T}}$ = {t_hat:.4g}", (t_hat, 0.5 * np.max(y)),
                    rotation=90, va="center", ha="right")
    ax.set_xlabel("t")
    ax.set_ylabel(r"sup$^{-1/\alpha}$")
    ax.legend()
    ax.set_title("blow-up time fit")


def _draw_support_growth(spec: FigureSpec, ax) -> None:
    table = _read_table(spec.inputs[0])
    _require_columns(table, ["t", "zeta"], spec.inputs[0])
    ax.plot(table["t"], table["zeta"], "-", label=r"$\zeta(t)$")
    side = _sidecar(spec)
    if side is not None and side.get("blowup_time_estimate") is not None:
        t_hat = side["blowup_time_estimate"]
        ax.axvline(t_hat, color="k", ls="--", lw=1, label=f"$\\hat{{T}}$ = {t_hat:.4g}")
    ax.set_xlabel("t")
    ax.set_ylabel("support radius")
    ax.legend()
    ax.set_title("support growth")


def _draw_phase_portrait(spec: FigureSpec, ax) -> None:
    table = _read_table(spec.inputs[0])
    _require_columns(table, ["eta", "Y", "Z"], spec.inputs[0])
    side = _sidecar(spec)
    if side is None or "problem" not in side:
        raise PlotkitError("phase_portrait needs a JSON sidecar with the problem block")
    prob = side["problem"]
    m, n = prob["m"], prob["N"]
    Y, Z = table["Y"], table["Z"]
    # the orbit escapes to Y -> -inf; show the window around the critical points
    y_win = -3.0 * (1.0 + abs(n - 2) / m)
    mask = Y >= y_win
    ax.plot(Y[mask], Z[mask], "-", lw=1, label="orbit")
    yy = np.linspace(y_win, 0.0, 200)
    iso = -(n - 2) * yy - m * yy ** 2
    ax.plot(yy, iso, ":", label=r"$\dot Y = 0$ isocline")
    ax.plot([0], [0], "ks", label="$P_0$")
    ax.plot([-(n - 2) / m], [0], "k^", label="$P_1$")
    if not (spec.logx or spec.logy):
        z_hi = float(np.max(Z[mask], initial=1.0))
        ax.set_xlim(y_win, -0.05 * y_win)
        ax.set_ylim(-0.08 * z_hi, 1.05 * z_hi)
    ax.set_xlabel("Y")
    ax.set_ylabel("Z")
    ax.legend()
    ax.set_title("phase portrait")


def _draw_profile(spec: FigureSpec, ax) -> None:
    table = _read_table(spec.inputs[0])
    if "xi" in table and "f" in table:
        x, y, xl, yl = table["xi"], table["f"], r"$\xi$", r"$f(\xi)$"
    elif "r" in table and "W" in table:
        x, y, xl, yl = table["r"], table["W"], "r", "W(r)"
    else:
        raise PlotkitError(
            f"{spec.inputs[0]}: expected columns (xi,f) or (r,W); found {sorted(table)}"
        )
    ax.plot(x, y, "-")
    ax.set_xlabel(xl)
    ax.set_ylabel(yl)
    ax.set_title("profile")


_DRAW = {
    "snapshots": _draw_snapshots,
    "blowup_fit": _draw_blowup_fit,
    "support_growth": _draw_support_growth,
    "phase_portrait": _draw_phase_portrait,
    "profile": _draw_profile,
}


def render(spec: FigureSpec) -> Path:
    """Write the figure described by spec; returns the output path."""
    out = Path(spec.output)
    if out.suffix.lower() not in (".png",):
        raise PlotkitError(f"raster .png output required, got {out.suffix!r}")
    fig, ax = _new_axes(spec)
    try:
        _DRAW[spec.kind](spec, ax)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    finally:
        plt.close(fig)
    return out
