"""Deterministic figures from the study CSV contracts.

Each figure kind is bound to one exact CSV header; a mismatch is a hard
error rather than a guess.  Styles are pinned and no timestamps enter the
canvas or the file metadata, so rerendering identical inputs is
byte-stable.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "SchemaError", "render", "SCHEMAS"]

SCHEMAS = {
    "convergence": [
        "study", "d", "p", "s", "h", "t", "error_hs", "fitted_order_at_t",
    ],
    "growth": [
        "d", "p", "t", "h2h1_norm", "hk1hk_norm", "k", "E", "E1", "E2",
        "envelope_gamma", "envelope_ratio",
    ],
    "decay": [
        "model", "d", "h", "t_min", "t_max", "fitted_exponent", "ci_halfwidth",
        "paper_exponent", "band_lo", "band_hi", "pass",
    ],
    "conjecture": [
        "d", "h", "tau_min", "tau_max", "fitted_exponent", "ci_halfwidth",
        "argmax_on_boundary",
    ],
    "energy": ["d", "p", "h", "dt", "t", "E", "drift_rel", "h1l2_norm", "linf"],
}

PAPER_RATE_LINES = (-1.0 / 3.0, -2.0 / 3.0, -3.0 / 4.0)

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "svg.hashsalt": "kgplots",
}

_TEXT_COLUMNS = {"study", "model", "pass", "argmax_on_boundary"}


class SchemaError(ValueError):
    """The CSV header does not match the expected contract."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: csv input(s), kind, output path, scale options."""

    kind: str
    inputs: tuple
    output: str
    logx: bool | None = None
    logy: bool | None = None

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise SchemaError(
                f"unknown figure kind {self.kind!r}; expected one of {sorted(SCHEMAS)}"
            )
        if not self.inputs:
            raise SchemaError("figure needs at least one input csv")


def _read_table(path, kind: str) -> dict:
    expected = SCHEMAS[kind]
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input csv not found: {path}")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty") from None
        if header != expected:
            raise SchemaError(
                f"{path} header {header} does not match the {kind} contract {expected}"
            )
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path} carries no data rows")
    columns = {}
    for j, name in enumerate(expected):
        raw = [row[j] for row in rows]
        if name in _TEXT_COLUMNS:
            columns[name] = raw
        else:
            columns[name] = np.array([float(x) for x in raw])
    return columns


def _refit_slope(logx: np.ndarray, logy: np.ndarray) -> float:
    return float(np.polyfit(logx, logy, 1)[0])


def _plot_convergence(ax, cols):
    ts = sorted(set(cols["t"]))
    for t in ts:
        mask = cols["t"] == t
        h = cols["h"][mask]
        err = cols["error_hs"][mask]
        order = np.arange(len(h))[np.argsort(-h)]
        h, err = h[order], err[order]
        label = f"t = {t:g}"
        if np.all(err > 0):
            refit = _refit_slope(np.log(h), np.log(err))
            csv_fit = cols["fitted_order_at_t"][mask][0]
            if np.isfinite(csv_fit) and abs(refit - csv_fit) > 1e-6:
                warnings.warn(
                    f"re-fitted order {refit:.8f} at t={t:g} deviates from the "
                    f"csv value {csv_fit:.8f}",
                    stacklevel=3,
                )
            label += f" (order {refit:.2f})"
        ax.loglog(h, err, "o-", label=label)
    ax.set_xlabel("lattice step h")
    ax.set_ylabel("H^s error vs reference")
    ax.set_title("continuum-limit convergence")
    ax.legend()


def _plot_growth(ax, cols):
    t = cols["t"]
    gamma = cols["envelope_gamma"][0]
    ax.plot(t, cols["h2h1_norm"], label="H2 x H1 norm")
    ax.plot(t, cols["hk1hk_norm"], label=f"H{int(cols['k'][0]) + 1} x H{int(cols['k'][0])} norm")
    scale = cols["h2h1_norm"][0] / max((1 + t[0]) ** gamma, 1e-300)
    ax.plot(t, scale * (1 + t) ** gamma, "--", color="gray",
            label=f"(1+t)^{gamma:g} reference")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title("Sobolev-norm growth envelopes")
    ax.legend()


def _plot_decay(ax, cols):
    n = len(cols["model"])
    ypos = np.arange(n)
    for rate in PAPER_RATE_LINES:
        ax.axvline(rate, color="gray", linestyle=":", linewidth=1)
        ax.text(rate, n - 0.35, f"{rate:.3g}", color="gray", fontsize=8,
                ha="center", va="bottom")
    for i in range(n):
        lo, hi = cols["band_lo"][i], cols["band_hi"][i]
        passed = cols["pass"][i] == "true"
        color = "tab:green" if passed else "tab:red"
        ax.plot([lo, hi], [ypos[i]] * 2, color="lightgray", linewidth=6,
                solid_capstyle="butt", zorder=1)
        ax.errorbar(
            cols["fitted_exponent"][i], ypos[i], xerr=cols["ci_halfwidth"][i],
            fmt="o", color=color, zorder=2,
        )
        ax.plot(cols["paper_exponent"][i], ypos[i], "k|", markersize=10, zorder=2)
    labels = [
        f"{m} d={int(d)}" for m, d in zip(cols["model"], cols["d"])
    ]
    ax.set_yticks(ypos)
    ax.set_yticklabels(labels)
    ax.set_xlabel("fitted decay exponent")
    ax.set_title("kernel decay vs cataloged rates (band = acceptance, | = paper)")


def _plot_conjecture(ax, cols):
    h = cols["h"]
    ax.errorbar(h, cols["fitted_exponent"], yerr=cols["ci_halfwidth"], fmt="o-")
    for rate, name in ((-3.0 / 4.0, "fixed-lattice -3/4"), (-2.0 / 3.0, "wave limit -2/3")):
        ax.axhline(rate, color="gray", linestyle=":", linewidth=1)
        ax.text(h.min(), rate, name, color="gray", fontsize=8, va="bottom")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("lattice step h")
    ax.set_ylabel("sup-velocity decay exponent")
    ax.set_title("oscillatory-integral decay across the continuum limit")


def _plot_energy(ax, cols):
    t = cols["t"]
    drift = np.maximum(cols["drift_rel"], 1e-18)
    ax.semilogy(t[1:], drift[1:], label="relative energy drift")
    ax.set_xlabel("t")
    ax.set_ylabel("|E(t)-E(0)|/E(0)")
    ax.set_title(f"energy drift (dt = {cols['dt'][0]:g}, h = {cols['h'][0]:g})")
    ax.legend()


_PLOTTERS = {
    "convergence": _plot_convergence,
    "growth": _plot_growth,
    "decay": _plot_decay,
    "conjecture": _plot_conjecture,
    "energy": _plot_energy,
}


def render(spec: FigureSpec) -> Path:
    """Validate inputs and write the figure; returns the output path.

    Inputs are read-only; nothing is written when validation fails.
    """
    tables = [_read_table(p, spec.kind) for p in spec.inputs]
    out = Path(spec.output)
    suffix = out.suffix.lower()
    if suffix not in (".png", ".svg"):
        raise SchemaError(f"output must be .png or .svg, got {out.name}")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for cols in tables:
            _PLOTTERS[spec.kind](ax, cols)
        if spec.logx is not None:
            ax.set_xscale("log" if spec.logx else "linear")
        if spec.logy is not None:
            ax.set_yscale("log" if spec.logy else "linear")
        fig.tight_layout()
        out.parent.mkdir(parents=True, exist_ok=True)
        metadata = {"Date": None} if suffix == ".svg" else {}
        fig.savefig(out, metadata=metadata)
        plt.close(fig)
    return out
