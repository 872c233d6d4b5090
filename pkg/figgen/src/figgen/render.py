"""Figure construction from sweep CSVs, training records and point tables.

Colors follow the conventions of the accompanying analysis figures:
green for the CV swap, purple for the time-bin benchmark, red/pink for the
direct swap, blue/green for the one-/two-copy variational circuits.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_IDS = ("rates", "loss", "tradeoff", "rate-infidelity")

COLOR_CV = "tab:green"
COLOR_TIMEBIN = "tab:purple"
COLOR_DIRECT = "tab:red"
COLOR_DIRECT_TWO = "#ff7b9c"  # pink: direct swap + DV post-processing
COLOR_LVQC_ONE = "tab:blue"
COLOR_LVQC_TWO = "tab:green"
COLOR_FRONTIER = "black"

SOURCE_COLORS = {
    "hybrid-lvqc": COLOR_LVQC_ONE,
    "hybrid-lvqc+dv": COLOR_LVQC_TWO,
    "direct-swap": COLOR_DIRECT,
    "direct-swap+dv": COLOR_DIRECT_TWO,
    "timebin": COLOR_TIMEBIN,
}

# fixed style so identical inputs produce identical bytes regardless of
# any user-level matplotlib configuration
STYLE = {
    "figure.figsize": (5.2, 3.6),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9.0,
    "font.family": "DejaVu Sans",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.frameon": False,
    "svg.hashsalt": "figgen",
}


@dataclass(frozen=True)
class FigureSpec:
    """One rendering request: which figure, from which inputs, to where."""

    figure_id: str
    inputs: tuple[str, ...]
    out: str
    log_y: bool = True
    log_x: bool = False

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure id {self.figure_id!r}; choose from {FIGURE_IDS}"
            )
        if not self.inputs:
            raise ValueError("at least one input file is required")


class InputError(ValueError):
    """Malformed, empty, or incomplete input data."""


def read_table(path: str) -> dict[str, list]:
    """Read a '#'-commented CSV into columns; empty input is an error."""
    with open(path) as fh:
        body = [line for line in fh if line.strip() and not line.startswith("#")]
    if not body:
        raise InputError(f"{path}: no data rows")
    reader = csv.DictReader(io.StringIO("".join(body)))
    columns: dict[str, list] = {name: [] for name in reader.fieldnames or []}
    for row in reader:
        if None in row or any(v is None for v in row.values()):
            raise InputError(f"{path}: ragged CSV row {row}")
        for name, value in row.items():
            columns[name].append(value)
    if not columns or not next(iter(columns.values())):
        raise InputError(f"{path}: no data rows")
    return columns


def require_columns(table: dict, names: list[str], path: str) -> dict[str, np.ndarray]:
    missing = [n for n in names if n not in table]
    if missing:
        raise InputError(
            f"{path}: missing columns {missing}; found {sorted(table)}"
        )
    out = {}
    for n in names:
        try:
            out[n] = np.array([float(x) for x in table[n]])
        except ValueError as err:
            raise InputError(f"{path}: non-numeric value in column {n}: {err}")
    return out


def read_records(path: str) -> list[dict]:
    """Read training records (JSONL, optional header line)."""
    records = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as err:
                raise InputError(f"{path}:{line_no}: not valid JSON: {err}")
            if "_header" in payload:
                continue
            records.append(payload)
    if not records:
        raise InputError(f"{path}: no training records")
    for rec in records:
        if "p_success" not in rec or "fidelity" not in rec:
            raise InputError(
                f"{path}: record lacks p_success/fidelity fields: {sorted(rec)}"
            )
    return records


def _band(ax, x, lower, upper, color, label):
    order = np.argsort(x)
    x, lower, upper = x[order], lower[order], upper[order]
    ax.fill_between(x, np.maximum(lower, 1e-12), np.maximum(upper, 1e-12),
                    color=color, alpha=0.35, linewidth=0.0)
    ax.plot(x, np.maximum(upper, 1e-12), color=color, label=label)
    ax.plot(x, np.maximum(lower, 1e-12), color=color, linestyle="--", linewidth=1.0)


def render_rates(spec: FigureSpec, ax):
    cols = ["C", "cv_rci", "cv_eof", "timebin_rci_rate", "timebin_eof_upper_rate"]
    for path in spec.inputs:
        data = require_columns(read_table(path), cols, path)
        _band(ax, data["C"], data["cv_rci"], data["cv_eof"], COLOR_CV, "CV swap")
        _band(ax, data["C"], data["timebin_rci_rate"], data["timebin_eof_upper_rate"],
              COLOR_TIMEBIN, "time-bin swap")
    ax.set_xlabel("cooperativity $C$")
    ax.set_ylabel("rate (ebit / round)")


def render_loss(spec: FigureSpec, ax):
    cols = ["zeta_o", "cv_rci", "cv_eof", "timebin_rci_rate", "timebin_eof_upper_rate"]
    for path in spec.inputs:
        data = require_columns(read_table(path), cols, path)
        _band(ax, data["zeta_o"], data["cv_rci"], data["cv_eof"], COLOR_CV, "CV swap")
        _band(ax, data["zeta_o"], data["timebin_rci_rate"],
              data["timebin_eof_upper_rate"], COLOR_TIMEBIN, "time-bin swap")
    ax.set_xlabel(r"effective optical transmissivity $\eta\,\zeta_o$")
    ax.set_ylabel("rate (ebit / round)")


def _scatter_frontier(ps, infids):
    """Non-dominated staircase: maximal success probability, minimal infidelity."""
    points = sorted(zip(ps, infids))
    frontier = []
    best = np.inf
    for p, infid in reversed(points):
        if infid < best:
            frontier.append((p, infid))
            best = infid
    return frontier[::-1]


def render_tradeoff(spec: FigureSpec, ax):
    all_p, all_i = [], []
    for path, color in zip(
        spec.inputs, (COLOR_LVQC_ONE, COLOR_LVQC_TWO, COLOR_DIRECT, COLOR_TIMEBIN)
    ):
        records = read_records(path)
        ps = [rec["p_success"] for rec in records if rec.get("status") == "ok"]
        infids = [
            1.0 - rec["fidelity"] for rec in records if rec.get("status") == "ok"
        ]
        if not ps:
            raise InputError(f"{path}: no successful training records")
        ax.scatter(ps, np.maximum(infids, 1e-12), s=14, color=color, alpha=0.8,
                   label=f"LVQC ({len(ps)} restarts)")
        all_p.extend(ps)
        all_i.extend(infids)
    frontier = _scatter_frontier(all_p, all_i)
    ax.plot([p for p, _ in frontier], [max(i, 1e-12) for _, i in frontier],
            color=COLOR_FRONTIER, linewidth=1.4, label="frontier")
    ax.set_xlabel("success probability $P$")
    ax.set_ylabel("infidelity $1-F$")


def render_rate_infidelity(spec: FigureSpec, ax):
    cols = ["p_success", "fidelity", "infidelity", "rate_eof", "source"]
    for path in spec.inputs:
        table = read_table(path)
        data = require_columns(
            table, ["p_success", "fidelity", "infidelity", "rate_eof"], path
        )
        if "source" not in table:
            raise InputError(f"{path}: missing columns ['source']")
        sources = np.array(table["source"])
        for src in dict.fromkeys(sources):  # preserve first-seen order
            mask = sources == src
            color = SOURCE_COLORS.get(src, "gray")
            ax.plot(
                np.maximum(data["infidelity"][mask], 1e-12),
                np.maximum(data["rate_eof"][mask], 1e-12),
                marker="o", markersize=3.5, color=color, label=src,
            )
    ax.set_xlabel("infidelity $1-F$")
    ax.set_ylabel("rate per copy (ebit / round)")
    ax.invert_xaxis()


RENDERERS = {
    "rates": render_rates,
    "loss": render_loss,
    "tradeoff": render_tradeoff,
    "rate-infidelity": render_rate_infidelity,
}


def render(spec: FigureSpec) -> str:
    """Render one figure to spec.out and return the output path."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        try:
            RENDERERS[spec.figure_id](spec, ax)
            if spec.log_y:
                ax.set_yscale("log")
            if spec.log_x or spec.figure_id == "rate-infidelity":
                ax.set_xscale("log")
            handles, labels = ax.get_legend_handles_labels()
            seen: dict[str, object] = {}
            for handle, label in zip(handles, labels):
                seen.setdefault(label, handle)
            ax.legend(seen.values(), seen.keys(), loc="best")
            fig.tight_layout()
            # explicit metadata keeps the PNG bytes independent of the
            # matplotlib build and of when the figure was rendered
            fig.savefig(spec.out, format="png", metadata={"Software": "figgen"})
        finally:
            plt.close(fig)
    return spec.out
