"""Protocol-mixture interpolation, Pareto-frontier extraction and rates.

A ProtocolPoint is one (success probability, fidelity) operating point with
its entanglement measures; probabilistic mixtures of protocols interpolate
linearly in success probability and success-weighted fidelity.  Entanglement
of a mixture is recomputed from the mixed conditional state when the points
carry their states, because EoF does not mix linearly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .measures import bell_fidelity, qubit_eof, rci_general


@dataclass(frozen=True)
class ProtocolPoint:
    """One operating point of a distillation protocol."""

    p_success: float
    fidelity: float
    eof: float
    rci: float
    copies: int
    source: str
    rho_qq: np.ndarray | None = None

    def __post_init__(self):
        if not 0.0 <= self.p_success <= 1.0 + 1e-10:
            raise ValueError(f"p_success out of range: {self.p_success}")
        if not 0.0 <= self.fidelity <= 1.0 + 1e-10:
            raise ValueError(f"fidelity out of range: {self.fidelity}")
        if self.copies not in (1, 2):
            raise ValueError(f"copies must be 1 or 2, got {self.copies}")

    def rate_per_copy(self, measure: str = "eof") -> float:
        if measure == "eof":
            value = self.eof
        elif measure == "rci":
            value = max(self.rci, 0.0)
        else:
            raise ValueError(f"unknown measure {measure!r}")
        return self.p_success * value / self.copies


def point_from_state(
    p_success: float, rho_qq: np.ndarray, copies: int, source: str
) -> ProtocolPoint:
    """Build a point with all measures evaluated from the conditional state."""
    return ProtocolPoint(
        p_success=p_success,
        fidelity=bell_fidelity(rho_qq),
        eof=qubit_eof(rho_qq),
        rci=rci_general(rho_qq, (2, 2)),
        copies=copies,
        source=source,
        rho_qq=np.asarray(rho_qq, dtype=complex),
    )


def interpolate(a: ProtocolPoint, b: ProtocolPoint, r: float) -> ProtocolPoint:
    """Probabilistic mixture running protocol ``a`` with probability r."""
    if a.copies != b.copies or a.source != b.source:
        raise ValueError("can only interpolate points of the same family")
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must be in [0, 1], got {r}")
    if r == 1.0:
        return a
    if r == 0.0:
        return b
    p = r * a.p_success + (1.0 - r) * b.p_success
    if p <= 0.0:
        raise ValueError("mixture has zero success probability")
    fid = (r * a.p_success * a.fidelity + (1.0 - r) * b.p_success * b.fidelity) / p
    if a.rho_qq is not None and b.rho_qq is not None:
        rho = (r * a.p_success * a.rho_qq + (1.0 - r) * b.p_success * b.rho_qq) / p
        return point_from_state(p, rho, a.copies, a.source)
    return ProtocolPoint(p, fid, math.nan, math.nan, a.copies, a.source)


def extrapolate(a: ProtocolPoint, r: float) -> ProtocolPoint:
    """Mixture with the trivial always-succeed strategy that outputs |00>."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must be in [0, 1], got {r}")
    if r == 1.0:
        return a
    p = r * a.p_success + (1.0 - r)
    fid = (r * a.p_success * a.fidelity + (1.0 - r) / 2.0) / p
    if a.rho_qq is not None:
        vac = np.zeros((4, 4), dtype=complex)
        vac[0, 0] = 1.0
        rho = (r * a.p_success * a.rho_qq + (1.0 - r) * vac) / p
        return point_from_state(p, rho, a.copies, a.source)
    return ProtocolPoint(p, fid, math.nan, math.nan, a.copies, a.source)


def pareto(
    points: list[ProtocolPoint], bin_width: float = 0.02, interp_per_gap: int = 0
) -> list[ProtocolPoint]:
    """Highest-fidelity point per success-probability bin, dominance-filtered.

    Adjacent keepers of the same family are optionally connected by
    ``interp_per_gap`` interpolated mixtures.  The returned list is sorted by
    success probability with fidelity non-increasing.
    """
    if not points:
        raise ValueError("pareto requires at least one point")
    bins: dict[int, ProtocolPoint] = {}
    for pt in points:
        idx = int(pt.p_success / bin_width)
        if idx not in bins or pt.fidelity > bins[idx].fidelity:
            bins[idx] = pt
    keepers = sorted(bins.values(), key=lambda pt: pt.p_success)
    # drop points dominated by a higher-p, higher-F keeper
    frontier: list[ProtocolPoint] = []
    for pt in keepers:
        if any(
            other is not pt
            and other.p_success >= pt.p_success
            and other.fidelity >= pt.fidelity
            for other in keepers
        ):
            continue
        frontier.append(pt)
    if interp_per_gap > 0:
        connected: list[ProtocolPoint] = []
        for left, right in zip(frontier, frontier[1:]):
            connected.append(left)
            if left.source == right.source and left.copies == right.copies:
                for k in range(1, interp_per_gap + 1):
                    r = k / (interp_per_gap + 1)
                    connected.append(interpolate(right, left, r))
        connected.append(frontier[-1])
        frontier = connected
    return frontier


CSV_COLUMNS = (
    "p_success",
    "fidelity",
    "infidelity",
    "eof",
    "rci",
    "rate_eof",
    "rate_rci",
    "M",
    "source",
)


def points_csv_text(points: list[ProtocolPoint], header_lines: list[str] = ()) -> str:
    """Render the standard point table; header lines are '#'-prefixed comments."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for pt in points:
        writer.writerow(
            [
                _fmt(pt.p_success),
                _fmt(pt.fidelity),
                _fmt(1.0 - pt.fidelity),
                _fmt(pt.eof),
                _fmt(pt.rci),
                _fmt(pt.rate_per_copy("eof")) if math.isfinite(pt.eof) else "nan",
                _fmt(pt.rate_per_copy("rci")) if math.isfinite(pt.rci) else "nan",
                pt.copies,
                pt.source,
            ]
        )
    return buf.getvalue()


def write_points_csv(path, points: list[ProtocolPoint], header_lines: list[str] = ()):
    """Write the standard point table to a file."""
    with open(path, "w", newline="") as fh:
        fh.write(points_csv_text(points, header_lines))


def read_points_csv(path) -> list[ProtocolPoint]:
    points = []
    with open(path, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(rows)
    for row in reader:
        points.append(
            ProtocolPoint(
                p_success=float(row["p_success"]),
                fidelity=float(row["fidelity"]),
                eof=float(row["eof"]),
                rci=float(row["rci"]),
                copies=int(row["M"]),
                source=row["source"],
            )
        )
    return points


def _fmt(x: float) -> str:
    return f"{x:.12g}"
