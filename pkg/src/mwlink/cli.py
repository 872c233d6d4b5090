"""Command-line entry point: sweeps, training jobs and frontier exports.

Every output file starts with a provenance header (resolved configuration,
seed, package version and a content hash of the configuration) so that any
artifact can be regenerated from its own header.  All outputs are
deterministic given (config, seed) and written atomically.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import yaml

from . import __version__
from .frontier import ProtocolPoint, pareto, point_from_state, points_csv_text
from .gaussian import (
    TransducerParams,
    apply_optical_loss,
    cv_swap,
    transducer_covariance,
)
from .hybrid import HybridEvaluator, direct_swap
from .measures import gaussian_eof_symmetric, gaussian_rci
from .fock import gaussian_to_fock
from .timebin import fock_probabilities, heralded_state, timebin_rate, timebin_rci
from .training import TrainConfig, adam_train, init_hybrid_params, read_records

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

PRESETS = {
    "fig2a": {
        "transducer": {"cooperativity": 0.1, "zeta_o": 1.0, "zeta_m": 1.0, "n_in": 0.0},
        "sweep": {"parameter": "cooperativity", "start": 0.02, "stop": 0.3, "points": 50},
    },
    "fig2b": {
        "transducer": {"cooperativity": 0.1, "zeta_o": 0.9, "zeta_m": 0.95, "n_in": 0.2},
        "sweep": {"parameter": "cooperativity", "start": 0.02, "stop": 0.3, "points": 50},
    },
    "fig3": {
        "transducer": {"cooperativity": 0.1, "zeta_o": 0.99, "zeta_m": 0.992, "n_in": 0.2},
        "sweep": None,
    },
    "fig5": {
        "transducer": {"cooperativity": 0.1, "zeta_o": 1.0, "zeta_m": 0.992, "n_in": 0.2},
        "sweep": {"parameter": "zeta_o", "start": 0.05, "stop": 1.0, "points": 50},
    },
}


@dataclass
class RunConfig:
    """Resolved configuration of one CLI invocation."""

    subcommand: str
    transducer: dict = field(default_factory=dict)
    sweep: dict | None = None
    train: dict = field(default_factory=dict)
    seed: int = 0
    out: str = "-"
    fmt: str = "csv"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "RunConfig":
        try:
            return cls(**payload)
        except TypeError as err:
            raise ValueError(f"malformed configuration payload: {err}") from err

    def provenance_dict(self) -> dict:
        """Configuration as embedded in output headers.

        The output path is dropped so that the same computation written to
        two locations produces byte-identical content.
        """
        payload = self.to_dict()
        payload.pop("out")
        return payload

    def content_hash(self) -> str:
        canonical = json.dumps(self.provenance_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]

    def transducer_params(self) -> TransducerParams:
        return TransducerParams(**self.transducer)

    def train_config(self) -> TrainConfig:
        return TrainConfig(seed=self.seed, **self.train)


def resolve_config(args) -> RunConfig:
    """Merge preset, config file, and command-line overrides (in that order)."""
    merged: dict = {"transducer": {}, "sweep": None, "train": {"depth": 4}}
    if args.preset:
        if args.preset not in PRESETS:
            raise ValueError(
                f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}"
            )
        preset = PRESETS[args.preset]
        merged["transducer"] = dict(preset["transducer"])
        merged["sweep"] = dict(preset["sweep"]) if preset["sweep"] else None
    if args.config:
        with open(args.config) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {args.config} must hold a mapping")
        for key in ("transducer", "sweep", "train"):
            if key in loaded:
                if loaded[key] is None:
                    merged[key] = None
                else:
                    base = merged.get(key) or {}
                    base.update(loaded[key])
                    merged[key] = base
        for key in ("seed", "out", "fmt"):
            if key in loaded:
                merged[key] = loaded[key]
    cfg = RunConfig(
        subcommand=args.subcommand,
        transducer=merged["transducer"],
        sweep=merged["sweep"],
        train=merged["train"],
        seed=merged.get("seed", 0),
        out=merged.get("out", "-"),
        fmt=merged.get("fmt", "csv"),
    )
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    if getattr(args, "format", None) is not None:
        cfg = replace(cfg, fmt=args.format)
    if not cfg.transducer:
        raise ValueError("no transducer parameters: pass --preset or --config")
    return cfg


def provenance_lines(cfg: RunConfig) -> list[str]:
    return [
        f"mwlink {cfg.subcommand} v{__version__}",
        f"config: {json.dumps(cfg.provenance_dict(), sort_keys=True)}",
        f"seed: {cfg.seed}",
        f"content-hash: {cfg.content_hash()}",
    ]


def atomic_write(path: str, text: str):
    """Write text to path via a temporary file in the same directory."""
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mwlink-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sweep_values(sweep: dict) -> np.ndarray:
    if sweep is None:
        raise ValueError("this subcommand requires a sweep specification")
    start, stop, points = sweep["start"], sweep["stop"], int(sweep["points"])
    if points < 1:
        raise ValueError(f"sweep needs at least one point, got {points}")
    if not (np.isfinite(start) and np.isfinite(stop)) or start > stop:
        raise ValueError(f"invalid sweep bounds [{start}, {stop}]")
    return np.linspace(start, stop, points)


def _rate_row(params: TransducerParams) -> dict:
    """CV and time-bin rate figures at one transducer operating point."""
    uvw = transducer_covariance(params)
    state, _ = cv_swap(uvw)
    outcome = heralded_state(fock_probabilities(uvw))
    return {
        "cv_rci": max(gaussian_rci(state), 0.0),
        "cv_eof": gaussian_eof_symmetric(state),
        "timebin_rci_rate": timebin_rate(outcome, "rci"),
        "timebin_eof_upper_rate": timebin_rate(outcome, "eof_upper"),
    }


def _csv_text(cfg: RunConfig, columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    for line in provenance_lines(cfg):
        buf.write(f"# {line}\n")
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def cmd_rate_curve(cfg: RunConfig) -> str:
    columns = ["C", "cv_rci", "cv_eof", "timebin_rci_rate", "timebin_eof_upper_rate"]
    rows = []
    for c in _sweep_values(cfg.sweep):
        params = replace(cfg.transducer_params(), cooperativity=float(c))
        vals = _rate_row(params)
        rows.append([float(c)] + [vals[k] for k in columns[1:]])
    return _csv_text(cfg, columns, rows)


def cmd_loss_sweep(cfg: RunConfig) -> str:
    columns = ["zeta_o", "cv_rci", "cv_eof", "timebin_rci_rate", "timebin_eof_upper_rate"]
    base = cfg.transducer_params()
    rows = []
    for eta in _sweep_values(cfg.sweep):
        # the swept value is the effective optical transmissivity eta * zeta_o
        vals = _rate_row(apply_optical_loss(base, float(eta)))
        rows.append([float(eta) * base.zeta_o] + [vals[k] for k in columns[1:]])
    return _csv_text(cfg, columns, rows)


def cmd_timebin(cfg: RunConfig) -> str:
    uvw = transducer_covariance(cfg.transducer_params())
    outcome = heralded_state(fock_probabilities(uvw))
    rows = [
        ["p00", outcome.p00],
        ["p01", outcome.p01],
        ["p10", outcome.p10],
        ["p11", outcome.p11],
        ["lambda1", outcome.lambda1],
        ["lambda2", outcome.lambda2],
        ["lambda3", outcome.lambda3],
        ["p_success", outcome.p_success],
        ["f_sp", outcome.f_sp],
        ["rci", timebin_rci(outcome)],
        ["rate_rci", timebin_rate(outcome, "rci")],
        ["rate_eof_upper", timebin_rate(outcome, "eof_upper")],
    ]
    return _csv_text(cfg, ["key", "value"], rows)


def cmd_direct_swap(cfg: RunConfig) -> str:
    train = cfg.train_config()
    state, _ = cv_swap(transducer_covariance(cfg.transducer_params()))
    rho_mm = gaussian_to_fock(state, train.cutoff)
    result = direct_swap(rho_mm)
    rows = [
        ["p_success", result.p_success],
        ["fidelity", result.fidelity],
        ["infidelity", 1.0 - result.fidelity],
        ["cutoff", float(train.cutoff)],
    ]
    return _csv_text(cfg, ["key", "value"], rows)


def cmd_train(cfg: RunConfig) -> str:
    train = cfg.train_config()
    state, _ = cv_swap(transducer_covariance(cfg.transducer_params()))
    rho_mm = gaussian_to_fock(state, train.cutoff)
    evaluator = HybridEvaluator(rho_mm, n_th=train.n_th, rank_tol=1e-9)
    records = adam_train(
        train, evaluator, lambda rng: init_hybrid_params(rng, train.depth)
    )
    header = {
        "_header": {
            "tool": f"mwlink train v{__version__}",
            "config": cfg.provenance_dict(),
            "seed": cfg.seed,
            "content_hash": cfg.content_hash(),
        }
    }
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(rec.to_json() for rec in records)
    return "\n".join(lines) + "\n"


def _record_header(path: str) -> dict:
    with open(path) as fh:
        first = json.loads(fh.readline())
    if "_header" not in first:
        raise ValueError(f"record file {path} lacks a provenance header")
    return first["_header"]


def cmd_frontier(cfg: RunConfig, inputs: list[str]) -> str:
    """Re-evaluate trained circuits from record files and export the frontier."""
    points: list[ProtocolPoint] = []
    for path in inputs:
        header = _record_header(path)
        run = RunConfig.from_dict(header["config"])
        train = run.train_config()
        state, _ = cv_swap(transducer_covariance(run.transducer_params()))
        rho_mm = gaussian_to_fock(state, train.cutoff)
        evaluator = HybridEvaluator(rho_mm, n_th=train.n_th, rank_tol=1e-9)
        for rec in read_records(path):
            if rec.status != "ok":
                continue
            p, _, rho_qq = evaluator.evaluate(np.asarray(rec.params))
            points.append(point_from_state(p, rho_qq, 1, "hybrid-lvqc"))
    if not points:
        raise ValueError("no successful training records found in the inputs")
    return points_csv_text(pareto(points), provenance_lines(cfg))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwlink", description="Microwave-interconnect entanglement pipelines"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in ("rate-curve", "loss-sweep", "timebin", "train", "direct-swap"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--preset", default=None)
        p.add_argument("--format", choices=("csv", "records"), default=None)
    p = sub.add_parser("frontier")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--preset", default=None)
    p.add_argument("--format", choices=("csv", "records"), default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "frontier":
            cfg = RunConfig(
                subcommand="frontier", seed=args.seed or 0, out=args.out or "-"
            )
            text = cmd_frontier(cfg, args.inputs)
        else:
            cfg = resolve_config(args)
            handler = {
                "rate-curve": cmd_rate_curve,
                "loss-sweep": cmd_loss_sweep,
                "timebin": cmd_timebin,
                "train": cmd_train,
                "direct-swap": cmd_direct_swap,
            }[args.subcommand]
            text = handler(cfg)
        atomic_write(cfg.out, text)
    except (ValueError, KeyError, OSError, yaml.YAMLError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
