"""Command-line interface: presets, determinism, provenance, exit codes."""

import csv
import io
import json

import numpy as np
import pytest
import yaml

from mwlink.cli import PRESETS, RunConfig, main


def run_cli(args):
    return main(list(args))


def read_csv(path):
    """Split a CLI CSV artifact into (header_lines, column_names, rows)."""
    header, body = [], []
    for line in path.read_text().splitlines():
        (header if line.startswith("#") else body).append(line)
    reader = csv.reader(io.StringIO("\n".join(body)))
    columns = next(reader)
    rows = [[float(x) if _floatable(x) else x for x in row] for row in reader]
    return header, columns, rows


def _floatable(x):
    try:
        float(x)
        return True
    except ValueError:
        return False


def column(rows, columns, name):
    idx = columns.index(name)
    return [row[idx] for row in rows]


def report_value(rows, key):
    return dict((row[0], row[1]) for row in rows)[key]


class TestRateCurve:
    def test_fig2a_ideal_cv_rates_coincide(self, tmp_path):
        out = tmp_path / "rates.csv"
        assert run_cli(["rate-curve", "--preset", "fig2a", "--out", str(out)]) == 0
        header, columns, rows = read_csv(out)
        assert any("content-hash" in line for line in header)
        cv_rci = column(rows, columns, "cv_rci")
        cv_eof = column(rows, columns, "cv_eof")
        np.testing.assert_allclose(cv_rci, cv_eof, atol=1e-9)
        # rates grow with cooperativity
        assert cv_rci == sorted(cv_rci)

    def test_fig2b_rates_cross(self, tmp_path):
        out = tmp_path / "rates.csv"
        assert run_cli(["rate-curve", "--preset", "fig2b", "--out", str(out)]) == 0
        _, columns, rows = read_csv(out)
        cs = column(rows, columns, "C")
        gap = np.array(column(rows, columns, "cv_rci")) - np.array(
            column(rows, columns, "timebin_eof_upper_rate")
        )
        sign_changes = np.flatnonzero(np.diff(np.sign(gap)))
        assert len(sign_changes) == 1
        c_star = cs[int(sign_changes[0])]
        assert 0.08 < c_star < 0.16

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(["rate-curve", "--preset", "fig2a", "--out", str(a)])
        run_cli(["rate-curve", "--preset", "fig2a", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestLossSweep:
    def test_fig5_unity_transmission_matches_rate_curve(self, tmp_path):
        out = tmp_path / "loss.csv"
        assert run_cli(["loss-sweep", "--preset", "fig5", "--out", str(out)]) == 0
        _, columns, rows = read_csv(out)
        zetas = column(rows, columns, "zeta_o")
        assert zetas[-1] == pytest.approx(1.0)
        # compare the eta = 1 endpoint against a direct single-point run
        from mwlink.gaussian import TransducerParams, cv_swap, transducer_covariance
        from mwlink.measures import gaussian_rci

        state, _ = cv_swap(
            transducer_covariance(
                TransducerParams(**PRESETS["fig5"]["transducer"])
            )
        )
        assert column(rows, columns, "cv_rci")[-1] == pytest.approx(
            max(gaussian_rci(state), 0.0), abs=1e-9
        )

    def test_cv_rate_zero_below_half_transmission(self, tmp_path):
        out = tmp_path / "loss.csv"
        run_cli(["loss-sweep", "--preset", "fig5", "--out", str(out)])
        _, columns, rows = read_csv(out)
        for zeta, rate in zip(
            column(rows, columns, "zeta_o"), column(rows, columns, "cv_rci")
        ):
            if zeta <= 0.5:
                assert rate == 0.0


class TestReports:
    def test_timebin_fig3(self, tmp_path):
        out = tmp_path / "timebin.csv"
        assert run_cli(["timebin", "--preset", "fig3", "--out", str(out)]) == 0
        _, _, rows = read_csv(out)
        assert report_value(rows, "f_sp") == pytest.approx(0.9809, abs=2e-3)
        # the four herald-window probabilities leave room for higher photon
        # content, so they sum below one
        total = sum(report_value(rows, k) for k in ("p00", "p01", "p10", "p11"))
        assert 0.0 < total < 1.0
        z = (report_value(rows, "p01") + report_value(rows, "p11")) ** 2
        assert report_value(rows, "p_success") == pytest.approx(z / 2.0, abs=1e-12)

    def test_direct_swap_fig3(self, tmp_path):
        out = tmp_path / "swap.csv"
        assert run_cli(["direct-swap", "--preset", "fig3", "--out", str(out)]) == 0
        _, _, rows = read_csv(out)
        assert report_value(rows, "p_success") == pytest.approx(1.0, abs=1e-9)
        assert 0.21 <= report_value(rows, "infidelity") <= 0.25


@pytest.fixture(scope="module")
def train_cfg_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "train.yaml"
    path.write_text(
        yaml.safe_dump(
            {"train": {"depth": 2, "steps": 30, "restarts": 2, "cutoff": 6, "n_th": 3}}
        )
    )
    return path


class TestTrainAndFrontier:
    def test_train_byte_identical_across_paths(self, tmp_path, train_cfg_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        base = ["train", "--preset", "fig3", "--config", str(train_cfg_path), "--seed", "7"]
        assert run_cli(base + ["--out", str(a)]) == 0
        assert run_cli(base + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_train_seed_changes_output(self, tmp_path, train_cfg_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        base = ["train", "--preset", "fig3", "--config", str(train_cfg_path)]
        run_cli(base + ["--seed", "7", "--out", str(a)])
        run_cli(base + ["--seed", "8", "--out", str(b)])
        assert a.read_bytes() != b.read_bytes()

    def test_frontier_from_records(self, tmp_path, train_cfg_path):
        records = tmp_path / "records.jsonl"
        run_cli(
            ["train", "--preset", "fig3", "--config", str(train_cfg_path),
             "--seed", "7", "--out", str(records)]
        )
        header = json.loads(records.read_text().splitlines()[0])
        assert "content_hash" in header["_header"]
        out = tmp_path / "frontier.csv"
        assert run_cli(["frontier", str(records), "--out", str(out)]) == 0
        _, columns, rows = read_csv(out)
        ps = column(rows, columns, "p_success")
        fs = column(rows, columns, "fidelity")
        assert ps == sorted(ps)
        assert all(b <= a + 1e-12 for a, b in zip(fs, fs[1:]))


class TestErrorHandling:
    def test_unknown_preset_exit_2(self, capsys):
        assert run_cli(["rate-curve", "--preset", "nope"]) == 2
        assert "unknown preset" in capsys.readouterr().err

    def test_missing_transducer_exit_2(self, capsys):
        assert run_cli(["rate-curve"]) == 2

    def test_bad_sweep_bounds_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text(
            yaml.safe_dump(
                {
                    "transducer": {"cooperativity": 0.1},
                    "sweep": {"parameter": "cooperativity", "start": 0.5, "stop": 0.1, "points": 5},
                }
            )
        )
        assert run_cli(["rate-curve", "--config", str(cfg)]) == 2

    def test_non_mapping_config_exit_2(self, tmp_path):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("- just\n- a\n- list\n")
        assert run_cli(["rate-curve", "--config", str(cfg)]) == 2

    def test_frontier_without_records_exit_2(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text(json.dumps({"_header": {"config": {}}}) + "\n")
        assert run_cli(["frontier", str(empty)]) == 2

    def test_unreadable_config_exit_2(self):
        assert run_cli(["rate-curve", "--config", "/no/such/file.yaml"]) == 2


class TestConfigPlumbing:
    def test_provenance_excludes_out_path(self):
        a = RunConfig(subcommand="x", transducer={"cooperativity": 0.1}, out="/a")
        b = RunConfig(subcommand="x", transducer={"cooperativity": 0.1}, out="/b")
        assert a.provenance_dict() == b.provenance_dict()
        assert a.content_hash() == b.content_hash()

    def test_config_file_overrides_preset(self, tmp_path):
        cfg_path = tmp_path / "over.yaml"
        cfg_path.write_text(yaml.safe_dump({"transducer": {"n_in": 0.5}}))
        out = tmp_path / "out.csv"
        assert (
            run_cli(
                ["timebin", "--preset", "fig3", "--config", str(cfg_path),
                 "--out", str(out)]
            )
            == 0
        )
        header = [l for l in out.read_text().splitlines() if l.startswith("# config")][0]
        payload = json.loads(header.split("config: ", 1)[1])
        assert payload["transducer"]["n_in"] == 0.5
        assert payload["transducer"]["zeta_m"] == 0.992

    def test_stdout_output(self, capsys):
        assert run_cli(["timebin", "--preset", "fig3"]) == 0
        assert "f_sp" in capsys.readouterr().out
