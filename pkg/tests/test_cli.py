import json
import math

import numpy as np
import pytest

from kho import cli, fock, model, output
from kho.cli import main


def read_lines(path):
    with open(path) as fh:
        return fh.read().splitlines()


def data_rows(path):
    return [ln for ln in read_lines(path) if not ln.startswith("#")]


class TestEvolve:
    def test_zero_kicks_single_row(self, tmp_path):
        out = tmp_path / "trace.csv"
        code = main(["evolve", "--kicks", "0", "--dim", "64", "--out", str(out)])
        assert code == 0
        rows = data_rows(out)
        assert rows[0] == "kick,mean_energy"
        assert rows[1] == "0,0.5"
        assert len(rows) == 2

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["evolve", "--kicks", "12", "--dim", "128", "--eta2", "phi*pi"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_truncation_unsafe_exit_code(self, tmp_path):
        out = tmp_path / "trace.csv"
        code = main(["evolve", "--kicks", "80", "--dim", "48", "--eta2", "pi",
                     "--out", str(out)])
        assert code == cli.EXIT_TRUNCATION
        assert any("truncation-unsafe" in ln for ln in read_lines(out))

    def test_state_json_roundtrip(self, tmp_path):
        out = tmp_path / "trace.csv"
        state_out = tmp_path / "state.json"
        code = main(["evolve", "--kicks", "5", "--dim", "96", "--out", str(out),
                     "--state-out", str(state_out)])
        assert code == 0
        state = output.load_fock_state(state_out.read_text())
        assert state.dim == 96
        assert state.norm() == pytest.approx(1.0, abs=1e-10)

    def test_header_echoes_config(self, tmp_path):
        out = tmp_path / "t.csv"
        main(["evolve", "--kicks", "1", "--dim", "64", "--eta2", "pi/2", "--out", str(out)])
        head = read_lines(out)[:2]
        assert head[0].startswith("# kho-csv v1 subcommand=evolve")
        assert "eta2=pi/2" in head[1]
        assert f"eta2_value={math.pi/2:.17g}" in head[1]


class TestQfunc:
    def test_vacuum_grid(self, tmp_path):
        out = tmp_path / "q.csv"
        code = main(["qfunc", "--eta2", "pi", "--kicks", "0", "--dim", "32",
                     "--window", "2", "--res", "5", "--out", str(out)])
        assert code == 0
        vals = np.array([[float(x) for x in ln.split(",")] for ln in data_rows(out)])
        assert vals.shape == (5, 5)
        xs = np.linspace(-2, 2, 5)
        want = np.exp(-(xs[None, :] ** 2 + xs[:, None] ** 2)) / math.pi
        assert np.abs(vals - want).max() < 1e-12
        assert any("window:" in ln for ln in read_lines(out))

    def test_small_window_warns(self, tmp_path, capsys):
        out = tmp_path / "q.csv"
        code = main(["qfunc", "--eta2", "pi", "--kicks", "0", "--dim", "32",
                     "--alpha", "2.5+0j", "--window", "1", "--res", "9",
                     "--out", str(out)])
        assert code == 0
        assert "window" in capsys.readouterr().err
        assert any("window too small" in ln for ln in read_lines(out))

    def test_resonant_panel_spreads_wider(self, tmp_path):
        """Second moment of the emitted resonant grid exceeds twice the
        nonresonant one at equal kick count."""
        moments = {}
        for eta2 in ("pi", "phi*pi"):
            out = tmp_path / f"{eta2.replace('*', '')}.csv"
            code = main(["qfunc", "--eta2", eta2, "--kicks", "36", "--dim", "512",
                         "--window", "14", "--res", "57", "--out", str(out)])
            assert code == 0
            vals = np.array([[float(x) for x in ln.split(",")] for ln in data_rows(out)])
            ax = np.linspace(-14, 14, 57)
            rr, ii = np.meshgrid(ax, ax)
            moments[eta2] = float(np.sum(vals * (rr ** 2 + ii ** 2)) / np.sum(vals))
        assert moments["pi"] > 2 * moments["phi*pi"]

    def test_default_panels(self, tmp_path):
        outdir = tmp_path / "panels"
        code = main(["qfunc", "--dim", "128", "--window", "10", "--res", "11",
                     "--out", str(outdir)])
        # figure-parameter panels at a cramped test dimension: truncation
        # flag is expected for the late-time runs
        assert code in (0, cli.EXIT_TRUNCATION)
        names = sorted(p.name for p in outdir.iterdir())
        assert names == [
            "qfunc_eta2-phipi_N108.csv",
            "qfunc_eta2-phipi_N36.csv",
            "qfunc_eta2-pi_N108.csv",
            "qfunc_eta2-pi_N36.csv",
        ]


class TestEnergyScan:
    def test_single_point_consistent_with_evolve(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = main(["energy-scan", "--scan-min", "pi", "--scan-max", "pi",
                     "--scan-points", "1", "--dim", "256", "--kicks", "400",
                     "--out", str(out)])
        assert code in (0, cli.EXIT_TRUNCATION)
        row = data_rows(out)[1].split(",")
        eta_sq, k50, k200 = float(row[0]), int(row[1]), int(row[2])
        assert eta_sq == pytest.approx(math.pi)
        params = model.SystemParams(r=1, q=4, kappa=-0.8, eta_sq=math.pi)
        budget = max(c for c in (k50, k200) if c >= 0) + 5
        trace = fock.evolve(fock.ground_state(256), params, budget).energies
        crossings = [c if c is not None else -1
                     for c in fock.energy_crossings(trace, [50.0, 200.0])]
        # -1 marks a target the scan's kick budget (400) never reached
        expect = [c if (c >= 0 and c <= 400) else -1 for c in crossings]
        assert [k50, k200] == expect

    def test_sentinel_when_exhausted(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = main(["energy-scan", "--scan-min", "phi*pi", "--scan-max", "phi*pi",
                     "--scan-points", "1", "--dim", "128", "--kicks", "5",
                     "--out", str(out)])
        assert code == 0
        row = data_rows(out)[1].split(",")
        assert row[1] == "-1" and row[2] == "-1"

    def test_threads_match_serial(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["energy-scan", "--scan-min", "0.9*pi", "--scan-max", "1.1*pi",
                "--scan-points", "3", "--dim", "128", "--kicks", "150"]
        assert main(argv + ["--out", str(a), "--threads", "1"]) in (0, 2)
        assert main(argv + ["--out", str(b), "--threads", "2"]) in (0, 2)
        assert a.read_bytes() == b.read_bytes()


class TestSpectrum:
    def test_free_column_evenly_spaced(self, tmp_path):
        out = tmp_path / "spec.csv"
        code = main(["spectrum", "--kappa", "0", "--dim", "32", "--scan-min", "pi",
                     "--scan-max", "pi", "--scan-points", "1", "--out", str(out)])
        assert code == 0
        rows = [ln.split(",") for ln in data_rows(out)[1:]]
        assert len(rows) == 32
        phis = sorted(float(r[1]) for r in rows)
        want = sorted(float(np.angle(np.exp(-1j * (n + 0.5) * math.pi / 2))) for n in range(32))
        assert np.abs(np.array(phis) - np.array(want)).max() < 1e-12

    def test_scan_shape_and_determinism(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["spectrum", "--dim", "48", "--scan-min", "0.8*pi",
                "--scan-max", "1.2*pi", "--scan-points", "3"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b), "--threads", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(data_rows(a)) == 1 + 3 * 48


class TestResonances:
    def test_table_contents(self, tmp_path):
        out = tmp_path / "res.json"
        assert main(["resonances", "--out", str(out)]) == 0
        table = json.loads(out.read_text())
        assert set(table) == {"3", "4", "5", "6", "7", "8"}
        assert table["3"]["z_values"] == pytest.approx([math.sqrt(3) / 2])
        assert table["3"]["principal"] == pytest.approx(2 * math.pi / math.sqrt(3))
        assert table["4"]["z_values"] == pytest.approx([1.0])
        assert table["4"]["principal"] == pytest.approx(math.pi)
        assert table["5"]["principal"] is None
        assert len(table["5"]["z_values"]) == 2
        assert table["6"]["principal"] == pytest.approx(2 * math.pi / math.sqrt(3))

    def test_stdout_mode(self, capsys):
        assert main(["resonances", "--q-min", "4", "--q-max", "4"]) == 0
        table = json.loads(capsys.readouterr().out)
        assert table["4"]["kind"] == "resonant"


class TestVerify:
    def test_quick_passes(self, capsys):
        assert main(["verify", "--verify-level", "quick"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "checks passed" in out

    def test_skewed_zeta_fails_cross_representation(self, capsys):
        assert main(["verify", "--verify-level", "quick",
                     "--skew-zeta", "0.05"]) == cli.EXIT_VERIFY
        out = capsys.readouterr().out
        assert any("FAIL" in ln and "fidelity" in ln for ln in out.splitlines())


class TestUsageErrors:
    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == cli.EXIT_USAGE

    def test_bad_eta2_is_usage_error(self, tmp_path):
        code = main(["evolve", "--eta2", "bogus", "--out", str(tmp_path / "x.csv")])
        assert code == cli.EXIT_USAGE

    def test_bad_window(self):
        with pytest.raises(SystemExit) as exc:
            main(["qfunc", "--eta2", "pi", "--window", "1,2,3"])
        assert exc.value.code == cli.EXIT_USAGE
