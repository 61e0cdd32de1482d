import json
import math
import os

import numpy as np
import pytest

from dms.cli import main


def write_config(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv(path):
    comments, header, rows = [], None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line)
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
    return comments, header, np.array(rows)


def detuning_config(tmp_path, output, **over):
    doc = {
        "model": {"kind": "rosen_zener", "chi_t": 18.0},
        "couplings": {"design": "equal_all_from_ground", "n": 3, "i": 1, "branch": "+"},
        "initial": 1,
        "scan": {"variable": "delta0_t", "from": 0.0, "to": 60.0, "points": 25},
        "output": output,
    }
    doc.update(over)
    return write_config(tmp_path, "scan.json", doc)


class TestScanDetuning:
    def test_equal_superposition_at_table_root(self, tmp_path):
        out = str(tmp_path / "scan.csv")
        cfg = detuning_config(tmp_path, out,
                              scan={"variable": "delta0_t", "from": 50.534,
                                    "to": 50.534, "points": 1})
        assert main(["scan-detuning", "--config", cfg, "--no-figure"]) == 0
        _, header, rows = read_csv(out)
        assert header == ["delta0T", "P_1", "P_2", "P_3", "P_4"]
        assert rows.shape[0] == 1  # zero-width scan collapses to one row
        np.testing.assert_allclose(rows[0, 1:], [1 / 3, 1 / 3, 1 / 3, 0], atol=1e-3)

    def test_case_ii_couplings_empty_initial_state(self, tmp_path):
        out = str(tmp_path / "scan.csv")
        cfg = detuning_config(
            tmp_path, out,
            couplings={"design": "equal_all_except_initial", "n": 3, "i": 1},
            scan={"variable": "delta0_t", "from": 50.534, "to": 50.534, "points": 1})
        assert main(["scan-detuning", "--config", cfg, "--no-figure"]) == 0
        _, _, rows = read_csv(out)
        np.testing.assert_allclose(rows[0, 1:], [0.0, 0.5, 0.5, 0.0], atol=1e-3)

    def test_oracle_columns(self, tmp_path):
        out = str(tmp_path / "scan.csv")
        cfg = detuning_config(tmp_path, out,
                              model={"kind": "rosen_zener", "chi_t": 2.0},
                              scan={"variable": "delta0_t", "from": 0.0, "to": 2.0,
                                    "points": 3},
                              window=[-22.0, 22.0])
        assert main(["scan-detuning", "--config", cfg, "--oracle", "--no-figure"]) == 0
        _, header, rows = read_csv(out)
        assert header[-1] == "P_4_oracle"
        np.testing.assert_allclose(rows[:, 1:5], rows[:, 5:9], atol=1e-6)

    def test_round_trip_preserves_floats(self, tmp_path):
        out = str(tmp_path / "scan.csv")
        cfg = detuning_config(tmp_path, out)
        assert main(["scan-detuning", "--config", cfg, "--no-figure"]) == 0
        _, _, rows = read_csv(out)
        from dms import models, propagator
        from dms.core import ModelSpec
        from dms.design import DesignTarget, design_couplings
        chis = design_couplings(DesignTarget("equal_all_from_ground", 3, 1, +1), 1.0)
        x = rows[5, 0]
        ck = models.cayley_klein(ModelSpec.rosen_zener(chi=18.0, delta0=x, T=1.0))
        expected = propagator.populations_from_ground(chis, ck, 1).probs
        assert np.array_equal(rows[5, 1:], expected)  # 17g survives the round trip

    def test_figure_rendered_by_default(self, tmp_path):
        out = str(tmp_path / "scan.csv")
        cfg = detuning_config(tmp_path, out,
                              scan={"variable": "delta0_t", "from": 0.0, "to": 10.0,
                                    "points": 5})
        assert main(["scan-detuning", "--config", cfg]) == 0
        assert os.path.exists(str(tmp_path / "scan.png"))


class TestScanArea:
    def test_equal_superposition_at_area_18pi(self, tmp_path):
        out = str(tmp_path / "area.csv")
        doc = {
            "model": {"kind": "rosen_zener", "delta0_t": 50.534, "chi_t": 1.0},
            "couplings": {"design": "equal_all_from_ground", "n": 3, "i": 1,
                          "branch": "+"},
            "initial": 1,
            "scan": {"variable": "chi_t", "from": 18.0, "to": 18.0, "points": 1},
            "output": out,
        }
        cfg = write_config(tmp_path, "area.json", doc)
        assert main(["scan-area", "--config", cfg, "--no-figure"]) == 0
        _, header, rows = read_csv(out)
        assert header[0] == "rms_area" and header[-1] == "equal_dev"
        assert rows[0, 0] == pytest.approx(18 * math.pi)
        np.testing.assert_allclose(rows[0, 1:5], [1 / 3, 1 / 3, 1 / 3, 0], atol=1e-3)
        assert rows[0, -1] < 1e-3

    def test_zero_area_is_complete_return(self, tmp_path):
        out = str(tmp_path / "area.csv")
        doc = {
            "model": {"kind": "resonance"},
            "couplings": [1.0, 1.0, 1.0],
            "initial": 2,
            "scan": {"variable": "rms_area", "from": 0.0, "to": 0.0, "points": 1},
            "output": out,
        }
        cfg = write_config(tmp_path, "area0.json", doc)
        assert main(["scan-area", "--config", cfg, "--no-figure"]) == 0
        _, _, rows = read_csv(out)
        np.testing.assert_allclose(rows[0, 1:5], [0, 1, 0, 0], atol=1e-15)


class TestEvolve:
    def test_detuned_case_i_trajectory(self, tmp_path):
        out = str(tmp_path / "evolve.csv")
        doc = {
            "model": {"kind": "rosen_zener", "chi_t": 18.0, "delta0_t": 50.534},
            "couplings": {"design": "equal_all_from_ground", "n": 3, "i": 1,
                          "branch": "+"},
            "initial": 1,
            "samples": 201,
            "output": out,
        }
        cfg = write_config(tmp_path, "evolve.json", doc)
        assert main(["evolve", "--config", cfg, "--no-figure"]) == 0
        comments, header, rows = read_csv(out)
        assert header[0] == "t_over_T"
        np.testing.assert_allclose(rows[-1, 1:], [1 / 3, 1 / 3, 1 / 3, 0], atol=1e-3)
        footer = [c for c in comments if "peak_excited" in c]
        assert footer, "missing peak_excited footer"
        peak = float(footer[0].split("=")[1])
        assert 0.0 < peak < 0.05  # transient strongly suppressed off resonance

    def test_resonant_counterpart_has_large_transient(self, tmp_path):
        out = str(tmp_path / "evolve0.csv")
        doc = {
            "model": {"kind": "rosen_zener", "chi_t": 18.0, "delta0_t": 0.0},
            "couplings": {"design": "equal_all_from_ground", "n": 3, "i": 1,
                          "branch": "+"},
            "initial": 1,
            "output": out,
        }
        cfg = write_config(tmp_path, "evolve0.json", doc)
        assert main(["evolve", "--config", cfg, "--no-figure"]) == 0
        comments, _, rows = read_csv(out)
        peak = float([c for c in comments if "peak_excited" in c][0].split("=")[1])
        assert peak > 0.5
        np.testing.assert_allclose(rows[-1, 1:], [1 / 3, 1 / 3, 1 / 3, 0], atol=1e-4)


class TestLzScan:
    def test_asymptotes(self, tmp_path):
        out = str(tmp_path / "lz.csv")
        doc = {
            "couplings": [1.0, 1.0, 1.0],
            "initial": 1,
            "scan": {"variable": "Lambda", "from": 0.0, "to": 10.0, "points": 21},
            "output": out,
        }
        cfg = write_config(tmp_path, "lz.json", doc)
        assert main(["lz-scan", "--config", cfg, "--no-figure"]) == 0
        _, header, rows = read_csv(out)
        assert header == ["Lambda", "P_1", "P_2", "P_3", "P_4"]
        np.testing.assert_allclose(rows[0, 1:], [1, 0, 0, 0], atol=1e-15)
        np.testing.assert_allclose(rows[-1, 1:], [4 / 9, 1 / 9, 1 / 9, 1 / 3], atol=1e-3)

    def test_oracle_column(self, tmp_path):
        out = str(tmp_path / "lz.csv")
        doc = {
            "couplings": [1.0, 1.0],
            "initial": 1,
            "scan": {"variable": "Lambda", "from": 0.5, "to": 0.5, "points": 1},
            "output": out,
            "oracle": True,
            "window_factor": 100.0,
        }
        cfg = write_config(tmp_path, "lzo.json", doc)
        assert main(["lz-scan", "--config", cfg, "--no-figure"]) == 0
        _, header, rows = read_csv(out)
        assert "P_1_oracle" in header
        np.testing.assert_allclose(rows[0, 1:4], rows[0, 4:7], atol=1e-3)


class TestDesignCommand:
    def test_except_initial_report(self, tmp_path, capsys):
        doc = {"target": {"kind": "equal_all_except_initial", "n": 3, "i": 1},
               "chi_total": 2.0, "rz_alpha": 9}
        cfg = write_config(tmp_path, "design.json", doc)
        assert main(["design", "--config", cfg]) == 0
        report = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(report["couplings"], [math.sqrt(2), 1, 1], rtol=1e-12)
        assert report["required_a"] == -1.0
        np.testing.assert_allclose(report["rz_detunings"],
                                   [0.0, 1.988, 5.907, 14.265, 50.534], atol=2e-3)
        assert report["verify"]["passed"]

    def test_excited_start_report(self, tmp_path, capsys):
        doc = {"target": {"kind": "equal_all_from_excited", "n": 4}, "l": 0}
        cfg = write_config(tmp_path, "design.json", doc)
        assert main(["design", "--config", cfg]) == 0
        report = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(report["resonance_areas"], [math.pi / 2] * 4,
                                   rtol=1e-12)
        assert report["verify"]["passed"]

    def test_unreachable_target_exits_4(self, tmp_path):
        doc = {"target": {"kind": "equal_all_except_initial", "n": 1}}
        cfg = write_config(tmp_path, "design.json", doc)
        assert main(["design", "--config", cfg]) == 4


class TestConfigErrors:
    def test_malformed_json_exits_2(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["scan-detuning", "--config", str(path)]) == 2

    def test_unknown_key_rejected(self, tmp_path):
        cfg = detuning_config(tmp_path, str(tmp_path / "o.csv"), typo_key=1)
        assert main(["scan-detuning", "--config", cfg]) == 2

    def test_wrong_scan_variable(self, tmp_path):
        cfg = detuning_config(tmp_path, str(tmp_path / "o.csv"),
                              scan={"variable": "Lambda", "from": 0, "to": 1,
                                    "points": 2})
        assert main(["scan-detuning", "--config", cfg]) == 2

    def test_wrong_model_kind(self, tmp_path):
        cfg = detuning_config(tmp_path, str(tmp_path / "o.csv"),
                              model={"kind": "landau_zener", "Lambda": 1.0})
        assert main(["scan-detuning", "--config", cfg]) == 2

    def test_missing_config_file(self):
        assert main(["scan-detuning", "--config", "/nonexistent/cfg.json"]) == 2


class TestDeterminism:
    def test_identical_config_identical_bytes(self, tmp_path):
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        cfg = detuning_config(tmp_path, "scan.csv")
        assert main(["scan-detuning", "--config", cfg, "--output", out1,
                     "--no-figure"]) == 0
        assert main(["scan-detuning", "--config", cfg, "--output", out2,
                     "--no-figure"]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_threads_do_not_change_output(self, tmp_path, monkeypatch):
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        cfg = detuning_config(tmp_path, "scan.csv")
        monkeypatch.setenv("DMS_THREADS", "1")
        assert main(["scan-detuning", "--config", cfg, "--output", out1,
                     "--no-figure"]) == 0
        monkeypatch.setenv("DMS_THREADS", "4")
        assert main(["scan-detuning", "--config", cfg, "--output", out2,
                     "--no-figure"]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()
