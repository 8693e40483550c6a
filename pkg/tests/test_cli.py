import json
import math

import pytest

from piezoband.cli import main
from piezoband.materials import default_cell, serialize_material_file
from piezoband.quasistatic import special_capacitances


@pytest.fixture()
def material_file(tmp_path):
    path = tmp_path / "cell.mat"
    path.write_text(serialize_material_file(default_cell()), encoding="utf-8")
    return str(path)


def interior_gamma_text():
    c_inf, c_zero = special_capacitances(default_cell())
    return f"{0.5 * (c_inf + c_zero):.17g}"


class TestEffective:
    def test_report_fields(self, capsys):
        assert main(["effective"]) == 0
        out = capsys.readouterr().out
        assert "regime: positive" in out
        assert "c_eff [Pa]: 101860664600.53964" in out
        assert "v_eff [m/s]: 4513.5499244062794" in out
        assert "C0/S [F/m^2]: -1.7660085470085467e-05" in out
        assert "Cinf/S [F/m^2]: -1.5847552083333333e-05" in out

    def test_negative_regime_report(self, capsys):
        assert main(["effective", f"--c-over-s={interior_gamma_text()}"]) == 0
        out = capsys.readouterr().out
        assert "regime: negative" in out
        assert "undefined (regime: negative)" in out

    def test_sweep_csv_structure(self, tmp_path, capsys):
        out_file = tmp_path / "ceff.csv"
        assert main(["effective", "--sweep", "--out", str(out_file)]) == 0
        capsys.readouterr()
        lines = out_file.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "c_over_s [F/m^2],c_eff [Pa],regime [-]"
        rows = [line.split(",") for line in lines[1:]]
        regimes = [r[2] for r in rows]
        # Exactly one pole marker and one zero marker from the inserted
        # special capacitances.
        assert regimes.count("pole") == 1
        assert regimes.count("zero") == 1
        # Exactly one sign change among consecutive finite samples that is
        # not accounted for by the pole (the crossing through zero).
        values = [(float(r[1]), r[2]) for r in rows]
        changes_at_pole = 0
        changes_elsewhere = 0
        for (va, ra), (vb, rb) in zip(values[:-1], values[1:]):
            if "pole" in (ra, rb) or "zero" in (ra, rb):
                continue
            if math.isfinite(va) and math.isfinite(vb) and va * vb < 0:
                changes_elsewhere += 1
        for i, (v, r) in enumerate(values):
            if r == "pole" and 0 < i < len(values) - 1:
                changes_at_pole += int(values[i - 1][0] * values[i + 1][0] < 0)
            if r == "zero" and 0 < i < len(values) - 1:
                assert values[i - 1][0] * values[i + 1][0] < 0
        assert changes_elsewhere == 0
        assert changes_at_pole == 1

    def test_bad_sweep_spec(self, capsys):
        assert main(["effective", "--sweep", "1:2"]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "input"

    def test_sweep_grid_collision_with_special_keeps_one_marker(self, tmp_path, capsys):
        # A sweep range whose endpoint sits exactly on the pole capacitance
        # must still emit exactly one pole-marked row.
        c_inf, _ = special_capacitances(default_cell())
        out_file = tmp_path / "ceff.csv"
        spec = f"{c_inf:.17g}:0:11"
        assert main(["effective", f"--sweep={spec}", "--out", str(out_file)]) == 0
        capsys.readouterr()
        rows = out_file.read_text(encoding="utf-8").splitlines()[1:]
        assert sum(r.endswith(",pole") for r in rows) == 1
        gammas = [float(r.split(",")[0]) for r in rows]
        assert len(gammas) == len(set(gammas))

    def test_sweep_stdout_is_pure_csv(self, capsys):
        assert main(["effective", "--sweep"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("c_over_s [F/m^2],")
        assert "regime: " not in out


class TestBands:
    def test_open_circuit_first_row_is_origin(self, tmp_path, capsys):
        out = tmp_path / "bands.csv"
        assert main(["bands", "--k-points", "60", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "branch_index,K*T/pi [-],omega [rad/s],f [Hz],group_velocity [m/s]"
        first = lines[1].split(",")
        assert first[0] == "1" and float(first[1]) == 0.0 and float(first[2]) == 0.0

    def test_detached_first_branch_inside_interval(self, tmp_path):
        out = tmp_path / "bands.csv"
        assert main([
            "bands", f"--c-over-s={interior_gamma_text()}", "--k-points", "60",
            "--out", str(out),
        ]) == 0
        rows = [l.split(",") for l in out.read_text(encoding="utf-8").splitlines()[1:]]
        branch1 = [float(r[2]) for r in rows if r[0] == "1"]
        assert min(branch1) > 0.0

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["bands", "--c-over-s=-11uF/m2", "--k-points", "80"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_short_top_branch_gets_nan_group_velocity(self, tmp_path):
        # An omega_max that clips the top branch to fewer than 5 samples
        # leaves its group-velocity column as nan instead of failing.
        out = tmp_path / "bands.csv"
        assert main(["bands", "--k-points", "40", "--omega-max=2.5586e7 rad/s",
                     "--out", str(out)]) == 0
        rows = [l.split(",") for l in out.read_text(encoding="utf-8").splitlines()[1:]]
        top = [r for r in rows if r[0] == max(r2[0] for r2 in rows)]
        assert 0 < len(top) < 5
        assert all(r[4] == "nan" for r in top)

    def test_material_file_and_unit_flags(self, material_file, tmp_path):
        out = tmp_path / "bands.csv"
        code = main([
            "bands", "--material", material_file, "--c-over-s=-11 uF/m2",
            "--k-points", "40", "--omega-max", "1 MHz", "--out", str(out),
        ])
        assert code == 0
        rows = out.read_text(encoding="utf-8").splitlines()[1:]
        assert all(float(r.split(",")[2]) <= 2e6 * math.pi for r in rows)


class TestStopbands:
    def test_quasistatic_flag_row(self, tmp_path):
        out = tmp_path / "sb.csv"
        assert main(["stopbands", f"--c-over-s={interior_gamma_text()}", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "omega_lo [rad/s],omega_hi [rad/s],quasistatic_flag [-]"
        first = lines[1].split(",")
        assert float(first[0]) == 0.0 and first[2] == "true"

    def test_open_circuit_first_row_above_zero(self, tmp_path):
        out = tmp_path / "sb.csv"
        assert main(["stopbands", "--out", str(out)]) == 0
        first = out.read_text(encoding="utf-8").splitlines()[1].split(",")
        assert float(first[0]) > 0.0 and first[2] == "false"

    def test_matched_cell_empty_table(self, tmp_path):
        matched = tmp_path / "matched.mat"
        matched.write_text(
            "elastic.rho = 2500\nelastic.c = 75 GPa\nelastic.d = 1 mm\n"
            "piezo.rho = 2500\npiezo.cE = 75 GPa\npiezo.e = 0\n"
            "piezo.eps = 1e-8 F/m\npiezo.d = 1.3 mm\ncircuit.c_over_s = 0\n",
            encoding="utf-8",
        )
        out = tmp_path / "sb.csv"
        assert main(["stopbands", "--material", str(matched), "--out", str(out)]) == 0
        assert out.read_text(encoding="utf-8").splitlines()[1:] == []


class TestSweep:
    def test_default_sweep_count_and_manifest(self, tmp_path):
        out_dir = tmp_path / "sweep"
        assert main(["sweep", "--k-points", "40", "--out", str(out_dir)]) == 0
        csvs = sorted(p.name for p in out_dir.glob("*.csv"))
        assert len(csvs) == 10  # 9 panels + the open-circuit reference
        assert "reference_c0.csv" in csvs
        manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["tool"] == "piezoband"
        assert len(manifest["panels"]) == 9
        assert manifest["panels"][0]["c_over_s"] == 0.0
        assert manifest["settings"]["k_points"] == 40
        assert manifest["reference"]["file"] == "reference_c0.csv"

    def test_rerun_is_byte_identical(self, tmp_path):
        args = ["sweep", "--values", "0,-11uF/m2", "--k-points", "40"]
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(dir_a)]) == 0
        assert main(args + ["--out", str(dir_b)]) == 0
        for name in ("bands_00.csv", "bands_01.csv", "reference_c0.csv", "manifest.json"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

    def test_flat_panel_is_detected(self, cell, tmp_path):
        from piezoband.band_structure import find_flat_capacitance

        c_star = find_flat_capacitance(cell, (-16.5e-6, -16.2e-6), k_points=120)
        out_dir = tmp_path / "sweep"
        code = main([
            "sweep", "--values", f"0,{c_star:.17g}", "--k-points", "120",
            "--out", str(out_dir),
        ])
        assert code == 0
        manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["panels"][1]["flat_branch_indices"] == [1]
        assert manifest["panels"][0]["flat_branch_indices"] == []


class TestErrorHandling:
    def test_missing_field_names_it_with_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.mat"
        bad.write_text("elastic.rho = 2500\n", encoding="utf-8")
        assert main(["effective", "--material", str(bad)]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "input"
        assert "elastic.c" in err["message"]

    def test_invalid_value_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.mat"
        bad.write_text(
            serialize_material_file(default_cell()).replace(
                "elastic.d = 0.001", "elastic.d = 0"
            ),
            encoding="utf-8",
        )
        assert main(["effective", "--material", str(bad)]) == 2
        err = json.loads(capsys.readouterr().err)
        assert "elastic.d" in err["message"]

    def test_unknown_unit_exit_2(self, capsys):
        assert main(["bands", "--c-over-s=1 parsec", "--out", "-"]) == 2
        assert json.loads(capsys.readouterr().err)["error"] == "input"

    def test_numerical_error_exit_3(self, capsys):
        # A same-sign flat-band bracket is a numerical precondition failure.
        from piezoband.band_structure import BracketError
        from piezoband.cli import _fail

        assert _fail("numerical", 3, BracketError("no sign change")) == 3
        err = json.loads(capsys.readouterr().err)
        assert err == {"error": "numerical", "message": "no sign change", "type": "BracketError"}

    def test_missing_file_exit_2(self, capsys):
        assert main(["effective", "--material", "/nonexistent.mat"]) == 2
        assert json.loads(capsys.readouterr().err)["error"] == "input"
