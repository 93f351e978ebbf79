import pytest

from singclass.cli import main
from singclass.report import SCHEMA_VERSION, parse, render
from singclass.errors import ConfigParseError


def run(args):
    return main(args)


class TestReportFormat:
    def test_roundtrip(self):
        entries = [
            ("schema_version", SCHEMA_VERSION),
            ("name", "whitney"),
            ("values", [1.0, -2.5, 3e-17]),
            ("flag", True),
            ("nothing", None),
            ("params", {"k": 2}),
        ]
        text = render(entries)
        back = parse(text)
        assert back["schema_version"] == SCHEMA_VERSION
        assert back["values"] == [1.0, -2.5, 3e-17]
        assert back["params"] == {"k": 2}
        assert back["flag"] is True and back["nothing"] is None

    def test_full_float_precision(self):
        x = 0.1 + 0.2
        text = render([("x", x)])
        assert parse(text)["x"] == x

    def test_parse_errors(self):
        with pytest.raises(ConfigParseError):
            parse("not an assignment\n")
        with pytest.raises(ConfigParseError):
            parse("a = 1\na = 2\n")
        with pytest.raises(ConfigParseError):
            parse("a = object()\n")


class TestClassifyCommand:
    def test_decisive_exit_and_report(self, tmp_path):
        out = tmp_path / "r.txt"
        code = run(["classify", "--gallery", "whitney", "--param", "k=2",
                    "--point", "0,0", "--out", str(out)])
        assert code == 0
        data = parse(out.read_text())
        assert data["result.kind"] == "KSingularity"
        assert data["result.k"] == 2
        assert data["result.route_agreement"] is True
        assert data["schema_version"] == SCHEMA_VERSION

    def test_indeterminate_exit_code(self, tmp_path):
        out = tmp_path / "r.txt"
        code = run(["classify", "--gallery", "eps_perturbed", "--param", "eps=0.00005",
                    "--point", "0,0", "--route", "fibering", "--out", str(out)])
        assert code == 2
        data = parse(out.read_text())
        assert data["result.kind"] == "Indeterminate"
        assert data["result.stage"] == "J_1"

    def test_error_exit_code(self):
        assert run(["classify", "--gallery", "nonexistent", "--point", "0,0"]) == 1
        assert run(["classify", "--gallery", "fold_t2", "--point", "0,0,0"]) == 1

    def test_projection_flag(self, tmp_path):
        out = tmp_path / "r.txt"
        code = run(["classify", "--gallery", "fold_t2", "--point", "0.3,0.7",
                    "--project", "--out", str(out)])
        assert code == 0
        data = parse(out.read_text())
        assert data["result.projected"] is True
        assert data["point"] == [0.0, 0.7]
        assert data["result.kind"] == "KSingularity"

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(
            "schema_version = 1\n"
            "problem.kind = 'gallery'\n"
            "problem.name = 'whitney'\n"
            "problem.params = {'k': 2, 'dimZ': 0}\n"
            "point = [0.0, 0.0]\n"
            "route = 'ls'\n"
        )
        out = tmp_path / "r.txt"
        code = run(["classify", "--config", str(cfg), "--route", "both", "--out", str(out)])
        assert code == 0
        data = parse(out.read_text())
        assert data["config.route"] == "both"
        assert data["result.k"] == 2

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("problem.kind = 'gallery'\nmystery_key = 3\n")
        assert run(["classify", "--config", str(cfg)]) == 1


class TestGalleryCommand:
    def test_machine_listing(self, capsys):
        assert run(["gallery", "--machine"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if l.startswith("name=")]
        names = {l.split()[0].split("=")[1] for l in lines}
        for expected in ("whitney", "family_kn", "fold_t2", "cusp_source_t3",
                         "l2_truncated", "eps_perturbed"):
            assert expected in names
        assert lines == sorted(lines)

    def test_kind_filter(self, capsys):
        assert run(["gallery", "--machine", "--kind", "MaximalKTransverse"]) == 0
        out = capsys.readouterr().out
        assert "family_kn" in out and "l2_truncated" in out
        assert "cusp_source_t3" not in out

    def test_human_listing_has_notes(self, capsys):
        assert run(["gallery"]) == 0
        out = capsys.readouterr().out
        assert "note:" in out


class TestVerifyCommand:
    def test_small_verify_passes(self, tmp_path):
        out = tmp_path / "v.txt"
        code = run(["verify", "--gallery", "whitney", "--param", "k=2",
                    "--trials", "5", "--seed", "7", "--out", str(out)])
        assert code == 0
        data = parse(out.read_text())
        assert data["passed"] is True
        assert data["rescale.failures"] == 0
        assert data["conjugate.failures"] == 0


class TestStrataCommand:
    def test_fold_projection_report(self, tmp_path):
        out = tmp_path / "s.txt"
        code = run(["strata", "--gallery", "fold_t2", "--point", "0.3,0.7",
                    "--stratum-h", "1", "--samples", "5", "--out", str(out)])
        assert code == 0
        data = parse(out.read_text())
        assert data["projected.point"] == [0.0, 0.7]
        assert data["membership.member"] is True
        assert data["sample.count"] == 5


class TestBvpCommand:
    def test_quartic_report(self, tmp_path):
        out = tmp_path / "b.txt"
        code = run(["bvp", "--bvp-n", "64", "--bvp-a", "[(1, 0.0, 1.0)]",
                    "--bvp-p", "[(0, 1.0, 0.0)]", "--out", str(out)])
        assert code == 0
        data = parse(out.read_text())
        assert data["result.kind"] == "KSingularity" and data["result.k"] == 3
        assert abs(data["oracle.J3_numeric"] - 24.0) < 1e-4


class TestDeterminism:
    def test_classify_reports_byte_identical(self, tmp_path):
        args = ["classify", "--gallery", "whitney", "--param", "k=3",
                "--point", "0,0,0", "--seed", "3"]
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_verify_reports_byte_identical(self, tmp_path):
        args = ["verify", "--gallery", "fold_t2", "--trials", "5", "--seed", "11"]
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestScenarioReports:
    def test_bvp_degenerate_case_reports_maximal(self, tmp_path):
        out = tmp_path / "b0.txt"
        code = run(["bvp", "--bvp-n", "64", "--bvp-a", "[(1, 0.0, 1.0)]",
                    "--out", str(out)])
        assert code == 0
        data = parse(out.read_text())
        assert data["result.kind"] == "MaximalKTransverse" and data["result.k"] == 2
        assert data["oracle.sigma3_over_sigma1"] < 1e-6

    def test_verify_reports_kernel_line_in_tangent(self, tmp_path):
        out = tmp_path / "v.txt"
        code = run(["verify", "--gallery", "family_kn", "--param", "k=2",
                    "--param", "n=0", "--param", "dimZ=0", "--trials", "5",
                    "--seed", "3", "--out", str(out)])
        assert code == 0
        data = parse(out.read_text())
        assert data["stratification.phi_in_tangent"] is True
        assert data["stratification.dichotomy_consistent"] is True


class TestUsageErrors:
    def test_bad_flag_exits_one(self):
        assert run(["classify", "--made-up-flag"]) == 1

    def test_unknown_command_exits_one(self):
        assert run(["frobnicate"]) == 1
