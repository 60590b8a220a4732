import json

import pytest
from conftest import NONCOMMUTATIVE_WITH_DIFFERENTIAL, NOT_LEIBNIZ, S2_DOCUMENT

from loopalg import LoopAlgError
from loopalg.cli import run_command


@pytest.fixture
def run(no_user_config, capsys):
    def run(*argv):
        code, report = run_command(list(argv))
        out, err = capsys.readouterr()
        return code, report, out, err

    return run


@pytest.fixture
def leibniz_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(NOT_LEIBNIZ)
    return path


def test_validate_builtin(run):
    code, report, out, _ = run("validate", "--builtin", "sphere:2", "--format", "json")
    assert code == 0
    document = json.loads(out)
    assert document["schema"] == 1
    assert document["algebra"]["generators"] == [{"label": "u", "degree": 2}]
    assert document["sections"]["validation"]["valid"] is True
    assert document["diagnostics"] == {
        "characteristic_caveat": False,
        "theorem_violations": [],
        "skipped": False,
    }


def test_validate_file(run, tmp_path):
    path = tmp_path / "s2.json"
    path.write_text(S2_DOCUMENT)
    code, _, out, _ = run("validate", "--algebra", str(path))
    assert code == 0
    assert out.startswith("S2 over")


def test_validate_leibniz_violation(run, leibniz_file):
    code, _, out, _ = run("validate", "--algebra", str(leibniz_file))
    assert code == 2
    assert "leibniz: (x, x)" in out

    code, _, out, _ = run("validate", "--algebra", str(leibniz_file), "--format", "json")
    assert code == 2
    (violation,) = json.loads(out)["sections"]["validation"]["violations"]
    assert violation["kind"] == "leibniz"
    assert violation["elements"] == ["x", "x"]


def test_invalid_algebra_skips_sections(run, leibniz_file):
    code, report, out, _ = run(
        "loop-homology", "--algebra", str(leibniz_file), "--format", "json"
    )
    assert code == 2
    document = json.loads(out)
    assert document["diagnostics"]["skipped"] is True
    assert list(document["sections"]) == ["validation"]


@pytest.mark.parametrize(
    "argv",
    [
        ("validate", "--builtin", "cp:2"),
        ("loop-homology", "--builtin", "sphere:3", "--max-degree", "6"),
        ("omega-homology", "--builtin", "cp:2", "--max-degree", "6"),
        ("intersection", "--builtin", "sphere:2", "--max-degree", "5", "--lift-check"),
        ("hochschild", "--builtin", "sphere:2", "--coefficients", "self", "--max-degree", "5"),
        ("hochschild", "--builtin", "sphere:2", "--coefficients", "trivial", "--max-degree", "5"),
        ("hochschild", "--builtin", "sphere:3", "--coefficients", "dual", "--max-degree", "5"),
        ("e2", "--builtin", "cp:2", "--max-degree", "5"),
        ("examples",),
    ],
)
def test_every_command_is_deterministic(run, argv):
    first = run(*argv, "--format", "json")
    second = run(*argv, "--format", "json")
    assert first[0] == second[0] == 0
    assert first[2] == second[2]
    assert json.loads(first[2])["schema"] == 1


def test_json_is_deterministic(run):
    argv = ("loop-homology", "--builtin", "sphere:3", "--max-degree", "6", "--format", "json")
    first = run(*argv)[2]
    second = run(*argv)[2]
    assert first == second
    ring = json.loads(first)["sections"]["loop_homology"]
    assert ring["window"] == [-3, 6]
    assert ring["shift"] == 3
    assert ring["unit"] == "1"
    assert ["v", "v", "c", "1"] in ring["products"]


def test_table_output(run):
    code, _, out, _ = run("omega-homology", "--builtin", "cp:2", "--max-degree", "6")
    assert code == 0
    assert "Homology of the based loop space" in out
    assert "h1_0" in out


@pytest.mark.parametrize(
    "argv",
    [
        ("loop-homology", "--builtin", "sphere:2", "--max-degree", "40"),
        ("loop-homology", "--builtin", "sphere:2", "--max-degree", "8", "--degree-cap", "6"),
        ("loop-homology", "--builtin", "sphere:2", "--max-degree", "2", "--min-degree", "2"),
        ("validate", "--builtin", "torus:2"),
        ("validate", "--builtin", "sphere:2", "--field", "4"),
        ("validate", "--builtin", "sphere:2", "--field", "r"),
        ("validate", "--builtin", "sphere:2", "--algebra", "x.json"),
        ("validate",),
        ("homotopy", "--builtin", "sphere:2"),
        ("validate", "--builtin", "sphere:2", "--frobnicate"),
        ("hochschild", "--builtin", "sphere:2", "--coefficients", "twisted"),
    ],
)
def test_usage_errors(run, argv):
    code, report, out, err = run(*argv)
    assert code == 64
    assert report is None
    assert out == ""
    assert err


def test_empty_window_is_usage_error(run):
    code, *_ = run("omega-homology", "--builtin", "sphere:3", "--max-degree", "0", "--min-degree", "-1")
    assert code == 64


def test_missing_file(run, tmp_path):
    code, report, _, err = run("validate", "--algebra", str(tmp_path / "missing.json"))
    assert code == 66
    assert "cannot load algebra" in err


def test_malformed_file(run, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{")
    assert run("validate", "--algebra", str(path))[0] == 66


def test_missing_config(run, tmp_path):
    code, *_ = run("validate", "--builtin", "sphere:2", "--config", str(tmp_path / "none.yaml"))
    assert code == 66


def test_config_unknown_keys(run, tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("max_degree: 4\ncolour: blue\n")
    assert run("validate", "--builtin", "sphere:2", "--config", str(path))[0] == 64


def test_config_defaults(run, tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("max_degree: 5\nformat: json\nfield: 3\n")
    code, _, out, _ = run("loop-homology", "--builtin", "sphere:2", "--config", str(path))
    assert code == 0
    document = json.loads(out)
    assert document["config"]["max_degree"] == 5
    assert document["config"]["field"] == {"fp": 3}
    assert document["algebra"]["field"] == {"fp": 3}

    code, _, out, _ = run(
        "loop-homology", "--builtin", "sphere:2", "--config", str(path), "--max-degree", "4"
    )
    assert json.loads(out)["config"]["max_degree"] == 4


def test_user_config(no_user_config, capsys):
    (no_user_config / "absent.yaml").write_text("format: json\n")
    code, _ = run_command(["validate", "--builtin", "sphere:3"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["schema"] == 1


def test_examples(run):
    code, report, out, _ = run("examples", "--format", "json")
    assert code == 0
    assert report is None
    document = json.loads(out)
    assert document["schema"] == 1
    names = {name for entry in document["examples"] for name in entry["names"]}
    assert {"sphere", "cp", "connected-sum-s3x3"} <= names

    code, _, out, _ = run("examples")
    assert code == 0
    assert "usage" in out


def test_output_file(run, tmp_path):
    path = tmp_path / "report.json"
    code, report, out, _ = run(
        "validate", "--builtin", "cp:2", "--format", "json", "--output", str(path)
    )
    assert code == 0
    assert out == ""
    assert json.loads(path.read_text(encoding="utf-8")) == json.loads(
        run("validate", "--builtin", "cp:2", "--format", "json")[2]
    )


def test_unwritable_output(run, tmp_path):
    code, report, _, _ = run(
        "validate", "--builtin", "cp:2", "--output", str(tmp_path / "no" / "such" / "dir")
    )
    assert code == 66
    assert report is not None


def test_timings(run):
    code, _, out, _ = run(
        "loop-homology", "--builtin", "sphere:2", "--max-degree", "4", "--format", "json", "--timings"
    )
    assert code == 0
    timings = json.loads(out)["timings"]
    assert {"validation", "cobar", "loop_homology"} <= set(timings)
    assert all(t >= 0 for t in timings.values())

    code, _, out, _ = run("validate", "--builtin", "sphere:2", "--timings")
    assert "seconds" in out


def test_intersection(run):
    code, report, out, _ = run(
        "intersection", "--builtin", "sphere:3", "--max-degree", "6", "--format", "json", "--lift-check"
    )
    assert code == 0
    document = json.loads(out)
    sections = document["sections"]
    assert sections["chain_map"] == {"commutes": True}
    assert sections["intersection"]["map"]["c"] == "v^2"
    assert sections["lift_check"] == {"lifts": {"1": True, "v": True, "v^2": True}}
    assert sections["surjectivity"]["surjective_throughout_window"] is True
    assert sections["centrality"]["central"] is True
    assert sections["nilpotency"]["respected"] is True
    assert document["diagnostics"]["theorem_violations"] == []


def test_intersection_table(run):
    code, _, out, _ = run("intersection", "--builtin", "sphere:2", "--max-degree", "6")
    assert code == 0
    assert "surjective throughout window: False" in out
    assert "I = 0 in all degrees" not in out


def test_lift_check_over_prime_field(run):
    code, _, out, _ = run(
        "intersection",
        "--builtin",
        "sphere:2",
        "--field",
        "fp:2",
        "--max-degree",
        "4",
        "--format",
        "json",
        "--lift-check",
    )
    assert code == 0
    lifts = json.loads(out)["sections"]["lift_check"]["lifts"]
    assert all(lifts.values())


def test_hochschild_coefficients(run):
    code, _, out, _ = run(
        "hochschild",
        "--builtin",
        "sphere:2",
        "--coefficients",
        "trivial",
        "--max-degree",
        "5",
        "--format",
        "json",
    )
    assert code == 0
    document = json.loads(out)
    assert document["config"]["coefficients"] == "trivial"
    ring = document["sections"]["hochschild"]
    assert ring["coefficients"] == "k"
    assert ring["products"] == []


def test_hochschild_dual(run):
    code, _, out, _ = run(
        "hochschild", "--builtin", "sphere:3", "--coefficients", "dual", "--max-degree", "4"
    )
    assert code == 0
    assert "coefficients A^" in out


def test_e2(run):
    code, _, out, _ = run("e2", "--builtin", "cp:2", "--max-degree", "4", "--format", "json")
    assert code == 0
    assert "e2" in json.loads(out)["sections"]


def test_e2_not_supported(run, tmp_path):
    path = tmp_path / "skew.json"
    path.write_text(NONCOMMUTATIVE_WITH_DIFFERENTIAL)
    code, report, _, err = run("e2", "--algebra", str(path))
    assert code == 2
    assert err


def test_characteristic_caveat(run):
    code, _, out, _ = run("validate", "--builtin", "sphere:3", "--field", "3")
    assert code == 0
    assert "caveat: characteristic 3" in out


@pytest.mark.slow
def test_connected_sum_intersection_vanishes(run):
    code, _, out, _ = run(
        "intersection", "--builtin", "connected-sum-s3x3", "--max-degree", "3", "--min-degree", "2"
    )
    assert code == 0
    assert "I = 0 in all degrees ≥ 1" in out


def test_construction_error(run):
    # connected sums need equal formal dimensions
    code, report, out, err = run("validate", "--builtin", "connected-sum(sphere:3,sphere:4)")
    assert code == 2
    assert report is None
    assert out == ""
    assert err


def test_library_error_is_invalid(run, monkeypatch):
    def fail(config, algebra):
        raise LoopAlgError("unexpected")

    monkeypatch.setattr("loopalg.cli.build_report", fail)
    code, report, _, err = run("loop-homology", "--builtin", "sphere:2")
    assert code == 2
    assert report is None
    assert "unexpected" in err


@pytest.mark.parametrize(
    "argv, section, window",
    [
        (("loop-homology",), "loop_homology", [-2, 4]),
        (("e2",), "e2", [-2, 4]),
        (("omega-homology",), "omega_homology", [0, 4]),
        (("hochschild", "--coefficients", "self"), "hochschild", [-2, 4]),
        (("hochschild", "--coefficients", "trivial"), "hochschild", [0, 4]),
        (("hochschild", "--coefficients", "dual"), "hochschild", [0, 4]),
    ],
)
def test_default_min_degree(run, argv, section, window):
    code, _, out, _ = run(*argv, "--builtin", "sphere:2", "--max-degree", "4", "--format", "json")
    assert code == 0
    assert json.loads(out)["sections"][section]["window"] == window
