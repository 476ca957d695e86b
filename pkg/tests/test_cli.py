import json

import pytest

from wpva.cli import JobConfig, main, run

A1 = ["--type", "A1"]


def call(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def as_json(capsys, *args):
    code, out, _ = call(capsys, *args, "--format", "json")
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    return code, doc["result"]


def test_algebra_reports(capsys):
    code, r = as_json(capsys, "algebra", *A1)
    assert code == 0 and r["depth"] == "1" and r["Pi"] == ["e1"] and r["condition_F"]["pass"]
    code, r = as_json(capsys, "algebra", "--type", "A2")
    assert r["depth"] == "2" and len(r["grading"]["0"]) == 2
    code, r = as_json(capsys, "algebra", *A1, "--y", "0")
    assert code == 0 and r["condition_F"]["F2"] is False


def test_algebra_non_principal(capsys):
    code, r = as_json(capsys, "algebra", "--type", "C2", "--partition", "2,2", "--y", "e2_1 + 2*e0_1")
    assert r["condition_F"]["pass"] and r["nilpotent"] == "2,2"
    code, r = as_json(capsys, "algebra", "--type", "C2", "--partition", "2,2", "--scan-y")
    assert r["condition_F"]["pass"] and r["y"] != "0"


def test_wgen(capsys):
    code, r = as_json(capsys, "wgen", *A1, "--weight-max", "2")
    assert code == 0 and list(r["generators"]) == ["2"] and len(r["generators"]["2"]) == 1
    code, r = as_json(capsys, "wgen", *A1, "--weight-max", "0")
    assert r["generators"] == {} and r["kernel"] == {"0": {"basis": ["(1)"], "dim": 1}}
    code, r = as_json(capsys, "wgen", "--type", "A2", "--weight-max", "3")
    assert sorted(r["generators"]) == ["2", "3"]


def test_wgen_numeric_level(capsys):
    code, r = as_json(capsys, "wgen", *A1, "--weight-max", "2", "--level", "3/2")
    assert r["generators"]["2"] == ["(1) * h1[0]^2 + (3) * h1[1]"] and r["bad_k"] == []


def test_bracket(capsys):
    code, r = as_json(capsys, "bracket", "--type", "sl2", "--left", "e1", "--right", "f1")
    assert r["lambda_bracket"] == {"0": "(1) * h1[0]", "1": "(k)"}
    assert r["local_bracket"] == "∫ (1) * h1[0]"


@pytest.mark.parametrize("suite,extra", [("axioms", []), ("geometry", ["--N", "3"]),
                                          ("hierarchy", ["--weights", "2,4"])])
def test_verify_suites_pass(capsys, suite, extra):
    code, r = as_json(capsys, "verify", suite, *A1, *extra)
    assert code == 0 and r["pass"] and all(c["pass"] for c in r["checks"])


def test_hier(capsys):
    code, r = as_json(capsys, "hier", "--type", "A2", "--weights", "2,3")
    assert code == 0 and r["commuting"] and set(r["functionals"]) == {"2#0", "3#0"}


def test_text_output(capsys):
    code, out, _ = call(capsys, "verify", "axioms", *A1)
    assert "[PASS] jacobi affine(A1)" in out


@pytest.mark.parametrize("args", [
    ["algebra", "--type", "X7"],
    ["verify", "nonsense", *A1],
    ["algebra", *A1, "--y", "f1"],
    ["algebra", *A1, "--y", "2*"],
    ["wgen", *A1, "--weight-max", "-1"],
    ["verify", "geometry", *A1, "--N", "0"],
    ["algebra", "--type", "C2", "--partition", "3,1"],
    ["bracket", *A1, "--left", "q", "--right", "e1"],
    ["wgen", "--type", "A3", "--weight-max", "12"],
    ["algebra", *A1, "--level", "0"],
    ["frobnicate"],
    ["algebra"],
])
def test_usage_and_resource_errors_exit_2(capsys, args):
    code, out, err = call(capsys, *args)
    assert code == 2 and err


def test_failing_verification_exits_1(capsys, monkeypatch):
    import wpva.cli as cli

    def bad_suite(job):
        return [{"identity": "forced", "pass": False}]

    monkeypatch.setitem(cli.SUITES, "axioms", bad_suite)
    code, out, _ = call(capsys, "verify", "axioms", *A1)
    assert code == 1 and "[FAIL] forced" in out


def test_json_is_deterministic():
    cfg = dict(command="verify", type="A2", suite="axioms", fmt="json", seed=5, samples=5)
    a, _ = run(JobConfig(**cfg))
    b, _ = run(JobConfig(**cfg))
    assert a == b
    assert list(json.loads(a)) == ["command", "result", "schema_version"]


def test_threads_env_does_not_change_output(monkeypatch):
    cfg = dict(command="wgen", type="A2", fmt="json")
    monkeypatch.setenv("WPVA_THREADS", "1")
    a, _ = run(JobConfig(**cfg))
    monkeypatch.setenv("WPVA_THREADS", "4")
    b, _ = run(JobConfig(**cfg))
    assert a == b
