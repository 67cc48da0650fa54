import json

import pytest

from loopweight.cli import main, parse_descriptor, parse_generator, parse_window
from loopweight.representations import EFLModule, FusionProduct
from loopweight.scalar import SpectralParam


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_helpers():
    assert parse_window("-1..3") == (-1, 3)
    assert parse_generator("x+:0:1") == ("x+", 0, 1, 1)
    assert parse_generator("x-:2:-3") == ("x-", 2, -1, -3)
    assert parse_generator("phi:1:-2") == ("phi", 1, -1, 2)
    M = parse_descriptor("EFL(ell=2, a=a0*q^-1)")
    assert isinstance(M, EFLModule) and M.a == SpectralParam("a0", -1)
    F = parse_descriptor("FUSE(EFL(ell=1,a=a0),EFL(ell=1,a=a0),ratio=q^-2)")
    assert isinstance(F, FusionProduct)
    assert F.modules[1].a == SpectralParam("a0", 2)


def test_generic_ratio_reuses_symbol():
    F1 = parse_descriptor("FUSE(EFL(ell=1,a=a0),EFL(ell=1,a=a0),ratio=generic)")
    F2 = parse_descriptor("FUSE(EFL(ell=2,a=a0),EFL(ell=2,a=a0),ratio=generic)")
    assert F1.modules[1].a == F2.modules[1].a == SpectralParam("g1")


def test_qchar_json(capsys, tmp_path):
    out_file = tmp_path / "chi.json"
    code, out, _ = run(capsys, "qchar", "EFL(ell=1,a=a0)", "--window", "-1..3", "--format", "json",
                       "--out", str(out_file))
    assert code == 0
    payload = json.loads(out)
    assert payload["terms"] == 5
    assert payload["window"] == [-1, 3]
    assert json.loads(out_file.read_text()) == payload


def test_qchar_rect_contains_generator_monomial(capsys):
    code, out, _ = run(capsys, "qchar", "RECT(ell=1,k=2,a=a0)", "--window", "1..2")
    assert code == 0
    # m of T^e for 1 x 2: box(1)_{a0} box(1)_{a0 q^2}
    assert "Y_{0,a0 q^1}^{-1} Y_{0,a0 q^3}^{-1} Y_{1,a0} Y_{1,a0 q^2}" in out.splitlines()


def test_act_examples(capsys):
    code, out, _ = run(capsys, "act", "VEC(a=a0)", "x-:1:0", "[1]")
    assert code == 0 and out.strip() == "1·[2]@a0"
    code, out, _ = run(capsys, "act", "EFL(ell=2,a=a0)", "x+:0:1", "(1<2)")
    assert code == 0 and out.strip() == "q*a0·(0<2)@a0"
    code, out, _ = run(capsys, "act", "EFL(ell=1,a=a0)", "phi:0:+0", "(1)")
    assert code == 0 and out.strip() == "q^-1·(1)@a0"


def test_act_on_fusion_vector(capsys):
    code, out, _ = run(capsys, "act", "FUSE(VEC(a=a0),VEC(a=a0*q^-2))", "x-:2:0", "[1] x [2]", "--format", "json")
    assert code == 0
    res = json.loads(out)["result"]
    assert [t["vector"] for t in res] == ["[1]@a0 ⊗ [3]@a0*q^-2"]


def test_usage_errors(capsys):
    code, _, err = run(capsys, "qchar", "EFL(ell=0,a=a0)")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "qchar", "NOPE(a=a0)")
    assert code == 2
    code, _, err = run(capsys, "act", "VEC(a=a0)", "x-:1:0", "[99x]")
    assert code == 2
    code, _, err = run(capsys, "act", "VEC(a=a0)", "y:1:0", "[1]")
    assert code == 2
    code, _, _ = run(capsys, "fold", "EFL(ell=1,a=a0)", "--n", "1")
    assert code == 2
    code, _, _ = run(capsys, "verify", "fusion-poles")
    assert code == 2
    code, _, _ = run(capsys, "qchar", "EFL(ell=1,a=a0)", "--param", "q")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "no-such-suite"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_fusion_undefined_exit(capsys):
    code, _, err = run(capsys, "verify", "relations", "FUSE(EFL(ell=1,a=a0),EFL(ell=1,a=a0),ratio=q^0)",
                       "--window", "-1..2", "--modes", "1", "--all-vectors")
    assert code == 3 and "undefined" in err


def test_verify_relations_pass(capsys):
    code, out, _ = run(capsys, "verify", "relations", "EFL(ell=1,a=a0)", "--window", "0..2", "--modes", "1")
    assert code == 0 and out.startswith("PASS relations")


def test_verify_fusion_poles(capsys):
    code, out, _ = run(capsys, "verify", "fusion-poles", "--ell", "2", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "pass"
    assert [r["d"] for r in rep["details"]["scan"] if not r["defined"]] == [-2, 0, 2]


def test_verify_connected_fails_at_boundary(capsys):
    code, out, _ = run(capsys, "verify", "connected", "FUSE(EFL(ell=1,a=a0),EFL(ell=1,a=a0),ratio=q^-2)",
                       "--window", "0..2", "--all-vectors", "--format", "json")
    assert code == 1
    assert json.loads(out)["details"]["components"] == 2


@pytest.mark.parametrize("suite,extra", [
    ("thin", ["EFL(ell=2,a=a0)"]),
    ("integrable", ["RECT(ell=1,k=2,a=a0)"]),
    ("extremal", ["EFL(ell=2,a=a0)", "--depth", "2"]),
    ("qchar", ["EFL(ell=2,a=a0)"]),
    ("crystal-iso", ["--ell", "2"]),
    ("column-iso", ["--ell", "2", "--modes", "1"]),
    ("two-construction", ["--ell", "1", "--modes", "1"]),
])
def test_verify_suites_pass(capsys, suite, extra):
    code, out, _ = run(capsys, "verify", suite, *extra, "--window", "-1..3")
    assert code == 0, out


def test_fold_round_trip(capsys, tmp_path):
    path = tmp_path / "chi.json"
    code, _, _ = run(capsys, "qchar", "EFL(ell=1,a=a0)", "--window", "-2..4", "--out", str(path))
    assert code == 0
    code, out, _ = run(capsys, "fold", "--qchar", str(path), "--n", "2", "--format", "json")
    assert code == 0
    folded = json.loads(out)
    assert folded["terms"] == 7 and folded["window"] == [-2, 4]
    code, out, _ = run(capsys, "verify", "folded", "--qchar", str(path), "--n", "2")
    assert code == 0 and out.startswith("PASS folded")
    code, out2, _ = run(capsys, "verify", "folded", "EFL(ell=1,a=a0)", "--window", "-2..4", "--n", "2")
    assert code == 0 and out2.splitlines()[0] == out.splitlines()[0]


def test_orbit(capsys):
    code, out, _ = run(capsys, "orbit", "EFL(ell=1,a=a0)", "--window", "0..2", "--depth", "1")
    assert code == 0
    assert "(0)" in out.split() and "(1)" in out.split()
