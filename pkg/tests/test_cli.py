import json
import math
import subprocess
import sys

import numpy as np
import pytest

from harmlab.boundary import ClosedForm, save_boundary_csv
from harmlab.cli import build_parser, main, parse_stolz


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_t36a(capsys):
    code, out, _ = run(["verify", "--map", "shear:k=1", "--identity", "arg_fp", "--theta0", "1.0472",
                        "--alpha", "2", "--slopes", "0,1,-1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["per_slope"]) == 3
    assert all(p["residual_mod_pi"] < 1e-6 for p in doc["per_slope"])


def test_decompose_round_trip(tmp_path, capsys):
    csv = save_boundary_csv(ClosedForm(lambda t: np.exp(1j * t) + 0.25 * np.exp(-2j * t)), tmp_path / "phi.csv")
    out = tmp_path / "map.json"
    code, _, _ = run(["decompose", "--boundary", str(csv), "--degree", "128", "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["degree"] == 128
    assert abs(complex(*doc["a"][1]) - 1) < 1e-10
    assert abs(complex(*doc["b"][1]) - 0.25) < 1e-10


def test_zeros_square(capsys):
    code, out, _ = run(["zeros", "--map", "square", "--stolz", "0:2", "--ladder", "0.3,0.1,0.03"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert {"map", "stolz", "ladder", "counts", "stabilized", "fprime_zeros"} <= set(doc)
    assert doc["stabilized"] and doc["counts"] == [0, 0, 0]


def test_zeros_shear_reports_counts(capsys):
    code, out, _ = run(["zeros", "--map", "shear:k=0.5", "--stolz", "deg:0:2", "--ladder", "0.3,0.1,0.03"], capsys)
    doc = json.loads(out)
    assert doc["counts"] == [1, 1, 1] and doc["fprime_zeros"] == []


def test_strict_exit_code(capsys):
    args = ["verify", "--map", "poly:a=[0,1];b=[0]", "--identity", "arg_hp.sloped.tilted", "--slopes", "0"]
    assert run(args, capsys)[0] == 0
    assert run(args + ["--strict"], capsys)[0] == 2


def test_error_exit_code(capsys):
    code, _, err = run(["eval", "--map", "nosuch", "--z", "0.1"], capsys)
    assert code == 1 and "UnknownGallery" in err
    code, _, err = run(["eval", "--map", "shear:k=0.5", "--z", "1.5"], capsys)
    assert code == 1 and "OutsideDisk" in err
    code, _, _ = run(["decompose", "--boundary", "/nonexistent/phi.csv"], capsys)
    assert code == 1


def test_usage_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--bogus"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 64


def test_eval_output(capsys):
    code, out, _ = run(["eval", "--map", "shear:k=0.5", "--z", "0.4,0.1+0.2i"], capsys)
    doc = json.loads(out)
    p = doc["points"][0]
    assert p["omega"] == [pytest.approx(0.2), 0.0]
    assert p["jacobian"] == pytest.approx(0.96)


def test_path_modes(tmp_path, capsys):
    code, out, _ = run(["path", "--mode", "closed", "--a", "0", "--c", "0.05", "--steps", "4"], capsys)
    lines = out.strip().splitlines()
    assert lines[0] == "r,theta" and len(lines) == 6
    r, th = map(float, lines[1].split(","))
    assert r == 0.5 and th == pytest.approx(0.1)
    code, out, _ = run(["path", "--mode", "ode", "--branch", "general", "--c", "0.04", "--phi", "0.2",
                        "--steps", "100"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 102
    code, out, _ = run(["path", "--mode", "compare", "--a", "0.01", "--c", "0.02"], capsys)
    doc = json.loads(out)
    assert doc["max_abs_deviation"] <= doc["smallangle_bound"]


def test_path_arcsin_error(capsys):
    code, _, err = run(["path", "--mode", "closed", "--branch", "general", "--c", "0.7"], capsys)
    assert code == 1 and "ArcsinDomain" in err


def test_render_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for target in (a, b):
        code, out, _ = run(["render", "--map", "shear:k=0.5", "--grid", "6x12", "--out", str(target)], capsys)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(out)
    assert doc["boundary_simple"] and doc["boundary_convex"]


def test_repeat_runs_identical(capsys):
    args = ["verify", "--map", "shear:k=0.5", "--identity", "arg_fp", "--theta0", "deg:90"]
    assert run(args, capsys)[1] == run(args, capsys)[1]


def test_stolz_syntax():
    s = parse_stolz("deg:90:2")
    assert s.theta0 == pytest.approx(math.pi / 2) and s.alpha == 2
    assert parse_stolz("1.5:3").theta0 == 1.5


def test_help_lists_defaults():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    assert set(sub) == {"decompose", "eval", "verify", "zeros", "path", "render"}
    text = " ".join(sub["zeros"].format_help().split())
    assert "(default: 0.1,0.05,0.02)" in text
    assert "(default: 0:2)" in text
    assert "(default: 0.999)" in " ".join(sub["render"].format_help().split())


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "harmlab.cli", "path", "--mode", "compare"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "smallangle_bound" in res.stdout
