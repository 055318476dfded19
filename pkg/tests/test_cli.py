"""The qshadow command line."""

import subprocess
import sys

import pytest

from qshadow import category as cm
from qshadow import simplicial as sx
from qshadow.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def record(out: str) -> dict:
    return dict(line.split("=", 1) for line in out.strip().splitlines())


def test_category_validate(capsys):
    for name in ("semion", "trivial"):
        code, out, _ = run(capsys, "category", "validate", name)
        assert code == 0 and "result: PASS" in out


def test_category_validate_broken_file(capsys, tmp_path):
    text = cm.dumps(cm.builtin("semion")).replace("sixj 0 s s 0 s s -1", "sixj 0 s s 0 s s 1")
    path = tmp_path / "broken.cat"
    path.write_text(text)
    code, out, _ = run(capsys, "category", "validate", str(path))
    assert code == 1
    assert "biedenharn-elliott   FAIL" in out and "witness" in out


def test_category_info(capsys):
    code, out, _ = run(capsys, "category", "info", "fibonacci")
    assert code == 0 and "labels    0 tau" in out


def test_cy_text(capsys):
    code, out, _ = run(capsys, "cy", "s4.tri", "--category", "trivial")
    assert code == 0 and out.splitlines()[0] == "1"
    code, out, _ = run(capsys, "cy", "s4.tri", "--category", "semion", "--backend", "exact")
    assert code == 0 and out.splitlines()[0] == "1"


def test_cy_record(capsys):
    code, out, _ = run(capsys, "cy", "s4.tri", "--category", "semion", "--format", "record")
    rec = record(out)
    assert code == 0
    assert rec["invariant_exact"] == "1"
    assert float(rec["invariant_float_re"]) == 1.0 and float(rec["invariant_float_im"]) == 0.0
    assert rec["colorings"] == "1024"
    assert float(rec["seconds"]) >= 0


def test_cy_float_backend(capsys):
    code, out, _ = run(capsys, "cy", "s4.tri", "--category", "semion", "--backend", "float", "--format", "record")
    rec = record(out)
    assert code == 0 and rec["invariant_exact"] == "none" and rec["backend"] == "float"
    assert abs(float(rec["invariant_float_re"]) - 1) < 1e-9


def test_exact_backend_needs_exact_data(capsys):
    code, _, err = run(capsys, "cy", "s4.tri", "--category", "fibonacci", "--backend", "exact")
    assert code == 2 and "float" in err


def test_resource_guard(capsys):
    code, _, err = run(capsys, "cy", "cp2_9.tri", "--category", "fibonacci")
    assert code == 2
    assert "refused" in err and "2^84" in err


def test_compare_s4(capsys):
    code, out, _ = run(capsys, "compare", "s4.tri", "s2_0.shadow", "--category", "semion")
    assert code == 0 and out.strip().splitlines()[-1] == "PASS"


def test_compare_record(capsys):
    code, out, _ = run(capsys, "compare", "s4", "s2_0", "--category", "fibonacci", "--format", "record")
    rec = record(out)
    assert code == 0 and rec["result"] == "PASS"
    assert abs(float(rec["cy_invariant_float_re"]) - 1) < 1e-7


def test_compare_cp2_orientation_mismatch(capsys):
    code, out, _ = run(capsys, "compare", "cp2_9.tri", "s2_m1.shadow", "--category", "semion")
    lines = out.strip().splitlines()
    assert code == 1 and lines[-1] == "FAIL"
    assert "1*z^1" in lines[0] and "-1*z^3" in lines[1]


def test_shadow(capsys):
    code, out, _ = run(capsys, "shadow", "s2_p1.shadow", "--category", "semion")
    assert code == 0 and out.splitlines()[0] == "1*z^1"


def test_pachner_round_trip(capsys, tmp_path):
    a = tmp_path / "a.tri"
    code, _, _ = run(capsys, "pachner", "s4.tri", "1-5", "0", str(a))
    assert code == 0
    moved = sx.load(str(a))
    assert len(moved.facets) == 10
    b = tmp_path / "b.tri"
    code, _, _ = run(capsys, "pachner", str(a), "5-1", "6,", str(b))
    assert code == 0
    assert sx.isomorphic(sx.load(str(b)), sx.boundary_simplex())


def test_pachner_list_and_bad_site(capsys):
    code, out, _ = run(capsys, "pachner", "s4.tri", "1-5", "--list")
    assert code == 0 and len(out.splitlines()) == 6
    assert run(capsys, "pachner", "s4.tri", "2-4", "0")[0] == 2
    assert run(capsys, "pachner", "s4.tri", "1-5", "0,1,2,3,9")[0] == 2
    assert run(capsys, "pachner", "s4.tri", "1-5", "x")[0] == 2


@pytest.mark.parametrize("argv", [
    [],
    ["cy", "s4.tri"],
    ["cy", "missing.tri", "--category", "trivial"],
    ["cy", "s4.tri", "--category", "nonesuch"],
    ["cy", "s4.tri", "--category", "trivial", "--tol", "-1"],
    ["cy", "s4.tri", "--category", "trivial", "--threads", "0"],
    ["shadow", "s4.tri", "--category", "trivial"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_threads_flag_and_env(capsys, monkeypatch):
    monkeypatch.setenv("QSHADOW_THREADS", "2")
    a = run(capsys, "cy", "s4.tri", "--category", "pointed(3,1)", "--format", "record")
    b = run(capsys, "cy", "s4.tri", "--category", "pointed(3,1)", "--threads", "1", "--format", "record")
    ra, rb = record(a[1]), record(b[1])
    assert ra["invariant_exact"] == rb["invariant_exact"] == "1"
    assert ra["colorings"] == rb["colorings"] == str(3 ** 10)


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "qshadow.cli", "cy", "s4.tri", "--category", "trivial"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.splitlines()[0] == "1"
