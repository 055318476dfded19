"""Builtin categories, the identity suite and the text format."""

import cmath
import math

import pytest

from qshadow import category as cm
from qshadow.scalar import CycloField

BUILTINS = ["trivial", "semion", "pointed(2,0)", "pointed(3,0)", "pointed(3,1)", "fibonacci", "ising"]
MODULAR = ["semion", "fibonacci", "ising"]
PHI = (1 + 5 ** 0.5) / 2


def cx(x) -> complex:
    return complex(x.to_complex())


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_passes_full_suite(name):
    rep = cm.validate(cm.builtin(name))
    assert rep.ok, rep.format()
    assert not rep.structural


@pytest.mark.parametrize("name", BUILTINS)
def test_global_dimension(name):
    c = cm.builtin(name)
    total = sum(abs(cx(d)) ** 2 for d in c.dim)
    assert abs(cx(c.D) ** 2 - total) < 1e-9
    assert c.D.literal() and cx(c.D).real > 0


def test_trivial():
    c = cm.builtin("trivial")
    assert c.size == 1 and cx(c.D) == 1
    assert c.sixj(0, 0, 0, 0, 0, 0).equals(c.field.one())
    assert cm.gauss_sum(c).equals(c.field.one())


def test_semion_data():
    c = cm.builtin("semion")
    s = c.index("s")
    assert c.labels == ["0", "s"] and c.star[s] == s
    assert isinstance(c.field, CycloField) and c.field.order == 8
    assert c.twist[s].equals(c.field.zeta(2))
    assert (c.D * c.D).equals(c.field.from_rational(2))
    # dim(s) = -1: see notes; only dim^2 enters D and the Gauss sum
    assert c.dim[s].equals(c.field.from_rational(-1))
    assert cm.gauss_sum(c).equals(c.field.one() - c.field.zeta(2))
    assert cm.admissible(c, s, s, 0)
    assert c.hom4_channels(s, s, s, s) == [0]


def test_fibonacci_data():
    c = cm.builtin("fibonacci")
    t = c.index("tau")
    assert abs(cx(c.dim[t]) - PHI) < 1e-12
    assert abs(cx(c.twist[t]) - cmath.exp(4j * math.pi / 5)) < 1e-12
    assert abs(cx(c.D) - 2 * math.cos(math.pi / 10)) < 1e-12
    want = 1 + PHI ** 2 * cmath.exp(-4j * math.pi / 5)
    assert abs(cx(cm.gauss_sum(c)) - want) < 1e-12


def test_ising_data():
    c = cm.builtin("ising")
    s, p = c.index("sigma"), c.index("psi")
    assert abs(cx(c.dim[s]) - 2 ** 0.5) < 1e-12
    assert abs(cx(c.twist[s]) - cmath.exp(1j * math.pi / 8)) < 1e-12
    assert abs(cx(c.twist[p]) + 1) < 1e-12
    assert abs(cx(c.D) - 2) < 1e-12


@pytest.mark.parametrize("name", MODULAR)
def test_gauss_sum_modulus(name):
    c = cm.builtin(name)
    assert abs(abs(cx(cm.gauss_sum(c))) ** 2 - abs(cx(c.D)) ** 2) < 1e-9


@pytest.mark.parametrize("N,p", [(2, 1), (3, 1), (3, 2)])
def test_pointed_field_order(N, p):
    c = cm.builtin(f"pointed({N},{p})")
    assert c.field.order == math.lcm(2 * N * N, 8)
    assert c.pointed_order == N


def test_pointed_without_symmetric_coordinate():
    with pytest.raises(cm.CategoryError):
        cm.builtin("pointed(4,1)")


def test_unknown_builtin():
    with pytest.raises(cm.CategoryError):
        cm.builtin("toric")


def test_inadmissible_sixj():
    c = cm.builtin("semion")
    with pytest.raises(cm.InadmissibleTuple):
        c.sixj(0, 0, 1, 0, 0, 0)


@pytest.mark.parametrize("name", ["semion", "pointed(3,1)", "fibonacci", "ising"])
def test_text_round_trip(name):
    c = cm.builtin(name)
    d = cm.loads(cm.dumps(c))
    assert cm.dumps(d) == cm.dumps(c)
    assert cm.validate(d).ok


def test_loaded_pointed_data_is_detected(tmp_path):
    path = tmp_path / "z3.cat"
    path.write_text(cm.dumps(cm.builtin("pointed(3,1)")))
    assert cm.resolve(str(path)).pointed_order == 3


def test_as_float_keeps_identities():
    c = cm.as_float(cm.builtin("pointed(3,1)"))
    assert not c.exact
    assert cm.validate(c).ok


def _corrupt(text: str, old: str, new: str) -> cm.CoordinatedCategory:
    assert old in text
    return cm.loads(text.replace(old, new))


def test_corrupted_sixj_names_identity():
    text = cm.dumps(cm.builtin("semion"))
    rep = cm.validate(_corrupt(text, "sixj s s 0 s s 0 -1", "sixj s s 0 s s 0 1"))
    assert not rep.ok
    assert "racah" in rep.failed()
    assert rep.check("racah").witness is not None


def test_twist_flip_is_caught():
    text = cm.dumps(cm.builtin("semion"))
    alone = cm.validate(_corrupt(text, "twist s 1*z^2", "twist s -1*z^2"))
    assert "coordinates" in alone.failed()
    # flipping nu' with it gives the anti-semion twists over stale braid tables
    both = cm.loads(text.replace("twist s 1*z^2", "twist s -1*z^2").replace("twistp s 1*z^1", "twistp s -1*z^3"))
    rep = cm.validate(both)
    assert rep.failed() == ["braid-basis"]


def test_malformed_file_is_structural():
    text = cm.dumps(cm.builtin("semion"))
    c = cm.loads(text.replace("fusion s s 0\n", ""))
    rep = cm.validate(c)
    assert rep.structural and not rep.ok


@pytest.mark.parametrize("bad", ["field z 8\nlabels 0\nstar 0 0\nD 1 2 3\n", "category x\nlabels\n", "sixj 0 0\n"])
def test_unparseable_files(bad):
    with pytest.raises(cm.CategoryError):
        cm.loads(bad)
