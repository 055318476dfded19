"""Crane-Yetter state sums on small triangulations."""

import numpy as np
import pytest

from qshadow import category as cm
from qshadow import cy
from qshadow import simplicial as sx


@pytest.fixture(scope="module")
def s4():
    return sx.boundary_simplex()


@pytest.fixture(scope="module")
def moved(s4):
    a = sx.pachner(s4, "1-5", 0)
    b = sx.pachner(a, "2-4", sx.sites(a, "2-4")[0])
    c = sx.pachner(b, "3-3", sx.sites(b, "3-3")[0])
    return {"1-5": a, "2-4": b, "3-3": c}


def run(c, cat, **kw):
    return cy.cy_state_sum(c, cat, cy.CYOptions(**kw))


def is_one(v, tol=1e-7):
    return abs(complex(v.to_complex()) - 1) < tol


@pytest.mark.parametrize("name", ["trivial", "semion", "pointed(2,0)", "pointed(3,0)", "pointed(3,1)"])
@pytest.mark.parametrize("strategy", ["backtrack", "cocycle"])
def test_s4_exact(s4, name, strategy):
    cat = cm.builtin(name)
    res = run(s4, cat, strategy=strategy)
    assert res.value.equals(cat.field.one())
    assert res.colorings == cat.size ** 10  # |Z^2(S^4; Z/N)| = N^(f1 - f0 + 1)


@pytest.mark.parametrize("strategy", ["backtrack", "contract"])
def test_s4_float_backend(s4, strategy):
    res = run(s4, cm.as_float(cm.builtin("semion")), strategy=strategy)
    assert is_one(res.value, 1e-9)
    assert res.colorings == 1024


def test_trivial_on_cp2():
    res = run(sx.shipped("cp2_9"), cm.builtin("trivial"))
    assert res.value.equals(cm.builtin("trivial").field.one())
    assert res.colorings == 1


@pytest.mark.parametrize("move", ["1-5", "2-4", "3-3"])
def test_pachner_invariance_semion(moved, move):
    cat = cm.builtin("semion")
    assert run(moved[move], cat).value.equals(cat.field.one())


def test_colorings_are_admissible(s4):
    cat = cm.builtin("pointed(3,1)")
    it = cy.colorings(s4, cat, "backtrack")
    tris = s4.faces(2)
    idx = {t: k for k, t in enumerate(tris)}
    seen = set()
    for col in it:
        seen.add(tuple(col))
        for a, b, c, d in s4.faces(3):
            # the boundary of a 3-cell: x_bcd - x_acd + x_abd - x_abc = 0 in Z/3
            tot = col[idx[(b, c, d)]] - col[idx[(a, c, d)]] + col[idx[(a, b, d)]] - col[idx[(a, b, c)]]
            assert tot % 3 == 0
    assert len(seen) == 3 ** 10
    assert {tuple(c) for c in cy.colorings(s4, cat, "cocycle")} == seen


def test_enumerators_agree_on_counts(s4):
    cat = cm.builtin("pointed(2,1)")
    a = cy.ColoringIterator(s4, cat, "backtrack")
    b = cy.ColoringIterator(s4, cat, "cocycle")
    assert a.count() == b.count() == 1024


def test_worker_counts_give_identical_results(s4):
    cat = cm.as_float(cm.builtin("semion"))
    assert len(cy.ColoringIterator(s4, cat, "backtrack").tasks()) > 1
    one = run(s4, cat, strategy="backtrack", threads=1)
    two = run(s4, cat, strategy="backtrack", threads=2)
    assert one.value.value == two.value.value
    assert one.colorings == two.colorings


def test_threads_env_fallback(monkeypatch):
    monkeypatch.setenv("QSHADOW_THREADS", "3")
    assert cy.resolve_threads(None) == 3
    assert cy.resolve_threads(2) == 2
    monkeypatch.setenv("QSHADOW_THREADS", "many")
    with pytest.raises(cy.CYError):
        cy.resolve_threads(None)
    monkeypatch.delenv("QSHADOW_THREADS")
    assert cy.resolve_threads(None) == 1


def test_resource_guard_on_cp2_fibonacci():
    with pytest.raises(cy.ResourceLimit) as info:
        run(sx.shipped("cp2_9"), cm.builtin("fibonacci"))
    assert info.value.estimate == 2.0 ** 84


def test_guard_estimate_for_pointed_is_exact():
    p = cy.Problem(sx.shipped("cp2_9"))
    assert cy.estimate_colorings(p.complex, cm.builtin("semion"), p) == 2.0 ** 29


def test_rejects_non_manifold(s4):
    broken = sx.Complex4.build(s4.facets[1:], s4.vertices)
    with pytest.raises(cy.CYError):
        run(broken, cm.builtin("trivial"))


def test_strategy_preconditions(s4):
    with pytest.raises(cy.CYError):
        run(s4, cm.builtin("semion"), strategy="contract")
    with pytest.raises(cy.CYError):
        run(s4, cm.builtin("fibonacci"), strategy="cocycle")


def test_15j_symbol_trivial_labels():
    cat = cm.builtin("semion")
    sym = cy.SimplexSymbol((0, 1, 2, 3, 4), (0,) * 10, 1)
    assert cy.eval_15j(cat, sym, (0,) * 5).equals(cat.field.one())
    with pytest.raises(cy.CYError):
        cy.eval_15j(cat, sym, (1, 0, 0, 0, 0))


def test_channel_lists_match_hom_dimension():
    cat = cm.builtin("fibonacci")
    t = cat.index("tau")
    lists = cy.channel_lists(cat, (t,) * 10)
    assert [len(x) for x in lists] == [2] * 5


def test_prefactor_exponent(s4):
    p = cy.Problem(s4)
    assert p.prefactor_exp() == 2 * (6 - 15) - 2
    assert np.all(np.asarray(p.signs) == -np.asarray(cy.Problem(s4, flip=True).signs))
