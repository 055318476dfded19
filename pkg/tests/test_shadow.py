"""Shadowed polyhedra, gleam forms and the shadow state sum."""

import dataclasses
import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qshadow import category as cm
from qshadow import shadow as sh

BUILTINS = ["trivial", "semion", "pointed(3,1)", "fibonacci", "ising"]


@pytest.fixture(scope="module")
def cats():
    return {n: cm.builtin(n) for n in BUILTINS}


def value(p, cat):
    return sh.shadow_state_sum(p, cat).value


def cval(x) -> complex:
    return complex(x.to_complex())


def test_sphere_builders():
    s0 = sh.sphere_shadow(0)
    assert sh.validate_polyhedron(s0).ok
    assert sh.sphere_shadow(-1).regions[0].halves == -2
    assert sh.sphere_shadow(Fraction(1, 2)).regions[0].halves == 1
    with pytest.raises(sh.ShadowError):
        sh.sphere_shadow(Fraction(1, 3))


@pytest.mark.parametrize("gleam,Q,nullity", [(0, 0, 1), (1, 1, 0), (-1, -1, 0)])
def test_sphere_gleam_form(gleam, Q, nullity):
    g = sh.gleam_form(sh.sphere_shadow(gleam))
    assert (g.b2, g.Q, g.nullity) == (1, [[Q]], nullity)


def test_sum_gleam_form():
    g = sh.gleam_form(sh.shadow_add(sh.sphere_shadow(1), sh.sphere_shadow(-1)))
    assert g.b2 == 2 and g.nullity == 0
    assert g.Q == [[1, 0], [0, -1]]


def test_add_structure():
    p = sh.shadow_add(sh.sphere_shadow(0), sh.sphere_shadow(0))
    assert sh.validate_polyhedron(p).ok
    assert len(p.regions) == 3 and [s.kind for s in p.strata] == ["circle"]
    assert all(r.halves == 0 for r in p.regions)


def test_dangling_arc_fails():
    s0 = sh.sphere_shadow(0)
    bad = sh.ShadowPolyhedron("bad", 1, (sh.Stratum("a", "arc", (0, 0)),),
                              (sh.Region("0", 0, 1, 0, (((1, "a", 0), (-1, "a", 1)),)),))
    assert sh.validate_polyhedron(s0).ok
    assert not sh.validate_polyhedron(bad).ok


def test_circle_stratum_hom_dim(cats):
    s = cats["semion"].index("s")
    assert sh.circle_stratum_hom_dim(cats["semion"], s, s, 0) == 1
    assert sh.circle_stratum_hom_dim(cats["semion"], s, 0, 0) == 0
    t = cats["fibonacci"].index("tau")
    assert sh.circle_stratum_hom_dim(cats["fibonacci"], t, t, t) == 1


@pytest.mark.parametrize("name", BUILTINS)
def test_s2_0_is_one(cats, name):
    assert abs(cval(value(sh.sphere_shadow(0), cats[name])) - 1) < 1e-9


def test_semion_spheres(cats):
    c = cats["semion"]
    z = c.field.zeta(1)
    assert value(sh.sphere_shadow(1), c).equals(z)
    assert value(sh.sphere_shadow(-1), c).equals(z.inv())
    assert value(sh.shadow_add(sh.sphere_shadow(1), sh.sphere_shadow(-1)), c).equals(c.field.one())


@pytest.mark.parametrize("name", ["semion", "fibonacci", "ising"])
def test_gleam_negation_conjugates(cats, name):
    for g in (1, -1, Fraction(1, 2)):
        p = sh.sphere_shadow(g)
        a, b = cval(value(p, cats[name])), cval(value(p.negated(), cats[name]))
        assert abs(a - b.conjugate()) < 1e-9


@pytest.mark.parametrize("name", BUILTINS)
def test_torus_closed_form(cats, name):
    c = cats[name]
    D2 = cval(c.D) ** 2
    assert abs(cval(value(sh.surface_shadow(1, 0), c)) - c.size / D2) < 1e-9


@pytest.mark.parametrize("name", BUILTINS)
def test_dual_skeleton_of_3_sphere(cats, name):
    p = sh.shipped("dual_s3")
    assert sh.validate_polyhedron(p).ok
    g = sh.gleam_form(p)
    assert (g.b2, g.nullity) == (4, 4)
    # a shadow of S^4, so the sum is 1
    assert abs(cval(value(p, cats[name])) - 1) < 1e-9


def relabel_point(p, k, perm):
    """Relabel the germs of point k by perm (new germ i = old germ perm[i])."""
    x = p.points[k]
    corners = dict(zip(sh.PAIRS, x.corners))
    new = []
    for i, j in sh.PAIRS:
        a, b = perm[i], perm[j]
        s, rid = corners[(a, b)] if a < b else corners[(b, a)]
        new.append((s if a < b else -s, rid))
    pt = sh.TetraPoint(x.id, tuple(x.germs[perm[i]] for i in range(4)), tuple(new))
    return dataclasses.replace(p, points=p.points[:k] + (pt,) + p.points[k + 1:])


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 4), st.permutations(range(4)), st.sampled_from(["semion", "pointed(3,1)", "fibonacci"]))
def test_point_labeling_does_not_matter(k, perm, name):
    cat = cm.builtin(name)
    p = sh.shipped("dual_s3")
    q = relabel_point(p, k, list(perm))
    assert sh.validate_polyhedron(q).ok
    assert abs(cval(value(q, cat)) - cval(value(p, cat))) < 1e-9


SMALL = ["s2_0", "s2_p1", "s2_m1", "s2p1_plus_s2m1", "torus_0"]


@pytest.mark.parametrize("name", ["semion", "fibonacci", "ising"])
def test_addition_and_stability(cats, name):
    c = cats[name]
    shapes = {k: sh.shipped(k) for k in SMALL}
    vals = {k: cval(value(p, c)) for k, p in shapes.items()}
    for a, b in itertools.combinations_with_replacement(SMALL, 2):
        got = cval(value(sh.shadow_add(shapes[a], shapes[b]), c))
        assert abs(got - vals[a] * vals[b]) < 1e-9
    for a in SMALL:
        assert abs(cval(value(sh.shadow_add(shapes[a], sh.sphere_shadow(0)), c)) - vals[a]) < 1e-9


def test_shipped_files_match_builders():
    built = sh.builtin_shadows()
    assert set(built) == set(sh.SHIPPED)
    for k in sh.SHIPPED:
        assert sh.dumps(sh.shipped(k)) == sh.dumps(sh.normalized(built[k]))


@pytest.mark.parametrize("k", ["s2p1_plus_s2m1", "torus_0", "dual_s3"])
def test_text_round_trip(k):
    p = sh.shipped(k)
    assert sh.dumps(sh.loads(sh.dumps(p))) == sh.dumps(p)


@pytest.mark.parametrize("text", [
    "shadow x\npoints 0\nregion 0 gleam 1/2 orient +\n",
    "shadow x\npoints 0\nregion 0 gleam 0 orient ?\n",
    "shadow x\npoints 0\nregion 0 gleam 0 orient + walk 9.0\n",
    "shadow x\npoints 0\nblob\n",
])
def test_bad_shadow_text(text):
    with pytest.raises(sh.ShadowError):
        p = sh.loads(text)
        if not sh.validate_polyhedron(p).ok:
            raise sh.ShadowError("invalid")


def test_invalid_polyhedron_is_not_summed(cats):
    bad = sh.loads("shadow x\npoints 0\ncircle 0\nregion 0 gleam 0 orient + walk 0.0\n")
    with pytest.raises(sh.ShadowError):
        sh.shadow_state_sum(bad, cats["semion"])
