"""Acceptance checks, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL ...`` line (visible
even without ``-s``) before asserting, so

    pytest tests/test_acceptance.py -v

gives a readable scorecard.  Criterion 4 evaluates CP^2 twice over 2^29
colorings and dominates the runtime (about two minutes on one core).
"""

import itertools
import time

import pytest

from qshadow import category as cm
from qshadow import cy
from qshadow import shadow as sh
from qshadow import simplicial as sx
from qshadow.cli import main
from qshadow.scalar import Cyclo

IDENTITY_CATS = ["trivial", "semion", "pointed(3,1)", "fibonacci", "ising"]
ALL_BUILTINS = ["trivial", "semion", "pointed(2,0)", "pointed(3,0)", "pointed(3,1)", "fibonacci", "ising"]
IDENTITIES = ["degenerate-6j", "biedenharn-elliott", "orthonormality", "racah", "braid-relations"]


@pytest.fixture
def verdict(capsys, request):
    """Print one scorecard line, then fail the test if the check failed."""
    def _report(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return _report


def close(a, b, tol) -> bool:
    return abs(complex(a.to_complex()) - complex(b.to_complex())) <= tol


def one_of(cat):
    return cat.field.one()


def exact_or(tol):
    """Exact equality on the exact backend, tol on the float one."""
    return lambda a, b: a.equals(b) if isinstance(a, Cyclo) else close(a, b, tol)


def test_criterion_1_identity_suite(verdict):
    t0 = time.perf_counter()
    failures = []
    for name in IDENTITY_CATS:
        rep = cm.validate(cm.builtin(name))
        names = {ch.name for ch in rep.checks}
        missing = [x for x in IDENTITIES if x not in names]
        if missing or not rep.ok:
            failures.append(f"{name}: failed {rep.failed()} missing {missing}")
        for ch in rep.checks:
            if ch.name in IDENTITIES and ch.tested == 0:
                failures.append(f"{name}: {ch.name} tested nothing")
    secs = time.perf_counter() - t0
    ok = not failures and secs < 10
    verdict(1, ok, f"identity suite on {', '.join(IDENTITY_CATS)} in {secs:.2f}s {failures or ''}")


def test_criterion_2_sphere_normalization(verdict):
    t0 = time.perf_counter()
    bad = []
    s20 = sh.shipped("s2_0")
    for name in ALL_BUILTINS:
        cat = cm.builtin(name)
        v = sh.shadow_state_sum(s20, cat).value
        if not exact_or(1e-9)(v, one_of(cat)):
            bad.append(f"{name}={v}")
    secs = time.perf_counter() - t0
    verdict(2, not bad and secs < 1, f"|S2_0| = 1 for {len(ALL_BUILTINS)} builtins in {secs:.3f}s {bad or ''}")


def test_criterion_3_s4(verdict):
    s4 = sx.shipped("s4")
    s20 = sh.shipped("s2_0")
    lines, ok = [], True
    for name in ["trivial", "semion", "pointed(3,1)", "fibonacci"]:
        cat = cm.builtin(name)
        budget = 300 if name == "fibonacci" else 10
        res = cy.cy_state_sum(s4, cat, cy.CYOptions(strategy="backtrack"))
        shadow = sh.shadow_state_sum(s20, cat).value
        good = exact_or(1e-7)(res.value, one_of(cat)) and exact_or(1e-7)(res.value, shadow) and res.seconds < budget
        ok &= good
        lines.append(f"{name}={res.value} ({res.colorings} colorings, {res.seconds:.1f}s)")
    verdict(3, ok, "CY(S4) = |S2_0| = 1: " + "; ".join(lines))


def _record(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, dict(line.split("=", 1) for line in out.strip().splitlines())


def test_criterion_4_cp2(verdict, capsys):
    t0 = time.perf_counter()
    base = ["compare", "cp2_9.tri", "--category", "semion", "--backend", "exact", "--format", "record"]
    c1, plus = _record(base[:2] + ["s2_p1.shadow"] + base[2:], capsys)
    c2, minus = _record(base[:2] + ["s2_m1.shadow"] + base[2:] + ["--flip-orientation"], capsys)
    secs = time.perf_counter() - t0
    ok = (c1 == 0 and plus["result"] == "PASS" and plus["cy_invariant_exact"] == "1*z^1"
          and c2 == 0 and minus["result"] == "PASS" and minus["cy_invariant_exact"] == "-1*z^3"
          and plus["cy_colorings"] == str(2 ** 29) and secs <= 1800)
    verdict(4, ok, f"CP2 = {plus['cy_invariant_exact']} = |S2_1|, flipped = {minus['cy_invariant_exact']}"
                   f" = |S2_-1| (zeta8^-1), exact, {secs:.0f}s")


def test_criterion_5_pachner(verdict):
    t0 = time.perf_counter()
    s4 = sx.shipped("s4")
    # no (2,4) or (3,3) site exists on the boundary of the 5-simplex itself,
    # so each move is applied to the complex produced by the previous one
    a = sx.pachner(s4, "1-5", 0)
    b = sx.pachner(a, "2-4", sx.sites(a, "2-4")[0])
    c = sx.pachner(b, "3-3", sx.sites(b, "3-3")[0])
    lines, ok = [], True
    for name in ["semion", "fibonacci"]:
        cat = cm.builtin(name)
        ref = cy.cy_state_sum(s4, cat).value
        for move, cx in (("1-5", a), ("2-4", b), ("3-3", c)):
            v = cy.cy_state_sum(cx, cat).value
            good = exact_or(1e-7)(v, ref)
            ok &= good
            lines.append(f"{name} {move}: {v}")
    secs = time.perf_counter() - t0
    verdict(5, ok and secs < 600, f"Pachner invariance in {secs:.0f}s: " + "; ".join(lines))


def test_criterion_6_addition(verdict):
    t0 = time.perf_counter()
    shapes = {k: sh.shipped(k) for k in sh.SHIPPED}
    s20 = sh.sphere_shadow(0)
    bad, n = [], 0
    for name in ALL_BUILTINS:
        cat = cm.builtin(name)
        eq = exact_or(1e-9)
        vals = {k: sh.shadow_state_sum(p, cat).value for k, p in shapes.items()}
        for x, y in itertools.combinations_with_replacement(sorted(shapes), 2):
            got = sh.shadow_state_sum(sh.shadow_add(shapes[x], shapes[y]), cat).value
            n += 1
            if not eq(got, vals[x] * vals[y]):
                bad.append(f"{name}: {x}+{y}")
        for x in shapes:
            n += 1
            if not eq(sh.shadow_state_sum(sh.shadow_add(shapes[x], s20), cat).value, vals[x]):
                bad.append(f"{name}: {x}+S2_0")
    secs = time.perf_counter() - t0
    verdict(6, not bad and secs < 1, f"{n} sums over {len(shapes)} shipped shadows x {len(ALL_BUILTINS)}"
                                     f" builtins in {secs:.2f}s {bad or ''}")


def test_criterion_7_enumerators(verdict):
    t0 = time.perf_counter()
    s4 = sx.shipped("s4")
    lines, ok = [], True
    for name in ["pointed(2,1)", "pointed(3,1)"]:
        cat = cm.builtin(name)
        r = {st: cy.cy_state_sum(s4, cat, cy.CYOptions(strategy=st)) for st in ("backtrack", "cocycle")}
        good = r["backtrack"].colorings == r["cocycle"].colorings and r["backtrack"].value.equals(r["cocycle"].value)
        ok &= good
        lines.append(f"{name}: {r['backtrack'].colorings}/{r['cocycle'].colorings} colorings,"
                     f" {r['backtrack'].value}/{r['cocycle'].value}")
    secs = time.perf_counter() - t0
    verdict(7, ok and secs < 60, f"backtrack/cocycle agree in {secs:.1f}s: " + "; ".join(lines))


def semion_corruptions() -> list[tuple[str, str]]:
    """Every value entry of the semion file, changed once."""
    swap = {"1": "-1", "-1": "1", "-1*z^2": "1*z^2", "1*z^2": "-1*z^2"}
    scalar_lines = {"dim s -1": "dim s 1", "dimp s 1*z^2": "dimp s -1*z^2",
                    "twist s 1*z^2": "twist s -1*z^2", "twistp s 1*z^1": "twistp s 1*z^3"}
    out = []
    for line in cm.dumps(cm.builtin("semion")).splitlines():
        tok = line.split()
        if tok[0] in ("sixj", "braid1", "braid2"):
            k = 7 if tok[0] == "sixj" else 4
            out.append((line, " ".join(tok[:k] + [swap[" ".join(tok[k:])]])))
        elif line in scalar_lines:
            out.append((line, scalar_lines[line]))
    return out


def test_criterion_8_mutations(verdict, tmp_path, capsys):
    t0 = time.perf_counter()
    base = cm.dumps(cm.builtin("semion"))
    muts = semion_corruptions()
    missed = []
    for k, (old, new) in enumerate(muts):
        path = tmp_path / f"mut{k}.cat"
        path.write_text(base.replace(old + "\n", new + "\n", 1))
        code = main(["category", "validate", str(path)])
        out = capsys.readouterr().out
        if code != 1 or "FAIL" not in out:
            missed.append(f"{old} -> {new}")
    secs = time.perf_counter() - t0
    ok = len(muts) == 20 and not missed and secs < 60
    verdict(8, ok, f"{len(muts) - len(missed)}/{len(muts)} single-entry corruptions caught (exit 1)"
                   f" in {secs:.1f}s {missed or ''}")
