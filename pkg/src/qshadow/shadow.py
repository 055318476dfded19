"""Closed shadowed simple 2-polyhedra and their state sums.

A polyhedron is stored combinatorially:

* strata: arcs (between two tetrahedral points, oriented p -> q) and circles
  (oriented).  Each stratum has three slots 0, 1, 2, one per adjacent
  region-side.
* regions: gleam (in half units), an orientation flag, a genus, and a list of
  boundary components.  Each component is a cyclic walk of sides
  ``(sign, stratum, slot)``; sign +1 means that the boundary orientation
  induced by the region (flag applied) agrees with the stratum orientation.
* tetrahedral points: four arc germs and six oriented corner regions, one for
  each pair of germs (01, 02, 03, 12, 13, 23).

The Euler characteristic of a region is 2 - 2 genus - (number of boundary
components).  H_2 is the kernel of the boundary map from regions to strata
(sing(P) is a graph, so nothing else contributes).
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from . import zlinalg
from .category import CoordinatedCategory

Side = tuple[int, str, int]  # (sign, stratum id, slot)


class ShadowError(ValueError):
    pass


@dataclass(frozen=True)
class Stratum:
    id: str
    kind: str  # "arc" or "circle"
    ends: tuple[int, int] | None = None


@dataclass(frozen=True)
class Region:
    id: str
    halves: int
    orient: int = 1
    genus: int = 0
    walks: tuple[tuple[Side, ...], ...] = ()

    @property
    def euler(self) -> int:
        return 2 - 2 * self.genus - len(self.walks)

    def sides(self):
        """Sides with the orientation flag applied."""
        for w in self.walks:
            for s, sid, slot in w:
                yield s * self.orient, sid, slot


@dataclass(frozen=True)
class TetraPoint:
    id: int
    germs: tuple[str, str, str, str]
    # corner for pair (i, j) in PAIRS order: (sign, region id); the sign says
    # whether the oriented corner x x_i x_j agrees with the region orientation
    corners: tuple[tuple[int, str], ...]


PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


@dataclass(frozen=True)
class ShadowPolyhedron:
    name: str
    npoints: int
    strata: tuple[Stratum, ...]
    regions: tuple[Region, ...]
    points: tuple[TetraPoint, ...] = ()

    def stratum(self, sid: str) -> Stratum:
        for s in self.strata:
            if s.id == sid:
                return s
        raise ShadowError(f"unknown stratum {sid!r}")

    def negated(self) -> "ShadowPolyhedron":
        """The same polyhedron with every gleam negated."""
        return ShadowPolyhedron("-" + self.name, self.npoints, self.strata,
                                tuple(Region(r.id, -r.halves, r.orient, r.genus, r.walks) for r in self.regions),
                                self.points)


# ----- validation ----------------------------------------------------------

@dataclass
class ShadowReport:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def format(self) -> str:
        return "\n".join([f"  FAIL {p}" for p in self.problems] + ["result: " + ("PASS" if self.ok else "FAIL")])


def validate_polyhedron(p: ShadowPolyhedron) -> ShadowReport:
    rep = ShadowReport()
    bad = rep.problems
    ids = [s.id for s in p.strata]
    if len(set(ids)) != len(ids):
        bad.append("duplicate stratum ids")
    rids = [r.id for r in p.regions]
    if len(set(rids)) != len(rids):
        bad.append("duplicate region ids")
    if not p.regions:
        bad.append("no regions")
    known = set(ids)
    slots: dict[tuple[str, int], list[str]] = {}
    for r in p.regions:
        if r.orient not in (1, -1):
            bad.append(f"region {r.id}: orientation flag must be + or -")
        if r.genus < 0:
            bad.append(f"region {r.id}: negative genus")
        for w in r.walks:
            if not w:
                bad.append(f"region {r.id}: empty boundary walk")
                continue
            for s, sid, slot in w:
                if sid not in known:
                    bad.append(f"region {r.id}: side on unknown stratum {sid}")
                    continue
                if slot not in (0, 1, 2):
                    bad.append(f"region {r.id}: slot {slot} on stratum {sid}")
                slots.setdefault((sid, slot), []).append(r.id)
            kinds = {p.stratum(sid).kind for _, sid, _ in w if sid in known}
            if "circle" in kinds and len(w) != 1:
                bad.append(f"region {r.id}: a circle stratum must form a whole boundary component")
            if kinds == {"arc"}:
                # consecutive arcs must meet head to tail
                for k in range(len(w)):
                    s1, a1, _ = w[k]
                    s2, a2, _ = w[(k + 1) % len(w)]
                    e1 = p.stratum(a1).ends
                    e2 = p.stratum(a2).ends
                    head = e1[1] if s1 > 0 else e1[0]
                    tail = e2[0] if s2 > 0 else e2[1]
                    if head != tail:
                        bad.append(f"region {r.id}: walk breaks between {a1} and {a2}")
                        break
    for s in p.strata:
        for slot in (0, 1, 2):
            users = slots.get((s.id, slot), [])
            if len(users) != 1:
                bad.append(f"stratum {s.id}: slot {slot} has {len(users)} region-sides (needs 1)")
        if s.kind == "arc":
            if s.ends is None or not all(0 <= e < p.npoints for e in s.ends):
                bad.append(f"arc {s.id}: endpoints must be tetrahedral points")
        elif s.kind != "circle":
            bad.append(f"stratum {s.id}: unknown kind {s.kind}")
    # tetrahedral points: four germs, six corners with K4 incidence
    germs: dict[int, list[str]] = {i: [] for i in range(p.npoints)}
    for s in p.strata:
        if s.kind == "arc" and s.ends is not None:
            for e in s.ends:
                if e in germs:
                    germs[e].append(s.id)
    declared = {x.id: x for x in p.points}
    for i in range(p.npoints):
        if len(germs[i]) != 4:
            bad.append(f"point {i}: {len(germs[i])} arc germs (needs 4)")
            continue
        x = declared.get(i)
        if x is None:
            bad.append(f"point {i}: corner data missing")
            continue
        if sorted(x.germs) != sorted(germs[i]):
            bad.append(f"point {i}: declared germs {x.germs} do not match arcs {sorted(germs[i])}")
            continue
        if len(x.corners) != 6 or any(rid not in rids for _, rid in x.corners):
            bad.append(f"point {i}: needs six corners on known regions")
            continue
        by_id = {r.id: r for r in p.regions}
        for (a, b), (_, rid) in zip(PAIRS, x.corners):
            touched = {sid for _, sid, _ in by_id[rid].sides()}
            if x.germs[a] not in touched or x.germs[b] not in touched:
                bad.append(f"point {i}: corner {a}{b} region {rid} does not border both arcs")
        for a in range(4):
            if x.germs.count(x.germs[a]) > 1:
                continue  # loops are not checked further
            around = sorted(rid for (sid, _), users in slots.items() if sid == x.germs[a] for rid in users)
            corner = sorted(rid for (i1, j1), (_, rid) in zip(PAIRS, x.corners) if a in (i1, j1))
            if around != corner:
                bad.append(f"point {i}: regions around arc {x.germs[a]} do not match its corners")
    for d in declared:
        if not 0 <= d < p.npoints:
            bad.append(f"corner data for unknown point {d}")
    if p.regions and not connected(p):
        bad.append("polyhedron is disconnected")
    return rep


def connected(p: ShadowPolyhedron) -> bool:
    adj: dict[str, set[str]] = {r.id: set() for r in p.regions}
    by_stratum: dict[str, set[str]] = {}
    for r in p.regions:
        for _, sid, _ in r.sides():
            by_stratum.setdefault(sid, set()).add(r.id)
    for rs in by_stratum.values():
        for a in rs:
            adj[a] |= rs
    start = p.regions[0].id
    seen = {start}
    stack = [start]
    while stack:
        for b in adj[stack.pop()]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(p.regions)


# ----- homology and gleam form -------------------------------------------

@dataclass
class GleamForm:
    basis: list[list[int]]
    Q: list[list[Fraction]]
    b2: int
    nullity: int


def boundary_matrix(p: ShadowPolyhedron) -> list[list[int]]:
    """Rows: strata, columns: regions."""
    si = {s.id: k for k, s in enumerate(p.strata)}
    m = [[0] * len(p.regions) for _ in p.strata]
    for j, r in enumerate(p.regions):
        for s, sid, _ in r.sides():
            m[si[sid]][j] += s
    return m


@functools.lru_cache(maxsize=512)
def gleam_form(p: ShadowPolyhedron) -> GleamForm:
    """Intersection form on H_2 in a Hermite basis; cached, treat as read-only."""
    basis = zlinalg.hermite_rows(zlinalg.integer_kernel(boundary_matrix(p), len(p.regions)))
    gl = [r.halves for r in p.regions]
    Q = [[Fraction(sum(a * b * g for a, b, g in zip(h1, h2, gl)), 2) for h2 in basis] for h1 in basis]
    b2 = len(basis)
    nullity = len(zlinalg.rational_kernel(Q, b2)) if b2 else 0
    return GleamForm(basis, Q, b2, nullity)


# ----- builders ---------------------------------------------------------

def _halves(a) -> int:
    h = Fraction(a) * 2
    if h.denominator != 1:
        raise ShadowError(f"gleam {a} is not a half-integer")
    return int(h)


def surface_shadow(genus: int, gleam=0, name: str | None = None) -> ShadowPolyhedron:
    """A closed orientable surface of the given genus with one region."""
    h = _halves(gleam)
    name = name or f"surface{genus}_{Fraction(h, 2)}"
    return ShadowPolyhedron(name, 0, (), (Region("0", h, 1, genus, ()),))


def sphere_shadow(gleam=0) -> ShadowPolyhedron:
    """The 2-sphere with one region of the given (half-integer) gleam."""
    h = _halves(gleam)
    return surface_shadow(0, Fraction(h, 2), name=f"S2_{Fraction(h, 2)}")


def _renamed(p: ShadowPolyhedron, prefix: str) -> ShadowPolyhedron:
    strata = tuple(Stratum(prefix + s.id, s.kind, s.ends) for s in p.strata)
    regions = tuple(Region(prefix + r.id, r.halves, r.orient, r.genus,
                           tuple(tuple((s, prefix + sid, sl) for s, sid, sl in w) for w in r.walks))
                    for r in p.regions)
    points = tuple(TetraPoint(x.id, tuple(prefix + g for g in x.germs),
                              tuple((s, prefix + rid) for s, rid in x.corners)) for x in p.points)
    return ShadowPolyhedron(p.name, p.npoints, strata, regions, points)


def _shift_points(p: ShadowPolyhedron, k: int) -> ShadowPolyhedron:
    strata = tuple(Stratum(s.id, s.kind, None if s.ends is None else (s.ends[0] + k, s.ends[1] + k))
                   for s in p.strata)
    points = tuple(TetraPoint(x.id + k, x.germs, x.corners) for x in p.points)
    return ShadowPolyhedron(p.name, p.npoints, strata, p.regions, points)


def shadow_add(p: ShadowPolyhedron, q: ShadowPolyhedron, region_p: int = 0, region_q: int = 0,
               name: str | None = None) -> ShadowPolyhedron:
    """Glue p and q along small disks in the chosen regions.

    The glued disk becomes a new region of gleam 0; its boundary is a new
    circle stratum with the punctured regions of p and q on its other sides.
    """
    for x in (p, q):
        if not x.regions or not connected(x):
            raise ShadowError(f"shadow_add needs connected summands ({x.name})")
    a = _renamed(p, "a")
    b = _shift_points(_renamed(q, "b"), p.npoints)
    g = Stratum("g", "circle")
    ra, rb = a.regions[region_p], b.regions[region_q]

    def punctured(r: Region, slot: int) -> Region:
        # the disk keeps the region's orientation, so the new boundary runs
        # against the circle (which is oriented as the boundary of the disk)
        return Region(r.id, r.halves, r.orient, r.genus, r.walks + (((-r.orient, "g", slot),),))

    regions = [punctured(r, 0) if r is ra else r for r in a.regions]
    regions += [punctured(r, 1) if r is rb else r for r in b.regions]
    regions.append(Region("d", 0, 1, 0, (((1, "g", 2),),)))
    return ShadowPolyhedron(name or f"{p.name}+{q.name}", p.npoints + q.npoints,
                            a.strata + b.strata + (g,), tuple(regions), a.points + b.points)


def normalized(p: ShadowPolyhedron) -> ShadowPolyhedron:
    """Renumber strata and regions as 0, 1, 2, ... (for writing files)."""
    sm = {s.id: str(k) for k, s in enumerate(p.strata)}
    rm = {r.id: str(k) for k, r in enumerate(p.regions)}
    return ShadowPolyhedron(
        p.name, p.npoints, tuple(Stratum(sm[s.id], s.kind, s.ends) for s in p.strata),
        tuple(Region(rm[r.id], r.halves, r.orient, r.genus,
                     tuple(tuple((s, sm[sid], sl) for s, sid, sl in w) for w in r.walks)) for r in p.regions),
        tuple(TetraPoint(x.id, tuple(sm[g] for g in x.germs), tuple((s, rm[rid]) for s, rid in x.corners))
              for x in p.points))


# ----- state sum --------------------------------------------------------

def circle_stratum_hom_dim(cat: CoordinatedCategory, i, j, k) -> int:
    """dim Hom(1, V_i V_j V_k); at most 1 without multiplicities."""
    return cat.N(cat.index(i), cat.index(j), cat.index(k))


@dataclass
class ShadowResult:
    value: object
    colorings: int
    b2: int
    nullity: int


def shadow_state_sum(p: ShadowPolyhedron, cat: CoordinatedCategory, force: bool = False) -> ShadowResult:
    rep = validate_polyhedron(p)
    if not rep.ok:
        raise ShadowError("invalid polyhedron: " + "; ".join(rep.problems))
    n = cat.size
    s = cat.star
    if n ** len(p.regions) > 2 ** 34 and not force:
        raise ShadowError(f"{n}^{len(p.regions)} region colorings exceed the limit 2^34; use --force")
    gf = gleam_form(p)
    ridx = {r.id: k for k, r in enumerate(p.regions)}
    # circle and arc admissibility: three (region, sign) sides per stratum
    constraints = []
    for st in p.strata:
        sides = []
        for r in p.regions:
            for sg, sid, slot in r.sides():
                if sid == st.id:
                    sides.append((slot, ridx[r.id], sg))
        sides.sort()
        constraints.append((st.kind, [(k, sg) for _, k, sg in sides]))
    weights = []
    for r in p.regions:
        w = []
        for i in range(n):
            v = cat.dim[i] ** r.euler if r.euler >= 0 else cat.dim[i].inv() ** (-r.euler)
            v = v * (cat.twistP[i] ** r.halves if r.halves >= 0 else cat.twistP[i].inv() ** (-r.halves))
            w.append(v)
        weights.append(w)
    arith = _Arith(cat)
    W = [[arith.conv(v) for v in w] for w in weights]
    total, count = _eliminate(p, cat, constraints, W, ridx, arith)
    e = gf.b2 + gf.nullity
    value = total * cat.D.inv() ** e
    return ShadowResult(value, count, gf.b2, gf.nullity)


def _region_order(nreg: int, groups: list[list[int]]) -> list[int]:
    """Greedy order that keeps the set of half-finished groups small."""
    touching = [[] for _ in range(nreg)]
    for gi, g in enumerate(groups):
        for k in set(g):
            touching[k].append(gi)
    placed: set[int] = set()
    order = []
    while len(order) < nreg:
        def score(k):
            # groups this region closes, then groups it shares with placed regions
            closes = sum(1 for gi in touching[k] if set(groups[gi]) - placed <= {k})
            shared = sum(1 for gi in touching[k] if placed & set(groups[gi]))
            return (-closes, -shared, k)
        k = min((k for k in range(nreg) if k not in placed), key=score)
        placed.add(k)
        order.append(k)
    return order


def _eliminate(p, cat, constraints, W, ridx, arith):
    """Sum over region colorings by eliminating regions one at a time.

    A partial state remembers only the labels of regions that still occur
    in an unfinished stratum or tetrahedral point; partial colorings that
    agree there are merged.  Returns (total, number of colorings with a
    nonzero weight).
    """
    n = cat.size
    s = cat.star
    nreg = len(p.regions)
    points = [[(a, b, ridx[rid], sg) for (a, b), (sg, rid) in zip(PAIRS, x.corners)] for x in p.points]
    groups = [[k for k, _ in sides] for _, sides in constraints] + [[k for _, _, k, _ in c] for c in points]
    order = _region_order(nreg, groups)
    pos = {k: t for t, k in enumerate(order)}
    last = [max(pos[k] for k in g) for g in groups]
    due = [[] for _ in range(nreg)]
    for gi in range(len(groups)):
        due[last[gi]].append(gi)
    # regions live in the state from their placement until their last group
    until = [pos[k] for k in range(nreg)]
    for gi, g in enumerate(groups):
        for k in g:
            until[k] = max(until[k], last[gi])
    nc = len(constraints)
    sixj_cache: dict = {}

    def point_value(lab, corners):
        c = {}
        for a, b, k, sg in corners:
            c[(a, b)] = lab[k] if sg > 0 else s[lab[k]]
            c[(b, a)] = s[c[(a, b)]]
        key = (c[(0, 1)], c[(0, 2)], c[(3, 0)], c[(3, 2)], c[(1, 3)], c[(2, 1)])
        if key not in sixj_cache:
            sixj_cache[key] = arith.conv(cat.sixj_or_zero(key))
        return sixj_cache[key]

    live: list[int] = []
    states = {(): (arith.one, 1)}
    for t, k in enumerate(order):
        nxt_live = [r for r in live + [k] if until[r] > t]
        keep = [i for i, r in enumerate(live + [k]) if until[r] > t]
        merged: dict = {}
        for key, (v, cnt) in states.items():
            lab = dict(zip(live, key))
            for i in range(n):
                w = W[k][i]
                if w is None:
                    continue
                lab[k] = i
                ok = True
                for gi in due[t]:
                    if gi < nc:
                        sides = constraints[gi][1]
                        if not cat.N(*(lab[r] if sg > 0 else s[lab[r]] for r, sg in sides)):
                            ok = False
                            break
                    else:
                        x = point_value(lab, points[gi - nc])
                        if x is None:
                            ok = False
                            break
                        w = arith.mul(w, x)
                if not ok:
                    continue
                full = key + (i,)
                nk = tuple(full[j] for j in keep)
                w = arith.mul(v, w)
                old = merged.get(nk)
                merged[nk] = (w, cnt) if old is None else (old[0] + w, old[1] + cnt)
        states = merged
        live = nxt_live
    if not states:
        return arith.zero, 0
    (total, count), = states.values()
    return arith.result(total), count


class _Arith:
    """Scalars for the coloring sum: Python complex on float data, exact
    field elements otherwise.  A vanishing factor converts to None."""

    def __init__(self, cat: CoordinatedCategory):
        self.field = cat.field
        self.float = not cat.exact
        self.one = 1 + 0j if self.float else cat.field.one()
        self.zero = cat.field.zero()

    def conv(self, x):
        if x.is_zero():
            return None
        return complex(x.to_complex()) if self.float else x

    def mul(self, a, b):
        return a * b

    def result(self, total):
        return self.field.from_complex(total) if self.float else total


# ----- text format ------------------------------------------------------

def _side_token(sd: Side) -> str:
    s, sid, slot = sd
    return f"{'-' if s < 0 else ''}{sid}.{slot}"


def dumps(p: ShadowPolyhedron) -> str:
    out = [f"shadow {p.name}", f"points {p.npoints}"]
    for st in p.strata:
        out.append(f"arc {st.id} {st.ends[0]} {st.ends[1]}" if st.kind == "arc" else f"circle {st.id}")
    for r in p.regions:
        line = f"region {r.id} gleam {r.halves} orient {'+' if r.orient > 0 else '-'}"
        if r.genus:
            line += f" genus {r.genus}"
        if r.walks:
            line += " walk " + " | ".join(" ".join(_side_token(sd) for sd in w) for w in r.walks)
        out.append(line)
    for x in p.points:
        out.append(f"point {x.id} germs {' '.join(x.germs)} corners "
                   + " ".join(f"{'-' if sg < 0 else ''}{rid}" for sg, rid in x.corners))
    return "\n".join(out) + "\n"


def loads(text: str) -> ShadowPolyhedron:
    name, npoints = "unnamed", None
    strata, regions, points = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "shadow":
                name = " ".join(tok[1:]) or name
            elif tok[0] == "points":
                npoints = int(tok[1])
            elif tok[0] == "arc":
                strata.append(Stratum(tok[1], "arc", (int(tok[2]), int(tok[3]))))
            elif tok[0] == "circle":
                strata.append(Stratum(tok[1], "circle"))
            elif tok[0] == "region":
                regions.append(_parse_region(tok))
            elif tok[0] == "point":
                gi, ci = tok.index("germs"), tok.index("corners")
                corners = tuple((-1, t[1:]) if t.startswith("-") else (1, t.lstrip("+")) for t in tok[ci + 1:])
                points.append(TetraPoint(int(tok[1]), tuple(tok[gi + 1:ci]), corners))
            else:
                raise ShadowError(f"unknown keyword {tok[0]!r}")
        except (IndexError, ValueError) as e:
            if isinstance(e, ShadowError):
                raise ShadowError(f"line {lineno}: {e}") from None
            raise ShadowError(f"line {lineno}: cannot parse {raw.strip()!r}") from None
    if npoints is None:
        raise ShadowError("missing 'points' line")
    return ShadowPolyhedron(name, npoints, tuple(strata), tuple(regions), tuple(points))


def _parse_region(tok: list[str]) -> Region:
    rid = tok[1]
    halves, orient, genus, walks = 0, 1, 0, ()
    k = 2
    while k < len(tok):
        key = tok[k]
        if key == "gleam":
            halves = int(tok[k + 1])
            k += 2
        elif key == "orient":
            if tok[k + 1] not in ("+", "-"):
                raise ShadowError("orient must be + or -")
            orient = 1 if tok[k + 1] == "+" else -1
            k += 2
        elif key == "genus":
            genus = int(tok[k + 1])
            k += 2
        elif key == "walk":
            comps, cur = [], []
            for t in tok[k + 1:]:
                if t == "|":
                    comps.append(tuple(cur))
                    cur = []
                    continue
                sg = -1 if t.startswith("-") else 1
                sid, _, slot = t.lstrip("+-").rpartition(".")
                if not sid:
                    raise ShadowError(f"bad side token {t!r}")
                # sides are recorded relative to the region's reference
                # orientation; the flag is applied in Region.sides()
                cur.append((sg, sid, int(slot)))
            comps.append(tuple(cur))
            walks = tuple(comps)
            break
        else:
            raise ShadowError(f"unknown region field {key!r}")
    return Region(rid, halves, orient, genus, walks)


def load(path: str) -> ShadowPolyhedron:
    with open(path) as fh:
        return loads(fh.read())


def save(p: ShadowPolyhedron, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(p))


def shipped(name: str) -> ShadowPolyhedron:
    fname = name if name.endswith(".shadow") else name + ".shadow"
    return load(str(resources.files("qshadow") / "data" / fname))


SHIPPED = ("s2_0", "s2_p1", "s2_m1", "s2p1_plus_s2m1", "torus_0", "dual_s3")


def builtin_shadows() -> dict[str, ShadowPolyhedron]:
    """The shipped shadow set, rebuilt from the constructors."""
    return {
        "s2_0": sphere_shadow(0),
        "s2_p1": sphere_shadow(1),
        "s2_m1": sphere_shadow(-1),
        "s2p1_plus_s2m1": shadow_add(sphere_shadow(1), sphere_shadow(-1)),
        "torus_0": surface_shadow(1, 0, name="T2_0"),
        "dual_s3": dual_skeleton(BOUNDARY_4SIMPLEX, name="dual_s3"),
    }


BOUNDARY_4SIMPLEX = tuple(tuple(v for v in range(5) if v != k) for k in range(5))


def dual_skeleton(tets, name: str = "dual") -> ShadowPolyhedron:
    """Dual 2-skeleton of a closed triangulated 3-manifold, all gleams 0.

    Tetrahedra become tetrahedral points, triangles become arcs (from the
    smaller to the larger incident tetrahedron) and edges become disk
    regions whose boundary walks circle the edge.
    """
    tets = sorted(tuple(sorted(t)) for t in tets)
    tidx = {t: k for k, t in enumerate(tets)}
    inc: dict[tuple, list[tuple]] = {}
    for t in tets:
        for tri in itertools.combinations(t, 3):
            inc.setdefault(tri, []).append(t)
    if any(len(v) != 2 for v in inc.values()):
        raise ShadowError("not a closed 3-pseudomanifold")
    tris = sorted(inc)
    arc_id = {tri: str(k) for k, tri in enumerate(tris)}
    strata = tuple(Stratum(arc_id[tri], "arc", (tidx[min(inc[tri])], tidx[max(inc[tri])])) for tri in tris)
    edges = sorted({e for t in tets for e in itertools.combinations(t, 2)})
    regions = []
    enter_leave = {}  # (point, region) -> (arc in, arc out)
    for k, e in enumerate(edges):
        start = next(t for t in tets if set(e) <= set(t))
        tri = next(tr for tr in itertools.combinations(start, 3) if set(e) <= set(tr))
        walk = []
        cur = start
        while True:
            a, b = inc[tri]
            nxt = b if a == cur else a
            sign = 1 if tidx[nxt] > tidx[cur] else -1
            walk.append((sign, arc_id[tri], tri.index(next(v for v in tri if v not in e))))
            cur = nxt
            tri = next(tr for tr in itertools.combinations(cur, 3) if set(e) <= set(tr) and tr != tri)
            if cur == start and tri == next(tr for tr in itertools.combinations(start, 3) if set(e) <= set(tr)):
                break
        # slot of a side: position of the opposite vertex in the triangle
        regions.append(Region(str(k), 0, 1, 0, (tuple(walk),)))
        for j in range(len(walk)):
            s_in, a_in, _ = walk[j - 1]
            s_out, a_out, _ = walk[j]
            ends = strata[int(a_in)].ends
            x = ends[1] if s_in > 0 else ends[0]
            enter_leave[(x, str(k))] = (a_in, a_out)
    points = []
    eid = {e: str(k) for k, e in enumerate(edges)}
    for t in tets:
        x = tidx[t]
        germ_tris = [tuple(v for v in t if v != t[i]) for i in range(4)]
        germs = tuple(arc_id[g] for g in germ_tris)
        corners = []
        for i, j in PAIRS:
            e = tuple(sorted(set(germ_tris[i]) & set(germ_tris[j])))
            a_in, a_out = enter_leave[(x, eid[e])]
            corners.append((1 if (a_in, a_out) == (germs[j], germs[i]) else -1, eid[e]))
        points.append(TetraPoint(x, germs, tuple(corners)))
    return ShadowPolyhedron(name, len(tets), strata, tuple(regions), tuple(points))
