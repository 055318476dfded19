"""Oriented combinatorial closed 4-manifolds.

A complex is a set of 5-vertex facets over a totally ordered vertex set.  The
orientation sign of a facet compares the orientation given by its increasing
vertex order with the global orientation.  Signs are found by propagation from
a seed facet: two facets f, g sharing the 3-cell obtained by deleting position
k of f and position kk of g must satisfy sign(g) = -sign(f) (-1)^(k + kk).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from . import zlinalg

Simplex = tuple[int, ...]
MOVES = ("1-5", "2-4", "3-3", "4-2", "5-1")


class ComplexError(ValueError):
    pass


class MoveError(ComplexError):
    """The site does not admit the requested move."""


def _faces_of(s: Simplex, k: int) -> Iterable[Simplex]:
    return itertools.combinations(s, k + 1)


def _propagate(facets: Sequence[Simplex], seed: Simplex, seed_sign: int):
    """Greedy sign propagation.  Returns (signs, conflict) where conflict is a
    3-cell witnessing non-orientability (or None)."""
    by_tet: dict[Simplex, list[tuple[Simplex, int]]] = {}
    for f in facets:
        for k in range(5):
            by_tet.setdefault(f[:k] + f[k + 1:], []).append((f, k))
    signs = {seed: seed_sign}
    stack = [seed]
    conflict = None
    while stack:
        f = stack.pop()
        for k in range(5):
            t = f[:k] + f[k + 1:]
            for g, kk in by_tet[t]:
                if g == f:
                    continue
                sg = -signs[f] * (-1) ** (k + kk)
                if g in signs:
                    if signs[g] != sg and conflict is None:
                        conflict = t
                else:
                    signs[g] = sg
                    stack.append(g)
    return signs, conflict


@dataclass(frozen=True)
class Complex4:
    """Closed combinatorial 4-manifold candidate with orientation signs.

    ``signs`` is None when no coherent orientation exists (see check_manifold).
    """

    vertices: tuple[int, ...]
    facets: tuple[Simplex, ...]
    signs: dict | None = field(default=None, compare=False)
    orientation_conflict: Simplex | None = field(default=None, compare=False)

    @classmethod
    def build(cls, facets: Iterable[Sequence[int]], vertices: Iterable[int] | None = None,
              seed: tuple[Simplex, int] | None = None, overrides: dict | None = None) -> "Complex4":
        fs = sorted({tuple(sorted(int(v) for v in f)) for f in facets})
        for f in fs:
            if len(f) != 5 or len(set(f)) != 5:
                raise ComplexError(f"facet {f} does not have five distinct vertices")
        if not fs:
            raise ComplexError("no facets")
        vs = tuple(sorted(set(vertices) if vertices is not None else {v for f in fs for v in f}))
        if not {v for f in fs for v in f} <= set(vs):
            raise ComplexError("facet uses an undeclared vertex")
        overrides = dict(overrides or {})
        if seed is None:
            seed = next(iter(overrides.items())) if overrides else (fs[0], 1)
        signs, conflict = _propagate(fs, seed[0], seed[1])
        if conflict is None:
            for f, s in overrides.items():
                if f in signs and signs[f] != s:
                    conflict = f
                    break
        if len(signs) < len(fs):
            # disconnected: leave unreached facets unsigned; check_manifold reports it
            pass
        return cls(vs, tuple(fs), None if conflict else signs, conflict)

    # ----- face lattice --------------------------------------------------
    def faces(self, k: int) -> list[Simplex]:
        if not 0 <= k <= 4:
            raise ComplexError("face dimension must be between 0 and 4")
        return sorted({t for f in self.facets for t in _faces_of(f, k)})

    @property
    def fvector(self) -> tuple[int, ...]:
        return tuple(len(self.faces(k)) for k in range(5))

    @property
    def euler(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.fvector))

    def simplex(self, s: Iterable[int]) -> Simplex:
        t = tuple(sorted(s))
        if not t or not any(set(t) <= set(f) for f in self.facets):
            raise ComplexError(f"unknown simplex {t}")
        return t

    def star(self, s: Iterable[int]) -> list[Simplex]:
        """All simplices containing s (the closed star's top part)."""
        t = set(self.simplex(s))
        return sorted({u for f in self.facets if t <= set(f)
                       for k in range(5) for u in _faces_of(f, k) if t <= set(u)})

    def closed_star(self, s: Iterable[int]) -> list[Simplex]:
        t = set(self.simplex(s))
        return sorted({u for f in self.facets if t <= set(f) for k in range(5) for u in _faces_of(f, k)})

    def link(self, s: Iterable[int]) -> list[Simplex]:
        """Simplices of the closed star disjoint from s."""
        t = set(self.simplex(s))
        return [u for u in self.closed_star(s) if not t & set(u)]

    def link_facets(self, s: Iterable[int]) -> list[Simplex]:
        t = set(self.simplex(s))
        return sorted(tuple(v for v in f if v not in t) for f in self.facets if t <= set(f))

    def sign(self, f: Sequence[int]) -> int:
        if self.signs is None:
            raise ComplexError("complex is not orientable")
        return self.signs[tuple(f)]

    def flipped(self) -> "Complex4":
        if self.signs is None:
            raise ComplexError("complex is not orientable")
        return Complex4(self.vertices, self.facets, {f: -s for f, s in self.signs.items()}, None)

    def relabeled(self) -> "Complex4":
        """Order-preserving relabeling onto 0..n-1 (orientation unchanged)."""
        m = {v: i for i, v in enumerate(self.vertices)}
        signs = None if self.signs is None else {tuple(m[v] for v in f): s for f, s in self.signs.items()}
        return Complex4(tuple(range(len(self.vertices))),
                        tuple(tuple(m[v] for v in f) for f in self.facets), signs,
                        self.orientation_conflict)


# ----- homology ------------------------------------------------------------

def boundary_matrix(upper: Sequence[Simplex], lower: Sequence[Simplex]) -> list[list[int]]:
    """Matrix of the boundary map C_k -> C_{k-1} (rows: lower simplices)."""
    idx = {s: i for i, s in enumerate(lower)}
    m = [[0] * len(upper) for _ in lower]
    for j, s in enumerate(upper):
        for k in range(len(s)):
            m[idx[s[:k] + s[k + 1:]]][j] += (-1) ** k
    return m


def homology(top: Sequence[Simplex]) -> list[tuple[int, list[int]]]:
    """Integral homology of the complex generated by `top`: (betti, torsion) per degree."""
    n = max(len(s) for s in top) - 1
    cells = [sorted({u for s in top for u in _faces_of(s, k)}) for k in range(n + 1)]
    diags = [None]
    for k in range(1, n + 1):
        diags.append(zlinalg.snf_diagonal(boundary_matrix(cells[k], cells[k - 1])))
    out = []
    for k in range(n + 1):
        rank_out = sum(1 for d in diags[k] if d) if k else 0
        dk1 = diags[k + 1] if k < n else []
        rank_in = sum(1 for d in dk1 if d)
        torsion = [d for d in dk1 if d > 1]
        out.append((len(cells[k]) - rank_out - rank_in, torsion))
    return out


def betti(c: Complex4) -> list[int]:
    return [b for b, _ in homology(list(c.facets))]


# ----- manifold checks -------------------------------------------------

@dataclass
class ManifoldReport:
    ok: bool
    fvector: tuple[int, ...]
    euler: int
    problems: list[str]

    def format(self) -> str:
        lines = [f"f-vector {self.fvector}  euler {self.euler}"]
        lines += [f"  FAIL {p}" for p in self.problems]
        lines.append("result: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)


def _pseudomanifold_problems(top: Sequence[Simplex], what: str) -> list[str]:
    count: dict[Simplex, int] = {}
    for f in top:
        for k in range(len(f)):
            t = f[:k] + f[k + 1:]
            count[t] = count.get(t, 0) + 1
    bad = sorted(t for t, n in count.items() if n != 2)
    if bad:
        return [f"{what}: cell {bad[0]} lies in {count[bad[0]]} top simplices (needs 2)"]
    return []


def _connected(top: Sequence[Simplex]) -> bool:
    if not top:
        return False
    by_face: dict[Simplex, list[int]] = {}
    for i, f in enumerate(top):
        for k in range(len(f)):
            by_face.setdefault(f[:k] + f[k + 1:], []).append(i)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        f = top[i]
        for k in range(len(f)):
            for j in by_face[f[:k] + f[k + 1:]]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    return len(seen) == len(top)


def check_manifold(c: Complex4) -> ManifoldReport:
    problems = _pseudomanifold_problems(c.facets, "closed pseudomanifold")
    if not _connected(list(c.facets)):
        problems.append("facet adjacency graph is disconnected")
    if c.signs is None:
        problems.append(f"no coherent orientation (conflict at {c.orientation_conflict})")
    elif len(c.signs) != len(c.facets):
        problems.append("orientation does not reach every facet")
    used = {v for f in c.facets for v in f}
    for v in c.vertices:
        if v not in used:
            problems.append(f"vertex {v} lies in no facet")
            continue
        lk = c.link_facets((v,))
        sub = _pseudomanifold_problems(lk, f"link of vertex {v}")
        if sub:
            problems += sub
            continue
        if not _connected(lk):
            problems.append(f"link of vertex {v} is disconnected")
            continue
        h = homology(lk)
        chi = sum((-1) ** k * (b) for k, (b, _) in enumerate(h))
        sphere = [b for b, _ in h] == [1, 0, 0, 1] and not any(t for _, t in h)
        if chi != 0 or not sphere:
            problems.append(f"link of vertex {v} is not a homology 3-sphere (H = {h})")
    return ManifoldReport(not problems, c.fvector, c.euler, problems)


# ----- Pachner moves ---------------------------------------------------

def _result(c: Complex4, new_facets, vertices, removed) -> Complex4:
    keep = [f for f in c.facets if f not in removed]
    seed = None
    if c.signs is not None and keep:
        seed = (keep[0], c.signs[keep[0]])
    out = Complex4.build(keep + [tuple(sorted(f)) for f in new_facets], vertices, seed=seed)
    if out.signs is None and c.signs is not None:
        raise MoveError("move produced a non-orientable complex")
    return out


def _as_facet(c: Complex4, site) -> Simplex:
    if isinstance(site, int):
        if not 0 <= site < len(c.facets):
            raise MoveError(f"no facet with index {site}")
        return c.facets[site]
    f = tuple(sorted(site))
    if f not in c.facets:
        raise MoveError(f"{f} is not a facet")
    return f


def move_15(c: Complex4, site) -> Complex4:
    f = _as_facet(c, site)
    nv = max(c.vertices) + 1
    new = [f[:k] + f[k + 1:] + (nv,) for k in range(5)]
    return _result(c, new, c.vertices + (nv,), {f})


def move_24(c: Complex4, site) -> Complex4:
    """Site: the shared 3-cell, or the pair of facets sharing it."""
    if len(site) == 2 and not isinstance(site[0], int):
        f, g = (_as_facet(c, s) for s in site)
        t = tuple(sorted(set(f) & set(g)))
        if len(t) != 4:
            raise MoveError("the two facets do not share a 3-cell")
    else:
        t = tuple(sorted(site))
        if len(t) != 4:
            raise MoveError("(2,4) site must be a 3-cell or two facets")
    inc = [f for f in c.facets if set(t) <= set(f)]
    if len(inc) != 2:
        raise MoveError(f"3-cell {t} is not in exactly two facets")
    a, b = (set(f).difference(t).pop() for f in inc)
    if any({a, b} <= set(f) for f in c.facets):
        raise MoveError(f"edge {(min(a, b), max(a, b))} already exists")
    new = [tuple(set(t) - {v} | {a, b}) for v in t]
    return _result(c, new, c.vertices, set(inc))


def move_42(c: Complex4, site) -> Complex4:
    """Site: an edge with exactly four incident facets."""
    e = tuple(sorted(site))
    if len(e) != 2:
        raise MoveError("(4,2) site must be an edge")
    inc = [f for f in c.facets if set(e) <= set(f)]
    t = set().union(*inc) - set(e) if inc else set()
    if len(inc) != 4 or len(t) != 4 or {tuple(sorted(set(t) - {v} | set(e))) for v in t} != set(inc):
        raise MoveError(f"edge {e} does not have the (4,2) configuration")
    if any(t <= set(f) for f in c.facets):
        raise MoveError(f"3-cell {tuple(sorted(t))} already exists")
    return _result(c, [tuple(t | {e[0]}), tuple(t | {e[1]})], c.vertices, set(inc))


def move_33(c: Complex4, site) -> Complex4:
    """Site: a triangle with exactly three incident facets."""
    T = set(site)
    if len(T) != 3:
        raise MoveError("(3,3) site must be a triangle")
    inc = [f for f in c.facets if T <= set(f)]
    if len(inc) != 3:
        raise MoveError(f"triangle {tuple(sorted(T))} is not in exactly three facets")
    abc = set().union(*inc) - T
    if len(abc) != 3:
        raise MoveError("triangle link is not a 3-cycle")
    if any(abc <= set(f) for f in c.facets):
        raise MoveError(f"triangle {tuple(sorted(abc))} already exists")
    return _result(c, [tuple(abc | (T - {v})) for v in T], c.vertices, set(inc))


def move_51(c: Complex4, site) -> Complex4:
    """Site: a vertex with exactly five incident facets."""
    v = site[0] if isinstance(site, (tuple, list)) else site
    inc = [f for f in c.facets if v in f]
    w = set().union(*inc) - {v} if inc else set()
    if len(inc) != 5 or len(w) != 5:
        raise MoveError(f"vertex {v} does not have the (5,1) configuration")
    if tuple(sorted(w)) in c.facets:
        raise MoveError("the replacing facet already exists")
    return _result(c, [tuple(w)], tuple(x for x in c.vertices if x != v), set(inc))


_MOVE_FN = {"1-5": move_15, "2-4": move_24, "3-3": move_33, "4-2": move_42, "5-1": move_51}


def pachner(c: Complex4, move: str, site) -> Complex4:
    key = move.replace(",", "-").strip("() ")
    if key not in _MOVE_FN:
        raise MoveError(f"unknown move {move!r}; expected one of {', '.join(MOVES)}")
    return _MOVE_FN[key](c, site)


def sites(c: Complex4, move: str) -> list:
    """All sites admitting the move, in a fixed order."""
    key = move.replace(",", "-").strip("() ")
    if key == "1-5":
        cand = list(c.facets)
    elif key == "2-4":
        cand = c.faces(3)
    elif key == "3-3":
        cand = c.faces(2)
    elif key == "4-2":
        cand = c.faces(1)
    elif key == "5-1":
        cand = [(v,) for v in c.vertices]
    else:
        raise MoveError(f"unknown move {move!r}")
    out = []
    for s in cand:
        try:
            _MOVE_FN[key](c, s)
        except MoveError:
            continue
        out.append(s)
    return out


def isomorphic(a: Complex4, b: Complex4) -> bool:
    """Brute-force isomorphism test for small complexes."""
    if a.fvector != b.fvector:
        return False
    fb = set(b.facets)
    for perm in itertools.permutations(b.vertices):
        m = dict(zip(a.vertices, perm))
        if all(tuple(sorted(m[v] for v in f)) in fb for f in a.facets):
            return True
    return False


# ----- standard complexes and I/O --------------------------------------

def boundary_simplex() -> Complex4:
    """The boundary of the 5-simplex (a 6-vertex 4-sphere)."""
    return Complex4.build([tuple(v for v in range(6) if v != k) for k in range(6)])


def loads(text: str) -> Complex4:
    n = None
    facets, overrides = [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "dim":
            if tok[1:] != ["4"]:
                raise ComplexError(f"line {lineno}: only dim 4 is supported")
        elif tok[0] == "vertices":
            try:
                n = int(tok[1])
            except (IndexError, ValueError):
                raise ComplexError(f"line {lineno}: bad vertices line") from None
        else:
            sgn = None
            if tok[-1] in ("+", "-"):
                sgn = 1 if tok[-1] == "+" else -1
                tok = tok[:-1]
            try:
                f = tuple(int(x) for x in tok)
            except ValueError:
                raise ComplexError(f"line {lineno}: cannot parse {raw.strip()!r}") from None
            if len(f) != 5:
                raise ComplexError(f"line {lineno}: a facet needs five vertices")
            if list(f) != sorted(f):
                raise ComplexError(f"line {lineno}: facet vertices must be ascending")
            if n is not None and not all(0 <= v < n for v in f):
                raise ComplexError(f"line {lineno}: vertex out of range")
            facets.append(f)
            if sgn is not None:
                overrides[f] = sgn
    if n is None:
        raise ComplexError("missing 'vertices' line")
    return Complex4.build(facets, range(n), overrides=overrides)


def dumps(c: Complex4, signs: bool = False) -> str:
    r = c.relabeled()
    out = ["dim 4", f"vertices {len(r.vertices)}"]
    for f in r.facets:
        line = " ".join(map(str, f))
        if signs and r.signs is not None:
            line += " +" if r.signs[f] > 0 else " -"
        out.append(line)
    return "\n".join(out) + "\n"


def load(path: str) -> Complex4:
    with open(path) as fh:
        return loads(fh.read())


def save(c: Complex4, path: str, signs: bool = False) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(c, signs))


def data_path(name: str) -> str:
    return str(resources.files("qshadow") / "data" / name)


def shipped(name: str) -> Complex4:
    """A shipped triangulation ('s4' or 'cp2_9'), re-verified on load."""
    fname = name if name.endswith(".tri") else name + ".tri"
    c = load(data_path(fname))
    rep = check_manifold(c)
    if not rep.ok:
        raise ComplexError(f"shipped triangulation {fname} failed verification: {rep.problems}")
    return c
