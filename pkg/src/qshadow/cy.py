"""Crane-Yetter state sums of triangulated closed oriented 4-manifolds.

A coloring labels every triangle (vertices in increasing order) by a simple
object; the opposite orientation carries the dual label.  A 3-cell abcd with
a < b < c < d is admissible when its channel space hom4(x_abc, x_acd, x_abd*,
x_bcd*) is nonzero.  Each facet contributes the 15j value of its ten face
labels and five channels, each 3-cell's channel m is summed with weight
1/dim(m), each triangle contributes dim(x), and the total is scaled by
D^(2(n0 - n1) - chi).

The 15j reduction of a facet 01234 with channels m_abcd:

    sum_t d_t F^{x012 x023 x034}_t[m0123, m0234]
        sum_u (F^{x012 x234 x024}_t)^-1[m0234, u] B_u F^{x234 x012 x024}_t[u, m0124]
        (F^{x234 x124 x014}_t)^-1[m0124, m1234] F^{x123 x134 x014}_t[m1234, m0134]
        (F^{x123 x013 x034}_t)^-1[m0134, m0123]

with B_u = braid1(x012, x234, u*)^(-sign): the mirrored symbol of a facet of
sign -1 uses the inverse braiding.

Three strategies are available.  ``backtrack`` enumerates colorings with
pruning and contracts channels per coloring in batches.  ``cocycle`` (pointed
categories) enumerates the 2-cocycles directly.  ``contract`` evaluates the
whole sum as one tensor network without enumerating colorings.  On exact
pointed data every term is a root of unity, so sums are accumulated as integer
histograms of exponents and the result is exact.
"""
from __future__ import annotations

import itertools
import math
import multiprocessing
import os
import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import opt_einsum as oe

from . import zlinalg
from .category import CoordinatedCategory
from .simplicial import Complex4, check_manifold

TRI = list(itertools.combinations(range(5), 3))
TET = list(itertools.combinations(range(5), 4))
_TP = {t: i for i, t in enumerate(TRI)}
# positions in TRI of the faces (abc, acd, abd, bcd) of each tet
TET_FACES = [(_TP[(a, b, c)], _TP[(a, c, d)], _TP[(a, b, d)], _TP[(b, c, d)]) for a, b, c, d in TET]

GUARD_LOG2 = 34
STRATEGIES = ("auto", "backtrack", "cocycle", "contract")
_BATCH = 1 << 14
_LO_BITS = 20


class CYError(ValueError):
    pass


class ResourceLimit(CYError):
    def __init__(self, estimate: float):
        self.estimate = estimate
        super().__init__(
            f"estimated {estimate:.3g} colorings (about 2^{math.log2(estimate):.1f}) exceeds "
            f"the limit 2^{GUARD_LOG2}; rerun with --force to evaluate anyway")


class NotRoot(ArithmeticError):
    pass


# ----- 15j symbols -------------------------------------------------------

class _Root:
    """Root of unity z^e in Z/M (None = zero).  Sums must have one term."""

    __slots__ = ("e", "M")

    def __init__(self, e, M):
        self.e = None if e is None else e % M
        self.M = M

    def __mul__(self, o):
        if self.e is None or o.e is None:
            return _Root(None, self.M)
        return _Root(self.e + o.e, self.M)

    def __add__(self, o):
        if o.e is None:
            return self
        if self.e is None:
            return o
        raise NotRoot("sum of two nonzero roots")

    def is_zero(self):
        return self.e is None


class _Tables:
    """F, F^-1, braid and dimension lookups used by the 15j reduction."""

    def __init__(self, cat: CoordinatedCategory, roots: bool = False):
        self.cat = cat
        self.n = cat.size
        s = cat.star
        if roots:
            M = cat.field.order
            rexp = cat.field.root_exponent

            def conv(x):
                e = rexp(x)
                if e is None:
                    raise NotRoot(f"{x} is not a root of unity")
                return _Root(e, M)
            self.zero = _Root(None, M)
        else:
            def conv(x):
                return x
            self.zero = cat.field.zero()
        self.F, self.Fi = {}, {}
        for (a, b, e, c, d, f), v in cat.sixj_table.items():
            self.F[(a, b, c, d, e, f)] = conv(v * cat.dimP[e] * cat.dimP[f])
            # (F^{a* b* c*}_{d*})^-1[f*, e*] uses the same 6j entry
            self.Fi[(s[a], s[b], s[c], s[d], s[f], s[e])] = conv(v * cat.dimP[e] * cat.dimP[f])
        self.B = {1: {}, -1: {}}
        for (a, b, w), v in cat.braid1.items():
            self.B[-1][(a, b, s[w])] = conv(v)
            self.B[1][(a, b, s[w])] = conv(v.inv())
        self.d = [conv(x) for x in cat.dim]
        self.w = [conv(x.inv()) for x in cat.dim]


def _amp(T: _Tables, x, m, sign):
    """15j value: x = 10 labels in TRI order, m = 5 channels in TET order."""
    x012, x013, x014, x023, x024, x034, x123, x124, x134, x234 = x
    m0123, m0124, m0134, m0234, m1234 = m
    F, Fi, B, z = T.F, T.Fi, T.B[1 if sign > 0 else -1], T.zero
    total = z
    for t in range(T.n):
        a = F.get((x012, x023, x034, t, m0123, m0234))
        if a is None:
            continue
        b = Fi.get((x123, x013, x034, t, m0134, m0123))
        if b is None:
            continue
        c = F.get((x123, x134, x014, t, m1234, m0134))
        if c is None:
            continue
        e = Fi.get((x234, x124, x014, t, m0124, m1234))
        if e is None:
            continue
        mid = z
        for u in range(T.n):
            p = Fi.get((x012, x234, x024, t, m0234, u))
            if p is None:
                continue
            q = F.get((x234, x012, x024, t, u, m0124))
            if q is None:
                continue
            mid = mid + p * B[(x012, x234, u)] * q
        total = total + T.d[t] * a * mid * e * c * b
    return total


def channel_lists(cat: CoordinatedCategory, x) -> list[list[int]]:
    s = cat.star
    return [cat.hom4_channels(x[i], x[j], s[x[k]], s[x[l]]) for i, j, k, l in TET_FACES]


@dataclass(frozen=True)
class SimplexSymbol:
    facet: tuple[int, ...]
    labels: tuple[int, ...]
    sign: int


def eval_15j(cat: CoordinatedCategory, sym: SimplexSymbol, channels) -> object:
    """The 15j scalar of one colored facet with the given channels."""
    ch = channel_lists(cat, sym.labels)
    for i, mm in enumerate(channels):
        if mm not in ch[i]:
            raise CYError(f"channel {mm} is not admissible on 3-cell {TET[i]}")
    return _amp(_tables(cat), tuple(sym.labels), tuple(channels), sym.sign)


def _tables(cat, roots=False) -> _Tables:
    key = "_cy_tables_roots" if roots else "_cy_tables"
    t = cat.__dict__.get(key)
    if t is None:
        t = _Tables(cat, roots)
        cat.__dict__[key] = t
    return t


def facet_value(cat: CoordinatedCategory, labels, sign: int):
    """Sum over channels of 15j times channel weights (for a lone facet)."""
    T = _tables(cat)
    total = T.zero
    for m in itertools.product(*channel_lists(cat, labels)):
        v = _amp(T, tuple(labels), m, sign)
        for mm in m:
            v = v * T.w[mm]
        total = total + v
    return total


# ----- problem setup -----------------------------------------------------

class Problem:
    """Index bookkeeping for one complex with orientation."""

    def __init__(self, c: Complex4, flip: bool = False):
        if c.signs is None:
            raise CYError("complex is not orientable")
        self.complex = c
        self.tris = c.faces(2)
        self.tets = c.faces(3)
        ti = {t: i for i, t in enumerate(self.tris)}
        qi = {t: i for i, t in enumerate(self.tets)}
        self.facets = list(c.facets)
        self.signs = [(-1 if flip else 1) * c.signs[f] for f in self.facets]
        self.ftri = np.array([[ti[tuple(f[p] for p in t)] for t in TRI] for f in self.facets], dtype=np.int64)
        self.ftet = np.array([[qi[tuple(f[p] for p in t)] for t in TET] for f in self.facets], dtype=np.int64)
        self.tet_tris = np.array([[ti[(a, b, cc)], ti[(a, cc, d)], ti[(a, b, d)], ti[(b, cc, d)]]
                                  for a, b, cc, d in self.tets], dtype=np.int64)
        n0, n1 = len(c.faces(0)), len(c.faces(1))
        self.n0, self.n1 = n0, n1
        self.chi = c.euler
        # owner facet of each triangle / tet, for folding weights into facet tables
        self.tri_owner = np.full(len(self.tris), -1)
        self.tet_owner = np.full(len(self.tets), -1)
        for fi in range(len(self.facets)):
            for j in range(10):
                if self.tri_owner[self.ftri[fi, j]] < 0:
                    self.tri_owner[self.ftri[fi, j]] = fi
            for j in range(5):
                if self.tet_owner[self.ftet[fi, j]] < 0:
                    self.tet_owner[self.ftet[fi, j]] = fi

    def prefactor_exp(self) -> int:
        return 2 * (self.n0 - self.n1) - self.chi


# ----- enumeration ---------------------------------------------------------

def _adm4(cat: CoordinatedCategory) -> np.ndarray:
    """Boolean table over (x_abc, x_acd, x_abd, x_bcd) codes."""
    n = cat.size
    s = cat.star
    out = np.zeros(n ** 4, dtype=bool)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        out[((a * n + b) * n + c) * n + d] = bool(cat.hom4_channels(a, b, s[c], s[d]))
    return out


def _triangle_order(p: Problem) -> tuple[list[int], list[list[int]]]:
    """Greedy order completing 3-cells as early as possible; returns the order
    and, per step, the tets completed at that step."""
    ntri = len(p.tris)
    tets_of = [[] for _ in range(ntri)]
    for q, tt in enumerate(p.tet_tris):
        for t in tt:
            tets_of[t].append(q)
    done = np.zeros(ntri, bool)
    missing = np.array([4] * len(p.tets))
    order, completes = [], []
    for _ in range(ntri):
        best, key = None, None
        for t in range(ntri):
            if done[t]:
                continue
            k = (sum(1 for q in tets_of[t] if missing[q] == 1),
                 sum(1 for q in tets_of[t] if missing[q] < 4), -t)
            if key is None or k > key:
                best, key = t, k
        done[best] = True
        order.append(best)
        step = []
        for q in tets_of[best]:
            missing[q] -= 1
            if missing[q] == 0:
                step.append(q)
        completes.append(step)
    return order, completes


class ColoringIterator:
    """Admissible colorings of a complex, as label arrays indexed like
    ``complex.faces(2)``.  Iteration yields tuples; ``batches`` yields arrays."""

    def __init__(self, c: Complex4, cat: CoordinatedCategory, strategy: str = "backtrack",
                 problem: Problem | None = None):
        if strategy not in ("backtrack", "cocycle"):
            raise CYError(f"unknown enumeration strategy {strategy!r}")
        if strategy == "cocycle" and cat.pointed_order is None:
            raise CYError("the cocycle strategy needs a pointed category")
        self.complex = c
        self.cat = cat
        self.strategy = strategy
        self.problem = problem or Problem(c)
        if strategy == "backtrack":
            self.order, self.completes = _triangle_order(self.problem)
            self.adm = _adm4(cat)
        else:
            self.gens = cocycle_generators(self.problem, cat.pointed_order)

    # -- backtracking
    def _expand(self, P: np.ndarray, depth: int) -> np.ndarray:
        n = self.cat.size
        rows = P.shape[0]
        Q = np.empty((rows * n, P.shape[1]), dtype=np.uint8)
        Q[:] = np.repeat(P, n, axis=0)
        t = self.order[depth]
        Q[:, t] = np.tile(np.arange(n, dtype=np.uint8), rows)
        keep = np.ones(len(Q), bool)
        tt = self.problem.tet_tris
        for q in self.completes[depth]:
            a, b, c, d = tt[q]
            code = ((Q[:, a].astype(np.int64) * n + Q[:, b]) * n + Q[:, c]) * n + Q[:, d]
            keep &= self.adm[code]
        return Q[keep]

    def _leaves(self, P: np.ndarray, depth: int) -> Iterator[np.ndarray]:
        ntri = len(self.problem.tris)
        if depth == ntri:
            yield P
            return
        Q = self._expand(P, depth)
        if len(Q) == 0:
            return
        if len(Q) > _BATCH:
            for k in range(0, len(Q), _BATCH):
                yield from self._leaves(Q[k:k + _BATCH], depth + 1)
        else:
            yield from self._leaves(Q, depth + 1)

    def tasks(self) -> list:
        """Disjoint sub-ranges covering the coloring set, in a fixed order."""
        if self.strategy == "backtrack":
            return list(range(self.cat.size))
        total = self.count_estimate()
        step = max(1, -(-total // 64))
        return [(k, min(total, k + step)) for k in range(0, total, step)]

    def batches(self, task=None) -> Iterator[np.ndarray]:
        ntri = len(self.problem.tris)
        if self.strategy == "backtrack":
            starts = [task] if task is not None else range(self.cat.size)
            buf, size = [], 0
            for lab in starts:
                P = np.zeros((1, ntri), dtype=np.uint8)
                P[0, self.order[0]] = lab
                keep = True
                for q in self.completes[0]:
                    a, b, c, d = self.problem.tet_tris[q]
                    n = self.cat.size
                    keep &= bool(self.adm[((int(P[0, a]) * n + P[0, b]) * n + P[0, c]) * n + P[0, d]])
                if not keep:
                    continue
                for leaf in self._leaves(P, 1):
                    buf.append(leaf)
                    size += len(leaf)
                    if size >= _BATCH:
                        yield np.concatenate(buf)
                        buf, size = [], 0
            if buf:
                yield np.concatenate(buf)
        else:
            lo, hi = task if task is not None else (0, self.count_estimate())
            N = self.cat.pointed_order
            G = np.array([g for g, _ in self.gens], dtype=np.int64).reshape(len(self.gens), ntri)
            orders = [o for _, o in self.gens]
            for k in range(lo, hi, _BATCH):
                idx = np.arange(k, min(hi, k + _BATCH), dtype=np.int64)
                coeff = np.empty((len(idx), len(orders)), dtype=np.int64)
                rest = idx.copy()
                for j, o in enumerate(orders):
                    coeff[:, j] = rest % o
                    rest //= o
                yield ((coeff @ G) % N).astype(np.uint8)

    def count_estimate(self) -> int:
        if self.strategy == "cocycle":
            return math.prod(o for _, o in self.gens)
        return self.cat.size ** len(self.problem.tris)

    def __iter__(self):
        for b in self.batches():
            for row in b:
                yield tuple(int(v) for v in row)

    def count(self) -> int:
        return sum(len(b) for b in self.batches())


def colorings(c: Complex4, cat: CoordinatedCategory, strategy: str = "backtrack") -> ColoringIterator:
    return ColoringIterator(c, cat, strategy)


def coboundary_matrix(p: Problem) -> list[list[int]]:
    """Rows: 3-cells; columns: triangles; (delta x)(abcd) = x_bcd - x_acd + x_abd - x_abc."""
    ti = {t: i for i, t in enumerate(p.tris)}
    rows = []
    for a, b, c, d in p.tets:
        r = [0] * len(p.tris)
        r[ti[(b, c, d)]] += 1
        r[ti[(a, c, d)]] -= 1
        r[ti[(a, b, d)]] += 1
        r[ti[(a, b, c)]] -= 1
        rows.append(r)
    return rows


def cocycle_generators(p: Problem, N: int):
    if N == 1:
        return []
    return zlinalg.nullspace_mod_with_orders(coboundary_matrix(p), N, len(p.tris))


# ----- evaluation engines ------------------------------------------------

class _RootEngine:
    """Exact pointed data: per-facet exponent tables with folded weights."""

    def __init__(self, cat: CoordinatedCategory, p: Problem):
        self.N = N = cat.pointed_order
        self.M = M = cat.field.order
        T = _tables(cat, roots=True)
        self.codes = N ** 10
        digits = np.array(list(itertools.product(range(N), repeat=10))[::1], dtype=np.int64)[:, ::-1] \
            if N > 1 else np.zeros((1, 10), dtype=np.int64)
        # digits[c, j] is the label of face j in code c = sum_j label_j N^j
        self.digits = digits
        self.pow = N ** np.arange(10, dtype=np.int64)
        base = {1: np.zeros(self.codes, np.int64), -1: np.zeros(self.codes, np.int64)}
        valid = np.zeros(self.codes, bool)
        # local cocycles: labels on faces 0ab are free, the rest follow
        free = [_TP[t] for t in TRI if t[0] == 0]
        for vals in itertools.product(range(N), repeat=6):
            x = [0] * 10
            for j, v in zip(free, vals):
                x[j] = v
            for b, c, d in itertools.combinations(range(1, 5), 3):
                x[_TP[(b, c, d)]] = (x[_TP[(0, b, c)]] + x[_TP[(0, c, d)]] - x[_TP[(0, b, d)]]) % N
            code = sum(v * N ** j for j, v in enumerate(x))
            valid[code] = True
            m = tuple((x[i] + x[j]) % N for i, j, _, _ in TET_FACES)
            for sg in (1, -1):
                r = _amp(T, tuple(x), m, sg)
                if r.e is None:
                    raise NotRoot("vanishing 15j on an admissible coloring")
                base[sg][code] = r.e
        dexp = np.array([T.d[a].e for a in range(N)], dtype=np.int64)
        wexp = np.array([T.w[a].e for a in range(N)], dtype=np.int64)
        if 256 % M == 0:
            self.dtype = np.uint8
        elif 65536 % M == 0:
            self.dtype = np.uint16
        else:
            self.dtype = np.int64
        self.tables = []
        for fi in range(len(p.facets)):
            tab = base[p.signs[fi]].copy()
            for j in range(10):
                if p.tri_owner[p.ftri[fi, j]] == fi:
                    tab += dexp[digits[:, j]]
            for j, (a, b, _, _) in enumerate(TET_FACES):
                if p.tet_owner[p.ftet[fi, j]] == fi:
                    tab += wexp[(digits[:, a] + digits[:, b]) % N]
            tab = np.where(valid, tab % M, 0).astype(self.dtype)
            self.tables.append(tab)

    def histogram(self, X: np.ndarray, p: Problem) -> np.ndarray:
        ex = np.zeros(len(X), dtype=self.dtype)
        for fi in range(len(p.facets)):
            code = X[:, p.ftri[fi]].astype(np.int64) @ self.pow
            ex += np.take(self.tables[fi], code)
        return np.bincount(ex.astype(np.int64) % self.M, minlength=self.M)


class _DenseEngine:
    """Float data: per-coloring channel contraction, batched."""

    def __init__(self, cat: CoordinatedCategory, p: Problem):
        self.cat = cat
        self.n = n = cat.size
        self.T = _tables(cat)
        self.pow = n ** np.arange(10, dtype=np.int64)
        self.rowmap = {1: np.full(n ** 10, -1, dtype=np.int64), -1: np.full(n ** 10, -1, dtype=np.int64)}
        self.rows = {1: [], -1: []}
        self.stack = {1: np.zeros((0,) + (n,) * 5, complex), -1: np.zeros((0,) + (n,) * 5, complex)}
        self.dvec = np.array([x.to_complex() for x in cat.dim])
        self.wvec = np.array([1 / x.to_complex() for x in cat.dim])
        # 3-cell weights folded into the owner facet's tensor
        self.W = []
        for fi in range(len(p.facets)):
            W = np.ones((n,) * 5, complex)
            for j in range(5):
                if p.tet_owner[p.ftet[fi, j]] == fi:
                    shape = [1] * 5
                    shape[j] = n
                    W = W * self.wvec.reshape(shape)
            self.W.append(W)
        sym = [oe.get_symbol(q + 1) for q in range(len(p.tets))]
        z = oe.get_symbol(0)
        self.terms = [z + "".join(sym[q] for q in p.ftet[fi]) for fi in range(len(p.facets))]
        self.eq = ",".join(self.terms) + "->" + z
        shapes = [(1,) + (n,) * 5] * len(p.facets)
        self.path, info = oe.contract_path(self.eq, *shapes, shapes=True, optimize="dp")
        self.sub = int(max(1, min(_BATCH, (1 << 22) // max(1, info.largest_intermediate))))

    def _tensor(self, code: int, sign: int) -> np.ndarray:
        n = self.n
        x = tuple(int(code // n ** j) % n for j in range(10))
        out = np.zeros((n,) * 5, complex)
        for m in itertools.product(*channel_lists(self.cat, x)):
            out[m] = _amp(self.T, x, m, sign).to_complex()
        return out

    def _ensure(self, codes: np.ndarray, sign: int) -> None:
        new = [int(c) for c in np.unique(codes) if self.rowmap[sign][c] < 0]
        if not new:
            return
        k = len(self.stack[sign])
        add = np.stack([self._tensor(c, sign) for c in new])
        self.stack[sign] = np.concatenate([self.stack[sign], add])
        for i, c in enumerate(new):
            self.rowmap[sign][c] = k + i

    def evaluate(self, X: np.ndarray, p: Problem) -> complex:
        acc = 0j
        for k in range(0, len(X), self.sub):
            acc += self._evaluate(X[k:k + self.sub], p)
        return acc

    def _evaluate(self, X: np.ndarray, p: Problem) -> complex:
        ops = []
        for fi in range(len(p.facets)):
            sg = p.signs[fi]
            code = X[:, p.ftri[fi]].astype(np.int64) @ self.pow
            self._ensure(code, sg)
            ops.append(self.stack[sg][self.rowmap[sg][code]] * self.W[fi])
        per = _execute(self.terms, ops, self.path, self.terms[0][0])
        tw = np.prod(self.dvec[X.astype(np.int64)], axis=1)
        return complex(np.sum(per * tw))


class _ExactEngine:
    """Generic exact data: channel sums per coloring in exact arithmetic."""

    def __init__(self, cat: CoordinatedCategory, p: Problem):
        self.cat = cat
        self.T = _tables(cat)
        self.cache = {}

    def evaluate(self, X: np.ndarray, p: Problem):
        cat, T = self.cat, self.T
        total = T.zero
        for row in X:
            x = [int(v) for v in row]
            chans = []
            for q, (a, b, c, d) in enumerate(p.tet_tris):
                chans.append(cat.hom4_channels(x[a], x[b], cat.star[x[c]], cat.star[x[d]]))
            sub = T.zero
            for m in itertools.product(*chans):
                v = cat.field.one()
                for mm in m:
                    v = v * T.w[mm]
                for fi in range(len(p.facets)):
                    lab = tuple(x[t] for t in p.ftri[fi])
                    ch = tuple(m[q] for q in p.ftet[fi])
                    key = (lab, ch, p.signs[fi])
                    a = self.cache.get(key)
                    if a is None:
                        a = self.cache[key] = _amp(T, lab, ch, p.signs[fi])
                    v = v * a
                    if v.is_zero():
                        break
                sub = sub + v
            for t in x:
                sub = sub * T.d[t]
            total = total + sub
        return total


# ----- the state sum -----------------------------------------------------

@dataclass
class CYOptions:
    strategy: str = "auto"
    threads: int | None = None
    force: bool = False
    flip: bool = False
    check: bool = True


@dataclass
class CYResult:
    value: object
    colorings: int
    seconds: float
    strategy: str
    estimate: float
    timings: dict = field(default_factory=dict)


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("QSHADOW_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CYError(f"QSHADOW_THREADS must be an integer, got {env!r}") from None
    return 1


def estimate_colorings(c: Complex4, cat: CoordinatedCategory, p: Problem | None = None) -> float:
    p = p or Problem(c)
    if cat.pointed_order is not None:
        return float(math.prod(o for _, o in cocycle_generators(p, cat.pointed_order)))
    return float(cat.size) ** len(p.tris)


def _choose(cat: CoordinatedCategory, estimate: float) -> str:
    if cat.pointed_order is not None:
        return "cocycle"
    if estimate <= 2 ** 22:
        return "backtrack"
    return "contract"


_WORK = {}


def _run_task(task):
    it, engine, p, mode = _WORK["it"], _WORK["engine"], _WORK["p"], _WORK["mode"]
    count = 0
    if mode == "root":
        acc = np.zeros(engine.M, dtype=np.int64)
        for X in it.batches(task):
            count += len(X)
            acc += engine.histogram(X, p)
    elif mode == "float":
        acc = 0j
        for X in it.batches(task):
            count += len(X)
            acc += engine.evaluate(X, p)
    else:
        acc = engine.T.zero
        for X in it.batches(task):
            count += len(X)
            acc = acc + engine.evaluate(X, p)
    return count, acc


def _map(fn, tasks, threads):
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(min(threads, len(tasks))) as pool:
        return pool.map(fn, tasks, chunksize=1)


def _cocycle_root_sum(it: ColoringIterator, engine: _RootEngine, p: Problem, threads: int):
    """Histogram over all cocycles using a lo/hi split of the generators."""
    N = it.cat.pointed_order
    gens = it.gens
    ntri = len(p.tris)
    G = np.array([g for g, _ in gens], dtype=np.int64).reshape(len(gens), ntri)
    orders = [o for _, o in gens]
    k = 0
    prod = 1
    while k < len(orders) and prod * orders[k] <= 1 << _LO_BITS:
        prod *= orders[k]
        k += 1
    lo_orders, hi_orders = orders[:k], orders[k:]
    L = prod
    idx = np.arange(L, dtype=np.int64)
    coeff = np.empty((L, k), dtype=np.int64)
    rest = idx.copy()
    for j, o in enumerate(lo_orders):
        coeff[:, j] = rest % o
        rest //= o
    lo_codes = []
    for fi in range(len(p.facets)):
        lab = (coeff @ G[:k][:, p.ftri[fi]]) % N
        lo_codes.append((lab @ engine.pow).astype(np.int32))
    del coeff
    H = math.prod(hi_orders)
    _WORK.update(lo=lo_codes, hiG=G[k:], hi_orders=hi_orders, engine=engine, p=p, N=N)
    step = max(1, -(-H // 64))
    tasks = [(a, min(H, a + step)) for a in range(0, H, step)]
    parts = _map(_hi_task, tasks, threads)
    return L * H, sum(parts[1:], parts[0])


def _hi_task(task):
    lo, G, orders, engine, p, N = (_WORK[k] for k in ("lo", "hiG", "hi_orders", "engine", "p", "N"))
    hist = np.zeros(engine.M, dtype=np.int64)
    digits = engine.digits
    L = len(lo[0])
    for h in range(*task):
        c = []
        r = h
        for o in orders:
            c.append(r % o)
            r //= o
        y = (np.array(c, dtype=np.int64) @ G) % N if orders else np.zeros(len(p.tris), np.int64)
        ex = np.zeros(L, dtype=engine.dtype)
        for fi in range(len(p.facets)):
            yd = y[p.ftri[fi]]
            if N == 2:
                hcode = int(yd @ engine.pow)
                st = engine.tables[fi][np.arange(engine.codes) ^ hcode] if hcode else engine.tables[fi]
            else:
                perm = ((digits + yd) % N) @ engine.pow
                st = engine.tables[fi][perm]
            ex += np.take(st, lo[fi])
        hist += np.bincount(ex.astype(np.int64) % engine.M, minlength=engine.M)
    return hist


def _execute(terms: list[str], ops: list[np.ndarray], path, output: str = "") -> np.ndarray:
    """Run a pairwise contraction path with batched matrix products.

    Indices shared by more than two tensors (triangle labels) become batch
    dimensions of np.matmul instead of forcing a slow generic einsum.
    """
    items = list(zip(terms, ops))
    for step in path:
        picked = [items[i] for i in step]
        for i in sorted(step, reverse=True):
            items.pop(i)
        keep = set(output).union(*(s for s, _ in items))
        if len(picked) == 1:
            picked.append(("", np.ones(())))
        (sx, X), (sy, Y) = picked
        # indices private to one operand and not needed later are summed first
        dx = tuple(k for k, c in enumerate(sx) if c not in keep and c not in sy)
        if dx:
            X = X.sum(axis=dx)
            sx = "".join(c for k, c in enumerate(sx) if k not in dx)
        dy = tuple(k for k, c in enumerate(sy) if c not in keep and c not in sx)
        if dy:
            Y = Y.sum(axis=dy)
            sy = "".join(c for k, c in enumerate(sy) if k not in dy)
        batch = [c for c in sx if c in sy and c in keep]
        contr = [c for c in sx if c in sy and c not in keep]
        fx = [c for c in sx if c not in sy]
        fy = [c for c in sy if c not in sx]
        dim = dict(zip(sx, X.shape))
        dim.update(zip(sy, Y.shape))

        def size(cs):
            return math.prod(dim[c] for c in cs)
        Xt = X.transpose([sx.index(c) for c in batch + fx + contr]).reshape(size(batch), size(fx), size(contr))
        Yt = Y.transpose([sy.index(c) for c in batch + contr + fy]).reshape(size(batch), size(contr), size(fy))
        R = np.matmul(Xt, Yt).reshape([dim[c] for c in batch + fx + fy])
        items.append(("".join(batch + fx + fy), R))
    (s, A), = items
    drop = tuple(k for k, c in enumerate(s) if c not in output)
    if drop:
        A = A.sum(axis=drop)
        s = "".join(c for c in s if c in output)
    return A.transpose([s.index(c) for c in output]) if output else A


def _contract_sum(cat: CoordinatedCategory, p: Problem):
    """Whole state sum as one tensor network (float)."""
    n = cat.size
    T = _tables(cat)
    facet_t = {}
    for sg in set(p.signs):
        A = np.zeros((n,) * 15, complex)
        for x in itertools.product(range(n), repeat=10):
            ch = channel_lists(cat, x)
            if not all(ch):
                continue
            for m in itertools.product(*ch):
                A[x + m] = _amp(T, x, m, sg).to_complex()
        facet_t[sg] = A
    nt = len(p.tris)
    sym_tri = [oe.get_symbol(i) for i in range(nt)]
    sym_tet = [oe.get_symbol(nt + q) for q in range(len(p.tets))]
    terms, ops = [], []
    for fi in range(len(p.facets)):
        terms.append("".join(sym_tri[t] for t in p.ftri[fi]) + "".join(sym_tet[q] for q in p.ftet[fi]))
        ops.append(facet_t[p.signs[fi]])
    dvec = np.array([x.to_complex() for x in cat.dim])
    wvec = np.array([1 / x.to_complex() for x in cat.dim])
    terms += sym_tri + sym_tet
    ops += [dvec] * nt + [wvec] * len(p.tets)
    eq = ",".join(terms) + "->"
    path = oe.contract_path(eq, *ops, optimize=oe.RandomGreedy(max_repeats=64))[0]
    value = complex(_execute(terms, ops, path))
    # coloring count: product of 3-cell admissibility indicators
    adm = _adm4(cat).reshape((n,) * 4).astype(float)
    cterms = ["".join(sym_tri[t] for t in p.tet_tris[q]) for q in range(len(p.tets))]
    cops = [adm] * len(p.tets)
    cpath = oe.contract_path(",".join(cterms) + "->", *cops, optimize=oe.RandomGreedy(max_repeats=32))[0]
    count = _execute(cterms, cops, cpath)
    return int(round(float(count))), value


def cy_state_sum(c: Complex4, cat: CoordinatedCategory, opts: CYOptions | None = None) -> CYResult:
    """Crane-Yetter invariant of the oriented complex c."""
    opts = opts or CYOptions()
    t0 = time.perf_counter()
    if opts.check:
        rep = check_manifold(c)
        if not rep.ok:
            raise CYError("not a closed orientable combinatorial 4-manifold: " + "; ".join(rep.problems))
    p = Problem(c, flip=opts.flip)
    est = estimate_colorings(c, cat, p)
    if est > 2 ** GUARD_LOG2 and not opts.force:
        raise ResourceLimit(est)
    strategy = opts.strategy if opts.strategy != "auto" else _choose(cat, est)
    if strategy not in STRATEGIES:
        raise CYError(f"unknown strategy {strategy!r}")
    threads = resolve_threads(opts.threads)
    timings = {}
    if strategy == "contract":
        if cat.exact:
            raise CYError("the contract strategy runs on the float backend only")
        count, raw = _contract_sum(cat, p)
        mode = "float"
    else:
        it = ColoringIterator(c, cat, strategy, p)
        mode = "float"
        if cat.exact:
            mode = "exact"
            if cat.pointed_order is not None:
                try:
                    engine = _RootEngine(cat, p)
                    mode = "root"
                except NotRoot:
                    mode = "exact"
            if mode == "exact":
                engine = _ExactEngine(cat, p)
        else:
            engine = _DenseEngine(cat, p)
        timings["setup"] = time.perf_counter() - t0
        if mode == "root" and strategy == "cocycle":
            count, raw = _cocycle_root_sum(it, engine, p, threads)
        else:
            _WORK.update(it=it, engine=engine, p=p, mode=mode)
            parts = _map(_run_task, it.tasks(), threads)
            count = sum(k for k, _ in parts)
            raw = parts[0][1]
            for _, v in parts[1:]:
                raw = raw + v
        _WORK.clear()
    if mode == "root":
        f = cat.field
        total = f.zero()
        for e, k in enumerate(raw):
            if k:
                total = total + f.zeta(e) * int(k)
    elif mode == "float":
        total = cat.field.from_complex(raw)
    else:
        total = raw
    value = total * cat.D ** p.prefactor_exp() if p.prefactor_exp() >= 0 \
        else total * cat.D.inv() ** (-p.prefactor_exp())
    secs = time.perf_counter() - t0
    timings[strategy] = secs
    return CYResult(value, count, secs, strategy, est, timings)
