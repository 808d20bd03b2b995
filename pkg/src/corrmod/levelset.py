"""Level-set, sublevel-set and superlevel-set homology c-modules.

Input is a simplicial complex of dimension at most 2 with a value at every
vertex, extended linearly over simplices.  The complex is subdivided along a
set of levels so that every level set, interlevel set, sublevel set and
superlevel set at those levels is an induced subcomplex.  Homology is
simplicial over GF(p) in degrees 0 and 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import correspondence as cr
from .cmodule import (FieldSpec, GridCModule, GridCMorphism, GridLine, constant_module,
                      direct_sum, format_value, morphism_cokernel, parse_value)
from .decompose import DecoratedDiagram, multiplicities
from .errors import DimTooHigh, ExactnessViolation, NotSubcomplex, ValidationError
from .exactfield import Subspace, inverse, kernel_basis, rank


@dataclass(frozen=True)
class PLComplex:
    p: int
    values: dict           # vertex id -> Fraction
    simplices: frozenset   # sorted id tuples, closed under faces

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @staticmethod
    def build(p: int, values: dict, simplices: Iterable, close: bool = False) -> "PLComplex":
        FieldSpec(p)
        vals = {int(k): parse_value(v) for k, v in values.items()}
        simps = set()
        for s in simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s) or not s:
                raise ValidationError(f"degenerate simplex {list(s)}")
            if len(s) > 3:
                raise DimTooHigh(f"simplex {list(s)} has dimension {len(s) - 1} > 2")
            for v in s:
                if v not in vals:
                    raise ValidationError(f"simplex {list(s)} uses unknown vertex {v}")
            simps.add(s)
        for v in vals:
            simps.add((v,))
        for s in list(simps):
            for k in range(1, len(s)):
                for face in itertools.combinations(s, k):
                    if face not in simps:
                        if not close:
                            raise ValidationError(f"face {list(face)} of {list(s)} is missing")
                        simps.add(face)
        return PLComplex(p, vals, frozenset(simps))

    @staticmethod
    def from_json(d) -> "PLComplex":
        try:
            p = int(d.get("field", 2))
            verts = d["vertices"]
            values = {}
            for v in verts:
                vid = int(v["id"])
                if vid in values:
                    raise ValidationError(f"duplicate vertex id {vid}")
                values[vid] = v["value"]
            simplices = d.get("simplices", [])
        except (KeyError, TypeError, AttributeError) as e:
            raise ValidationError(f"complex json: missing or malformed field ({e})") from None
        return PLComplex.build(p, values, simplices)

    def to_json(self):
        simps = sorted((s for s in self.simplices if len(s) > 1), key=lambda s: (len(s), s))
        return {"field": self.p,
                "vertices": [{"id": k, "value": format_value(v)} for k, v in sorted(self.values.items())],
                "simplices": [list(s) for s in simps]}

    def critical_values(self) -> list:
        return sorted(set(self.values.values()))


# -- refinement -------------------------------------------------------------

@dataclass
class CutComplex:
    base: PLComplex
    cuts: list            # critical values of the base complex
    levels: list          # all levels the refinement is cut along
    vkeys: list           # vertex keys, index = vertex number
    vvalues: list         # vertex values
    edges: list           # sorted index pairs
    tris: list            # sorted index triples
    _d1: np.ndarray = field(default=None, repr=False)
    _d2: np.ndarray = field(default=None, repr=False)

    @property
    def p(self) -> int:
        return self.base.p

    def simplex_count(self) -> tuple[int, int, int]:
        return len(self.vkeys), len(self.edges), len(self.tris)

    def euler(self) -> int:
        v, e, t = self.simplex_count()
        return v - e + t

    def d1(self) -> np.ndarray:
        if self._d1 is None:
            m = np.zeros((len(self.vkeys), len(self.edges)), dtype=np.int64)
            for k, (i, j) in enumerate(self.edges):
                m[i, k] -= 1
                m[j, k] += 1
            self._d1 = m % self.p
        return self._d1

    def d2(self) -> np.ndarray:
        if self._d2 is None:
            eidx = {e: k for k, e in enumerate(self.edges)}
            m = np.zeros((len(self.edges), len(self.tris)), dtype=np.int64)
            for k, (a, b, c) in enumerate(self.tris):
                m[eidx[(b, c)], k] += 1
                m[eidx[(a, c)], k] -= 1
                m[eidx[(a, b)], k] += 1
            self._d2 = m % self.p
        return self._d2

    def select(self, lo=None, hi=None) -> "Subcomplex":
        """Induced subcomplex on vertices with lo <= value <= hi."""
        inside = np.array([(lo is None or v >= lo) and (hi is None or v <= hi)
                           for v in self.vvalues], dtype=bool)
        verts = tuple(np.flatnonzero(inside))
        edges = tuple(k for k, (i, j) in enumerate(self.edges) if inside[i] and inside[j])
        tris = tuple(k for k, t in enumerate(self.tris) if all(inside[v] for v in t))
        return Subcomplex(self, (verts, edges, tris), (lo, hi))

    def full(self) -> "Subcomplex":
        return self.select(None, None)


@dataclass(frozen=True)
class Subcomplex:
    cut: CutComplex
    cells: tuple  # (vertex indices, edge indices, triangle indices)
    label: tuple = (None, None)

    def contains(self, other: "Subcomplex") -> bool:
        return all(set(a) <= set(b) for a, b in zip(other.cells, self.cells))


def refine(c: PLComplex, extra_levels: Iterable = ()) -> CutComplex:
    """Subdivide c along all critical values (and any extra levels)."""
    if c.dim > 2:
        raise DimTooHigh(f"complex has dimension {c.dim} > 2")
    cuts = c.critical_values()
    levels = sorted(set(cuts) | {Fraction(x) for x in extra_levels})
    val = c.values

    keys: dict = {}
    vkeys, vvalues = [], []

    def vertex(key, value) -> int:
        k = keys.get(key)
        if k is None:
            k = len(vkeys)
            keys[key] = k
            vkeys.append(key)
            vvalues.append(value)
        return k

    def edge_points(u, w) -> list[int]:
        """Vertices along the edge from u to w, including both ends."""
        a, b = (u, w) if u < w else (w, u)
        fa, fb = val[a], val[b]
        lo, hi = min(fa, fb), max(fa, fb)
        inner = [L for L in levels if lo < L < hi]
        pts = sorted(inner, key=lambda L: (L - fa) / (fb - fa))
        ids = [vertex(("v", a), fa)] + [vertex(("e", a, b, L), L) for L in pts] + [vertex(("v", b), fb)]
        return ids if (u, w) == (a, b) else ids[::-1]

    # deterministic vertex numbering: originals first in id order
    for v in sorted(val):
        vertex(("v", v), val[v])
    edges, tris = set(), set()

    def add_edge(i, j):
        if i != j:
            edges.add((min(i, j), max(i, j)))

    for s in sorted(c.simplices, key=lambda s: (len(s), s)):
        if len(s) == 2:
            pts = edge_points(*s)
            for i, j in zip(pts, pts[1:]):
                add_edge(i, j)
        elif len(s) == 3:
            a, b, d = s
            cyc = edge_points(a, b)[:-1] + edge_points(b, d)[:-1] + edge_points(d, a)[:-1]
            vs = [vvalues[i] for i in cyc]
            lo, hi = min(vs), max(vs)
            if lo == hi:
                polys = [cyc]
            else:
                polys = []
                slab_levels = [L for L in levels if lo <= L <= hi]
                for L0, L1 in zip(slab_levels, slab_levels[1:]):
                    polys.append([i for i in cyc if L0 <= vvalues[i] <= L1])
            for poly in polys:
                for i, j in zip(poly, poly[1:] + poly[:1]):
                    add_edge(i, j)
                for k in range(1, len(poly) - 1):
                    t = tuple(sorted((poly[0], poly[k], poly[k + 1])))
                    tris.add(t)
                    add_edge(t[0], t[1])
                    add_edge(t[0], t[2])
                    add_edge(t[1], t[2])
    return CutComplex(c, cuts, levels, vkeys, vvalues, sorted(edges), sorted(tris))


# -- homology ---------------------------------------------------------------

class Homology:
    """H_degree of a subcomplex with a fixed basis of representative cycles."""

    def __init__(self, sub: Subcomplex, degree: int):
        if degree not in (0, 1):
            raise ValidationError("degree must be 0 or 1")
        self.sub = sub
        self.degree = degree
        cut = sub.cut
        p = cut.p
        self.p = p
        self.cells = np.array(sub.cells[degree], dtype=np.int64)
        n = len(self.cells)
        self.n_global = len(cut.vkeys) if degree == 0 else len(cut.edges)
        if degree == 0:
            self._init_h0()
            return
        verts = np.array(sub.cells[0], dtype=np.int64)
        if n:
            d1 = cut.d1()[np.ix_(verts, self.cells)] if len(verts) else np.zeros((0, n), np.int64)
            z = Subspace.span(kernel_basis(d1, p, n), n, p) if d1.shape[0] else Subspace.full(n, p)
        else:
            z = Subspace.zero(0, p)
        tri = np.array(sub.cells[2], dtype=np.int64)
        if len(tri) and n:
            bmat = cut.d2()[np.ix_(self.cells, tri)]
            b = Subspace.span(bmat.T, n, p)
        else:
            b = Subspace.zero(n, p)
        reps = b.complement(within=z)
        self.z = z
        self.reps = reps.basis
        self.dim = reps.dim
        if z.dim:
            rows = np.concatenate([reps.basis, b.basis]) if b.dim else reps.basis
            q = np.array([[r[pc] for pc in z.pivots] for r in rows], dtype=np.int64)
            self._qinv = inverse(q, p)
        else:
            self._qinv = np.zeros((0, 0), dtype=np.int64)

    def _init_h0(self):
        cut = self.sub.cut
        verts = list(self.sub.cells[0])
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for k in self.sub.cells[1]:
            i, j = cut.edges[k]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
        roots = sorted({find(v) for v in verts})
        self.dim = len(roots)
        self._comp = {v: roots.index(find(v)) for v in verts}
        reps = np.zeros((self.dim, self.n_global), dtype=np.int64)
        for k, r in enumerate(roots):
            reps[k, r] = 1
        self.reps_global = reps

    def global_reps(self) -> np.ndarray:
        """Representative cycles as chains on the whole refined complex."""
        if self.degree == 0:
            return self.reps_global
        out = np.zeros((self.dim, self.n_global), dtype=np.int64)
        if self.dim:
            out[:, self.cells] = self.reps
        return out

    def coords(self, chain) -> np.ndarray:
        """Coordinates of the class of a global cycle supported on this subcomplex."""
        chain = np.asarray(chain, dtype=np.int64) % self.p
        mask = np.zeros(self.n_global, dtype=bool)
        mask[self.cells] = True
        if np.any(chain[~mask]):
            raise NotSubcomplex("chain is not supported on the subcomplex")
        if self.degree == 0:
            out = np.zeros(self.dim, dtype=np.int64)
            for v in np.flatnonzero(chain):
                out[self._comp[int(v)]] += chain[v]
            return out % self.p
        local = chain[self.cells]
        if not self.z.contains(local):
            raise ValidationError("chain is not a cycle")
        zc = np.array([local[pc] for pc in self.z.pivots], dtype=np.int64)
        full = (zc @ self._qinv) % self.p
        return full[:self.dim]


def homology_basis(sub: Subcomplex, degree: int) -> Homology:
    return Homology(sub, degree)


def induced_map(small: Homology, big: Homology) -> np.ndarray:
    """Matrix (dim big x dim small) of the inclusion-induced map."""
    if small.sub.cut is not big.sub.cut or not big.sub.contains(small.sub):
        raise NotSubcomplex("first subcomplex is not contained in the second")
    if small.degree != big.degree:
        raise ValidationError("degrees differ")
    reps = small.global_reps()
    if small.dim == 0:
        return np.zeros((big.dim, 0), dtype=np.int64)
    return np.array([big.coords(r) for r in reps], dtype=np.int64).T.reshape(big.dim, small.dim)


# -- c-modules --------------------------------------------------------------

class _Pipeline:
    """Shared refinement and cached homology for one complex."""

    def __init__(self, c: PLComplex, extra_values: Iterable = ()):
        if c.dim > 2:
            raise DimTooHigh(f"complex has dimension {c.dim} > 2")
        cuts = sorted(set(c.critical_values()) | {parse_value(v) for v in extra_values})
        if not cuts:
            raise ValidationError("empty complex: pass extra_values to fix a grid")
        self.c = c
        self.p = c.p
        self.grid = GridLine(tuple(cuts))
        mids = [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
        self.cut = refine(c, cuts + mids)
        g = self.grid
        self.levels = [g.representative(q) for q in range(g.npos)]
        self._h: dict = {}

    def hom(self, lo, hi, degree) -> Homology:
        key = (lo, hi, degree)
        h = self._h.get(key)
        if h is None:
            h = Homology(self.cut.select(lo, hi), degree)
            self._h[key] = h
        return h

    def level(self, q, d):
        L = self.levels[q]
        return self.hom(L, L, d)

    def interlevel(self, q0, q1, d):
        return self.hom(self.levels[q0], self.levels[q1], d)

    def sub(self, q, d):
        return self.hom(None, self.levels[q], d)

    def sup(self, q, d):
        return self.hom(self.levels[q], None, d)

    def whole(self, d):
        return self.hom(None, None, d)

    def level_relation(self, q0: int, q1: int, d: int) -> cr.Correspondence:
        """h through the interlevel set between positions q0 <= q1."""
        a, b, mid = self.level(q0, d), self.level(q1, d), self.interlevel(q0, q1, d)
        phi = induced_map(a, mid)
        psi = induced_map(b, mid)
        return cr.compose(cr.graph(phi, self.p, a.dim), cr.reverse(cr.graph(psi, self.p, b.dim)))

    def module(self, dims, corrs) -> GridCModule:
        return GridCModule(FieldSpec(self.p), self.grid, tuple(dims), tuple(corrs))


def levelset_cmodule(c: PLComplex, degree: int = 0, extra_values: Iterable = (),
                     _pl: _Pipeline | None = None) -> GridCModule:
    pl = _pl or _Pipeline(c, extra_values)
    n = pl.grid.npos
    dims = [pl.level(q, degree).dim for q in range(n)]
    corrs = [pl.level_relation(q, q + 1, degree) for q in range(n - 1)]
    return pl.module(dims, corrs)


def sublevel_cmodule(c: PLComplex, degree: int = 0, extra_values: Iterable = (),
                     _pl: _Pipeline | None = None) -> GridCModule:
    pl = _pl or _Pipeline(c, extra_values)
    n = pl.grid.npos
    hs = [pl.sub(q, degree) for q in range(n)]
    corrs = [cr.graph(induced_map(hs[q], hs[q + 1]), pl.p, hs[q].dim) for q in range(n - 1)]
    return pl.module([h.dim for h in hs], corrs)


def superlevel_cmodule(c: PLComplex, degree: int = 0, extra_values: Iterable = (),
                       _pl: _Pipeline | None = None) -> GridCModule:
    pl = _pl or _Pipeline(c, extra_values)
    n = pl.grid.npos
    hs = [pl.sup(q, degree) for q in range(n)]
    corrs = [cr.reverse(cr.graph(induced_map(hs[q + 1], hs[q]), pl.p, hs[q + 1].dim))
             for q in range(n - 1)]
    return pl.module([h.dim for h in hs], corrs)


def direct_level_relation(c: PLComplex, degree: int, q0: int, q1: int) -> cr.Correspondence:
    """h between two positions computed through their interlevel set directly."""
    return _Pipeline(c).level_relation(q0, q1, degree)


# -- Mayer-Vietoris ---------------------------------------------------------

@dataclass
class MVReport:
    grid: GridLine
    rows: list                 # per position: dims and exactness flags
    coker: GridCModule
    diagram: DecoratedDiagram

    @property
    def exact(self) -> bool:
        return all(r["exact"] for r in self.rows)

    def to_json(self):
        return {"grid": self.grid.to_json(), "exactness": self.rows,
                "cokernel": self.coker.to_json(), "diagram": self.diagram.to_json()}


def _exact_at(g: np.ndarray, f: np.ndarray, mid: int, p: int) -> bool:
    """Is  . -g-> k^mid -f->  .  exact at the middle?"""
    if g.size and f.size and np.any((f @ g) % p):
        return False
    rg = rank(g, p) if g.size else 0
    rf = rank(f, p) if f.size else 0
    return rg == mid - rf


def _stack(a: np.ndarray, b: np.ndarray, cols: int) -> np.ndarray:
    return np.concatenate([a.reshape(a.shape[0], cols), b.reshape(b.shape[0], cols)], axis=0)


def mayer_vietoris(c: PLComplex, i: int = 1, strict: bool = True) -> MVReport:
    if i != 1:
        raise ValidationError("only i = 1 is supported")
    pl = _Pipeline(c)
    p = pl.p
    cut = pl.cut
    n = pl.grid.npos
    hx1, hx0 = pl.whole(1), pl.whole(0)
    zx = hx1.global_reps()
    rows = []
    maps_b = []
    for q in range(n):
        L1, S1, P1 = pl.level(q, 1), pl.sub(q, 1), pl.sup(q, 1)
        L0, S0, P0 = pl.level(q, 0), pl.sub(q, 0), pl.sup(q, 0)
        A = _stack(induced_map(L1, S1), induced_map(L1, P1), L1.dim)
        B = np.concatenate([induced_map(S1, hx1).reshape(hx1.dim, S1.dim),
                            (-induced_map(P1, hx1)).reshape(hx1.dim, P1.dim) % p], axis=1)
        # connecting map: split z = c1 + c2 with c1 on the sublevel set
        in_sub = np.zeros(len(cut.edges), dtype=bool)
        in_sub[list(S1.sub.cells[1])] = True
        D = np.zeros((L0.dim, hx1.dim), dtype=np.int64)
        for k, z in enumerate(zx):
            c1 = np.where(in_sub, z, 0)
            bd = (cut.d1() @ c1) % p
            D[:, k] = L0.coords(bd)
        E = _stack(induced_map(L0, S0), induced_map(L0, P0), L0.dim)
        G = np.concatenate([induced_map(S0, hx0).reshape(hx0.dim, S0.dim),
                            (-induced_map(P0, hx0)).reshape(hx0.dim, P0.dim) % p], axis=1)
        checks = {
            "H1_sub+sup": _exact_at(A, B, S1.dim + P1.dim, p),
            "H1_X": _exact_at(B, D, hx1.dim, p),
            "H0_level": _exact_at(D, E, L0.dim, p),
            "H0_sub+sup": _exact_at(E, G, S0.dim + P0.dim, p),
            "H0_X": (rank(G, p) if G.size else 0) == hx0.dim,
        }
        row = {"position": q, "level": format_value(pl.levels[q]),
               "dims": {"H1_level": L1.dim, "H1_sub": S1.dim, "H1_sup": P1.dim, "H1_X": hx1.dim,
                        "H0_level": L0.dim, "H0_sub": S0.dim, "H0_sup": P0.dim, "H0_X": hx0.dim},
               "checks": checks, "exact": all(checks.values())}
        rows.append(row)
        if strict and not row["exact"]:
            bad = [k for k, v in checks.items() if not v]
            raise ExactnessViolation(f"position {q}: sequence not exact at {', '.join(bad)} "
                                     f"(dims {row['dims']})")
        maps_b.append(B)
    src = direct_sum([sublevel_cmodule(c, 1, _pl=pl), superlevel_cmodule(c, 1, _pl=pl)])
    tgt = constant_module(pl.grid, hx1.dim, p)
    f = GridCMorphism(src, tgt, tuple(cr.graph(B, p, src.dims[q]) for q, B in enumerate(maps_b)))
    coker = morphism_cokernel(f, lax=True)
    return MVReport(pl.grid, rows, coker, multiplicities(coker))
