"""Interval decomposition of grid c-modules.

`multiplicities` counts bars from section spaces.  `decompose_via_unfolding`
is an independent route: it unfolds the module into a zigzag of spans and
reads interval multiplicities from generalized ranks (limit to colimit).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .cmodule import (Bar, BarType, Decorated, GridCModule, GridLine, canonical_type,
                      direct_sum, interval_module, zero_module)
from .errors import ValidationError
from .exactfield import Subspace, kernel_basis, rank, subspace_sum
from .sections import constrained_sections, offsets


@dataclass
class DecoratedDiagram:
    grid: GridLine
    mult: Counter = field(default_factory=Counter)

    def bars(self) -> list[tuple[Bar, int]]:
        return sorted(((b, c) for b, c in self.mult.items() if c > 0),
                      key=lambda bc: bc[0].sort_key())

    def total(self) -> int:
        return sum(self.mult.values())

    def __eq__(self, other):
        if not isinstance(other, DecoratedDiagram):
            return NotImplemented
        return self.grid == other.grid and +self.mult == +other.mult

    def __add__(self, other: "DecoratedDiagram") -> "DecoratedDiagram":
        if self.grid != other.grid:
            raise ValidationError("cannot add diagrams on different grids")
        return DecoratedDiagram(self.grid, self.mult + other.mult)

    def pointwise_dims(self) -> list[int]:
        out = [0] * self.grid.npos
        for b, c in self.mult.items():
            for q in range(b.start, b.end + 1):
                out[q] += c
        return out

    def decorated_bars(self) -> list[tuple[BarType, Decorated, Decorated, int]]:
        return [(b.bar_type, *b.endpoints(self.grid), c) for b, c in self.bars()]

    def to_json(self):
        out = []
        for b, c in self.bars():
            s, e = b.endpoints(self.grid)
            out.append({"type": b.bar_type.value, "birth": s.to_json(),
                        "death": e.to_json(), "mult": c})
        return out

    @staticmethod
    def from_json(grid: GridLine, data) -> "DecoratedDiagram":
        mult = Counter()
        for item in data:
            t = BarType.parse(item["type"])
            s = Decorated.from_json(item["birth"])
            e = Decorated.from_json(item["death"])
            bar = Bar(grid.position_of_start(s), grid.position_of_end(e), t)
            bar.validate(grid)
            mult[bar] += int(item.get("mult", 1))
        return DecoratedDiagram(grid, mult)


# -- section-space multiplicities -------------------------------------------

class _Calc:
    def __init__(self, m: GridCModule):
        self.m = m
        self.cache: dict = {}

    def secs(self, a, b, lv=False, rv=False) -> Subspace:
        key = (a, b, lv, rv)
        s = self.cache.get(key)
        if s is None:
            s = constrained_sections(self.m, a, b, lv, rv)
            self.cache[key] = s
        return s

    def pin_zero(self, s: Subspace, a: int, b: int, q: int) -> Subspace:
        """Intersect sections over [a..b] with {v_q = 0}."""
        off = offsets(self.m, a, b)
        lo, hi = off[q - a], off[q - a + 1]
        if hi == lo or s.dim == 0:
            return s
        # combinations of the basis whose block at q vanishes
        coeffs = kernel_basis(s.basis[:, lo:hi].T, s.p, s.dim)
        if coeffs.shape[0] == 0:
            return Subspace.zero(s.ambient, s.p)
        return Subspace.span((coeffs @ s.basis) % s.p, s.ambient, s.p)

    def restrict(self, s: Subspace, a: int, b: int, a2: int, b2: int) -> Subspace:
        off = offsets(self.m, a, b)
        return s.project(range(off[a2 - a], off[b2 - a + 1]))


def _count(calc: _Calc, t: BarType, a: int, b: int) -> int:
    if t is BarType.CLOSED:
        main = calc.secs(a, b)
        s1 = calc.restrict(calc.secs(a - 1, b), a - 1, b, a, b)
        s2 = calc.restrict(calc.secs(a, b + 1), a, b + 1, a, b)
    elif t is BarType.COOPEN:
        main = calc.secs(a, b, rv=True)
        s1 = calc.restrict(calc.secs(a - 1, b, rv=True), a - 1, b, a, b)
        s2 = calc.pin_zero(main, a, b, b)
    elif t is BarType.CONTRAOPEN:
        main = calc.secs(a, b, lv=True)
        s1 = calc.restrict(calc.secs(a, b + 1, lv=True), a, b + 1, a, b)
        s2 = calc.pin_zero(main, a, b, a)
    else:
        main = calc.secs(a, b, lv=True, rv=True)
        s1 = calc.pin_zero(main, a, b, a)
        s2 = calc.pin_zero(main, a, b, b)
    if main.dim == 0:
        return 0
    return main.dim - subspace_sum(s1, s2).dim


def multiplicities(m: GridCModule) -> DecoratedDiagram:
    """Decorated diagram of m computed from section spaces."""
    calc = _Calc(m)
    last = m.last
    mult = Counter()
    for a in range(last + 1):
        if m.dims[a] == 0:
            continue
        for b in range(a, last + 1):
            if m.dims[b] == 0:
                break
            for t in BarType:
                if canonical_type(t, a, b, last) is not t:
                    continue
                c = _count(calc, t, a, b)
                if c:
                    mult[Bar(a, b, t)] += c
    return DecoratedDiagram(m.grid, mult)


# -- zigzag oracle ----------------------------------------------------------

@dataclass
class ZigzagModule:
    """Nodes V_0, C_0, V_1, ..., V_{N-1}; C_q maps to V_q (left) and V_{q+1} (right)."""

    p: int
    dims: list[int]
    left: list[np.ndarray]   # left[q]: dims[2q] x dims[2q+1]
    right: list[np.ndarray]  # right[q]: dims[2q+2] x dims[2q+1]

    @property
    def nnodes(self) -> int:
        return len(self.dims)

    def arrows(self):
        """(source node, target node, matrix) for every arrow."""
        out = []
        for q in range(len(self.left)):
            c = 2 * q + 1
            out.append((c, c - 1, self.left[q]))
            out.append((c, c + 1, self.right[q]))
        return out


def unfold(m: GridCModule) -> ZigzagModule:
    dims, left, right = [m.dims[0]], [], []
    for q, c in enumerate(m.corrs):
        dl = c.dim_left
        basis = c.space.basis
        dims.append(c.dim)
        dims.append(m.dims[q + 1])
        left.append(basis[:, :dl].T.copy().reshape(dl, c.dim))
        right.append(basis[:, dl:].T.copy().reshape(c.dim_right, c.dim))
    return ZigzagModule(m.p, dims, left, right)


def _generalized_rank(z: ZigzagModule, u: int, w: int) -> int:
    """dim Im(lim -> colim) of the zigzag restricted to nodes [u..w]."""
    p = z.p
    off = [0]
    for i in range(u, w + 1):
        off.append(off[-1] + z.dims[i])
    n = off[-1]
    if n == 0:
        return 0
    arrows = [(s, t, a) for s, t, a in z.arrows() if u <= s <= w and u <= t <= w]
    # limit: tuples with a(x_s) = x_t along every arrow
    eqs = []
    for s, t, a in arrows:
        row = np.zeros((z.dims[t], n), dtype=np.int64)
        row[:, off[s - u]:off[s - u + 1]] = a
        row[:, off[t - u]:off[t - u + 1]] -= np.eye(z.dims[t], dtype=np.int64)
        eqs.append(row % p)
    lim = kernel_basis(np.concatenate(eqs), p, n) if eqs else np.eye(n, dtype=np.int64)
    if lim.shape[0] == 0:
        return 0
    # colimit relations: i_s(x) - i_t(a x)
    rel = []
    for s, t, a in arrows:
        block = np.zeros((z.dims[s], n), dtype=np.int64)
        block[:, off[s - u]:off[s - u + 1]] = np.eye(z.dims[s], dtype=np.int64)
        block[:, off[t - u]:off[t - u + 1]] -= a.T
        rel.append(block % p)
    rel = np.concatenate(rel) if rel else np.zeros((0, n), dtype=np.int64)
    # push each limit element into the colimit through node u
    img = np.zeros_like(lim)
    img[:, off[0]:off[1]] = lim[:, off[0]:off[1]]
    base = rank(rel, p) if rel.shape[0] else 0
    both = rank(np.concatenate([rel, img]), p)
    return both - base


def zigzag_barcode(z: ZigzagModule) -> Counter:
    """Multiset of node intervals (u, w) of an interval decomposition."""
    nn = z.nnodes
    r = {}

    def rk(u, w):
        if u < 0 or w >= nn:
            return 0
        key = (u, w)
        if key not in r:
            if any(z.dims[i] == 0 for i in range(u, w + 1)):
                r[key] = 0
            else:
                r[key] = _generalized_rank(z, u, w)
        return r[key]

    out = Counter()
    for u in range(nn):
        for w in range(u, nn):
            if z.dims[w] == 0:
                break
            c = rk(u, w) - rk(u - 1, w) - rk(u, w + 1) + rk(u - 1, w + 1)
            if c:
                out[(u, w)] += c
    return out


def decompose_via_unfolding(m: GridCModule) -> DecoratedDiagram:
    bars = zigzag_barcode(unfold(m))
    mult = Counter()
    last = m.last
    for (u, w), c in bars.items():
        if c < 0:
            raise ValidationError("negative zigzag multiplicity")
        a, b = (u + 1) // 2, w // 2
        if a > b:
            raise ValidationError("zigzag bar supported on span nodes only")
        t = BarType.from_sides(u % 2 == 0, w % 2 == 0)
        mult[Bar(a, b, canonical_type(t, a, b, last))] += c
    return DecoratedDiagram(m.grid, mult)


def reconstruct(d: DecoratedDiagram, p: int) -> GridCModule:
    parts = []
    for b, c in d.bars():
        parts.extend([interval_module(d.grid, b, p)] * c)
    if not parts:
        return zero_module(d.grid, p)
    return direct_sum(parts)
