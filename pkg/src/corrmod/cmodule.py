"""Finite-grid c-modules on the decorated line.

A grid t_1 < ... < t_n splits the line into 2n+1 positions.  Even position 2i
is the open gap (t_i, t_{i+1}) (with t_0 = -inf, t_{n+1} = +inf) and odd
position 2i-1 is the point t_i.  A module stores one space per position and
one correspondence per adjacent pair; relations between distant positions are
obtained by composition.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Sequence

import numpy as np

from . import correspondence as cr
from .correspondence import Correspondence
from .errors import (BadBar, GridMismatch, IncompatibleMorphism, NotExact,
                     TargetNotPModule, ValidationError)
from .exactfield import FieldSpec, Subspace, inverse, subspace_sum

INF = math.inf


# -- numbers ---------------------------------------------------------------

def parse_value(s) -> Fraction:
    if isinstance(s, bool):
        raise ValidationError(f"bad numeric value {s!r}")
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, float):
        # tolerated on input only; exact decimal text is preferred
        return Fraction(str(s))
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"bad numeric value {s!r}") from None


def format_value(x) -> str:
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    x = Fraction(x)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    if x.denominator == 1:
        return str(x.numerator)
    digits = max(twos, fives)
    scaled = x * 10**digits
    sign = "-" if scaled < 0 else ""
    n = abs(scaled.numerator)
    whole, frac = divmod(n, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


@total_ordering
@dataclass(frozen=True)
class Decorated:
    """A decorated number: a real with sign '-' or '+', or one of -inf, +inf."""

    value: object  # Fraction, or -INF / INF
    sign: int = 0  # -1 for '-', +1 for '+', 0 for infinities

    def _key(self):
        return (self.value, self.sign)

    def __lt__(self, other):
        return self._key() < other._key()

    @property
    def finite(self) -> bool:
        return self.value not in (INF, -INF)

    def shift(self, d) -> "Decorated":
        if not self.finite:
            return self
        return Decorated(self.value + d, self.sign)

    def __str__(self):
        if not self.finite:
            return "+inf" if self.value == INF else "-inf"
        return format_value(self.value) + ("-" if self.sign < 0 else "+")

    def to_json(self):
        if not self.finite:
            return {"value": "inf" if self.value == INF else "-inf"}
        return {"value": format_value(self.value), "dec": "-" if self.sign < 0 else "+"}

    @staticmethod
    def from_json(d) -> "Decorated":
        v = d["value"] if isinstance(d, dict) else d
        if v in ("inf", "+inf"):
            return POS_INF
        if v == "-inf":
            return NEG_INF
        dec = d.get("dec") if isinstance(d, dict) else None
        if dec not in ("-", "+"):
            raise ValidationError(f"decorated value {v!r} needs dec '-' or '+'")
        return Decorated(parse_value(v), -1 if dec == "-" else 1)


NEG_INF = Decorated(-INF, 0)
POS_INF = Decorated(INF, 0)


# -- grid ------------------------------------------------------------------

@dataclass(frozen=True)
class GridLine:
    values: tuple

    def __post_init__(self):
        vals = tuple(parse_value(v) for v in self.values)
        if len(vals) < 1:
            raise ValidationError("grid: at least one critical value required")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValidationError("grid: values must be strictly increasing")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def npos(self) -> int:
        return 2 * self.n + 1

    @property
    def last(self) -> int:
        return 2 * self.n

    def is_point(self, q: int) -> bool:
        return q % 2 == 1

    def representative(self, q: int) -> Fraction:
        """A real number lying in position q."""
        t = self.values
        if q == 0:
            return t[0] - 1
        if q == self.last:
            return t[-1] + 1
        if q % 2 == 1:
            return t[(q - 1) // 2]
        i = q // 2
        return (t[i - 1] + t[i]) / 2

    def start_endpoint(self, q: int) -> Decorated:
        if q == 0:
            return NEG_INF
        if q % 2 == 1:
            return Decorated(self.values[(q - 1) // 2], -1)
        return Decorated(self.values[q // 2 - 1], 1)

    def end_endpoint(self, q: int) -> Decorated:
        if q == self.last:
            return POS_INF
        if q % 2 == 1:
            return Decorated(self.values[(q - 1) // 2], 1)
        return Decorated(self.values[q // 2], -1)

    def position_of_start(self, d: Decorated) -> int:
        if d == NEG_INF:
            return 0
        i = self._index(d.value)
        return 2 * i + 1 if d.sign < 0 else 2 * i + 2

    def position_of_end(self, d: Decorated) -> int:
        if d == POS_INF:
            return self.last
        i = self._index(d.value)
        return 2 * i + 1 if d.sign > 0 else 2 * i

    def _index(self, v) -> int:
        try:
            return self.values.index(v)
        except ValueError:
            raise ValidationError(f"value {format_value(v)} is not a grid value") from None

    def to_json(self):
        return [format_value(v) for v in self.values]


# -- bars ------------------------------------------------------------------

class BarType(enum.Enum):
    CLOSED = "[]"
    COOPEN = "[>"
    CONTRAOPEN = "<]"
    OPEN = "<>"

    @property
    def left_closed(self) -> bool:
        return self in (BarType.CLOSED, BarType.COOPEN)

    @property
    def right_closed(self) -> bool:
        return self in (BarType.CLOSED, BarType.CONTRAOPEN)

    @staticmethod
    def from_sides(left_closed: bool, right_closed: bool) -> "BarType":
        if left_closed:
            return BarType.CLOSED if right_closed else BarType.COOPEN
        return BarType.CONTRAOPEN if right_closed else BarType.OPEN

    @property
    def order(self) -> int:
        return _TYPE_ORDER[self]

    @property
    def glyph(self) -> str:
        return {"[]": "|-|", "[>": "|->", "<]": "<-|", "<>": "<->"}[self.value]

    @staticmethod
    def parse(s: str) -> "BarType":
        aliases = {"closed": "[]", "coopen": "[>", "contraopen": "<]", "open": "<>",
                   "[,]": "[]", "[,>": "[>", "<,]": "<]", "<,>": "<>",
                   "[,⟩": "[>", "⟨,]": "<]", "⟨,⟩": "<>"}
        key = aliases.get(str(s).lower(), str(s))
        try:
            return BarType(key)
        except ValueError:
            raise ValidationError(f"unknown bar type {s!r}") from None


_TYPE_ORDER = {BarType.CLOSED: 0, BarType.COOPEN: 1, BarType.CONTRAOPEN: 2, BarType.OPEN: 3}


def canonical_type(t: BarType, start: int, end: int, last: int) -> BarType:
    left, right = t.left_closed, t.right_closed
    if start == 0:
        left = False
    if end == last:
        right = False
    return BarType.from_sides(left, right)


@dataclass(frozen=True)
class Bar:
    start: int
    end: int
    bar_type: BarType

    def sort_key(self):
        return (self.bar_type.order, self.start, self.end)

    def validate(self, grid: GridLine):
        if not (0 <= self.start <= self.end <= grid.last):
            raise BadBar(f"bar [{self.start}..{self.end}] outside positions 0..{grid.last}")
        if canonical_type(self.bar_type, self.start, self.end, grid.last) != self.bar_type:
            raise BadBar(f"bar type {self.bar_type.value} not canonical at the boundary")

    def endpoints(self, grid: GridLine) -> tuple[Decorated, Decorated]:
        return grid.start_endpoint(self.start), grid.end_endpoint(self.end)


# -- modules ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridCModule:
    field: FieldSpec
    grid: GridLine
    dims: tuple
    corrs: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "corrs", tuple(self.corrs))
        if len(dims) != self.grid.npos:
            raise ValidationError(f"dims: expected {self.grid.npos} entries, got {len(dims)}")
        if any(d < 0 for d in dims):
            raise ValidationError("dims must be non-negative")
        if len(self.corrs) != self.grid.npos - 1:
            raise ValidationError(f"corrs: expected {self.grid.npos - 1} entries, got {len(self.corrs)}")
        for q, c in enumerate(self.corrs):
            if c.dim_left != dims[q] or c.dim_right != dims[q + 1]:
                raise ValidationError(f"corrs[{q}] has shape {c.dim_left}x{c.dim_right}, "
                                      f"expected {dims[q]}x{dims[q + 1]}")
            if c.p != self.field.p:
                raise ValidationError(f"corrs[{q}] over a different field")

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def last(self) -> int:
        return self.grid.last

    def relation(self, a: int, b: int) -> Correspondence:
        """Derived relation v_a^b for a <= b."""
        if not (0 <= a <= b <= self.last):
            raise ValidationError(f"relation: bad positions {a}, {b}")
        if a == b:
            return cr.diagonal(self.dims[a], self.p)
        return cr.compose_all(self.corrs[a:b])

    def same_as(self, other: "GridCModule") -> bool:
        return (self.field == other.field and self.grid == other.grid and self.dims == other.dims
                and all(x.space == y.space for x, y in zip(self.corrs, other.corrs)))

    def to_json(self):
        return {"field": self.p, "grid": self.grid.to_json(), "dims": list(self.dims),
                "corrs": [c.to_rows() for c in self.corrs]}

    @staticmethod
    def from_json(d) -> "GridCModule":
        try:
            field = FieldSpec(int(d.get("field", 2)))
            grid = GridLine(tuple(d["grid"]))
            dims = [int(x) for x in d["dims"]]
            raw = d["corrs"]
        except (KeyError, TypeError, AttributeError) as e:
            raise ValidationError(f"module json: missing or malformed field ({e})") from None
        if len(dims) != grid.npos:
            raise ValidationError(f"dims: expected {grid.npos} entries, got {len(dims)}")
        if len(raw) != grid.npos - 1:
            raise ValidationError(f"corrs: expected {grid.npos - 1} entries, got {len(raw)}")
        corrs = [Correspondence.from_rows(rows, dims[q], dims[q + 1], field.p)
                 for q, rows in enumerate(raw)]
        return GridCModule(field, grid, tuple(dims), tuple(corrs))


def zero_module(grid: GridLine, p: int) -> GridCModule:
    dims = (0,) * grid.npos
    return GridCModule(FieldSpec(p), grid, dims, tuple(cr.zero(0, 0, p) for _ in range(grid.npos - 1)))


def interval_module(grid: GridLine, bar: Bar, p: int) -> GridCModule:
    bar.validate(grid)
    a, b = bar.start, bar.end
    dims = tuple(1 if a <= q <= b else 0 for q in range(grid.npos))
    corrs = []
    for q in range(grid.npos - 1):
        dl, dr = dims[q], dims[q + 1]
        if dl and dr:
            c = cr.diagonal(1, p)
        elif q == a - 1:
            c = cr.zero(0, 1, p) if bar.bar_type.left_closed else cr.right_full(0, 1, p)
        elif q == b:
            c = cr.zero(1, 0, p) if bar.bar_type.right_closed else cr.left_full(1, 0, p)
        else:
            c = cr.zero(dl, dr, p)
        corrs.append(c)
    return GridCModule(FieldSpec(p), grid, dims, tuple(corrs))


def direct_sum(ms: Sequence[GridCModule]) -> GridCModule:
    ms = list(ms)
    if not ms:
        raise ValidationError("direct_sum of an empty list")
    first = ms[0]
    for m in ms[1:]:
        if m.grid != first.grid or m.field != first.field:
            raise GridMismatch("direct_sum: modules live on different grids or fields")
    dims = tuple(sum(m.dims[q] for m in ms) for q in range(first.grid.npos))
    corrs = []
    for q in range(first.grid.npos - 1):
        c = ms[0].corrs[q]
        for m in ms[1:]:
            c = cr.block_sum(c, m.corrs[q])
        corrs.append(c)
    return GridCModule(first.field, first.grid, dims, tuple(corrs))


# -- morphisms -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridCMorphism:
    source: GridCModule
    target: GridCModule
    f: tuple

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(self.f))
        s, t = self.source, self.target
        if s.grid != t.grid or s.field != t.field:
            raise GridMismatch("morphism: source and target on different grids or fields")
        if len(self.f) != s.grid.npos:
            raise ValidationError("morphism: one correspondence per position required")
        for q, c in enumerate(self.f):
            if c.dim_left != s.dims[q] or c.dim_right != t.dims[q]:
                raise ValidationError(f"morphism component {q} has wrong shape")

    @staticmethod
    def from_maps(source, target, maps) -> "GridCMorphism":
        p = source.p
        fs = [cr.graph(np.asarray(m, dtype=np.int64).reshape(target.dims[q], source.dims[q]), p)
              for q, m in enumerate(maps)]
        return GridCMorphism(source, target, tuple(fs))

    def is_compatible(self, lax: bool = False) -> bool:
        """f_{q+1} o u_q == v_q o f_q at every step; lax only asks for inclusion."""
        u, v = self.source.corrs, self.target.corrs
        for q in range(len(u)):
            lhs = cr.compose(u[q], self.f[q + 1])
            rhs = cr.compose(self.f[q], v[q])
            if lax:
                if not rhs.space.contains_subspace(lhs.space):
                    return False
            elif lhs.space != rhs.space:
                return False
        return True

    def check(self, lax: bool = False):
        if not self.is_compatible(lax):
            raise IncompatibleMorphism("morphism does not commute with the module relations")


def morphism_image(f: GridCMorphism, lax: bool = False) -> GridCModule:
    f.check(lax)
    ims = [cr.image(c) for c in f.f]
    corrs = [cr.restrict(f.target.corrs[q], ims[q], ims[q + 1]) for q in range(len(ims) - 1)]
    return GridCModule(f.target.field, f.target.grid, tuple(s.dim for s in ims), tuple(corrs))


def morphism_kernel(f: GridCMorphism, g: GridCMorphism, lax: bool = False) -> GridCModule:
    """Kernel of f, given g with Im(g) = ker(f) pointwise."""
    f.check(lax)
    g.check(lax)
    if g.target.grid != f.source.grid or g.target.dims != f.source.dims:
        raise GridMismatch("kernel: target of g is not the source of f")
    kers = [cr.kernel(c) for c in f.f]
    for q, (k, c) in enumerate(zip(kers, g.f)):
        if cr.image(c) != k:
            raise NotExact(f"position {q}: image of g differs from kernel of f")
    corrs = [cr.restrict(f.source.corrs[q], kers[q], kers[q + 1]) for q in range(len(kers) - 1)]
    return GridCModule(f.source.field, f.source.grid, tuple(k.dim for k in kers), tuple(corrs))


def quotient_map(sub: Subspace) -> np.ndarray:
    """Matrix of V -> V/sub using the lexicographically first complement."""
    n, p = sub.ambient, sub.p
    comp = sub.complement()
    if comp.dim == 0:
        return np.zeros((0, n), dtype=np.int64)
    m = np.concatenate([comp.basis, sub.basis]) if sub.dim else comp.basis
    inv = inverse(m.T, p)  # coordinates of v w.r.t. rows of m
    return inv[:comp.dim]


def morphism_cokernel(f: GridCMorphism, lax: bool = False) -> GridCModule:
    """Quotient of a p-module target by the pointwise images of f."""
    f.check(lax)
    tgt = f.target
    p = tgt.p
    for q, c in enumerate(tgt.corrs):
        if not cr.is_graph(c):
            raise TargetNotPModule(f"target relation {q} is not the graph of a map")
    ims = [cr.image(c) for c in f.f]
    qmaps = [quotient_map(s) for s in ims]
    corrs = []
    for q in range(len(ims) - 1):
        dl, dr = tgt.dims[q], tgt.dims[q + 1]
        rows = [np.concatenate([r, np.zeros(dr, dtype=np.int64)]) for r in ims[q].basis]
        rows += [np.concatenate([np.zeros(dl, dtype=np.int64), r]) for r in ims[q + 1].basis]
        box = Subspace.span(np.array(rows), dl + dr, p) if rows else Subspace.zero(dl + dr, p)
        lifted = subspace_sum(tgt.corrs[q].space, box)
        a, b = qmaps[q], qmaps[q + 1]
        blk = np.zeros((a.shape[0] + b.shape[0], dl + dr), dtype=np.int64)
        blk[:a.shape[0], :dl] = a
        blk[a.shape[0]:, dl:] = b
        corrs.append(Correspondence(a.shape[0], b.shape[0], lifted.image(blk)))
    return GridCModule(tgt.field, tgt.grid, tuple(m.shape[0] for m in qmaps), tuple(corrs))


def constant_module(grid: GridLine, d: int, p: int) -> GridCModule:
    """The module with space k^d everywhere and identity relations."""
    return GridCModule(FieldSpec(p), grid, (d,) * grid.npos,
                       tuple(cr.diagonal(d, p) for _ in range(grid.npos - 1)))
