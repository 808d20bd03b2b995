"""Slices of two-parameter persistence modules along negative-slope lines.

A GridModule2D lives on a grid xs x ys and is extended to the whole plane by
lower-left constancy: the space at (x, y) is the one at the largest grid
point below it, or 0 when there is none.  Points of a line y = slope*x +
intercept are parametrized by x, which increases along the line orientation.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import correspondence as cr
from .cmodule import GridCModule, GridLine, format_value, parse_value
from .correspondence import Correspondence
from .errors import (DegenerateLine, DimensionMismatch, NotCommutative, OrderViolation,
                     ValidationError)
from .exactfield import FieldSpec, Subspace, kernel_basis, random_invertible, inverse


@dataclass(frozen=True)
class LineSpec:
    slope: Fraction
    intercept: Fraction

    def __post_init__(self):
        object.__setattr__(self, "slope", parse_value(self.slope))
        object.__setattr__(self, "intercept", parse_value(self.intercept))
        if self.slope >= 0:
            raise DegenerateLine(f"slope {format_value(self.slope)} is not negative")

    def point(self, x) -> tuple[Fraction, Fraction]:
        x = Fraction(x)
        return x, self.slope * x + self.intercept

    def x_at(self, y) -> Fraction:
        return (Fraction(y) - self.intercept) / self.slope

    @staticmethod
    def parse(text: str) -> "LineSpec":
        parts = text.split(",")
        if len(parts) != 2:
            raise ValidationError(f"line: expected 'slope,intercept', got {text!r}")
        return LineSpec(parse_value(parts[0]), parse_value(parts[1]))

    def to_json(self):
        return {"slope": format_value(self.slope), "intercept": format_value(self.intercept)}

    @staticmethod
    def from_json(d) -> "LineSpec":
        try:
            return LineSpec(parse_value(d["slope"]), parse_value(d["intercept"]))
        except (KeyError, TypeError) as e:
            raise ValidationError(f"line json: {e}") from None


def _mat(m, rows: int, cols: int, p: int, what: str) -> np.ndarray:
    a = np.zeros((rows, cols), dtype=np.int64) if (rows == 0 or cols == 0) else None
    if a is not None:
        return a
    try:
        a = np.array(m, dtype=np.int64)
    except (TypeError, ValueError):
        raise ValidationError(f"{what}: malformed matrix") from None
    if a.shape != (rows, cols):
        raise DimensionMismatch(f"{what}: expected {rows}x{cols}, got {'x'.join(map(str, a.shape))}")
    return a % p


@dataclass(frozen=True, eq=False)
class GridModule2D:
    """dims[i][j] is the space at (xs[i], ys[j]).

    hmaps[i][j]: U(i,j) -> U(i+1,j) and vmaps[i][j]: U(i,j) -> U(i,j+1), as
    matrices with target rows.
    """

    field: FieldSpec
    xs: tuple
    ys: tuple
    dims: tuple
    hmaps: tuple
    vmaps: tuple

    def __post_init__(self):
        p = self.field.p
        xs = tuple(parse_value(v) for v in self.xs)
        ys = tuple(parse_value(v) for v in self.ys)
        for name, g in (("xs", xs), ("ys", ys)):
            if not g or any(b <= a for a, b in zip(g, g[1:])):
                raise ValidationError(f"{name} must be non-empty and strictly increasing")
        nx, ny = len(xs), len(ys)
        dims = tuple(tuple(int(d) for d in row) for row in self.dims)
        if len(dims) != nx or any(len(row) != ny for row in dims):
            raise DimensionMismatch(f"dims must be {nx}x{ny}")
        if any(d < 0 for row in dims for d in row):
            raise ValidationError("dims must be non-negative")
        try:
            h = tuple(tuple(_mat(self.hmaps[i][j], dims[i + 1][j], dims[i][j], p, f"hmaps[{i}][{j}]")
                            for j in range(ny)) for i in range(nx - 1))
            v = tuple(tuple(_mat(self.vmaps[i][j], dims[i][j + 1], dims[i][j], p, f"vmaps[{i}][{j}]")
                            for j in range(ny - 1)) for i in range(nx))
        except (IndexError, TypeError):
            raise DimensionMismatch("hmaps/vmaps do not match the grid shape") from None
        for name, val in (("xs", xs), ("ys", ys), ("dims", dims), ("hmaps", h), ("vmaps", v)):
            object.__setattr__(self, name, val)
        for i in range(nx - 1):
            for j in range(ny - 1):
                a = (v[i + 1][j] @ h[i][j]) % p
                b = (h[i][j + 1] @ v[i][j]) % p
                if not np.array_equal(a, b):
                    raise NotCommutative(f"square at ({i},{j}) does not commute")

    @property
    def p(self) -> int:
        return self.field.p

    def cell(self, pt) -> tuple[int, int] | None:
        i = bisect_right(self.xs, pt[0]) - 1
        j = bisect_right(self.ys, pt[1]) - 1
        if i < 0 or j < 0:
            return None
        return i, j

    def dim_at(self, pt) -> int:
        c = self.cell(pt)
        return 0 if c is None else self.dims[c[0]][c[1]]

    def transfer(self, a, b) -> np.ndarray:
        """Matrix of u_a^b for a <= b componentwise."""
        if a[0] > b[0] or a[1] > b[1]:
            raise OrderViolation("transfer: points are not comparable in this order")
        ca, cb = self.cell(a), self.cell(b)
        db = self.dim_at(b)
        if ca is None:
            return np.zeros((db, 0), dtype=np.int64)
        (ia, ja), (ib, jb) = ca, cb
        p = self.p
        m = np.eye(self.dims[ia][ja], dtype=np.int64)
        for i in range(ia, ib):
            m = (self.hmaps[i][ja] @ m) % p
        for j in range(ja, jb):
            m = (self.vmaps[ib][j] @ m) % p
        return m

    def to_json(self):
        def rows(a):
            return a.tolist()
        return {"field": self.p, "xs": [format_value(x) for x in self.xs],
                "ys": [format_value(y) for y in self.ys],
                "dims": [list(r) for r in self.dims],
                "hmaps": [[rows(a) for a in col] for col in self.hmaps],
                "vmaps": [[rows(a) for a in col] for col in self.vmaps]}

    @staticmethod
    def from_json(d) -> "GridModule2D":
        try:
            return GridModule2D(FieldSpec(int(d.get("field", 2))), tuple(d["xs"]), tuple(d["ys"]),
                                tuple(d["dims"]), tuple(d["hmaps"]), tuple(d["vmaps"]))
        except (KeyError, TypeError, AttributeError) as e:
            raise ValidationError(f"module2d json: missing or malformed field ({e})") from None


# -- constructors ------------------------------------------------------------

def rectangle_module(xs, ys, i_range: tuple[int, int], j_range: tuple[int, int],
                     p: int) -> GridModule2D:
    """k on grid cells i1..i2 x j1..j2 with identity maps inside, 0 elsewhere."""
    nx, ny = len(xs), len(ys)
    (i1, i2), (j1, j2) = i_range, j_range
    if not (0 <= i1 <= i2 < nx and 0 <= j1 <= j2 < ny):
        raise ValidationError("rectangle: index range outside the grid")

    def inside(i, j):
        return i1 <= i <= i2 and j1 <= j <= j2

    dims = [[1 if inside(i, j) else 0 for j in range(ny)] for i in range(nx)]
    h = [[np.eye(1, dtype=np.int64) if inside(i, j) and inside(i + 1, j) else
          np.zeros((dims[i + 1][j], dims[i][j]), dtype=np.int64)
          for j in range(ny)] for i in range(nx - 1)]
    v = [[np.eye(1, dtype=np.int64) if inside(i, j) and inside(i, j + 1) else
          np.zeros((dims[i][j + 1], dims[i][j]), dtype=np.int64)
          for j in range(ny - 1)] for i in range(nx)]
    return GridModule2D(FieldSpec(p), tuple(xs), tuple(ys), dims, h, v)


def _block(mats: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def direct_sum_2d(ms: Sequence[GridModule2D]) -> GridModule2D:
    first = ms[0]
    for m in ms[1:]:
        if m.xs != first.xs or m.ys != first.ys or m.p != first.p:
            raise ValidationError("direct sum: modules on different grids or fields")
    nx, ny = len(first.xs), len(first.ys)
    dims = [[sum(m.dims[i][j] for m in ms) for j in range(ny)] for i in range(nx)]
    h = [[_block([m.hmaps[i][j] for m in ms]) for j in range(ny)] for i in range(nx - 1)]
    v = [[_block([m.vmaps[i][j] for m in ms]) for j in range(ny - 1)] for i in range(nx)]
    return GridModule2D(first.field, first.xs, first.ys, dims, h, v)


def change_basis(m: GridModule2D, rng) -> GridModule2D:
    """Isomorphic copy of m under random pointwise base changes."""
    p = m.p
    nx, ny = len(m.xs), len(m.ys)
    P = [[random_invertible(rng, m.dims[i][j], p) for j in range(ny)] for i in range(nx)]
    Pi = [[inverse(P[i][j], p) for j in range(ny)] for i in range(nx)]
    h = [[(P[i + 1][j] @ m.hmaps[i][j] @ Pi[i][j]) % p for j in range(ny)] for i in range(nx - 1)]
    v = [[(P[i][j + 1] @ m.vmaps[i][j] @ Pi[i][j]) % p for j in range(ny - 1)] for i in range(nx)]
    return GridModule2D(m.field, m.xs, m.ys, m.dims, h, v)


def random_module_2d(rng, nx: int = 4, ny: int = 4, max_dim: int = 3, p: int = 2,
                     max_rects: int = 4) -> GridModule2D:
    """Sum of random rectangle modules, pointwise dimension at most max_dim."""
    xs, ys = tuple(range(nx)), tuple(range(ny))
    rects = []
    load = np.zeros((nx, ny), dtype=int)
    for _ in range(int(rng.integers(1, max_rects + 1))):
        i1, i2 = sorted(int(v) for v in rng.integers(0, nx, size=2))
        j1, j2 = sorted(int(v) for v in rng.integers(0, ny, size=2))
        if np.any(load[i1:i2 + 1, j1:j2 + 1] >= max_dim):
            continue
        load[i1:i2 + 1, j1:j2 + 1] += 1
        rects.append(rectangle_module(xs, ys, (i1, i2), (j1, j2), p))
    if not rects:
        rects.append(rectangle_module(xs, ys, (0, 0), (0, 0), p))
    return change_basis(direct_sum_2d(rects), rng)


# -- line slices ---------------------------------------------------------------

def crossings(m: GridModule2D, line: LineSpec) -> list[Fraction]:
    """Sorted, deduplicated x-parameters where the line meets a grid line."""
    return sorted(set(m.xs) | {line.x_at(y) for y in m.ys})


def line_positions(m: GridModule2D, line: LineSpec) -> GridLine:
    return GridLine(tuple(crossings(m, line)))


def _finest(m: GridModule2D, line: LineSpec, s: Fraction, t: Fraction) -> list[Fraction]:
    inner = [c for c in crossings(m, line) if s < c < t]
    pts = sorted({s, t, *inner})
    out = [pts[0]]
    for a, b in zip(pts, pts[1:]):
        out.extend([(a + b) / 2, b])
    return out


def step_relation(m: GridModule2D, line: LineSpec, s, t) -> Correspondence:
    """reverse(graph(u_t^r)) o graph(u_s^r) with r = s v t."""
    ps, pt = line.point(s), line.point(t)
    r = (pt[0], ps[1])
    a = cr.graph(m.transfer(ps, r), m.p, m.dim_at(ps))
    b = cr.graph(m.transfer(pt, r), m.p, m.dim_at(pt))
    return cr.compose(a, cr.reverse(b))


def staircase_correspondence(m: GridModule2D, line: LineSpec, s, t) -> Correspondence:
    """Relation v_s^t composed along the finest staircase from s to t."""
    s, t = Fraction(s), Fraction(t)
    if s > t:
        raise OrderViolation(f"staircase: {format_value(s)} comes after {format_value(t)}")
    if s == t:
        return cr.diagonal(m.dim_at(line.point(s)), m.p)
    pts = _finest(m, line, s, t)
    return cr.compose_all([step_relation(m, line, a, b) for a, b in zip(pts, pts[1:])])


def _interp_system(m: GridModule2D, line: LineSpec, pts: Sequence[Fraction]):
    """Kernel of the interpolation equations; columns [w_0 .. w_n | z_1 .. z_n]."""
    p = m.p
    P = [line.point(x) for x in pts]
    R = [(P[i][0], P[i - 1][1]) for i in range(1, len(P))]
    wd = [m.dim_at(x) for x in P]
    zd = [m.dim_at(r) for r in R]
    woff = np.concatenate([[0], np.cumsum(wd)]).astype(int)
    zoff = (woff[-1] + np.concatenate([[0], np.cumsum(zd)])).astype(int)
    n = int(zoff[-1])
    eqs = []
    for i in range(1, len(P)):
        for k in (i - 1, i):
            a = m.transfer(P[k], R[i - 1])
            row = np.zeros((zd[i - 1], n), dtype=np.int64)
            row[:, woff[k]:woff[k + 1]] = a
            row[:, zoff[i - 1]:zoff[i]] -= np.eye(zd[i - 1], dtype=np.int64)
            eqs.append(row % p)
    eqs = [e for e in eqs if e.shape[0]]
    sol = kernel_basis(np.concatenate(eqs), p, n) if eqs else np.eye(n, dtype=np.int64)
    return sol, woff, n


def interpolation_relation(m: GridModule2D, line: LineSpec, pts: Sequence) -> Correspondence:
    """Pairs (v_s, v_t) interpolated along the staircase of pts, by one linear solve."""
    pts = [Fraction(x) for x in pts]
    if any(b < a for a, b in zip(pts, pts[1:])):
        raise OrderViolation("staircase points must be in line order")
    sol, woff, n = _interp_system(m, line, pts)
    ds, dt = int(woff[1]), int(woff[-1] - woff[-2])
    cols = list(range(0, ds)) + list(range(int(woff[-2]), int(woff[-1])))
    if n == 0 or sol.shape[0] == 0:
        return cr.zero(ds, dt, m.p)
    return Correspondence(ds, dt, Subspace.span(sol, n, m.p).project(cols))


def interpolates(m: GridModule2D, line: LineSpec, pts: Sequence, vs, vt) -> bool:
    rel = interpolation_relation(m, line, pts)
    return rel.contains(vs, vt)


def slice_module(m: GridModule2D, line: LineSpec) -> GridCModule:
    grid = line_positions(m, line)
    reps = [grid.representative(q) for q in range(grid.npos)]
    dims = tuple(m.dim_at(line.point(x)) for x in reps)
    corrs = tuple(staircase_correspondence(m, line, a, b) for a, b in zip(reps, reps[1:]))
    return GridCModule(m.field, grid, dims, corrs)
