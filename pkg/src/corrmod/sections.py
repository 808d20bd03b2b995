"""Sections of a grid c-module over position intervals.

A section over [a..b] is a tuple (v_a, ..., v_b) with (v_q, v_{q+1}) in the
q-th correspondence for every adjacent pair.  Coordinates of the product
space are ordered position-major.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cmodule import GridCModule
from .errors import (GluingFailure, NotSubinterval, OverlapMismatch, RangeError,
                     ValidationError)
from .exactfield import Subspace, kernel_basis


def offsets(m: GridCModule, a: int, b: int) -> list[int]:
    out = [0]
    for q in range(a, b + 1):
        out.append(out[-1] + m.dims[q])
    return out


_ANN_CACHE: dict = {}


def _annihilator(m: GridCModule, q: int) -> np.ndarray:
    key = (id(m), q)
    hit = _ANN_CACHE.get(key)
    if hit is not None and hit[0] is m:
        return hit[1]
    ann = m.corrs[q].space.annihilator()
    if len(_ANN_CACHE) > 20000:
        _ANN_CACHE.clear()
    _ANN_CACHE[key] = (m, ann)
    return ann


def constrained_sections(m: GridCModule, a: int, b: int,
                         left_vanish: bool = False, right_vanish: bool = False) -> Subspace:
    """Sections over [a..b], optionally extendable by zero past either end.

    left_vanish adds (0, v_a) in corr_{a-1}; right_vanish adds (v_b, 0) in corr_b.
    """
    off = offsets(m, a, b)
    n = off[-1]
    p = m.p
    eqs = []
    for q in range(a, b):
        ann = _annihilator(m, q)
        if ann.shape[0] == 0:
            continue
        row = np.zeros((ann.shape[0], n), dtype=np.int64)
        i = q - a
        row[:, off[i]:off[i + 2]] = ann
        eqs.append(row)
    if left_vanish and a > 0:
        ann = _annihilator(m, a - 1)
        dl = m.dims[a - 1]
        if ann.shape[0]:
            row = np.zeros((ann.shape[0], n), dtype=np.int64)
            row[:, off[0]:off[1]] = ann[:, dl:]
            eqs.append(row)
    if right_vanish and b < m.last:
        ann = _annihilator(m, b)
        db = m.dims[b]
        if ann.shape[0]:
            row = np.zeros((ann.shape[0], n), dtype=np.int64)
            row[:, off[-2]:off[-1]] = ann[:, :db]
            eqs.append(row)
    if n == 0:
        return Subspace.zero(0, p)
    if not eqs:
        return Subspace.full(n, p)
    return Subspace.span(kernel_basis(np.concatenate(eqs), p, n), n, p)


@dataclass(frozen=True)
class SectionSpace:
    module: GridCModule
    a: int
    b: int
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    def split(self, v) -> list[np.ndarray]:
        """Break a product vector into its per-position components."""
        off = offsets(self.module, self.a, self.b)
        v = np.asarray(v, dtype=np.int64)
        return [v[off[i]:off[i + 1]] for i in range(len(off) - 1)]


def _check_range(m: GridCModule, a: int, b: int):
    if not (0 <= a <= b <= m.last):
        raise RangeError(f"position interval [{a}..{b}] outside 0..{m.last}")


def section_space(m: GridCModule, a: int, b: int) -> SectionSpace:
    _check_range(m, a, b)
    return SectionSpace(m, a, b, constrained_sections(m, a, b))


def restriction_columns(m: GridCModule, a: int, b: int, a2: int, b2: int) -> list[int]:
    off = offsets(m, a, b)
    return list(range(off[a2 - a], off[b2 - a + 1]))


def restriction(s: SectionSpace, a2: int, b2: int):
    """Matrix of F([a..b]) -> F([a2..b2]) in canonical bases, and the target."""
    if not (s.a <= a2 <= b2 <= s.b):
        raise NotSubinterval(f"[{a2}..{b2}] is not inside [{s.a}..{s.b}]")
    tgt = section_space(s.module, a2, b2)
    cols = restriction_columns(s.module, s.a, s.b, a2, b2)
    if s.dim == 0 or tgt.dim == 0:
        return np.zeros((tgt.dim, s.dim), dtype=np.int64), tgt
    images = s.space.basis[:, cols]
    mat = np.array([[img[pc] for pc in tgt.space.pivots] for img in images], dtype=np.int64).T
    return mat % s.module.p, tgt


def is_section(m: GridCModule, a: int, b: int, vec) -> bool:
    return constrained_sections(m, a, b).contains(vec)


def _cover_connected(intervals: Sequence[tuple[int, int]]) -> bool:
    ivs = sorted(intervals)
    reach = ivs[0][1]
    for lo, hi in ivs[1:]:
        if lo > reach:
            return False
        reach = max(reach, hi)
    return True


def glue(m: GridCModule, pieces):
    """Glue (interval, section vector) pieces into one section over their union.

    Returns (a, b, vector).  Raises OverlapMismatch if two pieces disagree at
    a shared position and GluingFailure if a disconnected cover's union is not
    a section.  Pieces must together cover a position interval.
    """
    if not pieces:
        raise ValidationError("glue: no pieces")
    comps: dict[int, np.ndarray] = {}
    intervals = []
    for (a, b), vec in pieces:
        _check_range(m, a, b)
        vec = np.asarray(vec, dtype=np.int64) % m.p
        off = offsets(m, a, b)
        if vec.shape != (off[-1],):
            raise ValidationError(f"glue: piece over [{a}..{b}] has wrong length")
        if not is_section(m, a, b, vec):
            raise ValidationError(f"glue: piece over [{a}..{b}] is not a section")
        intervals.append((a, b))
        for i, q in enumerate(range(a, b + 1)):
            part = vec[off[i]:off[i + 1]]
            if q in comps and not np.array_equal(comps[q], part):
                raise OverlapMismatch(f"pieces disagree at position {q}")
            comps[q] = part
    lo = min(a for a, _ in intervals)
    hi = max(b for _, b in intervals)
    if set(comps) != set(range(lo, hi + 1)):
        raise ValidationError("glue: pieces do not cover a position interval")
    union = np.concatenate([comps[q] for q in range(lo, hi + 1)]) if hi >= lo else np.zeros(0)
    union = union.astype(np.int64)
    if is_section(m, lo, hi, union):
        return lo, hi, union
    if _cover_connected(intervals):
        # cannot happen: every adjacent pair lies inside a single piece
        raise ValidationError("glue: connected cover produced a non-section")
    raise GluingFailure(f"union over [{lo}..{hi}] of a disconnected cover is not a section")
