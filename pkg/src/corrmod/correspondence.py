"""Linear correspondences C ⊆ U × V.

A correspondence is stored as a canonical subspace of k^(dim U + dim V) with
the U-block first.  Linear maps embed via their graphs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .exactfield import Subspace, subspace_intersect


@dataclass(frozen=True)
class Correspondence:
    dim_left: int
    dim_right: int
    space: Subspace

    def __post_init__(self):
        if self.space.ambient != self.dim_left + self.dim_right:
            raise ValidationError("correspondence ambient differs from dim_left + dim_right")

    @property
    def p(self) -> int:
        return self.space.p

    @property
    def dim(self) -> int:
        return self.space.dim

    @staticmethod
    def from_rows(rows, dim_left: int, dim_right: int, p: int) -> "Correspondence":
        n = dim_left + dim_right
        if len(rows) == 0:
            return Correspondence(dim_left, dim_right, Subspace.zero(n, p))
        for r in rows:
            if len(r) != n:
                raise ValidationError(f"correspondence row has length {len(r)}, expected {n}")
        return Correspondence(dim_left, dim_right, Subspace.span(rows, n, p))

    def contains(self, u, v) -> bool:
        return self.space.contains(np.concatenate([np.asarray(u, dtype=np.int64).reshape(-1),
                                                   np.asarray(v, dtype=np.int64).reshape(-1)]))

    def to_rows(self):
        return self.space.to_rows()

    def __repr__(self):
        return f"Correspondence({self.dim_left}x{self.dim_right}, {self.space.basis.tolist()})"


def zero(dl: int, dr: int, p: int) -> Correspondence:
    """0 × 0."""
    return Correspondence(dl, dr, Subspace.zero(dl + dr, p))


def full(dl: int, dr: int, p: int) -> Correspondence:
    """U × V."""
    return Correspondence(dl, dr, Subspace.full(dl + dr, p))


def left_full(dl: int, dr: int, p: int) -> Correspondence:
    """U × 0."""
    return Correspondence(dl, dr, Subspace.span(np.eye(dl + dr, dtype=np.int64)[:dl], dl + dr, p))


def right_full(dl: int, dr: int, p: int) -> Correspondence:
    """0 × V."""
    return Correspondence(dl, dr, Subspace.span(np.eye(dl + dr, dtype=np.int64)[dl:], dl + dr, p))


def diagonal(d: int, p: int) -> Correspondence:
    return graph(np.eye(d, dtype=np.int64), p)


def graph(m, p: int, dim_domain: int | None = None) -> Correspondence:
    """Graph {(v, m v)} of the linear map given by the matrix m (rows = target)."""
    m = np.asarray(m, dtype=np.int64)
    if m.ndim != 2:
        if m.size == 0 and dim_domain is not None:
            m = np.zeros((0, dim_domain), dtype=np.int64)
        else:
            raise ValidationError("graph: matrix must be 2-dimensional")
    m = m % p
    dv, du = m.shape
    rows = np.concatenate([np.eye(du, dtype=np.int64), m.T], axis=1)
    return Correspondence(du, dv, Subspace.span(rows, du + dv, p) if du else Subspace.zero(dv, p))


def reverse(c: Correspondence) -> Correspondence:
    dl, dr = c.dim_left, c.dim_right
    cols = list(range(dl, dl + dr)) + list(range(dl))
    return Correspondence(dr, dl, c.space.project(cols))


def compose(c1: Correspondence, c2: Correspondence) -> Correspondence:
    """c2 ∘ c1 = {(u, w) : exists v with (u, v) in c1 and (v, w) in c2}."""
    if c1.dim_right != c2.dim_left:
        raise DimensionMismatch(
            f"compose: dim_right {c1.dim_right} of first differs from dim_left {c2.dim_left}")
    if c1.p != c2.p:
        raise DimensionMismatch("compose: fields differ")
    p = c1.p
    du, dv, dw = c1.dim_left, c1.dim_right, c2.dim_right
    a = _emb_left(c1, dw, p)
    b = _emb_right(c2, du, p)
    return _project_uw(subspace_intersect(a, b), du, dv, dw, p)


def _emb_left(c1: Correspondence, dw: int, p: int) -> Subspace:
    """c1 × W inside U × V × W."""
    du_dv = c1.dim_left + c1.dim_right
    rows = []
    if c1.dim:
        rows.append(np.concatenate([c1.space.basis, np.zeros((c1.dim, dw), dtype=np.int64)], axis=1))
    if dw:
        rows.append(np.concatenate([np.zeros((dw, du_dv), dtype=np.int64),
                                    np.eye(dw, dtype=np.int64)], axis=1))
    n = du_dv + dw
    return Subspace.span(np.concatenate(rows), n, p) if rows else Subspace.zero(n, p)


def _emb_right(c2: Correspondence, du: int, p: int) -> Subspace:
    """U × c2 inside U × V × W."""
    dv_dw = c2.dim_left + c2.dim_right
    rows = []
    if du:
        rows.append(np.concatenate([np.eye(du, dtype=np.int64),
                                    np.zeros((du, dv_dw), dtype=np.int64)], axis=1))
    if c2.dim:
        rows.append(np.concatenate([np.zeros((c2.dim, du), dtype=np.int64), c2.space.basis], axis=1))
    n = du + dv_dw
    return Subspace.span(np.concatenate(rows), n, p) if rows else Subspace.zero(n, p)


def _project_uw(s: Subspace, du: int, dv: int, dw: int, p: int) -> Correspondence:
    cols = list(range(du)) + list(range(du + dv, du + dv + dw))
    return Correspondence(du, dw, s.project(cols))


def compose_all(cs) -> Correspondence:
    it = iter(cs)
    acc = next(it)
    for c in it:
        acc = compose(acc, c)
    return acc


def domain(c: Correspondence) -> Subspace:
    return c.space.project(range(c.dim_left))


def image(c: Correspondence) -> Subspace:
    return c.space.project(range(c.dim_left, c.dim_left + c.dim_right))


def kernel(c: Correspondence) -> Subspace:
    """{u : (u, 0) in C}."""
    dl, dr = c.dim_left, c.dim_right
    if c.dim == 0:
        return Subspace.zero(dl, c.p)
    zero_v = Subspace.span(np.eye(dl + dr, dtype=np.int64)[:dl], dl + dr, c.p) if dl else \
        Subspace.zero(dl + dr, c.p)
    return subspace_intersect(c.space, zero_v).project(range(dl))


def parts(c: Correspondence):
    """(Dom C, Im C, ker C, dim V - dim Im C)."""
    im = image(c)
    return domain(c), im, kernel(c), c.dim_right - im.dim


def is_graph(c: Correspondence) -> bool:
    """True iff C is the graph of a linear map with full domain."""
    return domain(c).dim == c.dim_left and kernel(reverse(c)).dim == 0


def graph_matrix(c: Correspondence) -> np.ndarray:
    """The matrix T with C = G_T.  Requires is_graph(c)."""
    if not is_graph(c):
        raise ValidationError("correspondence is not the graph of a map")
    dl = c.dim_left
    # canonical basis of a graph has pivots exactly on the U-block identity
    return c.space.basis[:, dl:].T.copy()


def is_cvec_iso(c: Correspondence) -> bool:
    dom, im, ker, _ = parts(c)
    return (dom.dim == c.dim_left and kernel(reverse(c)).dim == 0
            and im.dim == c.dim_right and ker.dim == 0)


def block_sum(a: Correspondence, b: Correspondence) -> Correspondence:
    """a ⊕ b ⊆ (U_a ⊕ U_b) × (V_a ⊕ V_b)."""
    if a.p != b.p:
        raise DimensionMismatch("block_sum: fields differ")
    la, ra, lb, rb = a.dim_left, a.dim_right, b.dim_left, b.dim_right
    n = la + lb + ra + rb
    rows = []
    for r in a.space.basis:
        v = np.zeros(n, dtype=np.int64)
        v[:la] = r[:la]
        v[la + lb:la + lb + ra] = r[la:]
        rows.append(v)
    for r in b.space.basis:
        v = np.zeros(n, dtype=np.int64)
        v[la:la + lb] = r[:lb]
        v[la + lb + ra:] = r[lb:]
        rows.append(v)
    space = Subspace.span(np.array(rows), n, a.p) if rows else Subspace.zero(n, a.p)
    return Correspondence(la + lb, ra + rb, space)


def restrict(c: Correspondence, left: Subspace, right: Subspace) -> Correspondence:
    """C ∩ (left × right), expressed in the canonical bases of left and right."""
    dl, dr = c.dim_left, c.dim_right
    p = c.p
    n = dl + dr
    rows = []
    for r in left.basis:
        rows.append(np.concatenate([r, np.zeros(dr, dtype=np.int64)]))
    for r in right.basis:
        rows.append(np.concatenate([np.zeros(dl, dtype=np.int64), r]))
    box = Subspace.span(np.array(rows), n, p) if rows else Subspace.zero(n, p)
    inter = subspace_intersect(c.space, box)
    lp, rp = list(left.pivots), [dl + q for q in right.pivots]
    return Correspondence(left.dim, right.dim, inter.project(lp + rp))

