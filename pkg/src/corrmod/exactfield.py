"""Exact linear algebra over a prime field GF(p).

Matrices are numpy int64 arrays holding residues in [0, p).  Every product of
two residues fits comfortably because p < 2**16.  No floating point is used.

A :class:`Subspace` stores its canonical basis: the reduced row echelon form of
any spanning set, with zero rows dropped.  Two subspaces are therefore equal
exactly when their stored bases are equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AmbientMismatch, ValidationError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int = 2

    def __post_init__(self):
        if not isinstance(self.p, int) or not _is_prime(self.p) or self.p >= 2**16:
            raise ValidationError(f"field: p={self.p!r} must be a prime below 65536")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)


def as_matrix(m, p: int, ncols: int | None = None) -> np.ndarray:
    """Coerce nested sequences or arrays to a 2-D int64 residue matrix."""
    a = np.array(m, dtype=np.int64)
    if a.size == 0:
        if ncols is None:
            ncols = a.shape[1] if a.ndim == 2 else 0
        return np.zeros((0, ncols), dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ValidationError("matrix must be 2-dimensional")
    if ncols is not None and a.shape[1] != ncols:
        raise AmbientMismatch(f"expected {ncols} columns, got {a.shape[1]}")
    return a % p


def rref(m, p: int) -> tuple[int, np.ndarray, list[int]]:
    """Reduced row echelon form.  Returns (rank, nonzero rows, pivot columns)."""
    a = np.array(m, dtype=np.int64, copy=True)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    a %= p
    rows, cols = a.shape
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r] = (a[r] * pow(lead, p - 2, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return r, a[:r].copy(), pivots


def rank(m, p: int) -> int:
    a = np.asarray(m)
    if a.size == 0:
        return 0
    return rref(a, p)[0]


def kernel_basis(m, p: int, ncols: int | None = None) -> np.ndarray:
    """Rows spanning {v : m @ v = 0}, in canonical (RREF) form."""
    a = as_matrix(m, p, ncols)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    r, red, piv = rref(a, p)
    free = [c for c in range(n) if c not in set(piv)]
    if not free:
        return np.zeros((0, n), dtype=np.int64)
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(piv):
            basis[k, pc] = (-red[i, f]) % p
    return rref(basis, p)[1]


def solve(a, b, p: int) -> np.ndarray | None:
    """One solution x of a @ x = b, or None if the system is inconsistent."""
    a = np.array(a, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64).reshape(-1) % p
    rows, n = a.shape
    if rows == 0:
        return np.zeros(n, dtype=np.int64)
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    r, red, piv = rref(aug, p)
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = red[i, n]
    return x


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of k^ambient, stored as its canonical RREF basis."""

    p: int
    ambient: int
    basis: np.ndarray
    pivots: tuple = field(default=())

    @staticmethod
    def span(vectors, ambient: int, p: int) -> "Subspace":
        a = as_matrix(vectors, p, ambient)
        if a.shape[0] == 0:
            return Subspace.zero(ambient, p)
        _, red, piv = rref(a, p)
        return Subspace._make(p, ambient, red, piv)

    @staticmethod
    def _make(p, ambient, basis, pivots) -> "Subspace":
        basis = np.ascontiguousarray(basis, dtype=np.int64)
        basis.setflags(write=False)
        return Subspace(p, ambient, basis, tuple(pivots))

    @staticmethod
    def zero(ambient: int, p: int) -> "Subspace":
        return Subspace._make(p, ambient, np.zeros((0, ambient), dtype=np.int64), ())

    @staticmethod
    def full(ambient: int, p: int) -> "Subspace":
        return Subspace._make(p, ambient, np.eye(ambient, dtype=np.int64), range(ambient))

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], ambient: int, p: int) -> "Subspace":
        return Subspace.span(rows if len(rows) else np.zeros((0, ambient)), ambient, p)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.p == other.p and self.ambient == other.ambient
                and self.basis.shape == other.basis.shape
                and bool(np.array_equal(self.basis, other.basis)))

    def __hash__(self):
        return hash((self.p, self.ambient, self.basis.shape, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(p={self.p}, ambient={self.ambient}, basis={self.basis.tolist()})"

    def _check(self, other: "Subspace"):
        if self.p != other.p or self.ambient != other.ambient:
            raise AmbientMismatch(
                f"ambient mismatch: k^{self.ambient} over GF({self.p}) vs "
                f"k^{other.ambient} over GF({other.p})")

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return subspace_intersect(self, other)

    def annihilator(self) -> np.ndarray:
        """Rows w with w . v = 0 for every v in the subspace."""
        if self.dim == 0:
            return np.eye(self.ambient, dtype=np.int64)
        return kernel_basis(self.basis, self.p)

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64).reshape(-1) % self.p
        if v.shape[0] != self.ambient:
            raise AmbientMismatch("vector length differs from ambient dimension")
        return not np.any(self.reduce(v))

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check(other)
        return all(self.contains(row) for row in other.basis)

    def reduce(self, v) -> np.ndarray:
        """Remainder of v after clearing the pivot columns of the basis."""
        v = np.array(v, dtype=np.int64).reshape(-1) % self.p
        for row, pc in zip(self.basis, self.pivots):
            c = int(v[pc])
            if c:
                v = (v - c * row) % self.p
        return v

    def coordinates(self, v) -> np.ndarray:
        """Coordinates of a member v in the canonical basis (pivot entries)."""
        v = np.asarray(v, dtype=np.int64).reshape(-1) % self.p
        if not self.contains(v):
            raise ValueError("vector is not in the subspace")
        return np.array([v[pc] for pc in self.pivots], dtype=np.int64)

    def project(self, cols: Sequence[int]) -> "Subspace":
        """Image under the coordinate projection onto cols (in that order)."""
        cols = list(cols)
        if self.dim == 0:
            return Subspace.zero(len(cols), self.p)
        return Subspace.span(self.basis[:, cols], len(cols), self.p)

    def image(self, m) -> "Subspace":
        """Image under the linear map v -> m @ v."""
        m = np.asarray(m, dtype=np.int64)
        out = m.shape[0]
        if self.dim == 0 or m.size == 0:
            return Subspace.zero(out, self.p)
        return Subspace.span((self.basis @ m.T) % self.p, out, self.p)

    def complement(self, within: "Subspace | None" = None) -> "Subspace":
        """Lexicographically first complement, inside `within` if given."""
        cand = within.basis if within is not None else np.eye(self.ambient, dtype=np.int64)
        cur = self
        chosen = []
        for row in cand:
            if not cur.contains(row):
                chosen.append(row)
                cur = subspace_sum(cur, Subspace.span(row, self.ambient, self.p))
        if not chosen:
            return Subspace.zero(self.ambient, self.p)
        return Subspace.span(np.array(chosen), self.ambient, self.p)

    def to_rows(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.basis]


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    a._check(b)
    if a.dim == 0:
        return b
    if b.dim == 0:
        return a
    return Subspace.span(np.concatenate([a.basis, b.basis]), a.ambient, a.p)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    a._check(b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient, a.p)
    eq = np.concatenate([a.annihilator(), b.annihilator()])
    return Subspace.span(kernel_basis(eq, a.p, a.ambient), a.ambient, a.p)


def kernel(m, p: int, ncols: int | None = None) -> Subspace:
    a = as_matrix(m, p, ncols)
    return Subspace.span(kernel_basis(a, p), a.shape[1], p)


def preimage(m, target: Subspace) -> Subspace:
    """{v : m @ v in target}."""
    m = as_matrix(m, target.p)
    if m.shape[0] != target.ambient:
        raise AmbientMismatch("matrix rows differ from target ambient dimension")
    n = m.shape[1]
    if target.dim == target.ambient:
        return Subspace.full(n, target.p)
    eq = (target.annihilator() @ m) % target.p
    return Subspace.span(kernel_basis(eq, target.p, n), n, target.p)


def sum_all(spaces: Iterable[Subspace], ambient: int, p: int) -> Subspace:
    rows = [s.basis for s in spaces if s.dim]
    if not rows:
        return Subspace.zero(ambient, p)
    return Subspace.span(np.concatenate(rows), ambient, p)


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int) -> np.ndarray:
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)


def random_subspace(rng: np.random.Generator, ambient: int, p: int,
                    dim: int | None = None) -> Subspace:
    if dim is None:
        dim = int(rng.integers(0, ambient + 1))
    if dim == 0 or ambient == 0:
        return Subspace.zero(ambient, p)
    return Subspace.span(random_matrix(rng, dim, ambient, p), ambient, p)


def random_invertible(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    while True:
        m = random_matrix(rng, n, n, p)
        if rank(m, p) == n:
            return m


def inverse(m, p: int) -> np.ndarray:
    m = as_matrix(m, p)
    n = m.shape[0]
    if n == 0:
        return m.copy()
    aug = np.concatenate([m, np.eye(n, dtype=np.int64)], axis=1)
    r, red, piv = rref(aug, p)
    if r < n or piv[n - 1] != n - 1:
        raise ValueError("matrix is singular")
    return red[:, n:]
