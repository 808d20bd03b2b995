"""Brute-force enumeration helpers shared by the tests."""
import itertools

import numpy as np

from corrmod.exactfield import Subspace


def all_vectors(n, p):
    return [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=n)]


def members(s: Subspace):
    """Brute-force enumeration of the subspace as a set of tuples."""
    out = set()
    for coeffs in itertools.product(range(s.p), repeat=s.dim):
        v = np.zeros(s.ambient, dtype=np.int64)
        for c, row in zip(coeffs, s.basis):
            v = (v + c * row) % s.p
        out.add(tuple(int(x) for x in v))
    return out


def span_brute(rows, n, p):
    out = {tuple([0] * n)}
    for row in rows:
        out = {tuple((np.array(v) + c * row) % p) for v in out for c in range(p)}
    return {tuple(int(x) for x in v) for v in out}
