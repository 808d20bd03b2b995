"""Undecorated diagrams, matchings, bottleneck distance and an interleaving oracle."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from .cmodule import INF, BarType, Decorated, GridCModule, format_value, parse_value
from .decompose import DecoratedDiagram, multiplicities
from .errors import BadBar, Infeasible, Misaligned, TooLarge, ValidationError
from .exactfield import solve

# deletion cost factor per class; None means deletion is forbidden
DELETION_FACTOR = {BarType.CLOSED: 2, BarType.COOPEN: 1, BarType.CONTRAOPEN: 1, BarType.OPEN: None}


@dataclass
class UndecoratedDiagram:
    points: dict = field(default_factory=lambda: {t: Counter() for t in BarType})

    def __post_init__(self):
        for t in BarType:
            self.points.setdefault(t, Counter())

    def add(self, t: BarType, s, e, mult: int = 1):
        self.points[t][(s, e)] += mult

    def expanded(self, t: BarType) -> list:
        out = []
        for pt, c in sorted(self.points[t].items(), key=lambda kv: _sort_key(kv[0])):
            out.extend([pt] * c)
        return out

    def __eq__(self, other):
        if not isinstance(other, UndecoratedDiagram):
            return NotImplemented
        return all(+self.points[t] == +other.points[t] for t in BarType)

    def to_json(self):
        out = []
        for t in BarType:
            for (s, e), c in sorted(self.points[t].items(), key=lambda kv: _sort_key(kv[0])):
                if c:
                    out.append({"type": t.value, "birth": {"value": format_value(s)},
                                "death": {"value": format_value(e)}, "mult": c})
        return out

    @staticmethod
    def from_json(data) -> "UndecoratedDiagram":
        d = UndecoratedDiagram()
        for item in data:
            t = BarType.parse(item["type"])
            s = _ext_value(item["birth"])
            e = _ext_value(item["death"])
            _check_bar(t, s, e)
            d.add(t, s, e, int(item.get("mult", 1)))
        return d


def _check_bar(t: BarType, s, e):
    if s == INF or e == -INF or s > e:
        raise BadBar(f"bar {t.value} {format_value(s)} .. {format_value(e)} has bad endpoints")
    if (s == -INF and t.left_closed) or (e == INF and t.right_closed):
        raise BadBar(f"bar type {t.value} cannot have a closed infinite end")


def _ext_value(x):
    v = x["value"] if isinstance(x, dict) else x
    if v in ("inf", "+inf"):
        return INF
    if v == "-inf":
        return -INF
    return parse_value(v)


def _sort_key(pt):
    return tuple((-1, 0) if v == -INF else (1, 0) if v == INF else (0, v) for v in pt)


def undecorate(d: DecoratedDiagram) -> UndecoratedDiagram:
    out = UndecoratedDiagram()
    for t, s, e, c in d.decorated_bars():
        sv, ev = s.value, e.value
        if sv == ev and t is not BarType.OPEN:
            # off-diagonal domain for the three bounded-deletion classes
            continue
        out.add(t, sv, ev, c)
    return out


def _absdiff(a, b):
    if a == b:
        return Fraction(0)  # includes |inf - inf| = 0
    if a in (INF, -INF) or b in (INF, -INF):
        return INF
    return abs(Fraction(a) - Fraction(b))


def d_inf(a, b):
    return max(_absdiff(a[0], b[0]), _absdiff(a[1], b[1]))


def d_diag(a):
    s, t = a
    if s in (INF, -INF) or t in (INF, -INF):
        return INF
    return abs(Fraction(t) - Fraction(s)) / 2


@dataclass
class MatchingCertificate:
    epsilon: object
    matched: dict = field(default_factory=dict)   # type -> list of (i, j)
    deleted: dict = field(default_factory=dict)   # type -> (list of i in d1, list of j in d2)

    def to_json(self):
        return {"epsilon": format_value(self.epsilon),
                "classes": {t.value: {"matched": self.matched.get(t, []),
                                      "deleted_first": self.deleted.get(t, ([], []))[0],
                                      "deleted_second": self.deleted.get(t, ([], []))[1]}
                            for t in BarType}}


def _match_class(A, B, eps, L):
    """Perfect matching with optional diagonal deletion; returns (pairs, delA, delB) or None."""
    if L is None and len(A) != len(B):
        return None
    g = nx.Graph()
    left = [("a", i) for i in range(len(A))]
    right = [("b", j) for j in range(len(B))]
    if L is not None:
        left += [("db", j) for j in range(len(B))]
        right += [("da", i) for i in range(len(A))]
    g.add_nodes_from(left, bipartite=0)
    g.add_nodes_from(right, bipartite=1)
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            if d_inf(a, b) <= eps:
                g.add_edge(("a", i), ("b", j))
    if L is not None:
        for i, a in enumerate(A):
            if d_diag(a) <= L * eps:
                g.add_edge(("a", i), ("da", i))
        for j, b in enumerate(B):
            if d_diag(b) <= L * eps:
                g.add_edge(("db", j), ("b", j))
        for j in range(len(B)):
            for i in range(len(A)):
                g.add_edge(("db", j), ("da", i))
    if not left:
        return [], [], []
    m = nx.algorithms.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    if sum(1 for u in left if u in m) != len(left):
        return None
    pairs, delA, delB = [], [], []
    for i in range(len(A)):
        partner = m[("a", i)]
        if partner[0] == "b":
            pairs.append((i, partner[1]))
        else:
            delA.append(i)
    for j in range(len(B)):
        if m[("b", j)][0] == "db":
            delB.append(j)
    return pairs, delA, delB


def matching_exists(d1: UndecoratedDiagram, d2: UndecoratedDiagram, eps) -> MatchingCertificate:
    """Certificate of an epsilon-matching, or raise Infeasible."""
    eps = eps if eps == INF else Fraction(eps)
    if eps < 0:
        raise ValidationError("eps must be non-negative")
    cert = MatchingCertificate(eps)
    for t in BarType:
        res = _match_class(d1.expanded(t), d2.expanded(t), eps, DELETION_FACTOR[t])
        if res is None:
            raise Infeasible(f"no {format_value(eps)}-matching in class {t.value}")
        cert.matched[t] = res[0]
        cert.deleted[t] = (res[1], res[2])
    return cert


def is_matched(d1, d2, eps) -> bool:
    try:
        matching_exists(d1, d2, eps)
        return True
    except Infeasible:
        return False


def bottleneck(d1: UndecoratedDiagram, d2: UndecoratedDiagram):
    cands = {Fraction(0)}
    for t in BarType:
        A, B = d1.expanded(t), d2.expanded(t)
        L = DELETION_FACTOR[t]
        for a in A:
            for b in B:
                cands.add(d_inf(a, b))
        if L is not None:
            for a in A + B:
                cands.add(d_diag(a) / L if d_diag(a) != INF else INF)
    finite = sorted(c for c in cands if c != INF)
    lo, hi = 0, len(finite) - 1
    if not is_matched(d1, d2, finite[-1]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if is_matched(d1, d2, finite[mid]):
            hi = mid
        else:
            lo = mid + 1
    return finite[lo]


# -- interleaving oracle ----------------------------------------------------

_BIG = 10**12
_SCALE = 8  # values on the (1/8)-lattice; keys are 2*8*value + decoration bit


def _key(d: Decorated) -> int:
    if d.value == -INF:
        return -_BIG
    if d.value == INF:
        return _BIG
    v = Fraction(d.value) * 2 * _SCALE
    if v.denominator != 1:
        raise Misaligned("endpoint is not on the eighth lattice")
    return int(v) + (1 if d.sign > 0 else 0)


def _shift(keys: np.ndarray, e: int) -> np.ndarray:
    out = keys + e
    out[keys <= -_BIG] = -_BIG
    out[keys >= _BIG] = _BIG
    return out


def _member(t: BarType, p: int, q: int, x: np.ndarray, y: np.ndarray, nonempty: np.ndarray):
    meets = np.maximum(x, p) < np.minimum(y, q)
    if t is BarType.CLOSED:
        m = (p <= x) & (y <= q)
    elif t is BarType.COOPEN:
        m = (p <= x) & meets
    elif t is BarType.CONTRAOPEN:
        m = (y <= q) & meets
    else:
        m = meets
    return m & nonempty


def _bars_of(m: GridCModule):
    out = []
    for t, s, e, c in multiplicities(m).decorated_bars():
        out.extend([(t, _key(s), _key(e))] * c)
    return out


class _Lattice:
    """All decorated intervals (x, y) with endpoints on a fine lattice window."""

    def __init__(self, lo: Fraction, hi: Fraction):
        vals = []
        v = lo
        step = Fraction(1, _SCALE)
        while v <= hi:
            k = int(v * 2 * _SCALE)
            vals.extend([k, k + 1])
            v += step
        keys = np.array([-_BIG] + vals + [_BIG], dtype=np.int64)
        self.x, self.y = np.meshgrid(keys, keys, indexing="ij")
        self.valid = self.x < self.y
        self.valid &= self.x < _BIG
        self.valid &= self.y > -_BIG

    def eroded(self, e: int):
        x = _shift(self.x, e)
        y = _shift(self.y, -e)
        return x, y, self.valid & (x < y)


def _dominated_any(mask: np.ndarray) -> np.ndarray:
    """D[i, j] = any mask[i', j'] with i' <= i and j' >= j (a superset exists)."""
    d = np.logical_or.accumulate(mask, axis=0)
    return np.logical_or.accumulate(d[:, ::-1], axis=1)[:, ::-1]


def _hom_allowed(lat: _Lattice, Si: np.ndarray, SjE: np.ndarray) -> bool:
    """Is the unit family an eps-homomorphism between two interval sheaves?"""
    act = Si & SjE
    if not act.any():
        return False
    # a: I not in S_i, I^- in S_j, some J ⊇ I active
    bad_a = (~Si) & SjE & lat.valid & _dominated_any(act)
    # b: I active, some J ⊇ I with J in S_i but J^- not in S_j
    bad_b = act & _dominated_any(Si & ~SjE)
    return not (bad_a.any() or bad_b.any())


def interleaving_feasible(m1: GridCModule, m2: GridCModule, eps, max_bars: int = 3,
                          max_search: int = 1 << 16) -> bool:
    """Brute-force decision of an eps-interleaving between two decomposable modules."""
    eps = Fraction(eps)
    if eps < 0 or (2 * eps).denominator != 1:
        raise Misaligned(f"eps={format_value(eps)} is not a multiple of 1/2")
    for m in (m1, m2):
        if any(Fraction(v).denominator != 1 for v in m.grid.values):
            raise Misaligned("grid values must be integers")
    if m1.p != m2.p:
        raise ValidationError("modules over different fields")
    p = m1.p
    F, G = _bars_of(m1), _bars_of(m2)
    if len(F) > max_bars or len(G) > max_bars:
        raise TooLarge(f"more than {max_bars} bars")
    vals = [Fraction(v) for v in m1.grid.values + m2.grid.values]
    lat = _Lattice(min(vals) - 2 * eps - 1, max(vals) + 2 * eps + 1)
    e = int(eps * 2 * _SCALE)
    x0, y0, ne0 = lat.x, lat.y, lat.valid
    x1, y1, ne1 = lat.eroded(e)
    x2, y2, ne2 = lat.eroded(2 * e)

    def fam(bars, x, y, ne):
        return [_member(t, a, b, x, y, ne) for t, a, b in bars]

    F0, F1, F2 = fam(F, x0, y0, ne0), fam(F, x1, y1, ne1), fam(F, x2, y2, ne2)
    G0, G1, G2 = fam(G, x0, y0, ne0), fam(G, x1, y1, ne1), fam(G, x2, y2, ne2)
    # allowed components: phi[j][i] for F_i -> G_j, psi[i][j] for G_j -> F_i
    phi_ok = [(j, i) for j in range(len(G)) for i in range(len(F)) if _hom_allowed(lat, F0[i], G1[j])]
    psi_ok = [(i, j) for i in range(len(F)) for j in range(len(G)) if _hom_allowed(lat, G0[j], F1[i])]
    # unique patterns for each composite identity
    eq_f = []  # (i, i2, pattern over j)
    for i in range(len(F)):
        for i2 in range(len(F)):
            sel = F0[i] & F2[i2]
            if not sel.any():
                continue
            pats = np.stack([G1[j][sel] for j in range(len(G))], axis=1) if G else np.zeros((int(sel.sum()), 0), bool)
            for pat in np.unique(pats, axis=0):
                eq_f.append((i, i2, tuple(bool(v) for v in pat)))
    eq_g = []
    for j in range(len(G)):
        for j2 in range(len(G)):
            sel = G0[j] & G2[j2]
            if not sel.any():
                continue
            pats = np.stack([F1[i][sel] for i in range(len(F))], axis=1) if F else np.zeros((int(sel.sum()), 0), bool)
            for pat in np.unique(pats, axis=0):
                eq_g.append((j, j2, tuple(bool(v) for v in pat)))
    if p ** len(phi_ok) > max_search:
        raise TooLarge("interleaving search space exceeds bound")
    psi_index = {k: n for n, k in enumerate(psi_ok)}
    for values in itertools.product(range(p), repeat=len(phi_ok)):
        phi = dict(zip(phi_ok, values))
        rows, rhs = [], []
        for i, i2, pat in eq_f:
            row = [0] * len(psi_ok)
            for j, hit in enumerate(pat):
                c = phi.get((j, i), 0)
                if hit and c and (i2, j) in psi_index:
                    row[psi_index[(i2, j)]] = (row[psi_index[(i2, j)]] + c) % p
            rows.append(row)
            rhs.append(1 if i == i2 else 0)
        for j, j2, pat in eq_g:
            row = [0] * len(psi_ok)
            for i, hit in enumerate(pat):
                c = phi.get((j2, i), 0)
                if hit and c and (i, j) in psi_index:
                    row[psi_index[(i, j)]] = (row[psi_index[(i, j)]] + c) % p
            rows.append(row)
            rhs.append(1 if j == j2 else 0)
        if not rows:
            return True
        if not psi_ok:
            if all(r == 0 for r in rhs):
                return True
            continue
        if solve(np.array(rows, dtype=np.int64), np.array(rhs, dtype=np.int64), p) is not None:
            return True
    return False
