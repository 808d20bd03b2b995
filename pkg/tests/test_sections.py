import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from corrmod import correspondence as cr
from corrmod.cmodule import (Bar, BarType, GridCModule, GridLine, direct_sum, interval_module,
                             zero_module)
from corrmod.errors import GluingFailure, NotSubinterval, OverlapMismatch, RangeError
from corrmod.exactfield import FieldSpec, rank
from corrmod.random_models import random_module
from corrmod.sections import glue, is_section, offsets, restriction, section_space

from brute import members


def brute_sections(m, a, b):
    blocks = [list(itertools.product(range(m.p), repeat=m.dims[q])) for q in range(a, b + 1)]
    out = set()
    for tup in itertools.product(*blocks):
        if all(m.corrs[q].contains(tup[q - a], tup[q - a + 1]) for q in range(a, b)):
            out.add(tuple(x for part in tup for x in part))
    return out


def full_relation_module(n, p=2):
    g = GridLine(tuple(range(n)))
    return GridCModule(FieldSpec(p), g, (1,) * g.npos, tuple(cr.full(1, 1, p) for _ in range(g.npos - 1)))


@given(st.integers(0, 10**6))
def test_section_space_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    m = random_module(rng, 2, 2, 2)
    a = int(rng.integers(0, m.grid.npos))
    b = int(rng.integers(a, min(a + 3, m.grid.npos)))
    assert members(section_space(m, a, b).space) == brute_sections(m, a, b)


def test_singleton_module_sections():
    g = GridLine((0,))
    m = interval_module(g, Bar(1, 1, BarType.CLOSED), 2)
    assert section_space(m, 1, 1).dim == 1
    assert section_space(m, 0, 0).dim == 0
    assert section_space(m, 0, 2).dim == 0


def test_full_relation_module_sections():
    m = full_relation_module(2)
    for a in range(m.grid.npos):
        for b in range(a, m.grid.npos):
            assert section_space(m, a, b).dim == b - a + 1
    mat, tgt = restriction(section_space(m, 0, 2), 1, 1)
    assert tgt.dim == 1 and rank(mat, 2) == 1


def test_closed_bar_sections():
    g = GridLine((0, 1))
    m = interval_module(g, Bar(1, 3, BarType.CLOSED), 2)
    for a in range(g.npos):
        for b in range(a, g.npos):
            inside = 1 <= a and b <= 3
            # sections over intervals leaving the support vanish there and are then 0
            assert section_space(m, a, b).dim == (1 if inside else 0)


def test_restriction_functorial_and_errors():
    rng = np.random.default_rng(3)
    m = random_module(rng, 3, 2, 3)
    s = section_space(m, 1, 5)
    r1, t1 = restriction(s, 2, 4)
    r2, t2 = restriction(t1, 3, 3)
    r3, _ = restriction(s, 3, 3)
    assert np.array_equal((r2 @ r1) % 3, r3)
    ident, _ = restriction(s, 1, 5)
    assert np.array_equal(ident, np.eye(s.dim, dtype=np.int64))
    with pytest.raises(NotSubinterval):
        restriction(s, 0, 2)
    with pytest.raises(RangeError):
        section_space(m, 3, 99)


def test_disconnected_cover_gluing_failure():
    g = GridLine((-1, 0, 1))
    m = direct_sum([interval_module(g, Bar(1, 2, BarType.CLOSED), 2),
                    interval_module(g, Bar(3, 5, BarType.CLOSED), 2)])
    s1 = ((1, 2), [1, 1])
    s2 = ((3, 5), [1, 1, 1])
    with pytest.raises(GluingFailure):
        glue(m, [s1, s2])


def test_connected_cover_of_closed_bar_glues():
    g = GridLine((0, 1))
    m = interval_module(g, Bar(1, 3, BarType.CLOSED), 2)
    lo, hi, v = glue(m, [((1, 2), [1, 1]), ((2, 3), [1, 1])])
    assert (lo, hi) == (1, 3) and v.tolist() == [1, 1, 1]


def test_overlap_mismatch():
    m = full_relation_module(1)
    with pytest.raises(OverlapMismatch):
        glue(m, [((0, 1), [1, 0]), ((1, 2), [1, 1])])


def _random_connected_cover(rng, a, b):
    cuts = sorted(set(int(x) for x in rng.integers(a, b + 1, size=3)) | {a, b})
    pieces = []
    for lo, hi in zip(cuts, cuts[1:] + [b]):
        pieces.append((max(a, lo - int(rng.integers(0, 2))), hi))
    if not pieces:
        pieces = [(a, b)]
    return pieces


def test_connective_gluing_random_covers():
    rng = np.random.default_rng(11)
    done = 0
    while done < 100:
        m = random_module(rng, 3, 2, 2)
        a = int(rng.integers(0, m.grid.npos - 1))
        b = int(rng.integers(a + 1, m.grid.npos))
        sp = section_space(m, a, b).space
        if sp.dim == 0:
            continue
        vec = (rng.integers(0, 2, size=sp.dim) @ sp.basis) % 2
        off = offsets(m, a, b)
        pieces = []
        for lo, hi in _random_connected_cover(rng, a, b):
            pieces.append(((lo, hi), vec[off[lo - a]:off[hi - a + 1]]))
        lo, hi, glued = glue(m, pieces)
        assert (lo, hi) == (a, b) and np.array_equal(glued, vec)
        done += 1


@given(st.integers(0, 10**6))
def test_locality(seed):
    rng = np.random.default_rng(seed)
    m = random_module(rng, 2, 2, 2)
    a, b = 0, m.grid.last
    sp = section_space(m, a, b).space
    off = offsets(m, a, b)
    cover = _random_connected_cover(rng, a, b)
    for row in sp.basis:
        parts_zero = all(not np.any(row[off[lo - a]:off[hi - a + 1]]) for lo, hi in cover)
        assert parts_zero == (not np.any(row))


@given(st.integers(0, 10**6))
def test_section_dims_additive(seed):
    rng = np.random.default_rng(seed)
    x, y = random_module(rng, 2, 2, 3), random_module(rng, 2, 2, 3)
    s = direct_sum([x, y])
    for a in range(s.grid.npos):
        for b in range(a, s.grid.npos):
            assert section_space(s, a, b).dim == section_space(x, a, b).dim + section_space(y, a, b).dim


def test_zero_module_sections():
    m = zero_module(GridLine((0, 1)), 2)
    assert section_space(m, 0, m.grid.last).dim == 0
    assert is_section(m, 0, 0, [])
