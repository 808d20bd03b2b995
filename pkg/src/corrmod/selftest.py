"""Seeded consistency checks run by `corrmod selftest`."""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

import numpy as np

from . import correspondence as cr
from .cmodule import BarType
from .decompose import decompose_via_unfolding, multiplicities, reconstruct
from .levelset import PLComplex, levelset_cmodule, mayer_vietoris
from .random_models import random_module
from .slice2d import LineSpec, random_module_2d, staircase_correspondence


def load_fixture(name: str):
    return json.loads(resources.files("corrmod").joinpath("fixtures", name).read_text())


def _oracle(rng) -> bool:
    for k in range(40):
        m = random_module(rng, int(rng.integers(1, 5)), 3, (2, 5)[k % 2])
        d = multiplicities(m)
        if d != decompose_via_unfolding(m) or multiplicities(reconstruct(d, m.p)) != d:
            return False
    return True


def _levelset() -> bool:
    c = PLComplex.from_json(load_fixture("fig4.json"))
    d = multiplicities(levelset_cmodule(c, 0))
    return d.total() == 4 and {b.bar_type for b, _ in d.bars()} == set(BarType)


def _mv() -> bool:
    rep = mayer_vietoris(PLComplex.from_json(load_fixture("circle.json")))
    bars = rep.diagram.bars()
    return rep.exact and len(bars) == 1 and bars[0][0].bar_type is BarType.OPEN


def _slice(rng) -> bool:
    for _ in range(20):
        m = random_module_2d(rng)
        line = LineSpec(-Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 4))),
                        Fraction(int(rng.integers(0, 12)), 2))
        r, s, t = sorted(Fraction(int(v), 4) for v in rng.integers(-4, 20, size=3))
        whole = staircase_correspondence(m, line, r, t)
        split = cr.compose(staircase_correspondence(m, line, r, s),
                           staircase_correspondence(m, line, s, t))
        if whole.space != split.space:
            return False
    return True


def run_selftest(seed: int = 0, out=None) -> bool:
    rng = np.random.default_rng(seed)
    checks = [("decomposition oracle and reconstruction", lambda: _oracle(rng)),
              ("level-set fixture has all four bar types", _levelset),
              ("circle Mayer-Vietoris cokernel", _mv),
              ("slice functoriality", lambda: _slice(rng))]
    ok = True
    for name, fn in checks:
        res = fn()
        ok &= res
        if out is not None:
            print(f"{'PASS' if res else 'FAIL'} {name}", file=out)
    return ok
