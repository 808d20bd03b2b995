"""Command-line front end.

Inputs and outputs are JSON with exact decimal or rational strings.

  module (decompose --in):
      {"field": p, "grid": ["t1", ...], "dims": [d0, ..., d2n],
       "corrs": [[row, ...], ...]}   rows of corrs[q] span a subspace of k^dq x k^dq+1
  diagram (bottleneck --a/--b):
      {"bars": [{"type": "[]"|"[>"|"<]"|"<>", "birth": {"value": "1"}, "death": {...},
                 "mult": 1}, ...]}   a bare list of bars is accepted too
  complex (levelset, sublevel, superlevel, mv --complex):
      {"field": p, "vertices": [{"id": 0, "value": "-2"}, ...], "simplices": [[0, 1], ...]}
  2-D module (slice --module2d):
      {"field": p, "xs": [...], "ys": [...], "dims": [[...]], "hmaps": [[matrix]...],
       "vmaps": [[matrix]...]}   hmaps[i][j]: U(i,j) -> U(i+1,j), vmaps[i][j]: U(i,j) -> U(i,j+1)
  line (slice --line): "slope,intercept" with negative slope, e.g. "-1,9/2"

Exit codes: 0 success, 2 invalid input, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .cmodule import INF, BarType, GridCModule, format_value
from .decompose import DecoratedDiagram, decompose_via_unfolding, multiplicities
from .diagram import UndecoratedDiagram, bottleneck, matching_exists, undecorate
from .errors import DecompositionMismatch, InvariantViolation, ValidationError
from .exactfield import FieldSpec
from .levelset import (PLComplex, levelset_cmodule, mayer_vietoris, sublevel_cmodule,
                       superlevel_cmodule)
from .slice2d import GridModule2D, LineSpec, slice_module

GLYPHS = {BarType.CLOSED: ("|", "|"), BarType.COOPEN: ("|", ">"),
          BarType.CONTRAOPEN: ("<", "|"), BarType.OPEN: ("<", ">")}


def glyph(t: BarType) -> str:
    a, b = GLYPHS[t]
    return f"{a}-{b}"


# -- io ---------------------------------------------------------------------

def _load(path: str, field: int | None = None):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed JSON in {path}: line {e.lineno} col {e.colno}") from None
    if field is not None:
        FieldSpec(field)
        if isinstance(data, dict):
            data["field"] = field
    return data


def _emit(obj, args, text: str | None = None):
    dumped = json.dumps(obj, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumped + "\n")
    print(text if text is not None else dumped)


# -- ascii ----------------------------------------------------------------

def render_ascii(d: DecoratedDiagram, width: int = 48) -> str:
    vals = d.grid.values
    lo, hi = vals[0] - 1, vals[-1] + 1
    span = hi - lo

    def col(v) -> int:
        if v == -INF:
            return 0
        if v == INF:
            return width
        return int(round((Fraction(v) - lo) / span * width))

    lines = []
    for t, s, e, c in d.decorated_bars():
        a, b = col(s.value), col(e.value)
        left, right = GLYPHS[t]
        body = "-" * max(b - a - 1, 1)
        bar = " " * a + left + body + right
        label = f"{t.value} {s} .. {e}" + (f"  x{c}" if c > 1 else "")
        lines.append(f"{bar:<{width + 3}} {label}")
    if not lines:
        lines.append("(empty diagram)")
    return "\n".join(lines)


def render_ascii_undecorated(d: UndecoratedDiagram) -> str:
    lines = []
    for t in BarType:
        for (s, e), c in sorted(d.points[t].items(), key=lambda kv: str(kv[0])):
            if c:
                lines.append(f"{glyph(t)} {format_value(s)} .. {format_value(e)}"
                             + (f"  x{c}" if c > 1 else ""))
    return "\n".join(lines) if lines else "(empty diagram)"


def _diagram_output(d: DecoratedDiagram, args, extra: dict | None = None):
    if args.undecorated:
        u = undecorate(d)
        obj = {"grid": d.grid.to_json(), "bars": u.to_json()}
        text = render_ascii_undecorated(u) if args.ascii else None
    else:
        obj = {"grid": d.grid.to_json(), "bars": d.to_json()}
        text = render_ascii(d) if args.ascii else None
    if extra:
        obj.update(extra)
    _emit(obj, args, text)


def _decompose_checked(m: GridCModule, verify: bool) -> DecoratedDiagram:
    d = multiplicities(m)
    if verify and decompose_via_unfolding(m) != d:
        raise DecompositionMismatch("section-space and zigzag decompositions disagree")
    return d


def _parse_diagram(data) -> UndecoratedDiagram:
    bars = data.get("bars") if isinstance(data, dict) else data
    if not isinstance(bars, list):
        raise ValidationError("diagram json: expected a list of bars")
    try:
        return UndecoratedDiagram.from_json(bars)
    except (KeyError, TypeError, AttributeError) as e:
        raise ValidationError(f"diagram json: malformed bar ({e})") from None


# -- commands ---------------------------------------------------------------

def cmd_decompose(args):
    m = GridCModule.from_json(_load(args.inp, args.field))
    _diagram_output(_decompose_checked(m, args.verify), args)


def cmd_bottleneck(args):
    a = _parse_diagram(_load(args.a))
    b = _parse_diagram(_load(args.b))
    d = bottleneck(a, b)
    obj = {"distance": format_value(d)}
    if d != INF:
        obj["certificate"] = matching_exists(a, b, d).to_json()
    _emit(obj, args, format_value(d))


def _complex_cmd(builder):
    def run(args):
        c = PLComplex.from_json(_load(args.complex, args.field))
        m = builder(c, args.degree)
        _diagram_output(_decompose_checked(m, args.verify), args)
    return run


def cmd_mv(args):
    c = PLComplex.from_json(_load(args.complex, args.field))
    rep = mayer_vietoris(c, 1, strict=True)
    obj = rep.to_json()
    text = None
    if args.ascii:
        text = "exact at every position\n" + render_ascii(rep.diagram)
    _emit(obj, args, text)


def cmd_slice(args):
    m = GridModule2D.from_json(_load(args.module2d, args.field))
    line = LineSpec.parse(args.line)
    s = slice_module(m, line)
    _diagram_output(_decompose_checked(s, args.verify), args, {"line": line.to_json()})


def cmd_selftest(args):
    from .selftest import run_selftest
    ok = run_selftest(seed=args.seed, out=sys.stdout)
    if not ok:
        raise InvariantViolation("selftest failed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="corrmod", description="Correspondence-module persistence on finite grids.",
        epilog=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, diagram=True):
        p.add_argument("--out", help="also write the JSON result to this file")
        p.add_argument("--field", type=int, help="override the prime field of the input")
        if diagram:
            p.add_argument("--undecorated", action="store_true", help="drop endpoint decorations")
            p.add_argument("--ascii", action="store_true", help="print an ASCII barcode")
            p.add_argument("--no-verify", dest="verify", action="store_false",
                           help="skip the cross-check against the zigzag decomposition")

    p = sub.add_parser("decompose", help="decompose a grid c-module (module JSON)")
    p.add_argument("--in", dest="inp", required=True, metavar="FILE")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("bottleneck", help="bottleneck distance between two diagrams")
    p.add_argument("--a", required=True, metavar="FILE")
    p.add_argument("--b", required=True, metavar="FILE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bottleneck, field=None)

    for name, builder, what in (("levelset", levelset_cmodule, "level sets"),
                                ("sublevel", sublevel_cmodule, "sublevel sets"),
                                ("superlevel", superlevel_cmodule, "superlevel sets")):
        p = sub.add_parser(name, help=f"diagram of the homology of {what} of a PL function")
        p.add_argument("--complex", required=True, metavar="FILE")
        p.add_argument("--degree", type=int, choices=(0, 1), default=0)
        common(p)
        p.set_defaults(func=_complex_cmd(builder))

    p = sub.add_parser("mv", help="Mayer-Vietoris exactness report and coker(p1 - q1)")
    p.add_argument("--complex", required=True, metavar="FILE")
    p.add_argument("--ascii", action="store_true")
    common(p, diagram=False)
    p.set_defaults(func=cmd_mv)

    p = sub.add_parser("slice", help="slice a 2-D module along a negative-slope line")
    p.add_argument("--module2d", required=True, metavar="FILE")
    p.add_argument("--line", required=True, help='"slope,intercept", slope < 0')
    common(p)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("selftest", help="run seeded internal consistency checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return ap


def _join_line(argv):
    # a negative slope looks like a flag to argparse
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--line":
            out.append("--line=" + next(it, ""))
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_line(argv))
    try:
        args.func(args)
    except ValidationError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except InvariantViolation as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
