"""Command line entry point: ``sheaflab eval|suite|lattice|refine|show-model``."""
from __future__ import annotations

import argparse
import json
import sys

from . import baire, lang
from . import muchnik as mu
from .modelio import ModelFileError, describe, load_model
from .semantics import Caps, EvalError, eval_formula
from .sheaf import CapExceeded, SheafError
from .suites import SUITES, run_suite

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2

USER_ERRORS = (
    ModelFileError,
    lang.ParseError,
    lang.SortError,
    EvalError,
    SheafError,
    CapExceeded,
    mu.MuchnikError,
    baire.BoundError,
    OSError,
    ValueError,
)


def _load(args):
    m = load_model(args.model)
    if getattr(args, "cap", None):
        m.caps.quantifier = args.cap
    return m


def _emit(args, payload: dict, lines: list):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(lines))


def cmd_eval(args) -> int:
    m = _load(args)
    value = eval_formula(m, args.formula, debug=args.debug)
    points = m.base.sort_points(value)
    valid = value == m.base.top
    payload = {"formula": args.formula, "truth_value": points, "valid": valid}
    lines = [
        f"formula: {args.formula}",
        f"truth value: {{{', '.join(map(str, points))}}}",
        f"valid: {'yes' if valid else 'no'}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK if valid else EXIT_REFUTED


def _format_record(r) -> str:
    tv = "{" + ", ".join(map(str, r.truth_value)) + "}"
    extra = f"  # {r.detail}" if r.detail and r.verdict not in ("pass",) else ""
    where = f"[{r.model}] " if r.model else ""
    return f"{r.verdict:<6} {where}{r.instance}  {tv}{extra}"


def cmd_suite(args) -> int:
    if args.model is None and not args.generate:
        raise ValueError("suite needs --model FILE or --generate")
    model = _load(args) if args.model else None
    caps = None
    if model is None and args.cap:
        caps = Caps(quantifier=args.cap)
    rep = run_suite(args.suite, model, seed=args.seed, caps=caps, count=args.count)
    if args.json:
        print(json.dumps({"header": rep.header, "summary": rep.counts()}, sort_keys=True))
        for r in rep.records:
            print(json.dumps(r.as_dict(), sort_keys=True))
    else:
        h = rep.header
        caps_text = ", ".join(f"{k}={v}" for k, v in h["caps"].items())
        print(f"suite {h['suite']}  seed={h['seed']}  source={h['source']}  caps: {caps_text}")
        for r in rep.records:
            if args.verbose or r.verdict not in ("pass",):
                print(_format_record(r))
        summary = ", ".join(f"{k}={v}" for k, v in rep.counts().items())
        print(f"summary: {summary}")
    return EXIT_OK if rep.ok else EXIT_ERROR


def _weak_degree(ds, text: str) -> mu.WeakDegree:
    """``top``, ``bottom``, or a mass problem such as ``{f1,f2}`` / ``f1,f2``."""
    t = text.strip()
    if t == "top":
        return mu.top(ds)
    if t == "bottom":
        return mu.bottom(ds)
    body = t.strip("{}").strip()
    members = [x.strip() for x in body.split(",") if x.strip()] if body else []
    return mu.wdeg(ds, members)


def cmd_lattice(args) -> int:
    m = _load(args)
    ds = m.degrees
    if ds is None:
        raise ModelFileError("model has no degree structure")
    a = _weak_degree(ds, args.a)
    b = None
    if args.op != "neg":
        if args.b is None:
            raise ValueError(f"{args.op} needs two arguments")
        b = _weak_degree(ds, args.b)
    out = mu.wdeg_lattice(ds, args.op, a, b)
    pts = ds.degrees.sort_points(out.upset)
    _emit(args, {"op": args.op, "upset": pts},
          [f"{args.op}: up-set {{{', '.join(map(str, pts))}}}"])
    return EXIT_OK


def cmd_refine(args) -> int:
    cones = [baire.parse_cone(t) for t in args.prefixes]
    out = baire.refine_disjoint(cones, args.branching, args.depth)
    texts = [str(c) for c in out]
    _emit(args, {"cones": [list(c.prefix) for c in out]}, texts or ["(no cones)"])
    return EXIT_OK


def cmd_show_model(args) -> int:
    m = _load(args)
    if args.json:
        payload = {
            "base": [str(p) for p in m.base],
            "sorts": {n: {str(p): len(sh.stalks[p]) for p in m.base} for n, sh in m.mu.items()},
            "constants": {
                n: {"sort": lang.show_sort(s), "extent": m.base.sort_points(sec.extent)}
                for n, (s, sec) in m.constants.items()
            },
            "caps": m.caps.as_dict(),
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        print(describe(m))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sheaflab", description="Finite sheaf models of higher-order logic.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model_required=True):
        p.add_argument("--model", required=model_required, help="JSON model file")
        p.add_argument("--json", action="store_true", help="machine readable output")
        p.add_argument("--cap", type=int, default=None, help="quantifier enumeration cap")

    p = sub.add_parser("eval", help="truth value of a sentence")
    common(p)
    p.add_argument("--formula", required=True)
    p.add_argument("--debug", action="store_true", help="also compute the literal clauses and compare")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("suite", help="run a named battery")
    p.add_argument("suite", choices=sorted(SUITES))
    common(p, model_required=False)
    p.add_argument("--generate", action="store_true", help="use seeded random models")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=None, help="number of generated inputs")
    p.add_argument("--verbose", "-v", action="store_true", help="list passing instances too")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("lattice", help="Muchnik lattice operation")
    common(p)
    p.add_argument("op", choices=["sup", "inf", "imp", "neg"])
    p.add_argument("a", help="mass problem like '{f1,f2}', or top / bottom")
    p.add_argument("b", nargs="?")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("refine", help="disjoint refinement of prefix cones")
    p.add_argument("prefixes", nargs="*", help="prefixes like '(0,1)'")
    p.add_argument("--branching", "-b", type=int, default=2)
    p.add_argument("--depth", "-D", type=int, default=4)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("show-model", help="summarise a model file")
    common(p)
    p.set_defaults(func=cmd_show_model)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except lang.ParseError as exc:
        print(f"error: parse error at {exc}", file=sys.stderr)
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
