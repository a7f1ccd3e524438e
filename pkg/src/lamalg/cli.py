"""Batch command-line front end over the whole library.

Each subcommand is one pipeline: parse and echo, rewrite to normal form,
synthesize a type, decide the precision order, check subject reduction,
abstract away the weights, normalize in the additive fragment, translate a
typed term into the products calculus and optionally normalize the image,
verify either commuting square on one term, or run the fuzzing harness.

Terms and types arrive in the concrete grammar, either inline, from a file
named by the positional argument, or on standard input; typing contexts are
given as ``--ctx "x:U, y:V"``.  Output is line-oriented text, or one JSON
object with ``--json``.  Exit status: 0 on success, 1 when a property or
typing check fails, 2 on a parse error, 3 when fuel runs out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .additive import a_normalize, derive, lesssim, sigma
from .fsysp import (
    f_lessapprox,
    f_normalize,
    f_term_str,
    f_type_str,
    translate,
)
from .parser import ParseError, parse_context, parse_term, parse_type
from .propgen import GenConfig, render_figures, run_checks, write_report
from .rewrite import (
    BETA_FIRST,
    DEFAULT_FUEL,
    FACTOR_FIRST,
    ByGroup,
    Leftmost,
    RandomChoice,
    Rightmost,
    Strategy,
    normalize,
)
from .syntax import Context, summands, term_str, type_str, unit
from .typecheck import TypingError, precedes_witness, sr_check, synthesize

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_FUEL = 3

_STRATEGY_NAMES = ("leftmost", "rightmost", "beta-first", "factor-first", "random")


def _strategy(name: str, seed: int) -> Strategy:
    match name:
        case "leftmost":
            return Leftmost()
        case "rightmost":
            return Rightmost()
        case "beta-first":
            return ByGroup(BETA_FIRST)
        case "factor-first":
            return ByGroup(FACTOR_FIRST)
        case "random":
            return RandomChoice(seed)
    raise ValueError(name)


def _read_source(value: str | None) -> str:
    """Inline text, a file named by the argument, or standard input."""
    if value is None or value == "-":
        return sys.stdin.read()
    path = Path(value)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    return value


def _context(args: argparse.Namespace) -> Context:
    return parse_context(args.ctx) if args.ctx else {}


def _emit(args: argparse.Namespace, payload: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _path_str(path: tuple[int, ...]) -> str:
    return "(" + ", ".join(str(i) for i in path) + ")" if path else "()"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_parse(args: argparse.Namespace) -> int:
    t = parse_term(_read_source(args.term))
    _emit(args, {"command": "parse", "term": term_str(t)}, [term_str(t)])
    return EXIT_OK


def _cmd_normalize(args: argparse.Namespace) -> int:
    t = parse_term(_read_source(args.term))
    res = normalize(t, _strategy(args.strategy, args.seed), args.fuel)
    lines = []
    if args.trace:
        lines += [
            f"{s.rule.value} @ {_path_str(s.path)}: {term_str(s.term)}"
            for s in res.trace
        ]
    lines.append(term_str(res.term))
    if res.exhausted:
        lines.append(f"fuel exhausted after {len(res.trace)} steps")
    payload = {
        "command": "normalize",
        "strategy": args.strategy,
        "term": term_str(res.term),
        "steps": len(res.trace),
        "exhausted": res.exhausted,
    }
    if args.trace:
        payload["trace"] = [
            {"rule": s.rule.value, "path": list(s.path), "term": term_str(s.term)}
            for s in res.trace
        ]
    _emit(args, payload, lines)
    return EXIT_FUEL if res.exhausted else EXIT_OK


def _cmd_typecheck(args: argparse.Namespace) -> int:
    ctx = _context(args)
    t = parse_term(_read_source(args.term))
    try:
        ty = synthesize(ctx, t)
    except TypingError as err:
        _emit(
            args,
            {"command": "typecheck", "ok": False, "kind": err.kind, "error": str(err)},
            [f"type error ({err.kind}): {err}"],
        )
        return EXIT_FAIL
    _emit(
        args,
        {"command": "typecheck", "ok": True, "type": type_str(ty)},
        [type_str(ty)],
    )
    return EXIT_OK


def _cmd_precedes(args: argparse.Namespace) -> int:
    left = parse_type(args.left)
    right = parse_type(args.right)
    witness = precedes_witness(left, right)
    if witness is None:
        _emit(
            args,
            {"command": "precedes", "related": False},
            ["NotRelated"],
        )
        return EXIT_FAIL
    lu, ru = list(summands(left)), list(summands(right))
    lines = [
        f"{type_str(unit(lu[i]))} [{i}] <= {type_str(unit(ru[j]))} [{j}]"
        for i, j in witness
    ] or ["empty sum embeds trivially"]
    _emit(
        args,
        {"command": "precedes", "related": True, "witness": [list(p) for p in witness]},
        lines,
    )
    return EXIT_OK


def _cmd_sr_check(args: argparse.Namespace) -> int:
    ctx = _context(args)
    t = parse_term(_read_source(args.term))
    try:
        results = sr_check(ctx, t)
    except TypingError as err:
        _emit(
            args,
            {"command": "sr-check", "ok": False, "kind": err.kind, "error": str(err)},
            [f"type error ({err.kind}): {err}"],
        )
        return EXIT_FAIL
    lines = []
    records = []
    for res in results:
        after = type_str(res.type_after) if res.type_after is not None else "untypeable"
        mark = "ok" if res.ok else "FAIL"
        lines.append(
            f"{mark} {res.reduction.rule.value} @ {_path_str(res.reduction.path)}: "
            f"{type_str(res.type_before)} => {after}"
        )
        records.append(
            {
                "rule": res.reduction.rule.value,
                "path": list(res.reduction.path),
                "before": type_str(res.type_before),
                "after": after,
                "ok": res.ok,
            }
        )
    if not results:
        lines = ["normal form: no reducts"]
    ok = all(r.ok for r in results)
    _emit(args, {"command": "sr-check", "ok": ok, "reducts": records}, lines)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_abstract(args: argparse.Namespace) -> int:
    t = parse_term(_read_source(args.term))
    s = sigma(t)
    _emit(args, {"command": "abstract", "term": term_str(s)}, [term_str(s)])
    return EXIT_OK


def _cmd_a_normalize(args: argparse.Namespace) -> int:
    t = parse_term(_read_source(args.term))
    res = a_normalize(sigma(t), fuel=args.fuel)
    lines = [term_str(res.term)]
    if res.exhausted:
        lines.append(f"fuel exhausted after {len(res.trace)} steps")
    _emit(
        args,
        {
            "command": "a-normalize",
            "term": term_str(res.term),
            "steps": len(res.trace),
            "exhausted": res.exhausted,
        },
        lines,
    )
    return EXIT_FUEL if res.exhausted else EXIT_OK


def _translated(args: argparse.Namespace):
    ctx = _context(args)
    t = parse_term(_read_source(args.term))
    return translate(derive(ctx, sigma(t)), args.fuel)


def _cmd_translate(args: argparse.Namespace) -> int:
    try:
        tr = _translated(args)
    except TypingError as err:
        _emit(
            args,
            {"command": "translate", "ok": False, "kind": err.kind, "error": str(err)},
            [f"type error ({err.kind}): {err}"],
        )
        return EXIT_FAIL
    _emit(
        args,
        {
            "command": "translate",
            "ok": True,
            "term": f_term_str(tr.fterm),
            "shape": f_type_str(tr.shape),
        },
        [f_term_str(tr.fterm)],
    )
    return EXIT_OK


def _cmd_fp_normalize(args: argparse.Namespace) -> int:
    try:
        tr = _translated(args)
    except TypingError as err:
        _emit(
            args,
            {"command": "fp-normalize", "ok": False, "kind": err.kind, "error": str(err)},
            [f"type error ({err.kind}): {err}"],
        )
        return EXIT_FAIL
    res = f_normalize(tr.fterm, args.fuel)
    lines = [f_term_str(res.term)]
    if res.exhausted:
        lines.append(f"fuel exhausted after {res.steps} steps")
    _emit(
        args,
        {
            "command": "fp-normalize",
            "term": f_term_str(res.term),
            "steps": res.steps,
            "exhausted": res.exhausted,
        },
        lines,
    )
    return EXIT_FUEL if res.exhausted else EXIT_OK


def _cmd_square(args: argparse.Namespace) -> int:
    ctx = _context(args)
    t = parse_term(_read_source(args.term))
    nf = normalize(t, Leftmost(), args.fuel)
    if nf.exhausted:
        _emit(
            args,
            {"command": "square", "level": args.level, "exhausted": True},
            [f"fuel exhausted after {len(nf.trace)} steps"],
        )
        return EXIT_FUEL
    try:
        if args.level == "additive":
            left = term_str(sigma(t))
            right = term_str(sigma(nf.term))
            ok = lesssim(sigma(t), sigma(nf.term), args.fuel)
        else:
            before = translate(derive(ctx, sigma(t)), args.fuel)
            after = translate(derive(ctx, sigma(nf.term)), args.fuel)
            left = f_term_str(before.fterm)
            right = f_term_str(after.fterm)
            ok = f_lessapprox(before.fterm, after.fterm, args.fuel)
    except TypingError as err:
        _emit(
            args,
            {"command": "square", "ok": False, "kind": err.kind, "error": str(err)},
            [f"type error ({err.kind}): {err}"],
        )
        return EXIT_FAIL
    verdict = "square holds" if ok else "square fails"
    _emit(
        args,
        {
            "command": "square",
            "level": args.level,
            "ok": ok,
            "abstracted": left,
            "abstracted_normal": right,
        },
        [verdict],
    )
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_fuzz(args: argparse.Namespace) -> int:
    cfg = GenConfig(seed=args.seed, sample_count=args.samples, fuel=args.fuel)
    result = run_checks(cfg)
    summary = result.summary()
    lines = [
        f"{r.name}: {'ok' if r.ok else 'FAIL'} "
        f"({len(r.failures)} failures over {r.samples} samples)"
        for r in result.reports
    ]
    lines.append(
        f"rules covered: {summary['rules_covered']}/{summary['rules_total']}"
    )
    written: list[str] = []
    if args.report:
        written.append(str(write_report(result, args.report)))
    if args.figures is not None:
        outdir = args.figures
        if not outdir:
            outdir = str(Path(args.report).parent) if args.report else "."
        written += [str(p) for p in render_figures(result, outdir)]
    lines += [f"wrote {p}" for p in written]
    lines.append(f"fuzz: {'ok' if result.ok else 'FAIL'} in {result.seconds:.1f}s")
    summary["written"] = written
    _emit(args, summary, lines)
    return EXIT_OK if result.ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_term_arg(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "term",
        nargs="?",
        help="term source: inline text, a file path, or '-'/omitted for stdin",
    )


def _add_common(sub: argparse.ArgumentParser, ctx: bool = False) -> None:
    sub.add_argument("--json", action="store_true", help="emit one JSON object")
    if ctx:
        sub.add_argument("--ctx", default="", help='typing context, e.g. "x:U, y:V"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lamalg",
        description="Weighted-sum lambda calculus: rewriting, typing, "
        "abstraction, and the products translation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and echo the canonical form")
    _add_term_arg(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("normalize", help="rewrite to normal form")
    _add_term_arg(p)
    _add_common(p)
    p.add_argument("--strategy", choices=_STRATEGY_NAMES, default="leftmost")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--seed", type=int, default=0, help="seed for --strategy random")
    p.add_argument("--trace", action="store_true", help="print every step")
    p.set_defaults(fn=_cmd_normalize)

    p = sub.add_parser("typecheck", help="synthesize the type")
    _add_term_arg(p)
    _add_common(p, ctx=True)
    p.set_defaults(fn=_cmd_typecheck)

    p = sub.add_parser("precedes", help="decide the precision order on two types")
    p.add_argument("left")
    p.add_argument("right")
    _add_common(p)
    p.set_defaults(fn=_cmd_precedes)

    p = sub.add_parser("sr-check", help="check every one-step reduct's type")
    _add_term_arg(p)
    _add_common(p, ctx=True)
    p.set_defaults(fn=_cmd_sr_check)

    p = sub.add_parser("abstract", help="drop weights to floored copy counts")
    _add_term_arg(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_abstract)

    p = sub.add_parser("a-normalize", help="normal form in the additive fragment")
    _add_term_arg(p)
    _add_common(p)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.set_defaults(fn=_cmd_a_normalize)

    p = sub.add_parser("translate", help="translate a typed term into products")
    _add_term_arg(p)
    _add_common(p, ctx=True)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.set_defaults(fn=_cmd_translate)

    p = sub.add_parser(
        "fp-normalize", help="translate, then normalize the products image"
    )
    _add_term_arg(p)
    _add_common(p, ctx=True)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.set_defaults(fn=_cmd_fp_normalize)

    p = sub.add_parser(
        "square", help="verify a commuting abstraction square on one term"
    )
    _add_term_arg(p)
    _add_common(p, ctx=True)
    p.add_argument("--level", choices=("additive", "fp"), default="additive")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.set_defaults(fn=_cmd_square)

    p = sub.add_parser("fuzz", help="run the metatheory harness")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--report", help="write line-delimited JSON records here")
    p.add_argument(
        "--figures",
        nargs="?",
        const="",
        default=None,
        help="render summary PNGs (default: alongside the report)",
    )
    p.set_defaults(fn=_cmd_fuzz)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
