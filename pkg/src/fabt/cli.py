"""Command-line front end: ``fabt <subcommand> ...``.

Exit status: 0 on success, 1 when a check fails or a verdict is Disagree,
2 on usage, parse, scope or type errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import machine
from .backtrans import (
    backtranslate, downgrade, emulate, extract, inject, upgrade, uval_type,
)
from .compiler import compile_modular, compile_term, erase
from .contexts import link_src, link_tgt
from .errors import FabtError
from .harness import (
    DISAGREE, Component, GenConfig, backtrans_direction_check,
    distinguish_search, equiv_check_tgt, fuzz_backtrans_cases, modularity_check,
)
from .parser import parse_src, parse_tgt, parse_type
from .printer import show, show_type
from .report import (
    backtrans_figure, backtrans_lines, backtrans_summary, equiv_figure,
    summary_line, witness_line, write_json, write_text,
)
from .source import typecheck
from .syntax import Arrow, SrcType, Term, children, plug
from .target import ctx_well_scoped, well_scoped

DEFAULT_FUEL = 10**5


def default_fuel() -> int:
    raw = os.environ.get("FABT_DEFAULT_FUEL")
    if raw is None:
        return DEFAULT_FUEL
    try:
        fuel = int(raw)
    except ValueError:
        raise UsageError(f"FABT_DEFAULT_FUEL must be an integer, got {raw!r}")
    if fuel <= 0:
        raise UsageError("FABT_DEFAULT_FUEL must be positive")
    return fuel


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")


def _src(path: str) -> Term:
    return parse_src(_read(path))


def _tgt(path: str) -> Term:
    return parse_tgt(_read(path))


def _lang_of(path: str, given: str | None) -> str:
    if given:
        return given
    if path.endswith(".src"):
        return "src"
    if path.endswith(".tgt"):
        return "tgt"
    raise UsageError(f"cannot tell the language of {path}; pass --lang")


def _binding(text: str) -> tuple[str, SrcType]:
    name, sep, ty = text.partition(":")
    if not sep or not name.strip():
        raise UsageError(f"expected NAME:TYPE, got {text!r}")
    return name.strip(), parse_type(ty)


def _env(items) -> dict:
    return dict(_binding(b) for b in items or ())


def _arrow(text: str) -> Arrow:
    ty = parse_type(text)
    if not isinstance(ty, Arrow):
        raise UsageError(f"expected a function type, got {show_type(ty)}")
    return ty


def _config(args) -> GenConfig:
    cfg = GenConfig()
    for key, attr in (("seed", "seed"), ("count", "count"), ("max_size", "max_ctx_size"),
                      ("exhaustive_size", "exhaustive_size"), ("samples", "samples_per_size"),
                      ("random_max_size", "random_max_size"), ("budget", "search_budget")):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, attr, val)
    cfg.fuel = args.fuel if getattr(args, "fuel", None) else default_fuel()
    if getattr(args, "src_fuel", None):
        cfg.src_fuel = args.src_fuel
    if getattr(args, "no_values", False):
        cfg.values = False
    return cfg


def _tree_size(t: Term | SrcType, limit: int) -> int:
    """Printed size of a term (nodes plus annotation type nodes) or type, capped just above ``limit``."""
    memo: dict[int, int] = {}
    tmemo: dict[int, int] = {}

    def tsize(ty) -> int:
        k = id(ty)
        if k not in tmemo:
            parts = [getattr(ty, a) for a in ty.__match_args__]
            tmemo[k] = min(limit + 1, 1 + sum(tsize(p) for p in parts))
        return tmemo[k]

    def go(u: Term) -> int:
        k = id(u)
        if k not in memo:
            n = 1 + sum(go(c) for c in children(u))
            for a in ("ty", "dom", "cod"):
                if hasattr(u, a):
                    n += tsize(getattr(u, a))
            memo[k] = min(limit + 1, n)
        return memo[k]

    return tsize(t) if isinstance(t, SrcType) else go(t)


def _emit_term(t: Term, args) -> None:
    limit = getattr(args, "max_print", 200_000)
    n = _tree_size(t, limit)
    if n > limit:
        raise UsageError(f"term has more than {limit} printed nodes; raise --max-print to print it")
    print(show(t))


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_typecheck(args) -> int:
    t = _src(args.file)
    ty = typecheck(_env(args.env), t, parse_type(args.type) if args.type else None)
    print(show_type(ty))
    return 0


def cmd_scopecheck(args) -> int:
    t = _tgt(args.file)
    env = args.env or []
    if t.holes:
        outer = ctx_well_scoped(t, env)
        print("ok" + (f" outer={','.join(outer)}" if outer else ""))
        return 0
    if not well_scoped(env, t):
        free = sorted(t.fv - set(env))
        print(f"error: unbound {', '.join(free)}", file=sys.stderr)
        return 2
    print("ok")
    return 0


def cmd_run(args) -> int:
    lang = _lang_of(args.file, args.lang)
    fuel = args.fuel or default_fuel()
    if lang == "src":
        t = _src(args.file)
        typecheck({}, t)
    else:
        t = _tgt(args.file)
        if not well_scoped((), t):
            print(f"error: unbound {', '.join(sorted(t.fv))}", file=sys.stderr)
            return 2
    out = machine.run(t, fuel, lang)
    match out:
        case machine.Value():
            print(f"value {show(out.term)} steps={out.steps}")
        case machine.WrongOutcome(steps):
            print(f"wrong steps={steps}")
        case machine.FuelExhausted(f):
            print(f"timeout fuel={f}")
    return 0


def cmd_erase(args) -> int:
    t = _src(args.file)
    typecheck(_env(args.env), t)
    _emit_term(erase(t), args)
    return 0


def cmd_compile(args) -> int:
    t = _src(args.file)
    if args.modular:
        if not args.free:
            raise UsageError("--modular needs --free NAME:TYPE")
        name, fty = _binding(args.free)
        if not isinstance(fty, Arrow):
            raise UsageError("the imported component must have a function type")
        if not args.type:
            raise UsageError("--modular needs --type for the component")
        ty = _arrow(args.type)
        out = compile_modular(t, ty.dom, ty.cod, name, fty.dom, fty.cod)
    else:
        ty = parse_type(args.type) if args.type else typecheck({}, t)
        out = compile_term(t, ty)
    _emit_term(out, args)
    return 0


def cmd_link(args) -> int:
    if args.lang == "src":
        if not (args.type1 and args.type2):
            raise UsageError("source linking needs --type1 and --type2")
        a, b = _arrow(args.type1), _arrow(args.type2)
        out = link_src(_src(args.first), a.dom, a.cod, b.dom, b.cod, _src(args.second), args.x1, args.x2)
    else:
        out = link_tgt(_tgt(args.first), _tgt(args.second), args.x1, args.x2)
    _emit_term(out, args)
    return 0


def cmd_backtranslate(args) -> int:
    c = _tgt(args.file)
    if c.holes != 1:
        raise UsageError("back-translation needs a context with exactly one HOLE")
    ctx_well_scoped(c, ())
    _emit_term(backtranslate(c, parse_type(args.type), args.depth), args)
    return 0


def cmd_plug(args) -> int:
    lang = _lang_of(args.context, args.lang)
    parse = parse_src if lang == "src" else parse_tgt
    c, t = parse(_read(args.context)), parse(_read(args.term))
    if c.holes != 1:
        raise UsageError("the first file must be a context with exactly one HOLE")
    _emit_term(plug(c, t), args)
    return 0


def _write_report(report, verdict, args) -> None:
    out = sys.stdout if args.report in (None, "-") else open(args.report, "w")
    try:
        if args.emit == "json":
            write_json(report, verdict, out)
        else:
            write_text(report, verdict, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if out is not sys.stdout:
        print(summary_line(report, verdict))
        if verdict.tag == DISAGREE:
            print(witness_line(verdict))
    if args.figure:
        equiv_figure(report, args.figure)


def cmd_equiv(args) -> int:
    t1, t2 = _tgt(args.first), _tgt(args.second)
    for t in (t1, t2):
        if not well_scoped((), t) or t.holes:
            raise UsageError("both programs must be closed target terms")
    verdict, report = equiv_check_tgt(t1, t2, _config(args))
    _write_report(report, verdict, args)
    return 1 if verdict.tag == DISAGREE else 0


def cmd_search(args) -> int:
    ty = parse_type(args.type)
    r = distinguish_search(_src(args.first), _src(args.second), ty, _config(args))
    if r is None:
        print("not-found")
        return 1
    print(f"witness ctx={json.dumps(show(r.ctx))} src1={r.src1} src2={r.src2} "
          f"tgt1={r.tgt1} tgt2={r.tgt2}")
    return 0


def cmd_check_backtrans(args) -> int:
    if args.context:
        if not (args.term and args.type):
            raise UsageError("a context needs a term and --type")
        ty = parse_type(args.type)
        t = _src(args.term)
        typecheck({}, t, ty)
        c = _tgt(args.context)
        ctx_well_scoped(c, ())
        cases = [(c, t, ty)]
    else:
        cases = fuzz_backtrans_cases(args.random, args.seed)
    depths = tuple(int(d) for d in args.depths.split(",")) if args.depths else ()
    records = backtrans_direction_check(cases, args.fuel or default_fuel(), args.src_fuel, depths,
                                        fuel_imprecise=args.imprecise_fuel)
    lines = backtrans_lines(records)
    summary = backtrans_summary(records)
    if args.report and args.report != "-":
        Path(args.report).write_text("\n".join(lines + [summary]) + "\n")
    else:
        print("\n".join(lines))
    print(summary)
    if args.figure:
        backtrans_figure(records, args.figure)
    failed = any(r.precise == "fail" or r.imprecise == "fail" for r in records)
    return 1 if failed else 0


def cmd_check_modularity(args) -> int:
    a, b = _arrow(args.type1), _arrow(args.type2)
    c1 = Component(_src(args.first), a.dom, a.cod)
    c2 = Component(_src(args.second), b.dom, b.cod)
    verdict, report = modularity_check(c1, c2, _config(args), args.x1, args.x2)
    _write_report(report, verdict, args)
    return 1 if verdict.tag == DISAGREE else 0


def cmd_uval(args) -> int:
    n = args.n
    what = args.what
    if what == "type":
        ty = uval_type(n)
        if _tree_size(ty, args.max_print) > args.max_print:
            raise UsageError(f"UVal {n} is too large to print; raise --max-print")
        print(show_type(ty))
        return 0
    if what in ("inject", "extract"):
        if not args.type:
            raise UsageError(f"{what} needs --type")
        fn = inject if what == "inject" else extract
        _emit_term(fn(parse_type(args.type), n), args)
    elif what in ("upgrade", "downgrade"):
        fn = upgrade if what == "upgrade" else downgrade
        _emit_term(fn(n, args.d), args)
    elif what == "emulate":
        if not args.file:
            raise UsageError("emulate needs a target file")
        _emit_term(emulate(n, _tgt(args.file)), args)
    return 0


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def _corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, help="random contexts after the enumerated ones")
    p.add_argument("--max-size", type=int, help="largest enumerated or sampled context size")
    p.add_argument("--exhaustive-size", type=int, help="enumerate every context up to this size")
    p.add_argument("--samples", type=int, help="uniform samples per size above the exhaustive size")
    p.add_argument("--random-max-size", type=int)
    p.add_argument("--fuel", type=int, help="target fuel per run (default: FABT_DEFAULT_FUEL or 100000)")
    p.add_argument("--no-values", action="store_true", help="compare termination only")


def _report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--report", default="-", help="report file ('-' for stdout)")
    p.add_argument("--emit", choices=("text", "json"), default="text")
    p.add_argument("--figure", help="write a summary figure (PNG, SVG or PDF)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fabt", description="Typed-to-untyped compiler toolkit.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("typecheck", help="print the type of a source term")
    p.add_argument("file")
    p.add_argument("--env", action="append", metavar="NAME:TYPE")
    p.add_argument("--type", help="check against this type")
    p.set_defaults(fn=cmd_typecheck)

    p = sub.add_parser("scopecheck", help="check that a target term or context is well scoped")
    p.add_argument("file")
    p.add_argument("--env", action="append", metavar="NAME")
    p.set_defaults(fn=cmd_scopecheck)

    p = sub.add_parser("run", help="evaluate a closed program")
    p.add_argument("file")
    p.add_argument("--lang", choices=("src", "tgt"))
    p.add_argument("--fuel", type=int)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("erase", help="erase types from a source term")
    p.add_argument("file")
    p.add_argument("--env", action="append", metavar="NAME:TYPE")
    p.set_defaults(fn=cmd_erase)

    p = sub.add_parser("compile", help="compile a source term")
    p.add_argument("file")
    p.add_argument("--type")
    p.add_argument("--modular", action="store_true")
    p.add_argument("--free", metavar="NAME:TYPE", help="the imported component")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("link", help="link two components")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--lang", choices=("src", "tgt"), default="tgt")
    p.add_argument("--type1")
    p.add_argument("--type2")
    p.add_argument("--x1", default="x1")
    p.add_argument("--x2", default="x2")
    p.set_defaults(fn=cmd_link)

    p = sub.add_parser("backtranslate", help="back-translate a target context")
    p.add_argument("file")
    p.add_argument("--type", required=True, help="type of the hole")
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(fn=cmd_backtranslate)

    p = sub.add_parser("plug", help="plug a term into a context")
    p.add_argument("context")
    p.add_argument("term")
    p.add_argument("--lang", choices=("src", "tgt"))
    p.set_defaults(fn=cmd_plug)

    p = sub.add_parser("equiv", help="differentially test two closed target programs")
    p.add_argument("first")
    p.add_argument("second")
    _corpus_flags(p)
    _report_flags(p)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("search", help="search for a context telling two source terms apart")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--type", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, help="number of candidate contexts")
    p.add_argument("--fuel", type=int)
    p.add_argument("--src-fuel", type=int)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("check-backtrans", help="check back-translation in both directions")
    p.add_argument("context", nargs="?")
    p.add_argument("term", nargs="?")
    p.add_argument("--type")
    p.add_argument("--random", type=int, default=20, help="fuzzed cases when no files are given")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depths", help="extra depths for the imprecise direction, e.g. 1,2,3")
    p.add_argument("--fuel", type=int)
    p.add_argument("--src-fuel", type=int, default=10**7, help="fuel at the precise depth")
    p.add_argument("--imprecise-fuel", type=int, default=10**5, help="fuel at the extra depths")
    p.add_argument("--report", default="-")
    p.add_argument("--figure")
    p.set_defaults(fn=cmd_check_backtrans)

    p = sub.add_parser("check-modularity", help="compare whole and separate compilation of linked components")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--type1", required=True)
    p.add_argument("--type2", required=True)
    p.add_argument("--x1", default="x1")
    p.add_argument("--x2", default="x2")
    _corpus_flags(p)
    _report_flags(p)
    p.set_defaults(fn=cmd_check_modularity)

    p = sub.add_parser("uval", help="print UVal types and the coercions between them")
    p.add_argument("what", choices=("type", "inject", "extract", "upgrade", "downgrade", "emulate"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--type")
    p.add_argument("file", nargs="?")
    p.set_defaults(fn=cmd_uval)

    for sp in sub.choices.values():
        if not any(a.dest == "max_print" for a in sp._actions):
            sp.add_argument("--max-print", type=int, default=200_000,
                            help="refuse to print terms with more nodes than this")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (FabtError, UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RecursionError:
        print("error: input nested too deeply", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
