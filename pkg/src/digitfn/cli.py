"""Command-line front end; JSON on stdout by default, exit 2 on any input error."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import analysis, maps, salem
from .errors import DigitfnError
from .numbers import (
    CantorBase,
    NumberSystem,
    QMatrix,
    format_digits,
    from_digits,
    parse_digits,
    parse_rational,
    representations,
    to_digits,
)

SERIES_NAMES = ("salem", "F", "Ftilde", "FnegaQ")


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # one-line diagnostics, exit 2
        raise CliError(message)


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc.msg} at line {exc.lineno}") from exc


def _require(args, name: str, why: str):
    value = getattr(args, name)
    if value is None:
        raise CliError(f"--{name.replace('_', '-')} is required {why}")
    return value


def _system(args) -> NumberSystem:
    kind = args.system
    if kind == "sadic":
        return NumberSystem.sadic(args.s)
    if kind == "nega":
        return NumberSystem.nega_sadic(args.s)
    if kind in ("cantor", "alt-cantor"):
        base = CantorBase.from_json(_load_json(_require(args, "base", f"for --system {kind}")))
        return NumberSystem.cantor(base) if kind == "cantor" else NumberSystem.alternating_cantor(base)
    q = QMatrix.from_json(_load_json(_require(args, "qmatrix", "for --system nega-q")))
    return NumberSystem.nega_q(q)


def _map(args) -> maps.DigitMap:
    if getattr(args, "map_file", None):
        return maps.map_from_json(_load_json(args.map_file))
    name = _require(args, "map", "(or --map-file)")
    if name == "salem":
        q0 = parse_rational(_require(args, "q0", "for the Salem function"))
        P = salem.PMatrix(((q0, 1 - q0),))
        return salem.SeriesFunction(P, NumberSystem.cantor(CantorBase.constant(2)))
    if name in ("F", "Ftilde", "FnegaQ"):
        P = salem.PMatrix.from_json(_load_json(_require(args, "matrix", f"for {name}")))
        if name == "FnegaQ":
            q = QMatrix.from_json(_load_json(_require(args, "qmatrix", "for FnegaQ")))
            return salem.SeriesFunction(P, NumberSystem.nega_q(q))
        base = CantorBase.from_json(_load_json(_require(args, "base", f"for {name}")))
        system = NumberSystem.cantor(base) if name == "F" else NumberSystem.alternating_cantor(base)
        return salem.SeriesFunction(P, system)
    return maps.builtin_map(name, args.s)


# -- subcommands -----------------------------------------------------------------


def cmd_convert(args) -> Any:
    system = _system(args)
    if args.digits is not None:
        d = parse_digits(args.digits, system)
        return {"x": from_digits(d), "digits": format_digits(d)}
    x = parse_rational(_require(args, "x", "(or --digits)"))
    reps = representations(x, system)
    return {"x": x, "digits": format_digits(to_digits(x, system)), "representations": [format_digits(r) for r in reps]}


def cmd_eval(args) -> Any:
    m = _map(args)
    x = parse_rational(_require(args, "x", "for eval"))
    return {"y": m(x)}


def cmd_integral(args) -> Any:
    return {"integral": analysis.exact_integral(_map(args))}


def cmd_jumps(args) -> Any:
    return analysis.one_sided_limits(_map(args), parse_rational(_require(args, "x", "for jumps")))


def cmd_dim(args) -> Any:
    m = _map(args)
    if args.kind == "graph":
        return analysis.graph_box_count(m, args.rank, args.max_rank)
    if args.kind == "level":
        y0 = parse_rational(_require(args, "y0", "for level-set counts"))
        return analysis.level_set_count(m, y0, args.rank, args.max_rank)
    return analysis.invariant_prefix_count(m, args.rank, args.max_rank)


def cmd_group(args) -> Any:
    r = maps.group_enumerate(args.s, args.k)
    return {"order": r.order, "closure_ok": r.closure_ok and r.inverses_ok}


def cmd_probe(args) -> Any:
    return analysis.derivative_probe(_map(args), parse_rational(_require(args, "x", "for probe")), args.depth)


def cmd_verify(args) -> Any:
    if args.matrix is not None:
        P = salem.PMatrix.from_json(_load_json(args.matrix))
        if args.qmatrix is not None:
            D: CantorBase | QMatrix = QMatrix.from_json(_load_json(args.qmatrix))
        else:
            D = CantorBase.from_json(_load_json(_require(args, "base", "with --matrix")))
        r = salem.check_conditions(P, D, args.depth)
        return {
            "sign_condition_ok": r.sign_condition_ok,
            "verdict": r.verdict,
            "products": [
                {"name": p.name, "period_factor": p.period_factor, "last": p.values[-1], "verdict": p.verdict}
                for p in r.products
            ],
        }
    rep = analysis.identity_suite(args.samples, args.seed)
    return {"samples": rep.samples, "seed": rep.seed, "ok": rep.ok, "passes": rep.passes}


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-rank", type=int, default=None, help="rank guard (default 12 or $DIGITFN_MAX_RANK)")
    common.add_argument("--depth", type=int, default=40)
    common.add_argument("--s", type=int, default=3, help="radix for radix-generic maps and systems")

    mapopts = argparse.ArgumentParser(add_help=False)
    mapopts.add_argument("--map", help=f"built-in map ({', '.join(maps.BUILTIN_NAMES + SERIES_NAMES)})")
    mapopts.add_argument("--map-file", help="block-map JSON file")
    mapopts.add_argument("--q0", help="Salem weight q0 = p/q")
    mapopts.add_argument("--matrix", help="P matrix JSON file")
    mapopts.add_argument("--base", help="Cantor base JSON file")
    mapopts.add_argument("--qmatrix", help="Q̃ matrix JSON file")

    p = _Parser(prog="digitfn", description="Exact digit-defined functions and their analysis.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("convert", parents=[common], help="rational <-> digit strings")
    c.add_argument("--system", choices=("sadic", "nega", "cantor", "alt-cantor", "nega-q"), default="sadic")
    c.add_argument("--x")
    c.add_argument("--digits")
    c.add_argument("--base")
    c.add_argument("--qmatrix")
    c.set_defaults(func=cmd_convert)

    for name, func, text in (
        ("eval", cmd_eval, "evaluate a map at x"),
        ("integral", cmd_integral, "exact integral of a digit map"),
        ("jumps", cmd_jumps, "one-sided limits at an s-adic rational"),
        ("probe", cmd_probe, "digit-bump difference quotients"),
    ):
        sp = sub.add_parser(name, parents=[common, mapopts], help=text)
        sp.add_argument("--x")
        sp.set_defaults(func=func)

    d = sub.add_parser("dim", parents=[common, mapopts], help="exact cylinder counts and slope")
    d.add_argument("kind", choices=("graph", "level", "invariant"))
    d.add_argument("--rank", type=int, default=10)
    d.add_argument("--y0")
    d.set_defaults(func=cmd_dim)

    g = sub.add_parser("group", parents=[common], help="enumerate the block-permutation group")
    g.add_argument("--k", type=int, default=1)
    g.set_defaults(func=cmd_group)

    v = sub.add_parser("verify", parents=[common], help="identity suite, or sign and product conditions with --matrix")
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--matrix")
    v.add_argument("--base")
    v.add_argument("--qmatrix")
    v.set_defaults(func=cmd_verify)
    return p


# -- output ----------------------------------------------------------------------


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        rows = []
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
        return rows
    if isinstance(obj, list):
        rows = []
        for i, v in enumerate(obj):
            rows.extend(_flatten(v, f"{prefix}.{i}" if prefix else str(i)))
        return rows
    return [(prefix, obj)]


def render(result: Any, fmt: str) -> str:
    if fmt == "csv" and isinstance(result, analysis.DimensionEstimate):
        return analysis.counts_csv(result)
    data = analysis.to_jsonable(result)
    if fmt == "json":
        return json.dumps(data, separators=(",", ":"), ensure_ascii=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(data):
        w.writerow([k, json.dumps(v) if isinstance(v, bool) or v is None else v])
    return buf.getvalue()


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
        stdout.write(render(result, args.format))
        return 0
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (CliError, DigitfnError) as exc:
        msg = " ".join(str(exc).split())
        stderr.write(f"digitfn: error: {msg}\n")
        return 2
    except (ValueError, ArithmeticError, RecursionError) as exc:
        stderr.write(f"digitfn: error: invalid input ({type(exc).__name__}: {' '.join(str(exc).split())})\n")
        return 2


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
