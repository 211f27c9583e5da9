"""Command-line front end.

Exit codes: 0 success, 2 input or usage error, 3 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from typing import List, Optional, Sequence, Tuple

from .classify import essential_check, extinction_finite
from .exceptions import BudgetExceededError, CtmcStructError, InputError
from .lattice import IntVec, span_dim
from .network import (
    JumpStructure, StructureWarning, derive_jumps, load_jump_structure, parse_network, reduce_jumps,
)
from .oracle import DEFAULT_BUDGET, Window
from . import report as rp

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def load_input(path: str, kind: Optional[str] = None):
    """Returns ``(structure, echo)`` for a reaction file or a jump-structure document."""
    if kind is None:
        ext = os.path.splitext(path)[1].lower()
        if ext == ".json":
            kind = "jumps"
        elif ext in (".rxn", ".txt", ".crn"):
            kind = "rxn"
        else:
            raise InputError(f"cannot infer input kind from {path!r}; pass --kind rxn|jumps")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", StructureWarning)
        if kind == "rxn":
            net = parse_network(text)
            js = derive_jumps(net)
            species = net.species_names
        else:
            js = load_jump_structure(text)
            species = None
    notes = [str(w.message) for w in caught if issubclass(w.category, StructureWarning)]
    for n in notes:
        print(f"warning: {n}", file=sys.stderr)
    return js, rp.input_echo(js, path, kind, species, notes)


def parse_point(text: str, dim: int) -> IntVec:
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise InputError(f"cannot read point {text!r}") from None
    if len(parts) == 1 and dim > 1:
        parts = parts * dim
    if len(parts) != dim:
        raise InputError(f"point {text!r} does not have {dim} coordinates")
    return tuple(parts)


def parse_box(text: str, dim: int) -> Tuple[IntVec, IntVec]:
    if text.count(":") != 1:
        raise InputError(f"box must look like lo:hi, got {text!r}")
    lo, hi = text.split(":")
    return parse_point(lo, dim), parse_point(hi, dim)


def default_margin(js: JumpStructure) -> int:
    return 4 * max(abs(c) for w in js.omegas for c in w)


def default_window(js: JumpStructure) -> Window:
    top = max(max(p) for p in js.input_points() + js.output_points())
    m = default_margin(js)
    return Window((0,) * js.dim, (top + m,) * js.dim, m)


def _emit(report: dict, fmt: str):
    sys.stdout.write(rp.dumps_json(report) if fmt == "json" else rp.render_text(report))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="maximum number of states in any oracle box")
    common.add_argument("--kind", choices=("rxn", "jumps"),
                        help="input kind (default: from the file extension)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for independent windows and lines")
    common.add_argument("--verbose", action="store_true")

    p = _Parser(prog="ctmcstruct", description="Structural classification of lattice CTMCs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="full report")
    a.add_argument("file")
    a.add_argument("--window", action="append", default=[], metavar="LO:HI")
    a.add_argument("--margin", type=int)
    a.add_argument("--line", action="append", default=[], metavar="C")

    for name, hlp in (("extinction", "extinction-set report"), ("essential", "essentiality check"),
                      ("reduce", "drop redundant jumps")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("file")

    e = sub.add_parser("equiv", parents=[common], help="structural equivalence of two inputs")
    e.add_argument("file")
    e.add_argument("other")
    e.add_argument("--window", metavar="LO:HI")
    e.add_argument("--margin", type=int)

    ln = sub.add_parser("line", parents=[common], help="classify one invariant line")
    ln.add_argument("file")
    ln.add_argument("--at", required=True, metavar="C")

    w = sub.add_parser("window", parents=[common], help="oracle classification of a box")
    w.add_argument("file")
    w.add_argument("--box", required=True, metavar="LO:HI")
    w.add_argument("--margin", type=int)
    return p


def _window(js, spec: str, margin: Optional[int]) -> Window:
    lo, hi = parse_box(spec, js.dim)
    return Window(lo, hi, default_margin(js) if margin is None else margin)


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    threads = max(1, args.threads)
    try:
        js, echo = load_input(args.file, args.kind)
        rep = rp.empty_report(echo)
        if args.command == "analyze":
            wins = [_window(js, s, args.margin) for s in args.window]
            if not wins:
                wins = [default_window(js)]
            lines: List[IntVec] = [parse_point(s, js.dim) for s in args.line]
            if not lines and span_dim(js.omegas) == 1:
                lines = [(0,) * js.dim]
            rep = rp.analysis_report(js, echo, wins, lines, args.budget, threads)
        elif args.command == "extinction":
            rep["extinction"] = extinction_finite(js).to_dict()
        elif args.command == "essential":
            rep["essential"] = essential_check(js, args.budget).to_dict()
        elif args.command == "reduce":
            red = reduce_jumps(js)
            if args.format == "json":
                sys.stdout.write(rp.dumps_json(red.to_document()))
            else:
                sys.stdout.write(f"dim: {red.dim}\n")
                for w, I in red.jumps:
                    sys.stdout.write(f"jump {list(w)}: minimal {I.tolist()}\n")
                dropped = [list(w) for w in js.omegas if w not in red.omegas]
                sys.stdout.write(f"dropped: {dropped}\n")
            return EXIT_OK
        elif args.command == "equiv":
            jt, echo2 = load_input(args.other, args.kind)
            w = _window(js, args.window, args.margin) if args.window else None
            rep["equivalence"] = rp.equivalence_section(js, jt, echo2, w, args.budget)
        elif args.command == "line":
            rep["lines"] = [rp.line_section(js, parse_point(args.at, js.dim))]
        elif args.command == "window":
            rep["windows"] = [rp.window_section(js, _window(js, args.box, args.margin), args.budget)]
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (CtmcStructError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    _emit(rep, args.format)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
