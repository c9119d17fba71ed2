"""
hermite-staircase
Command line front end: check interpolation problems, print reduction chains,
run enumerations and regenerate the reference tables.

Exit status: 0 certified correct, 2 certified incorrect, 3 probably
incorrect, 1 usage or input errors.

Author: avery
"""

import argparse
import json
import logging
import os
import sys
import traceback
from typing import Callable, Dict, List, Optional, Sequence

from blessed import Terminal

from . import bounds, enumeration, reference
from .cache import VerdictCache, check
from .diagrams import (
    DiagramError,
    HermiteError,
    StaircaseDiagram,
    full_triangle,
    one_step_diagram,
    triangular,
)
from .interp import Verdict, VerdictKind, generic_basis, problem_for
from .reduction import chain
from .settings import (
    FORMATS,
    ConfigError,
    RunConfig,
    app_home,
    coerce,
    error_log_file,
    get_default_settings,
    load_settings,
    reset_settings,
    save_settings,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_INCORRECT, EXIT_PROBABLY_INCORRECT = 0, 1, 2, 3

"""--- Input languages ---"""


class NodeSpecError(HermiteError, ValueError):
    """A node specification could not be parsed."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position


def parse_nodes(text: str) -> List[int]:
    """`F2x5+F1x3` -> [2, 2, 2, 2, 2, 1, 1, 1]; `F3` is one node of order 3."""
    orders: List[int] = []
    position = 0
    for term in text.split("+"):
        stripped = term.strip()
        where = position + len(term) - len(term.lstrip())
        head, _, count = stripped[1:].partition("x")
        if not stripped.startswith("F") or not head.isdigit() or (count and not count.isdigit()):
            raise NodeSpecError("expected F<d>x<k>", text, where)
        d, k = int(head), int(count) if count else 1
        if d < 1 or k < 1:
            raise NodeSpecError("orders and counts must be positive", text, where)
        orders.extend([d] * k)
        position += len(term) + 1
    return orders


def parse_range(text: str) -> List[int]:
    """`2..7` or `4`."""
    low, sep, high = text.partition("..")
    try:
        return list(range(int(low), int(high) + 1)) if sep else [int(low)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a range: {text!r}")


def parse_ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of integers: {text!r}")


"""--- Output ---"""

VERDICT_COLORS = {
    VerdictKind.CERTIFIED_CORRECT: "green",
    VerdictKind.CERTIFIED_INCORRECT: "red",
    VerdictKind.PROBABLY_INCORRECT: "yellow",
}


class Printer:
    """Writes to stdout; blessed styling only reaches a real terminal in text mode."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.term = Terminal(stream=sys.stdout)

    def styled(self, style: str, text: str) -> str:
        if self.fmt != "text":
            return text
        return getattr(self.term, style)(text)

    def line(self, text: str = ""):
        print(text)

    def header(self, text: str):
        self.line(self.styled("bold", text))

    def json(self, payload):
        self.line(json.dumps(payload, indent=2, sort_keys=True))

    def verdict(self, verdict: Verdict, extra: Optional[Dict] = None):
        record = dict(extra or {}, **verdict.to_record())
        if self.fmt == "json":
            self.json(record)
            return
        if self.fmt == "csv":
            columns = ["kind", "trials", "prime", "degree_bound", "error_bound", "method"]
            self.line(",".join(columns))
            self.line(",".join("" if record[c] is None else str(record[c]) for c in columns))
            return
        self.line(self.styled(VERDICT_COLORS[verdict.kind], verdict.kind.value))
        for key, value in (extra or {}).items():
            self.line(f"  {key}: {value}")
        self.line(f"  method: {verdict.method}")
        self.line(f"  trials: {verdict.trials}")
        if verdict.prime is not None:
            self.line(f"  prime: {verdict.prime}")
        self.line(f"  degree bound: {verdict.degree_bound}")
        if verdict.kind is VerdictKind.PROBABLY_INCORRECT:
            self.line(f"  error bound: {float(verdict.error_bound):.3e}")
        if verdict.witness is not None:
            self.line("  witness: " + " ".join("(" + ",".join(map(str, p)) + ")" for p in verdict.witness))


"""--- Configuration ---"""

FLAG_SETTINGS = ("seed", "prime", "trials", "exact_threshold", "budget", "jobs", "format", "cache")


def run_config(options: argparse.Namespace) -> RunConfig:
    """Settings store and environment, overridden by command line flags."""
    settings = load_settings()
    for key in FLAG_SETTINGS:
        value = getattr(options, key, None)
        if value is not None:
            settings[key] = value
    if getattr(options, "full", False):
        settings["full"] = 1
    return RunConfig.from_settings(settings)


def open_cache(config: RunConfig, path: Optional[str] = None) -> Optional[VerdictCache]:
    path = path or config.cache_path
    return VerdictCache(path) if path else None


def default_cache_path(config: RunConfig) -> str:
    return config.cache_path or os.path.join(app_home(), "verdicts.jsonl")


"""--- Commands ---"""


def cmd_check(options, config: RunConfig, out: Printer) -> int:
    orders = parse_nodes(options.nodes)
    if options.basis:
        basis = StaircaseDiagram.parse(options.basis)
    else:
        basis = one_step_diagram(sum(triangular(d) for d in orders))
    problem = problem_for(orders, basis)
    verdict = check(problem, config, open_cache(config))
    out.verdict(verdict, {"nodes": options.nodes, "basis": str(basis)})
    return verdict.exit_code


def cmd_reduce(options, config: RunConfig, out: Printer) -> int:
    diagram = StaircaseDiagram.parse(options.type)
    stop = options.stop
    if stop is None and options.v is not None:
        # a custom v alone prints its single step
        stop = diagram.cardinality - triangular(options.d)
    result = chain(diagram, options.d, stop, options.v)
    if out.fmt == "json":
        out.json({
            "chain": [str(result.start)] + [str(step.after) for step in result.steps],
            "steps": [
                {
                    "before": str(step.before),
                    "after": str(step.after),
                    "v": list(step.v),
                    "removed": sorted(list(alpha) for alpha in step.removed),
                    "degred": step.degred,
                    "licensed": step.licensed,
                }
                for step in result.steps
            ],
        })
        return EXIT_OK
    out.line(result.arrow())
    if options.details:
        for step in result.steps:
            mark = "" if step.licensed else "  (unlicensed)"
            out.line(f"  {step}  degred={step.degred}{mark}")
    return EXIT_OK


def _staircase_of(points) -> Optional[StaircaseDiagram]:
    if not points or any(len(alpha) != 2 for alpha in points):
        return None
    top = max(sum(alpha) for alpha in points)
    entries = [sum(1 for alpha in points if sum(alpha) == level) for level in range(top + 1)]
    try:
        diagram = StaircaseDiagram(tuple(entries))
    except DiagramError:
        return None
    return diagram if diagram.points == frozenset(points) else None


def cmd_basis(options, config: RunConfig, out: Printer) -> int:
    orders = parse_nodes(options.nodes)
    result = generic_basis([full_triangle(d) for d in orders], config)
    diagram = _staircase_of(result.basis)
    if out.fmt == "json":
        out.json({"basis": [list(alpha) for alpha in result.basis], "type": str(diagram) if diagram else None})
        return EXIT_OK
    out.line(" ".join("(" + ",".join(map(str, alpha)) + ")" for alpha in result.basis))
    if diagram is not None:
        out.line(f"type: {diagram}")
    return EXIT_OK


def cmd_decide(options, config: RunConfig, out: Printer) -> int:
    terminal, steps = enumeration.reduction_path(options.d, options.k)
    verdict = enumeration.decide_one_step(options.d, options.k, config, open_cache(config))
    start = one_step_diagram(options.k * triangular(options.d))
    path = " -> ".join([str(start)] + [str(step.after) for step in steps])
    out.verdict(verdict, {"d": options.d, "k": options.k, "path": path})
    return verdict.exit_code


def cmd_enumerate(options, config: RunConfig, out: Printer) -> int:
    diagrams = enumeration.enumerate_d_diagrams(options.d, options.k, options.filter)
    if options.count:
        out.line(str(sum(1 for _ in diagrams)))
        return EXIT_OK
    for diagram in diagrams:
        out.line(str(diagram))
    return EXIT_OK


def cmd_verify(options, config: RunConfig, out: Printer) -> int:
    report = enumeration.verify_basecases(
        options.d,
        options.steps or options.d,
        options.p,
        config,
        family=options.family,
        strict=not options.lenient,
        source_nodes=options.source_nodes,
        fail_fast=options.fail_fast,
        cache=open_cache(config),
    )
    if out.fmt == "json":
        out.line(report.to_json())
    elif out.fmt == "csv":
        out.line(enumeration.CSV_HEADER)
        out.line(report.csv_row())
    else:
        out.header(f"d={report.d} p={report.k} family={report.family}")
        if report.source_nodes is not None:
            out.line(f"  source nodes: {report.source_nodes} ({'sound' if report.sound else 'not sound'})")
        out.line(f"  diagrams: {report.total}")
        for failure in report.failures:
            out.line(out.styled("red", f"  FAIL {failure}"))
        out.line(out.styled("green", "  all base cases pass") if report.passed else f"  {len(report.failures)} failures")
    return EXIT_OK if report.passed else EXIT_INCORRECT


def _table_rows(out: Printer, header: Sequence[str], rows: List[Sequence]):
    if out.fmt == "csv":
        out.line(",".join(header))
        for row in rows:
            out.line(",".join("" if x is None else str(x) for x in row))
        return
    if out.fmt == "json":
        out.json([dict(zip(header, row)) for row in rows])
        return
    cells = [[str(h) for h in header]] + [["-" if x is None else str(x) for x in row] for row in rows]
    widths = [max(len(row[i]) for row in cells if i < len(row)) for i in range(len(header))]
    out.header("  ".join(h.rjust(w) for h, w in zip(cells[0], widths)))
    for row in cells[1:]:
        out.line("  ".join(x.rjust(w) for x, w in zip(row, widths)))


def _table_counts(options, config: RunConfig, out: Printer) -> int:
    published = reference.published_counts()
    rows = []
    for d in options.d_range:
        row = [d, options.nodes, sum(1 for _ in enumeration.enumerate_d_diagrams(d, options.nodes, "proper"))]
        printed = published.get(d)
        if printed is None or options.nodes != 6:
            row.append(None)
        else:
            row.append(printed[4] if printed[4] is not None else printed[2])
        if options.sources:
            k1 = enumeration.default_source_nodes(d, options.nodes)
            if d > 5 and not config.full:
                row += [k1, "skipped", "skipped", "skipped"]
            else:
                counted = enumeration.count_row(d, k1, options.nodes if k1 > options.nodes else None)
                terminals = counted["terminals"] if counted["terminals"] is not None else counted["proper_k1"]
                basecases = counted["basecases"] if counted["basecases"] is not None else counted["proper_k1"]
                row += [k1, counted["proper_k1"], terminals, basecases]
        rows.append(row)
    header = ["d", "k", "proper", "published"]
    if options.sources:
        header += ["k1", "proper_k1", "terminals", "basecases"]
    _table_rows(out, header, rows)
    return EXIT_OK


def _rmk_rows(table: List[List[int]]) -> List[List[int]]:
    return [[m] + list(row) for m, row in enumerate(table)]


def _table_rmk(options, config: RunConfig, out: Printer) -> int:
    rows = []
    for m in range(options.max + 1):
        if m > 3 and not config.full:
            rows.append([m, "skipped"])
            continue
        rows.append([m] + bounds.r_row(m, config, cache=open_cache(config)))
    width = max(len(row) for row in rows)
    _table_rows(out, ["m"] + [f"k{k}" for k in range(width - 1)], [row + [None] * (width - len(row)) for row in rows])
    return EXIT_OK


def _table_rmk_bounds(options, config: RunConfig, out: Printer) -> int:
    exact = reference.exact_r()
    rows = []
    for m, row in enumerate(exact):
        rows.append([m, "exact"] + row)
        rows.append([m, "sharper"] + reference.r_bounds_table()[m])
        rows.append([m, "r_bound"] + [bounds.r_bound(m, k) for k in range(m + 1)])
    width = max(len(row) for row in rows)
    _table_rows(out, ["m", "table"] + [f"k{k}" for k in range(width - 2)], [row + [None] * (width - len(row)) for row in rows])
    violations = reference.bound_violations()
    if out.fmt == "text":
        out.line(f"violations: {len(violations)}")
        for table, m, k, bound, value in violations:
            out.line(out.styled("red", f"  {table} m={m} k={k}: {bound} < {value}"))
    return EXIT_OK if not violations else EXIT_INCORRECT


def _table_triples(options, config: RunConfig, out: Printer) -> int:
    triples = bounds.exceptional_mixed_triples(options.max_order, config, open_cache(config))
    if out.fmt == "json":
        out.json([list(t) for t in triples])
    elif out.fmt == "csv":
        out.line(",".join(f"p{i}" for i in range(1, options.max_order + 1)))
        for t in triples:
            out.line(",".join(map(str, t)))
    else:
        for t in triples:
            out.line("(" + ",".join(map(str, t)) + ")")
    return EXIT_OK


TABLES: Dict[str, Callable] = {
    "counts": _table_counts,
    "rmk": _table_rmk,
    "rmk-bounds": _table_rmk_bounds,
    "triples": _table_triples,
}


def cmd_tables(options, config: RunConfig, out: Printer) -> int:
    return TABLES[options.which](options, config, out)


def cmd_bounds(options, config: RunConfig, out: Printer) -> int:
    if options.which == "expected-dim":
        spec = bounds.SingularitySpec(options.degree, tuple(options.counts))
        out.line(str(bounds.expected_dimension(spec)))
    elif options.which == "r-bound":
        out.line(str(bounds.r_bound(options.m, options.k)))
    else:
        result = bounds.mixed_q(options.d, options.D, options.p)
        if out.fmt == "json":
            out.json({"d": result.d, "D": result.D, "p": result.p, "h": result.h, "q": result.q})
        else:
            out.line(f"h={result.h} q={result.q}")
    return EXIT_OK


def cmd_cache(options, config: RunConfig, out: Printer) -> int:
    cache = VerdictCache(default_cache_path(config))
    if options.action == "stats":
        stats = cache.stats()
        if out.fmt == "json":
            out.json(dict(stats, path=cache.path))
        else:
            out.line(f"path: {cache.path}")
            for key in sorted(stats):
                out.line(f"{key}: {stats[key]}")
    elif options.action == "list":
        for record in cache.records():
            out.line(f"{record['problem'][:12]}  {record['kind']}  {record.get('method', '')}")
    else:
        cache.clear()
        out.line(f"cleared {cache.path}")
    return EXIT_OK


def cmd_config(options, config: RunConfig, out: Printer) -> int:
    defaults = get_default_settings()
    if options.action == "show":
        settings = load_settings()
        if out.fmt == "json":
            out.json(settings)
        else:
            for key in sorted(settings):
                out.line(f"{key} = {settings[key]}")
    elif options.action == "set":
        if options.key not in defaults:
            raise ConfigError(f"unknown setting {options.key!r}")
        merged = dict(load_settings(use_env=False))
        merged[options.key] = coerce(options.value, defaults[options.key])
        RunConfig.from_settings(merged)
        save_settings({options.key: merged[options.key]})
        out.line(f"{options.key} = {merged[options.key]}")
    else:
        reset_settings()
        out.line("settings reset to defaults")
    return EXIT_OK


"""--- Parser ---"""


class Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1; 2 and 3 are verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = Parser(add_help=False)
    group = common.add_argument_group("run options")
    group.add_argument("--seed", type=int, help="Seed for node sampling.")
    group.add_argument("--prime", type=int, help="Prime modulus above 2**31.")
    group.add_argument("--trials", type=int, help="Random evaluations before giving up on a certificate.")
    group.add_argument("--exact-threshold", dest="exact_threshold", type=int, help="Largest matrix size for the exact fallback.")
    group.add_argument("--budget", type=int, help="Cap on exhaustive checks and search boxes.")
    group.add_argument("--jobs", type=int, help="Worker processes for verdict checks.")
    group.add_argument("--format", choices=FORMATS, help="Output format.")
    group.add_argument("--cache", help="JSON-lines verdict cache file.")
    group.add_argument("--full", action="store_true", default=False, help="Lift the desk-scale limits.")
    group.add_argument("--log-level", dest="log_level", default="WARNING", help="Logging level for stderr.")
    return common


def cli_parser() -> argparse.ArgumentParser:
    """Returns the hermite-staircase commandline interface parser."""
    common = _common_flags()
    parser = Parser(prog="hermite-staircase", description="Generic correctness of Hermite interpolation on staircase diagrams.")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("check", parents=[common], help="Certify one interpolation problem.")
    sub.add_argument("--nodes", required=True, help="Node conditions, e.g. 'F2x5+F1x3'.")
    which = sub.add_mutually_exclusive_group()
    which.add_argument("--basis", help="Staircase type of the monomial basis, e.g. '(~4,2)'.")
    which.add_argument("--onestep", action="store_true", help="Use the 1-step diagram (default).")
    sub.set_defaults(handler=cmd_check)

    sub = commands.add_parser("reduce", parents=[common], help="Print a d-reduction chain.")
    sub.add_argument("type", help="Staircase type, e.g. '(~6,3)'.")
    sub.add_argument("-d", type=int, required=True)
    sub.add_argument("-v", type=parse_ints, help="v-sequence of the first step, e.g. 1,3,2.")
    sub.add_argument("--stop", type=int, help="Stop at this cardinality (default one node, or one step with -v).")
    sub.add_argument("--details", action="store_true", help="One line per step with v and degred.")
    sub.set_defaults(handler=cmd_reduce)

    sub = commands.add_parser("basis", parents=[common], help="Greedy generic basis for the given nodes.")
    sub.add_argument("--nodes", required=True)
    sub.set_defaults(handler=cmd_basis)

    sub = commands.add_parser("decide", parents=[common], help="Decide the 1-step problem for k nodes of order d.")
    sub.add_argument("-d", type=int, required=True)
    sub.add_argument("-k", type=int, required=True)
    sub.set_defaults(handler=cmd_decide)

    sub = commands.add_parser("enumerate", parents=[common], help="List d-diagrams for k nodes.")
    sub.add_argument("-d", type=int, required=True)
    sub.add_argument("-k", type=int, required=True)
    sub.add_argument("--filter", choices=enumeration.FILTERS, default="all")
    sub.add_argument("--count", action="store_true")
    sub.set_defaults(handler=cmd_enumerate)

    sub = commands.add_parser("verify", parents=[common], help="Verify the base cases for d.")
    sub.add_argument("-d", type=int, required=True)
    sub.add_argument("--steps", type=int, help="Step bound D (default d).")
    sub.add_argument("-p", type=int, default=6, help="Node count of the base cases.")
    sub.add_argument("--family", choices=("reachable", "proper"), default="reachable")
    sub.add_argument("--source-nodes", dest="source_nodes", type=int)
    sub.add_argument("--lenient", action="store_true", help="Require properness instead of safe properness.")
    sub.add_argument("--fail-fast", dest="fail_fast", action="store_true")
    sub.set_defaults(handler=cmd_verify)

    sub = commands.add_parser("tables", parents=[common], help="Regenerate a reference table.")
    sub.add_argument("which", choices=sorted(TABLES))
    sub.add_argument("--d", dest="d_range", type=parse_range, default=parse_range("2..7"))
    sub.add_argument("--nodes", type=int, default=6)
    sub.add_argument("--sources", action="store_true", help="Add the source-node columns to the counts table.")
    sub.add_argument("--max", type=int, default=2, help="Largest m of the r(m,k) table.")
    sub.add_argument("--max-order", dest="max_order", type=int, default=3)
    sub.set_defaults(handler=cmd_tables)

    sub = commands.add_parser("bounds", help="Closed-form bounds.")
    which_bound = sub.add_subparsers(dest="which", required=True)
    leaf = which_bound.add_parser("expected-dim", parents=[common])
    leaf.add_argument("--degree", type=int, required=True)
    leaf.add_argument("--counts", type=parse_ints, required=True, help="p_0,...,p_m")
    leaf = which_bound.add_parser("r-bound", parents=[common])
    leaf.add_argument("-m", type=int, required=True)
    leaf.add_argument("-k", type=int, required=True)
    leaf = which_bound.add_parser("mixed-q", parents=[common])
    leaf.add_argument("-d", type=int, required=True)
    leaf.add_argument("-D", type=int, required=True)
    leaf.add_argument("-p", type=int, required=True)
    sub.set_defaults(handler=cmd_bounds)

    sub = commands.add_parser("cache", parents=[common], help="Inspect or clear the verdict cache.")
    sub.add_argument("action", choices=("stats", "list", "clear"))
    sub.set_defaults(handler=cmd_cache)

    sub = commands.add_parser("config", parents=[common], help="Show or change stored settings.")
    sub.add_argument("action", choices=("show", "set", "reset"))
    sub.add_argument("key", nargs="?")
    sub.add_argument("value", nargs="?")
    sub.set_defaults(handler=cmd_config)
    return parser


"""--- Entry point ---"""


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main function that provides the hermite-staircase commandline interface."""
    parser = cli_parser()
    options = parser.parse_args(argv)
    if options.command == "config" and options.action == "set" and (options.key is None or options.value is None):
        parser.error("config set needs KEY and VALUE")
    logging.basicConfig(
        level=getattr(logging, str(options.log_level).upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = run_config(options)
        return options.handler(options, config, Printer(config.output_format))
    except HermiteError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return 130
    except Exception as e:
        log_path = error_log_file()
        try:
            os.makedirs(os.path.dirname(log_path), exist_ok=True)
            with open(log_path, "w") as f:
                f.write(f"An unexpected error occurred: {e}\n")
                traceback.print_exc(file=f)
            print(f"An unexpected error occurred. A log file '{log_path}' has been created.", file=sys.stderr)
        except OSError:
            traceback.print_exc()
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
