"""Command line: build registry bloqs from parameters, count gates, draw call graphs, cost hardware.

Bloq parameters follow the registry name as ``key=value`` or ``--key value``.
Exit codes: 0 success, 2 usage error, 3 analysis error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from qre import __version__, physical as ph
from qre.errors import BudgetInfeasible, QREError
from qre.registry import REGISTRY, build_bloq, lookup, names
from qre.resources import (AggregationPolicy, ToffoliToT, build_call_graph, call_graph_to_dot,
                           gate_counts, get_callees, qubit_count)
from qre.symbolics import evaluate, is_constant, sym, to_text

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ANALYSIS = 3

POLICIES = {"four": ToffoliToT.FOUR, "seven": ToffoliToT.SEVEN, "keep": ToffoliToT.KEEP}
SCHEMES = {"fowler_gidney": ph.FOWLER_GIDNEY, "beverland": ph.BEVERLAND}
DATA_BLOCKS = {"simple": ph.DataBlockKind.SIMPLE, "compact": ph.DataBlockKind.COMPACT,
               "intermediate": ph.DataBlockKind.INTERMEDIATE, "fast": ph.DataBlockKind.FAST}
FACTORIES = {"fifteen_to_one": ph.FIFTEEN_TO_ONE, "fifteen_to_one_two_level": ph.FIFTEEN_TO_ONE_TWO_LEVEL,
             "ccz": ph.CCZ_FACTORY}
STRATEGIES = {"thirds": ph.Strategy.THIRDS_BUDGET, "grid": ph.Strategy.GRID_SEARCH_VOLUME}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Values


def value(x) -> Any:
    """A JSON value for an expression: int, float, or text when symbolic."""
    e = sym(x)
    if is_constant(e):
        v = evaluate(e)
        if isinstance(v, Fraction) and v.denominator == 1:
            return int(v)
        if isinstance(v, int):
            return v
        return float(v)
    return to_text(e)


def fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return "-" if v is None else str(v)
    if isinstance(v, int):
        return f"{v:,}"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def bloq_params(tokens: Sequence[str]) -> dict[str, str]:
    """``key=value``, ``--key value`` or ``--key=value`` tokens as a dict."""
    out: dict[str, str] = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.startswith("--"):
            key, eq, val = tok[2:].partition("=")
            if not eq:
                if i + 1 >= len(tokens):
                    raise UsageError(f"missing value for {tok}")
                i += 1
                val = tokens[i]
        elif "=" in tok:
            key, _, val = tok.partition("=")
        else:
            raise UsageError(f"expected key=value or --key value, got {tok!r}")
        key = key.replace("-", "_")
        if not key:
            raise UsageError(f"empty parameter name in {tok!r}")
        if key in out:
            raise UsageError(f"parameter {key} given twice")
        out[key] = val
        i += 1
    return out


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# count


def _policy(name: str) -> AggregationPolicy:
    return AggregationPolicy(toffoli_to_t=POLICIES[name])


def _counts_dict(counts) -> dict:
    d = counts.to_dict()
    d["n_rotations"] = value(counts.n_rotations)
    return d


def count_report(name: str, params: dict[str, str], *, policy: str = "four", symbolic: bool = False,
                 controlled: bool = False, adjoint: bool = False, with_breakdown: bool = False) -> dict:
    """The count ReportDocument for one registry bloq; JSON-ready and free of timestamps."""
    b = build_bloq(name, params, symbolic=symbolic, controlled=controlled, adjoint=adjoint)
    pol = _policy(policy)
    counts = gate_counts(b)
    try:
        qubits = value(qubit_count(b))
    except (QREError, TypeError):
        # symbolic widths cannot be decomposed into wires
        qubits = None
    doc = {
        "command": "count",
        "invocation": {"bloq": name, "params": dict(sorted(params.items())), "policy": policy,
                       "symbolic": symbolic, "controlled": controlled, "adjoint": adjoint},
        "bloq": str(b),
        "counts": _counts_dict(counts),
        "aggregated": _counts_dict(counts.aggregate(pol)),
        "total_t": value(counts.total_t(pol)),
        "qubits": qubits,
        "logical": None,
    }
    if isinstance(qubits, int) and is_constant(counts.n_rotations):
        try:
            doc["logical"] = ph.LogicalCounts.from_gate_counts(qubits, counts, pol).to_dict()
        except (QREError, ValueError, TypeError):
            pass
    if with_breakdown:
        doc["breakdown"] = breakdown_rows(b, pol)
    return doc


def breakdown_rows(b, policy: AggregationPolicy) -> list[dict]:
    """One row per direct callee, heaviest Toffoli first (ties keep declaration order)."""
    rows = []
    for c, m in (get_callees(b) or {}).items():
        counts = gate_counts(c) * m
        rows.append({
            "callee": c.name,
            "bloq": str(c),
            "calls": value(m),
            "toffoli": value(counts.toffoli),
            "t": value(counts.aggregate(policy).t),
            "n_rotations": value(counts.n_rotations),
        })
    if all(isinstance(r["toffoli"], (int, float)) for r in rows):
        rows.sort(key=lambda r: -r["toffoli"])
    return rows


def render_count(doc: dict) -> str:
    inv = doc["invocation"]
    lines = [doc["bloq"], f"policy: Toffoli -> T {inv['policy']}, rotations by direct synthesis", ""]
    c = doc["counts"]
    for label, v in (("T", c["t"]), ("Toffoli", c["toffoli"]), ("Clifford", c["clifford"]),
                     ("Measurement", c["measurement"]), ("Rotations", c["n_rotations"]),
                     ("Total T", doc["total_t"]), ("Qubits", doc["qubits"])):
        lines.append(f"  {label:<20}{fmt(v)}")
    rows = doc.get("breakdown")
    if rows:
        lines += ["", _table(["Callee", "Calls", "Toffoli", "T", "Rotations"],
                             [[r["callee"], r["calls"], r["toffoli"], r["t"], r["n_rotations"]] for r in rows])]
    return "\n".join(lines) + "\n"


def _table(head: list[str], rows: list[list]) -> str:
    cells = [head] + [[fmt(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(head))]

    def line(r):
        return "  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                         for i, (c, w) in enumerate(zip(r, widths)))

    sep = "  ".join("-" * w for w in widths)
    return "\n".join([line(cells[0]), sep] + [line(r) for r in cells[1:]])


def _cache_path(invocation: dict) -> Path | None:
    root = os.environ.get("QRE_CACHE_DIR")
    if not root:
        return None
    key = hashlib.sha256(json.dumps([__version__, invocation], sort_keys=True).encode()).hexdigest()
    return Path(root) / f"count-{key[:32]}.json"


def cmd_count(args) -> tuple[int, str]:
    params = bloq_params(args.params)
    inv = {"bloq": args.name, "params": params, "policy": args.policy, "symbolic": args.symbolic,
           "controlled": args.controlled, "adjoint": args.adjoint, "breakdown": args.breakdown}
    cache = _cache_path(inv)
    if cache is not None and cache.exists():
        doc = json.loads(cache.read_text())
    else:
        doc = count_report(args.name, params, policy=args.policy, symbolic=args.symbolic,
                           controlled=args.controlled, adjoint=args.adjoint, with_breakdown=args.breakdown)
        if cache is not None:
            cache.parent.mkdir(parents=True, exist_ok=True)
            cache.write_text(dumps(doc))
    return EXIT_OK, dumps(doc) if args.format == "json" else render_count(doc)


# ---------------------------------------------------------------------------
# callgraph


def cmd_callgraph(args) -> tuple[int, str]:
    b = build_bloq(args.name, bloq_params(args.params), symbolic=args.symbolic)
    cg = build_call_graph(b, max_depth=args.max_depth)
    dot = call_graph_to_dot(cg, annotate=not args.no_annotate)
    if args.dot:
        Path(args.dot).write_text(dot)
        return EXIT_OK, f"wrote {len(cg.nodes)} nodes and {len(cg.edges)} edges to {args.dot}\n"
    return EXIT_OK, dot


# ---------------------------------------------------------------------------
# physical


def load_counts(path: str) -> ph.LogicalCounts:
    """A LogicalCounts JSON object, or a ``count`` report carrying a logical section."""
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    if data.get("command") == "count":
        if data.get("logical") is None:
            raise UsageError(f"{path}: count report has no numeric logical counts")
        data = data["logical"]
    try:
        return ph.LogicalCounts.from_dict(data)
    except (QREError, ValueError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def physical_report(counts: ph.LogicalCounts, *, budget: float = 0.01, scheme: str = "fowler_gidney",
                    data_block: str = "simple", routing_overhead: float = 0.5,
                    factory: str = "fifteen_to_one_two_level", hardware: str = "superconducting_realistic",
                    strategy: str = "thirds") -> dict:
    model = ph.PhysicalCostModel(SCHEMES[scheme], ph.DataBlock(DATA_BLOCKS[data_block], routing_overhead),
                                 FACTORIES[factory], ph.HARDWARE_PRESETS[hardware])
    est = ph.estimate(model, counts, budget, STRATEGIES[strategy])
    return {
        "command": "physical",
        "invocation": {"budget": budget, "scheme": scheme, "data_block": data_block,
                       "routing_overhead": routing_overhead, "factory": factory, "hardware": hardware,
                       "strategy": strategy},
        "logical": counts.to_dict(),
        "physical": est.to_dict(),
    }


def render_physical(doc: dict) -> str:
    inv, p, lg = doc["invocation"], doc["physical"], doc["logical"]
    rows = [
        ("Algorithm qubits", lg["algorithm_qubits"]), ("T", lg["t"]), ("Toffoli", lg["toffoli"]),
        ("", ""),
        ("Error budget", inv["budget"]), ("QEC scheme", inv["scheme"]), ("Hardware", inv["hardware"]),
        ("Data block", f"{inv['data_block']} (routing {inv['routing_overhead']})"),
        ("Factory", inv["factory"]), ("Strategy", inv["strategy"]),
        ("", ""),
        ("Data distance", p["d_data"]), ("Factory distance", p["d_factory"]),
        ("Factories", p["n_factories"]), ("Data qubits", p["data_qubits"]),
        ("Factory qubits", p["factory_qubits"]), ("Physical qubits", p["physical_qubits"]),
        ("Cycles", p["cycles"]), ("Wall time (s)", p["wall_time"]),
        ("Data error", p["data_error"]), ("Distillation error", p["distillation_error"]),
        ("Failure probability", p["failure_prob"]),
    ]
    lines = ["Physical resource estimate", ""]
    lines += [f"  {k:<22}{fmt(v)}" if k else "" for k, v in rows]
    return "\n".join(lines) + "\n"


def cmd_physical(args) -> tuple[int, str]:
    counts = load_counts(args.counts)
    doc = physical_report(counts, budget=args.budget, scheme=args.scheme, data_block=args.data_block,
                          routing_overhead=args.routing_overhead, factory=args.factory,
                          hardware=args.hardware, strategy=args.strategy)
    return EXIT_OK, dumps(doc) if args.format == "json" else render_physical(doc)


# ---------------------------------------------------------------------------
# list


def registry_listing() -> dict:
    out = {}
    for n in names():
        e = REGISTRY[n]
        out[n] = {
            "summary": e.summary,
            "params": [{"name": p.name, "required": p.required, "help": p.help,
                        "default": None if p.required or p.default is None else str(p.default)}
                       for p in e.params],
        }
    return out


def cmd_list(args) -> tuple[int, str]:
    if args.name:
        lookup(args.name)
        listing = {args.name: registry_listing()[args.name]}
    else:
        listing = registry_listing()
    if args.format == "json":
        return EXIT_OK, dumps(listing)
    lines = []
    for n, info in listing.items():
        ps = " ".join(f"{p['name']}" if p["required"] else f"[{p['name']}={p['default']}]"
                      for p in info["params"])
        lines.append(f"{n:<24}{ps}")
        if args.name and info["summary"]:
            lines.append(f"  {info['summary']}")
    return EXIT_OK, "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Entry point


def _budget(text: str) -> float:
    try:
        b = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < b < 1:
        raise argparse.ArgumentTypeError(f"error budget must lie in (0, 1), got {b}")
    return b


def _depth(text: str) -> int:
    d = int(text)
    if d < 0:
        raise argparse.ArgumentTypeError("depth must be non-negative")
    return d


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qre", allow_abbrev=False,
                                     description="Quantum resource estimates for registry bloqs.")
    parser.add_argument("--version", action="version", version=f"qre {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fmt_opt = {"choices": ("json", "table"), "default": "table"}

    p = sub.add_parser("count", allow_abbrev=False, help="gate counts of one bloq")
    p.add_argument("name")
    p.add_argument("--policy", choices=tuple(POLICIES), default="four",
                   help="Toffoli to T conversion (rotations always use direct synthesis)")
    p.add_argument("--symbolic", action="store_true", help="missing sizes become symbols")
    p.add_argument("--breakdown", action="store_true", help="per-callee table")
    p.add_argument("--controlled", action="store_true")
    p.add_argument("--adjoint", action="store_true")
    p.add_argument("--format", **fmt_opt)
    p.set_defaults(run=cmd_count)

    p = sub.add_parser("callgraph", allow_abbrev=False, help="call graph in DOT")
    p.add_argument("name")
    p.add_argument("--dot", metavar="FILE", help="write DOT here instead of stdout")
    p.add_argument("--max-depth", type=_depth, default=None)
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--no-annotate", action="store_true", help="omit per-node counts")
    p.set_defaults(run=cmd_callgraph)

    p = sub.add_parser("physical", allow_abbrev=False, help="physical cost of logical counts")
    p.add_argument("counts", help="JSON file ('-' for stdin)")
    p.add_argument("--budget", type=_budget, default=0.01)
    p.add_argument("--scheme", choices=tuple(SCHEMES), default="fowler_gidney")
    p.add_argument("--data-block", choices=tuple(DATA_BLOCKS), default="simple")
    p.add_argument("--routing-overhead", type=float, default=0.5)
    p.add_argument("--factory", choices=tuple(FACTORIES), default="fifteen_to_one_two_level")
    p.add_argument("--hardware", choices=tuple(ph.HARDWARE_PRESETS), default="superconducting_realistic")
    p.add_argument("--strategy", choices=tuple(STRATEGIES), default="thirds")
    p.add_argument("--format", **fmt_opt)
    p.set_defaults(run=cmd_physical, params=[])

    p = sub.add_parser("list", allow_abbrev=False, help="registry names and parameters")
    p.add_argument("name", nargs="?")
    p.add_argument("--format", **fmt_opt)
    p.set_defaults(run=cmd_list, params=[])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra and args.command not in ("count", "callgraph"):
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        args.params = extra
        code, out = args.run(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"qre: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetInfeasible as exc:
        print(f"qre: infeasible: {exc}\n  try a larger --budget or --factory fifteen_to_one_two_level",
              file=sys.stderr)
        return EXIT_ANALYSIS
    except QREError as exc:
        msg = exc.args[0] if exc.args else ""
        print(f"qre: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_ANALYSIS
    try:
        sys.stdout.write(out)
        sys.stdout.flush()
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
    return code


if __name__ == "__main__":
    sys.exit(main())
