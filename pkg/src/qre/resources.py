"""Call graphs, factored gate counts and qubit counts."""

from __future__ import annotations

import enum
import json
from collections import Counter
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping

import attrs

from qre.errors import CycleDetected, MissingDecomposition, UncostedLeaf
from qre.ir import Bloq
from qre.symbolics import (
    Const,
    SymExpr,
    approx_equal,
    ceil,
    evaluate,
    is_constant,
    log2,
    simplify,
    smax,
    sym,
    to_text,
)


def direct_synthesis_t(eps) -> SymExpr:
    """Expected T count of synthesizing one Z rotation to precision ``eps``."""
    return simplify(ceil(1.149 * log2(1 / sym(eps)) + 9.2))


def _norm(x) -> SymExpr:
    return simplify(sym(x))


def _norm_rotations(rots) -> tuple:
    if isinstance(rots, Mapping):
        rots = rots.items()
    merged: dict[SymExpr, SymExpr] = {}
    for eps, count in rots:
        eps, count = _norm(eps), _norm(count)
        merged[eps] = simplify(merged[eps] + count) if eps in merged else count
    items = [(e, c) for e, c in merged.items() if c != 0]
    return tuple(sorted(items, key=lambda ec: to_text(ec[0])))


@attrs.frozen
class GateCounts:
    """Gate tallies kept separate by family.

    Rotations are a multiset keyed by synthesis precision; counts for
    different precisions are never merged.
    """

    t: SymExpr = attrs.field(default=0, converter=_norm)
    toffoli: SymExpr = attrs.field(default=0, converter=_norm)
    clifford: SymExpr = attrs.field(default=0, converter=_norm)
    measurement: SymExpr = attrs.field(default=0, converter=_norm)
    rotations: tuple = attrs.field(default=(), converter=_norm_rotations)

    @classmethod
    def zero(cls) -> "GateCounts":
        return cls()

    def __add__(self, other: "GateCounts") -> "GateCounts":
        if not isinstance(other, GateCounts):
            return NotImplemented
        return GateCounts(
            self.t + other.t,
            self.toffoli + other.toffoli,
            self.clifford + other.clifford,
            self.measurement + other.measurement,
            self.rotations + other.rotations,
        )

    def __radd__(self, other):
        if other == 0:
            return self
        return NotImplemented

    def __mul__(self, k) -> "GateCounts":
        k = sym(k)
        return GateCounts(
            self.t * k, self.toffoli * k, self.clifford * k, self.measurement * k,
            tuple((e, c * k) for e, c in self.rotations),
        )

    __rmul__ = __mul__

    @property
    def n_rotations(self) -> SymExpr:
        return simplify(sum((c for _, c in self.rotations), Const(0)))

    def is_zero(self) -> bool:
        return self == GateCounts.zero()

    def total_t(self, policy: "AggregationPolicy | None" = None) -> SymExpr:
        """T count after applying ``policy``; Toffolis stay out under KEEP."""
        return self.aggregate(policy).t

    def aggregate(self, policy: "AggregationPolicy | None" = None) -> "GateCounts":
        policy = policy or AggregationPolicy()
        t = self.t
        for eps, count in self.rotations:
            t = t + count * policy.rotation_to_t(eps)
        toffoli = self.toffoli
        if policy.toffoli_to_t is not ToffoliToT.KEEP:
            t = t + policy.toffoli_to_t.value * toffoli
            toffoli = 0
        return GateCounts(t, toffoli, self.clifford, self.measurement)

    def subs(self, bindings: Mapping[str, Any]) -> "GateCounts":
        def f(x):
            return simplify(x.subs(bindings))

        return GateCounts(f(self.t), f(self.toffoli), f(self.clifford), f(self.measurement),
                          tuple((f(e), f(c)) for e, c in self.rotations))

    def to_dict(self) -> dict:
        def out(x: SymExpr):
            if is_constant(x):
                v = evaluate(x)
                if isinstance(v, Fraction) and v.denominator == 1:
                    return int(v)
                return float(v)
            return to_text(x)

        return {
            "t": out(self.t),
            "toffoli": out(self.toffoli),
            "clifford": out(self.clifford),
            "measurement": out(self.measurement),
            "rotations": [{"eps": out(e), "count": out(c)} for e, c in self.rotations],
        }

    def __str__(self):
        parts = [f"{k}: {v}" for k, v in (("T", self.t), ("Toffoli", self.toffoli),
                                            ("Clifford", self.clifford),
                                            ("Measure", self.measurement)) if v != 0]
        parts += [f"rot(eps={e}): {c}" for e, c in self.rotations]
        return "{" + ", ".join(parts) + "}"


class ToffoliToT(enum.Enum):
    FOUR = 4
    SEVEN = 7
    KEEP = 0


@attrs.frozen
class AggregationPolicy:
    toffoli_to_t: ToffoliToT = ToffoliToT.FOUR
    rotation_to_t: Callable[[SymExpr], SymExpr] = direct_synthesis_t


# ---------------------------------------------------------------------------
# Call graphs


def get_callees(b: Bloq) -> dict[Bloq, SymExpr] | None:
    """Declared callees, else those read off the decomposition, else None."""
    declared = b.declared_callees()
    if declared is not None:
        return {c: simplify(sym(m)) for c, m in declared.items()
                if not c.is_bookkeeping and sym(m) != 0}
    if b.has_decomposition():
        counts = b.decompose().callee_counts()
        return {c: Const(m) for c, m in counts.items()}
    return None


@attrs.frozen
class CallGraph:
    root: Bloq
    nodes: tuple
    edges: tuple  # (caller, callee, multiplicity)
    leaves: frozenset

    def callees(self, b: Bloq) -> list[tuple[Bloq, SymExpr]]:
        return [(c, m) for a, c, m in self.edges if a == b]

    def multiplicity(self, caller: Bloq, callee: Bloq) -> SymExpr:
        for a, c, m in self.edges:
            if a == caller and c == callee:
                return m
        return Const(0)

    def to_dot(self, annotate: bool = True) -> str:
        return call_graph_to_dot(self, annotate)


def build_call_graph(root: Bloq, leaf_predicate: Callable[[Bloq], bool] | None = None,
                     max_depth: int | None = None, strict: bool = False) -> CallGraph:
    """Walk callees from ``root``.

    Descent stops at bloqs matching ``leaf_predicate``, at ``max_depth`` and at
    bloqs with no callees. With ``strict`` a bloq without callees must be a
    costed primitive, else MissingDecomposition.
    """
    nodes: list[Bloq] = []
    edges: list[tuple] = []
    leaves: set[Bloq] = set()
    done: set[Bloq] = set()

    def visit(b: Bloq, depth: int, stack: tuple):
        if b in stack:
            raise CycleDetected(f"{b} calls itself through {' -> '.join(map(str, stack))}")
        if b in done:
            return
        done.add(b)
        nodes.append(b)
        if (leaf_predicate is not None and leaf_predicate(b)) or (
                max_depth is not None and depth >= max_depth):
            leaves.add(b)
            return
        kids = get_callees(b)
        if not kids:
            if strict and b.leaf_counts() is None and not b.is_bookkeeping:
                raise MissingDecomposition(f"{b} has no decomposition, callees or counts")
            leaves.add(b)
            return
        for c, m in kids.items():
            edges.append((b, c, m))
            visit(c, depth + 1, stack + (b,))

    visit(root, 0, ())
    return CallGraph(root, tuple(nodes), tuple(edges), frozenset(leaves))


def gate_counts(root: Bloq, policy: AggregationPolicy | None = None, *,
                leaf_predicate: Callable[[Bloq], bool] | None = None,
                use_cache: bool = True) -> GateCounts:
    """Factored gate counts of ``root``, summed over the call graph.

    Results for repeated sub-bloqs are computed once per call (disable with
    ``use_cache=False``). When ``policy`` is given the result is aggregated.
    """
    memo: dict[Bloq, GateCounts] = {}

    def rec(b: Bloq, stack: frozenset) -> GateCounts:
        if use_cache and b in memo:
            return memo[b]
        if b in stack:
            raise CycleDetected(f"{b} calls itself")
        if leaf_predicate is not None and leaf_predicate(b):
            res = b.leaf_counts()
            if res is None:
                raise UncostedLeaf(f"{b} is a leaf without gate counts")
        else:
            res = b.leaf_counts()
            if res is None:
                if b.is_bookkeeping:
                    res = GateCounts.zero()
                else:
                    kids = get_callees(b)
                    if kids is None:
                        raise UncostedLeaf(f"{b} has no decomposition, callees or counts")
                    res = GateCounts.zero()
                    inner = stack | {b}
                    for c, m in kids.items():
                        res = res + rec(c, inner) * m
        if use_cache:
            memo[b] = res
        return res

    out = rec(root, frozenset())
    return out.aggregate(policy) if policy is not None else out


def _smax(a, b):
    if isinstance(a, SymExpr) or isinstance(b, SymExpr):
        a, b = sym(a), sym(b)
        if is_constant(a) and is_constant(b):
            return simplify(a if evaluate(a) >= evaluate(b) else b)
        return simplify(smax(a, b))
    return max(a, b)


def _plus(a, b):
    if isinstance(a, SymExpr) or isinstance(b, SymExpr):
        return simplify(sym(a) + sym(b))
    return a + b


def qubit_count(root: Bloq, allow_callee_bound: bool = True):
    """Peak qubits under sequential execution of each decomposition.

    At every step the requirement is the callee's own qubit count plus the
    idle qubits held by everything else. Nodes run in topological order with
    ties broken by construction order. Leaves use their signature width; a
    bloq with only a callee list is bounded below by its callees unless
    ``allow_callee_bound`` is False, in which case it is an error.
    """
    memo: dict[Bloq, Any] = {}

    def rec(b: Bloq):
        if b in memo:
            return memo[b]
        ann = b.my_qubit_count(rec)
        if ann is not None:
            res = ann
        elif b.has_decomposition():
            g = b.decompose()
            live = g.signature.total_left_qubits
            peak = _smax(live, g.signature.total_right_qubits)
            for i in g.topological_order():
                c = g.nodes[i]
                lw = c.signature.total_left_qubits
                idle = _plus(live, -lw)
                peak = _smax(peak, _plus(idle, rec(c)))
                live = _plus(idle, c.signature.total_right_qubits)
            res = peak
        else:
            res = b.signature.width
            kids = b.declared_callees()
            if kids:
                if not allow_callee_bound:
                    raise MissingDecomposition(f"{b} declares callees but no decomposition")
                for c in kids:
                    res = _smax(res, rec(c))
        memo[b] = res
        return res

    return rec(root)


# ---------------------------------------------------------------------------
# Cross-checks and exports


def _same(a: SymExpr, b: SymExpr) -> bool:
    a, b = simplify(sym(a)), simplify(sym(b))
    if a == b:
        return True
    if is_constant(a) and is_constant(b):
        return approx_equal(evaluate(a), evaluate(b))
    return simplify(a - b) == 0


@attrs.frozen
class CrosscheckReport:
    bloq: Bloq
    passed: bool
    diff: dict  # callee -> {"expected": declared, "found": derived}

    def __bool__(self):
        return self.passed

    def summary(self) -> str:
        if self.passed:
            return f"{self.bloq}: callees match"
        items = ", ".join(f"{k}: expected {v['expected']}, found {v['found']}"
                          for k, v in self.diff.items())
        return f"{self.bloq}: {{{items}}}"


def crosscheck_callees(b: Bloq) -> CrosscheckReport:
    """Compare declared callees with those instantiated by the decomposition."""
    declared = b.declared_callees()
    if declared is None or not b.has_decomposition():
        raise MissingDecomposition(f"{b} must declare callees and define a decomposition")
    declared = {c: sym(m) for c, m in declared.items() if not c.is_bookkeeping}
    found = {c: Const(m) for c, m in b.decompose().callee_counts().items()}
    diff = {}
    for c in sorted(set(declared) | set(found), key=str):
        e, f = declared.get(c, Const(0)), found.get(c, Const(0))
        if not _same(e, f):
            diff[c] = {"expected": simplify(e), "found": simplify(f)}
    return CrosscheckReport(b, not diff, diff)


def call_graph_to_dot(cg: CallGraph, annotate: bool = True) -> str:
    ids = {b: f"n{i}" for i, b in enumerate(cg.nodes)}
    lines = ["digraph callgraph {", '  node [shape=box, fontname="monospace"];']
    for b in cg.nodes:
        label = str(b).replace('"', "'")
        if annotate:
            try:
                counts = gate_counts(b)
                extra = [f"{k}={v}" for k, v in counts.to_dict().items()
                         if k != "rotations" and v != 0]
                if counts.rotations:
                    extra.append(f"rotations={to_text(counts.n_rotations)}")
                if extra:
                    label += "\\n" + ", ".join(extra)
            except (UncostedLeaf, CycleDetected):
                pass
        lines.append(f'  {ids[b]} [label="{label}"];')
    for a, c, m in cg.edges:
        lines.append(f'  {ids[a]} -> {ids[c]} [label="{to_text(m)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def counts_to_json(counts: GateCounts) -> str:
    return json.dumps(counts.to_dict(), sort_keys=True, indent=2)


def breakdown(b: Bloq, policy: AggregationPolicy | None = None,
              bindings: Mapping[str, Any] | None = None) -> list[tuple[Bloq, GateCounts]]:
    """Per-direct-callee totals (multiplicity times callee counts)."""
    kids = get_callees(b) or {}
    rows = []
    for c, m in kids.items():
        counts = gate_counts(c) * m
        if bindings:
            counts = counts.subs(bindings)
        rows.append((c, counts.aggregate(policy) if policy else counts))
    return rows


def callee_multiset(b: Bloq) -> Counter:
    return Counter({c: m for c, m in (get_callees(b) or {}).items()})


def sum_counts(items: Iterable[GateCounts]) -> GateCounts:
    out = GateCounts.zero()
    for c in items:
        out = out + c
    return out
