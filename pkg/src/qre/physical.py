"""Surface-code physical cost models.

Logical counts (algorithm qubits, T and Toffoli gates) become physical
qubits, error-correction cycles, wall-clock time and failure probability,
given a QEC scheme, a data block layout, a magic-state factory and hardware
parameters. Factory and hardware presets are editable defaults, not
measured values.
"""

from __future__ import annotations

import enum
import itertools
import math
from fractions import Fraction
from typing import Mapping

import attrs

from qre.errors import BadDistance, BadParams, BudgetInfeasible
from qre.resources import AggregationPolicy, GateCounts, ToffoliToT
from qre.symbolics import evaluate, is_constant

#: Largest code distance any scan will consider.
D_MAX = 51
D_MIN = 3


def _odd_distances(lo: int = D_MIN, hi: int = D_MAX) -> range:
    return range(lo, hi + 1, 2)


def _check_distance(d) -> None:
    if not isinstance(d, int) or isinstance(d, bool) or d < 1 or d % 2 == 0:
        raise BadDistance(f"code distance must be an odd positive integer, got {d!r}")


def _check_budget(budget) -> None:
    if not 0 < budget < 1:
        raise BadParams(f"error budget must lie in (0, 1), got {budget}")


# ---------------------------------------------------------------------------
# Components


@attrs.frozen
class QECScheme:
    """Logical error per tile per cycle: A (p / p*)^((d + 1) / 2)."""

    name: str
    error_rate_scaler: float
    error_rate_threshold: float

    def logical_error_rate(self, physical_error_rate: float, code_distance: int) -> float:
        _check_distance(code_distance)
        if physical_error_rate <= 0:
            raise BadParams(f"physical error rate must be positive, got {physical_error_rate}")
        ratio = physical_error_rate / self.error_rate_threshold
        return self.error_rate_scaler * ratio ** ((code_distance + 1) // 2)

    @staticmethod
    def physical_qubits_per_tile(code_distance: int) -> int:
        return 2 * code_distance**2


FOWLER_GIDNEY = QECScheme("FowlerGidney", 0.1, 0.01)
BEVERLAND = QECScheme("Beverland", 0.03, 0.01)


def logical_error_rate(scheme: QECScheme, physical_error_rate: float, code_distance: int) -> float:
    return scheme.logical_error_rate(physical_error_rate, code_distance)


class DataBlockKind(enum.Enum):
    SIMPLE = "Simple"
    COMPACT = "CompactLitinski"
    INTERMEDIATE = "IntermediateLitinski"
    FAST = "FastLitinski"


#: Code-distance-long steps needed to consume one magic state; None is unbounded speed.
_STEPS_PER_STATE = {
    DataBlockKind.SIMPLE: None,
    DataBlockKind.COMPACT: 9,
    DataBlockKind.INTERMEDIATE: 5,
    DataBlockKind.FAST: 1,
}


@attrs.frozen
class DataBlock:
    """Tile layout holding the algorithm qubits plus routing space."""

    kind: DataBlockKind = DataBlockKind.SIMPLE
    routing_overhead: float = 0.5

    def tiles(self, algorithm_qubits: int) -> int:
        n = algorithm_qubits
        if n == 0:
            return 0
        if self.kind is DataBlockKind.SIMPLE:
            return math.ceil(Fraction(str(1 + self.routing_overhead)) * n)
        if self.kind is DataBlockKind.COMPACT:
            return math.ceil(Fraction(3, 2) * n + 3)
        if self.kind is DataBlockKind.INTERMEDIATE:
            return 2 * n + 4
        return 2 * n + math.ceil(math.sqrt(8 * n)) + 1

    def physical_qubits(self, algorithm_qubits: int, code_distance: int) -> int:
        return self.tiles(algorithm_qubits) * QECScheme.physical_qubits_per_tile(code_distance)

    def consumption_cycles(self, n_states: int, code_distance: int) -> int:
        """Cycles to consume ``n_states`` magic states; zero for unbounded speed."""
        steps = _STEPS_PER_STATE[self.kind]
        return 0 if steps is None else n_states * steps * code_distance

    def data_error(self, algorithm_qubits: int, cycles: int, scheme: QECScheme,
                   physical_error_rate: float, code_distance: int) -> float:
        tiles = self.tiles(algorithm_qubits)
        if tiles == 0 or cycles == 0:
            return 0.0
        return tiles * cycles * scheme.logical_error_rate(physical_error_rate, code_distance)


class MagicStateKind(enum.Enum):
    T = "T"
    CCZ = "CCZ"


@attrs.frozen
class MagicStateFactory:
    """A distillation factory: a footprint in tiles, a fixed cycle count per state and an error model.

    Distillation error is a chain of (coefficient, exponent) stages applied to
    the physical error rate; one stage (35, 3) is 15-to-1 distillation.
    Errors while storing the factory tiles add tiles * cycles * p_l(d).
    """

    name: str
    kind: MagicStateKind
    tiles: int
    cycles_per_state: int
    stages: tuple = ((35, 3),)
    count: int = 1

    def __attrs_post_init__(self):
        if self.count < 1 or self.tiles < 1 or self.cycles_per_state < 1:
            raise BadParams("factory count, tiles and cycles must be positive")

    def with_count(self, count: int) -> "MagicStateFactory":
        return attrs.evolve(self, count=count)

    def footprint(self, code_distance: int) -> int:
        """Physical qubits of all ``count`` copies."""
        return self.count * self.tiles * QECScheme.physical_qubits_per_tile(code_distance)

    def distillation_error(self, physical_error_rate: float) -> float:
        err = physical_error_rate
        for coefficient, exponent in self.stages:
            err = coefficient * err**exponent
        return err

    def error_per_state(self, scheme: QECScheme, physical_error_rate: float, code_distance: int) -> float:
        storage = self.tiles * self.cycles_per_state * scheme.logical_error_rate(
            physical_error_rate, code_distance)
        return self.distillation_error(physical_error_rate) + storage

    def n_states(self, counts: "LogicalCounts") -> int:
        """Magic states consumed: 4 T per Toffoli, or one CCZ per Toffoli and per two T."""
        if self.kind is MagicStateKind.T:
            return counts.t + 4 * counts.toffoli
        return counts.toffoli + math.ceil(counts.t / 2)

    def production_cycles(self, n_states: int) -> int:
        return math.ceil(n_states / self.count) * self.cycles_per_state


FIFTEEN_TO_ONE = MagicStateFactory("15-to-1", MagicStateKind.T, tiles=11, cycles_per_state=66)
FIFTEEN_TO_ONE_TWO_LEVEL = MagicStateFactory("15-to-1 x 15-to-1", MagicStateKind.T, tiles=176,
                                             cycles_per_state=132, stages=((35, 3), (35, 3)))
CCZ_FACTORY = MagicStateFactory("CCZ", MagicStateKind.CCZ, tiles=48, cycles_per_state=88,
                                stages=((35, 3), (28, 2)))

FACTORY_PRESETS = {f.name: f for f in (FIFTEEN_TO_ONE, FIFTEEN_TO_ONE_TWO_LEVEL, CCZ_FACTORY)}


@attrs.frozen
class PhysicalParameters:
    """Aggregate physical error rate and duration of one error-correction cycle in seconds."""

    physical_error_rate: float
    cycle_time: float
    name: str = "custom"

    def __attrs_post_init__(self):
        if self.physical_error_rate <= 0 or self.cycle_time <= 0:
            raise BadParams("physical error rate and cycle time must be positive")


HARDWARE_PRESETS = {
    p.name: p for p in (
        PhysicalParameters(1e-3, 1e-6, "superconducting_realistic"),
        PhysicalParameters(1e-4, 1e-6, "superconducting_optimistic"),
        PhysicalParameters(1e-3, 1e-4, "ion_realistic"),
        PhysicalParameters(1e-4, 1e-4, "ion_optimistic"),
    )
}


def _count(x) -> int:
    if isinstance(x, (int,)):
        v = x
    else:
        if not is_constant(x):
            raise BadParams(f"physical costing needs concrete counts, got {x}")
        v = evaluate(x)
    v = math.ceil(v)
    if v < 0:
        raise BadParams(f"counts must be non-negative, got {v}")
    return int(v)


@attrs.frozen
class LogicalCounts:
    """Algorithm qubits plus T and Toffoli counts; Cliffords and measurements are free."""

    algorithm_qubits: int = attrs.field(converter=_count)
    t: int = attrs.field(default=0, converter=_count)
    toffoli: int = attrs.field(default=0, converter=_count)

    @classmethod
    def from_gate_counts(cls, algorithm_qubits, counts: GateCounts,
                         policy: AggregationPolicy | None = None) -> "LogicalCounts":
        """Fold rotations into T with ``policy``; Toffolis stay separate."""
        policy = policy or AggregationPolicy()
        agg = counts.aggregate(attrs.evolve(policy, toffoli_to_t=ToffoliToT.KEEP))
        return cls(algorithm_qubits, agg.t, agg.toffoli)

    def to_dict(self) -> dict:
        return {"algorithm_qubits": self.algorithm_qubits, "t": self.t, "toffoli": self.toffoli}

    @classmethod
    def from_dict(cls, d: Mapping) -> "LogicalCounts":
        unknown = set(d) - {"algorithm_qubits", "t", "toffoli"}
        if unknown:
            raise BadParams(f"unknown count fields: {sorted(unknown)}")
        return cls(d.get("algorithm_qubits", 0), d.get("t", 0), d.get("toffoli", 0))


# ---------------------------------------------------------------------------
# Model and estimates


@attrs.frozen
class PhysicalCostModel:
    scheme: QECScheme = FOWLER_GIDNEY
    data_block: DataBlock = DataBlock()
    factory: MagicStateFactory = FIFTEEN_TO_ONE
    hardware: PhysicalParameters = HARDWARE_PRESETS["superconducting_realistic"]


@attrs.frozen
class PhysicalEstimate:
    d_data: int
    d_factory: int
    n_factories: int
    physical_qubits: int
    data_qubits: int
    factory_qubits: int
    cycles: int
    wall_time: float
    failure_prob: float
    data_error: float
    distillation_error: float

    @property
    def volume(self) -> float:
        return self.physical_qubits * self.wall_time

    def to_dict(self) -> dict:
        return attrs.asdict(self)


def evaluate_design(model: PhysicalCostModel, counts: LogicalCounts, d_data: int, d_factory: int,
                    n_factories: int | None = None) -> PhysicalEstimate:
    """Costs at fixed code distances and factory count."""
    _check_distance(d_data)
    _check_distance(d_factory)
    factory = model.factory if n_factories is None else model.factory.with_count(n_factories)
    p = model.hardware.physical_error_rate
    n_states = factory.n_states(counts)
    cycles = max(model.data_block.consumption_cycles(n_states, d_data),
                 factory.production_cycles(n_states) if n_states else 0)
    data_error = model.data_block.data_error(counts.algorithm_qubits, cycles, model.scheme, p, d_data)
    distill = n_states * factory.error_per_state(model.scheme, p, d_factory) if n_states else 0.0
    data_qubits = model.data_block.physical_qubits(counts.algorithm_qubits, d_data)
    factory_qubits = factory.footprint(d_factory) if n_states else 0
    return PhysicalEstimate(
        d_data=d_data, d_factory=d_factory, n_factories=factory.count,
        physical_qubits=data_qubits + factory_qubits, data_qubits=data_qubits,
        factory_qubits=factory_qubits, cycles=cycles, wall_time=cycles * model.hardware.cycle_time,
        failure_prob=data_error + distill, data_error=data_error, distillation_error=distill)


class Strategy(enum.Enum):
    GRID_SEARCH_VOLUME = "GridSearchVolume"
    THIRDS_BUDGET = "ThirdsBudget"


@attrs.frozen
class Design:
    d_data: int
    d_factory: int
    n_factories: int


def _solve_thirds(model: PhysicalCostModel, counts: LogicalCounts, budget: float) -> Design:
    third = budget / 3
    factory = model.factory
    p = model.hardware.physical_error_rate
    n_states = factory.n_states(counts)
    d_factory = None
    for d in _odd_distances():
        if n_states * factory.error_per_state(model.scheme, p, d) <= third or n_states == 0:
            d_factory = d
            break
    if d_factory is None:
        raise BudgetInfeasible(
            f"{n_states} magic states at {factory.distillation_error(p):.3g} distillation error each"
            f" exceed the distillation budget {third:.3g} for every d <= {D_MAX}")
    for d in _odd_distances():
        est = evaluate_design(model, counts, d, d_factory)
        if est.data_error <= third:
            return Design(d, d_factory, factory.count)
    raise BudgetInfeasible(f"data storage error exceeds {third:.3g} for every d <= {D_MAX}")


def _solve_grid(model: PhysicalCostModel, counts: LogicalCounts, budget: float,
                max_factories: int) -> Design:
    # the rotation-synthesis third stays reserved, as in the thirds strategy
    allowed = 2 * budget / 3
    best, best_key = None, None
    counts_grid = sorted(set(range(1, max_factories + 1)) | {model.factory.count})
    for d_data, d_factory, k in itertools.product(_odd_distances(), _odd_distances(), counts_grid):
        est = evaluate_design(model, counts, d_data, d_factory, k)
        if est.failure_prob > allowed:
            continue
        key = (est.volume, est.physical_qubits, d_data, d_factory, k)
        if best_key is None or key < best_key:
            best, best_key = Design(d_data, d_factory, k), key
    if best is None:
        raise BudgetInfeasible(f"no design with d <= {D_MAX} and at most {max_factories} factories"
                               f" meets the budget {budget}")
    return best


def solve_design(strategy: Strategy, model: PhysicalCostModel, counts: LogicalCounts, budget: float,
                 *, max_factories: int = 16) -> Design:
    """Pick code distances (and, for the grid search, the factory count) for ``budget``.

    ThirdsBudget gives a third of the budget each to rotation synthesis (already
    fixed by the counts), distillation and data storage, and takes the
    smallest odd distance meeting each share. GridSearchVolume minimizes
    physical qubits times wall time subject to the same reserved third.
    """
    _check_budget(budget)
    if strategy is Strategy.THIRDS_BUDGET:
        return _solve_thirds(model, counts, budget)
    return _solve_grid(model, counts, budget, max_factories)


def estimate(model: PhysicalCostModel, counts: LogicalCounts, error_budget: float,
             strategy: Strategy = Strategy.THIRDS_BUDGET) -> PhysicalEstimate:
    design = solve_design(strategy, model, counts, error_budget)
    return evaluate_design(model, counts, design.d_data, design.d_factory, design.n_factories)
