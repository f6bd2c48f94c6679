"""Classical simulation of reversible bloqs and fuzz testing against reference functions."""

from __future__ import annotations

import itertools
import json
from typing import Any, Callable, Mapping

import attrs
import numpy as np

from qre.errors import NotClassical, RangeError, SignatureMismatch
from qre.ir import LEFT_BOUNDARY, Bloq, Port, Register


def _check_register(reg: Register, value, what: str) -> Any:
    if reg.shape:
        arr = np.asarray(value, dtype=object)
        want = tuple(int(d) for d in reg.shape)
        if arr.shape != want:
            raise RangeError(f"{what} {reg.name}: expected shape {want}, got {arr.shape}")
        out = np.empty(want, dtype=object)
        for idx in reg.indices():
            reg.dtype.check(arr[idx])
            out[idx] = _normalize(arr[idx])
        return out
    reg.dtype.check(value)
    return _normalize(value)


def _normalize(v):
    if isinstance(v, (bool, np.bool_, np.integer)):
        return int(v)
    return v


def call_classically(bloq: Bloq, inputs: Mapping[str, Any], *, via_decomposition: bool = False) -> dict:
    """Apply ``bloq`` to classical register values.

    Uses the bloq's own classical action when it has one (unless
    ``via_decomposition``), otherwise propagates values wire by wire through its
    decomposition.
    """
    lefts = bloq.signature.lefts()
    if set(inputs) != {r.name for r in lefts}:
        raise SignatureMismatch(f"{bloq} takes {sorted(r.name for r in lefts)}, got {sorted(inputs)}")
    vals = {r.name: _check_register(r, inputs[r.name], "input") for r in lefts}

    if bloq.has_classical_action() and not (via_decomposition and bloq.has_decomposition()):
        out = bloq.on_classical_vals(**vals)
    elif bloq.has_decomposition():
        out = _propagate(bloq, vals)
    else:
        raise NotClassical(f"{bloq} has no classical action")

    rights = bloq.signature.rights()
    missing = {r.name for r in rights} - set(out)
    for r in rights:
        if r.name in missing and r.side.is_left:
            out[r.name] = vals[r.name]
    if {r.name for r in rights} != set(out):
        raise SignatureMismatch(f"{bloq} classical action returned {sorted(out)}")
    return {r.name: _check_register(r, out[r.name], "output") for r in rights}


def _propagate(bloq: Bloq, vals: dict) -> dict:
    graph = bloq.decompose()
    port_vals: dict[Port, Any] = {}

    def put(ports, value):
        if isinstance(ports, Port):
            port_vals[ports] = value
        else:
            for idx in np.ndindex(ports.shape):
                port_vals[ports[idx]] = value[idx]

    def get(ports):
        if isinstance(ports, Port):
            return port_vals.pop(ports)
        arr = np.empty(ports.shape, dtype=object)
        for idx in np.ndindex(ports.shape):
            arr[idx] = port_vals.pop(ports[idx])
        return arr

    for reg in graph.signature.lefts():
        if reg.shape:
            for idx in reg.indices():
                port_vals[Port(LEFT_BOUNDARY, reg.name, idx, reg.dtype, True)] = vals[reg.name][idx]
        else:
            port_vals[Port(LEFT_BOUNDARY, reg.name, (), reg.dtype, True)] = vals[reg.name]

    for node in graph.topological_order():
        sub = graph.nodes[node]
        ins = {name: get(ports) for name, ports in graph.inputs_of(node).items()}
        outs = call_classically(sub, ins)
        for reg in sub.signature.rights():
            if reg.shape:
                for idx in reg.indices():
                    port_vals[Port(node, reg.name, idx, reg.dtype, True)] = outs[reg.name][idx]
            else:
                port_vals[Port(node, reg.name, (), reg.dtype, True)] = outs[reg.name]

    return {name: get(ports) for name, ports in graph.output_sources().items()}


# ---------------------------------------------------------------------------
# Fuzzing


@attrs.frozen
class Mismatch:
    seed: int
    inputs: dict
    expected: dict
    found: Any


@attrs.frozen
class FuzzReport:
    bloq: str
    trials: int
    base_seed: int
    mismatches: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> str:
        def enc(v):
            if isinstance(v, np.ndarray):
                return [enc(x) for x in v.tolist()]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, (int, float, str, bool)) or v is None:
                return v
            return repr(v)

        return json.dumps({
            "bloq": self.bloq,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "mismatches": [
                {"seed": m.seed, "inputs": enc(m.inputs), "expected": enc(m.expected), "found": enc(m.found)}
                for m in self.mismatches
            ],
        }, sort_keys=True, indent=2)

    def __str__(self):
        status = "ok" if self.passed else f"{len(self.mismatches)} mismatches"
        seeds = ", ".join(str(m.seed) for m in self.mismatches[:10])
        return f"fuzz {self.bloq}: {self.trials} trials (seed {self.base_seed}), {status}" + (
            f"; failing seeds: {seeds}" if seeds else "")


def uniform_sampler(bloq: Bloq) -> Callable[[np.random.Generator], dict]:
    """Uniformly random values for every left register."""
    regs = bloq.signature.lefts()

    def draw(reg, rng):
        n = int(reg.dtype.num_qubits)
        raw = int.from_bytes(rng.bytes((n + 7) // 8), "big") % (2**n)
        bits = tuple((raw >> (n - 1 - i)) & 1 for i in range(n))
        return reg.dtype.from_bits(bits)

    def sample(rng):
        out = {}
        for reg in regs:
            if reg.shape:
                arr = np.empty(tuple(int(d) for d in reg.shape), dtype=object)
                for idx in reg.indices():
                    arr[idx] = draw(reg, rng)
                out[reg.name] = arr
            else:
                out[reg.name] = draw(reg, rng)
        return out

    return sample


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a, dtype=object), np.asarray(b, dtype=object))
    return a == b


def fuzz_against(
    bloq: Bloq,
    reference: Callable[..., Mapping[str, Any]],
    sampler: Callable[[np.random.Generator], dict] | None = None,
    trials: int = 1000,
    seed: int = 0,
    *,
    via_decomposition: bool = False,
) -> FuzzReport:
    """Compare ``bloq``'s classical action with ``reference(**inputs)`` on random inputs.

    Trial ``i`` draws its inputs from ``np.random.default_rng(seed + i)`` so any
    failing trial can be replayed from its reported seed.
    """
    sampler = sampler or uniform_sampler(bloq)
    bad = []
    for i in range(trials):
        trial_seed = seed + i
        inputs = sampler(np.random.default_rng(trial_seed))
        expected = dict(reference(**inputs))
        try:
            got = call_classically(bloq, inputs, via_decomposition=via_decomposition)
        except (RangeError, NotClassical) as e:
            bad.append(Mismatch(trial_seed, inputs, expected, f"error: {e}"))
            continue
        if set(got) != set(expected) or not all(_same(got[k], expected[k]) for k in expected):
            bad.append(Mismatch(trial_seed, inputs, expected, got))
    return FuzzReport(str(bloq), trials, seed, tuple(bad))


def exhaustive_inputs(bloq: Bloq):
    """Every basis input of a bloq whose left registers are all scalar."""
    regs = bloq.signature.lefts()
    if any(r.shape for r in regs):
        raise ValueError("exhaustive enumeration needs scalar registers")
    for combo in itertools.product(*(list(r.dtype.values()) for r in regs)):
        yield dict(zip((r.name for r in regs), combo))
