"""Typed hierarchical IR: data types, registers, bloqs and compute graphs.

A bloq is an immutable, hashable description of a quantum operation. Its
interface is a ``Signature`` of named, typed registers. A bloq may describe
itself further through a decomposition (a ``ComputeGraph`` built with
``GraphBuilder``), a declared callee list, a classical action or a tensor.

Wires obey linear semantics: every port is produced once and consumed once.
Multi-qubit values are addressed most-significant bit first.
"""

from __future__ import annotations

import enum
import functools
import heapq
import json
from collections import Counter
from fractions import Fraction
from typing import Any, Iterator, Sequence, Union

import attrs
import numpy as np

from qre.errors import (
    AlreadyBit,
    CycleError,
    DanglingWire,
    DTypeMismatch,
    MissingDecomposition,
    PortReuse,
    RangeError,
    SignatureMismatch,
)
from qre.symbolics import Const, SymExpr, evaluate_int, is_constant, to_text

SCHEMA_VERSION = 1


def _width(n) -> Union[int, SymExpr]:
    if isinstance(n, SymExpr):
        if is_constant(n):
            n = evaluate_int(n)
        else:
            return n
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"bit widths must be integers or expressions, got {n!r}")
    if n < 1:
        raise ValueError(f"bit width must be >= 1, got {n}")
    return int(n)


def _concrete(n) -> int:
    if isinstance(n, SymExpr):
        raise TypeError(f"width {n} is symbolic")
    return n


# ---------------------------------------------------------------------------
# Quantum data types


class QDType:
    """Base class for quantum data types."""

    @property
    def num_qubits(self):
        raise NotImplementedError

    def check(self, value) -> None:
        """Raise RangeError unless ``value`` is representable."""
        raise NotImplementedError

    def to_bits(self, value) -> tuple[int, ...]:
        raise NotImplementedError

    def from_bits(self, bits: Sequence[int]):
        raise NotImplementedError

    def values(self) -> Iterator:
        """All classical values, in increasing bit-pattern order."""
        for i in range(2 ** _concrete(self.num_qubits)):
            yield self.from_bits(_int_to_bits(i, self.num_qubits))

    def encode(self, value) -> tuple[int, ...]:
        self.check(value)
        return self.to_bits(value)

    def decode(self, bits: Sequence[int]):
        bits = tuple(int(b) for b in bits)
        if len(bits) != self.num_qubits or any(b not in (0, 1) for b in bits):
            raise RangeError(f"{bits} is not a {self.num_qubits}-bit pattern")
        return self.from_bits(bits)


def _int_to_bits(x: int, n: int) -> tuple[int, ...]:
    return tuple((x >> (n - 1 - i)) & 1 for i in range(n))


def _bits_to_int(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def _check_int(value, lo: int, hi: int, dtype) -> int:
    if isinstance(value, (bool, np.bool_)):
        value = int(value)
    if isinstance(value, np.integer):
        value = int(value)
    if not isinstance(value, int):
        raise RangeError(f"{dtype} expects an integer, got {value!r}")
    if not lo <= value < hi:
        raise RangeError(f"{value} out of range [{lo}, {hi}) for {dtype}")
    return value


@attrs.frozen
class Bit(QDType):
    @property
    def num_qubits(self) -> int:
        return 1

    def check(self, value) -> None:
        _check_int(value, 0, 2, self)

    def to_bits(self, value):
        return (int(value),)

    def from_bits(self, bits):
        return int(bits[0])

    def __str__(self):
        return "Bit"


@attrs.frozen
class UInt(QDType):
    n: Union[int, SymExpr] = attrs.field(converter=_width)

    @property
    def num_qubits(self):
        return self.n

    def check(self, value) -> None:
        _check_int(value, 0, 2 ** _concrete(self.n), self)

    def to_bits(self, value):
        return _int_to_bits(int(value), self.n)

    def from_bits(self, bits):
        return _bits_to_int(bits)

    def __str__(self):
        return f"UInt({self.n})"


@attrs.frozen
class Int(QDType):
    """Two's-complement signed integer."""

    n: Union[int, SymExpr] = attrs.field(converter=_width)

    @property
    def num_qubits(self):
        return self.n

    def check(self, value) -> None:
        half = 2 ** (_concrete(self.n) - 1)
        _check_int(value, -half, half, self)

    def to_bits(self, value):
        return _int_to_bits(int(value) % (2**self.n), self.n)

    def from_bits(self, bits):
        x = _bits_to_int(bits)
        return x - 2**self.n if bits[0] else x

    def __str__(self):
        return f"Int({self.n})"


@attrs.frozen
class Fxp(QDType):
    """Fixed point number with ``n`` total bits of which ``f`` are fractional."""

    n: Union[int, SymExpr] = attrs.field(converter=_width)
    f: int = 0
    signed: bool = False

    def __attrs_post_init__(self):
        if not isinstance(self.n, SymExpr) and not 0 <= self.f <= self.n:
            raise ValueError(f"fractional bits {self.f} must lie in [0, {self.n}]")

    @property
    def num_qubits(self):
        return self.n

    def _raw_range(self) -> tuple[int, int]:
        n = _concrete(self.n)
        if self.signed:
            return -(2 ** (n - 1)), 2 ** (n - 1)
        return 0, 2**n

    def check(self, value) -> None:
        v = Fraction(value)
        raw = v * 2**self.f
        if raw.denominator != 1:
            raise RangeError(f"{value} is not a multiple of 2^-{self.f}")
        lo, hi = self._raw_range()
        _check_int(int(raw), lo, hi, self)

    def to_bits(self, value):
        raw = int(Fraction(value) * 2**self.f)
        return _int_to_bits(raw % (2**self.n), self.n)

    def from_bits(self, bits):
        raw = _bits_to_int(bits)
        if self.signed and bits[0]:
            raw -= 2**self.n
        return Fraction(raw, 2**self.f)

    def __str__(self):
        return f"Fxp({self.n}, {self.f}{', signed' if self.signed else ''})"


@attrs.frozen
class MontgomeryUInt(QDType):
    """Unsigned integer tagged with a modulus. Values are simulated as plain residues."""

    n: Union[int, SymExpr] = attrs.field(converter=_width)
    modulus: Union[int, SymExpr, None] = None

    @property
    def num_qubits(self):
        return self.n

    def check(self, value) -> None:
        _check_int(value, 0, 2 ** _concrete(self.n), self)

    def to_bits(self, value):
        return _int_to_bits(int(value), self.n)

    def from_bits(self, bits):
        return _bits_to_int(bits)

    def __str__(self):
        return f"MontgomeryUInt({self.n}, {self.modulus})"


def dtype_num_qubits(d: QDType):
    """Bit width of a data type (1 for ``Bit``)."""
    return d.num_qubits


# ---------------------------------------------------------------------------
# Registers and signatures


class Side(enum.Enum):
    THRU = "Thru"
    LEFT = "LeftOnly"
    RIGHT = "RightOnly"

    @property
    def is_left(self) -> bool:
        return self is not Side.RIGHT

    @property
    def is_right(self) -> bool:
        return self is not Side.LEFT


def _shape(s) -> tuple:
    if isinstance(s, int):
        s = (s,)
    out = tuple(s)
    for d in out:
        if not isinstance(d, SymExpr) and d < 0:
            raise ValueError(f"negative register shape {out}")
    return out


@attrs.frozen
class Register:
    name: str
    dtype: QDType
    shape: tuple = attrs.field(default=(), converter=_shape)
    side: Side = Side.THRU

    def __attrs_post_init__(self):
        if not self.name:
            raise ValueError("register names must be nonempty")

    @property
    def is_array(self) -> bool:
        return bool(self.shape)

    def indices(self) -> Iterator[tuple]:
        yield from np.ndindex(*(_concrete(d) for d in self.shape))

    @property
    def total_bits(self):
        size = 1
        for d in self.shape:
            size = size * d
        bits = self.dtype.num_qubits * size
        return bits


@attrs.frozen
class Signature:
    registers: tuple = attrs.field(converter=tuple)

    def __attrs_post_init__(self):
        names = [r.name for r in self.registers]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names in {names}")

    @classmethod
    def build(cls, **widths) -> "Signature":
        """Thru registers from name=width pairs; width 1 gives a ``Bit``."""
        regs = []
        for name, n in widths.items():
            regs.append(Register(name, Bit() if n == 1 else UInt(n)))
        return cls(regs)

    def __iter__(self):
        return iter(self.registers)

    def __len__(self):
        return len(self.registers)

    def get(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    def lefts(self) -> tuple[Register, ...]:
        return tuple(r for r in self.registers if r.side.is_left)

    def rights(self) -> tuple[Register, ...]:
        return tuple(r for r in self.registers if r.side.is_right)

    @property
    def total_left_qubits(self):
        return _sum_bits(self.lefts())

    @property
    def total_right_qubits(self):
        return _sum_bits(self.rights())

    @property
    def width(self):
        """Qubits touched at once: the larger of the two sides."""
        left, right = self.total_left_qubits, self.total_right_qubits
        if isinstance(left, SymExpr) or isinstance(right, SymExpr):
            from qre.symbolics import simplify, smax

            return simplify(smax(left, right))
        return max(left, right)


def _sum_bits(regs) -> Union[int, SymExpr]:
    total = 0
    for r in regs:
        total = total + r.total_bits
    if isinstance(total, SymExpr):
        from qre.symbolics import simplify

        return simplify(total)
    return total


# ---------------------------------------------------------------------------
# Bloqs


class Bloq:
    """An immutable quantum operation.

    Subclasses are ``attrs.frozen`` classes so equality and hashing follow
    their classical attributes. Override any of:

    * ``build_composite(bb, **ports)`` for a full decomposition,
    * ``declared_callees()`` for a callee list with multiplicities,
    * ``on_classical_vals(**vals)`` for a classical action,
    * ``my_tensor()`` for a dense matrix of shape (2^right, 2^left),
    * ``leaf_counts()`` for primitive gate counts,
    * ``my_qubit_count(count)`` to annotate qubit usage.
    """

    is_bookkeeping = False

    @property
    def signature(self) -> Signature:
        raise NotImplementedError

    @property
    def name(self) -> str:
        return type(self).__name__

    def attributes(self) -> dict[str, Any]:
        if attrs.has(type(self)):
            return {f.name: getattr(self, f.name) for f in attrs.fields(type(self))}
        return {}

    def build_composite(self, bb: "GraphBuilder", **ports):
        raise NotImplementedError

    def has_decomposition(self) -> bool:
        return type(self).build_composite is not Bloq.build_composite

    def decompose(self) -> "ComputeGraph":
        if not self.has_decomposition():
            raise MissingDecomposition(f"{self} has no decomposition")
        return _decompose(self)

    def declared_callees(self) -> dict["Bloq", Any] | None:
        return None

    def on_classical_vals(self, **vals) -> dict[str, Any]:
        raise NotImplementedError

    def has_classical_action(self) -> bool:
        return type(self).on_classical_vals is not Bloq.on_classical_vals

    def my_tensor(self) -> np.ndarray | None:
        return None

    def leaf_counts(self):
        return None

    def my_qubit_count(self, count) -> Any:
        return None

    def adjoint(self) -> "Bloq":
        from qre.gates import Adjoint

        return Adjoint(self)

    def controlled(self, ctrl_state: int = 1) -> "Bloq":
        from qre.gates import Controlled

        return Controlled(self, ctrl_state)

    def call_classically(self, **vals) -> dict[str, Any]:
        from qre.classical_sim import call_classically

        return call_classically(self, vals)

    def tensor(self) -> np.ndarray:
        from qre.tensor_sim import tensor_of

        return tensor_of(self)

    def __str__(self) -> str:
        args = []
        for k, v in self.attributes().items():
            if isinstance(v, (tuple, list)) and len(v) > 4:
                v = f"<{len(v)} items>"
            elif isinstance(v, np.ndarray):
                v = f"<array {v.shape}>"
            args.append(f"{k}={v}")
        return f"{self.name}({', '.join(args)})" if args else self.name


@functools.lru_cache(maxsize=4096)
def _decompose(bloq: Bloq) -> "ComputeGraph":
    bb, ports = GraphBuilder.from_signature(bloq.signature)
    outs = bloq.build_composite(bb, **ports)
    if outs is None:
        outs = {}
    return bb.finalize(**outs)


# ---------------------------------------------------------------------------
# Bookkeeping bloqs


@attrs.frozen
class Split(Bloq):
    """Split a multi-qubit value into its bits, most significant first."""

    dtype: QDType
    is_bookkeeping = True

    @property
    def signature(self):
        return Signature([
            Register("reg", self.dtype, side=Side.LEFT),
            Register("bits", Bit(), shape=(self.dtype.num_qubits,), side=Side.RIGHT),
        ])

    def on_classical_vals(self, reg):
        return {"bits": np.array(self.dtype.encode(reg), dtype=object)}

    def my_tensor(self):
        return np.eye(2 ** self.dtype.num_qubits)


@attrs.frozen
class Join(Bloq):
    dtype: QDType
    is_bookkeeping = True

    @property
    def signature(self):
        return Signature([
            Register("bits", Bit(), shape=(self.dtype.num_qubits,), side=Side.LEFT),
            Register("reg", self.dtype, side=Side.RIGHT),
        ])

    def on_classical_vals(self, bits):
        return {"reg": self.dtype.decode([int(b) for b in bits])}

    def my_tensor(self):
        return np.eye(2 ** self.dtype.num_qubits)


@attrs.frozen
class Allocate(Bloq):
    """Produce a fresh register in the all-zeros state."""

    dtype: QDType
    is_bookkeeping = True

    @property
    def signature(self):
        return Signature([Register("reg", self.dtype, side=Side.RIGHT)])

    def on_classical_vals(self):
        return {"reg": self.dtype.from_bits((0,) * self.dtype.num_qubits)}

    def my_tensor(self):
        v = np.zeros((2 ** self.dtype.num_qubits, 1))
        v[0, 0] = 1
        return v


@attrs.frozen
class Free(Bloq):
    """Discard a register that is known to be all zeros."""

    dtype: QDType
    is_bookkeeping = True

    @property
    def signature(self):
        return Signature([Register("reg", self.dtype, side=Side.LEFT)])

    def on_classical_vals(self, reg):
        if any(self.dtype.to_bits(reg)):
            raise RangeError(f"freeing a register holding {reg}, expected zero")
        return {}

    def my_tensor(self):
        v = np.zeros((1, 2 ** self.dtype.num_qubits))
        v[0, 0] = 1
        return v


# ---------------------------------------------------------------------------
# Ports, wires and graphs

LEFT_BOUNDARY = -1
RIGHT_BOUNDARY = -2


@attrs.frozen
class Port:
    """One wire endpoint: a register element on a node (or on the boundary).

    ``is_source`` distinguishes the output side of a node from its input side.
    """

    node: int
    register: str
    index: tuple
    dtype: QDType
    is_source: bool

    def __str__(self):
        where = {LEFT_BOUNDARY: "in", RIGHT_BOUNDARY: "out"}.get(self.node, str(self.node))
        idx = "".join(f"[{i}]" for i in self.index)
        return f"{where}.{self.register}{idx}"


@attrs.frozen
class Wire:
    src: Port
    dst: Port


def _port_array(reg: Register, node: int, is_source: bool):
    if not reg.shape:
        return Port(node, reg.name, (), reg.dtype, is_source)
    arr = np.empty(tuple(_concrete(d) for d in reg.shape), dtype=object)
    for idx in reg.indices():
        arr[idx] = Port(node, reg.name, idx, reg.dtype, is_source)
    return arr


def _iter_ports(value) -> Iterator[Port]:
    if isinstance(value, Port):
        yield value
    else:
        for p in np.asarray(value, dtype=object).flat:
            yield p


class GraphBuilder:
    """Builds a ``ComputeGraph`` while enforcing linear use of every port.

    Single threaded; not shareable while building.
    """

    def __init__(self, signature: Signature | None = None):
        self._signature_regs: list[Register] = []
        self._nodes: list[Bloq] = []
        self._wires: list[Wire] = []
        self._free: dict[Port, None] = {}
        self._sources: set[Port] = set()
        self._open_sinks: dict[Port, None] = {}
        self._succ: dict[int, set[int]] = {}
        self._finalized = False
        self._fixed_signature = signature is not None
        self.inputs: dict[str, Any] = {}
        if signature is not None:
            for reg in signature:
                self._add_boundary(reg)

    @classmethod
    def from_signature(cls, signature: Signature) -> tuple["GraphBuilder", dict[str, Any]]:
        bb = cls(signature)
        return bb, dict(bb.inputs)

    def _add_boundary(self, reg: Register):
        self._signature_regs.append(reg)
        if reg.side.is_left:
            ports = _port_array(reg, LEFT_BOUNDARY, True)
            for p in _iter_ports(ports):
                self._free[p] = None
                self._sources.add(p)
            self.inputs[reg.name] = ports
            return ports
        return None

    def add_register(self, reg: Register):
        """Extend the signature with ``reg``; returns its input port(s) if it is a left register."""
        if self._fixed_signature:
            raise SignatureMismatch("signature was fixed at construction")
        if any(r.name == reg.name for r in self._signature_regs):
            raise ValueError(f"duplicate register {reg.name}")
        return self._add_boundary(reg)

    @property
    def signature(self) -> Signature:
        return Signature(self._signature_regs)

    # low level
    def place(self, bloq: Bloq) -> tuple[int, dict[str, Any], dict[str, Any]]:
        """Add a node without wiring it. Returns (node id, input ports, output ports)."""
        node = len(self._nodes)
        self._nodes.append(bloq)
        self._succ[node] = set()
        sinks, sources = {}, {}
        for reg in bloq.signature:
            if reg.side.is_left:
                sinks[reg.name] = _port_array(reg, node, False)
                for p in _iter_ports(sinks[reg.name]):
                    self._open_sinks[p] = None
            if reg.side.is_right:
                sources[reg.name] = _port_array(reg, node, True)
                for p in _iter_ports(sources[reg.name]):
                    self._free[p] = None
                    self._sources.add(p)
        return node, sinks, sources

    def _reaches(self, start: int, goal: int) -> bool:
        stack, seen = [start], set()
        while stack:
            u = stack.pop()
            if u == goal:
                return True
            if u in seen or u < 0:
                continue
            seen.add(u)
            stack.extend(self._succ.get(u, ()))
        return False

    def connect(self, out_port: Port, in_port: Port) -> "GraphBuilder":
        """Wire a produced port into a consumer port."""
        if out_port not in self._free:
            raise PortReuse(f"{out_port} is already consumed or was never produced")
        if in_port not in self._open_sinks:
            raise PortReuse(f"{in_port} is already connected")
        if out_port.dtype != in_port.dtype:
            raise DTypeMismatch(f"{out_port} is {out_port.dtype}, {in_port} expects {in_port.dtype}")
        src, dst = out_port.node, in_port.node
        if src >= 0 and dst >= 0 and self._reaches(dst, src):
            raise CycleError(f"wiring {out_port} -> {in_port} closes a cycle")
        del self._free[out_port]
        del self._open_sinks[in_port]
        if src >= 0 and dst >= 0:
            self._succ[src].add(dst)
        self._wires.append(Wire(out_port, in_port))
        return self

    # high level
    def add_d(self, bloq: Bloq, **inputs) -> dict[str, Any]:
        """Add ``bloq`` consuming ``inputs``; returns its outputs by register name."""
        lefts = bloq.signature.lefts()
        names = {r.name for r in lefts}
        if set(inputs) != names:
            raise SignatureMismatch(
                f"{bloq} expects inputs {sorted(names)}, got {sorted(inputs)}")
        seen: set[Port] = set()
        for reg in lefts:
            val = inputs[reg.name]
            if reg.shape:
                arr = np.asarray(val, dtype=object)
                if arr.shape != tuple(_concrete(d) for d in reg.shape):
                    raise SignatureMismatch(f"{reg.name} expects shape {reg.shape}, got {arr.shape}")
            elif not isinstance(val, Port):
                raise SignatureMismatch(f"{reg.name} expects a single port")
            for p in _iter_ports(val):
                if not isinstance(p, Port):
                    raise SignatureMismatch(f"{reg.name} got non-port {p!r}")
                if p not in self._free or p in seen:
                    raise PortReuse(f"{p} is already consumed")
                if p.dtype != reg.dtype:
                    raise DTypeMismatch(f"{p} is {p.dtype}, {bloq}.{reg.name} expects {reg.dtype}")
                seen.add(p)
        _, sinks, sources = self.place(bloq)
        for reg in lefts:
            if reg.shape:
                src = np.asarray(inputs[reg.name], dtype=object)
                for idx in reg.indices():
                    self.connect(src[idx], sinks[reg.name][idx])
            else:
                self.connect(inputs[reg.name], sinks[reg.name])
        return sources

    def add(self, bloq: Bloq, **inputs):
        """Like ``add_d`` but returns outputs positionally (None, one port, or a tuple)."""
        outs = self.add_d(bloq, **inputs)
        vals = [outs[r.name] for r in bloq.signature.rights()]
        if not vals:
            return None
        return vals[0] if len(vals) == 1 else tuple(vals)

    def split(self, port: Port) -> np.ndarray:
        if isinstance(port.dtype, Bit):
            raise AlreadyBit(f"{port} is a single qubit")
        return self.add(Split(port.dtype), reg=port)

    def join(self, bits, dtype: QDType | None = None) -> Port:
        bits = np.asarray(bits, dtype=object)
        dtype = dtype or UInt(len(bits))
        return self.add(Join(dtype), bits=bits)

    def allocate(self, dtype: QDType | int) -> Port:
        if isinstance(dtype, int):
            dtype = Bit() if dtype == 1 else UInt(dtype)
        return self.add(Allocate(dtype))

    def free(self, port: Port) -> None:
        self.add(Free(port.dtype), reg=port)

    def finalize(self, **outputs) -> "ComputeGraph":
        if self._finalized:
            raise RuntimeError("builder already finalized")
        if not self._fixed_signature:
            for name, val in outputs.items():
                if any(r.name == name for r in self._signature_regs):
                    continue
                first = next(_iter_ports(val))
                shape = () if isinstance(val, Port) else np.asarray(val, dtype=object).shape
                self._signature_regs.append(Register(name, first.dtype, shape, Side.RIGHT))
        rights = [r for r in self._signature_regs if r.side.is_right]
        if set(outputs) != {r.name for r in rights}:
            raise SignatureMismatch(
                f"outputs {sorted(outputs)} do not match signature {sorted(r.name for r in rights)}")
        for reg in rights:
            sinks = _port_array(reg, RIGHT_BOUNDARY, False)
            for p in _iter_ports(sinks):
                self._open_sinks[p] = None
            val = outputs[reg.name]
            if reg.shape:
                src = np.asarray(val, dtype=object)
                if src.shape != tuple(_concrete(d) for d in reg.shape):
                    raise SignatureMismatch(f"output {reg.name} has shape {src.shape}")
                for idx in reg.indices():
                    self.connect(src[idx], sinks[idx])
            else:
                if not isinstance(val, Port):
                    raise SignatureMismatch(f"output {reg.name} expects a single port")
                self.connect(val, sinks)
        if self._free:
            raise DanglingWire("unconsumed ports: " + ", ".join(str(p) for p in self._free))
        if self._open_sinks:
            raise DanglingWire("unconnected inputs: " + ", ".join(str(p) for p in self._open_sinks))
        self._finalized = True
        return ComputeGraph(Signature(self._signature_regs), tuple(self._nodes), tuple(self._wires))


@attrs.frozen
class ComputeGraph:
    """An immutable DAG of bloq instances joined by linear, typed wires."""

    signature: Signature
    nodes: tuple
    wires: tuple

    @functools.cached_property
    def _by_dst(self) -> dict[Port, Port]:
        return {w.dst: w.src for w in self.wires}

    def source_of(self, sink: Port) -> Port:
        return self._by_dst[sink]

    def topological_order(self) -> list[int]:
        """Node ids in dependency order; ties broken by construction order."""
        indeg = {i: 0 for i in range(len(self.nodes))}
        succ: dict[int, set[int]] = {i: set() for i in indeg}
        for w in self.wires:
            a, b = w.src.node, w.dst.node
            if a >= 0 and b >= 0 and b not in succ[a]:
                succ[a].add(b)
                indeg[b] += 1
        ready = [i for i, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            u = heapq.heappop(ready)
            order.append(u)
            for v in succ[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    heapq.heappush(ready, v)
        if len(order) != len(self.nodes):
            raise CycleError("compute graph contains a cycle")
        return order

    def callee_counts(self, include_bookkeeping: bool = False) -> Counter:
        return Counter(b for b in self.nodes if include_bookkeeping or not b.is_bookkeeping)

    def inputs_of(self, node: int) -> dict[str, Any]:
        """Source ports feeding each left register of ``node``."""
        bloq = self.nodes[node]
        out = {}
        for reg in bloq.signature.lefts():
            sinks = _port_array(reg, node, False)
            if reg.shape:
                arr = np.empty(sinks.shape, dtype=object)
                for idx in reg.indices():
                    arr[idx] = self._by_dst[sinks[idx]]
                out[reg.name] = arr
            else:
                out[reg.name] = self._by_dst[sinks]
        return out

    def output_sources(self) -> dict[str, Any]:
        """Source ports feeding each right register of the boundary."""
        out = {}
        for reg in self.signature.rights():
            sinks = _port_array(reg, RIGHT_BOUNDARY, False)
            if reg.shape:
                arr = np.empty(sinks.shape, dtype=object)
                for idx in reg.indices():
                    arr[idx] = self._by_dst[sinks[idx]]
                out[reg.name] = arr
            else:
                out[reg.name] = self._by_dst[sinks]
        return out

    def check_linearity(self) -> None:
        """Raise unless every port appears in exactly one wire with matching types."""
        seen_src: Counter = Counter(w.src for w in self.wires)
        seen_dst: Counter = Counter(w.dst for w in self.wires)
        for w in self.wires:
            if w.src.dtype != w.dst.dtype:
                raise DTypeMismatch(f"{w.src} -> {w.dst}")
        expected_src, expected_dst = [], []
        for reg in self.signature:
            if reg.side.is_left:
                expected_src.extend(_iter_ports(_port_array(reg, LEFT_BOUNDARY, True)))
            if reg.side.is_right:
                expected_dst.extend(_iter_ports(_port_array(reg, RIGHT_BOUNDARY, False)))
        for i, b in enumerate(self.nodes):
            for reg in b.signature:
                if reg.side.is_left:
                    expected_dst.extend(_iter_ports(_port_array(reg, i, False)))
                if reg.side.is_right:
                    expected_src.extend(_iter_ports(_port_array(reg, i, True)))
        for p in expected_src:
            if seen_src[p] != 1:
                raise DanglingWire(f"{p} used {seen_src[p]} times")
        for p in expected_dst:
            if seen_dst[p] != 1:
                raise DanglingWire(f"{p} used {seen_dst[p]} times")
        if len(expected_src) != len(self.wires) or len(expected_dst) != len(self.wires):
            raise DanglingWire("wire count does not match port count")

    def to_json(self) -> str:
        return json.dumps(graph_to_dict(self), sort_keys=True, indent=1)


# ---------------------------------------------------------------------------
# Serialization


def encode_value(v) -> Any:
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return {"frac": f"{v.numerator}/{v.denominator}"}
    if isinstance(v, float):
        return {"float": repr(v)}
    if isinstance(v, complex):
        return {"complex": [repr(v.real), repr(v.imag)]}
    if isinstance(v, SymExpr):
        return {"sym": to_text(v)}
    if isinstance(v, QDType):
        return {"dtype": str(v)}
    if isinstance(v, Bloq):
        return bloq_to_dict(v)
    if isinstance(v, enum.Enum):
        return {"enum": f"{type(v).__name__}.{v.name}"}
    if isinstance(v, (tuple, list)):
        return [encode_value(x) for x in v]
    if isinstance(v, np.ndarray):
        return [encode_value(x) for x in v.tolist()]
    if attrs.has(type(v)):
        return {"type": type(v).__name__,
                "attrs": {f.name: encode_value(getattr(v, f.name)) for f in attrs.fields(type(v))}}
    return {"repr": repr(v)}


def bloq_to_dict(b: Bloq) -> dict:
    return {"bloq": b.name, "attrs": {k: encode_value(v) for k, v in b.attributes().items()}}


def _port_to_dict(p: Port) -> dict:
    return {"node": p.node, "register": p.register, "index": list(p.index), "dtype": str(p.dtype)}


def graph_to_dict(g: ComputeGraph) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "signature": [
            {"name": r.name, "dtype": str(r.dtype), "shape": [encode_value(d) for d in r.shape],
             "side": r.side.value}
            for r in g.signature
        ],
        "nodes": [{"id": i, **bloq_to_dict(b)} for i, b in enumerate(g.nodes)],
        "wires": [{"src": _port_to_dict(w.src), "dst": _port_to_dict(w.dst)} for w in g.wires],
    }


__all__ = [
    "Allocate", "Bit", "Bloq", "ComputeGraph", "Free", "Fxp", "GraphBuilder", "Int", "Join",
    "MontgomeryUInt", "Port", "QDType", "Register", "Side", "Signature", "Split", "UInt",
    "Wire", "dtype_num_qubits", "graph_to_dict", "bloq_to_dict", "LEFT_BOUNDARY",
    "RIGHT_BOUNDARY", "Const",
]
