"""Quantum lookup tables: load classical data indexed by a selection register.

``QROM`` has a full unary-iteration decomposition. The select-swap variants
(``SelectSwapQROM``, ``QROAMClean``, ``QROAMCleanAdjoint``) are modelled at the
cost level: a classical action plus Toffoli counts as functions of the
number of entries N, total target width b and block size K = 2^k.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence, Union

import attrs
import numpy as np

from qre.errors import BadBlockExponent, BadSize, RangeError
from qre.gates import CNOT, CSwap, Toffoli, XGate
from qre.ir import Bit, Bloq, Register, Side, Signature, UInt
from qre.resources import GateCounts
from qre.symbolics import SymExpr, ceil, is_constant, evaluate_int, log2, simplify, sym
from qre.unary import UnaryIterator, _merge, count_tree, selection_bitsize, tree_callees

Size = Union[int, SymExpr]


class QROMVariant(enum.Enum):
    PLAIN = "QROM"
    SELECT_SWAP = "SelectSwapQROM"
    QROAM_CLEAN = "QROAMClean"
    QROAM_CLEAN_ADJOINT = "QROAMCleanAdjoint"


def _concrete(x) -> int | None:
    if isinstance(x, SymExpr):
        return evaluate_int(x) if is_constant(x) else None
    return int(x)


def _check(variant: QROMVariant, n: Size, k: Size) -> None:
    nn, kk = _concrete(n), _concrete(k)
    if nn is not None and nn < 2:
        raise BadSize(f"a lookup table needs at least 2 entries, got {nn}")
    if kk is None:
        return
    if variant is QROMVariant.PLAIN and kk != 0:
        raise BadBlockExponent("the plain QROM has no block size")
    if kk < 0 or (nn is not None and kk > math.ceil(math.log2(nn))):
        raise BadBlockExponent(f"block exponent {kk} outside [0, ceil(log2 {nn})]")


def qrom_toffoli(variant: QROMVariant, n: Size, b: Size, k: Size = 0) -> SymExpr:
    """Toffoli count of loading N entries of b bits with block size 2^k (uncontrolled)."""
    _check(variant, n, k)
    n, b, big_k = sym(n), sym(b), 2 ** sym(k)
    blocks = ceil(n / big_k)
    if variant is QROMVariant.PLAIN:
        return simplify(n - 2)
    if variant is QROMVariant.SELECT_SWAP:
        return simplify(2 * blocks + 4 * b * (big_k - 1))
    if variant is QROMVariant.QROAM_CLEAN:
        return simplify(blocks + b * (big_k - 1))
    return simplify(blocks + (big_k - 1))


def qrom_clifford(variant: QROMVariant, n: Size, b: Size) -> SymExpr:
    """Leading-order Clifford count; the select-swap variants carry O(sqrt N) slack."""
    n, b = sym(n), sym(b)
    return simplify({
        QROMVariant.PLAIN: n * b,
        QROMVariant.SELECT_SWAP: 2 * n * b,
        QROMVariant.QROAM_CLEAN: n * b,
        QROMVariant.QROAM_CLEAN_ADJOINT: n,
    }[variant])


def qrom_ancilla(variant: QROMVariant, n: Size, b: Size, k: Size = 0) -> dict[str, SymExpr]:
    """Clean and dirty ancilla requirements."""
    _check(variant, n, k)
    n, b, big_k = sym(n), sym(b), 2 ** sym(k)
    sel = ceil(log2(n / big_k))
    if variant is QROMVariant.PLAIN:
        return {"clean": simplify(ceil(log2(n))), "dirty": sym(0)}
    if variant is QROMVariant.SELECT_SWAP:
        return {"clean": simplify(sel), "dirty": simplify(big_k * b)}
    if variant is QROMVariant.QROAM_CLEAN:
        return {"clean": simplify((big_k - 1) * b + sel), "dirty": sym(0)}
    return {"clean": simplify(big_k + sel), "dirty": sym(0)}


@attrs.frozen
class QROMCost:
    counts: GateCounts
    ancilla: dict
    clifford_approximate: bool


def qrom_cost(variant: QROMVariant, n: Size, b: Size, k: Size = 0) -> QROMCost:
    counts = GateCounts(toffoli=qrom_toffoli(variant, n, b, k), clifford=qrom_clifford(variant, n, b))
    return QROMCost(counts, qrom_ancilla(variant, n, b, k), variant is not QROMVariant.PLAIN)


def optimal_block_exponent(variant: QROMVariant, n: int, b: int) -> int:
    """Block exponent minimizing the Toffoli count (smallest k on ties)."""
    if variant is QROMVariant.PLAIN:
        return 0
    best = min(range(0, math.ceil(math.log2(n)) + 1),
               key=lambda k: (evaluate_int(qrom_toffoli(variant, n, b, k)), k))
    return best


# ---------------------------------------------------------------------------
# Data handling


def _dataset(d) -> tuple:
    arr = np.asarray(d, dtype=object)
    if arr.ndim == 0:
        raise BadSize("a dataset must be an array")
    flat = []
    for x in arr.flat:
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)) or x < 0:
            raise BadSize(f"lookup data must be non-negative integers, got {x!r}")
        flat.append(int(x))
    return (arr.shape, tuple(flat))


def _datasets_and_sizes(data, target_bitsizes):
    sets = tuple(_dataset(d) for d in data)
    if not sets:
        raise BadSize("need at least one dataset")
    shape = sets[0][0]
    for s, _ in sets:
        if s != shape:
            raise BadSize("all datasets must share a shape")
    if target_bitsizes is None:
        target_bitsizes = tuple(max(1, max(flat).bit_length()) for _, flat in sets)
    target_bitsizes = tuple(int(b) for b in target_bitsizes)
    if len(target_bitsizes) != len(sets):
        raise BadSize("one target bitsize per dataset")
    for (_, flat), b in zip(sets, target_bitsizes):
        if max(flat) >= 2**b:
            raise BadSize(f"value {max(flat)} does not fit in {b} bits")
    return sets, target_bitsizes


class _LookupBase(Bloq):
    """Shared interface: datasets, selection registers and a classical lookup."""

    @property
    def shape(self) -> tuple:
        return self.data[0][0]

    @property
    def n_entries(self) -> int:
        return int(np.prod(self.shape))

    @property
    def total_bitsize(self) -> int:
        return sum(self.target_bitsizes)

    def value(self, which: int, idx: tuple) -> int:
        shape, flat = self.data[which]
        return flat[int(np.ravel_multi_index(idx, shape))]

    def values_at(self, idx: tuple) -> tuple:
        return tuple(self.value(i, idx) for i in range(len(self.data)))

    @property
    def selection_registers(self) -> list[Register]:
        return [Register(f"selection{i}" if len(self.shape) > 1 else "selection",
                         UInt(selection_bitsize(n))) for i, n in enumerate(self.shape)]

    def target_registers(self, side: Side = Side.THRU) -> list[Register]:
        return [Register(f"target{i}", UInt(b), side=side) for i, b in enumerate(self.target_bitsizes)]

    def _index(self, vals) -> tuple | None:
        idx = tuple(vals[r.name] for r in self.selection_registers)
        if any(i >= n for i, n in zip(idx, self.shape)):
            return None
        return idx


def _build_lookup(cls, data, target_bitsizes, **kw):
    sets, sizes = _datasets_and_sizes(data, target_bitsizes)
    return cls(sets, sizes, **kw)


@attrs.frozen
class QROM(_LookupBase):
    """target_i ^= data_i[selection], built from unary iteration; N - 2 Toffolis uncontrolled."""

    data: tuple
    target_bitsizes: tuple
    is_controlled: bool = False
    variable_spacing: bool = False

    @classmethod
    def build(cls, *data, target_bitsizes: Sequence[int] | None = None, **kw) -> "QROM":
        return _build_lookup(cls, data, target_bitsizes, **kw)

    @property
    def signature(self):
        regs = [Register("ctrl", Bit())] if self.is_controlled else []
        return Signature(regs + self.selection_registers + self.target_registers())

    def on_classical_vals(self, **vals):
        idx = self._index(vals)
        if idx is None or vals.get("ctrl", 1) != 1:
            return dict(vals)
        out = dict(vals)
        for i, reg in enumerate(self.target_registers()):
            out[reg.name] = vals[reg.name] ^ self.value(i, idx)
        return out

    def _key(self):
        return self.values_at if self.variable_spacing else None

    def build_composite(self, bb, **ports):
        sel_regs = self.selection_registers
        sel_bits = [bb.split(ports[r.name])
                    for r in sel_regs]
        tregs = self.target_registers()
        tbits = [list(bb.split(ports[r.name]))
                 for r in tregs]
        it = UnaryIterator(bb, sel_bits, self.shape, ports.get("ctrl"), self._key())

        def leaf(ctrl, idx):
            for i, b in enumerate(self.target_bitsizes):
                v = self.value(i, idx)
                for j in range(b):
                    if not (v >> (b - 1 - j)) & 1:
                        continue
                    if ctrl is None:
                        tbits[i][j] = bb.add(XGate(), q=tbits[i][j])
                    else:
                        ctrl.port, tbits[i][j] = bb.add(CNOT(), ctrl=ctrl.port, target=tbits[i][j])

        it.run(leaf)
        out = {}
        if it.ctrl is not None:
            out["ctrl"] = it.ctrl.port
        for r, bits in zip(sel_regs, it.sel_ports()):
            out[r.name] = bb.join(bits)
        for r, bits in zip(tregs, tbits):
            out[r.name] = bb.join(bits)
        return out

    def declared_callees(self):
        n_ctrl, n_root, leaves = count_tree(
            self.shape, [r.dtype.num_qubits for r in self.selection_registers], self.is_controlled, self._key())
        cnots = xs = 0
        for has_ctrl, idx in leaves:
            ones = sum(bin(v).count("1") for v in self.values_at(idx))
            if has_ctrl:
                cnots += ones
            else:
                xs += ones
        return _merge(tree_callees(n_ctrl, n_root), {CNOT(): cnots, XGate(): xs})

    def adjoint(self):
        return self

    def __str__(self):
        return f"QROM(N={self.n_entries}, b={self.target_bitsizes})"


@attrs.frozen
class _BlockedLookup(_LookupBase):
    data: tuple
    target_bitsizes: tuple
    block_exponent: int = 0

    variant = QROMVariant.SELECT_SWAP

    def __attrs_post_init__(self):
        _check(self.variant, self.n_entries, self.block_exponent)

    @classmethod
    def build(cls, *data, target_bitsizes=None, block_exponent: int | None = None):
        """Blocked lookup over ``data``; the block exponent defaults to the Toffoli optimum."""
        sets, sizes = _datasets_and_sizes(data, target_bitsizes)
        if block_exponent is None:
            n = int(np.prod(sets[0][0]))
            block_exponent = optimal_block_exponent(cls.variant, n, sum(sizes))
        return cls(sets, sizes, block_exponent)

    def ancilla(self) -> dict:
        return qrom_ancilla(self.variant, self.n_entries, self.total_bitsize, self.block_exponent)

    def _cliffords(self) -> int:
        return evaluate_int(qrom_clifford(self.variant, self.n_entries, self.total_bitsize))

    def __str__(self):
        return f"{self.name}(N={self.n_entries}, b={self.target_bitsizes}, k={self.block_exponent})"


@attrs.frozen
class SelectSwapQROM(_BlockedLookup):
    """Select-swap lookup into dirty ancillas: 2 ceil(N/K) + 4 b (K - 1) Toffolis."""

    variant = QROMVariant.SELECT_SWAP

    @property
    def signature(self):
        return Signature(self.selection_registers + self.target_registers())

    def on_classical_vals(self, **vals):
        idx = self._index(vals)
        out = dict(vals)
        if idx is not None:
            for i, reg in enumerate(self.target_registers()):
                out[reg.name] = vals[reg.name] ^ self.value(i, idx)
        return out

    def declared_callees(self):
        n, b, big_k = self.n_entries, self.total_bitsize, 2**self.block_exponent
        return {Toffoli(): 2 * math.ceil(n / big_k), CSwap(): 4 * b * (big_k - 1), CNOT(): self._cliffords()}

    def adjoint(self):
        return self


@attrs.frozen
class QROAMClean(_BlockedLookup):
    """Lookup into fresh clean targets: ceil(N/K) + b (K - 1) Toffolis."""

    variant = QROMVariant.QROAM_CLEAN

    @property
    def signature(self):
        return Signature(self.selection_registers + self.target_registers(Side.RIGHT))

    def on_classical_vals(self, **vals):
        idx = self._index(vals)
        if idx is None:
            raise RangeError(f"selection {vals} outside the table")
        out = dict(vals)
        for i, reg in enumerate(self.target_registers()):
            out[reg.name] = self.value(i, idx)
        return out

    def declared_callees(self):
        n, b, big_k = self.n_entries, self.total_bitsize, 2**self.block_exponent
        return {Toffoli(): math.ceil(n / big_k), CSwap(): b * (big_k - 1), CNOT(): self._cliffords()}

    def adjoint(self):
        return QROAMCleanAdjoint(self.data, self.target_bitsizes, self.block_exponent)


@attrs.frozen
class QROAMCleanAdjoint(_BlockedLookup):
    """Measurement-based erasure of looked-up data: ceil(N/K) + (K - 1) Toffolis."""

    variant = QROMVariant.QROAM_CLEAN_ADJOINT

    @property
    def signature(self):
        return Signature(self.selection_registers + self.target_registers(Side.LEFT))

    def on_classical_vals(self, **vals):
        idx = self._index(vals)
        if idx is None:
            raise RangeError(f"selection {vals} outside the table")
        for i, reg in enumerate(self.target_registers()):
            if vals[reg.name] != self.value(i, idx):
                raise RangeError(f"{reg.name} holds {vals[reg.name]}, expected {self.value(i, idx)}")
        return {r.name: vals[r.name] for r in self.selection_registers}

    def declared_callees(self):
        n, big_k = self.n_entries, 2**self.block_exponent
        return {Toffoli(): math.ceil(n / big_k) + big_k - 1, CNOT(): self._cliffords()}

    def adjoint(self):
        return QROAMClean(self.data, self.target_bitsizes, self.block_exponent)


@attrs.frozen
class SymbolicLookup(Bloq):
    """A lookup of ``n_entries`` items of ``bitsize`` bits known only by its sizes."""

    variant: QROMVariant
    n_entries: Size
    bitsize: Size
    block_exponent: Size = 0

    @property
    def signature(self):
        sel = simplify(ceil(log2(sym(self.n_entries))))
        side = {QROMVariant.QROAM_CLEAN: Side.RIGHT, QROMVariant.QROAM_CLEAN_ADJOINT: Side.LEFT}.get(
            self.variant, Side.THRU)
        return Signature([Register("selection", UInt(sel if not is_constant(sel) else max(1, evaluate_int(sel)))),
                          Register("target0", UInt(self.bitsize), side=side)])

    def leaf_counts(self):
        return qrom_cost(self.variant, self.n_entries, self.bitsize, self.block_exponent).counts

    def __str__(self):
        return f"{self.variant.value}(N={self.n_entries}, b={self.bitsize}, k={self.block_exponent})"
