"""Unary iteration: coherent for-loops over a selection register.

The iteration is a segment tree over the selection value, walked most
significant bit first. Each branching node computes ``ctrl AND NOT bit`` into a
fresh ancilla with one Toffoli, visits the left half, flips the ancilla to
``ctrl AND bit`` with a CNOT, visits the right half, and erases the ancilla by
measurement. Without an outer control the root branches on the selection bit
itself, saving one Toffoli. Selection values are assumed to be in range.
"""

from __future__ import annotations

import itertools
import math
from typing import Any, Callable, Hashable, Sequence, Union

import attrs
import numpy as np

from qre.errors import BadL, SignatureMismatch
from qre.gates import CNOT, AndUncompute, Controlled, Toffoli, XGate
from qre.ir import Bit, Bloq, Register, Signature, UInt
from qre.resources import GateCounts
from qre.symbolics import SymExpr, ceil, log2, simplify, smin, sym


def selection_bitsize(n: int) -> int:
    """Width of a selection register indexing ``n`` items (at least one bit)."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def unary_iteration_cost(L: Union[int, SymExpr], S: Union[int, SymExpr, None] = None,
                         sparsity: Union[int, SymExpr, None] = None) -> GateCounts:
    """Toffoli cost of a controlled unary iteration over L items.

    With ``sparsity`` (the number of selected items out of 2^S) the cost is
    min(2^S - 1, S * sparsity).
    """
    if not isinstance(L, SymExpr) and L < 2:
        raise BadL(f"unary iteration needs L >= 2, got {L}")
    if sparsity is None:
        return GateCounts(toffoli=sym(L) - 1)
    if S is None:
        S = simplify(ceil(log2(sym(L))))
    return GateCounts(toffoli=simplify(smin(2 ** sym(S) - 1, sym(S) * sym(sparsity))))


class _Slot:
    """Mutable holder for a port that is threaded through many gates."""

    __slots__ = ("port",)

    def __init__(self, port):
        self.port = port


def _subtree_uniform(key: Callable[[tuple], Hashable], shape: tuple, prefix: tuple, lo: int, hi: int) -> bool:
    d = len(prefix)
    rest = [range(n) for n in shape[d + 1:]]
    first = None
    for i in range(lo, hi):
        for tail in itertools.product(*rest):
            k = key(prefix + (i,) + tail)
            if first is None:
                first = (k,)
            elif k != first[0]:
                return False
    return True


class UnaryIterator:
    """Emit a unary-iteration tree into a ``GraphBuilder``.

    ``leaf(ctrl, index)`` is called once per selected index (or merged block)
    with ``ctrl`` a ``_Slot`` holding the control qubit, or None when the
    operation is unconditional. ``key`` enables merging of subtrees whose
    leaves all share the same key.
    """

    def __init__(self, bb, sel_bits: Sequence[Sequence], shape: tuple, ctrl=None,
                 key: Callable[[tuple], Hashable] | None = None):
        self.bb = bb
        self.sel = [[_Slot(p) for p in bits] for bits in sel_bits]
        self.shape = tuple(shape)
        self.ctrl = _Slot(ctrl) if ctrl is not None else None
        self.key = key

    def run(self, leaf: Callable[[Any, tuple], None]):
        self._dim(0, (), self.ctrl, leaf)

    def sel_ports(self):
        return [[s.port for s in bits] for bits in self.sel]

    def _dim(self, d, prefix, ctrl, leaf):
        self._node(d, 0, 0, self.shape[d], ctrl, prefix, leaf)

    def _visit_leaf(self, d, i, ctrl, prefix, leaf):
        if d + 1 < len(self.shape):
            self._dim(d + 1, prefix + (i,), ctrl, leaf)
        else:
            leaf(ctrl, prefix + (i,))

    def _node(self, d, depth, lo, hi, ctrl, prefix, leaf):
        bb = self.bb
        if hi - lo == 1:
            return self._visit_leaf(d, lo, ctrl, prefix, leaf)
        if self.key is not None and _subtree_uniform(self.key, self.shape, prefix, lo, hi):
            idx = prefix + (lo,) + (0,) * (len(self.shape) - d - 1)
            return leaf(ctrl, idx)
        nbits = len(self.sel[d])
        mid = lo + 2 ** (nbits - 1 - depth)
        if hi <= mid:
            return self._node(d, depth + 1, lo, hi, ctrl, prefix, leaf)
        bit = self.sel[d][depth]
        if ctrl is None:
            bit.port = bb.add(XGate(), q=bit.port)
            self._node(d, depth + 1, lo, mid, bit, prefix, leaf)
            bit.port = bb.add(XGate(), q=bit.port)
            self._node(d, depth + 1, mid, hi, bit, prefix, leaf)
            return
        anc = bb.allocate(1)
        bit.port = bb.add(XGate(), q=bit.port)
        (ctrl.port, bit.port), anc = bb.add(Toffoli(), ctrl=np.array([ctrl.port, bit.port]), target=anc)
        bit.port = bb.add(XGate(), q=bit.port)
        anc_slot = _Slot(anc)
        self._node(d, depth + 1, lo, mid, anc_slot, prefix, leaf)
        ctrl.port, anc_slot.port = bb.add(CNOT(), ctrl=ctrl.port, target=anc_slot.port)
        self._node(d, depth + 1, mid, hi, anc_slot, prefix, leaf)
        (ctrl.port, bit.port) = bb.add(AndUncompute(), ctrl=np.array([ctrl.port, bit.port]), target=anc_slot.port)


def count_tree(shape: tuple, sel_bitsizes: Sequence[int], controlled: bool,
               key: Callable[[tuple], Hashable] | None = None) -> tuple[int, int, list]:
    """Count the iteration tree without building it.

    Returns (controlled branchings, uncontrolled branchings, leaves) where
    leaves is a list of (has_control, index).
    """
    leaves: list = []
    counts = [0, 0]

    def node(d, depth, lo, hi, has_ctrl, prefix):
        if hi - lo == 1:
            if d + 1 < len(shape):
                return node(d + 1, 0, 0, shape[d + 1], has_ctrl, prefix + (lo,))
            leaves.append((has_ctrl, prefix + (lo,)))
            return
        if key is not None and _subtree_uniform(key, shape, prefix, lo, hi):
            leaves.append((has_ctrl, prefix + (lo,) + (0,) * (len(shape) - d - 1)))
            return
        mid = lo + 2 ** (sel_bitsizes[d] - 1 - depth)
        if hi <= mid:
            return node(d, depth + 1, lo, hi, has_ctrl, prefix)
        counts[0 if has_ctrl else 1] += 1
        node(d, depth + 1, lo, mid, True, prefix)
        node(d, depth + 1, mid, hi, True, prefix)

    node(0, 0, 0, shape[0], controlled, ())
    return counts[0], counts[1], leaves


def tree_callees(n_ctrl: int, n_root: int) -> dict:
    """Gates spent on the branching nodes of an iteration tree."""
    out = {XGate(): 2 * (n_ctrl + n_root), Toffoli(): n_ctrl, CNOT(): n_ctrl, AndUncompute(): n_ctrl}
    return {b: m for b, m in out.items() if m}


def _merge(*dicts) -> dict:
    out: dict = {}
    for d in dicts:
        for k, v in d.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def _as_bloq_array(bloqs) -> np.ndarray:
    arr = np.empty(np.shape(bloqs) if not isinstance(bloqs, np.ndarray) else bloqs.shape, dtype=object)
    src = np.asarray(bloqs, dtype=object)
    if src.shape != arr.shape:
        # nested python lists of attrs objects can confuse numpy's shape inference
        raise SignatureMismatch("bloq array must be rectangular")
    for idx in np.ndindex(arr.shape):
        arr[idx] = src[idx]
    return arr


def _freeze(arr: np.ndarray) -> tuple:
    return (arr.shape, tuple(arr.flat))


@attrs.frozen
class ApplyLthBloq(Bloq):
    """Apply ``bloqs[l]`` to the target registers when the selection equals l.

    ``bloqs`` may be multidimensional, giving one selection register per axis
    (nested loops). With ``variable_spacing`` subtrees whose bloqs are all
    identical are applied once.
    """

    bloqs: tuple  # (shape, flat tuple of bloqs)
    is_controlled: bool = False
    variable_spacing: bool = True

    def __attrs_post_init__(self):
        shape, flat = self.bloqs
        sig0 = flat[0].signature
        for b in flat[1:]:
            if b.signature != sig0:
                raise SignatureMismatch(f"{b} has a different signature from {flat[0]}")
        for r in sig0:
            if r.name == "ctrl" or r.name.startswith("selection"):
                raise SignatureMismatch(f"target register name {r.name} is reserved")

    @property
    def shape(self) -> tuple:
        return self.bloqs[0]

    def bloq_at(self, idx: tuple) -> Bloq:
        shape, flat = self.bloqs
        return flat[int(np.ravel_multi_index(idx, shape))]

    @property
    def selection_registers(self) -> list[Register]:
        return [Register(f"selection{i}" if len(self.shape) > 1 else "selection",
                         UInt(selection_bitsize(n))) for i, n in enumerate(self.shape)]

    @property
    def target_signature(self) -> Signature:
        return self.bloqs[1][0].signature

    @property
    def signature(self):
        regs = [Register("ctrl", Bit())] if self.is_controlled else []
        return Signature(regs + self.selection_registers + list(self.target_signature))

    def on_classical_vals(self, **vals):
        from qre.classical_sim import call_classically

        idx = tuple(vals[r.name] for r in self.selection_registers)
        active = vals.get("ctrl", 1) == 1 and all(i < n for i, n in zip(idx, self.shape))
        if active:
            targets = {r.name: vals[r.name] for r in self.target_signature}
            vals = {**vals, **call_classically(self.bloq_at(idx), targets)}
        return vals

    def build_composite(self, bb, **ports):
        sel_regs = self.selection_registers
        sel_bits = [bb.split(ports[r.name])
                    for r in sel_regs]
        targets = {r.name: ports[r.name] for r in self.target_signature}
        key = self.bloq_at if self.variable_spacing else None
        it = UnaryIterator(bb, sel_bits, self.shape, ports.get("ctrl"), key)

        def leaf(ctrl, idx):
            b = self.bloq_at(idx)
            if ctrl is None:
                targets.update(bb.add_d(b, **targets))
            else:
                outs = bb.add_d(Controlled(b), ctrl=ctrl.port, **targets)
                ctrl.port = outs.pop("ctrl")
                targets.update(outs)

        it.run(leaf)
        out = dict(targets)
        for r, bits in zip(sel_regs, it.sel_ports()):
            out[r.name] = bb.join(bits)
        if it.ctrl is not None:
            out["ctrl"] = it.ctrl.port
        return out

    def declared_callees(self):
        key = self.bloq_at if self.variable_spacing else None
        n_ctrl, n_root, leaves = count_tree(
            self.shape, [r.dtype.num_qubits for r in self.selection_registers], self.is_controlled, key)
        leaf_calls: dict = {}
        for has_ctrl, idx in leaves:
            b = self.bloq_at(idx)
            b = Controlled(b) if has_ctrl else b
            leaf_calls[b] = leaf_calls.get(b, 0) + 1
        return _merge(tree_callees(n_ctrl, n_root), leaf_calls)

    def __str__(self):
        return f"ApplyLthBloq(shape={self.shape}{', ctrl' if self.is_controlled else ''})"


def apply_lth_bloq(bloqs, *, is_controlled: bool = False, variable_spacing: bool = True) -> Bloq:
    """Multiplexer over an array of bloqs sharing one target signature.

    A single-element array returns that bloq unchanged.
    """
    arr = _as_bloq_array(bloqs)
    if arr.size == 0:
        raise BadL("need at least one bloq")
    if arr.size == 1 and not is_controlled:
        return arr.flat[0]
    return ApplyLthBloq(_freeze(arr), is_controlled, variable_spacing)
