"""Primitive gates and generic wrappers (controlled, adjoint, explicit matrices)."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Union

import attrs
import numpy as np

from qre.errors import RangeError
from qre.ir import Bit, Bloq, Register, Side, Signature, UInt
from qre.resources import GateCounts, get_callees
from qre.symbolics import SymExpr, is_constant, evaluate, sym

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _perm_matrix(n_qubits: int, fn) -> np.ndarray:
    dim = 2**n_qubits
    m = np.zeros((dim, dim))
    for i in range(dim):
        m[fn(i), i] = 1
    return m


@attrs.frozen
class XGate(Bloq):
    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def on_classical_vals(self, q):
        return {"q": 1 - q}

    def my_tensor(self):
        return _X

    def leaf_counts(self):
        return GateCounts(clifford=1)

    def adjoint(self):
        return self


@attrs.frozen
class ZGate(Bloq):
    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def my_tensor(self):
        return _Z

    def leaf_counts(self):
        return GateCounts(clifford=1)

    def adjoint(self):
        return self


@attrs.frozen
class SGate(Bloq):
    is_adjoint: bool = False

    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def my_tensor(self):
        return np.diag([1, -1j if self.is_adjoint else 1j])

    def leaf_counts(self):
        return GateCounts(clifford=1)

    def adjoint(self):
        return SGate(not self.is_adjoint)


@attrs.frozen
class Hadamard(Bloq):
    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def my_tensor(self):
        return _H

    def leaf_counts(self):
        return GateCounts(clifford=1)

    def adjoint(self):
        return self


@attrs.frozen
class TGate(Bloq):
    is_adjoint: bool = False

    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def my_tensor(self):
        return np.diag([1, cmath.exp((-1 if self.is_adjoint else 1) * 1j * math.pi / 4)])

    def leaf_counts(self):
        return GateCounts(t=1)

    def adjoint(self):
        return TGate(not self.is_adjoint)


@attrs.frozen
class CNOT(Bloq):
    @property
    def signature(self):
        return Signature([Register("ctrl", Bit()), Register("target", Bit())])

    def on_classical_vals(self, ctrl, target):
        return {"ctrl": ctrl, "target": target ^ ctrl}

    def my_tensor(self):
        return _perm_matrix(2, lambda i: i ^ ((i >> 1) & 1))

    def leaf_counts(self):
        return GateCounts(clifford=1)

    def adjoint(self):
        return self


@attrs.frozen
class CZ(Bloq):
    @property
    def signature(self):
        return Signature([Register("q1", Bit()), Register("q2", Bit())])

    def my_tensor(self):
        return np.diag([1, 1, 1, -1]).astype(complex)

    def leaf_counts(self):
        return GateCounts(clifford=1)

    def adjoint(self):
        return self


@attrs.frozen
class Swap(Bloq):
    """Swap two single qubits."""

    @property
    def signature(self):
        return Signature([Register("x", Bit()), Register("y", Bit())])

    def on_classical_vals(self, x, y):
        return {"x": y, "y": x}

    def my_tensor(self):
        return _perm_matrix(2, lambda i: ((i & 1) << 1) | (i >> 1))

    def leaf_counts(self):
        return GateCounts(clifford=1)

    def adjoint(self):
        return self


@attrs.frozen
class Toffoli(Bloq):
    @property
    def signature(self):
        return Signature([Register("ctrl", Bit(), shape=(2,)), Register("target", Bit())])

    def on_classical_vals(self, ctrl, target):
        return {"ctrl": ctrl, "target": target ^ (int(ctrl[0]) & int(ctrl[1]))}

    def my_tensor(self):
        return _perm_matrix(3, lambda i: i ^ (1 if (i >> 1) == 3 else 0))

    def leaf_counts(self):
        return GateCounts(toffoli=1)

    def adjoint(self):
        return self


@attrs.frozen
class CSwap(Bloq):
    """Controlled swap of two qubits; costed as one Toffoli."""

    @property
    def signature(self):
        return Signature([Register("ctrl", Bit()), Register("x", Bit()), Register("y", Bit())])

    def on_classical_vals(self, ctrl, x, y):
        return {"ctrl": ctrl, "x": y, "y": x} if ctrl else {"ctrl": ctrl, "x": x, "y": y}

    def my_tensor(self):
        def f(i):
            c, x, y = (i >> 2) & 1, (i >> 1) & 1, i & 1
            return (c << 2) | (y << 1) | x if c else i

        return _perm_matrix(3, f)

    def leaf_counts(self):
        return GateCounts(toffoli=1)

    def adjoint(self):
        return self


@attrs.frozen
class MultiCToffoli(Bloq):
    """X on ``target`` controlled by all ``n`` control bits; n - 1 Toffolis."""

    n: Union[int, SymExpr]

    @property
    def signature(self):
        return Signature([Register("ctrl", Bit(), shape=(self.n,)), Register("target", Bit())])

    def on_classical_vals(self, ctrl, target):
        return {"ctrl": ctrl, "target": target ^ int(all(int(c) for c in ctrl))}

    def leaf_counts(self):
        if self.n == 1:
            return GateCounts(clifford=1)
        return GateCounts(toffoli=sym(self.n) - 1)

    def adjoint(self):
        return self


@attrs.frozen
class Measure(Bloq):
    """Computational-basis measurement, leaving the qubit in the observed state."""

    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def on_classical_vals(self, q):
        return {"q": q}

    def leaf_counts(self):
        return GateCounts(measurement=1)


def _as_fraction(x) -> Fraction | None:
    if isinstance(x, SymExpr):
        if not is_constant(x):
            return None
        x = evaluate(x)
    if isinstance(x, float):
        f = Fraction(x).limit_denominator(1 << 20)
        return f if abs(float(f) - x) < 1e-12 else None
    return Fraction(x)


@attrs.frozen
class ZPowGate(Bloq):
    """diag(1, e^{i pi t}), synthesized to precision ``eps`` when not Clifford+T."""

    exponent: Union[float, Fraction, SymExpr]
    eps: Union[float, Fraction, SymExpr] = 1e-11

    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def my_tensor(self):
        return np.diag([1, cmath.exp(1j * math.pi * float(self.exponent))])

    def leaf_counts(self):
        t = _as_fraction(self.exponent)
        if t is not None:
            t = t % 2
            if t == 0:
                return GateCounts()
            if t.denominator <= 2:
                return GateCounts(clifford=1)
            if t.denominator == 4:
                return GateCounts(t=1, clifford=0 if t in (Fraction(1, 4), Fraction(7, 4)) else 1)
        return GateCounts(rotations=[(self.eps, 1)])

    def adjoint(self):
        return ZPowGate(-self.exponent, self.eps)

    def controlled_callees(self):
        half = self.exponent / 2
        return {ZPowGate(half, self.eps / 3): 2, ZPowGate(-half, self.eps / 3): 1, CNOT(): 2}


@attrs.frozen
class Rz(Bloq):
    """diag(e^{-i theta/2}, e^{i theta/2})."""

    angle: Union[float, SymExpr]
    eps: Union[float, Fraction, SymExpr] = 1e-11

    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def my_tensor(self):
        a = float(self.angle)
        return np.diag([cmath.exp(-0.5j * a), cmath.exp(0.5j * a)])

    def leaf_counts(self):
        return GateCounts(rotations=[(self.eps, 1)])

    def adjoint(self):
        return Rz(-self.angle, self.eps)

    def controlled_callees(self):
        return {Rz(self.angle / 2, self.eps / 2): 1, Rz(-self.angle / 2, self.eps / 2): 1, CNOT(): 2}


@attrs.frozen
class GlobalPhase(Bloq):
    """Multiply by e^{i pi t}; acts on no qubits."""

    exponent: float

    @property
    def signature(self):
        return Signature([])

    def my_tensor(self):
        return np.array([[cmath.exp(1j * math.pi * float(self.exponent))]])

    def leaf_counts(self):
        return GateCounts()

    def adjoint(self):
        return GlobalPhase(-self.exponent)

    def controlled_callees(self):
        return {ZPowGate(self.exponent): 1}


@attrs.frozen
class PlusState(Bloq):
    @property
    def signature(self):
        return Signature([Register("q", Bit(), side=Side.RIGHT)])

    def my_tensor(self):
        return np.array([[1], [1]]) / math.sqrt(2)

    def leaf_counts(self):
        return GateCounts(clifford=1)


@attrs.frozen
class IntState(Bloq):
    """Prepare the basis state ``val`` in a fresh register."""

    val: int
    bitsize: int

    @property
    def signature(self):
        return Signature([Register("reg", UInt(self.bitsize), side=Side.RIGHT)])

    def on_classical_vals(self):
        return {"reg": self.val}

    def my_tensor(self):
        v = np.zeros((2**self.bitsize, 1))
        v[self.val, 0] = 1
        return v

    def leaf_counts(self):
        return GateCounts(clifford=bin(self.val).count("1"))


@attrs.frozen
class XorK(Bloq):
    """x ^= k on an n-bit register (X gates on the set bits of k)."""

    k: int
    bitsize: int

    @property
    def signature(self):
        return Signature([Register("x", UInt(self.bitsize))])

    def on_classical_vals(self, x):
        return {"x": x ^ self.k}

    def leaf_counts(self):
        return GateCounts(clifford=bin(self.k).count("1"))

    def controlled_callees(self):
        return {CNOT(): bin(self.k).count("1")}

    def adjoint(self):
        return self


@attrs.frozen
class Identity(Bloq):
    """Does nothing; its decomposition is empty."""

    bitsize: int = 1

    @property
    def signature(self):
        return Signature([Register("q", Bit() if self.bitsize == 1 else UInt(self.bitsize))])

    def build_composite(self, bb, q):
        return {"q": q}

    def on_classical_vals(self, q):
        return {"q": q}

    def adjoint(self):
        return self


def _freeze_matrix(m) -> tuple:
    m = np.asarray(m, dtype=complex)
    return tuple(tuple(complex(x) for x in row) for row in m)


@attrs.frozen
class MatrixGate(Bloq):
    """An explicit unitary on a ``bitsize``-qubit register (MSB first)."""

    matrix: tuple = attrs.field(converter=_freeze_matrix)
    label: str = "U"

    @property
    def bitsize(self) -> int:
        return int(round(math.log2(len(self.matrix))))

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("q", Bit() if n == 1 else UInt(n))])

    @property
    def name(self):
        return self.label

    def my_tensor(self):
        return np.array(self.matrix, dtype=complex)

    def adjoint(self):
        return MatrixGate(np.array(self.matrix).conj().T, self.label + "†")

    def __str__(self):
        return f"{self.label}[{self.bitsize}q]"


# ---------------------------------------------------------------------------
# Wrappers


def _controlled_primitive(sub: Bloq, ctrl_state: int):
    if ctrl_state != 1:
        return None
    table = {XGate(): CNOT(), ZGate(): CZ(), CNOT(): Toffoli(), Swap(): CSwap()}
    return table.get(sub)


@attrs.frozen
class Controlled(Bloq):
    """Apply ``subbloq`` when the control qubit equals ``ctrl_state``."""

    subbloq: Bloq
    ctrl_state: int = 1

    @property
    def signature(self):
        for r in self.subbloq.signature:
            if r.side is not Side.THRU:
                raise ValueError(f"cannot control {self.subbloq}: register {r.name} is not Thru")
        return Signature([Register("ctrl", Bit())] + list(self.subbloq.signature))

    @property
    def name(self):
        return f"C[{self.subbloq.name}]"

    def __str__(self):
        pre = "C" if self.ctrl_state else "C0"
        return f"{pre}[{self.subbloq}]"

    def on_classical_vals(self, ctrl, **vals):
        from qre.classical_sim import call_classically

        if ctrl == self.ctrl_state:
            vals = call_classically(self.subbloq, vals)
        return {"ctrl": ctrl, **vals}

    def my_tensor(self):
        from qre.tensor_sim import tensor_of

        u = tensor_of(self.subbloq)
        eye = np.eye(u.shape[0], dtype=complex)
        blocks = [u, eye] if self.ctrl_state == 0 else [eye, u]
        out = np.zeros((2 * u.shape[0],) * 2, dtype=complex)
        out[: u.shape[0], : u.shape[0]] = blocks[0]
        out[u.shape[0]:, u.shape[0]:] = blocks[1]
        return out

    def leaf_counts(self):
        prim = _controlled_primitive(self.subbloq, self.ctrl_state)
        if prim is not None:
            return prim.leaf_counts()
        if isinstance(self.subbloq, (Toffoli, MultiCToffoli)) and self.ctrl_state == 1:
            n = 2 if isinstance(self.subbloq, Toffoli) else self.subbloq.n
            return MultiCToffoli(sym(n) + 1).leaf_counts()
        return None

    def declared_callees(self):
        if self.leaf_counts() is not None:
            return None
        custom = getattr(self.subbloq, "controlled_callees", None)
        if custom is not None:
            out = dict(custom())
            if self.ctrl_state == 0:
                out[XGate()] = out.get(XGate(), 0) + 2
            return out
        kids = get_callees(self.subbloq)
        if kids is None:
            return None
        if self.ctrl_state == 0:
            return {**{Controlled(c, 1): m for c, m in kids.items()}, XGate(): 2}
        return {Controlled(c, 1): m for c, m in kids.items()}

    def my_qubit_count(self, count):
        inner = count(self.subbloq)
        return sym(inner) + 1 if isinstance(inner, SymExpr) else inner + 1

    def adjoint(self):
        return Controlled(self.subbloq.adjoint(), self.ctrl_state)


@attrs.frozen
class Adjoint(Bloq):
    """Inverse of ``subbloq``: same gate families, reversed sides."""

    subbloq: Bloq

    @property
    def signature(self):
        flip = {Side.LEFT: Side.RIGHT, Side.RIGHT: Side.LEFT, Side.THRU: Side.THRU}
        return Signature([attrs.evolve(r, side=flip[r.side]) for r in self.subbloq.signature])

    @property
    def name(self):
        return f"{self.subbloq.name}†"

    def __str__(self):
        return f"{self.subbloq}†"

    def my_tensor(self):
        from qre.tensor_sim import tensor_of

        return tensor_of(self.subbloq).conj().T

    def leaf_counts(self):
        return self.subbloq.leaf_counts()

    def declared_callees(self):
        if self.leaf_counts() is not None:
            return None
        kids = get_callees(self.subbloq)
        if kids is None:
            return None
        return {c.adjoint(): m for c, m in kids.items()}

    def my_qubit_count(self, count):
        return count(self.subbloq)

    def adjoint(self):
        return self.subbloq


@attrs.frozen
class AndUncompute(Bloq):
    """Erase a target known to hold ctrl[0] AND ctrl[1] by measurement; no Toffoli."""

    @property
    def signature(self):
        return Signature([Register("ctrl", Bit(), shape=(2,)), Register("target", Bit(), side=Side.LEFT)])

    def on_classical_vals(self, ctrl, target):
        if target != (int(ctrl[0]) & int(ctrl[1])):
            raise RangeError(f"target {target} does not hold the AND of {list(ctrl)}")
        return {"ctrl": ctrl}

    def my_tensor(self):
        m = np.zeros((4, 8))
        for a in (0, 1):
            for b in (0, 1):
                m[2 * a + b, 4 * a + 2 * b + (a & b)] = 1
        return m

    def leaf_counts(self):
        return GateCounts(clifford=1, measurement=1)
