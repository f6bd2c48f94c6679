"""Reversible integer arithmetic: ripple-carry addition, constant addition, comparison."""

from __future__ import annotations

from typing import Union

import attrs
import numpy as np

from qre.gates import CNOT, Toffoli, XorK
from qre.ir import Bit, Bloq, Register, Signature, UInt
from qre.resources import GateCounts
from qre.symbolics import SymExpr, sym


@attrs.frozen
class MAJ(Bloq):
    """Majority step of a ripple-carry adder: leaves the carry-out on ``a``."""

    @property
    def signature(self):
        return Signature([Register("c", Bit()), Register("b", Bit()), Register("a", Bit())])

    def build_composite(self, bb, c, b, a):
        a, b = bb.add(CNOT(), ctrl=a, target=b)
        a, c = bb.add(CNOT(), ctrl=a, target=c)
        (c, b), a = bb.add(Toffoli(), ctrl=np.array([c, b]), target=a)
        return {"c": c, "b": b, "a": a}

    def declared_callees(self):
        return {CNOT(): 2, Toffoli(): 1}

    def on_classical_vals(self, c, b, a):
        b2, c2 = b ^ a, c ^ a
        return {"c": c2, "b": b2, "a": a ^ (c2 & b2)}


@attrs.frozen
class UMA(Bloq):
    """Un-majority-and-add: undoes ``MAJ`` and writes the sum bit to ``b``."""

    @property
    def signature(self):
        return Signature([Register("c", Bit()), Register("b", Bit()), Register("a", Bit())])

    def build_composite(self, bb, c, b, a):
        (c, b), a = bb.add(Toffoli(), ctrl=np.array([c, b]), target=a)
        a, c = bb.add(CNOT(), ctrl=a, target=c)
        c, b = bb.add(CNOT(), ctrl=c, target=b)
        return {"c": c, "b": b, "a": a}

    def declared_callees(self):
        return {CNOT(): 2, Toffoli(): 1}

    def on_classical_vals(self, c, b, a):
        a2 = a ^ (c & b)
        c2 = c ^ a2
        return {"c": c2, "b": b ^ c2, "a": a2}


@attrs.frozen
class Add(Bloq):
    """b += a (mod 2^n) with a one-ancilla ripple-carry circuit; 2n - 2 Toffolis."""

    bitsize: Union[int, SymExpr]

    @property
    def signature(self):
        return Signature([Register("a", UInt(self.bitsize)), Register("b", UInt(self.bitsize))])

    def on_classical_vals(self, a, b):
        return {"a": a, "b": (a + b) % 2**self.bitsize}

    def declared_callees(self):
        if isinstance(self.bitsize, int) and self.bitsize == 1:
            return {CNOT(): 1}
        n = sym(self.bitsize)
        return {MAJ(): n - 1, UMA(): n - 1, CNOT(): 2}

    def build_composite(self, bb, a, b):
        n = self.bitsize
        if n == 1:
            (a,), (b,) = bb.split(a), bb.split(b)
            a, b = bb.add(CNOT(), ctrl=a, target=b)
            return {"a": bb.join([a]), "b": bb.join([b])}
        # bit arrays are MSB first; index i below counts from the least significant bit
        abits, bbits = bb.split(a)[::-1].copy(), bb.split(b)[::-1].copy()
        carry = bb.allocate(1)
        for i in range(n - 1):
            prev = carry if i == 0 else abits[i - 1]
            prev, bbits[i], abits[i] = bb.add(MAJ(), c=prev, b=bbits[i], a=abits[i])
            if i == 0:
                carry = prev
            else:
                abits[i - 1] = prev
        top = n - 1
        abits[top], bbits[top] = bb.add(CNOT(), ctrl=abits[top], target=bbits[top])
        abits[top - 1], bbits[top] = bb.add(CNOT(), ctrl=abits[top - 1], target=bbits[top])
        for i in range(n - 2, -1, -1):
            prev = carry if i == 0 else abits[i - 1]
            prev, bbits[i], abits[i] = bb.add(UMA(), c=prev, b=bbits[i], a=abits[i])
            if i == 0:
                carry = prev
            else:
                abits[i - 1] = prev
        bb.free(carry)
        return {"a": bb.join(abits[::-1]), "b": bb.join(bbits[::-1])}

    def adjoint(self):
        return Subtract(self.bitsize)


@attrs.frozen
class Subtract(Bloq):
    """b -= a (mod 2^n); the inverse of ``Add``."""

    bitsize: Union[int, SymExpr]

    @property
    def signature(self):
        return Signature([Register("a", UInt(self.bitsize)), Register("b", UInt(self.bitsize))])

    def on_classical_vals(self, a, b):
        return {"a": a, "b": (b - a) % 2**self.bitsize}

    def declared_callees(self):
        n = sym(self.bitsize)
        if isinstance(self.bitsize, int) and self.bitsize == 1:
            return {CNOT(): 1}
        return {MAJ().adjoint(): n - 1, UMA().adjoint(): n - 1, CNOT(): 2}

    def adjoint(self):
        return Add(self.bitsize)


@attrs.frozen
class AddK(Bloq):
    """x += k (mod 2^n) by loading k into a scratch register and adding it."""

    k: int
    bitsize: int

    @property
    def signature(self):
        return Signature([Register("x", UInt(self.bitsize))])

    def on_classical_vals(self, x):
        return {"x": (x + self.k) % 2**self.bitsize}

    def build_composite(self, bb, x):
        k = self.k % 2**self.bitsize
        scratch = bb.allocate(UInt(self.bitsize))
        scratch = bb.add(XorK(k, self.bitsize), x=scratch)
        scratch, x = bb.add(Add(self.bitsize), a=scratch, b=x)
        scratch = bb.add(XorK(k, self.bitsize), x=scratch)
        bb.free(scratch)
        return {"x": x}

    def declared_callees(self):
        k = self.k % 2**self.bitsize
        return {XorK(k, self.bitsize): 2, Add(self.bitsize): 1}

    def adjoint(self):
        return AddK(-self.k, self.bitsize)


@attrs.frozen
class LessThan(Bloq):
    """target ^= (x < y); costed as one n-bit compare of n Toffolis."""

    bitsize: Union[int, SymExpr]

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("x", UInt(n)), Register("y", UInt(n)), Register("target", Bit())])

    def on_classical_vals(self, x, y, target):
        return {"x": x, "y": y, "target": target ^ int(x < y)}

    def leaf_counts(self):
        n = sym(self.bitsize)
        return GateCounts(toffoli=n, clifford=4 * n)

    def adjoint(self):
        return self


@attrs.frozen
class LessThanConst(Bloq):
    """target ^= (x < k) for a classical constant k."""

    bitsize: Union[int, SymExpr]
    k: Union[int, SymExpr]

    @property
    def signature(self):
        return Signature([Register("x", UInt(self.bitsize)), Register("target", Bit())])

    def on_classical_vals(self, x, target):
        return {"x": x, "target": target ^ int(x < self.k)}

    def leaf_counts(self):
        n = sym(self.bitsize)
        return GateCounts(toffoli=n - 1, clifford=2 * n)

    def adjoint(self):
        return self
