"""Elliptic-curve points and point-addition bloqs over a prime field.

Curves are short Weierstrass y^2 = x^3 + a x + b (mod p). The pair (0, 0)
encodes the point at infinity, so curves with b = 0 are not supported.
"""

from __future__ import annotations

import math
from typing import Union

import attrs
import numpy as np

from qre.errors import BadParams, OffCurve, RangeError
from qre.gates import MultiCToffoli, PlusState
from qre.ir import Bit, Bloq, Register, Side, Signature, UInt
from qre.modarith import (
    CModAdd,
    CModNeg,
    CModSub,
    ModAdd,
    ModDbl,
    ModInv,
    ModMul,
    ModNeg,
    ModSub,
)
from qre.qrom import QROMVariant, SymbolicLookup, optimal_block_exponent
from qre.resources import GateCounts
from qre.symbolics import SymExpr, sym


@attrs.frozen
class ECPoint:
    """A point on y^2 = x^3 + a x + b mod p; b is read off the point when not given."""

    x: int
    y: int
    mod: int
    curve_a: int = 0
    curve_b: int | None = None

    def __attrs_post_init__(self):
        if not (0 <= self.x < self.mod and 0 <= self.y < self.mod):
            raise OffCurve(f"({self.x}, {self.y}) are not residues mod {self.mod}")
        if self.curve_b is None:
            if self.is_infinity:
                raise OffCurve("the point at infinity needs an explicit curve_b")
            b = (self.y * self.y - self.x**3 - self.curve_a * self.x) % self.mod
            object.__setattr__(self, "curve_b", b)
        if self.curve_b % self.mod == 0:
            raise OffCurve("curves with b = 0 clash with the (0, 0) encoding of infinity")
        if not self.on_curve():
            raise OffCurve(f"({self.x}, {self.y}) is not on y^2 = x^3 + {self.curve_a}x + {self.curve_b}"
                           f" mod {self.mod}")

    @classmethod
    def infinity(cls, mod: int, curve_a: int, curve_b: int) -> "ECPoint":
        return cls(0, 0, mod, curve_a, curve_b)

    @property
    def is_infinity(self) -> bool:
        return self.x == 0 and self.y == 0

    def on_curve(self) -> bool:
        if self.is_infinity:
            return True
        p = self.mod
        return (self.y * self.y - self.x**3 - self.curve_a * self.x - self.curve_b) % p == 0

    def curve(self) -> tuple[int, int, int]:
        return self.mod, self.curve_a, self.curve_b

    def at(self, x: int, y: int) -> "ECPoint":
        """Another point on the same curve; OffCurve if (x, y) is not on it."""
        return ECPoint(x, y, self.mod, self.curve_a, self.curve_b)

    def __neg__(self) -> "ECPoint":
        return self.at(self.x, (-self.y) % self.mod)

    def __add__(self, other: "ECPoint") -> "ECPoint":
        if not isinstance(other, ECPoint):
            return NotImplemented
        if other.curve() != self.curve():
            raise OffCurve("points lie on different curves")
        x, y = ec_add_affine((self.x, self.y), (other.x, other.y), self.mod, self.curve_a)
        return self.at(x, y)

    def __sub__(self, other: "ECPoint") -> "ECPoint":
        return self + (-other)

    def __mul__(self, k: int) -> "ECPoint":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (-self) * (-k)
        acc, base = ECPoint.infinity(*self.curve()), self
        while k:
            if k & 1:
                acc = acc + base
            base = base + base
            k >>= 1
        return acc

    __rmul__ = __mul__

    def __str__(self):
        return f"({self.x}, {self.y})"


def ec_add_affine(p1: tuple[int, int], p2: tuple[int, int], mod: int, curve_a: int) -> tuple[int, int]:
    """Affine group law with (0, 0) as the identity."""
    (x1, y1), (x2, y2) = p1, p2
    if (x1, y1) == (0, 0):
        return x2, y2
    if (x2, y2) == (0, 0):
        return x1, y1
    if x1 == x2 and (y1 + y2) % mod == 0:
        return 0, 0
    if x1 == x2:
        lam = (3 * x1 * x1 + curve_a) * pow(2 * y1, -1, mod) % mod
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, mod) % mod
    x3 = (lam * lam - x1 - x2) % mod
    return x3, (lam * (x1 - x3) - y1) % mod


# ---------------------------------------------------------------------------
# Point-addition bloqs

#: Callees of the quantum-quantum point addition, in descending cost order at
#: n = 256. The inversion and multiplication counts follow the affine slope
#: computation with full uncomputation (no measurement-based shortcuts).
ECADD_CALLEE_COUNTS: tuple = (
    (ModInv, 4),
    (ModMul, 10),
    (CModSub, 4),
    (MultiCToffoli, 18),
    (ModSub, 3),
    (ModAdd, 3),
    (CModAdd, 2),
    (ModNeg, 3),
    (ModDbl, 2),
    (CModNeg, 1),
)

#: Callees of adding a classical constant point: one slope via one inversion
#: (computed and uncomputed) and two products, plus constant corrections.
ECADDR_CALLEE_COUNTS: tuple = (
    (ModInv, 2),
    (ModMul, 2),
    (CModSub, 2),
    (CModAdd, 2),
    (ModSub, 2),
    (ModAdd, 1),
    (ModNeg, 1),
    (MultiCToffoli, 4),
)


def _instantiate(table: tuple, n, mod) -> dict:
    out = {}
    for cls, m in table:
        b = MultiCToffoli(n) if cls is MultiCToffoli else cls(n, mod)
        out[b] = out.get(b, 0) + m
    return out


def _check_point(x: int, y: int, mod: int, curve_a: int, curve_b: int) -> None:
    if not (0 <= x < mod and 0 <= y < mod):
        raise RangeError(f"({x}, {y}) are not residues mod {mod}")
    if (x, y) != (0, 0) and (y * y - x**3 - curve_a * x - curve_b) % mod:
        raise OffCurve(f"({x}, {y}) is not on the curve")


@attrs.frozen
class ECAdd(Bloq):
    """(x, y) <- (a, b) + (x, y) for two quantum points on a curve with parameter a."""

    bitsize: Union[int, SymExpr]
    mod: Union[int, SymExpr]
    curve_a: int = 0

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register(r, UInt(n)) for r in ("a", "b", "x", "y")])

    def on_classical_vals(self, a, b, x, y):
        for v in (a, b, x, y):
            if not 0 <= v < self.mod:
                raise RangeError(f"{v} is not a residue mod {self.mod}")
        x2, y2 = ec_add_affine((a, b), (x, y), self.mod, self.curve_a)
        return {"a": a, "b": b, "x": x2, "y": y2}

    def declared_callees(self):
        return _instantiate(ECADD_CALLEE_COUNTS, self.bitsize, self.mod)


@attrs.frozen
class ECAddR(Bloq):
    """(x, y) <- (x, y) + R when ctrl is 1, for a classical curve point R."""

    bitsize: int
    R: ECPoint

    def __attrs_post_init__(self):
        if self.R.mod > 2**self.bitsize:
            raise BadParams(f"modulus {self.R.mod} does not fit in {self.bitsize} bits")

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("ctrl", Bit()), Register("x", UInt(n)), Register("y", UInt(n))])

    def on_classical_vals(self, ctrl, x, y):
        _check_point(x, y, *self.R.curve())
        if ctrl:
            x, y = ec_add_affine((x, y), (self.R.x, self.R.y), self.R.mod, self.R.curve_a)
        return {"ctrl": ctrl, "x": x, "y": y}

    def declared_callees(self):
        return _instantiate(ECADDR_CALLEE_COUNTS, self.bitsize, self.R.mod)

    def __str__(self):
        return f"ECAddR(n={self.bitsize}, R={self.R})"


def ec_add_r(bitsize: int, R: ECPoint, mod: int | None = None) -> ECAddR:
    """Constant point addition; OffCurve if R is not a point mod ``mod``."""
    if mod is not None and mod != R.mod:
        raise OffCurve(f"R is a point mod {R.mod}, not mod {mod}")
    if not R.on_curve():
        raise OffCurve(f"{R} is not on its curve")
    return ECAddR(bitsize, R)


@attrs.frozen
class ECWindowAddR(Bloq):
    """(x, y) <- (x, y) + c R for a w-bit quantum window c.

    Looks up c R from a table of 2^w precomputed points, adds it with a
    quantum-quantum point addition and erases the lookup.
    """

    bitsize: int
    window_bits: int
    R: ECPoint

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("ctrl", UInt(self.window_bits)), Register("x", UInt(n)),
                          Register("y", UInt(n))])

    def on_classical_vals(self, ctrl, x, y):
        _check_point(x, y, *self.R.curve())
        add = ctrl * self.R
        x, y = ec_add_affine((x, y), (add.x, add.y), self.R.mod, self.R.curve_a)
        return {"ctrl": ctrl, "x": x, "y": y}

    def lookups(self) -> tuple[Bloq, Bloq]:
        entries, width = 2**self.window_bits, 2 * self.bitsize
        load = QROMVariant.QROAM_CLEAN
        unload = QROMVariant.QROAM_CLEAN_ADJOINT
        return (SymbolicLookup(load, entries, width, optimal_block_exponent(load, entries, width)),
                SymbolicLookup(unload, entries, width, optimal_block_exponent(unload, entries, width)))

    def declared_callees(self):
        load, unload = self.lookups()
        return {load: 1, ECAdd(self.bitsize, self.R.mod, self.R.curve_a): 1, unload: 1}

    def __str__(self):
        return f"ECWindowAddR(n={self.bitsize}, w={self.window_bits}, R={self.R})"


@attrs.frozen
class MeasureQFT(Bloq):
    """Semiclassical inverse QFT: measure each control with classically conditioned phases."""

    bitsize: int
    eps: float = 1e-10

    @property
    def signature(self):
        return Signature([Register("x", Bit(), shape=(self.bitsize,), side=Side.LEFT)])

    def leaf_counts(self):
        n = sym(self.bitsize)
        rots = [(self.eps, n - 1)] if self.bitsize > 1 else []
        return GateCounts(clifford=n, measurement=n, rotations=rots)


@attrs.frozen
class ECPhaseEstimateR(Bloq):
    """Phase estimation on (x, y) -> (x, y) + P with n controls in |+>.

    Control i adds 2^i P; the controls are then read out by a measured QFT.
    """

    bitsize: int
    point: ECPoint

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("x", UInt(n)), Register("y", UInt(n))])

    def _adders(self) -> list[ECAddR]:
        out, r = [], self.point
        for _ in range(self.bitsize):
            out.append(ECAddR(self.bitsize, r))
            r = r + r
        return out

    def build_composite(self, bb, x, y):
        ctrl = [bb.add(PlusState()) for _ in range(self.bitsize)]
        for i, adder in enumerate(self._adders()):
            ctrl[i], x, y = bb.add(adder, ctrl=ctrl[i], x=x, y=y)
        bb.add(MeasureQFT(self.bitsize), x=np.array(ctrl, dtype=object))
        return {"x": x, "y": y}

    def declared_callees(self):
        out: dict = {PlusState(): self.bitsize, MeasureQFT(self.bitsize): 1}
        for adder in self._adders():
            out[adder] = out.get(adder, 0) + 1
        return out

    def __str__(self):
        return f"ECPhaseEstimateR(n={self.bitsize}, P={self.point})"


def window_sizes(bitsize: int, window_bits: int) -> list[int]:
    """Widths of the control windows covering n bits; the last may be short."""
    full, rest = divmod(bitsize, window_bits)
    return [window_bits] * full + ([rest] if rest else [])


@attrs.frozen
class ECWindowPhaseEstimateR(Bloq):
    """Windowed phase estimation: ceil(n / w) lookup-add-unlookup groups."""

    bitsize: int
    point: ECPoint
    window_bits: int

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("x", UInt(n)), Register("y", UInt(n))])

    def _adders(self) -> list[ECWindowAddR]:
        out, r = [], self.point
        for w in window_sizes(self.bitsize, self.window_bits):
            out.append(ECWindowAddR(self.bitsize, w, r))
            r = (2**w) * r
        return out

    def build_composite(self, bb, x, y):
        bits = []
        for adder in self._adders():
            ws = [bb.add(PlusState()) for _ in range(adder.window_bits)]
            c, x, y = bb.add(adder, ctrl=bb.join(ws), x=x, y=y)
            bits.extend(bb.split(c))
        bb.add(MeasureQFT(self.bitsize), x=np.array(bits, dtype=object))
        return {"x": x, "y": y}

    def declared_callees(self):
        out: dict = {PlusState(): self.bitsize, MeasureQFT(self.bitsize): 1}
        for adder in self._adders():
            out[adder] = out.get(adder, 0) + 1
        return out

    def __str__(self):
        return f"ECWindowPhaseEstimateR(n={self.bitsize}, w={self.window_bits}, P={self.point})"


def n_groups(bitsize: int, window_bits: int) -> int:
    return math.ceil(bitsize / window_bits)
