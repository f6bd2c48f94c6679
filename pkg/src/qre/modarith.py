"""Reversible modular arithmetic on n-bit residue registers.

Every bloq acts on residues 0 <= x < mod and has a classical action plus a
symbolic Toffoli cost. The per-bloq constants are a cost model of our own
(ripple-carry adders with a compare-and-correct reduction step); inversion
is costed round by round from Kaliski's binary algorithm.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Union

import attrs
import numpy as np

from qre.arithmetic import LessThan
from qre.errors import BadParams, DomainError, EvenModulus, RangeError
from qre.gates import MultiCToffoli, Toffoli
from qre.ir import Bit, Bloq, Register, Signature, UInt
from qre.resources import GateCounts
from qre.state_prep import CSwapRegisters
from qre.symbolics import SymExpr, sym

Size = Union[int, SymExpr]

# Toffolis per bit of each primitive modular operation.
MOD_ADD_PER_BIT = 4
CMOD_ADD_PER_BIT = 5
MOD_SUB_PER_BIT = 4
CMOD_SUB_PER_BIT = 7
MOD_NEG_PER_BIT = 2
CMOD_NEG_PER_BIT = 4
MOD_DBL_PER_BIT = 2

# ModMul: schoolbook product with windowed reduction, quadratic and linear parts.
MOD_MUL_QUADRATIC = Fraction(9, 4)
MOD_MUL_LINEAR = 9

# ModMulK: 2n controlled constant additions of 2n Toffolis each.
MOD_MUL_K_QUADRATIC = 4


def _check_modulus(bitsize, mod) -> None:
    if isinstance(bitsize, SymExpr) or isinstance(mod, SymExpr):
        return
    if mod < 2:
        raise BadParams(f"modulus must be at least 2, got {mod}")
    if mod > 2**bitsize:
        raise BadParams(f"modulus {mod} does not fit in {bitsize} bits")


def _residue(mod: int, **vals) -> None:
    for name, v in vals.items():
        if not 0 <= v < mod:
            raise RangeError(f"{name}={v} is not a residue mod {mod}")


class _ModBloq(Bloq):
    bitsize: Size
    mod: Union[int, SymExpr]

    def __attrs_post_init__(self):
        _check_modulus(self.bitsize, self.mod)

    @property
    def residue_registers(self) -> tuple[str, ...]:
        """Registers that hold residues; the rest are single control bits."""
        return tuple(r.name for r in self.signature if r.name != "ctrl")


class _BinaryModBloq(_ModBloq):
    """y <- op(x, y) mod p, optionally under a control bit."""

    controlled = False
    toffoli_per_bit = 0

    @staticmethod
    def op(x: int, y: int, mod: int) -> int:
        raise NotImplementedError

    @property
    def signature(self):
        n = self.bitsize
        regs = [Register("x", UInt(n)), Register("y", UInt(n))]
        return Signature(([Register("ctrl", Bit())] if self.controlled else []) + regs)

    def on_classical_vals(self, x, y, ctrl=1):
        _residue(self.mod, x=x, y=y)
        out = {"x": x, "y": self.op(x, y, self.mod) if ctrl else y}
        return {"ctrl": ctrl, **out} if self.controlled else out

    def leaf_counts(self):
        return GateCounts(toffoli=self.toffoli_per_bit * sym(self.bitsize))


class _UnaryModBloq(_ModBloq):
    """x <- op(x) mod p, optionally under a control bit."""

    controlled = False
    toffoli_per_bit = 0

    @staticmethod
    def op(x: int, mod: int) -> int:
        raise NotImplementedError

    @property
    def signature(self):
        regs = [Register("x", UInt(self.bitsize))]
        return Signature(([Register("ctrl", Bit())] if self.controlled else []) + regs)

    def on_classical_vals(self, x, ctrl=1):
        _residue(self.mod, x=x)
        out = {"x": self.op(x, self.mod) if ctrl else x}
        return {"ctrl": ctrl, **out} if self.controlled else out

    def leaf_counts(self):
        return GateCounts(toffoli=self.toffoli_per_bit * sym(self.bitsize))


def _add(x, y, p):
    return (x + y) % p


def _sub(x, y, p):
    return (y - x) % p


def _neg(x, p):
    return (-x) % p


@attrs.frozen
class ModAdd(_BinaryModBloq):
    """y <- (x + y) mod p."""

    bitsize: Size
    mod: Union[int, SymExpr]
    toffoli_per_bit = MOD_ADD_PER_BIT
    op = staticmethod(_add)

    def adjoint(self):
        return ModSub(self.bitsize, self.mod)


@attrs.frozen
class CModAdd(_BinaryModBloq):
    """y <- (x + y) mod p when ctrl is 1."""

    bitsize: Size
    mod: Union[int, SymExpr]
    controlled = True
    toffoli_per_bit = CMOD_ADD_PER_BIT
    op = staticmethod(_add)

    def adjoint(self):
        return CModSub(self.bitsize, self.mod)


@attrs.frozen
class ModSub(_BinaryModBloq):
    """y <- (y - x) mod p."""

    bitsize: Size
    mod: Union[int, SymExpr]
    toffoli_per_bit = MOD_SUB_PER_BIT
    op = staticmethod(_sub)

    def adjoint(self):
        return ModAdd(self.bitsize, self.mod)


@attrs.frozen
class CModSub(_BinaryModBloq):
    """y <- (y - x) mod p when ctrl is 1."""

    bitsize: Size
    mod: Union[int, SymExpr]
    controlled = True
    toffoli_per_bit = CMOD_SUB_PER_BIT
    op = staticmethod(_sub)

    def adjoint(self):
        return CModAdd(self.bitsize, self.mod)


@attrs.frozen
class ModNeg(_UnaryModBloq):
    """x <- -x mod p (zero stays zero)."""

    bitsize: Size
    mod: Union[int, SymExpr]
    toffoli_per_bit = MOD_NEG_PER_BIT
    op = staticmethod(_neg)

    def adjoint(self):
        return self


@attrs.frozen
class CModNeg(_UnaryModBloq):
    """x <- -x mod p when ctrl is 1."""

    bitsize: Size
    mod: Union[int, SymExpr]
    controlled = True
    toffoli_per_bit = CMOD_NEG_PER_BIT
    op = staticmethod(_neg)

    def adjoint(self):
        return self


@attrs.frozen
class ModDbl(_UnaryModBloq):
    """x <- 2x mod p; reversible only for an odd modulus."""

    bitsize: Size
    mod: Union[int, SymExpr]
    toffoli_per_bit = MOD_DBL_PER_BIT

    def __attrs_post_init__(self):
        _check_modulus(self.bitsize, self.mod)
        if isinstance(self.mod, int) and self.mod % 2 == 0:
            raise EvenModulus(f"doubling is not invertible mod {self.mod}")

    @staticmethod
    def op(x, p):
        return (2 * x) % p


@attrs.frozen
class ModMulK(_ModBloq):
    """x <- k x mod p for a classical constant k coprime to p."""

    bitsize: Size
    k: int
    mod: Union[int, SymExpr]

    def __attrs_post_init__(self):
        _check_modulus(self.bitsize, self.mod)
        if isinstance(self.mod, int) and math.gcd(self.k, self.mod) != 1:
            raise BadParams(f"k={self.k} has no inverse mod {self.mod}")

    @property
    def signature(self):
        return Signature([Register("x", UInt(self.bitsize))])

    def on_classical_vals(self, x):
        _residue(self.mod, x=x)
        return {"x": (self.k * x) % self.mod}

    def power(self, e: int) -> "ModMulK":
        """Classically fast-forwarded power: multiply by k^e."""
        return ModMulK(self.bitsize, pow(self.k, e, self.mod), self.mod)

    def leaf_counts(self):
        n = sym(self.bitsize)
        return GateCounts(toffoli=MOD_MUL_K_QUADRATIC * n * n)

    def my_qubit_count(self, count):
        # input, product register and a carry register
        return 3 * sym(self.bitsize)

    def controlled_callees(self):
        # the control folds into the constant additions at the same cost
        return {self: 1}

    def adjoint(self):
        return ModMulK(self.bitsize, pow(self.k, -1, self.mod), self.mod)


@attrs.frozen
class ModMul(_ModBloq):
    """out <- (out + x y) mod p."""

    bitsize: Size
    mod: Union[int, SymExpr]

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("x", UInt(n)), Register("y", UInt(n)), Register("out", UInt(n))])

    def on_classical_vals(self, x, y, out):
        _residue(self.mod, x=x, y=y, out=out)
        return {"x": x, "y": y, "out": (out + x * y) % self.mod}

    def leaf_counts(self):
        n = sym(self.bitsize)
        return GateCounts(toffoli=MOD_MUL_QUADRATIC * n * n + MOD_MUL_LINEAR * n)


# ---------------------------------------------------------------------------
# Inversion


@attrs.frozen
class ControlledAdd(Bloq):
    """b <- b +- a (mod 2^n) when ctrl is 1; 2n Toffolis."""

    bitsize: Size
    subtract: bool = False

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("ctrl", Bit()), Register("a", UInt(n)), Register("b", UInt(n))])

    def on_classical_vals(self, ctrl, a, b):
        step = (-a if self.subtract else a) if ctrl else 0
        return {"ctrl": ctrl, "a": a, "b": (b + step) % 2**self.bitsize}

    def leaf_counts(self):
        return GateCounts(toffoli=2 * sym(self.bitsize))

    def adjoint(self):
        return ControlledAdd(self.bitsize, not self.subtract)


@attrs.frozen
class ControlledShift(Bloq):
    """Cyclic one-bit left shift of x when ctrl is 1; n Toffolis."""

    bitsize: Size

    @property
    def signature(self):
        return Signature([Register("ctrl", Bit()), Register("x", UInt(self.bitsize))])

    def on_classical_vals(self, ctrl, x):
        n = self.bitsize
        if ctrl:
            x = ((x << 1) | (x >> (n - 1))) & (2**n - 1)
        return {"ctrl": ctrl, "x": x}

    def leaf_counts(self):
        return GateCounts(toffoli=sym(self.bitsize))


#: Callees of one Kaliski round on n-bit registers, as (factory, multiplicity).
#: Compare u > v; conditionally swap (u, v) and (r, s) in and out; subtract
#: the smaller of u, v and add r into s; halve one of u, v and double one of
#: r, s; test v for zero; update the branch flags.
KALISKI_ROUND_CALLEES: tuple = (
    (lambda n: LessThan(n), 1),
    (lambda n: CSwapRegisters(n), 4),
    (lambda n: ControlledAdd(n, subtract=True), 1),
    (lambda n: ControlledAdd(n), 1),
    (lambda n: ControlledShift(n), 2),
    (lambda n: MultiCToffoli(n), 1),
    (lambda n: Toffoli(), 4),
)


@attrs.frozen
class KaliskiRound(Bloq):
    """One iteration of the binary almost-inverse algorithm; 12n + 3 Toffolis."""

    bitsize: Size

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register(name, UInt(n)) for name in ("u", "v", "r", "s")]
                         + [Register("flags", Bit(), shape=(4,))])

    def declared_callees(self):
        return {make(self.bitsize): m for make, m in KALISKI_ROUND_CALLEES}


@attrs.frozen
class KaliskiState:
    u: int
    v: int
    r: int
    s: int
    k: int = 0

    @property
    def done(self) -> bool:
        return self.v == 0


def kaliski_round(st: KaliskiState, mod: int) -> KaliskiState:
    """One step of the almost-inverse loop; a finished state only doubles r."""
    u, v, r, s, k = st.u, st.v, st.r, st.s, st.k
    if v == 0:
        return KaliskiState(u, v, (2 * r) % mod, s, k)
    if u % 2 == 0:
        u, s = u // 2, 2 * s
    elif v % 2 == 0:
        v, r = v // 2, 2 * r
    elif u > v:
        u, r, s = (u - v) // 2, r + s, 2 * s
    else:
        v, s, r = (v - u) // 2, s + r, 2 * r
    return KaliskiState(u, v, r, s, k + 1)


def kaliski_inverse(x: int, mod: int, bitsize: int) -> int:
    """x^{-1} mod p by exactly 2n Kaliski rounds and a final 2^{-2n} correction."""
    if mod % 2 == 0:
        raise EvenModulus(f"Kaliski inversion needs an odd modulus, got {mod}")
    if x == 0:
        return 0
    st = KaliskiState(mod, x, 0, 1)
    for _ in range(2 * bitsize):
        st = kaliski_round(st, mod)
    if not st.done or st.u != 1:
        raise DomainError(f"{x} has no inverse mod {mod}")
    # r = -x^{-1} 2^k after the loop and each finished round doubles it once more
    almost = (mod - st.r) % mod
    return almost * pow(2, -2 * bitsize, mod) % mod


@attrs.frozen
class ModInv(_ModBloq):
    """x <- x^{-1} mod p (zero maps to zero) by 2n Kaliski rounds."""

    bitsize: Size
    mod: Union[int, SymExpr]

    def __attrs_post_init__(self):
        _check_modulus(self.bitsize, self.mod)
        if isinstance(self.mod, int) and self.mod % 2 == 0:
            raise EvenModulus(f"modular inversion needs an odd modulus, got {self.mod}")

    @property
    def signature(self):
        return Signature([Register("x", UInt(self.bitsize))])

    def on_classical_vals(self, x):
        _residue(self.mod, x=x)
        return {"x": kaliski_inverse(x, self.mod, self.bitsize)}

    def declared_callees(self):
        return {KaliskiRound(self.bitsize): 2 * sym(self.bitsize)}

    def adjoint(self):
        return self


def kaliski_round_toffoli(n: Size) -> SymExpr:
    from qre.resources import gate_counts

    return gate_counts(KaliskiRound(n)).toffoli


# ---------------------------------------------------------------------------
# Family helpers


def mod_arith_bloqs(bitsize: Size, mod: Union[int, SymExpr], k: int = 1) -> dict[str, Bloq]:
    """The modular bloq family at one size; ModInv and ModDbl need an odd modulus."""
    out = {
        "ModAdd": ModAdd(bitsize, mod),
        "CModAdd": CModAdd(bitsize, mod),
        "ModSub": ModSub(bitsize, mod),
        "CModSub": CModSub(bitsize, mod),
        "ModNeg": ModNeg(bitsize, mod),
        "CModNeg": CModNeg(bitsize, mod),
        "ModMulK": ModMulK(bitsize, k, mod),
        "ModMul": ModMul(bitsize, mod),
    }
    if not (isinstance(mod, int) and mod % 2 == 0):
        out["ModDbl"] = ModDbl(bitsize, mod)
        out["ModInv"] = ModInv(bitsize, mod)
    return out


def residue_sampler(bloq: _ModBloq) -> Callable[[np.random.Generator], dict]:
    """Random residues for residue registers and random bits for controls."""
    names = bloq.residue_registers

    def sample(rng):
        out = {}
        for reg in bloq.signature.lefts():
            if reg.name in names:
                out[reg.name] = int(rng.integers(0, bloq.mod)) if bloq.mod < 2**62 else \
                    int.from_bytes(rng.bytes(bloq.mod.bit_length() // 8 + 1), "big") % bloq.mod
            else:
                out[reg.name] = int(rng.integers(0, 2))
        return out

    return sample


def reference_action(bloq: _ModBloq) -> Callable[..., dict]:
    """Big-integer reference for each family member, written independently of the bloqs."""
    p = bloq.mod
    name = type(bloq).__name__

    def ref(**v):
        ctrl = v.get("ctrl", 1)
        out = dict(v)
        if name in ("ModAdd", "CModAdd") and ctrl:
            out["y"] = (v["x"] + v["y"]) % p
        elif name in ("ModSub", "CModSub") and ctrl:
            out["y"] = (v["y"] - v["x"]) % p
        elif name in ("ModNeg", "CModNeg") and ctrl:
            out["x"] = (p - v["x"]) % p
        elif name == "ModDbl":
            out["x"] = (v["x"] + v["x"]) % p
        elif name == "ModMulK":
            out["x"] = (bloq.k * v["x"]) % p
        elif name == "ModMul":
            out["out"] = (v["out"] + v["x"] * v["y"]) % p
        elif name == "ModInv":
            out["x"] = pow(v["x"], -1, p) if v["x"] else 0
        return out

    return ref
