"""Single-qubit rotation strategies and quantum variable rotations."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Union

import attrs
import numpy as np

from qre.errors import BadEpsilon, BadSize
from qre.gates import CNOT, Hadamard, ZPowGate
from qre.ir import Bit, Bloq, Fxp, Register, Side, Signature, UInt
from qre.resources import GateCounts, direct_synthesis_t
from qre.symbolics import SymExpr, ceil, is_constant, evaluate, log2, simplify, sym

Number = Union[int, float, Fraction, SymExpr]


def _check_eps(eps) -> None:
    if isinstance(eps, SymExpr) and not is_constant(eps):
        return
    v = float(evaluate(eps)) if isinstance(eps, SymExpr) else float(eps)
    if not 0 < v < 1:
        raise BadEpsilon(f"precision must lie in (0, 1), got {eps}")


def zpow_direct_cost(eps: Number) -> GateCounts:
    """T count of synthesizing one arbitrary Z rotation directly."""
    _check_eps(eps)
    return GateCounts(t=direct_synthesis_t(eps))


def zpow_programmed_ancilla_cost(eps: Number, rounds: Union[int, SymExpr] = 2) -> GateCounts:
    """T count of ``rounds`` resource states, each synthesized to eps/rounds."""
    _check_eps(eps)
    if not isinstance(rounds, SymExpr) and rounds < 1:
        raise BadSize(f"need at least one round, got {rounds}")
    n = sym(rounds)
    return GateCounts(t=simplify(n * direct_synthesis_t(sym(eps) / n)))


def rounds_for_failure_probability(p: float) -> int:
    """Rounds of programmed-ancilla rotation needed to fail with probability at most p."""
    if not 0 < p < 1:
        raise BadEpsilon(f"failure probability must lie in (0, 1), got {p}")
    return math.ceil(math.log2(1 / p))


def phase_gradient_bitsize(eps: Number) -> SymExpr:
    """Gradient register size giving angle resolution eps: ceil(log2(2 pi / eps))."""
    _check_eps(eps)
    return simplify(ceil(log2(2 * math.pi / sym(eps))))


def zpow_phase_gradient_cost(b_grad: Union[int, SymExpr]) -> GateCounts:
    """Toffoli count of one rotation by adding into a ``b_grad``-bit phase gradient."""
    if not isinstance(b_grad, SymExpr) and b_grad < 3:
        raise BadSize(f"phase gradient register needs at least 3 bits, got {b_grad}")
    return GateCounts(toffoli=sym(b_grad) - 2)


# ---------------------------------------------------------------------------
# Phase gradient


@attrs.frozen
class PhaseGradientState(Bloq):
    """Fresh register holding sum_k e^{-2 pi i k / 2^b} |k> / sqrt(2^b)."""

    bitsize: int
    eps: Number = 1e-11

    @property
    def signature(self):
        return Signature([Register("phase_grad", UInt(self.bitsize), side=Side.RIGHT)])

    def build_composite(self, bb):
        reg = bb.allocate(UInt(self.bitsize))
        bits = bb.split(reg)
        for j in range(self.bitsize):
            bits[j] = bb.add(Hadamard(), q=bits[j])
            bits[j] = bb.add(ZPowGate(Fraction(-1, 2**j), self.eps), q=bits[j])
        return {"phase_grad": bb.join(bits)}

    def my_tensor(self):
        dim = 2**self.bitsize
        k = np.arange(dim)
        return (np.exp(-2j * np.pi * k / dim) / math.sqrt(dim)).reshape(dim, 1)


def phase_gradient_amplitudes(bitsize: int) -> np.ndarray:
    """Product-form amplitudes: each bit j (MSB first) contributes e^{-i pi k_j / 2^j}/sqrt 2."""
    amps = np.ones(1, dtype=complex)
    for j in range(bitsize):
        amps = np.kron(amps, np.array([1, cmath.exp(-1j * math.pi / 2**j)]) / math.sqrt(2))
    return amps


@attrs.frozen
class AddConstIntoPhaseGrad(Bloq):
    """Controlled phase_grad += k (mod 2^b); on the gradient state this is diag(1, e^{2 pi i k/2^b})."""

    k: int
    bitsize: Union[int, SymExpr]

    @property
    def signature(self):
        return Signature([Register("ctrl", Bit()), Register("phase_grad", UInt(self.bitsize))])

    def on_classical_vals(self, ctrl, phase_grad):
        if ctrl:
            phase_grad = (phase_grad + self.k) % 2**self.bitsize
        return {"ctrl": ctrl, "phase_grad": phase_grad}

    def leaf_counts(self):
        return zpow_phase_gradient_cost(self.bitsize)

    def adjoint(self):
        return AddConstIntoPhaseGrad(-self.k % 2**self.bitsize, self.bitsize)


@attrs.frozen
class ZPowViaPhaseGradient(Bloq):
    """diag(1, e^{i pi t}) with t rounded to a multiple of 2^(1-b).

    The decomposition prepares the gradient register, adds into it and
    unprepares it; in practice the gradient state is a reusable catalyst.
    """

    exponent: float
    bitsize: int

    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    @property
    def k(self) -> int:
        return round(float(self.exponent) * 2 ** (self.bitsize - 1)) % 2**self.bitsize

    def build_composite(self, bb, q):
        grad = bb.add(PhaseGradientState(self.bitsize))
        q, grad = bb.add(AddConstIntoPhaseGrad(self.k, self.bitsize), ctrl=q, phase_grad=grad)
        bb.add(PhaseGradientState(self.bitsize).adjoint(), phase_grad=grad)
        return {"q": q}

    def leaf_counts(self):
        return zpow_phase_gradient_cost(self.bitsize)


# ---------------------------------------------------------------------------
# Programmed ancilla


@attrs.frozen
class PostSelectZero(Bloq):
    """Project a qubit onto |0>, renormalized for a 50% success branch."""

    @property
    def signature(self):
        return Signature([Register("q", Bit(), side=Side.LEFT)])

    def my_tensor(self):
        return np.array([[math.sqrt(2), 0]])

    def leaf_counts(self):
        return GateCounts(measurement=1)


@attrs.frozen
class ZPowProgrammedAncilla(Bloq):
    """diag(1, e^{i pi t}) by teleporting in rotated resource states.

    Costs ``rounds`` resource states synthesized at eps/rounds each. The
    decomposition models the first round's successful branch.
    """

    exponent: Number
    eps: Number = 1e-11
    rounds: int = 2

    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def build_composite(self, bb, q):
        anc = bb.allocate(1)
        anc = bb.add(Hadamard(), q=anc)
        anc = bb.add(ZPowGate(self.exponent, sym(self.eps) / self.rounds), q=anc)
        q, anc = bb.add(CNOT(), ctrl=q, target=anc)
        bb.add(PostSelectZero(), q=anc)
        return {"q": q}

    def leaf_counts(self):
        n = sym(self.rounds)
        return GateCounts(rotations=[(sym(self.eps) / n, n)], clifford=2 * n, measurement=n)


# ---------------------------------------------------------------------------
# Quantum variable rotation


@attrs.frozen
class QvrZPow(Bloq):
    """|x> -> e^{2 pi i gamma x} |x> for an n-bit fraction x, one ZPow per bit at eps/n."""

    bitsize: Union[int, SymExpr]
    gamma: Number = 1
    eps: Number = 1e-11

    def __attrs_post_init__(self):
        _check_eps(self.eps)

    @property
    def signature(self):
        return Signature([Register("x", Fxp(self.bitsize, self.bitsize))])

    def build_composite(self, bb, x):
        n = self.bitsize
        bits = bb.split(x)
        for j in range(n):
            t = 2 * self.gamma * Fraction(1, 2 ** (j + 1)) if not isinstance(self.gamma, float) \
                else 2 * self.gamma / 2 ** (j + 1)
            bits[j] = bb.add(ZPowGate(t, sym(self.eps) / n), q=bits[j])
        return {"x": bb.join(bits, Fxp(n, n))}

    def leaf_counts(self):
        n = sym(self.bitsize)
        return GateCounts(rotations=[(sym(self.eps) / n, n)])


@attrs.frozen
class QvrPhaseGradient(Bloq):
    """Quantum variable rotation by adding gamma*x into a phase gradient register.

    Costed as one controlled constant addition into a b_grad-bit gradient per
    bit of x, b_grad = ceil(log2(2 pi n / eps)).
    """

    bitsize: Union[int, SymExpr]
    gamma: Number = 1
    eps: Number = 1e-11

    def __attrs_post_init__(self):
        _check_eps(self.eps)

    @property
    def b_grad(self) -> SymExpr:
        return simplify(ceil(log2(2 * math.pi * sym(self.bitsize) / sym(self.eps))))

    @property
    def signature(self):
        return Signature([Register("x", Fxp(self.bitsize, self.bitsize))])

    def leaf_counts(self):
        n = sym(self.bitsize)
        return GateCounts(toffoli=simplify(n * (self.b_grad - 2)))
