"""State preparation: uniform superpositions, alias sampling and rotation trees."""

from __future__ import annotations

import enum
import math
from collections import deque
from fractions import Fraction
from typing import Sequence, Union

import attrs
import numpy as np

from qre.arithmetic import LessThan
from qre.errors import BadEpsilon, BadSize
from qre.gates import CSwap, Hadamard, XGate
from qre.ir import Bit, Bloq, Register, Side, Signature, UInt
from qre.qrom import QROM, QROMVariant, qrom_toffoli
from qre.resources import GateCounts
from qre.symbolics import SymExpr, evaluate, is_constant
from qre.unary import selection_bitsize


def _check_eps(eps) -> None:
    if isinstance(eps, SymExpr) and not is_constant(eps):
        return
    v = float(evaluate(eps)) if isinstance(eps, SymExpr) else float(eps)
    if not 0 < v < 1:
        raise BadEpsilon(f"precision must lie in (0, 1), got {eps}")


def keep_bitsize(eps) -> int:
    """Bits of the alias keep probability: ceil(log2(1/eps))."""
    _check_eps(eps)
    return math.ceil(math.log2(1 / float(eps)))


# ---------------------------------------------------------------------------
# Uniform superposition


def _odd_part(n: int) -> tuple[int, int]:
    k = 0
    while n % 2 == 0:
        n //= 2
        k += 1
    return k, n


@attrs.frozen
class UniformSuperposition(Bloq):
    """Fresh register in sum_{i<N} |i> / sqrt(N).

    A power of two costs only Hadamards. Otherwise, with N = 2^k L and L odd,
    one round of amplitude amplification costs 4 (ceil(log2 L) - 1) Toffolis
    (three comparisons against L and one reflection) plus two rotations.
    """

    n_states: int
    eps: float = 1e-11

    def __attrs_post_init__(self):
        if self.n_states < 1:
            raise BadSize(f"need at least one state, got {self.n_states}")

    @property
    def bitsize(self) -> int:
        return selection_bitsize(self.n_states)

    @property
    def signature(self):
        return Signature([Register("target", UInt(self.bitsize), side=Side.RIGHT)])

    def my_tensor(self):
        v = np.zeros((2**self.bitsize, 1))
        v[: self.n_states, 0] = 1 / math.sqrt(self.n_states)
        return v

    def build_composite(self, bb):
        if self.n_states & (self.n_states - 1):
            raise NotImplementedError("only powers of two decompose to gates")
        bits = bb.split(bb.allocate(UInt(self.bitsize)))
        for j in range(self.bitsize):
            bits[j] = bb.add(Hadamard(), q=bits[j])
        return {"target": bb.join(bits)}

    def has_decomposition(self) -> bool:
        return self.n_states & (self.n_states - 1) == 0 and self.n_states > 1

    def leaf_counts(self):
        if self.has_decomposition() or self.n_states == 1:
            return None if self.n_states > 1 else GateCounts()
        k, odd = _odd_part(self.n_states)
        m = math.ceil(math.log2(odd))
        return GateCounts(toffoli=4 * (m - 1), clifford=k + 4 * m + 4, rotations=[(self.eps, 2)])


def uniform_superposition_cost(n_states: int, eps: float = 1e-11) -> GateCounts:
    b = UniformSuperposition(n_states, eps)
    counts = b.leaf_counts()
    return counts if counts is not None else GateCounts(clifford=b.bitsize)


# ---------------------------------------------------------------------------
# Alias sampling


def alias_table(weights: Sequence, mu: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Vose alias table with keep probabilities rounded to ``mu`` bits.

    Returns (alt, keep): sampling i uniformly and sigma uniformly from
    [0, 2^mu), the outcome is i when sigma < keep[i] and alt[i] otherwise.
    Ties are broken by index so the table is deterministic.
    """
    w = [Fraction(x) for x in weights]
    if not w or any(x < 0 for x in w) or sum(w) == 0:
        raise BadSize("weights must be non-negative with a positive sum")
    n, total = len(w), sum(w)
    scaled = [x * n / total for x in w]
    prob: list[Fraction] = [Fraction(1)] * n
    alt = list(range(n))
    small = deque(i for i in range(n) if scaled[i] < 1)
    large = deque(i for i in range(n) if scaled[i] >= 1)
    while small and large:
        s, big = small.popleft(), large.popleft()
        prob[s], alt[s] = scaled[s], big
        scaled[big] = scaled[big] + scaled[s] - 1
        if scaled[big] < 1:
            small.append(big)
        else:
            large.appendleft(big)
    scale = 2**mu
    keep = []
    for i in range(n):
        if alt[i] == i:
            keep.append(scale - 1)
        else:
            keep.append(min(scale - 1, round(prob[i] * scale)))
    return tuple(alt), tuple(keep)


def alias_distribution(alt: Sequence[int], keep: Sequence[int], mu: int) -> list[Fraction]:
    """Exact output distribution of an alias table."""
    n, scale = len(alt), 2**mu
    p = [Fraction(0)] * n
    for i in range(n):
        p[i] += Fraction(keep[i], scale * n)
        p[alt[i]] += Fraction(scale - keep[i], scale * n)
    return p


@attrs.frozen
class CSwapRegisters(Bloq):
    """Swap two n-bit registers when ctrl is 1; n controlled swaps."""

    bitsize: Union[int, SymExpr]

    @property
    def signature(self):
        n = self.bitsize
        return Signature([Register("ctrl", Bit()), Register("x", UInt(n)), Register("y", UInt(n))])

    def on_classical_vals(self, ctrl, x, y):
        return {"ctrl": ctrl, "x": y, "y": x} if ctrl else {"ctrl": ctrl, "x": x, "y": y}

    def build_composite(self, bb, ctrl, x, y):
        xs, ys = bb.split(x), bb.split(y)
        for j in range(self.bitsize):
            ctrl, xs[j], ys[j] = bb.add(CSwap(), ctrl=ctrl, x=xs[j], y=ys[j])
        return {"ctrl": ctrl, "x": bb.join(xs), "y": bb.join(ys)}

    def declared_callees(self):
        return {CSwap(): self.bitsize}

    def adjoint(self):
        return self


@attrs.frozen
class StatePrepAlias(Bloq):
    """Prepare sum_i sqrt(p_i) |i>|junk_i> by coherent alias sampling.

    Registers: ``selection`` (the prepared index), ``sigma`` (uniform keep
    threshold), ``alt`` and ``keep`` (looked-up table entries) and ``flag``.
    """

    alt: tuple
    keep: tuple
    mu: int

    @classmethod
    def from_weights(cls, weights: Sequence, eps: float) -> "StatePrepAlias":
        mu = keep_bitsize(eps)
        alt, keep = alias_table(weights, mu)
        return cls(alt, keep, mu)

    @property
    def n_states(self) -> int:
        return len(self.alt)

    @property
    def index_bitsize(self) -> int:
        return selection_bitsize(self.n_states)

    @property
    def signature(self):
        n, mu = self.index_bitsize, self.mu
        return Signature([
            Register("selection", UInt(n), side=Side.RIGHT),
            Register("sigma", UInt(mu), side=Side.RIGHT),
            Register("alt", UInt(n), side=Side.RIGHT),
            Register("keep", UInt(mu), side=Side.RIGHT),
            Register("flag", Bit(), side=Side.RIGHT),
        ])

    def _lookup(self) -> QROM:
        return QROM.build(self.alt, self.keep, target_bitsizes=(self.index_bitsize, self.mu))

    def build_composite(self, bb):
        n, mu = self.index_bitsize, self.mu
        sel = bb.add(UniformSuperposition(self.n_states))
        sigma = bb.split(bb.allocate(UInt(mu)))
        for j in range(mu):
            sigma[j] = bb.add(Hadamard(), q=sigma[j])
        sigma = bb.join(sigma)
        alt, keep = bb.allocate(UInt(n)), bb.allocate(UInt(mu))
        sel, alt, keep = bb.add(self._lookup(), selection=sel, target0=alt, target1=keep)
        flag = bb.allocate(1)
        sigma, keep, flag = bb.add(LessThan(mu), x=sigma, y=keep, target=flag)
        flag = bb.add(XGate(), q=flag)
        flag, alt, sel = bb.add(CSwapRegisters(n), ctrl=flag, x=alt, y=sel)
        return {"selection": sel, "sigma": sigma, "alt": alt, "keep": keep, "flag": flag}

    def declared_callees(self):
        return {UniformSuperposition(self.n_states): 1, Hadamard(): self.mu, self._lookup(): 1,
                LessThan(self.mu): 1, XGate(): 1, CSwapRegisters(self.index_bitsize): 1}

    def __str__(self):
        return f"StatePrepAlias(N={self.n_states}, mu={self.mu})"


# ---------------------------------------------------------------------------
# Cost-level summaries


class StatePrepKind(enum.Enum):
    VIA_ROTATIONS = "ViaRotations"
    ALIAS_SAMPLING = "AliasSampling"
    SPARSE_VIA_ROTATIONS = "SparseViaRotations"
    SPARSE_ALIAS = "SparseAlias"
    UNIFORM = "Uniform"


@attrs.frozen
class StatePrepCost:
    counts: GateCounts
    lookups: tuple  # (entries, bits) per lookup
    rotations: int
    detail: dict


def _lookup_toffoli(entries: int, bits: int) -> int:
    if entries < 2:
        return 0
    return int(qrom_toffoli(QROMVariant.PLAIN, entries, bits))


def state_prep_cost(kind: StatePrepKind, n_states: int, eps: float, sparsity: int | None = None) -> StatePrepCost:
    """Gate cost of preparing an N-state amplitude vector to precision eps.

    * ViaRotations: n = ceil(log2 N) rounds; round i loads 2^i angles of
      b = ceil(log2(n/eps)) bits (and unloads them) and applies one rotation
      by phase-gradient addition (b - 2 Toffolis).
    * AliasSampling: a uniform superposition, one lookup of N entries of
      n + mu bits, one mu-bit comparison and n controlled swaps.
    * Sparse variants replace N by the sparsity d in the lookups and carry an
      n-bit index per entry.
    """
    if n_states < 2:
        raise BadSize(f"need at least 2 states, got {n_states}")
    _check_eps(eps)
    n = selection_bitsize(n_states)
    if kind is StatePrepKind.UNIFORM:
        return StatePrepCost(uniform_superposition_cost(n_states, eps), (), 0, {"n": n})
    if kind in (StatePrepKind.VIA_ROTATIONS, StatePrepKind.SPARSE_VIA_ROTATIONS):
        b = max(3, math.ceil(math.log2(n / eps)))
        lookups, toffoli = [], 0
        for i in range(n):
            entries = 2**i if kind is StatePrepKind.VIA_ROTATIONS else min(2**i, sparsity or 2**i)
            lookups.append((entries, b))
            toffoli += 2 * _lookup_toffoli(entries, b) + (b - 2)
        return StatePrepCost(GateCounts(toffoli=toffoli), tuple(lookups), n, {"n": n, "b": b})
    mu = keep_bitsize(eps)
    if kind is StatePrepKind.ALIAS_SAMPLING:
        entries, bits = n_states, n + mu
        uniform = uniform_superposition_cost(n_states, eps)
    else:
        if sparsity is None:
            raise BadSize("sparse preparation needs a sparsity")
        entries, bits = sparsity, 2 * n + mu
        uniform = uniform_superposition_cost(sparsity, eps) if sparsity > 1 else GateCounts()
    toffoli = _lookup_toffoli(entries, bits) + mu + n
    counts = uniform + GateCounts(toffoli=toffoli, clifford=mu + 1)
    return StatePrepCost(counts, ((entries, bits),), 0, {"n": n, "mu": mu})
