"""Symbolic T cost of Trotterized phase estimation for the 2D Fermi-Hubbard model.

Three error sources are kept as free symbols: Trotter error delta_ts,
rotation-synthesis error delta_ht and phase-estimation error delta_pe. A
p-th order product formula with error prefactor xi needs
(delta_ts / xi)^(-1/p) steps per unit time; phase estimation to precision
delta_pe calls the unit-time evolution 0.76 pi / delta_pe times.
"""

from __future__ import annotations

import math

import attrs

from qre.ir import Bloq, Register, Signature, UInt
from qre.resources import AggregationPolicy, GateCounts, ToffoliToT, gate_counts
from qre.symbolics import SymExpr, factor_terms, floor, simplify, sym, symbols

#: Unitary calls per unit of inverse phase precision.
QPE_CALL_PREFACTOR = 0.76 * math.pi

#: Arbitrary rotations and T gates in one 4-qubit hopping plaquette.
PLAQUETTE_ROTATIONS = 6
PLAQUETTE_T = 24

#: Arbitrary rotations per lattice site for the on-site terms.
SITE_ROTATIONS = 2


def _system(side) -> Signature:
    return Signature([Register("system", UInt(2 * sym(side) ** 2))])


@attrs.frozen
class HubbardInteraction(Bloq):
    """On-site interaction and chemical-potential phases on an L x L lattice."""

    side: SymExpr | int
    eps: SymExpr | float

    @property
    def signature(self):
        return _system(self.side)

    def leaf_counts(self):
        return GateCounts(rotations=[(self.eps, SITE_ROTATIONS * sym(self.side) ** 2)])


@attrs.frozen
class HoppingPlaquette(Bloq):
    """Hopping evolution on one plaquette of four sites."""

    eps: SymExpr | float

    @property
    def signature(self):
        return Signature([Register("plaquette", UInt(4))])

    def leaf_counts(self):
        return GateCounts(t=PLAQUETTE_T, rotations=[(self.eps, PLAQUETTE_ROTATIONS)])


@attrs.frozen
class HoppingLayer(Bloq):
    """floor(L^2 / 2) plaquettes covering the lattice in a checkerboard."""

    side: SymExpr | int
    eps: SymExpr | float

    @property
    def signature(self):
        return _system(self.side)

    def declared_callees(self):
        return {HoppingPlaquette(self.eps): floor(sym(self.side) ** 2 / 2)}


@attrs.frozen
class HubbardTrotterStep(Bloq):
    side: SymExpr | int
    eps: SymExpr | float

    @property
    def signature(self):
        return _system(self.side)

    def declared_callees(self):
        return {HubbardInteraction(self.side, self.eps): 1, HoppingLayer(self.side, self.eps): 1}


@attrs.frozen
class TrotterizedUnitary(Bloq):
    """Unit-time evolution as ``n_steps`` repetitions of one Trotter step."""

    step: Bloq
    n_steps: SymExpr | int

    @property
    def signature(self):
        return self.step.signature

    def declared_callees(self):
        return {self.step: self.n_steps}


@attrs.frozen
class HeisenbergQPE(Bloq):
    """Phase estimation to precision ``delta_pe`` by 0.76 pi / delta_pe unitary calls."""

    unitary: Bloq
    delta_pe: SymExpr | float

    @property
    def signature(self):
        return self.unitary.signature

    def declared_callees(self):
        return {self.unitary: QPE_CALL_PREFACTOR / sym(self.delta_pe)}


def hubbard_trotter_qpe(side=None, order=None, xi=None, delta_ts=None, delta_ht=None,
                        delta_pe=None, n_rotations=None) -> HeisenbergQPE:
    """The full bloq; omitted parameters become the symbols L, p, xi, Delta_TS, Delta_HT, Delta_PE, N_R.

    The synthesis budget delta_ht is split evenly over the N_R rotations of
    each of the steps in unit time.
    """
    L, p, x, ts, ht, pe, nr = symbols("L p xi Delta_TS Delta_HT Delta_PE N_R")
    side = L if side is None else side
    order = p if order is None else order
    xi = x if xi is None else xi
    delta_ts = ts if delta_ts is None else delta_ts
    delta_ht = ht if delta_ht is None else delta_ht
    delta_pe = pe if delta_pe is None else delta_pe
    n_rotations = nr if n_rotations is None else n_rotations
    n_steps = (sym(delta_ts) / xi) ** (-1 / sym(order))
    eps = sym(delta_ht) / (sym(n_rotations) * n_steps)
    step = HubbardTrotterStep(side, simplify(eps))
    return HeisenbergQPE(TrotterizedUnitary(step, simplify(n_steps)), delta_pe)


def hubbard_trotter_t_cost(**params) -> SymExpr:
    """Total T count with rotations synthesized directly, common factors pulled out front."""
    counts = gate_counts(hubbard_trotter_qpe(**params))
    return factor_terms(counts.total_t(AggregationPolicy(toffoli_to_t=ToffoliToT.KEEP)))


def rotations_per_step(side) -> SymExpr:
    """N_R for one step: SITE_ROTATIONS L^2 + PLAQUETTE_ROTATIONS floor(L^2 / 2)."""
    s = sym(side)
    return simplify(SITE_ROTATIONS * s**2 + PLAQUETTE_ROTATIONS * floor(s**2 / 2))
