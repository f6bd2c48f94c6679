"""Quantum phase estimation with window states.

The control register of m qubits starts in a window state sum_x w_x |x>;
controlled powers U^{2^i} imprint e^{2 pi i phi x} and an inverse QFT reads
out k with amplitude sum_x w_x e^{2 pi i x (phi - k / 2^m)} / sqrt(2^m).
For real windows the Holevo variance of the estimate is
<cos(dphi)>^{-2} - 1 with <cos(dphi)> = sum_x w_x w_{x+1}.
"""

from __future__ import annotations

import enum
import math

import attrs
import numpy as np

from qre.errors import BadParams, BadWindow
from qre.gates import Controlled, Hadamard
from qre.ir import Bloq, Register, Side, Signature, UInt
from qre.resources import GateCounts

#: Float slack when taking ceilings of closed-form bit counts.
_CEIL_SLACK = 1e-9


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_SLACK)


class WindowKind(enum.Enum):
    RECTANGULAR = "Rectangular"
    SINE = "Sine"
    KAISER = "Kaiser"


def bessel_i0(x: float) -> float:
    """Modified Bessel function I_0 by its power series."""
    total, term, k = 1.0, 1.0, 0
    half = x / 2
    while True:
        k += 1
        term *= (half / k) ** 2
        total += term
        if term < 1e-15 * total:
            return total


@attrs.frozen
class WindowState:
    kind: WindowKind
    bitsize: int
    kaiser_alpha: float = 0.0

    def __attrs_post_init__(self):
        if self.bitsize < 1:
            raise BadWindow(f"window needs at least one qubit, got {self.bitsize}")
        if self.kind is WindowKind.KAISER and self.kaiser_alpha < 0:
            raise BadWindow(f"Kaiser parameter must be non-negative, got {self.kaiser_alpha}")

    def amplitudes(self) -> np.ndarray:
        """Normalized real amplitudes w_x, x = 0 .. 2^m - 1."""
        size = 2**self.bitsize
        x = np.arange(size)
        if self.kind is WindowKind.RECTANGULAR:
            w = np.ones(size)
        elif self.kind is WindowKind.SINE:
            w = np.sin(np.pi * (x + 1) / (size + 1))
        else:
            # centred on the register: offset -M .. M-1 with M = 2^(m-1)
            half = size // 2
            u = (x - half) / half
            arg = np.pi * self.kaiser_alpha * np.sqrt(np.clip(1 - u * u, 0, None))
            w = np.array([bessel_i0(a) for a in arg])
        return w / np.linalg.norm(w)


def holevo_variance(window: WindowState) -> float:
    """Exact Holevo variance of the phase estimate from this window."""
    w = window.amplitudes()
    mean_cos = float(np.dot(w[:-1], w[1:]))
    return mean_cos**-2 - 1


def outcome_probabilities(window: WindowState, phase: float) -> np.ndarray:
    """Distribution of k for eigenphase 2 pi * phase."""
    w = window.amplitudes()
    size = len(w)
    amps = np.fft.fft(w * np.exp(2j * np.pi * phase * np.arange(size))) / math.sqrt(size)
    p = np.abs(amps) ** 2
    return p / p.sum()


def sample_phase_errors(window: WindowState, n_phases: int, seed: int = 0) -> np.ndarray:
    """Signed errors 2 pi (k / 2^m - phase), wrapped to (-pi, pi], for random phases."""
    rng = np.random.default_rng(seed)
    size = 2**window.bitsize
    phases = rng.random(n_phases)
    out = np.empty(n_phases)
    for i, ph in enumerate(phases):
        k = rng.choice(size, p=outcome_probabilities(window, ph))
        d = 2 * np.pi * (k / size - ph)
        out[i] = (d + np.pi) % (2 * np.pi) - np.pi
    return out


def empirical_holevo_variance(window: WindowState, n_phases: int = 10_000, seed: int = 0) -> float:
    errs = sample_phase_errors(window, n_phases, seed)
    return float(np.mean(np.cos(errs)) ** -2 - 1)


def tail_probability(window: WindowState, eps: float, n_grid: int = 64) -> float:
    """Mean over a phase grid of Pr[|dphi| > 2 pi eps]."""
    size = 2**window.bitsize
    k = np.arange(size)
    total = 0.0
    for ph in (np.arange(n_grid) + 0.5) / n_grid / size:
        d = np.abs(((k / size - ph) + 0.5) % 1 - 0.5)
        total += float(outcome_probabilities(window, ph)[d > eps].sum())
    return total / n_grid


# ---------------------------------------------------------------------------
# Bits needed


class Metric(enum.Enum):
    CONFIDENCE_INTERVAL = "ConfidenceInterval"
    HOLEVO_VARIANCE = "HolevoVariance"


def qpe_bits_for(metric: Metric, kind: WindowKind, eps: float, delta: float | None = None,
                 kaiser_slack: int = 0) -> int:
    """Control-register size reaching precision eps (and failure probability delta)."""
    if not 0 < eps < 1:
        raise BadParams(f"eps must lie in (0, 1), got {eps}")
    if metric is Metric.HOLEVO_VARIANCE:
        if kind is WindowKind.RECTANGULAR:
            return _ceil(2 * math.log2(math.pi / eps))
        if kind is WindowKind.SINE:
            return _ceil(math.log2(math.pi / eps))
        raise BadParams("no Holevo-variance bit count for the Kaiser window")
    if delta is None or not 0 < delta < 1:
        raise BadParams(f"delta must lie in (0, 1), got {delta}")
    if kind is WindowKind.RECTANGULAR:
        return _ceil(math.log2(1 / eps) + math.log2(2 + 2 / delta))
    if kind is WindowKind.SINE:
        return _ceil(math.log2(1 / eps) + math.log2(math.pi ** (2 / 3) / (48 ** (1 / 3) * delta ** (1 / 3)) + 2))
    return _ceil(math.log2(math.log(1 / delta) / eps)) + kaiser_slack


# ---------------------------------------------------------------------------
# Bloqs


@attrs.frozen
class WindowStatePrep(Bloq):
    """Fresh control register in a window state.

    Rectangular costs m Hadamards. Sine and Kaiser are costed as two
    rotations per qubit.
    """

    window: WindowState
    eps: float = 1e-11

    @property
    def signature(self):
        return Signature([Register("phase", UInt(self.window.bitsize), side=Side.RIGHT)])

    def my_tensor(self):
        return self.window.amplitudes().reshape(-1, 1).astype(complex)

    def build_composite(self, bb):
        if self.window.kind is not WindowKind.RECTANGULAR:
            raise NotImplementedError("only the rectangular window decomposes to gates")
        bits = bb.split(bb.allocate(UInt(self.window.bitsize)))
        for j in range(len(bits)):
            bits[j] = bb.add(Hadamard(), q=bits[j])
        return {"phase": bb.join(bits)}

    def has_decomposition(self) -> bool:
        return self.window.kind is WindowKind.RECTANGULAR

    def leaf_counts(self):
        if self.has_decomposition():
            return None
        m = self.window.bitsize
        return GateCounts(clifford=2 * m, rotations=[(self.eps / (2 * m), 2 * m)])

    def __str__(self):
        return f"{self.window.kind.value}Window({self.window.bitsize})"


@attrs.frozen
class QFT(Bloq):
    """|x> -> sum_k e^{2 pi i x k / 2^m} |k> / sqrt(2^m).

    Textbook: m(m-1)/2 controlled phases. Approximate: controlled phases
    between qubits more than b = ceil(log2(m / eps)) apart are dropped. Each
    controlled phase is three Z rotations.
    """

    bitsize: int
    eps: float = 1e-11
    approximate: bool = False

    @property
    def signature(self):
        return Signature([Register("q", UInt(self.bitsize))])

    def my_tensor(self):
        size = 2**self.bitsize
        k = np.arange(size)
        return np.exp(2j * np.pi * np.outer(k, k) / size) / math.sqrt(size)

    def n_controlled_phases(self) -> int:
        m = self.bitsize
        if not self.approximate:
            return m * (m - 1) // 2
        b = max(1, math.ceil(math.log2(m / self.eps)))
        return sum(min(m - 1 - i, b) for i in range(m))

    def leaf_counts(self):
        n_rot = 3 * self.n_controlled_phases()
        rots = [(self.eps / n_rot, n_rot)] if n_rot else []
        return GateCounts(clifford=self.bitsize + 2 * self.n_controlled_phases(), rotations=rots)


@attrs.frozen
class TextbookQPE(Bloq):
    """Window prep, controlled powers of U, inverse QFT.

    Without fast-forwarding the powers cost 2^m - 1 controlled-U calls. With
    ``fast_forward`` the unitary must provide ``power(k)`` and each of the m
    controlled powers is one call.
    """

    unitary: Bloq
    window: WindowState
    fast_forward: bool = False

    @property
    def bitsize(self) -> int:
        return self.window.bitsize

    @property
    def signature(self):
        return Signature([Register("phase", UInt(self.bitsize), side=Side.RIGHT)] + list(self.unitary.signature))

    def _powers(self) -> list[Bloq]:
        """U^(2^i) for i < m, each squared from the previous one."""
        if not self.fast_forward:
            return [self.unitary] * self.bitsize
        out = [self.unitary]
        for _ in range(self.bitsize - 1):
            out.append(out[-1].power(2))
        return out

    def build_composite(self, bb, **regs):
        m = self.bitsize
        bits = bb.split(bb.add(WindowStatePrep(self.window)))
        for i, u in enumerate(self._powers()):
            # bit m-1-i carries weight 2^i
            cu = Controlled(u)
            for _ in range(1 if self.fast_forward else 2**i):
                outs = bb.add_d(cu, ctrl=bits[m - 1 - i], **regs)
                bits[m - 1 - i] = outs.pop("ctrl")
                regs = outs
        phase = bb.add(QFT(m).adjoint(), q=bb.join(bits))
        return {"phase": phase, **regs}

    def declared_callees(self):
        m = self.bitsize
        out: dict = {WindowStatePrep(self.window): 1, QFT(m).adjoint(): 1}
        if self.fast_forward:
            for u in self._powers():
                b = Controlled(u)
                out[b] = out.get(b, 0) + 1
        else:
            out[Controlled(self.unitary)] = 2**m - 1
        return out

    def __str__(self):
        return f"QPE[{self.unitary}](m={self.bitsize}, {self.window.kind.value})"


@attrs.frozen
class QubitizationQPE(Bloq):
    """Phase estimation on a walk operator, cost level only.

    Each controlled walk step is costed as one uncontrolled walk plus one
    controlled reflection.
    """

    walk: Bloq
    window: WindowState

    @property
    def signature(self):
        return Signature([Register("phase", UInt(self.window.bitsize), side=Side.RIGHT)]
                         + list(self.walk.signature))

    def declared_callees(self):
        from qre.block_encoding import ReflectZero

        m = self.window.bitsize
        steps = 2**m - 1
        anc = self.walk.encoding.ancillas
        return {WindowStatePrep(self.window): 1, QFT(m).adjoint(): 1, self.walk: steps,
                Controlled(ReflectZero(anc)): steps}


def qpe_assemble(unitary: Bloq, window: WindowState, *, fast_forward: bool = False) -> TextbookQPE:
    if not isinstance(window, WindowState):
        raise BadWindow(f"expected a WindowState, got {window!r}")
    if fast_forward and not hasattr(unitary, "power"):
        raise BadParams(f"{unitary} cannot be fast-forwarded")
    return TextbookQPE(unitary, window, fast_forward)
