"""Generalized quantum signal processing.

A degree-d polynomial P(U) is applied as

    R_d A R_{d-1} A ... A R_0,     A = |0><0| (x) U + |1><1| (x) I

on a signal qubit and the system, where each R_k is a single-qubit unitary.
The first column of the product is (P(U), Q(U)), with Q a complementary
polynomial satisfying |P|^2 + |Q|^2 = 1 on the unit circle.
"""

from __future__ import annotations

import enum
import functools
import math
from typing import Sequence

import attrs
import numpy as np

from qre.errors import AngleSolveFailure, NormExceeded
from qre.gates import Controlled
from qre.ir import Bit, Bloq, Register, Signature
from qre.resources import GateCounts

#: Coefficients below this magnitude are treated as zero during the peel-off.
COEFF_TOL = 1e-12
#: Unit-circle samples used to check polynomial identities.
N_SAMPLES = 1024


def _coeffs(p) -> np.ndarray:
    return np.atleast_1d(np.asarray(p, dtype=complex))


def eval_poly(coeffs, z) -> np.ndarray:
    """sum_k c_k z^k with coefficients in increasing degree."""
    return np.polynomial.polynomial.polyval(z, _coeffs(coeffs))


def unit_circle(n: int = N_SAMPLES) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


@attrs.frozen
class GQSPPoly:
    """A pair (P, Q) of coefficient tuples in increasing degree."""

    P: tuple = attrs.field(converter=lambda c: tuple(complex(x) for x in _coeffs(c)))
    Q: tuple = attrs.field(converter=lambda c: tuple(complex(x) for x in _coeffs(c)))

    @property
    def degree(self) -> int:
        return max(len(self.P), len(self.Q)) - 1

    def identity_error(self, n: int = N_SAMPLES) -> float:
        """max over the unit circle of | |P|^2 + |Q|^2 - 1 |."""
        z = unit_circle(n)
        return float(np.max(np.abs(np.abs(eval_poly(self.P, z)) ** 2 + np.abs(eval_poly(self.Q, z)) ** 2 - 1)))

    def to_json(self) -> dict:
        return {"P": [[c.real, c.imag] for c in self.P], "Q": [[c.real, c.imag] for c in self.Q]}

    @classmethod
    def from_json(cls, data: dict) -> "GQSPPoly":
        return cls([complex(re, im) for re, im in data["P"]], [complex(re, im) for re, im in data["Q"]])


# ---------------------------------------------------------------------------
# Complementary polynomial


class ComplementMethod(enum.Enum):
    ROOT_FACTORIZATION = "RootFactorization"
    FFT = "FFT"


def _check_norm(p: np.ndarray, n: int = N_SAMPLES) -> None:
    peak = float(np.max(np.abs(eval_poly(p, unit_circle(n)))))
    if peak > 1 + 1e-9:
        raise NormExceeded(f"|P| reaches {peak:.12g} > 1 on the unit circle")


def _trim(p: np.ndarray) -> np.ndarray:
    nz = np.nonzero(np.abs(p) > COEFF_TOL)[0]
    return p[: nz[-1] + 1] if len(nz) else p[:1] * 0


def complementary_polynomial(p, method: ComplementMethod = ComplementMethod.ROOT_FACTORIZATION) -> np.ndarray:
    """Q of the same degree as P with |P|^2 + |Q|^2 = 1 on the unit circle."""
    p = _coeffs(p)
    _check_norm(p)
    if method is ComplementMethod.FFT:
        return _complement_fft(p)
    return _complement_roots(p)


def _complement_roots(p: np.ndarray) -> np.ndarray:
    d = len(p) - 1
    # z^d (1 - P(z) conj(P)(1/z)) as an ordinary polynomial of degree 2d
    g = -np.convolve(p, np.conj(p[::-1]))
    g[d] += 1
    g = _trim(g)
    if not np.any(np.abs(g) > COEFF_TOL):
        return np.zeros(d + 1, dtype=complex)
    # zero roots pair with the roots at infinity removed by trimming
    roots = np.roots(g[::-1]) if len(g) > 1 else np.array([], dtype=complex)
    mags = np.abs(roots)
    near = roots[np.abs(mags - 1) <= 1e-6]
    near = near[np.argsort(np.angle(near))]
    chosen = list(roots[mags < 1 - 1e-6]) + list(near[::2])
    q = np.array([1.0 + 0j])
    for r in chosen:
        q = np.convolve(q, [-r, 1])
    q = np.concatenate([q, np.zeros(max(0, d + 1 - len(q)))])[: d + 1]
    z = unit_circle()
    target = 1 - np.abs(eval_poly(p, z)) ** 2
    shape = np.abs(eval_poly(q, z)) ** 2
    scale = float(np.dot(target, shape) / np.dot(shape, shape))
    return math.sqrt(max(scale, 0.0)) * q


def _complement_fft(p: np.ndarray, n: int = 1 << 14) -> np.ndarray:
    """Minimum-phase spectral factor of 1 - |P|^2 via the cepstrum."""
    d = len(p) - 1
    # numpy's forward transform samples at e^{-2 pi i k / n}
    z = unit_circle(n).conj()
    target = np.clip(1 - np.abs(eval_poly(p, z)) ** 2, 1e-30, None)
    cep = np.fft.ifft(np.log(target) / 2)
    fold = np.zeros(n, dtype=complex)
    fold[0] = cep[0]
    fold[1: n // 2] = 2 * cep[1: n // 2]
    fold[n // 2] = cep[n // 2]
    q = np.fft.ifft(np.exp(np.fft.fft(fold)))
    return q[: d + 1]


# ---------------------------------------------------------------------------
# Single-qubit rotations


def su2_matrix(theta: float, phi: float, lambd: float, gamma: float = 0.0) -> np.ndarray:
    """e^{i gamma} Rz(phi) Ry(2 theta) Rz(lambda) in the convention used here."""
    c, s = math.cos(theta), math.sin(theta)
    return np.exp(1j * gamma) * np.array([
        [np.exp(-0.5j * (phi + lambd)) * c, -np.exp(-0.5j * (phi - lambd)) * s],
        [np.exp(0.5j * (phi - lambd)) * s, np.exp(0.5j * (phi + lambd)) * c],
    ])


def u2_to_su2_params(m: np.ndarray) -> tuple[float, float, float, float]:
    """(theta, phi, lambda, gamma) with su2_matrix(...) == m."""
    m = np.asarray(m, dtype=complex)
    gamma = float(np.angle(np.linalg.det(m))) / 2
    s = m * np.exp(-1j * gamma)
    a, b = s[0, 0], s[1, 0]
    theta = math.atan2(abs(b), abs(a))
    arg_a = float(np.angle(a)) if abs(a) > COEFF_TOL else 0.0
    arg_b = float(np.angle(b)) if abs(b) > COEFF_TOL else 0.0
    return theta, arg_b - arg_a, -arg_a - arg_b, gamma


@attrs.frozen
class SU2RotationGate(Bloq):
    """Arbitrary single-qubit unitary; three Z rotations at eps/3 each."""

    theta: float
    phi: float
    lambd: float
    gamma: float = 0.0
    eps: float = 1e-11

    @property
    def signature(self):
        return Signature([Register("q", Bit())])

    def my_tensor(self):
        return su2_matrix(self.theta, self.phi, self.lambd, self.gamma)

    def leaf_counts(self):
        return GateCounts(rotations=[(self.eps / 3, 3)])

    def adjoint(self):
        return SU2RotationGate(-self.theta, -self.lambd, -self.phi, -self.gamma, self.eps)


# ---------------------------------------------------------------------------
# Angle finding


def gqsp_rotations(p, q) -> list[np.ndarray]:
    """Single-qubit unitaries R_0..R_d realizing (P, Q) as the first column.

    Peels one degree at a time: R_d^dagger maps (P, Q) to (z P', Q') with
    deg P', Q' < d, using the vanishing z^{-d} coefficient of |P|^2 + |Q|^2.
    """
    p, q = _coeffs(p), _coeffs(q)
    d = max(len(p), len(q)) - 1
    p = np.concatenate([p, np.zeros(d + 1 - len(p))])
    q = np.concatenate([q, np.zeros(d + 1 - len(q))])
    mats = []
    for k in range(d, 0, -1):
        top, bottom = np.array([p[k], q[k]]), np.array([p[0], q[0]])
        if max(np.linalg.norm(top), np.linalg.norm(bottom)) < COEFF_TOL:
            m = np.eye(2, dtype=complex)
        elif np.linalg.norm(top) >= np.linalg.norm(bottom):
            r = np.linalg.norm(top)
            m = np.array([[np.conj(p[k]), np.conj(q[k])], [q[k], -p[k]]]) / r
        else:
            r = np.linalg.norm(bottom)
            m = np.array([[q[0], -p[0]], [np.conj(p[0]), np.conj(q[0])]]) / r
        new_p = m[0, 0] * p + m[0, 1] * q
        new_q = m[1, 0] * p + m[1, 1] * q
        mats.append(m.conj().T)
        # new_p has no constant term and new_q no z^k term
        p, q = new_p[1:k + 1], new_q[:k]
    norm = math.hypot(abs(p[0]), abs(q[0]))
    p0, q0 = p[0] / norm, q[0] / norm
    mats.append(np.array([[p0, -np.conj(q0)], [q0, np.conj(p0)]]))
    return mats[::-1]


def _first_column(mats: Sequence[np.ndarray], z: complex) -> np.ndarray:
    v = mats[0] @ np.array([1, 0], dtype=complex)
    for m in mats[1:]:
        v = m @ (np.array([z, 1]) * v)
    return v


@functools.lru_cache(maxsize=256)
def _solve(p: tuple, q: tuple) -> tuple:
    mats = gqsp_rotations(p, q)
    zs = unit_circle(16)
    for z in zs:
        col = _first_column(mats, z)
        want = np.array([eval_poly(p, z), eval_poly(q, z)])
        if np.max(np.abs(col - want)) > 1e-6:
            raise AngleSolveFailure(f"reconstructed polynomial differs by {np.max(np.abs(col - want)):.3g}")
    return tuple(u2_to_su2_params(m) for m in mats)


# ---------------------------------------------------------------------------
# The bloq


@attrs.frozen
class GQSP(Bloq):
    """P(U) U^{-negative_power} in the signal-zero block.

    ``U`` must have only Thru registers; the signal qubit comes first.
    """

    unitary: Bloq
    P: tuple = attrs.field(converter=lambda c: tuple(complex(x) for x in _coeffs(c)))
    Q: tuple = attrs.field(converter=lambda c: tuple(complex(x) for x in _coeffs(c)))
    negative_power: int = 0
    eps: float = 1e-11

    @property
    def degree(self) -> int:
        return max(len(self.P), len(self.Q)) - 1

    @property
    def signature(self):
        return Signature([Register("signal", Bit())] + list(self.unitary.signature))

    def rotations(self) -> list[SU2RotationGate]:
        return [SU2RotationGate(*params, eps=self.eps) for params in _solve(self.P, self.Q)]

    def build_composite(self, bb, signal, **regs):
        rots = self.rotations()
        signal = bb.add(rots[0], q=signal)
        cu = Controlled(self.unitary, ctrl_state=0)
        for r in rots[1:]:
            outs = bb.add_d(cu, ctrl=signal, **regs)
            signal = outs.pop("ctrl")
            regs = outs
            signal = bb.add(r, q=signal)
        inv = self.unitary.adjoint()
        for _ in range(self.negative_power):
            regs = bb.add_d(inv, **regs)
        return {"signal": signal, **regs}

    def declared_callees(self):
        rots = self.rotations()
        out: dict = {}
        for r in rots:
            out[r] = out.get(r, 0) + 1
        if self.degree:
            out[Controlled(self.unitary, ctrl_state=0)] = self.degree
        if self.negative_power:
            inv = self.unitary.adjoint()
            out[inv] = out.get(inv, 0) + self.negative_power
        return out

    def __str__(self):
        return f"GQSP[{self.unitary}](d={self.degree})"


def gqsp(u: Bloq, p, *, negative_power: int = 0, eps: float = 1e-11,
         method: ComplementMethod = ComplementMethod.ROOT_FACTORIZATION) -> GQSP:
    """GQSP bloq applying P(U), with the complementary polynomial computed here."""
    q = complementary_polynomial(p, method)
    return GQSP(u, p, q, negative_power, eps)


def gqsp_cost(degree: int, eps: float) -> dict:
    """Controlled-U calls and Z rotations for a degree-d GQSP sequence."""
    return {"controlled_u": degree, "su2": degree + 1, "z_rotations": 3 * (degree + 1),
            "rotation_eps": eps / 3}
