"""Shor-style phase estimation for RSA moduli and elliptic-curve discrete logs."""

from __future__ import annotations

import enum
import functools
import math
import random

import attrs

from qre.ecc import ECPhaseEstimateR, ECPoint, ECWindowPhaseEstimateR
from qre.errors import BadParams, OffCurve, WindowTooLarge
from qre.gates import Controlled
from qre.ir import Bloq, Register, Signature, UInt
from qre.modarith import ModMulK
from qre.qpe import TextbookQPE, WindowKind, WindowState
from qre.resources import get_callees
from qre.symbolics import evaluate_int

SECP256K1_P = 2**256 - 2**32 - 977
SECP256K1_GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
SECP256K1_GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

#: Private key behind the demo public key of the secp256k1 preset.
DEMO_PRIVATE_KEY = 0xC0FFEE


class Scheme(enum.Enum):
    RSA = "RSA"
    ECC = "ECC"


def _bits(modulus: int) -> int:
    return math.ceil(math.log2(modulus))


@attrs.frozen
class ShorSpec:
    """One instance: an RSA modulus with generator g, or a curve with base point P and public key Q."""

    scheme: Scheme
    modulus: int
    window_bits: int = 0
    generator: int | None = None
    base: ECPoint | None = None
    pubkey: ECPoint | None = None

    def __attrs_post_init__(self):
        if self.n < 4:
            raise BadParams(f"need n >= 4, got n = {self.n}")
        if self.window_bits < 0:
            raise BadParams(f"window size must be non-negative, got {self.window_bits}")
        if self.window_bits > self.n:
            raise WindowTooLarge(f"window of {self.window_bits} bits exceeds n = {self.n}")
        if self.scheme is Scheme.RSA:
            if self.window_bits:
                raise BadParams("windowing is only modelled for the elliptic-curve scheme")
            if self.generator is None or math.gcd(self.generator, self.modulus) != 1:
                raise BadParams(f"generator {self.generator} must be coprime to {self.modulus}")
        else:
            for pt in (self.base, self.pubkey):
                if pt is None or pt.mod != self.modulus or not pt.on_curve():
                    raise OffCurve(f"{pt} is not a point mod {self.modulus}")
            if self.base.curve() != self.pubkey.curve():
                raise OffCurve("base point and public key lie on different curves")

    @property
    def n(self) -> int:
        return _bits(self.modulus)

    @classmethod
    def rsa(cls, modulus: int, generator: int = 2) -> "ShorSpec":
        return cls(Scheme.RSA, modulus, generator=generator)

    @classmethod
    def ecc(cls, base: ECPoint, pubkey: ECPoint, window_bits: int = 0) -> "ShorSpec":
        return cls(Scheme.ECC, base.mod, window_bits, base=base, pubkey=pubkey)


def secp256k1_base() -> ECPoint:
    return ECPoint(SECP256K1_GX, SECP256K1_GY, SECP256K1_P, 0, 7)


def secp256k1(window_bits: int = 0, private_key: int = DEMO_PRIVATE_KEY) -> ShorSpec:
    """The n = 256 preset: Bitcoin's curve with a demo key pair."""
    g = secp256k1_base()
    return ShorSpec.ecc(g, private_key * g, window_bits)


def _is_probable_prime(m: int, rounds: int = 32) -> bool:
    if m < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    rng = random.Random(m)
    for _ in range(rounds):
        x = pow(rng.randrange(2, m - 1), d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = pow(x, 2, m)
            if x == m - 1:
                break
        else:
            return False
    return True


def prime_below(bound: int) -> int:
    m = bound - 1 if bound % 2 == 0 else bound - 2
    while not _is_probable_prime(m):
        m -= 2
    return m


@functools.lru_cache(maxsize=None)
def rsa_demo_modulus(bits: int) -> int:
    """A semiprime of exactly ``bits`` bits from the two largest primes below 2^(bits/2)."""
    half = bits // 2
    p = prime_below(2**half)
    q = prime_below(2 ** (bits - half))
    while q == p:
        q = prime_below(q)
    return p * q


@attrs.frozen
class ECCDiscreteLog(Bloq):
    """Two phase estimations on the point register: one for P, one for Q."""

    spec: ShorSpec

    @property
    def signature(self):
        n = self.spec.n
        return Signature([Register("x", UInt(n)), Register("y", UInt(n))])

    def estimations(self) -> tuple[Bloq, Bloq]:
        s = self.spec
        if s.window_bits:
            return (ECWindowPhaseEstimateR(s.n, s.base, s.window_bits),
                    ECWindowPhaseEstimateR(s.n, s.pubkey, s.window_bits))
        return ECPhaseEstimateR(s.n, s.base), ECPhaseEstimateR(s.n, s.pubkey)

    def build_composite(self, bb, x, y):
        for pe in self.estimations():
            x, y = bb.add(pe, x=x, y=y)
        return {"x": x, "y": y}

    def declared_callees(self):
        out: dict = {}
        for pe in self.estimations():
            out[pe] = out.get(pe, 0) + 1
        return out

    def __str__(self):
        w = f", w={self.spec.window_bits}" if self.spec.window_bits else ""
        return f"ECCDiscreteLog(n={self.spec.n}{w})"


def shor_phase_estimation(spec: ShorSpec) -> Bloq:
    """The phase-estimation bloq for ``spec``; RSA uses n fast-forwarded controlled ModMulK."""
    if spec.scheme is Scheme.RSA:
        unitary = ModMulK(spec.n, spec.generator, spec.modulus)
        return TextbookQPE(unitary, WindowState(WindowKind.RECTANGULAR, spec.n), fast_forward=True)
    return ECCDiscreteLog(spec)


def count_calls(root: Bloq, kind: type) -> int:
    """Total invocations of bloqs of type ``kind`` beneath ``root``, multiplicities multiplied out."""
    memo: dict = {}

    def rec(b: Bloq) -> int:
        if b in memo:
            return memo[b]
        total = 0
        for c, m in (get_callees(b) or {}).items():
            m = evaluate_int(m)
            inner = c.subbloq if isinstance(c, Controlled) else c
            total += m * (1 if isinstance(inner, kind) else rec(c))
        memo[b] = total
        return total

    return rec(root)
