"""Block encodings with (alpha, ancillas, epsilon) propagation.

A block encoding of A is a unitary B on ancilla + system qubits with
A ~ alpha * <0|B|0> on the ancillas. Ancilla qubits always come first (most
significant) so that the encoded block is the top-left corner of the tensor.

Composite encodings compute their tensors densely from their parts and report
their costs through declared callees.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence

import attrs
import numpy as np

from qre.errors import AlphaNotOne, BadParams, EmptyParts, MissingTensor, NotReflection, TooLarge
from qre.gates import Controlled, GlobalPhase, MultiCToffoli, XGate, ZGate
from qre.ir import Bloq, Register, Signature, UInt
from qre.resources import GateCounts
from qre.symbolics import SymExpr, ceil, evaluate, is_constant, log2, simplify, smax, sym
from qre.tensor_sim import block_extract, tensor_of

#: Largest total width for which encodings are checked numerically.
NUMERIC_CHECK_QUBITS = 10


def _s(x) -> SymExpr:
    return simplify(sym(x))


def _num(x) -> float:
    return float(evaluate(x))


def _int(x) -> int:
    return int(evaluate(x))


def _concrete(*xs) -> bool:
    return all(not isinstance(x, SymExpr) or is_constant(x) for x in xs)


def _abs(x):
    if isinstance(x, SymExpr):
        return sym(abs(evaluate(x))) if is_constant(x) else x
    return abs(x)


@attrs.frozen
class BlockEncoding:
    """An (alpha, ancillas, epsilon) block encoding implemented by ``inner``."""

    inner: Bloq
    alpha: SymExpr = attrs.field(converter=_s)
    ancillas: SymExpr = attrs.field(converter=_s)
    epsilon: SymExpr = attrs.field(converter=_s)
    system_bitsize: SymExpr = attrs.field(converter=_s)
    is_reflection: bool = False

    def __attrs_post_init__(self):
        if _concrete(self.alpha, self.ancillas, self.epsilon):
            if _num(self.alpha) <= 0 or _num(self.ancillas) < 0 or _num(self.epsilon) < 0:
                raise BadParams(f"need alpha > 0, ancillas >= 0, epsilon >= 0; got {self.params}")

    @property
    def params(self) -> tuple[SymExpr, SymExpr, SymExpr]:
        return self.alpha, self.ancillas, self.epsilon

    @property
    def total_qubits(self) -> int:
        return _int(self.ancillas) + _int(self.system_bitsize)

    def unitary(self, cap: int = 14) -> np.ndarray:
        """Full tensor of the encoding unitary, ancillas first."""
        return tensor_of(self.inner, cap=cap)

    def encoded_matrix(self, cap: int = 14) -> np.ndarray:
        """alpha * <0|B|0>: the matrix this encoding represents."""
        return _num(self.alpha) * block_extract(self.unitary(cap), _int(self.ancillas))

    def extraction_error(self, target: np.ndarray, cap: int = 14) -> float:
        """Spectral-norm distance between ``target`` and the encoded matrix."""
        return float(np.linalg.norm(np.asarray(target) - self.encoded_matrix(cap), 2))

    def __str__(self):
        return f"B[{self.inner}](alpha={self.alpha}, a={self.ancillas}, eps={self.epsilon})"


def _numeric_reflection(u: np.ndarray) -> bool:
    return np.allclose(u, u.conj().T, atol=1e-10) and np.allclose(u @ u, np.eye(len(u)), atol=1e-10)


def _try_unitary(be_or_bloq) -> np.ndarray | None:
    bloq = be_or_bloq.inner if isinstance(be_or_bloq, BlockEncoding) else be_or_bloq
    try:
        n = bloq.signature.total_left_qubits
        if not _concrete(n) or _int(n) > NUMERIC_CHECK_QUBITS:
            return None
        return tensor_of(bloq, cap=NUMERIC_CHECK_QUBITS)
    except (MissingTensor, TooLarge, NotImplementedError):
        return None


# ---------------------------------------------------------------------------
# Primitive encodings


def be_unitary(u: Bloq, is_reflection: bool | None = None) -> BlockEncoding:
    """Any unitary is a (1, 0, 0) encoding of itself.

    ``is_reflection`` is checked numerically when left as None.
    """
    n = u.signature.total_left_qubits
    if is_reflection is None:
        mat = _try_unitary(u)
        is_reflection = mat is not None and _numeric_reflection(mat)
    return BlockEncoding(u, 1, 0, 0, n, is_reflection)


@attrs.frozen
class SymbolicEncoding(Bloq):
    """Placeholder encoding with only its parameters known."""

    alpha: SymExpr = attrs.field(converter=_s)
    ancillas: SymExpr = attrs.field(converter=_s)
    epsilon: SymExpr = attrs.field(converter=_s)
    system_bitsize: SymExpr = attrs.field(converter=_s)
    label: str = "A"

    @property
    def signature(self):
        return _be_signature(self.ancillas, self.system_bitsize)

    def __str__(self):
        return self.label


def symbolic_encoding(alpha, ancillas, epsilon, system_bitsize, label: str = "A",
                      is_reflection: bool = False) -> BlockEncoding:
    inner = SymbolicEncoding(alpha, ancillas, epsilon, system_bitsize, label)
    return BlockEncoding(inner, alpha, ancillas, epsilon, system_bitsize, is_reflection)


def _be_signature(ancillas, system_bitsize) -> Signature:
    regs = []
    if not (_concrete(ancillas) and _int(ancillas) == 0):
        regs.append(Register("ancilla", UInt(ancillas)))
    regs.append(Register("system", UInt(system_bitsize)))
    return Signature(regs)


def _embed(u: np.ndarray, own_ancillas: int, shared_ancillas: int) -> np.ndarray:
    """Act with an encoding on the low ``own_ancillas`` of a wider ancilla register."""
    return np.kron(np.eye(2 ** (shared_ancillas - own_ancillas)), u)


def _permute_qubits(u: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Reorder the qubits of an operator: new qubit i is old qubit perm[i]."""
    n = len(perm)
    t = u.reshape((2,) * (2 * n))
    t = t.transpose(list(perm) + [n + p for p in perm])
    return t.reshape(2**n, 2**n)


# ---------------------------------------------------------------------------
# Reflection about the all-zero ancilla state


@attrs.frozen
class ReflectZero(Bloq):
    """2|0><0| - I on an n-qubit register."""

    bitsize: int

    @property
    def signature(self):
        return Signature([Register("q", UInt(self.bitsize))])

    def my_tensor(self):
        d = np.full(2**self.bitsize, -1.0)
        d[0] = 1.0
        return np.diag(d)

    def leaf_counts(self):
        n = sym(self.bitsize)
        if _concrete(n) and _int(n) <= 2:
            return GateCounts(clifford=2 * n + 1)
        return None

    def declared_callees(self):
        if self.leaf_counts() is not None:
            return None
        n = sym(self.bitsize)
        return {MultiCToffoli(n - 1): 1, XGate(): 2 * n, ZGate(): 1}

    def controlled_callees(self):
        n = sym(self.bitsize)
        return {MultiCToffoli(n): 1, XGate(): 2 * n, ZGate(): 1}

    def adjoint(self):
        return self


# ---------------------------------------------------------------------------
# Composite encodings


class _Composite(Bloq):
    """Shared plumbing: ancilla + system registers and a dense tensor."""

    def _params(self) -> BlockEncoding:
        raise NotImplementedError

    @property
    def signature(self):
        be = self._params()
        return _be_signature(be.ancillas, be.system_bitsize)


def _check_parts(parts) -> tuple:
    parts = tuple(parts)
    if not parts:
        raise EmptyParts("a composite block encoding needs at least one part")
    return parts


@attrs.frozen
class TensorProductEncoding(_Composite):
    parts: tuple = attrs.field(converter=_check_parts)

    def _params(self):
        return _tensor_product_params(self.parts, self)

    def my_tensor(self):
        mats = [p.unitary() for p in self.parts]
        anc = [_int(p.ancillas) for p in self.parts]
        sysb = [_int(p.system_bitsize) for p in self.parts]
        u = mats[0]
        for m in mats[1:]:
            u = np.kron(u, m)
        # current order: (anc_0, sys_0, anc_1, sys_1, ...); move all ancillas first
        blocks, pos = [], 0
        for a, s in zip(anc, sysb):
            blocks.append((list(range(pos, pos + a)), list(range(pos + a, pos + a + s))))
            pos += a + s
        perm = [q for a, _ in blocks for q in a] + [q for _, s in blocks for q in s]
        return _permute_qubits(u, perm)

    def declared_callees(self):
        return _count_inners(self.parts)

    def __str__(self):
        return "⊗".join(str(p.inner) for p in self.parts)


def _tensor_product_params(parts, inner) -> BlockEncoding:
    alpha, anc, eps, n = sym(1), sym(0), sym(0), sym(0)
    for p in parts:
        alpha = alpha * p.alpha
        anc = anc + p.ancillas
        eps = eps + p.alpha * p.epsilon
        n = n + p.system_bitsize
    return BlockEncoding(inner, alpha, anc, eps, n, all(p.is_reflection for p in parts))


@attrs.frozen
class ProductEncoding(_Composite):
    """Encodes parts[0] @ parts[1] @ ...; one flag qubit per intermediate step.

    After every part but the last, a flag records whether the shared ancilla
    left the zero state, so post-selecting all flags on zero keeps only the
    product of the blocks.
    """

    parts: tuple = attrs.field(converter=_check_parts)

    def _params(self):
        return _product_params(self.parts, self)

    def my_tensor(self):
        k = len(self.parts)
        shared = max(_int(p.ancillas) for p in self.parts)
        n = _int(self.parts[0].system_bitsize)
        flags = k - 1
        dim_rest = 2 ** (shared + n)
        u = np.eye(2**flags * dim_rest, dtype=complex)
        for step, p in enumerate(reversed(self.parts)):
            layer = np.kron(np.eye(2**flags), _embed(p.unitary(), _int(p.ancillas), shared))
            u = layer @ u
            if step < k - 1:
                u = _flag_nonzero(flags, step, shared, n) @ u
        return u

    def declared_callees(self):
        out = _count_inners(self.parts)
        shared = max(_int(p.ancillas) for p in self.parts) if _concrete(*[p.ancillas for p in self.parts]) \
            else smax(*[p.ancillas for p in self.parts])
        steps = len(self.parts) - 1
        if steps and not (_concrete(shared) and _int(shared) == 0):
            out[MultiCToffoli(shared)] = out.get(MultiCToffoli(shared), 0) + steps
            out[XGate()] = out.get(XGate(), 0) + steps * (2 * sym(shared) + 1)
        return out

    def __str__(self):
        return "·".join(str(p.inner) for p in self.parts)


def _flag_nonzero(flags: int, which: int, shared: int, n: int) -> np.ndarray:
    """Permutation flipping flag ``which`` when the shared ancilla is nonzero."""
    dim = 2 ** (flags + shared + n)
    perm = np.empty(dim, dtype=int)
    for idx in range(dim):
        anc = (idx >> n) & (2**shared - 1)
        perm[idx] = idx ^ (1 << (shared + n + flags - 1 - which)) if anc else idx
    out = np.zeros((dim, dim))
    out[perm, np.arange(dim)] = 1
    return out


def _product_params(parts, inner) -> BlockEncoding:
    alpha, eps = sym(1), sym(0)
    for p in parts:
        alpha = alpha * p.alpha
        eps = eps + p.alpha * p.epsilon
    anc = (len(parts) - 1) + smax(*[p.ancillas for p in parts])
    return BlockEncoding(inner, alpha, anc, eps, parts[0].system_bitsize, False)


@attrs.frozen
class PhaseEncoding(_Composite):
    """Encodes e^{i phi} A."""

    part: BlockEncoding
    phi: float

    def _params(self):
        refl = self.part.is_reflection and math.isclose(math.cos(self.phi) ** 2, 1.0)
        return BlockEncoding(self, self.part.alpha, self.part.ancillas, self.part.epsilon,
                             self.part.system_bitsize, refl)

    def my_tensor(self):
        return np.exp(1j * self.phi) * self.part.unitary()

    def declared_callees(self):
        return {self.part.inner: 1, GlobalPhase(self.phi / math.pi): 1}

    def __str__(self):
        return f"e^(i{self.phi:g})·{self.part.inner}"


@attrs.frozen
class LCUPrepare(Bloq):
    """Householder reflection sending |0> to sum_i sqrt(w_i) |i>."""

    weights: tuple
    eps: float = 1e-11

    @property
    def bitsize(self) -> int:
        return max(0, math.ceil(math.log2(len(self.weights))))

    @property
    def signature(self):
        return Signature([Register("selection", UInt(self.bitsize))])

    def my_tensor(self):
        dim = 2**self.bitsize
        w = np.zeros(dim)
        w[: len(self.weights)] = np.sqrt(np.asarray(self.weights, dtype=float) / sum(self.weights))
        e0 = np.zeros(dim)
        e0[0] = 1
        v = e0 - w
        if np.linalg.norm(v) < 1e-15:
            return np.eye(dim)
        v = v / np.linalg.norm(v)
        return np.eye(dim) - 2 * np.outer(v, v)

    def leaf_counts(self):
        from qre.state_prep import StatePrepKind, state_prep_cost

        if len(self.weights) < 2:
            return GateCounts()
        return state_prep_cost(StatePrepKind.VIA_ROTATIONS, len(self.weights), self.eps).counts

    def adjoint(self):
        return self


@attrs.frozen
class LinearCombinationEncoding(_Composite):
    """Encodes sum_i lambda_i A_i by PREPARE, SELECT, PREPARE-dagger."""

    parts: tuple = attrs.field(converter=_check_parts)
    lambdas: tuple = attrs.field(converter=tuple)
    prep_eps: float = 1e-11

    def __attrs_post_init__(self):
        if len(self.parts) != len(self.lambdas):
            raise BadParams("need one coefficient per part")
        for lam in self.lambdas:
            if isinstance(lam, complex) and lam.imag != 0:
                raise BadParams(f"coefficients must be real, got {lam}")

    def _params(self):
        return _linear_combination_params(self.parts, self.lambdas, self)

    def _weights(self) -> tuple:
        return tuple(abs(float(lam)) * _num(p.alpha) for p, lam in zip(self.parts, self.lambdas))

    def my_tensor(self):
        k = len(self.parts)
        sel = max(0, math.ceil(math.log2(k)))
        shared = max(_int(p.ancillas) for p in self.parts)
        n = _int(self.parts[0].system_bitsize)
        rest = 2 ** (shared + n)
        select = np.eye(2**sel * rest, dtype=complex)
        for i, (p, lam) in enumerate(zip(self.parts, self.lambdas)):
            sign = -1.0 if float(lam) < 0 else 1.0
            select[i * rest:(i + 1) * rest, i * rest:(i + 1) * rest] = \
                sign * _embed(p.unitary(), _int(p.ancillas), shared)
        prep = np.kron(LCUPrepare(self._weights()).my_tensor(), np.eye(rest))
        return prep.conj().T @ select @ prep

    def declared_callees(self):
        k = len(self.parts)
        prep = LCUPrepare(self._weights(), self.prep_eps)
        out: dict = {}
        if k > 1:
            out = {prep: 2, MultiCToffoli(2): max(0, k - 1)}
        for p, lam in zip(self.parts, self.lambdas):
            b = Controlled(p.inner) if k > 1 else p.inner
            out[b] = out.get(b, 0) + 1
            if float(lam) < 0:
                out[ZGate()] = out.get(ZGate(), 0) + 1
        return out

    def __str__(self):
        return "+".join(f"{float(lam):g}·{p.inner}" for p, lam in zip(self.parts, self.lambdas))


def _linear_combination_params(parts, lambdas, inner) -> BlockEncoding:
    alpha = sum((_abs(lam) * p.alpha for p, lam in zip(parts, lambdas)), sym(0))
    anc = ceil(log2(sym(len(parts)))) + smax(*[p.ancillas for p in parts])
    eps = sum((_abs(lam) for lam in lambdas), sym(0)) * smax(*[p.epsilon for p in parts])
    refl = all(p.is_reflection for p in parts) and all(_concrete(lam) for lam in lambdas)
    return BlockEncoding(inner, alpha, anc, eps, parts[0].system_bitsize, refl)


def _count_inners(parts) -> dict:
    out: dict = {}
    for p in parts:
        out[p.inner] = out.get(p.inner, 0) + 1
    return out


# ---------------------------------------------------------------------------
# Qubitization


@attrs.frozen
class QubitizationWalk(Bloq):
    """W = (2|0><0| - I) B for a reflection encoding B.

    On each eigenvector of A/alpha with eigenvalue x, W has eigenvalues
    e^{+-i arccos x}.
    """

    encoding: BlockEncoding

    @property
    def signature(self):
        return _be_signature(self.encoding.ancillas, self.encoding.system_bitsize)

    def my_tensor(self):
        a = _int(self.encoding.ancillas)
        refl = np.kron(ReflectZero(a).my_tensor(), np.eye(2 ** _int(self.encoding.system_bitsize)))
        return refl @ self.encoding.unitary()

    def declared_callees(self):
        out = {self.encoding.inner: 1}
        if not (_concrete(self.encoding.ancillas) and _int(self.encoding.ancillas) == 0):
            out[ReflectZero(self.encoding.ancillas)] = 1
        return out

    def controlled_callees(self):
        """Controlling the reflection alone controls the walk."""
        out = {self.encoding.inner: 1}
        if not (_concrete(self.encoding.ancillas) and _int(self.encoding.ancillas) == 0):
            out[Controlled(ReflectZero(self.encoding.ancillas))] = 1
        return out

    def adjoint(self):
        return _WalkAdjoint(self)

    def __str__(self):
        return f"W[{self.encoding.inner}]"


@attrs.frozen
class _WalkAdjoint(Bloq):
    walk: QubitizationWalk

    @property
    def signature(self):
        return self.walk.signature

    def my_tensor(self):
        return self.walk.my_tensor().conj().T

    def declared_callees(self):
        return self.walk.declared_callees()

    def adjoint(self):
        return self.walk

    def __str__(self):
        return f"{self.walk}†"


def qubitization_walk(be: BlockEncoding) -> QubitizationWalk:
    """Walk operator of a reflection encoding.

    Small encodings are checked numerically; larger ones must carry the
    ``is_reflection`` flag.
    """
    mat = _try_unitary(be)
    if mat is not None:
        if not _numeric_reflection(mat):
            raise NotReflection(f"{be} does not square to the identity")
    elif not be.is_reflection:
        raise NotReflection(f"{be} is not declared a reflection and cannot be checked numerically")
    return QubitizationWalk(be)


@attrs.frozen
class ChebyshevEncoding(_Composite):
    """T_j(A/alpha) from j applications of the walk operator."""

    walk: QubitizationWalk
    order: int

    def _params(self):
        be = self.walk.encoding
        return BlockEncoding(self, 1, be.ancillas, be.epsilon, be.system_bitsize, self.order == 0)

    def my_tensor(self):
        w = self.walk.my_tensor()
        return np.linalg.matrix_power(w, self.order)

    def declared_callees(self):
        return {self.walk: self.order} if self.order else {}

    def __str__(self):
        return f"T_{self.order}[{self.walk.encoding.inner}]"


def chebyshev_via_walk(be: BlockEncoding, order: int) -> BlockEncoding:
    """Encoding of T_order(A/alpha); costs ``order`` walk steps."""
    if order < 0:
        raise BadParams(f"order must be non-negative, got {order}")
    return ChebyshevEncoding(qubitization_walk(be), order)._params()


# ---------------------------------------------------------------------------
# Public composition API


class Composition(enum.Enum):
    TENSOR_PRODUCT = "TensorProduct"
    PRODUCT = "Product"
    PHASE = "Phase"
    LINEAR_COMBINATION = "LinearCombination"
    CHEBYSHEV = "Chebyshev"


def tensor_product(*parts: BlockEncoding) -> BlockEncoding:
    return TensorProductEncoding(parts)._params()


def product(*parts: BlockEncoding) -> BlockEncoding:
    """Encoding of parts[0] @ parts[1] @ ... (the last part acts first)."""
    parts = _check_parts(parts)
    sizes = {str(p.system_bitsize) for p in parts}
    if len(sizes) > 1:
        raise BadParams(f"product parts act on different system sizes: {sorted(sizes)}")
    return ProductEncoding(parts)._params()


def phase(part: BlockEncoding, phi: float) -> BlockEncoding:
    return PhaseEncoding(part, phi)._params()


def linear_combination(parts: Sequence[BlockEncoding], lambdas: Sequence, *,
                       flatten: bool = False) -> BlockEncoding:
    parts, lambdas = tuple(parts), tuple(lambdas)
    if flatten:
        parts, lambdas = collect_like_terms(parts, lambdas)
    parts = _check_parts(parts)
    sizes = {str(p.system_bitsize) for p in parts}
    if len(sizes) > 1:
        raise BadParams(f"terms act on different system sizes: {sorted(sizes)}")
    return LinearCombinationEncoding(parts, lambdas)._params()


def chebyshev(part: BlockEncoding, order: int) -> BlockEncoding:
    """Encoding of T_order(A); requires a reflection encoding with alpha = 1."""
    if not (_concrete(part.alpha) and math.isclose(_num(part.alpha), 1.0)):
        raise AlphaNotOne(f"Chebyshev composition needs alpha = 1, got {part.alpha}")
    return chebyshev_via_walk(part, order)


def collect_like_terms(parts: Sequence[BlockEncoding], lambdas: Sequence) -> tuple[tuple, tuple]:
    """Flatten nested linear combinations and merge repeated terms."""
    order: list = []
    coef: dict = {}

    def visit(p: BlockEncoding, lam):
        inner = p.inner
        if isinstance(inner, LinearCombinationEncoding):
            for q, mu in zip(inner.parts, inner.lambdas):
                visit(q, lam * mu)
            return
        if p not in coef:
            order.append(p)
            coef[p] = 0
        coef[p] += lam

    for p, lam in zip(parts, lambdas):
        visit(p, lam)
    kept = [p for p in order if coef[p] != 0]
    return tuple(kept), tuple(coef[p] for p in kept)


def be_compose(kind: Composition, parts: Sequence[BlockEncoding], *, phi: float = 0.0,
               lambdas: Sequence | None = None, order: int = 0) -> BlockEncoding:
    """Dispatch to one composition rule."""
    parts = _check_parts(parts)
    if kind is Composition.TENSOR_PRODUCT:
        return tensor_product(*parts)
    if kind is Composition.PRODUCT:
        return product(*parts)
    if kind is Composition.PHASE:
        return phase(parts[0], phi)
    if kind is Composition.LINEAR_COMBINATION:
        if lambdas is None:
            raise BadParams("linear combination needs coefficients")
        return linear_combination(parts, lambdas)
    return chebyshev(parts[0], order)


def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix of a Pauli string such as 'XZ' (first letter = first qubit)."""
    table = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]),
             "Z": np.diag([1, -1])}
    out = np.ones((1, 1), dtype=complex)
    for ch in label:
        out = np.kron(out, table[ch])
    return out


@attrs.frozen
class PauliString(Bloq):
    """Tensor product of single-qubit Paulis, e.g. 'XZ'."""

    label: str

    @property
    def signature(self):
        return Signature([Register("q", UInt(len(self.label)))])

    def my_tensor(self):
        return pauli_matrix(self.label)

    def leaf_counts(self):
        return GateCounts(clifford=sum(ch != "I" for ch in self.label))

    def controlled_callees(self):
        n = sum(ch != "I" for ch in self.label)
        return {Controlled(XGate()): n} if n else {}

    def adjoint(self):
        return self

    def __str__(self):
        return self.label


def pauli_lcu(terms: Sequence[tuple[float, str]]) -> BlockEncoding:
    """Linear combination of Pauli strings, a reflection encoding of sum c_k P_k."""
    parts = [be_unitary(PauliString(p), is_reflection=True) for _, p in terms]
    return linear_combination(parts, [c for c, _ in terms])


__all__ = [
    "BlockEncoding", "Composition", "be_unitary", "symbolic_encoding", "tensor_product", "product",
    "phase", "linear_combination", "chebyshev", "chebyshev_via_walk", "collect_like_terms",
    "be_compose", "qubitization_walk", "QubitizationWalk", "ReflectZero", "pauli_lcu", "pauli_matrix",
    "LCUPrepare", "PauliString",
]
