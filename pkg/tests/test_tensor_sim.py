import cmath

import attrs
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qre.arithmetic import MAJ, UMA, Add, AddK, Subtract
from qre.block_encoding import be_unitary, linear_combination, product
from qre.classical_sim import call_classically, exhaustive_inputs
from qre.errors import BadAncillaCount, MissingTensor, TooLarge, UnboundSymbol
from qre.gates import CNOT, CSwap, Controlled, Hadamard, Identity, MatrixGate, SGate, Swap, TGate, Toffoli, XGate, XorK
from qre.gqsp import gqsp
from qre.ir import Bit, Bloq, Register, Signature
from qre.registry import REGISTRY, build_bloq
from qre.rotations import PhaseGradientState, phase_gradient_amplitudes
from qre.sparse import explicit_matrix_encoding
from qre.symbolics import evaluate
from qre.tensor_sim import (apply_to_state, basis_state, block_extract, equal_up_to_phase, is_unitary,
                            phase_overlap, tensor_of)

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]])
S = np.diag([1, 1j])
T = np.diag([1, cmath.exp(1j * np.pi / 4)])
EXPLICIT = np.array([[0, 1 / 4], [1 / 3, 0.467]])


def test_x_gate_tensor():
    assert np.array_equal(tensor_of(XGate()), X)


def test_adder_graph_on_all_basis_states():
    u = tensor_of(Add(4), via_decomposition=True)
    for a in range(16):
        for b in range(16):
            out = call_classically(Add(4), {"a": a, "b": b})
            col = u[:, a * 16 + b]
            assert np.allclose(col, basis_state(out["a"] * 16 + out["b"], 8))


def test_gqsp_half_x_squared_plus_one():
    angles = (0.3, -1.1)
    u = MatrixGate(np.diag([cmath.exp(1j * a) for a in angles]))
    coeffs = [0.5, 0.0, 0.5]
    block = block_extract(tensor_of(gqsp(u, coeffs)), 1)
    want = np.diag([0.5 * (1 + cmath.exp(2j * a)) for a in angles])
    assert np.max(np.abs(block - want)) < 1e-8


def test_block_extract_without_ancillas_is_identity_map():
    u = tensor_of(Toffoli())
    assert np.array_equal(block_extract(u, 0), u)
    be = be_unitary(Toffoli())
    assert evaluate(be.ancillas) == 0
    assert np.allclose(be.encoded_matrix(), u)


def test_explicit_matrix_extraction_within_epsilon():
    be = explicit_matrix_encoding(EXPLICIT, 1e-3)
    assert be.extraction_error(EXPLICIT) <= 1e-3
    assert is_unitary(be.unitary())


def test_linear_combination_of_square_and_identity():
    a = explicit_matrix_encoding(EXPLICIT, 1e-3)
    sq = product(a, a)
    be = linear_combination([sq, be_unitary(Identity())], [2.0, -1.0])
    target = 2 * EXPLICIT @ EXPLICIT - np.eye(2)
    assert be.extraction_error(target) <= float(evaluate(be.epsilon))


def test_bad_ancilla_count():
    with pytest.raises(BadAncillaCount):
        block_extract(np.eye(4), 3)
    with pytest.raises(BadAncillaCount):
        block_extract(np.eye(3), 0)


def test_too_large():
    with pytest.raises(TooLarge):
        tensor_of(Add(8), cap=14)


@attrs.frozen
class Opaque(Bloq):
    @property
    def signature(self):
        return Signature([Register("q", Bit())])


def test_missing_tensor():
    with pytest.raises(MissingTensor):
        tensor_of(Opaque())


def test_global_phase_is_ignored():
    u = tensor_of(Add(2))
    assert equal_up_to_phase(u, cmath.exp(0.7j) * u)
    assert not equal_up_to_phase(u, tensor_of(Subtract(2)))
    assert phase_overlap(u, 1j * u) == pytest.approx(1.0)


def test_apply_to_state_matches_matrix():
    rng = np.random.default_rng(5)
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    b = AddK(21, 6)
    assert np.allclose(apply_to_state(b, v), tensor_of(b) @ v)


def test_state_tensor_of_decomposition_matches_direct():
    b = PhaseGradientState(3)
    direct = tensor_of(b).ravel()
    assert np.allclose(direct, phase_gradient_amplitudes(3))
    assert equal_up_to_phase(tensor_of(b, via_decomposition=True).ravel(), direct)


# ---------------------------------------------------------------------------
# unitarity over the registry

_SKIP = {"ecc", "ec_pe", "ec_window_pe"}  # need 15 live qubits


def _registry_cases():
    out = []
    for name, entry in sorted(REGISTRY.items()):
        if name in _SKIP:
            continue
        for i, ex in enumerate(entry.examples):
            b = build_bloq(name, ex)
            try:
                left, right = int(b.signature.total_left_qubits), int(b.signature.total_right_qubits)
            except (TypeError, UnboundSymbol):
                continue
            if left != right or left > 10 or not left:
                continue
            if not (b.has_decomposition() or b.my_tensor() is not None or b.has_classical_action()):
                continue
            out.append(pytest.param(b, id=f"{name}-{i}"))
    return out


@pytest.mark.parametrize("bloq", _registry_cases())
def test_registry_bloqs_are_unitary(bloq):
    if bloq.has_decomposition():
        assert is_unitary(tensor_of(bloq, via_decomposition=True), atol=1e-10)
    assert is_unitary(tensor_of(bloq), atol=1e-10)


CLASSICAL = [Add(3), Subtract(3), AddK(4, 5), XorK(4, 9), CNOT(), Swap(), CSwap(), Toffoli(), MAJ(), UMA()]


@pytest.mark.parametrize("bloq", CLASSICAL, ids=str)
def test_classical_tensor_is_the_permutation(bloq):
    u = tensor_of(bloq)
    assert set(np.unique(np.abs(u))) <= {0.0, 1.0}
    regs = bloq.signature.lefts()
    widths = [int(r.total_bits) for r in regs]
    if any(r.shape for r in regs):
        inputs = []
        for i in range(2 ** sum(widths)):
            bits = [(i >> (sum(widths) - 1 - k)) & 1 for k in range(sum(widths))]
            vals, pos = {}, 0
            for r, w in zip(regs, widths):
                chunk = bits[pos:pos + w]
                vals[r.name] = chunk if r.shape else int("".join(map(str, chunk)), 2)
                pos += w
            inputs.append((i, vals))
    else:
        inputs = []
        for vals in exhaustive_inputs(bloq):
            i = 0
            for r, w in zip(regs, widths):
                i = (i << w) | vals[r.name]
            inputs.append((i, vals))
    for i, vals in inputs:
        out = call_classically(bloq, vals)
        j = 0
        for r, w in zip(regs, widths):
            v = out[r.name]
            chunk = [int(x) for x in np.asarray(v).ravel()] if r.shape else \
                [(v >> (w - 1 - k)) & 1 for k in range(w)]
            for bit in chunk:
                j = (j << 1) | bit
        assert u[j, i] == 1


@pytest.mark.parametrize("bloq", [Add(3), AddK(3, 5), MAJ(), UMA()], ids=str)
def test_decomposition_matches_direct_action(bloq):
    assert np.allclose(tensor_of(bloq, via_decomposition=True), tensor_of(bloq))


def test_controlled_wrapper_tensor():
    u = tensor_of(Controlled(MatrixGate(H)))
    want = np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), H]])
    assert np.allclose(u, want)
    u0 = tensor_of(Controlled(MatrixGate(H), ctrl_state=0))
    assert np.allclose(u0, np.block([[H, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]]))


# ---------------------------------------------------------------------------
# composition soundness on random circuits

ONE_QUBIT = {"h": (Hadamard(), H), "x": (XGate(), X), "s": (SGate(), S), "t": (TGate(), T)}


@attrs.frozen
class Circuit(Bloq):
    """Three qubits; ops are (gate, qubit) or ('cnot', ctrl, target)."""

    ops: tuple

    @property
    def signature(self):
        return Signature([Register("q", Bit(), shape=(3,))])

    def build_composite(self, bb, q):
        q = list(q)
        for op in self.ops:
            if op[0] == "cnot":
                q[op[1]], q[op[2]] = bb.add(CNOT(), ctrl=q[op[1]], target=q[op[2]])
            else:
                q[op[1]] = bb.add(ONE_QUBIT[op[0]][0], q=q[op[1]])
        return {"q": q}


def _dense(ops):
    u = np.eye(8, dtype=complex)
    for op in ops:
        if op[0] == "cnot":
            m = np.zeros((8, 8))
            for i in range(8):
                bits = [(i >> (2 - k)) & 1 for k in range(3)]
                bits[op[2]] ^= bits[op[1]]
                m[bits[0] * 4 + bits[1] * 2 + bits[2], i] = 1
        else:
            mats = [np.eye(2)] * 3
            mats[op[1]] = ONE_QUBIT[op[0]][1]
            m = np.kron(np.kron(mats[0], mats[1]), mats[2])
        u = m @ u
    return u


OPS = st.one_of(
    st.tuples(st.sampled_from(sorted(ONE_QUBIT)), st.integers(0, 2)),
    st.tuples(st.just("cnot"), st.integers(0, 2), st.integers(0, 2)).filter(lambda t: t[1] != t[2]),
)


@settings(max_examples=60, deadline=None)
@given(st.lists(OPS, max_size=12))
def test_decomposition_tensor_is_product_of_gate_tensors(ops):
    u = tensor_of(Circuit(tuple(ops)))
    assert np.allclose(u, _dense(ops), atol=1e-12)
    assert is_unitary(u)
