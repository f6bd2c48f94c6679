import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qre.block_encoding import (Composition, be_compose, be_unitary, chebyshev, chebyshev_via_walk,
                                collect_like_terms, linear_combination, pauli_lcu, pauli_matrix, phase, product,
                                qubitization_walk, symbolic_encoding, tensor_product)
from qre.errors import (AlphaNotOne, BadParams, BadWindow, DegreeOverflow, EmptyParts, NormExceeded, NotReflection,
                        OracleShapeMismatch)
from qre.gates import Hadamard, Identity, MatrixGate, XGate, ZGate
from qre.gqsp import (ComplementMethod, GQSPPoly, complementary_polynomial, eval_poly, gqsp, gqsp_cost,
                      unit_circle)
from qre.hamsim import bessel_tail, hamsim_gqsp, jacobi_anger_order
from qre.modarith import ModMulK
from qre.qpe import (Metric, QubitizationQPE, WindowKind, WindowState, WindowStatePrep, empirical_holevo_variance,
                     holevo_variance, qpe_assemble, qpe_bits_for, tail_probability)
from qre.resources import gate_counts
from qre.sparse import (ExplicitEntryOracle, SymmetricBandedRowColumnOracle, TopLeftRowColumnOracle,
                        UniformEntryOracle, be_sparse_matrix, explicit_matrix_encoding)
from qre.symbolics import evaluate, simplify, symbols, to_text
from qre.tensor_sim import block_extract, equal_up_to_phase, is_unitary, phase_overlap, tensor_of

EXPLICIT = np.array([[0, 1 / 4], [1 / 3, 0.467]])
ISING = [(0.5, "ZZ"), (0.3, "XI"), (0.2, "IX")]


def ising_matrix():
    return sum(c * pauli_matrix(p) for c, p in ISING)


def _num(x):
    return float(evaluate(x))


# ---------------------------------------------------------------------------
# primitive encodings


def test_unitary_encoding_parameters():
    be = be_unitary(XGate())
    assert tuple(_num(v) for v in be.params) == (1, 0, 0)
    assert np.array_equal(be.encoded_matrix(), tensor_of(XGate()))
    twice = be_unitary(be.inner)
    assert twice.params == be.params


def test_explicit_matrix_within_epsilon():
    be = explicit_matrix_encoding(EXPLICIT, 1e-3)
    assert _num(be.alpha) == 2
    assert _num(be.ancillas) == 2
    assert be.extraction_error(EXPLICIT) <= 1e-3


def test_uniform_zero_entry_gives_zero_block():
    oracle = TopLeftRowColumnOracle(2)
    be = be_sparse_matrix(oracle, oracle, UniformEntryOracle(2, 0.0))
    assert np.max(np.abs(be.encoded_matrix())) < 1e-12


def test_banded_identity_extracts_identity_over_sparsity():
    band = SymmetricBandedRowColumnOracle(2, 1)
    be = be_sparse_matrix(band, band, ExplicitEntryOracle(2, np.eye(4), 8))
    assert _num(be.alpha) == 3
    assert np.allclose(block_extract(be.unitary(), 3), np.eye(4) / 3, atol=1e-12)


def test_banded_tridiagonal_matches_dense_oracle():
    band = SymmetricBandedRowColumnOracle(2, 1)
    be = be_sparse_matrix(band, band, UniformEntryOracle(2, 0.5))
    dense = np.zeros((4, 4))
    for i in range(4):
        for d in (-1, 0, 1):
            dense[i, (i + d) % 4] = 0.5
    assert be.extraction_error(dense) < 1e-10


def test_oracle_shape_mismatch():
    with pytest.raises(OracleShapeMismatch):
        be_sparse_matrix(TopLeftRowColumnOracle(2), TopLeftRowColumnOracle(3), UniformEntryOracle(2, 0.5))
    with pytest.raises(OracleShapeMismatch):
        ExplicitEntryOracle(1, np.eye(4))
    with pytest.raises(OracleShapeMismatch):
        UniformEntryOracle(1, 1.5)


# ---------------------------------------------------------------------------
# composition rules, symbolic


alpha1, alpha2, anc1, anc2, eps1, eps2 = symbols("alpha1 alpha2 a1 a2 eps1 eps2")


def _pair():
    return (symbolic_encoding(alpha1, anc1, eps1, 3, "A"), symbolic_encoding(alpha2, anc2, eps2, 3, "B"))


def _same(x, y):
    return to_text(simplify(x)) == to_text(simplify(y))


def test_tensor_product_rule():
    a, b = _pair()
    be = tensor_product(a, b)
    assert _same(be.alpha, alpha1 * alpha2)
    assert _same(be.ancillas, anc1 + anc2)
    assert _same(be.epsilon, alpha1 * eps1 + alpha2 * eps2)
    assert _num(be.system_bitsize) == 6


def test_product_rule():
    from qre.symbolics import smax
    a, b = _pair()
    be = product(a, b)
    assert _same(be.alpha, alpha1 * alpha2)
    assert _same(be.ancillas, 1 + smax(anc1, anc2))
    assert _same(be.epsilon, alpha1 * eps1 + alpha2 * eps2)


def test_linear_combination_rule():
    from qre.symbolics import ceil, log2, smax, sym
    a, b = _pair()
    be = linear_combination([a, b], [2, -3])
    assert _same(be.alpha, 2 * alpha1 + 3 * alpha2)
    assert _same(be.ancillas, ceil(log2(sym(2))) + smax(anc1, anc2))
    assert _same(be.epsilon, 5 * smax(eps1, eps2))


def test_phase_keeps_parameters():
    a, _ = _pair()
    assert phase(a, 0.0).params == a.params
    assert phase(a, 1.3).params == a.params


def test_tensor_product_of_unitaries_is_exact():
    be = tensor_product(be_unitary(XGate()), be_unitary(Hadamard()))
    assert tuple(_num(v) for v in be.params) == (1, 0, 0)
    assert np.allclose(be.encoded_matrix(), np.kron(tensor_of(XGate()), tensor_of(Hadamard())))


def test_second_chebyshev_by_linear_combination():
    a = be_unitary(ZGate())
    t2 = linear_combination([product(a, a), be_unitary(Identity())], [2, -1])
    assert _num(t2.alpha) == 3
    alpha = symbols("alpha")[0]
    s = symbolic_encoding(alpha, 1, 0, 1)
    ts = linear_combination([product(s, s), be_unitary(Identity())], [2, -1])
    assert _same(ts.alpha, 2 * alpha * alpha + 1)
    assert evaluate(ts.alpha, {"alpha": 1}) == 3


def test_second_chebyshev_tensor():
    a = explicit_matrix_encoding(EXPLICIT, 1e-3)
    t2 = linear_combination([product(a, a), be_unitary(Identity())], [2, -1])
    assert t2.extraction_error(2 * EXPLICIT @ EXPLICIT - np.eye(2)) <= _num(t2.epsilon) + 1e-8


def test_composite_tensors_match_dense_algebra():
    x, h = be_unitary(XGate()), be_unitary(Hadamard())
    tx, th = tensor_of(XGate()), tensor_of(Hadamard())
    assert np.allclose(product(x, h).encoded_matrix(), tx @ th)
    assert np.allclose(phase(x, 0.4).encoded_matrix(), cmath.exp(0.4j) * tx)
    lc = linear_combination([x, h], [0.25, 0.75])
    assert np.allclose(lc.encoded_matrix(), 0.25 * tx + 0.75 * th)
    assert is_unitary(lc.unitary())


def test_collect_like_terms_flattens_nested_sums():
    x, h = be_unitary(XGate()), be_unitary(Hadamard())
    inner = linear_combination([x, h], [1, 2])
    parts, lambdas = collect_like_terms([inner, x], [3, 1])
    assert parts == (x, h)
    assert lambdas == (4, 6)
    flat = linear_combination([inner, x], [3, 1], flatten=True)
    assert _num(flat.alpha) == 10
    parts, lambdas = collect_like_terms([x, x], [1, -1])
    assert parts == () and lambdas == ()


def test_composition_dispatch_and_errors():
    x = be_unitary(XGate())
    assert be_compose(Composition.PHASE, [x], phi=0.0).params == x.params
    assert be_compose(Composition.LINEAR_COMBINATION, [x, x], lambdas=[1, 1]).params == \
        linear_combination([x, x], [1, 1]).params
    with pytest.raises(BadParams):
        be_compose(Composition.LINEAR_COMBINATION, [x])
    with pytest.raises(EmptyParts):
        be_compose(Composition.PRODUCT, [])
    with pytest.raises(AlphaNotOne):
        chebyshev(pauli_lcu([(1.0, "Z"), (1.0, "X")]), 2)


# ---------------------------------------------------------------------------
# walk and Chebyshev


def test_walk_on_trivially_encoded_z():
    w = qubitization_walk(be_unitary(ZGate()))
    ev = np.linalg.eigvals(w.my_tensor())
    assert np.allclose(sorted(np.cos(np.angle(ev))), [-1, 1])


def test_walk_eigenphases_match_ising_spectrum():
    be = pauli_lcu(ISING)
    w = np.linalg.eigvals(qubitization_walk(be).my_tensor())
    energies = np.linalg.eigvalsh(ising_matrix()) / _num(be.alpha)
    for e in energies:
        for sign in (1, -1):
            target = cmath.exp(sign * 1j * math.acos(e))
            assert np.min(np.abs(w - target)) < 1e-8


def test_walk_squared_on_eigenvector():
    be = pauli_lcu(ISING)
    u = qubitization_walk(be).my_tensor()
    vals, vecs = np.linalg.eig(u)
    v = vecs[:, 0]
    assert np.allclose(u @ u @ v, vals[0] ** 2 * v, atol=1e-10)


def test_walk_needs_a_reflection():
    with pytest.raises(NotReflection):
        qubitization_walk(be_unitary(MatrixGate(np.diag([1, 1j]))))
    with pytest.raises(NotReflection):
        qubitization_walk(symbolic_encoding(1, 20, 0, 20))
    declared = symbolic_encoding(1, 20, 0, 20, is_reflection=True)
    assert qubitization_walk(declared).encoding == declared


def test_chebyshev_orders():
    be = pauli_lcu(ISING)
    h = ising_matrix() / _num(be.alpha)
    vals, vecs = np.linalg.eigh(h)
    t0 = chebyshev_via_walk(be, 0)
    assert np.allclose(t0.encoded_matrix(), np.eye(4))
    assert chebyshev_via_walk(be, 1).extraction_error(h) < 1e-10
    t3 = vecs @ np.diag(4 * vals**3 - 3 * vals) @ vecs.conj().T
    assert chebyshev_via_walk(be, 3).extraction_error(t3) < 1e-6


def test_chebyshev_cost_is_order_walk_steps():
    be = pauli_lcu(ISING)
    walk = qubitization_walk(be)
    assert chebyshev_via_walk(be, 5).inner.declared_callees() == {walk: 5}
    one = gate_counts(walk)
    five = gate_counts(chebyshev_via_walk(be, 5).inner)
    assert five == one * 5


# ---------------------------------------------------------------------------
# complementary polynomials and GQSP


def test_complement_of_half_x_squared_plus_one():
    q = complementary_polynomial([0.5, 0, 0.5])
    z = unit_circle()
    # (x^2 - 1) / 2 up to a global phase
    ref = eval_poly([-0.5, 0, 0.5], z)
    got = eval_poly(q, z)
    ratio = got[np.abs(ref) > 1e-3] / ref[np.abs(ref) > 1e-3]
    assert np.allclose(ratio, ratio[0], atol=1e-6)
    assert abs(abs(ratio[0]) - 1) < 1e-6
    assert GQSPPoly([0.5, 0, 0.5], q).identity_error() < 1e-6


def test_complement_of_constants():
    assert np.allclose(complementary_polynomial([1.0]), 0)
    q = complementary_polynomial([0.0])
    assert abs(abs(q[0]) - 1) < 1e-12


def test_norm_exceeded():
    with pytest.raises(NormExceeded):
        complementary_polynomial([0.7, 0.7])


@pytest.mark.parametrize("method", list(ComplementMethod))
def test_both_methods_satisfy_identity(method):
    p = np.array([0.1, 0.3 - 0.2j, 0.25, -0.1j])
    assert GQSPPoly(p, complementary_polynomial(p, method)).identity_error() < 1e-6


POLY = st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False), min_size=1, max_size=7)


@settings(max_examples=80, deadline=None)
@given(POLY)
def test_complement_identity_property(coeffs):
    p = np.array(coeffs, dtype=complex)
    peak = np.max(np.abs(eval_poly(p, unit_circle())))
    if peak < 1e-6:
        return
    p = 0.95 * p / peak
    pair = GQSPPoly(p, complementary_polynomial(p))
    assert pair.identity_error() < 1e-6
    assert np.max(np.abs(eval_poly(pair.P, unit_circle()))) <= 1 + 1e-9


def test_poly_json_round_trip():
    pair = GQSPPoly([0.5, 0, 0.5], complementary_polynomial([0.5, 0, 0.5]))
    assert GQSPPoly.from_json(pair.to_json()) == pair


def _diag_unitary(*angles):
    return MatrixGate(np.diag([cmath.exp(1j * a) for a in angles]))


def test_gqsp_on_two_qubit_diagonal():
    angles = (0.3, -1.1, 2.0, 0.9)
    u = _diag_unitary(*angles)
    block = block_extract(tensor_of(gqsp(u, [0.5, 0, 0.5])), 1)
    want = np.diag([0.5 * (1 + cmath.exp(2j * a)) for a in angles])
    assert np.max(np.abs(block - want)) < 1e-7


def test_gqsp_monomial_is_the_unitary():
    u = _diag_unitary(0.3, -1.1)
    block = block_extract(tensor_of(gqsp(u, [0, 1])), 1)
    assert np.allclose(block, tensor_of(u), atol=1e-9)


def test_gqsp_cost_rule():
    cost = gqsp_cost(20, 1e-8)
    assert (cost["controlled_u"], cost["su2"], cost["z_rotations"]) == (20, 21, 63)
    b = gqsp(_diag_unitary(0.1, 0.2), [0.5, 0, 0.5])
    calls = b.declared_callees()
    assert sum(v for k, v in calls.items() if type(k).__name__ == "SU2RotationGate") == 3
    assert sum(v for k, v in calls.items() if type(k).__name__ == "Controlled") == 2


# ---------------------------------------------------------------------------
# Hamiltonian simulation


def test_hamsim_at_time_zero():
    be = hamsim_gqsp(pauli_lcu(ISING), 0.0, 1e-6)
    assert be.inner.degree == 0
    assert np.allclose(be.encoded_matrix(), np.eye(4), atol=1e-9)


def test_hamsim_matches_matrix_exponential():
    lcu = pauli_lcu(ISING)
    t = 2.0 / _num(lcu.alpha)
    be = hamsim_gqsp(lcu, t, 1e-6)
    assert (_num(be.alpha), _num(be.ancillas)) == (1, _num(lcu.ancillas) + 1)
    got = be.encoded_matrix()
    want = expm(-1j * ising_matrix() * t)
    ph = np.vdot(want.ravel(), got.ravel())
    ph /= abs(ph)
    assert np.linalg.norm(got - ph * want, 2) < 2e-6


def test_hamsim_degree_grows_with_time():
    k = jacobi_anger_order(5, 1e-5)
    assert k >= 5
    assert bessel_tail(5, k) <= 0.5e-5 < bessel_tail(5, k - 1)
    with pytest.raises(DegreeOverflow):
        jacobi_anger_order(50, 1e-5, max_order=10)


# ---------------------------------------------------------------------------
# phase estimation


def test_bits_for_confidence_and_holevo():
    assert qpe_bits_for(Metric.CONFIDENCE_INTERVAL, WindowKind.RECTANGULAR, 1e-3, 0.1) == \
        math.ceil(math.log2(1e3) + math.log2(22)) == 15
    assert qpe_bits_for(Metric.HOLEVO_VARIANCE, WindowKind.SINE, math.pi / 1024) == 10
    assert qpe_bits_for(Metric.HOLEVO_VARIANCE, WindowKind.RECTANGULAR, math.pi / 1024) == 20
    sine_ci = math.ceil(math.log2(1e3) + math.log2(math.pi ** (2 / 3) / (48 ** (1 / 3) * 0.1 ** (1 / 3)) + 2))
    assert qpe_bits_for(Metric.CONFIDENCE_INTERVAL, WindowKind.SINE, 1e-3, 0.1) == sine_ci
    kaiser = math.ceil(math.log2(1e3 * math.log(10)))
    assert qpe_bits_for(Metric.CONFIDENCE_INTERVAL, WindowKind.KAISER, 1e-3, 0.1) == kaiser
    assert qpe_bits_for(Metric.CONFIDENCE_INTERVAL, WindowKind.KAISER, 1e-3, 0.1, kaiser_slack=3) == kaiser + 3
    with pytest.raises(BadParams):
        qpe_bits_for(Metric.CONFIDENCE_INTERVAL, WindowKind.RECTANGULAR, 1e-3)
    with pytest.raises(BadParams):
        qpe_bits_for(Metric.HOLEVO_VARIANCE, WindowKind.SINE, 2.0)


def test_holevo_variance_of_one_bit_window():
    assert holevo_variance(WindowState(WindowKind.RECTANGULAR, 1)) == pytest.approx(math.tan(math.pi / 3) ** 2)


def test_sine_window_amplitudes():
    amps = WindowState(WindowKind.SINE, 2).amplitudes()
    raw = np.sin(np.pi * (np.arange(4) + 1) / 5)
    assert np.allclose(amps, raw / np.linalg.norm(raw))
    assert np.allclose(tensor_of(WindowStatePrep(WindowState(WindowKind.SINE, 2))).ravel(), amps)


@pytest.mark.parametrize("kind", list(WindowKind))
@pytest.mark.parametrize("m", [1, 3, 6])
def test_windows_are_normalized(kind, m):
    w = WindowState(kind, m, kaiser_alpha=1.5)
    assert abs(np.linalg.norm(w.amplitudes()) - 1) < 1e-12


def test_bad_window():
    with pytest.raises(BadWindow):
        WindowState(WindowKind.SINE, 0)
    with pytest.raises(BadWindow):
        qpe_assemble(XGate(), 3)


@pytest.mark.parametrize("m", [4, 6, 8])
def test_sine_beats_rectangular_in_holevo_variance(m):
    assert holevo_variance(WindowState(WindowKind.SINE, m)) < holevo_variance(WindowState(WindowKind.RECTANGULAR, m))


def test_empirical_holevo_tracks_exact():
    for kind in (WindowKind.SINE, WindowKind.RECTANGULAR):
        w = WindowState(kind, 5)
        assert empirical_holevo_variance(w, 4000, seed=1) == pytest.approx(holevo_variance(w), rel=0.25)


def test_kaiser_tail_decreases_with_shape_parameter():
    tails = [tail_probability(WindowState(WindowKind.KAISER, 6, a), 4 / 64) for a in (0, 0.5, 1, 1.5, 2, 3)]
    assert all(x >= y for x, y in zip(tails, tails[1:]))
    assert tails[0] > tails[-1]


def test_textbook_qpe_call_counts():
    q = qpe_assemble(Hadamard(), WindowState(WindowKind.RECTANGULAR, 3))
    calls = q.declared_callees()
    assert sum(v for k, v in calls.items() if type(k).__name__ == "Controlled") == 7
    amps = WindowState(WindowKind.RECTANGULAR, 3).amplitudes()
    assert len(amps) == 8 and np.allclose(amps, 1 / math.sqrt(8))


def test_fast_forwarded_qpe_uses_one_call_per_bit():
    q = qpe_assemble(ModMulK(2048, 3, 2**2048 - 159), WindowState(WindowKind.RECTANGULAR, 2048), fast_forward=True)
    calls = q.declared_callees()
    assert sum(v for k, v in calls.items() if type(k).__name__ == "Controlled") == 2048
    with pytest.raises(BadParams):
        qpe_assemble(XGate(), WindowState(WindowKind.RECTANGULAR, 2), fast_forward=True)


def test_qpe_recovers_an_eigenphase():
    phi = 5 / 16
    u = MatrixGate(np.diag([1, cmath.exp(2j * math.pi * phi)]))
    q = qpe_assemble(u, WindowState(WindowKind.RECTANGULAR, 4))
    out = tensor_of(q, via_decomposition=True)[:, 1]
    probs = np.abs(out) ** 2
    # phase register first, system qubit last
    k = int(np.argmax(probs)) >> 1
    assert probs.max() == pytest.approx(1.0, abs=1e-9)
    assert k == 5


def test_qubitization_qpe_costs_one_controlled_reflection_per_step():
    be = pauli_lcu(ISING)
    walk = qubitization_walk(be)
    q = QubitizationQPE(walk, WindowState(WindowKind.SINE, 3))
    calls = q.declared_callees()
    assert calls[walk] == 7
    assert sum(v for k, v in calls.items() if type(k).__name__ == "Controlled") == 7


def test_phase_overlap_helper_is_symmetric_in_phase():
    u = pauli_lcu(ISING).unitary()
    assert equal_up_to_phase(u, -u)
    assert phase_overlap(u, u) == pytest.approx(1.0)
