import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qre.classical_sim import call_classically
from qre.errors import BadBlockExponent, BadEpsilon, BadL, BadSize, SignatureMismatch
from qre.gates import Rz, XorK, ZGate, ZPowGate
from qre.qrom import (QROM, QROAMClean, QROAMCleanAdjoint, QROMVariant, SelectSwapQROM, optimal_block_exponent,
                      qrom_ancilla, qrom_cost, qrom_toffoli)
from qre.resources import crosscheck_callees, gate_counts
from qre.rotations import (PhaseGradientState, QvrPhaseGradient, QvrZPow, ZPowProgrammedAncilla,
                           ZPowViaPhaseGradient, phase_gradient_bitsize, rounds_for_failure_probability,
                           zpow_direct_cost, zpow_phase_gradient_cost, zpow_programmed_ancilla_cost)
from qre.state_prep import (StatePrepAlias, StatePrepKind, UniformSuperposition, alias_distribution, alias_table,
                            state_prep_cost)
from qre.symbolics import evaluate, evaluate_int, symbols, to_text
from qre.tensor_sim import block_extract, equal_up_to_phase, tensor_of
from qre.unary import apply_lth_bloq, unary_iteration_cost


def direct_t(eps):
    return math.ceil(1.149 * math.log2(1 / eps) + 9.2)


# ---------------------------------------------------------------------------
# rotations


@pytest.mark.parametrize("eps,expected", [(1e-10, 48), (1e-3, 21)])
def test_direct_synthesis(eps, expected):
    assert direct_t(eps) == expected
    assert zpow_direct_cost(eps).t == expected


def test_direct_synthesis_symbolic():
    (eps,) = symbols("eps")
    t = zpow_direct_cost(eps).t
    assert "log2" in to_text(t) and "ceil" in to_text(t)
    assert evaluate(t, {"eps": 1e-10}) == 48


@pytest.mark.parametrize("eps", [0, 1, -0.5, 2])
def test_bad_epsilon(eps):
    with pytest.raises(BadEpsilon):
        zpow_direct_cost(eps)


def test_programmed_ancilla():
    assert 2 * direct_t(1e-6 / 2) == 68
    assert zpow_programmed_ancilla_cost(1e-6, 2).t == 68
    assert zpow_programmed_ancilla_cost(1e-4, 1) == zpow_direct_cost(1e-4)
    assert rounds_for_failure_probability(1 / 8) == 3


def test_phase_gradient():
    assert math.ceil(math.log2(2 * math.pi * 1e6)) == 23
    b = evaluate_int(phase_gradient_bitsize(1e-6))
    assert b == 23
    assert zpow_phase_gradient_cost(b).toffoli == 21
    assert zpow_phase_gradient_cost(3).toffoli == 1
    with pytest.raises(BadSize):
        zpow_phase_gradient_cost(2)


def test_phase_gradient_state_amplitudes():
    amps = tensor_of(PhaseGradientState(3)).ravel()
    want = np.array([cmath.exp(-2j * math.pi * k / 8) for k in range(8)]) / math.sqrt(8)
    assert np.allclose(amps, want)


def test_rotation_conventions():
    z = np.diag([1, -1])
    assert np.allclose(tensor_of(ZPowGate(1)), z)
    assert np.allclose(tensor_of(ZGate()), z)
    assert equal_up_to_phase(tensor_of(Rz(math.pi)), -1j * z)


@pytest.mark.parametrize("t", [0.1, 0.37, 1.3, -0.6])
def test_rotation_strategies_agree(t):
    want = np.diag([1, cmath.exp(1j * math.pi * t)])
    assert equal_up_to_phase(tensor_of(ZPowGate(t)), want)
    b = 6
    grad = tensor_of(ZPowViaPhaseGradient(t, b), via_decomposition=True)
    resolution = math.pi * 2 ** (1 - b)
    assert np.max(np.abs(grad / grad[0, 0] - want)) <= resolution
    prog = tensor_of(ZPowProgrammedAncilla(t), via_decomposition=True)
    assert equal_up_to_phase(prog, want, atol=1e-9)


def test_qvr_zpow():
    b = QvrZPow(4, eps=1e-4)
    ((eps, count),) = gate_counts(b).rotations
    assert count == 4
    assert float(evaluate(eps)) == pytest.approx(2.5e-5)
    assert gate_counts(QvrZPow(1, eps=1e-4)).n_rotations == 1


def test_qvr_two_bit_tensor():
    u = tensor_of(QvrZPow(2), via_decomposition=True)
    want = np.diag([cmath.exp(2j * math.pi * x) for x in (0, 0.25, 0.5, 0.75)])
    assert np.allclose(u, want)


def test_qvr_phase_gradient_cost():
    b = QvrPhaseGradient(4, eps=1e-4)
    bg = math.ceil(math.log2(2 * math.pi * 4 / 1e-4))
    assert gate_counts(b).toffoli == 4 * (bg - 2)


# ---------------------------------------------------------------------------
# unary iteration

DATA = [11, 99, 83, 56, 55, 109, 11, 89, 25, 12]


def test_unary_iteration_cost():
    assert unary_iteration_cost(10).toffoli == 9
    assert unary_iteration_cost(2).toffoli == 1
    assert unary_iteration_cost(1024, 10, sparsity=3).toffoli == min(1023, 30) == 30
    with pytest.raises(BadL):
        unary_iteration_cost(1)


def test_apply_lth_loads_listing():
    b = apply_lth_bloq([XorK(v, 7) for v in DATA])
    for i, v in enumerate(DATA):
        assert call_classically(b, {"selection": i, "x": 0})["x"] == v
        assert call_classically(b, {"selection": i, "x": 0}, via_decomposition=True)["x"] == v


def test_apply_lth_single_element():
    assert apply_lth_bloq([XorK(3, 4)]) == XorK(3, 4)


def test_apply_lth_identical_subtree_merges():
    b = apply_lth_bloq([XorK(5, 3)] * 8)
    assert gate_counts(b).toffoli == 0
    assert crosscheck_callees(b).passed
    plain = apply_lth_bloq([XorK(5, 3)] * 8, variable_spacing=False)
    # uncontrolled iteration over L leaves: L - 2; controlled: L - 1
    assert gate_counts(plain).toffoli == 6
    assert gate_counts(apply_lth_bloq([XorK(5, 3)] * 8, is_controlled=True, variable_spacing=False)).toffoli == 7


def test_apply_lth_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        apply_lth_bloq([XorK(1, 3), XorK(1, 4)])


def test_apply_lth_nested():
    grid = [[XorK((3 * i + j) % 8, 3) for j in range(3)] for i in range(2)]
    b = apply_lth_bloq(grid)
    for i in range(2):
        for j in range(3):
            out = call_classically(b, {"selection0": i, "selection1": j, "x": 0}, via_decomposition=True)
            assert out["x"] == (3 * i + j) % 8


# ---------------------------------------------------------------------------
# lookups


def test_plain_qrom_formula():
    assert qrom_toffoli(QROMVariant.PLAIN, 100, 8) == 98


def test_select_swap_optimum():
    values = {k: 2 * math.ceil(1024 / 2**k) + 4 * 8 * (2**k - 1) for k in range(11)}
    best = min(values, key=values.get)
    assert (best, values[best]) == (3, 480)
    assert optimal_block_exponent(QROMVariant.SELECT_SWAP, 1024, 8) == 3
    assert qrom_toffoli(QROMVariant.SELECT_SWAP, 1024, 8, 3) == 480


def test_qroam_clean_formula():
    assert qrom_toffoli(QROMVariant.QROAM_CLEAN, 1024, 8, 3) == 128 + 56
    assert qrom_toffoli(QROMVariant.QROAM_CLEAN_ADJOINT, 1024, 8, 3) == 128 + 7


@settings(max_examples=200)
@given(st.integers(2, 5000), st.integers(1, 32), st.data())
def test_qrom_formulas_match_closed_forms(n, b, data):
    k = data.draw(st.integers(0, math.ceil(math.log2(n))))
    blocks = -(-n // 2**k)
    assert qrom_toffoli(QROMVariant.SELECT_SWAP, n, b, k) == 2 * blocks + 4 * b * (2**k - 1)
    assert qrom_toffoli(QROMVariant.QROAM_CLEAN, n, b, k) == blocks + b * (2**k - 1)
    assert qrom_toffoli(QROMVariant.QROAM_CLEAN_ADJOINT, n, b, k) == blocks + 2**k - 1
    assert qrom_toffoli(QROMVariant.PLAIN, n, b) == n - 2


def test_block_exponent_bounds():
    with pytest.raises(BadBlockExponent):
        qrom_toffoli(QROMVariant.SELECT_SWAP, 16, 4, 5)
    with pytest.raises(BadBlockExponent):
        qrom_toffoli(QROMVariant.PLAIN, 16, 4, 1)


def test_qrom_cost_report():
    c = qrom_cost(QROMVariant.QROAM_CLEAN, 64, 4, 2)
    assert c.counts.toffoli == 16 + 12
    assert c.clifford_approximate
    assert not qrom_cost(QROMVariant.PLAIN, 64, 4).clifford_approximate
    assert qrom_ancilla(QROMVariant.PLAIN, 64, 4) == {"clean": 6, "dirty": 0}


@pytest.mark.parametrize("cls", [QROM, SelectSwapQROM, QROAMClean, QROAMCleanAdjoint])
def test_lookup_returns_stored_data(cls):
    data = [7, 3, 12, 0, 9, 15, 1, 4, 8, 2, 11]
    b = cls.build(data, target_bitsizes=[4])
    erase = cls is QROAMCleanAdjoint
    for i, v in enumerate(data):
        regs = {r.name: 0 for r in b.signature.lefts()}
        regs["selection"] = i
        if erase:
            regs["target0"] = v
        out = call_classically(b, regs)
        if erase:
            assert "target0" not in out
            continue
        assert out["target0"] == v
        if b.has_decomposition():
            assert call_classically(b, regs, via_decomposition=True)["target0"] == v


@pytest.mark.parametrize("n", [2, 3, 8, 10, 16])
def test_plain_qrom_decomposition_counts(n):
    b = QROM.build(list(range(n)), target_bitsizes=[5])
    assert gate_counts(b).toffoli == n - 2
    assert crosscheck_callees(b).passed


@pytest.mark.parametrize("cls,variant", [(SelectSwapQROM, QROMVariant.SELECT_SWAP),
                                         (QROAMClean, QROMVariant.QROAM_CLEAN)])
def test_blocked_lookup_counts_use_formula(cls, variant):
    b = cls.build(list(range(40)), target_bitsizes=[6], block_exponent=2)
    assert gate_counts(b).toffoli == qrom_toffoli(variant, 40, 6, 2)


def test_multidimensional_lookup():
    data = np.arange(12).reshape(3, 4)
    b = QROM.build(data, target_bitsizes=[4])
    for i in range(3):
        for j in range(4):
            out = call_classically(b, {"selection0": i, "selection1": j, "target0": 0}, via_decomposition=True)
            assert out["target0"] == data[i, j]


def test_data_must_fit_target():
    with pytest.raises(BadSize):
        QROM.build([16], target_bitsizes=[4])


# ---------------------------------------------------------------------------
# state preparation


def test_alias_table_distribution_for_one_two_three():
    mu = 10
    alt, keep = alias_table([1, 2, 3], mu)
    p = alias_distribution(alt, keep, mu)
    target = [Fraction(1, 6), Fraction(2, 6), Fraction(3, 6)]
    tv = sum(abs(a - b) for a, b in zip(p, target)) / 2
    assert tv <= Fraction(1, 2**mu)
    # brute force over every (index, sigma) pair
    counts = [0, 0, 0]
    for i in range(3):
        for sigma in range(2**mu):
            counts[i if sigma < keep[i] else alt[i]] += 1
    assert [Fraction(c, 3 * 2**mu) for c in counts] == p


@settings(max_examples=100)
@given(st.lists(st.integers(0, 50), min_size=2, max_size=9).filter(lambda w: sum(w) > 0), st.integers(3, 12))
def test_alias_table_close_to_weights(weights, mu):
    alt, keep = alias_table(weights, mu)
    p = alias_distribution(alt, keep, mu)
    total = sum(weights)
    tv = sum(abs(a - Fraction(w, total)) for a, w in zip(p, weights)) / 2
    assert tv <= Fraction(len(weights), 2**mu)
    assert sum(p) == 1


def test_alias_state_tensor():
    weights = [1, 2, 3, 4]
    b = StatePrepAlias.from_weights(weights, 1 / 64)
    assert b.mu == 6
    amps = tensor_of(b, cap=18).ravel()
    assert np.linalg.norm(amps) == pytest.approx(1.0)
    probs = np.abs(amps.reshape(4, -1)) ** 2
    marginal = probs.sum(axis=1)
    target = np.array(weights) / sum(weights)
    assert 0.5 * np.abs(marginal - target).sum() <= 1 / 64


def test_alias_cost():
    c = state_prep_cost(StatePrepKind.ALIAS_SAMPLING, 16, 1e-3)
    assert c.detail["mu"] == 10
    assert c.lookups == ((16, 14),)
    assert evaluate(c.counts.toffoli) >= evaluate(qrom_toffoli(QROMVariant.PLAIN, 16, 14))


def test_via_rotations_two_states():
    c = state_prep_cost(StatePrepKind.VIA_ROTATIONS, 2, 1e-3)
    assert c.rotations == 1
    assert c.lookups == ((1, c.detail["b"]),)


def test_uniform_superposition():
    for n in (3, 5, 6, 8):
        v = tensor_of(UniformSuperposition(n)).ravel()
        assert np.allclose(v[:n], 1 / math.sqrt(n))
        assert np.allclose(v[n:], 0)
    assert gate_counts(UniformSuperposition(8)).toffoli == 0
    assert gate_counts(UniformSuperposition(8)).clifford == 3
    assert evaluate(gate_counts(UniformSuperposition(6)).toffoli) > 0


def test_state_prep_bad_inputs():
    with pytest.raises(BadEpsilon):
        state_prep_cost(StatePrepKind.ALIAS_SAMPLING, 16, 0)
    with pytest.raises(BadSize):
        state_prep_cost(StatePrepKind.UNIFORM, 1, 1e-3)


def test_block_extract_sanity_on_lookup():
    b = QROM.build([1, 0], target_bitsizes=[1])
    u = tensor_of(b, via_decomposition=True)
    assert block_extract(u, 0).shape == (4, 4)
