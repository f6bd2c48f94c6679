"""Named bloq constructors: a registry name plus key=value parameters builds a bloq.

Each entry lists its parameters, in the order its builder takes them, with a
parser and a default. Size-like parameters accept an integer or an
identifier; with ``symbolic`` a missing size becomes a symbol of the same name.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Callable, Mapping

import attrs
import numpy as np

from qre import arithmetic as ar
from qre import block_encoding as be
from qre import ecc, gates, modarith as ma, qpe, qrom, rotations as rot, shor, sparse
from qre import state_prep as sp
from qre import trotter
from qre.errors import BadParam, QREError, UnknownBloq
from qre.gqsp import SU2RotationGate, gqsp
from qre.hamsim import hamsim_gqsp
from qre.ir import Bloq
from qre.symbolics import SymExpr, sym
from qre.unary import apply_lth_bloq

REQUIRED = object()


# ---------------------------------------------------------------------------
# Parsers


def integer(text: str) -> int:
    return int(text, 0)


def real(text: str) -> float:
    return float(text)


def flag(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def size(text: str) -> int | SymExpr:
    """An integer, or an identifier that becomes a symbol."""
    try:
        return int(text, 0)
    except ValueError:
        if text.isidentifier():
            return sym(text)
        raise


def number(text: str) -> float | SymExpr:
    """A real number, or an identifier that becomes a symbol."""
    try:
        return float(text)
    except ValueError:
        if text.isidentifier():
            return sym(text)
        raise


def reals(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def words(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def pauli_terms(text: str) -> tuple[tuple[float, str], ...]:
    """``0.5:XZ,0.25:ZZ`` as (coefficient, Pauli string) pairs."""
    out = []
    for item in words(text):
        coeff, _, label = item.partition(":")
        if not label:
            raise ValueError(f"expected coefficient:label, got {item!r}")
        out.append((float(coeff), label.strip().upper()))
    return tuple(out)


def choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        low = text.lower()
        if low not in options:
            raise ValueError(f"expected one of {', '.join(options)}; got {text!r}")
        return low

    parse.__name__ = "choice"
    return parse


def _inline_json(text: str):
    return json.loads(text) if text.lstrip().startswith("[") else None


def load_dataset(path: str) -> list:
    """Lookup data from an inline JSON array, a .json file or a file of little-endian u64 values."""
    inline = _inline_json(path)
    if inline is not None:
        return inline
    p = Path(path)
    if p.suffix.lower() == ".json":
        return json.loads(p.read_text())
    raw = p.read_bytes()
    if len(raw) % 8:
        raise ValueError(f"{path}: length {len(raw)} is not a multiple of 8 bytes")
    return [int(x) for x in np.frombuffer(raw, dtype="<u8")]


def load_matrix(path: str) -> np.ndarray:
    """An inline or file JSON matrix whose entries are numbers or [re, im] pairs."""
    data = _inline_json(path)
    if data is None:
        data = json.loads(Path(path).read_text())
    arr = np.array(data, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr


# ---------------------------------------------------------------------------
# Entries


@attrs.frozen
class Param:
    name: str
    parse: Callable[[str], Any]
    default: Any = REQUIRED
    help: str = ""

    @property
    def required(self) -> bool:
        return self.default is REQUIRED


@attrs.frozen
class Entry:
    """``build(*values)`` makes the bloq; ``examples`` are valid parameter sets."""

    name: str
    build: Callable[..., Bloq]
    params: tuple[Param, ...] = ()
    summary: str = ""
    examples: tuple[Mapping[str, str], ...] = ({},)

    def parse(self, raw: Mapping[str, str], symbolic: bool = False) -> dict[str, Any]:
        """Parsed values in parameter order; ``build`` takes them positionally."""
        known = {p.name: p for p in self.params}
        unknown = sorted(set(raw) - set(known))
        if unknown:
            raise BadParam(f"{self.name}: unknown parameter(s) {', '.join(unknown)}; "
                           f"expected {', '.join(known) or 'none'}")
        out = {}
        for p in self.params:
            if p.name in raw:
                try:
                    out[p.name] = p.parse(str(raw[p.name]))
                except (ValueError, OSError) as exc:
                    raise BadParam(f"{self.name}: bad value for {p.name}: {exc}") from exc
            elif p.required:
                if symbolic and p.parse in (size, number):
                    out[p.name] = sym(p.name)
                else:
                    raise BadParam(f"{self.name}: missing parameter {p.name}")
            else:
                out[p.name] = p.default
        return out

    def construct(self, raw: Mapping[str, str] | None = None, symbolic: bool = False) -> Bloq:
        kwargs = self.parse(raw or {}, symbolic)
        try:
            return self.build(*kwargs.values())
        except QREError as exc:
            if isinstance(exc, (BadParam, UnknownBloq)):
                raise
            raise BadParam(f"{self.name}: {exc}") from exc
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise BadParam(f"{self.name}: {exc}") from exc


REGISTRY: dict[str, Entry] = {}


def register(name: str, build: Callable[..., Bloq], *params: Param, summary: str = "",
             examples: tuple[Mapping[str, str], ...] = ({},)) -> None:
    if name in REGISTRY:
        raise ValueError(f"duplicate registry name {name}")
    REGISTRY[name] = Entry(name, build, tuple(params), summary, examples)


def lookup(name: str) -> Entry:
    try:
        return REGISTRY[name]
    except KeyError:
        near = [n for n in REGISTRY if n.startswith(name[:3])]
        hint = f"; did you mean {', '.join(sorted(near))}?" if near else ""
        raise UnknownBloq(f"no bloq named {name!r}{hint}") from None


def build_bloq(name: str, params: Mapping[str, str] | None = None, *, symbolic: bool = False,
               controlled: bool = False, adjoint: bool = False) -> Bloq:
    """Resolve ``name`` and ``params``; optionally wrap in a control or take the adjoint."""
    b = lookup(name).construct(params, symbolic)
    if adjoint:
        b = b.adjoint()
    if controlled:
        b = gates.Controlled(b)
    return b


# ---------------------------------------------------------------------------
# Shared parameters and helpers

N = Param("n", size, help="register bitsize")
EPS = Param("eps", real, 1e-11, "synthesis precision")


def _default_mod(n, mod):
    if mod is not None:
        return mod
    if isinstance(n, SymExpr):
        return sym("p")
    if n < 2:
        raise BadParam(f"need n >= 2 for a default modulus, got {n}")
    return shor.prime_below(2**n)


MOD = Param("mod", size, None, "modulus (default: largest prime below 2^n)")


def _reflection(label: str) -> be.BlockEncoding:
    return be.be_unitary(be.PauliString(label), is_reflection=True)


def _window(kind: str, m: int, alpha: float) -> qpe.WindowState:
    kinds = {"rect": qpe.WindowKind.RECTANGULAR, "sine": qpe.WindowKind.SINE,
             "kaiser": qpe.WindowKind.KAISER}
    return qpe.WindowState(kinds[kind], m, alpha)


WINDOW = (Param("window", choice("rect", "sine", "kaiser"), "sine"),
          Param("m", integer, 4, "phase register bitsize"),
          Param("alpha", real, 0.0, "Kaiser window parameter"))

TOY_CURVE = (15, 13, 17, 0)


def _curve_base(curve: str, x, y, mod, a) -> ecc.ECPoint:
    if curve == "secp256k1":
        g = shor.secp256k1_base()
        x, y, mod, a = (g.x if x is None else x, g.y if y is None else y,
                        g.mod if mod is None else mod, g.curve_a if a is None else a)
    else:
        tx, ty, tm, ta = TOY_CURVE
        x, y, mod, a = (tx if x is None else x, ty if y is None else y,
                        tm if mod is None else mod, ta if a is None else a)
    return ecc.ECPoint(x, y, mod, a)


CURVE = (Param("curve", choice("toy", "secp256k1"), "toy", "toy is (15,13) on y^2 = x^3 + 7 mod 17"),
         Param("x", integer, None), Param("y", integer, None),
         Param("mod", integer, None), Param("a", integer, None))


def _point_bits(point: ecc.ECPoint, n) -> int:
    return math.ceil(math.log2(point.mod)) if n is None else n


# ---------------------------------------------------------------------------
# Gates

for _name, _cls in (("x", gates.XGate), ("z", gates.ZGate), ("h", gates.Hadamard),
                    ("cnot", gates.CNOT), ("cz", gates.CZ), ("swap", gates.Swap),
                    ("toffoli", gates.Toffoli), ("cswap", gates.CSwap), ("measure", gates.Measure),
                    ("plus_state", gates.PlusState), ("and_uncompute", gates.AndUncompute),
                    ("maj", ar.MAJ), ("uma", ar.UMA), ("post_select_zero", rot.PostSelectZero)):
    register(_name, _cls, summary=_cls.__doc__.splitlines()[0] if _cls.__doc__ else _cls.__name__)

register("s", gates.SGate, Param("is_adjoint", flag, False))
register("t", gates.TGate, Param("is_adjoint", flag, False))
register("mcx", gates.MultiCToffoli, Param("n", size, help="number of controls"),
         summary="Multi-controlled NOT", examples=({"n": "3"},))
register("zpow", gates.ZPowGate, Param("exponent", number, 0.1, "turns of pi"), EPS,
         summary="Z rotation diag(1, e^{i pi t}), synthesized directly")
register("rz", gates.Rz, Param("angle", number, 0.1), EPS)
register("global_phase", gates.GlobalPhase, Param("exponent", real, 0.5))
register("int_state", gates.IntState, Param("val", integer), N, examples=({"val": "5", "n": "4"},))
register("xor_k", gates.XorK, Param("k", integer), N, examples=({"k": "5", "n": "4"},))
register("identity", gates.Identity, Param("n", integer, 1))


def _matrix(path: str, label: str):
    return gates.MatrixGate(load_matrix(path), label)


register("matrix", _matrix, Param("path", str, help="JSON matrix, inline or a file"),
         Param("label", str, "U"), summary="Explicit unitary from JSON",
         examples=({"path": "[[0, 1], [1, 0]]"},))


# ---------------------------------------------------------------------------
# Arithmetic

register("add", ar.Add, N, examples=({"n": "4"},))
register("subtract", ar.Subtract, N, examples=({"n": "4"},))
register("add_k", lambda k, n: ar.AddK(k, n), Param("k", integer), N, examples=({"k": "3", "n": "4"},))
register("less_than", ar.LessThan, N, examples=({"n": "4"},))
register("less_than_const", ar.LessThanConst, N, Param("k", size), examples=({"n": "4", "k": "5"},))


# ---------------------------------------------------------------------------
# Rotations

register("phase_gradient_state", rot.PhaseGradientState, N, EPS, examples=({"n": "4"},))
register("add_const_phase_grad", lambda k, n: rot.AddConstIntoPhaseGrad(k, n),
         Param("k", integer), N, examples=({"k": "3", "n": "4"},))
register("zpow_phase_gradient", rot.ZPowViaPhaseGradient, Param("exponent", real, 0.1),
         Param("b", integer, 8, "phase-gradient bitsize"))
register("zpow_programmed", rot.ZPowProgrammedAncilla, Param("exponent", real, 0.1), EPS,
         Param("rounds", integer, 2))
register("qvr_zpow", rot.QvrZPow, N, Param("gamma", real, 1.0), EPS, examples=({"n": "4"},))
register("qvr_phase_gradient", rot.QvrPhaseGradient, N, Param("gamma", real, 1.0), EPS,
         examples=({"n": "4"},))


# ---------------------------------------------------------------------------
# Unary iteration and lookups


def _apply_lth(gate: str, count: int, controlled: bool):
    sub = lookup(gate).construct()
    return apply_lth_bloq([sub] * count, is_controlled=controlled)


register("apply_lth", _apply_lth, Param("gate", str, "x", "parameterless registry gate"),
         Param("count", integer, 4), Param("controlled", flag, False),
         summary="Apply the l-th of count copies of a gate by unary iteration")

_VARIANTS = {"plain": qrom.QROMVariant.PLAIN, "select_swap": qrom.QROMVariant.SELECT_SWAP,
             "qroam_clean": qrom.QROMVariant.QROAM_CLEAN,
             "qroam_clean_adjoint": qrom.QROMVariant.QROAM_CLEAN_ADJOINT}
_LOOKUP_CLASSES = {"plain": qrom.QROM, "select_swap": qrom.SelectSwapQROM,
                   "qroam_clean": qrom.QROAMClean, "qroam_clean_adjoint": qrom.QROAMCleanAdjoint}


def _qrom(variant: str, n, b, k, data):
    v = _VARIANTS[variant]
    if data is not None:
        values = load_dataset(data)
        sizes = None if b is None else (int(b),)
        if variant == "plain":
            return qrom.QROM.build(values, target_bitsizes=sizes)
        return _LOOKUP_CLASSES[variant].build(values, target_bitsizes=sizes, block_exponent=k)
    if n is None or b is None:
        raise BadParam("qrom: give n and b, or a data file")
    if k is None:
        k = 0 if isinstance(n, SymExpr) or isinstance(b, SymExpr) else qrom.optimal_block_exponent(v, n, b)
    return qrom.SymbolicLookup(v, n, b, k)


register("qrom", _qrom, Param("variant", choice(*_VARIANTS), "plain"),
         Param("n", size, None, "number of entries"), Param("b", size, None, "target bitsize"),
         Param("k", size, None, "block exponent (default: optimal)"),
         Param("data", str, None, "JSON array or little-endian u64 file"),
         summary="Lookup table of N entries of b bits",
         examples=({"n": "100", "b": "7"}, {"variant": "select_swap", "n": "64", "b": "8"},
                   *({"variant": v, "data": "[1, 5, 2, 7, 3]", "k": "1"} for v in _VARIANTS if v != "plain"),
                   {"data": "[1, 5, 2, 7, 3]"}))


# ---------------------------------------------------------------------------
# State preparation

register("uniform", sp.UniformSuperposition, Param("n_states", integer), EPS,
         examples=({"n_states": "5"},))
register("cswap_registers", sp.CSwapRegisters, N, examples=({"n": "3"},))
register("alias", lambda weights, eps: sp.StatePrepAlias.from_weights(weights, eps),
         Param("weights", reals), Param("eps", real, 1e-3),
         summary="Alias-sampling state preparation", examples=({"weights": "1,2,3,2"},))


# ---------------------------------------------------------------------------
# Block encodings

register("pauli", be.PauliString, Param("label", str, "Z"))
register("reflect_zero", be.ReflectZero, N, examples=({"n": "2"},))
register("symbolic_encoding", be.SymbolicEncoding, Param("alpha", number), Param("ancillas", size),
         Param("epsilon", number, 0.0), Param("system_bitsize", size), Param("label", str, "A"),
         examples=({"alpha": "2", "ancillas": "3", "system_bitsize": "4"},))

TERMS = Param("terms", pauli_terms, ((0.5, "XZ"), (0.5, "ZZ")), "coefficient:pauli list")

register("lcu", lambda terms: be.pauli_lcu(terms).inner, TERMS,
         summary="Linear combination of Pauli strings")
register("lcu_prepare", be.LCUPrepare, Param("weights", reals), EPS,
         examples=({"weights": "0.5,0.25,0.25"},))
register("tensor_product", lambda labels: be.tensor_product(*map(_reflection, labels)).inner,
         Param("labels", words, ("X", "Z")))
register("product", lambda labels: be.product(*map(_reflection, labels)).inner,
         Param("labels", words, ("X", "Z")))
register("phase", lambda label, phi: be.phase(_reflection(label), phi).inner,
         Param("label", str, "X"), Param("phi", real, 0.5))
register("walk", lambda terms: be.qubitization_walk(be.pauli_lcu(terms)), TERMS)
register("chebyshev", lambda terms, order: be.chebyshev(be.pauli_lcu(terms), order).inner,
         TERMS, Param("order", integer, 3))


# ---------------------------------------------------------------------------
# Sparse matrices

register("top_left_oracle", sparse.TopLeftRowColumnOracle, N, Param("s", integer, None, "nonzeros per row"),
         examples=({"n": "3"},))
register("banded_oracle", sparse.SymmetricBandedRowColumnOracle, N, Param("bandsize", integer, 1),
         examples=({"n": "3"},))
register("uniform_entry", sparse.UniformEntryOracle, N, Param("value", real, 0.5), examples=({"n": "3"},))


def _explicit_entry(path: str, entry_bitsize: int):
    data = load_matrix(path)
    return sparse.ExplicitEntryOracle(max(1, math.ceil(math.log2(len(data)))), data, entry_bitsize)


register("explicit_entry", _explicit_entry, Param("path", str, help="JSON matrix, inline or a file"),
         Param("entry_bitsize", integer, 10), examples=({"path": "[[0.5, 0.25], [0.25, 0.5]]"},))
register("uniform_slots", sparse.UniformSlots, Param("n_slots", integer), Param("n", integer),
         examples=({"n_slots": "3", "n": "2"},))
register("swap_registers", sparse.SwapRegisters, N, examples=({"n": "2"},))


def _sparse(n: int, kind: str, bandsize: int, value: float, eps: float):
    rows = (sparse.SymmetricBandedRowColumnOracle(n, bandsize) if kind == "banded"
            else sparse.TopLeftRowColumnOracle(n))
    return sparse.SparseMatrix(rows, rows, sparse.UniformEntryOracle(n, value), eps)


register("sparse_matrix", _sparse, Param("n", integer, 3), Param("kind", choice("banded", "dense"), "banded"),
         Param("bandsize", integer, 1), Param("value", real, 0.5), Param("epsilon", real, 0.0),
         summary="Sparse-matrix block encoding with uniform entries")


# ---------------------------------------------------------------------------
# Signal processing, simulation and phase estimation

register("su2", SU2RotationGate, Param("theta", real, 0.3), Param("phi", real, 0.0),
         Param("lambd", real, 0.0), Param("gamma", real, 0.0), EPS)
register("gqsp", lambda coeffs, label, eps: gqsp(be.PauliString(label), np.array(coeffs), eps=eps),
         Param("coeffs", reals, (0.5, 0.0, 0.5), "polynomial coefficients, lowest degree first"),
         Param("label", str, "Z", "Pauli string used as the signal unitary"), EPS)
register("hamsim", lambda terms, t, eps: hamsim_gqsp(be.pauli_lcu(terms), t, eps).inner,
         TERMS, Param("t", real, 1.0), Param("eps", real, 1e-6),
         summary="e^{-iHt} by GQSP on the walk of a Pauli LCU")
register("window_prep", lambda window, m, alpha, eps: qpe.WindowStatePrep(_window(window, m, alpha), eps),
         *WINDOW, EPS)
register("qft", qpe.QFT, N, EPS, Param("approximate", flag, False), examples=({"n": "4"},))
register("textbook_qpe",
         lambda exponent, eps, window, m, alpha: qpe.TextbookQPE(gates.ZPowGate(exponent, eps),
                                                                 _window(window, m, alpha)),
         Param("exponent", real, 0.1), EPS, *WINDOW, summary="Phase estimation of a Z rotation")
register("qubitization_qpe",
         lambda terms, window, m, alpha: qpe.QubitizationQPE(be.qubitization_walk(be.pauli_lcu(terms)),
                                                             _window(window, m, alpha)),
         TERMS, *WINDOW, summary="Phase estimation of a Pauli-LCU walk")


# ---------------------------------------------------------------------------
# Modular arithmetic

_MOD_FAMILY = (("mod_add", ma.ModAdd), ("cmod_add", ma.CModAdd), ("mod_sub", ma.ModSub),
               ("cmod_sub", ma.CModSub), ("mod_neg", ma.ModNeg), ("cmod_neg", ma.CModNeg),
               ("mod_dbl", ma.ModDbl), ("mod_mul", ma.ModMul), ("modinv", ma.ModInv))

for _name, _cls in _MOD_FAMILY:
    register(_name, lambda n, mod, _cls=_cls: _cls(n, _default_mod(n, mod)), N, MOD,
             summary=_cls.__doc__.splitlines()[0], examples=({"n": "8"},))

register("mod_mul_k", lambda n, k, mod: ma.ModMulK(n, k, _default_mod(n, mod)), N,
         Param("k", integer, 3), MOD, examples=({"n": "8"},))
register("controlled_add", ma.ControlledAdd, N, Param("subtract", flag, False), examples=({"n": "4"},))
register("controlled_shift", ma.ControlledShift, N, examples=({"n": "4"},))
register("kaliski_round", ma.KaliskiRound, N, examples=({"n": "8"},))


# ---------------------------------------------------------------------------
# Elliptic curves and Shor


def _ecadd(n, mod, a):
    if mod is None and not isinstance(n, SymExpr) and n == 256:
        mod = shor.SECP256K1_P
    return ecc.ECAdd(n, _default_mod(n, mod), a)


register("ecadd", _ecadd, N, MOD, Param("a", integer, 0, "curve coefficient"),
         summary="Quantum-quantum elliptic-curve point addition", examples=({"n": "8"},))
register("ecaddr", lambda curve, x, y, mod, a, n: ecc.ec_add_r(_point_bits(_curve_base(curve, x, y, mod, a), n),
                                                             _curve_base(curve, x, y, mod, a)),
         *CURVE, Param("n", integer, None), summary="Add a classical point R")
register("ec_window_addr",
         lambda curve, x, y, mod, a, n, w: ecc.ECWindowAddR(
             _point_bits(_curve_base(curve, x, y, mod, a), n), w, _curve_base(curve, x, y, mod, a)),
         *CURVE, Param("n", integer, None), Param("w", integer, 2, "window bits"))
register("measure_qft", ecc.MeasureQFT, N, Param("eps", real, 1e-10), examples=({"n": "5"},))
register("ec_pe",
         lambda curve, x, y, mod, a: ecc.ECPhaseEstimateR(
             _point_bits(_curve_base(curve, x, y, mod, a), None), _curve_base(curve, x, y, mod, a)),
         *CURVE)
register("ec_window_pe",
         lambda curve, x, y, mod, a, w: ecc.ECWindowPhaseEstimateR(
             _point_bits(_curve_base(curve, x, y, mod, a), None), _curve_base(curve, x, y, mod, a), w),
         *CURVE, Param("w", integer, 2))


def _ecc(curve: str, w: int, key: int):
    if curve == "secp256k1":
        spec = shor.secp256k1(w, key)
    else:
        g = _curve_base("toy", None, None, None, None)
        spec = shor.ShorSpec.ecc(g, key * g, w)
    return shor.shor_phase_estimation(spec)


register("ecc", _ecc, Param("curve", choice("toy", "secp256k1"), "secp256k1"),
         Param("w", integer, 0, "window bits (0: unwindowed)"),
         Param("key", integer, 3, "private key behind the demo public key"),
         summary="Elliptic-curve discrete log by two phase estimations",
         examples=({"curve": "toy"}, {"curve": "toy", "w": "2"}))


def _rsa(bits, modulus, g):
    if modulus is None:
        modulus = shor.rsa_demo_modulus(bits)
    return shor.shor_phase_estimation(shor.ShorSpec.rsa(modulus, g))


register("rsa", _rsa, Param("bits", integer, 2048), Param("modulus", integer, None),
         Param("g", integer, 2, "generator"), summary="Order finding for an RSA modulus",
         examples=({"bits": "16"},))


# ---------------------------------------------------------------------------
# Trotterized Hubbard demo

SIDE = Param("side", size, help="lattice side L")
ROT_EPS = Param("eps", number, help="per-rotation synthesis error")

register("hubbard_interaction", trotter.HubbardInteraction, SIDE, ROT_EPS,
         examples=({"side": "4", "eps": "1e-6"},))
register("hopping_plaquette", trotter.HoppingPlaquette, ROT_EPS, examples=({"eps": "1e-6"},))
register("hopping_layer", trotter.HoppingLayer, SIDE, ROT_EPS, examples=({"side": "4", "eps": "1e-6"},))
register("hubbard_step", trotter.HubbardTrotterStep, SIDE, ROT_EPS, examples=({"side": "4", "eps": "1e-6"},))
register("trotterized_unitary",
         lambda side, eps, steps: trotter.TrotterizedUnitary(trotter.HubbardTrotterStep(side, eps), steps),
         SIDE, ROT_EPS, Param("steps", size), examples=({"side": "4", "eps": "1e-6", "steps": "10"},))


register("hubbard_qpe", trotter.hubbard_trotter_qpe, Param("side", size, None), Param("order", size, None),
         Param("xi", number, None), Param("delta_ts", number, None), Param("delta_ht", number, None),
         Param("delta_pe", number, None), Param("n_rotations", number, None),
         summary="Trotterized Hubbard phase estimation; omitted parameters stay symbolic")
register("heisenberg_qpe",
         lambda side, eps, steps, delta_pe: trotter.HeisenbergQPE(
             trotter.TrotterizedUnitary(trotter.HubbardTrotterStep(side, eps), steps), delta_pe),
         SIDE, ROT_EPS, Param("steps", size), Param("delta_pe", number),
         examples=({"side": "4", "eps": "1e-6", "steps": "10", "delta_pe": "1e-3"},))


def names() -> list[str]:
    return sorted(REGISTRY)
