"""Dense tensor simulation of small bloqs.

Every qubit wire is one axis of a numpy array. Bloqs are applied in
topological order with ``np.tensordot``; decompositions are inlined, bloqs with
only a classical action are applied as basis permutations, and Split/Join
just relabel axes.

Matrices are indexed (right bits, left bits) with registers in signature order
and each register most significant bit first.
"""

from __future__ import annotations

import itertools
from typing import Mapping

import numpy as np

from qre.errors import BadAncillaCount, MissingTensor, OffCurve, RangeError, TooLarge
from qre.ir import LEFT_BOUNDARY, Bloq, Join, Port, Split

DEFAULT_CAP = 14


def _nbits(reg) -> int:
    return int(reg.total_bits)


class _State:
    def __init__(self, tensor: np.ndarray, labels: list, cap: int):
        self.t = tensor
        self.labels = labels
        self.cap = cap
        self._fresh = itertools.count(max([x for x in labels if isinstance(x, int)], default=-1) + 1)
        self._check()

    def fresh(self, k: int) -> list:
        return [next(self._fresh) for _ in range(k)]

    def _check(self):
        live = sum(1 for x in self.labels if isinstance(x, int))
        if live > self.cap:
            raise TooLarge(f"simulation needs {live} live qubits, cap is {self.cap}")

    def apply_matrix(self, m: np.ndarray, ins: list, outs: list):
        r, l = len(outs), len(ins)
        if m.shape != (2**r, 2**l):
            raise MissingTensor(f"tensor shape {m.shape} does not match {r} out / {l} in qubits")
        mt = np.asarray(m, dtype=complex).reshape((2,) * (r + l))
        pos = [self.labels.index(k) for k in ins]
        self.t = np.tensordot(mt, self.t, axes=(list(range(r, r + l)), pos))
        rest = [x for i, x in enumerate(self.labels) if i not in set(pos)]
        self.labels = list(outs) + rest
        self._check()

    def apply_map(self, fn, ins: list, outs: list):
        """Apply the basis map ``fn`` (left index -> right index, or None to drop)."""
        r, l = len(outs), len(ins)
        pos = [self.labels.index(k) for k in ins]
        t = np.moveaxis(self.t, pos, list(range(l)))
        rest_shape = t.shape[l:]
        flat = t.reshape(2**l, -1)
        src, dst = [], []
        for i in range(2**l):
            j = fn(i)
            if j is not None:
                src.append(i)
                dst.append(j)
        new = np.zeros((2**r, flat.shape[1]), dtype=complex)
        np.add.at(new, np.array(dst, dtype=int), flat[np.array(src, dtype=int)])
        self.t = new.reshape((2,) * r + rest_shape)
        rest = [x for i, x in enumerate(self.labels) if i not in set(pos)]
        self.labels = list(outs) + rest
        self._check()


def _classical_map(bloq: Bloq):
    from qre.classical_sim import call_classically

    lefts, rights = bloq.signature.lefts(), bloq.signature.rights()
    lbits = [_nbits(r) for r in lefts]

    def decode(i):
        vals, shift = {}, sum(lbits)
        for reg, nb in zip(lefts, lbits):
            shift -= nb
            chunk = (i >> shift) & ((1 << nb) - 1)
            vals[reg.name] = _unpack(reg, chunk)
        return vals

    # basis states outside the domain of a Thru bloq (non-residues, off-curve
    # points) pass through unchanged, which keeps the map a permutation
    thru = sum(lbits) == sum(_nbits(r) for r in rights) and [r.name for r in lefts] == [r.name for r in rights]

    def fn(i):
        try:
            out = call_classically(bloq, decode(i))
        except (RangeError, OffCurve):
            return i if thru else None
        j = 0
        for reg in rights:
            j = (j << _nbits(reg)) | _pack(reg, out[reg.name])
        return j

    return fn


def _unpack(reg, x: int):
    w = int(reg.dtype.num_qubits)
    if not reg.shape:
        return reg.dtype.from_bits(tuple((x >> (w - 1 - b)) & 1 for b in range(w)))
    idxs = list(reg.indices())
    arr = np.empty(tuple(int(d) for d in reg.shape), dtype=object)
    total = w * len(idxs)
    for k, idx in enumerate(idxs):
        chunk = (x >> (total - (k + 1) * w)) & ((1 << w) - 1)
        arr[idx] = reg.dtype.from_bits(tuple((chunk >> (w - 1 - b)) & 1 for b in range(w)))
    return arr


def _pack(reg, v) -> int:
    out = 0
    items = [v] if not reg.shape else [np.asarray(v, dtype=object)[idx] for idx in reg.indices()]
    for item in items:
        for b in reg.dtype.to_bits(item):
            out = (out << 1) | int(b)
    return out


def _apply(state: _State, bloq: Bloq, ins: Mapping[str, list], top: bool = False, force_decomp: bool = False):
    """Apply ``bloq`` to the labelled qubits ``ins``; returns labels of its outputs."""
    sig = bloq.signature
    if isinstance(bloq, (Split, Join)):
        (src,) = ins.values()
        (dst_reg,) = sig.rights()
        return {dst_reg.name: list(src)}

    flat_in = [k for r in sig.lefts() for k in ins[r.name]]

    def fresh_outs():
        return {r.name: state.fresh(_nbits(r)) for r in sig.rights()}

    use_decomp = force_decomp and bloq.has_decomposition()
    if not use_decomp:
        m = bloq.my_tensor()
        if m is not None:
            outs = fresh_outs()
            state.apply_matrix(m, flat_in, [k for r in sig.rights() for k in outs[r.name]])
            return outs
        if bloq.has_classical_action() and not (top and bloq.has_decomposition()):
            outs = fresh_outs()
            state.apply_map(_classical_map(bloq), flat_in, [k for r in sig.rights() for k in outs[r.name]])
            return outs
    if not bloq.has_decomposition():
        raise MissingTensor(f"{bloq} defines no tensor, classical action or decomposition")
    return _inline(state, bloq, ins)


def _port_labels(portmap, ports) -> list:
    if isinstance(ports, Port):
        return portmap.pop(ports)
    out = []
    for idx in np.ndindex(ports.shape):
        out.extend(portmap.pop(ports[idx]))
    return out


def _inline(state: _State, bloq: Bloq, ins: Mapping[str, list]):
    graph = bloq.decompose()
    portmap: dict[Port, list] = {}

    def assign(node, reg, labels):
        w = int(reg.dtype.num_qubits)
        if not reg.shape:
            portmap[Port(node, reg.name, (), reg.dtype, True)] = list(labels)
            return
        for k, idx in enumerate(reg.indices()):
            portmap[Port(node, reg.name, idx, reg.dtype, True)] = list(labels[k * w:(k + 1) * w])

    for reg in graph.signature.lefts():
        assign(LEFT_BOUNDARY, reg, ins[reg.name])
    for node in graph.topological_order():
        sub = graph.nodes[node]
        sub_ins = {name: _port_labels(portmap, p) for name, p in graph.inputs_of(node).items()}
        outs = _apply(state, sub, sub_ins)
        for reg in sub.signature.rights():
            assign(node, reg, outs[reg.name])
    return {name: _port_labels(portmap, p) for name, p in graph.output_sources().items()}


def _run(bloq: Bloq, tensor: np.ndarray, extra_labels: list, cap: int, via_decomposition: bool):
    sig = bloq.signature
    n_left = int(sig.total_left_qubits)
    labels = list(range(n_left)) + extra_labels
    state = _State(tensor, labels, cap)
    ins, k = {}, 0
    for r in sig.lefts():
        ins[r.name] = labels[k:k + _nbits(r)]
        k += _nbits(r)
    outs = _apply(state, bloq, ins, top=True, force_decomp=via_decomposition)
    order = [x for r in sig.rights() for x in outs[r.name]] + extra_labels
    pos = [state.labels.index(x) for x in order]
    return np.transpose(state.t, pos)


def _precheck(bloq: Bloq, cap: int):
    sig = bloq.signature
    for side in (sig.total_left_qubits, sig.total_right_qubits):
        try:
            w = int(side)
        except TypeError as e:
            raise TooLarge(f"{bloq} has symbolic width") from e
        if w > cap:
            raise TooLarge(f"{bloq} acts on {w} qubits, cap is {cap}")


def tensor_of(bloq: Bloq, *, cap: int = DEFAULT_CAP, via_decomposition: bool = False) -> np.ndarray:
    """The matrix of ``bloq``, shape (2^right qubits, 2^left qubits).

    With ``via_decomposition`` the bloq's own tensor is ignored in favour of
    contracting its decomposition.
    """
    _precheck(bloq, cap)
    sig = bloq.signature
    n_left, n_right = int(sig.total_left_qubits), int(sig.total_right_qubits)
    if not via_decomposition:
        m = bloq.my_tensor()
        if m is not None:
            return np.asarray(m, dtype=complex)
    cols = [("col", i) for i in range(n_left)]
    eye = np.eye(2**n_left, dtype=complex).reshape((2,) * (2 * n_left))
    t = _run(bloq, eye, cols, cap, via_decomposition)
    return t.reshape(2**n_right, 2**n_left)


def apply_to_state(bloq: Bloq, state: np.ndarray, *, cap: int = DEFAULT_CAP + 6,
                   via_decomposition: bool = False) -> np.ndarray:
    """Apply ``bloq`` to a left-side state vector without forming its matrix."""
    sig = bloq.signature
    n_left = int(sig.total_left_qubits)
    vec = np.asarray(state, dtype=complex).reshape((2,) * n_left) if n_left else np.asarray(state, dtype=complex).reshape(())
    t = _run(bloq, vec, [], cap, via_decomposition)
    return t.reshape(-1)


def basis_state(bits_or_index, n: int | None = None) -> np.ndarray:
    """Computational basis vector from an index (with ``n``) or a bit sequence."""
    if n is None:
        bits = list(bits_or_index)
        n = len(bits)
        idx = int("".join(str(int(b)) for b in bits) or "0", 2)
    else:
        idx = int(bits_or_index)
    v = np.zeros(2**n, dtype=complex)
    v[idx] = 1
    return v


def block_extract(u: np.ndarray, ancilla_count: int) -> np.ndarray:
    """The block of ``u`` with the leading ``ancilla_count`` qubits in |0> on both sides."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise BadAncillaCount(f"expected a square matrix, got shape {u.shape}")
    n = int(round(np.log2(u.shape[0])))
    if 2**n != u.shape[0]:
        raise BadAncillaCount(f"dimension {u.shape[0]} is not a power of two")
    if not 0 <= ancilla_count <= n:
        raise BadAncillaCount(f"{ancilla_count} ancillas requested on {n} qubits")
    s = 2 ** (n - ancilla_count)
    return u[:s, :s]


def is_unitary(u: np.ndarray, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= atol


def phase_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """|<A, B>| / (|A| |B|): equals 1 exactly when A and B agree up to a global phase."""
    a, b = np.asarray(a).ravel(), np.asarray(b).ravel()
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return float(na == nb)
    return float(abs(np.vdot(a, b)) / (na * nb))


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-8) -> bool:
    """Equal norms and unit normalized overlap, both within ``atol``."""
    if np.shape(a) != np.shape(b):
        return False
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if abs(na - nb) > atol * max(na, nb, 1.0):
        return False
    return phase_overlap(a, b) >= 1 - atol
