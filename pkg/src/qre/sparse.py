"""Block encodings of sparse matrices from row, column and entry oracles.

With ancillas (entry qubit q, index register s) and system register j:

1. put s in a uniform superposition over the m slots;
2. column oracle: |l>|j> -> |c(j, l)>|j> (l-th nonzero row of column j);
3. entry oracle: rotate q so that its |0> amplitude is A[i, j];
4. swap s with the system register;
5. undo steps 1-2 with the row oracle in place of the column oracle.

The all-zero ancilla block is then A / m.
"""

from __future__ import annotations

import math

import attrs
import numpy as np

from qre.errors import BadEpsilon, OracleShapeMismatch
from qre.gates import Swap
from qre.ir import Bit, Bloq, Register, Signature, UInt
from qre.qrom import QROMVariant, qrom_toffoli
from qre.resources import GateCounts
from qre.state_prep import uniform_superposition_cost
from qre.block_encoding import BlockEncoding


def _perm_matrix(perm: np.ndarray) -> np.ndarray:
    out = np.zeros((len(perm), len(perm)))
    out[perm, np.arange(len(perm))] = 1
    return out


# ---------------------------------------------------------------------------
# Row / column oracles


class _RowColumnOracle(Bloq):
    """|l>|j> -> |idx(j, l)>|j> for the l-th nonzero of line j, a permutation in l."""

    system_bitsize: int

    @property
    def signature(self):
        n = self.system_bitsize
        return Signature([Register("slot", UInt(n)), Register("line", UInt(n))])

    @property
    def n_nonzero(self) -> int:
        raise NotImplementedError

    def index(self, line: int, slot: int) -> int:
        raise NotImplementedError

    def on_classical_vals(self, slot, line):
        return {"slot": self.index(line, slot), "line": line}

    def my_tensor(self):
        n = 2**self.system_bitsize
        perm = np.empty(n * n, dtype=int)
        for slot in range(n):
            for line in range(n):
                perm[slot * n + line] = self.index(line, slot) * n + line
        return _perm_matrix(perm)


@attrs.frozen
class TopLeftRowColumnOracle(_RowColumnOracle):
    """Nonzeros confined to the top-left block of width ``n_nonzero``; free."""

    system_bitsize: int
    n_nonzero_entries: int | None = None

    @property
    def n_nonzero(self) -> int:
        return self.n_nonzero_entries or 2**self.system_bitsize

    def index(self, line, slot):
        return slot

    def leaf_counts(self):
        return GateCounts()

    def adjoint(self):
        return self


@attrs.frozen
class SymmetricBandedRowColumnOracle(_RowColumnOracle):
    """Nonzeros within ``bandsize`` of the diagonal (cyclically); one adder."""

    system_bitsize: int
    bandsize: int

    def __attrs_post_init__(self):
        if 2 * self.bandsize + 1 > 2**self.system_bitsize:
            raise OracleShapeMismatch("band wider than the matrix")

    @property
    def n_nonzero(self) -> int:
        return 2 * self.bandsize + 1

    def index(self, line, slot):
        n = 2**self.system_bitsize
        if slot >= self.n_nonzero:
            return slot
        return (line + slot - self.bandsize) % n

    def my_tensor(self):
        n = 2**self.system_bitsize
        m = self.n_nonzero
        perm = np.empty(n * n, dtype=int)
        for line in range(n):
            band = [(line + s - self.bandsize) % n for s in range(m)]
            rest = [v for v in range(n) if v not in band]
            targets = band + rest
            for slot in range(n):
                perm[slot * n + line] = targets[slot] * n + line
        return _perm_matrix(perm)

    def on_classical_vals(self, slot, line):
        n = 2**self.system_bitsize
        m = self.n_nonzero
        band = [(line + s - self.bandsize) % n for s in range(m)]
        targets = band + [v for v in range(n) if v not in band]
        return {"slot": targets[slot], "line": line}

    def leaf_counts(self):
        return GateCounts(toffoli=2 * (self.system_bitsize - 1))


# ---------------------------------------------------------------------------
# Entry oracles


class _EntryOracle(Bloq):
    """Rotate q so that <0|q> = A[row, col] (real entries of modulus at most 1)."""

    system_bitsize: int

    @property
    def signature(self):
        n = self.system_bitsize
        return Signature([Register("q", Bit()), Register("row", UInt(n)), Register("col", UInt(n))])

    def entry(self, row: int, col: int) -> float:
        raise NotImplementedError

    def my_tensor(self):
        n = 2**self.system_bitsize
        dim = 2 * n * n
        out = np.zeros((dim, dim))
        for row in range(n):
            for col in range(n):
                a = self.entry(row, col)
                s = math.sqrt(max(0.0, 1 - a * a))
                i0, i1 = row * n + col, n * n + row * n + col
                out[i0, i0], out[i0, i1], out[i1, i0], out[i1, i1] = a, -s, s, a
        return out


@attrs.frozen
class UniformEntryOracle(_EntryOracle):
    system_bitsize: int
    value: float

    def __attrs_post_init__(self):
        if abs(self.value) > 1:
            raise OracleShapeMismatch(f"entries must have modulus at most 1, got {self.value}")

    def entry(self, row, col):
        return self.value

    def leaf_counts(self):
        return GateCounts(rotations=[(1e-11, 1)])


def _freeze(data) -> tuple:
    return tuple(tuple(float(x) for x in row) for row in np.asarray(data, dtype=float))


@attrs.frozen
class ExplicitEntryOracle(_EntryOracle):
    """Entries loaded from a lookup table as rotation angles of ``entry_bitsize`` bits."""

    system_bitsize: int
    data: tuple = attrs.field(converter=_freeze)
    entry_bitsize: int = 10

    def __attrs_post_init__(self):
        n = 2**self.system_bitsize
        if np.shape(self.data) != (n, n):
            raise OracleShapeMismatch(f"data shape {np.shape(self.data)} does not match {n}x{n}")
        if np.max(np.abs(self.data)) > 1:
            raise OracleShapeMismatch("entries must have modulus at most 1")

    def entry(self, row, col):
        theta = math.acos(self.data[row][col])
        scale = 2**self.entry_bitsize / math.pi
        return math.cos(round(theta * scale) / scale)

    def leaf_counts(self):
        n_entries = 4**self.system_bitsize
        b = self.entry_bitsize
        lookup = 2 * int(qrom_toffoli(QROMVariant.PLAIN, n_entries, b)) if n_entries >= 2 else 0
        return GateCounts(toffoli=lookup + b)


def entry_bitsize_for(eps: float, sparsity: int) -> int:
    """Angle bits keeping the spectral error of an m-sparse matrix below eps."""
    if not 0 < eps < 1:
        raise BadEpsilon(f"precision must lie in (0, 1), got {eps}")
    return max(1, math.ceil(math.log2(sparsity * math.pi / (2 * eps))))


# ---------------------------------------------------------------------------
# The encoding


@attrs.frozen
class UniformSlots(Bloq):
    """Householder map |0> -> sum_{l < m} |l> / sqrt(m) on an n-bit register."""

    n_slots: int
    bitsize: int

    @property
    def signature(self):
        return Signature([Register("slot", UInt(self.bitsize))])

    def my_tensor(self):
        dim = 2**self.bitsize
        w = np.zeros(dim)
        w[: self.n_slots] = 1 / math.sqrt(self.n_slots)
        e0 = np.zeros(dim)
        e0[0] = 1
        v = e0 - w
        if np.linalg.norm(v) < 1e-15:
            return np.eye(dim)
        v /= np.linalg.norm(v)
        return np.eye(dim) - 2 * np.outer(v, v)

    def leaf_counts(self):
        return uniform_superposition_cost(self.n_slots) if self.n_slots > 1 else GateCounts()

    def adjoint(self):
        return self


@attrs.frozen
class SwapRegisters(Bloq):
    bitsize: int

    @property
    def signature(self):
        return Signature([Register("x", UInt(self.bitsize)), Register("y", UInt(self.bitsize))])

    def on_classical_vals(self, x, y):
        return {"x": y, "y": x}

    def declared_callees(self):
        return {Swap(): self.bitsize}

    def adjoint(self):
        return self


@attrs.frozen
class SparseMatrix(Bloq):
    row_oracle: _RowColumnOracle
    col_oracle: _RowColumnOracle
    entry_oracle: _EntryOracle
    epsilon: float = 0.0

    def __attrs_post_init__(self):
        sizes = {self.row_oracle.system_bitsize, self.col_oracle.system_bitsize,
                 self.entry_oracle.system_bitsize}
        if len(sizes) != 1:
            raise OracleShapeMismatch(f"oracles disagree on the system size: {sorted(sizes)}")

    @property
    def system_bitsize(self) -> int:
        return self.row_oracle.system_bitsize

    @property
    def sparsity(self) -> int:
        return max(self.row_oracle.n_nonzero, self.col_oracle.n_nonzero)

    @property
    def signature(self):
        n = self.system_bitsize
        return Signature([Register("ancilla", UInt(n + 1)), Register("system", UInt(n))])

    def build_composite(self, bb, ancilla, system):
        n, m = self.system_bitsize, self.sparsity
        bits = bb.split(ancilla)
        q, slot = bits[0], bb.join(bits[1:])
        slot = bb.add(UniformSlots(m, n), slot=slot)
        slot, system = bb.add(self.col_oracle, slot=slot, line=system)
        q, slot, system = bb.add(self.entry_oracle, q=q, row=slot, col=system)
        slot, system = bb.add(SwapRegisters(n), x=slot, y=system)
        slot, system = bb.add(self.row_oracle.adjoint(), slot=slot, line=system)
        slot = bb.add(UniformSlots(m, n), slot=slot)
        return {"ancilla": bb.join([q] + list(bb.split(slot))), "system": system}

    def declared_callees(self):
        n, m = self.system_bitsize, self.sparsity
        out = {UniformSlots(m, n): 2, self.col_oracle: 1, self.entry_oracle: 1,
               SwapRegisters(n): 1}
        adj = self.row_oracle.adjoint()
        out[adj] = out.get(adj, 0) + 1
        return out

    def __str__(self):
        return f"SparseMatrix(n={self.system_bitsize}, m={self.sparsity})"


def be_sparse_matrix(row_oracle, col_oracle, entry_oracle, epsilon: float = 0.0) -> BlockEncoding:
    """(m, n + 1, epsilon) encoding of an m-sparse matrix."""
    b = SparseMatrix(row_oracle, col_oracle, entry_oracle, epsilon)
    return BlockEncoding(b, b.sparsity, b.system_bitsize + 1, epsilon, b.system_bitsize)


def explicit_matrix_encoding(data, epsilon: float) -> BlockEncoding:
    """Dense matrix treated as fully sparse, entries loaded from a lookup table."""
    data = np.asarray(data, dtype=float)
    n = max(1, math.ceil(math.log2(len(data))))
    m = 2**n
    oracle = TopLeftRowColumnOracle(n)
    entries = ExplicitEntryOracle(n, data, entry_bitsize_for(epsilon, m))
    return be_sparse_matrix(oracle, oracle, entries, epsilon)
