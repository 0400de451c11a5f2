"""Exact linear algebra over F2 and F2[τ].

- ``BitMatrix``: dense F2 matrix with rows packed into little-endian uint64 words
  (column ``j`` is bit ``j % 64`` of word ``j // 64``).
- ``rref`` / ``solve`` / ``nullspace``: deterministic Gaussian elimination.
- ``EchelonBasis``: incremental span membership with coordinate tracking.
- ``TauMatrix`` / ``snf_tau``: Smith normal form over F2[τ], polynomials stored as int bitmasks.
"""

import logging
from typing import Iterable, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

WORD_BITS = 64
_ONE = np.uint64(1)


def _words_for(cols: int) -> int:
    return max(1, (cols + WORD_BITS - 1) // WORD_BITS)


def _bit(col: int) -> tuple[int, np.uint64]:
    return col // WORD_BITS, _ONE << np.uint64(col % WORD_BITS)


# ---------------------------------------------------------------------------
# BitMatrix
# ---------------------------------------------------------------------------


class BitMatrix:
    """rows × cols matrix over F2."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Optional[np.ndarray] = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            data = np.zeros((rows, _words_for(cols)), dtype=np.uint64)
        self.data = data

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for i in range(n):
            m.set(i, i)
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int]], cols: int) -> "BitMatrix":
        """Build from a list of rows, each given by its set column indices (repeats cancel)."""
        m = cls(len(rows), cols)
        for i, row in enumerate(rows):
            for j in row:
                m.toggle(i, j)
        return m

    @classmethod
    def from_dense(cls, array) -> "BitMatrix":
        dense = np.asarray(array, dtype=np.uint8) % 2
        if dense.ndim != 2:
            raise ValueError(f"from_dense expects a 2-d array, got shape {dense.shape}")
        rows, cols = dense.shape
        m = cls(rows, cols)
        for i, j in zip(*np.nonzero(dense)):
            m.set(int(i), int(j))
        return m

    @classmethod
    def from_ints(cls, vectors: Sequence[int], cols: int) -> "BitMatrix":
        m = cls(len(vectors), cols)
        n_words = m.data.shape[1]
        for i, v in enumerate(vectors):
            m.data[i] = np.frombuffer(v.to_bytes(8 * n_words, "little"), dtype="<u8")
        return m

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    # -- access -------------------------------------------------------------

    def get(self, i: int, j: int) -> int:
        word, bit = _bit(j)
        return int((self.data[i, word] & bit) != 0)

    def set(self, i: int, j: int) -> None:
        word, bit = _bit(j)
        self.data[i, word] |= bit

    def toggle(self, i: int, j: int) -> None:
        if not 0 <= j < self.cols:
            raise IndexError(f"column {j} outside 0..{self.cols - 1}")
        word, bit = _bit(j)
        self.data[i, word] ^= bit

    def row_int(self, i: int) -> int:
        return int.from_bytes(self.data[i].astype("<u8").tobytes(), "little")

    def row_indices(self, i: int) -> list[int]:
        v = self.row_int(i)
        indices = []
        while v:
            low = v & -v
            indices.append(low.bit_length() - 1)
            v ^= low
        return indices

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i in range(self.rows):
            for j in self.row_indices(i):
                dense[i, j] = 1
        return dense

    def is_zero(self) -> bool:
        return not self.data.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, rank={self.rank()})"

    # -- algebra ------------------------------------------------------------

    def transpose(self) -> "BitMatrix":
        result = BitMatrix(self.cols, self.rows)
        for i in range(self.rows):
            for j in self.row_indices(i):
                result.set(j, i)
        return result

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        result = BitMatrix(self.rows, other.cols)
        for i in range(self.rows):
            indices = self.row_indices(i)
            if indices:
                result.data[i] = np.bitwise_xor.reduce(other.data[indices], axis=0)
        return result

    __matmul__ = matmul

    def apply(self, vector: Sequence[int]) -> list[int]:
        """self · v for a 0/1 column vector given as a sequence of length ``cols``."""
        v = sum(1 << j for j, bit in enumerate(vector) if bit & 1)
        return [bin(self.row_int(i) & v).count("1") & 1 for i in range(self.rows)]

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.rows != other.rows:
            raise ValueError("hstack needs matching row counts")
        return BitMatrix.from_ints(
            [self.row_int(i) | (other.row_int(i) << self.cols) for i in range(self.rows)],
            self.cols + other.cols,
        )

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.cols:
            raise ValueError("vstack needs matching column counts")
        return BitMatrix(self.rows + other.rows, self.cols, np.vstack([self.data, other.data]))

    def rank(self) -> int:
        pivots, _, _ = rref(self, with_transform=False)
        return len(pivots)


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------


def rref(
    m: BitMatrix, n_pivot_cols: Optional[int] = None, with_transform: bool = True
) -> tuple[list[int], BitMatrix, Optional[BitMatrix]]:
    """Reduced row echelon form.

    Pivots are searched in the first ``n_pivot_cols`` columns only (all columns by default),
    in increasing column order with the lowest eligible row as pivot row.

    Returns:
        (pivot columns, R, T) with T·m = R; T is None when ``with_transform`` is False.
    """
    n_pivot_cols = m.cols if n_pivot_cols is None else n_pivot_cols
    work = m.data.copy()
    transform = BitMatrix.identity(m.rows).data if with_transform else None
    pivots: list[int] = []
    row = 0
    for col in range(n_pivot_cols):
        if row == m.rows:
            break
        word, bit = _bit(col)
        candidates = np.nonzero(work[row:, word] & bit)[0]
        if candidates.size == 0:
            continue
        pivot = row + int(candidates[0])
        if pivot != row:
            work[[row, pivot]] = work[[pivot, row]]
            if transform is not None:
                transform[[row, pivot]] = transform[[pivot, row]]
        hits = np.nonzero(work[:, word] & bit)[0]
        hits = hits[hits != row]
        if hits.size:
            work[hits] ^= work[row]
            if transform is not None:
                transform[hits] ^= transform[row]
        pivots.append(col)
        row += 1
    reduced = BitMatrix(m.rows, m.cols, work)
    t = BitMatrix(m.rows, m.rows, transform) if transform is not None else None
    return pivots, reduced, t


def solve(m: BitMatrix, v: Sequence[int]) -> Optional[list[int]]:
    """A solution x of m·x = v (free variables zero), or None when inconsistent."""
    if len(v) != m.rows:
        raise ValueError(f"Right-hand side has length {len(v)}, expected {m.rows}")
    column = BitMatrix.from_rows([[0] if bit & 1 else [] for bit in v], 1)
    augmented = m.hstack(column)
    pivots, reduced, _ = rref(augmented, n_pivot_cols=m.cols, with_transform=False)
    for i in range(len(pivots), m.rows):
        if reduced.get(i, m.cols):
            return None
    x = [0] * m.cols
    for k, col in enumerate(pivots):
        x[col] = reduced.get(k, m.cols)
    return x


def nullspace(m: BitMatrix) -> BitMatrix:
    """Basis of {x : m·x = 0}, one basis vector per free column, as the rows of a BitMatrix."""
    pivots, reduced, _ = rref(m, with_transform=False)
    pivot_set = set(pivots)
    vectors = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for k, col in enumerate(pivots):
            if reduced.get(k, free):
                v |= 1 << col
        vectors.append(v)
    return BitMatrix.from_ints(vectors, m.cols)


def column_space_rows(m: BitMatrix) -> list[int]:
    """Reduced basis of the row space of m, as int bitsets."""
    pivots, reduced, _ = rref(m, with_transform=False)
    return [reduced.row_int(k) for k in range(len(pivots))]


class EchelonBasis:
    """Incrementally reduced F2 span of int bitsets, each row tagged with a coordinate mask.

    Rows are keyed by their highest set bit. ``reduce`` returns the remainder of a vector
    and the XOR of the tags of the rows used.
    """

    def __init__(self):
        self._rows: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: int) -> tuple[int, int]:
        tag = 0
        while v:
            lead = v.bit_length() - 1
            entry = self._rows.get(lead)
            if entry is None:
                break
            v ^= entry[0]
            tag ^= entry[1]
        return v, tag

    def insert(self, v: int, tag: int = 0) -> bool:
        """Add v with its tag; returns False when v was already in the span."""
        remainder, used = self.reduce(v)
        if not remainder:
            return False
        self._rows[remainder.bit_length() - 1] = (remainder, used ^ tag)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def normal_form(self, v: int) -> int:
        """Fully reduced representative of v modulo the span (canonical)."""
        result = 0
        while v:
            lead = v.bit_length() - 1
            entry = self._rows.get(lead)
            if entry is None:
                result |= 1 << lead
                v ^= 1 << lead
            else:
                v ^= entry[0]
        return result


def bits_to_int(bits: Iterable[int]) -> int:
    """Pack a collection of set-bit indices (repeats cancel) into an int."""
    v = 0
    for j in bits:
        v ^= 1 << j
    return v


def int_to_bits(v: int) -> list[int]:
    indices = []
    while v:
        low = v & -v
        indices.append(low.bit_length() - 1)
        v ^= low
    return indices


# ---------------------------------------------------------------------------
# F2[τ] polynomials as int bitmasks (bit k is the coefficient of τ^k)
# ---------------------------------------------------------------------------


def gf2x_deg(a: int) -> int:
    return a.bit_length() - 1


def gf2x_mul(a: int, b: int) -> int:
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def gf2x_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    q = 0
    db = gf2x_deg(b)
    while a and gf2x_deg(a) >= db:
        shift = gf2x_deg(a) - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def gf2x_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2x_divmod(a, b)[1]
    return a


def gf2x_name(a: int) -> str:
    if a == 0:
        return "0"
    parts = []
    for k in reversed(range(a.bit_length())):
        if a >> k & 1:
            parts.append("1" if k == 0 else ("τ" if k == 1 else f"τ^{k}"))
    return " + ".join(parts)


class TauMatrix:
    """Matrix over F2[τ]; ``entries[i][j]`` is an int bitmask polynomial."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[list[list[int]]] = None):
        self.rows = rows
        self.cols = cols
        self.entries = entries if entries is not None else [[0] * cols for _ in range(rows)]

    @classmethod
    def identity(cls, n: int) -> "TauMatrix":
        m = cls(n, n)
        for i in range(n):
            m.entries[i][i] = 1
        return m

    @classmethod
    def from_sparse(cls, rows: Sequence[dict], cols: int) -> "TauMatrix":
        m = cls(len(rows), cols)
        for i, row in enumerate(rows):
            for j, value in row.items():
                m.entries[i][j] ^= value
        return m

    def copy(self) -> "TauMatrix":
        return TauMatrix(self.rows, self.cols, [list(row) for row in self.entries])

    def transpose(self) -> "TauMatrix":
        return TauMatrix(self.cols, self.rows, [list(col) for col in zip(*self.entries)] if self.rows else [])

    def matmul(self, other: "TauMatrix") -> "TauMatrix":
        if self.cols != other.rows:
            raise ValueError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        result = TauMatrix(self.rows, other.cols)
        for i in range(self.rows):
            for k, a in enumerate(self.entries[i]):
                if not a:
                    continue
                for j, b in enumerate(other.entries[k]):
                    if b:
                        result.entries[i][j] ^= gf2x_mul(a, b)
        return result

    __matmul__ = matmul

    def at_tau(self, value: int) -> BitMatrix:
        """Specialize τ to 0 or 1, giving an F2 matrix."""
        rows = []
        for row in self.entries:
            if value:
                rows.append([j for j, a in enumerate(row) if bin(a).count("1") & 1])
            else:
                rows.append([j for j, a in enumerate(row) if a & 1])
        return BitMatrix.from_rows(rows, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TauMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries


def snf_tau(m: TauMatrix) -> tuple[list[int], TauMatrix, TauMatrix]:
    """Smith normal form over F2[τ].

    Returns:
        (diagonal, U, V) with U·m·V diagonal, the nonzero diagonal entries monic and each
        dividing the next; U and V are invertible.
    """
    a = m.copy()
    u = TauMatrix.identity(m.rows)
    v = TauMatrix.identity(m.cols)
    diagonal: list[int] = []

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            a.entries[i], a.entries[j] = a.entries[j], a.entries[i]
            u.entries[i], u.entries[j] = u.entries[j], u.entries[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for row in a.entries:
                row[i], row[j] = row[j], row[i]
            for row in v.entries:
                row[i], row[j] = row[j], row[i]

    def add_row(src: int, dst: int, factor: int) -> None:
        """row[dst] += factor · row[src]"""
        for target, source in ((a.entries[dst], a.entries[src]), (u.entries[dst], u.entries[src])):
            for j, value in enumerate(source):
                if value:
                    target[j] ^= gf2x_mul(factor, value)

    def add_col(src: int, dst: int, factor: int) -> None:
        for matrix in (a, v):
            for row in matrix.entries:
                if row[src]:
                    row[dst] ^= gf2x_mul(factor, row[src])

    for t in range(min(m.rows, m.cols)):
        while True:
            best = None
            for i in range(t, a.rows):
                for j in range(t, a.cols):
                    value = a.entries[i][j]
                    if value and (best is None or gf2x_deg(value) < best[0]):
                        best = (gf2x_deg(value), i, j)
                        if best[0] == 0:
                            break
                if best is not None and best[0] == 0:
                    break
            if best is None:
                return diagonal, u, v
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            pivot = a.entries[t][t]
            dirty = False
            for i in range(t + 1, a.rows):
                if a.entries[i][t]:
                    q, r = gf2x_divmod(a.entries[i][t], pivot)
                    add_row(t, i, q)
                    dirty = dirty or bool(r)
            for j in range(t + 1, a.cols):
                if a.entries[t][j]:
                    q, r = gf2x_divmod(a.entries[t][j], pivot)
                    add_col(t, j, q)
                    dirty = dirty or bool(r)
            if dirty:
                continue
            offender = None
            for i in range(t + 1, a.rows):
                for j in range(t + 1, a.cols):
                    if a.entries[i][j] and gf2x_divmod(a.entries[i][j], pivot)[1]:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, 1)
        diagonal.append(a.entries[t][t])
    return diagonal, u, v


def tau_power(a: int) -> Optional[int]:
    """k when a = τ^k, else None."""
    if a and a & (a - 1) == 0:
        return a.bit_length() - 1
    return None
