"""Dense GF(2) vectors and matrices packed into Python integers.

A vector of length n is stored as one int whose bit i is coordinate i,
so XOR/AND give word-parallel row operations and ``int.bit_count`` gives
the Hamming weight.  Elimination always pivots on the leftmost nonzero
column (lowest bit index) and swaps rows to the lowest free index, so
every routine here is deterministic.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .errors import DimensionMismatchError


def lex_key(bits: int, length: int) -> int:
    """Order key for 'lexicographically smallest on bit index'.

    Compares bit 0 first, then bit 1, ...; a clear bit sorts before a set
    bit.  Implemented by reversing the bit string so ordinary integer
    comparison applies.
    """
    key = 0
    for i in range(length):
        key = (key << 1) | ((bits >> i) & 1)
    return key


class BitVector:
    """Immutable bit vector; bit i of ``bits`` is coordinate i."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if bits >> n:
            raise ValueError(f"bits extend past length {n}")
        self.n = n
        self.bits = bits

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> "BitVector":
        bits = 0
        for i in support:
            if not 0 <= i < n:
                raise IndexError(f"bit index {i} out of range for length {n}")
            bits |= 1 << i
        return cls(n, bits)

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        """Parse '0101...' where character i is coordinate i."""
        bits = 0
        for i, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"invalid bit character {ch!r}")
        return cls(len(s), bits)

    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> list[int]:
        out = []
        b = self.bits
        while b:
            lsb = b & -b
            out.append(lsb.bit_length() - 1)
            b ^= lsb
        return out

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if other.n != self.n:
            raise DimensionMismatchError(self.n, other.n)
        return BitVector(self.n, self.bits ^ other.bits)

    def __and__(self, other: "BitVector") -> "BitVector":
        if other.n != self.n:
            raise DimensionMismatchError(self.n, other.n)
        return BitVector(self.n, self.bits & other.bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"BitVector({self.to01()!r})"

    def to01(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.n))


class BitMatrix:
    """Row-major GF(2) matrix; each row is an int bitset of width ``cols``."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Optional[list[int]] = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            data = [0] * rows
        if len(data) != rows:
            raise ValueError(f"expected {rows} rows, got {len(data)}")
        for r in data:
            if r >> cols:
                raise ValueError(f"row bits extend past {cols} columns")
        self.data = data

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: Optional[int] = None) -> "BitMatrix":
        packed = []
        width = cols
        for row in rows:
            bits = 0
            length = 0
            for i, x in enumerate(row):
                if x & 1:
                    bits |= 1 << i
                length = i + 1
            if width is None:
                width = length
            elif length > width:
                raise ValueError("ragged row longer than declared column count")
            packed.append(bits)
        if width is None:
            raise ValueError("cannot infer column count of an empty matrix")
        return cls(len(packed), width, packed)

    @classmethod
    def from_strings(cls, rows: Iterable[str]) -> "BitMatrix":
        vecs = [BitVector.from_string(s) for s in rows]
        if not vecs:
            raise ValueError("cannot infer column count of an empty matrix")
        n = vecs[0].n
        return cls(len(vecs), n, [v.bits for v in vecs])

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, list(self.data))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, tuple(self.data)))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def entry(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def to_ascii(self) -> str:
        """Debug serialization: one '0'/'1' row per line."""
        return "\n".join(
            "".join("1" if (r >> j) & 1 else "0" for j in range(self.cols))
            for r in self.data
        )

    @classmethod
    def from_ascii(cls, text: str) -> "BitMatrix":
        return cls.from_strings(text.strip().splitlines())

    def transpose(self) -> "BitMatrix":
        out = [0] * self.cols
        for i, r in enumerate(self.data):
            while r:
                lsb = r & -r
                out[lsb.bit_length() - 1] |= 1 << i
                r ^= lsb
        return BitMatrix(self.cols, self.rows, out)

    def stack(self, other: "BitMatrix") -> "BitMatrix":
        if other.cols != self.cols:
            raise DimensionMismatchError(self.cols, other.cols, "column count")
        return BitMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def nonzero_rows(self) -> "BitMatrix":
        kept = [r for r in self.data if r]
        return BitMatrix(len(kept), self.cols, kept)

    def iter_rowspace(self) -> Iterator[int]:
        """Yield all 2^rank rowspace elements (Gray-code order, starts at 0)."""
        basis = [r for r in _rref(list(self.data))[0] if r]
        x = 0
        yield x
        for i in range(1, 1 << len(basis)):
            x ^= basis[(i & -i).bit_length() - 1]
            yield x


def _rref(rows: list[int]) -> tuple[list[int], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot column list)."""
    pivots: list[int] = []
    pivot_row = 0
    m = len(rows)
    while pivot_row < m:
        best_col = None
        best_idx = None
        for idx in range(pivot_row, m):
            r = rows[idx]
            if r == 0:
                continue
            col = (r & -r).bit_length() - 1
            if best_col is None or col < best_col or (col == best_col and idx < best_idx):
                best_col, best_idx = col, idx
        if best_col is None:
            break
        rows[pivot_row], rows[best_idx] = rows[best_idx], rows[pivot_row]
        piv = rows[pivot_row]
        mask = 1 << best_col
        for idx in range(m):
            if idx != pivot_row and rows[idx] & mask:
                rows[idx] ^= piv
        pivots.append(best_col)
        pivot_row += 1
    return rows, pivots


def mat_vec_mul(m: BitMatrix, v: BitVector) -> BitVector:
    """Return M·v over GF(2); result bit i is <row_i, v>."""
    if v.n != m.cols:
        raise DimensionMismatchError(m.cols, v.n)
    out = 0
    vb = v.bits
    for i, r in enumerate(m.data):
        out |= ((r & vb).bit_count() & 1) << i
    return BitVector(m.rows, out)


def mat_mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise DimensionMismatchError(a.cols, b.rows, "inner dimension")
    bt = b.transpose()
    out = []
    for ra in a.data:
        bits = 0
        for j, rb in enumerate(bt.data):
            bits |= ((ra & rb).bit_count() & 1) << j
        out.append(bits)
    return BitMatrix(a.rows, b.cols, out)


def rank(m: BitMatrix) -> int:
    return len(_rref(list(m.data))[1])


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis of {x : Mx = 0}, one row per free column, cols - rank rows."""
    rows, pivots = _rref(list(m.data))
    pivot_set = set(pivots)
    free_cols = [c for c in range(m.cols) if c not in pivot_set]
    basis = []
    for f in free_cols:
        vec = 1 << f
        for r, p in zip(rows, pivots):
            if (r >> f) & 1:
                vec |= 1 << p
        basis.append(vec)
    return BitMatrix(len(basis), m.cols, basis)


def solve_any(m: BitMatrix, b: BitVector) -> Optional[BitVector]:
    """Some x with Mx = b, or None if the system is inconsistent."""
    if b.n != m.rows:
        raise DimensionMismatchError(m.rows, b.n)
    aug_col = m.cols
    rows = [r | (((b.bits >> i) & 1) << aug_col) for i, r in enumerate(m.data)]
    rows, pivots = _rref(rows)
    x = 0
    for r, p in zip(rows, pivots):
        if p == aug_col:
            return None  # a row reduced to 0 = 1
        if (r >> aug_col) & 1:
            x |= 1 << p
    return BitVector(m.cols, x)


def rowspace_contains(m: BitMatrix, v: BitVector) -> bool:
    """True iff v is a GF(2) combination of the rows of M."""
    if v.n != m.cols:
        raise DimensionMismatchError(m.cols, v.n)
    rows, pivots = _rref(list(m.data))
    residue = v.bits
    for r, p in zip(rows, pivots):
        if (residue >> p) & 1:
            residue ^= r
    return residue == 0


def reduce_against(m: BitMatrix, v: BitVector) -> BitVector:
    """Residue of v after eliminating with the rows of M (RREF pivots)."""
    if v.n != m.cols:
        raise DimensionMismatchError(m.cols, v.n)
    rows, pivots = _rref(list(m.data))
    residue = v.bits
    for r, p in zip(rows, pivots):
        if (residue >> p) & 1:
            residue ^= r
    return BitVector(v.n, residue)


def row_reduce_independent(m: BitMatrix) -> BitMatrix:
    """Drop dependent rows; keeps the RREF rows (deterministic basis)."""
    rows, pivots = _rref(list(m.data))
    return BitMatrix(len(pivots), m.cols, rows[: len(pivots)])


def kronecker(ma: BitMatrix, mb: BitMatrix) -> BitMatrix:
    """Kronecker product with (outer, inner) index order.

    Row (i,k) maps to i*mb.rows + k, column (j,l) to j*mb.cols + l; this
    convention is fixed project-wide (CSS commutation depends on it).
    """
    out = []
    for ra in ma.data:
        for rb in mb.data:
            bits = 0
            r = ra
            while r:
                lsb = r & -r
                j = lsb.bit_length() - 1
                bits |= rb << (j * mb.cols)
                r ^= lsb
            out.append(bits)
    return BitMatrix(ma.rows * mb.rows, ma.cols * mb.cols, out)
