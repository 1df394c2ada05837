"""Classical linear codes, tensor / dual tensor constructions, and the
exhaustive oracles the decoder relies on (coset leaders, minimal
column/row decompositions, product-expansion constant).

All exhaustive routines are gated by explicit budgets and raise
``BudgetError`` beyond them rather than degrading silently.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import gf2
from .errors import BudgetError, NotInCodeError
from .gf2 import BitMatrix, BitVector

# Enumeration budgets (bits of state each oracle may walk).
MAX_DISTANCE_DIM = 22
MAX_KAPPA_DIM = 16
MAX_COLUMN_ASSIGNMENTS = 1 << 20
MAX_SYNDROME_SPACE = 1 << 16


class LinearCode:
    """A binary linear code held as a paired (generator, parity check) basis.

    Invariants: gen and pchk rows are each independent, gen·pchkᵀ = 0, and
    rank(gen) + rank(pchk) = n.
    """

    __slots__ = ("n", "gen", "pchk")

    def __init__(self, n: int, gen: BitMatrix, pchk: BitMatrix):
        self.n = n
        self.gen = gen
        self.pchk = pchk

    @classmethod
    def from_parity_check(cls, h: BitMatrix) -> "LinearCode":
        h = gf2.row_reduce_independent(h)
        return cls(h.cols, gf2.kernel_basis(h), h)

    @classmethod
    def from_generator(cls, g: BitMatrix) -> "LinearCode":
        g = gf2.row_reduce_independent(g)
        return cls(g.cols, g, gf2.kernel_basis(g))

    @property
    def dim(self) -> int:
        return self.gen.rows

    @property
    def rate(self) -> float:
        return self.dim / self.n

    def dual(self) -> "LinearCode":
        return LinearCode(self.n, self.pchk, self.gen)

    def contains(self, v: BitVector) -> bool:
        return gf2.mat_vec_mul(self.pchk, v).bits == 0

    def contains_bits(self, bits: int) -> bool:
        return all((r & bits).bit_count() & 1 == 0 for r in self.pchk.data)

    def codeword_bits(self) -> list[int]:
        """All 2^dim codewords as packed ints (Gray-code order from 0)."""
        return list(self.gen.iter_rowspace())

    def same_subspace(self, other: "LinearCode") -> bool:
        if self.n != other.n or self.dim != other.dim:
            return False
        return all(
            gf2.rowspace_contains(self.gen, other.gen.row(i))
            for i in range(other.gen.rows)
        )

    def to_json(self) -> dict:
        return {"n": self.n, "gen": [self.gen.row(i).to01() for i in range(self.gen.rows)]}

    @classmethod
    def from_json(cls, obj: dict) -> "LinearCode":
        n = int(obj["n"])
        rows = obj["gen"]
        if not rows:
            return zero_code(n)
        g = BitMatrix.from_strings(rows)
        if g.cols != n:
            raise ValueError(f"generator width {g.cols} != n {n}")
        return cls.from_generator(g)

    def __repr__(self) -> str:
        return f"LinearCode(n={self.n}, k={self.dim})"


def repetition_code(n: int) -> LinearCode:
    return LinearCode.from_generator(BitMatrix(1, n, [(1 << n) - 1]))


def parity_code(n: int) -> LinearCode:
    """Even-weight code of length n (dual of the repetition code)."""
    return repetition_code(n).dual()


def full_space(n: int) -> LinearCode:
    return LinearCode(n, BitMatrix.identity(n), BitMatrix(0, n))


def zero_code(n: int) -> LinearCode:
    return LinearCode(n, BitMatrix(0, n), BitMatrix.identity(n))


def sample_random_code(n: int, k: int, rng) -> LinearCode:
    """Uniformly random k-dimensional subspace of F_2^n.

    Rejection-samples k x n matrices until full rank; deterministic for a
    fixed numpy Generator state.
    """
    if k > n:
        raise ValueError(f"dimension {k} exceeds length {n}")
    if k == 0:
        return zero_code(n)
    while True:
        bits = rng.integers(0, 2, size=(k, n))
        g = BitMatrix.from_rows(bits.tolist(), cols=n)
        if gf2.rank(g) == k:
            return LinearCode.from_generator(g)


def tensor_code(ca: LinearCode, cb: LinearCode) -> LinearCode:
    """C_A x C_B: grid codewords with every column in C_A, every row in C_B.

    Position (a, b) of the grid is bit a*n_B + b (A-major), matching the
    project-wide Kronecker convention.
    """
    gen = gf2.kronecker(ca.gen, cb.gen)
    return LinearCode(ca.n * cb.n, gen, gf2.kernel_basis(gen))


@dataclass
class DualTensorCode:
    """C_A ⊞ C_B: sums of column codewords and row codewords.

    pchk = H_A ⊗ H_B; dim = |A|·|B| − dim(C_A^⊥)·dim(C_B^⊥).
    """

    code_a: LinearCode
    code_b: LinearCode
    pchk: BitMatrix
    dim: int

    @property
    def na(self) -> int:
        return self.code_a.n

    @property
    def nb(self) -> int:
        return self.code_b.n

    @property
    def n(self) -> int:
        return self.na * self.nb

    def contains_bits(self, bits: int) -> bool:
        return all((r & bits).bit_count() & 1 == 0 for r in self.pchk.data)

    def as_linear_code(self) -> LinearCode:
        return LinearCode.from_parity_check(self.pchk) if self.pchk.rows else full_space(self.n)

    def codeword_bits(self) -> list[int]:
        if self.dim > MAX_KAPPA_DIM:
            raise BudgetError(f"dual tensor dimension {self.dim} > {MAX_KAPPA_DIM}")
        return list(gf2.kernel_basis(self.pchk).iter_rowspace())


def dual_tensor_code(ca: LinearCode, cb: LinearCode) -> DualTensorCode:
    pchk = gf2.kronecker(ca.pchk, cb.pchk)
    dim = ca.n * cb.n - ca.pchk.rows * cb.pchk.rows
    return DualTensorCode(ca, cb, pchk, dim)


def min_distance_bruteforce(code: LinearCode) -> int | float:
    """Exact minimum nonzero codeword weight; inf for the zero code."""
    if code.dim == 0:
        return math.inf
    if code.dim > MAX_DISTANCE_DIM:
        raise BudgetError(
            f"distance enumeration needs 2^{code.dim} codewords (budget 2^{MAX_DISTANCE_DIM})"
        )
    best = code.n + 1
    x = 0
    basis = code.gen.data
    for i in range(1, 1 << code.dim):
        x ^= basis[(i & -i).bit_length() - 1]
        w = x.bit_count()
        if w < best:
            best = w
    return best


def _column_placements(dt: DualTensorCode) -> tuple[list[int], list[list[int]]]:
    """Per column b, each C_A codeword placed onto the grid bits {a*nb + b}."""
    na, nb = dt.na, dt.nb
    cws = dt.code_a.codeword_bits() if dt.code_a.dim <= MAX_DISTANCE_DIM else None
    if cws is None:  # pragma: no cover - guarded by budget checks upstream
        raise BudgetError("C_A too large to enumerate")
    placed = []
    for b in range(nb):
        col = []
        for u in cws:
            mask = 0
            uu = u
            while uu:
                lsb = uu & -uu
                a = lsb.bit_length() - 1
                mask |= 1 << (a * nb + b)
                uu ^= lsb
            col.append(mask)
        placed.append(col)
    return cws, placed


def _check_assignment_budget(dt: DualTensorCode) -> None:
    num = (1 << dt.code_a.dim) ** dt.nb
    if num > MAX_COLUMN_ASSIGNMENTS:
        raise BudgetError(
            f"|C_A|^|B| = {num} column assignments exceed budget {MAX_COLUMN_ASSIGNMENTS}"
        )


def _iter_cr_decompositions(dt: DualTensorCode, x: int):
    """Yield (c, r, n_cols, n_rows) over all valid decompositions x = c + r."""
    na, nb = dt.na, dt.nb
    cws_a, placed = _column_placements(dt)
    in_b = frozenset(dt.code_b.codeword_bits())
    row_mask = (1 << nb) - 1
    for choice in itertools.product(range(len(cws_a)), repeat=nb):
        c = 0
        n_cols = 0
        for b, ui in enumerate(choice):
            if ui:
                c |= placed[b][ui]
                n_cols += 1
        r = x ^ c
        ok = True
        n_rows = 0
        for a in range(na):
            row = (r >> (a * nb)) & row_mask
            if row:
                if row not in in_b:
                    ok = False
                    break
                n_rows += 1
        if ok:
            yield c, r, n_cols, n_rows


def min_cr_decomposition(x: BitVector | int, dt: DualTensorCode) -> tuple[BitVector, BitVector]:
    """Split a dual-tensor codeword x into c + r minimizing ||c|| + ||r||.

    c has every column in C_A, r every row in C_B; cost is the count of
    nonzero columns of c plus nonzero rows of r.  Ties break toward the
    lexicographically smallest c (bit-index order).
    """
    bits = x.bits if isinstance(x, BitVector) else x
    if not dt.contains_bits(bits):
        raise NotInCodeError("vector is not in the dual tensor code")
    _check_assignment_budget(dt)
    n = dt.n
    best = None
    for c, r, n_cols, n_rows in _iter_cr_decompositions(dt, bits):
        key = (n_cols + n_rows, gf2.lex_key(c, n))
        if best is None or key < best[0]:
            best = (key, c, r)
    assert best is not None, "dual tensor codeword must decompose"
    return BitVector(n, best[1]), BitVector(n, best[2])


def _placed_column_space(dt: DualTensorCode) -> list[tuple[int, int]]:
    """All c with columns in C_A as (mask, nonzero column count)."""
    na, nb = dt.na, dt.nb
    basis = []
    for gen in dt.code_a.gen.data:
        for b in range(nb):
            mask = 0
            g = gen
            while g:
                lsb = g & -g
                mask |= 1 << ((lsb.bit_length() - 1) * nb + b)
                g ^= lsb
            basis.append(mask)
    col_masks = [sum(1 << (a * nb + b) for a in range(na)) for b in range(nb)]
    out = [(0, 0)]
    c = 0
    for i in range(1, 1 << len(basis)):
        c ^= basis[(i & -i).bit_length() - 1]
        out.append((c, sum(1 for m in col_masks if c & m)))
    return out


def _placed_row_space(dt: DualTensorCode) -> list[tuple[int, int]]:
    """All r with rows in C_B as (mask, nonzero row count)."""
    na, nb = dt.na, dt.nb
    basis = [gen << (a * nb) for gen in dt.code_b.gen.data for a in range(na)]
    width = (1 << nb) - 1
    out = [(0, 0)]
    r = 0
    for i in range(1, 1 << len(basis)):
        r ^= basis[(i & -i).bit_length() - 1]
        out.append((r, sum(1 for a in range(na) if (r >> (a * nb)) & width)))
    return out


def product_expansion_kappa(ca: LinearCode, cb: LinearCode) -> Fraction:
    """Largest κ with κ(||c||/|A| + ||r||/|B|) ≤ |x|/(|A||B|) for all
    nonzero x in C_A ⊞ C_B, minimizing the left side over decompositions.

    Exhaustive over every (c, r) pair; exact rational result.  With the
    common denominator |A||B| cleared, the per-codeword optimum is the
    integer min of ||c||·|B| + ||r||·|A| over decompositions of x.
    """
    dt = dual_tensor_code(ca, cb)
    if dt.dim > MAX_KAPPA_DIM:
        raise BudgetError(f"dual tensor dimension {dt.dim} > {MAX_KAPPA_DIM}")
    pair_bits = ca.dim * cb.n + cb.dim * ca.n
    if 1 << pair_bits > MAX_COLUMN_ASSIGNMENTS * 4:
        raise BudgetError(f"(c, r) pair enumeration 2^{pair_bits} exceeds budget")
    if dt.dim == 0:
        raise ValueError("kappa undefined for the zero dual tensor code")
    na, nb = dt.na, dt.nb
    rows = _placed_row_space(dt)
    best: dict[int, int] = {}
    for c, nc in _placed_column_space(dt):
        base = nc * nb
        for r, nr in rows:
            cost = base + nr * na
            x = c ^ r
            cur = best.get(x)
            if cur is None or cost < cur:
                best[x] = cost
    best.pop(0, None)
    assert len(best) == (1 << dt.dim) - 1
    return min(Fraction(x.bit_count(), cost) for x, cost in best.items())


def coset_leader_table(dt: DualTensorCode) -> dict[int, int]:
    """Minimum-weight representative for every syndrome of H_A ⊗ H_B.

    Enumerates vectors in nondecreasing weight (positions lexicographic
    within a weight class) until each of the 2^r syndromes has a leader,
    so entries are weight-minimal and the construction is deterministic.
    Keys and values are packed bits.
    """
    r = dt.pchk.rows
    if 1 << r > MAX_SYNDROME_SPACE:
        raise BudgetError(f"syndrome space 2^{r} exceeds budget {MAX_SYNDROME_SPACE}")
    n = dt.n
    col_syndrome = [0] * n
    for i, row in enumerate(dt.pchk.data):
        while row:
            lsb = row & -row
            col_syndrome[lsb.bit_length() - 1] |= 1 << i
            row ^= lsb
    table: dict[int, int] = {}
    target = 1 << r
    for w in range(n + 1):
        for positions in itertools.combinations(range(n), w):
            s = 0
            y = 0
            for p in positions:
                s ^= col_syndrome[p]
                y |= 1 << p
            if s not in table:
                table[s] = y
                if len(table) == target:
                    return table
    return table  # pragma: no cover - full-rank pchk always fills the table
