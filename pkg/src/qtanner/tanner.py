"""Quantum Tanner CSS codes assembled from a left-right Cayley complex
and a pair of local codes.

X-type checks place a product basis of C_A ⊗ C_B on the local views of
V0 vertices; Z-type checks place C_A^⊥ ⊗ C_B^⊥ on V1 vertices.  The
``flip_roles`` switch relabels vertex classes (i, j) -> (i, 1-j), which
together with dualized local codes yields the Z-error decoding code with
H_X and H_Z exactly exchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import codes as codes_mod
from . import gf2
from .cayley import LeftRightCayleyComplex, V00, V01, V10, V11
from .codes import DualTensorCode, LinearCode
from .errors import BudgetError, CommutationError, DimensionMismatchError
from .gf2 import BitMatrix, BitVector

MAX_EXACT_REDUCED_RANK = 24

CORRECTED = "corrected"
DETECTED = "detected"
LOGICAL = "logical"


class QuantumTannerCode:
    """CSS code with qubits on faces; immutable after construction."""

    def __init__(
        self,
        complex: LeftRightCayleyComplex,
        local_a: LinearCode,
        local_b: LinearCode,
        flip_roles: bool = False,
    ):
        if local_a.n != complex.delta or local_b.n != complex.delta:
            raise DimensionMismatchError(complex.delta, local_a.n, "local code length")
        self.complex = complex
        self.local_a = local_a
        self.local_b = local_b
        self.flip_roles = flip_roles
        self.n = complex.num_faces
        self.delta = complex.delta

        order = complex.group.order
        flip = 1 if flip_roles else 0
        # effective class of a raw class: XOR the j bit
        raw_of_eff = [cls ^ flip for cls in (V00, V01, V10, V11)]
        self.v0_vertices = [
            complex.vertex(g, raw_of_eff[V00]) for g in range(order)
        ] + [complex.vertex(g, raw_of_eff[V11]) for g in range(order)]
        self.v1_vertices = [
            complex.vertex(g, raw_of_eff[V01]) for g in range(order)
        ] + [complex.vertex(g, raw_of_eff[V10]) for g in range(order)]

        self.x_check_basis = gf2.kronecker(local_a.gen, local_b.gen)
        self.z_check_basis = gf2.kronecker(local_a.pchk, local_b.pchk)
        self.r0 = self.x_check_basis.rows
        self.r1 = self.z_check_basis.rows

        self._views = {v: complex.local_view(v) for v in range(complex.num_vertices)}
        self.h_x = self._embed(self.v0_vertices, self.x_check_basis)
        self.h_z = self._embed(self.v1_vertices, self.z_check_basis)

        prod = gf2.mat_mat_mul(self.h_x, self.h_z.transpose())
        if any(prod.data):
            raise CommutationError("H_X · H_Z^T != 0; local-view orientation is broken")

        # lazy caches
        self._z_col_syndromes: Optional[list[int]] = None
        self._decoder_cache = None
        self._rank_hx: Optional[int] = None
        self._rank_hz: Optional[int] = None

    def _embed(self, vertices: list[int], basis: BitMatrix) -> BitMatrix:
        rows = []
        for v in vertices:
            view = self._views[v]
            for x in basis.data:
                bits = 0
                xx = x
                while xx:
                    lsb = xx & -xx
                    bits |= 1 << view[lsb.bit_length() - 1]
                    xx ^= lsb
                rows.append(bits)
        return BitMatrix(len(rows), self.n, rows)

    def effective_class(self, v: int) -> int:
        cls = self.complex.vertex_class(v)
        return cls ^ 1 if self.flip_roles else cls

    def local_view(self, v: int) -> list[int]:
        return self._views[v]

    @property
    def rank_hx(self) -> int:
        if self._rank_hx is None:
            self._rank_hx = gf2.rank(self.h_x)
        return self._rank_hx

    @property
    def rank_hz(self) -> int:
        if self._rank_hz is None:
            self._rank_hz = gf2.rank(self.h_z)
        return self._rank_hz

    @property
    def k(self) -> int:
        return self.n - self.rank_hx - self.rank_hz

    @property
    def rho(self) -> Fraction:
        return Fraction(self.local_a.dim, self.delta)

    def x_correction_code(self) -> DualTensorCode:
        """Local corrections for X decoding: C_1^⊥ = C_A ⊞ C_B."""
        return codes_mod.dual_tensor_code(self.local_a, self.local_b)

    def z_col_syndromes(self) -> list[int]:
        """Column q of H_Z as a packed int; syndrome(e) = XOR over supp(e)."""
        if self._z_col_syndromes is None:
            cols = [0] * self.n
            for i, row in enumerate(self.h_z.data):
                while row:
                    lsb = row & -row
                    cols[lsb.bit_length() - 1] |= 1 << i
                    row ^= lsb
            self._z_col_syndromes = cols
        return self._z_col_syndromes

    def z_side(self) -> "QuantumTannerCode":
        """The code used to decode Z errors: dual local codes, V0/V1 swapped.

        Exact exchange: z.h_x == self.h_z and z.h_z == self.h_x row for row.
        """
        return QuantumTannerCode(
            self.complex,
            self.local_a.dual(),
            self.local_b.dual(),
            flip_roles=not self.flip_roles,
        )

    def __repr__(self) -> str:
        return f"QuantumTannerCode(n={self.n}, delta={self.delta}, flip={self.flip_roles})"


def build_tanner_code(
    complex: LeftRightCayleyComplex,
    local_a: LinearCode,
    local_b: LinearCode,
    flip_roles: bool = False,
) -> QuantumTannerCode:
    return QuantumTannerCode(complex, local_a, local_b, flip_roles)


def code_dimension(code: QuantumTannerCode) -> tuple[int, float]:
    """(k, counting lower bound (1-2ρ)² n)."""
    bound = float((1 - 2 * code.rho) ** 2 * code.n)
    return code.k, bound


def syndrome(code: QuantumTannerCode, side: str, e: BitVector) -> BitVector:
    """Apply the requested check matrix: side 'Z' gives H_Z e (detects X
    errors), side 'X' gives H_X e."""
    if side not in ("X", "Z"):
        raise ValueError(f"side must be 'X' or 'Z', got {side!r}")
    h = code.h_z if side == "Z" else code.h_x
    return gf2.mat_vec_mul(h, e)


def syndrome_bits_z(code: QuantumTannerCode, e_bits: int) -> int:
    cols = code.z_col_syndromes()
    s = 0
    while e_bits:
        lsb = e_bits & -e_bits
        s ^= cols[lsb.bit_length() - 1]
        e_bits ^= lsb
    return s


def local_syndrome(code: QuantumTannerCode, sigma: BitVector | int, v1_pos: int) -> int:
    """Restriction of a Z-check syndrome to the block of the v1_pos-th
    V1 vertex (r1 bits)."""
    bits = sigma.bits if isinstance(sigma, BitVector) else sigma
    return (bits >> (v1_pos * code.r1)) & ((1 << code.r1) - 1)


def reduced_weight(code: QuantumTannerCode, e: BitVector, mode: str = "greedy") -> int:
    """min over stabilizers s of |e + s|, exactly or as a greedy upper bound.

    Exact mode walks the full rowspace of H_X (gated at rank 24); greedy
    repeatedly applies the single generator row with the largest weight
    drop and is an upper bound on the true reduced weight.
    """
    if e.n != code.n:
        raise DimensionMismatchError(code.n, e.n)
    if mode == "exact":
        r = code.rank_hx
        if r > MAX_EXACT_REDUCED_RANK:
            raise BudgetError(
                f"rank(H_X) = {r} > {MAX_EXACT_REDUCED_RANK}; exact reduced weight refused"
            )
        return min((e.bits ^ s).bit_count() for s in code.h_x.iter_rowspace())
    if mode != "greedy":
        raise ValueError(f"unknown mode {mode!r}")
    return _greedy_reduce(code, e.bits).bit_count()


def _greedy_reduce(code: QuantumTannerCode, bits: int) -> int:
    w = bits.bit_count()
    improved = True
    while improved and w:
        improved = False
        best_drop = 0
        best_row = None
        for row in code.h_x.data:
            drop = w - (bits ^ row).bit_count()
            if drop > best_drop:
                best_drop = drop
                best_row = row
        if best_row is not None:
            bits ^= best_row
            w -= best_drop
            improved = True
    return bits


def classify_residual(code: QuantumTannerCode, residual: BitVector) -> str:
    """corrected if residual is a stabilizer, detected if its syndrome is
    nonzero, logical otherwise."""
    if gf2.rowspace_contains(code.h_x, residual):
        return CORRECTED
    if syndrome_bits_z(code, residual.bits):
        return DETECTED
    return LOGICAL


def random_logical_search(
    code: QuantumTannerCode, rng, tries: int = 200
) -> tuple[int | float, Optional[BitVector]]:
    """Randomized upper bound on the X-distance: lowest-weight element of
    ker H_Z outside rowspace(H_X) found among random kernel combinations
    (greedily stabilizer-reduced).  Returns (weight, vector) or (inf, None).
    """
    kb = gf2.kernel_basis(code.h_z)
    if kb.rows == 0:
        return math.inf, None
    best_w: int | float = math.inf
    best = None
    for _ in range(tries):
        picks = rng.integers(0, 2, size=kb.rows)
        bits = 0
        for i in range(kb.rows):
            if picks[i]:
                bits ^= kb.data[i]
        if bits == 0:
            continue
        bits = _greedy_reduce(code, bits)
        v = BitVector(code.n, bits)
        if bits and not gf2.rowspace_contains(code.h_x, v):
            if bits.bit_count() < best_w:
                best_w = bits.bit_count()
                best = v
    return best_w, best


def check_weight_histogram(code: QuantumTannerCode) -> dict[str, dict[int, int]]:
    out: dict[str, dict[int, int]] = {"X": {}, "Z": {}}
    for name, mat in (("X", code.h_x), ("Z", code.h_z)):
        for row in mat.data:
            w = row.bit_count()
            out[name][w] = out[name].get(w, 0) + 1
    return out


@dataclass
class TheoryReport:
    """Instance constants evaluated from the closed-form expressions; purely
    informational and printed alongside empirical results."""

    n: int
    degree: int
    rho: float
    d_r: float
    kappa: float
    eps: float
    delta: float
    k: int
    k_lower_bound: float
    d_lower_bound: float
    a_eps: float
    b_eps: float
    c_delta: float
    c1: float
    c2: float
    seq_residual_coeff: float
    beta: float
    gamma: float
    alpha_k: float
    k_iters: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def local_relative_distance(code: QuantumTannerCode) -> float:
    """Achieved d_r: min relative distance of C_A, C_B and their duals."""
    dists = [
        codes_mod.min_distance_bruteforce(c)
        for c in (
            code.local_a,
            code.local_b,
            code.local_a.dual(),
            code.local_b.dual(),
        )
    ]
    return min(d / code.delta for d in dists)


def instance_kappa(code: QuantumTannerCode) -> Fraction:
    """min of the product-expansion constants of C_A ⊞ C_B and
    C_A^⊥ ⊞ C_B^⊥ (both sides are used, one per error type)."""
    k1 = codes_mod.product_expansion_kappa(code.local_a, code.local_b)
    k2 = codes_mod.product_expansion_kappa(code.local_a.dual(), code.local_b.dual())
    return min(k1, k2)


def theory_report(
    code: QuantumTannerCode,
    eps: float,
    delta: float,
    k_iters: int,
    kappa: Optional[float] = None,
) -> TheoryReport:
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0,1), got {eps}")
    if not 0 < delta < 1 / 18:
        raise ValueError(f"delta must be in (0, 1/18), got {delta}")
    if kappa is None:
        kappa = float(instance_kappa(code))
    d = code.delta
    d_r = local_relative_distance(code)
    rho = float(code.rho)
    gamma = (1 - 18 * delta) / 16
    c1 = (eps - 2 * delta) / (eps * (1 - delta))
    c2 = 2 / eps
    return TheoryReport(
        n=code.n,
        degree=d,
        rho=rho,
        d_r=d_r,
        kappa=kappa,
        eps=eps,
        delta=delta,
        k=code.k,
        k_lower_bound=(1 - 2 * rho) ** 2 * code.n,
        d_lower_bound=d_r**2 * kappa**2 * code.n / (256 * d),
        a_eps=24 / (kappa * d * (1 - eps)),
        b_eps=3 * d / (kappa * (1 - eps)),
        c_delta=d_r**2 * delta**3 * kappa / (2**12 * d**2),
        c1=c1,
        c2=c2,
        seq_residual_coeff=1 + 2 * c2 / (kappa * c1),
        beta=6 * d**2 / (kappa * delta),
        gamma=gamma,
        alpha_k=24 / (5 * kappa) * (1 - gamma) ** k_iters,
        k_iters=k_iters,
    )
