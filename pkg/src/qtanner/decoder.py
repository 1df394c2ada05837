"""Single-shot decoding of quantum Tanner codes by mismatch decomposition.

Both decoders share the same pipeline: per-vertex minimum-weight local
corrections from a coset-leader table, a global mismatch vector that
XORs the two candidate corrections of every face, and a greedy
decomposition of that mismatch into local dual-tensor codewords.  The
sequential variant removes any codeword clearing a (1-ε) fraction of its
weight; the parallel variant sweeps the four vertex classes with the
fixed 1/2 threshold, choosing a maximal-weight codeword per vertex.

Candidate search is exhaustive over the cached nonzero codewords of
C_A ⊞ C_B, sorted by weight descending (lexicographic within a weight
class), vectorized with numpy popcounts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import codes as codes_mod
from . import gf2
from .cayley import V00, V01, V10, V11
from .codes import DualTensorCode
from .errors import BudgetError, DimensionMismatchError
from .gf2 import BitVector
from .tanner import QuantumTannerCode

MAX_CACHE_DIM = 16
MAX_PAIR_ENUMERATION = 1 << 22

_HAS_BITWISE_COUNT = hasattr(np, "bitwise_count")


def _popcount_array(arr: np.ndarray) -> np.ndarray:
    if _HAS_BITWISE_COUNT:
        return np.bitwise_count(arr)
    b = arr.view(np.uint8).reshape(arr.shape + (8,))
    return np.unpackbits(b, axis=-1).sum(axis=-1)


def as_fraction(x) -> Fraction:
    """Exact parameter parsing; floats are read as their decimal literal."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


class LocalCodewordCache:
    """Per-code enumeration of the local correction code C_1^⊥ = C_A ⊞ C_B.

    Holds every nonzero codeword as a Δ² bit mask with its minimal
    (c, r) split, the coset-leader table for the local checks, and the
    per-vertex view/incidence tables the decomposition loops consume.
    """

    def __init__(self, code: QuantumTannerCode):
        dt = code.x_correction_code()
        if dt.dim > MAX_CACHE_DIM:
            raise BudgetError(
                f"local codeword cache needs 2^{dt.dim} codewords (budget 2^{MAX_CACHE_DIM})"
            )
        if dt.n > 64:
            raise BudgetError(f"local views of {dt.n} > 64 bits exceed the mask width")
        self.dt = dt
        self.code = code
        self.coset_table = codes_mod.coset_leader_table(dt)
        self._build_codewords(dt)
        self._build_views(code)

    def _build_codewords(self, dt: DualTensorCode) -> None:
        na, nb = dt.na, dt.nb
        ka, kb = dt.code_a.dim, dt.code_b.dim
        if (1 << (ka * nb)) * (1 << (kb * na)) > MAX_PAIR_ENUMERATION:
            raise BudgetError(
                f"(c, r) pair enumeration 2^{ka * nb + kb * na} exceeds budget"
            )
        col_masks = [sum(1 << (a * nb + b) for a in range(na)) for b in range(nb)]
        row_width = (1 << nb) - 1

        # span of C_A ⊗ F_2^B: each generator of C_A placed in one column
        c_basis = []
        for gen in dt.code_a.gen.data:
            for b in range(nb):
                mask = 0
                g = gen
                while g:
                    lsb = g & -g
                    mask |= 1 << ((lsb.bit_length() - 1) * nb + b)
                    g ^= lsb
                c_basis.append(mask)
        # span of F_2^A ⊗ C_B: each generator of C_B placed in one row
        r_basis = []
        for gen in dt.code_b.gen.data:
            for a in range(na):
                r_basis.append(gen << (a * nb))

        def _enumerate(basis, count_fn):
            out = [(0, 0)]
            x = 0
            for i in range(1, 1 << len(basis)):
                x ^= basis[(i & -i).bit_length() - 1]
                out.append((x, count_fn(x)))
            return out

        def _count_cols(c: int) -> int:
            return sum(1 for m in col_masks if c & m)

        def _count_rows(r: int) -> int:
            return sum(1 for a in range(na) if (r >> (a * nb)) & row_width)

        cs = _enumerate(c_basis, _count_cols)
        rs = _enumerate(r_basis, _count_rows)

        # minimal decomposition per codeword: min cost, then lex-smallest c
        best: dict[int, tuple[int, int, int]] = {}
        n = dt.n
        for c, nc in cs:
            for r, nr in rs:
                x = c ^ r
                cost = nc + nr
                cur = best.get(x)
                if cur is None or cost < cur[0]:
                    best[x] = (cost, c, r)
                elif cost == cur[0] and c != cur[1]:
                    if gf2.lex_key(c, n) < gf2.lex_key(cur[1], n):
                        best[x] = (cost, c, r)
        best.pop(0, None)
        assert len(best) == (1 << dt.dim) - 1

        order = sorted(best, key=lambda m: (-m.bit_count(), gf2.lex_key(m, n)))
        self.masks = np.array(order, dtype=np.uint64)
        self.weights = np.array([m.bit_count() for m in order], dtype=np.int64)
        self.neg_weights = -self.weights
        self.par_thresholds = (self.weights + 1) // 2
        self.c_parts = [best[m][1] for m in order]
        self.r_parts = [best[m][2] for m in order]
        self.max_weight = int(self.weights[0]) if len(order) else 0

    def _build_views(self, code: QuantumTannerCode) -> None:
        cx = code.complex
        self.views = [code.local_view(v) for v in range(cx.num_vertices)]
        self.view_masks = [
            sum(1 << q for q in view) for view in self.views
        ]
        self.face_vertices = [cx.face_vertices(q) for q in range(cx.num_faces)]
        # per-class disjointness of views makes parallel sweeps well defined
        for cls in (V00, V01, V10, V11):
            acc = 0
            for g in range(cx.group.order):
                m = self.view_masks[cx.vertex(g, cls)]
                assert acc & m == 0
                acc |= m

    def seq_thresholds(self, eps: Fraction) -> np.ndarray:
        """ceil((1-eps)·w) per cached codeword, exact integer arithmetic."""
        one_minus = 1 - eps
        table = [
            -((-(one_minus * w).numerator) // (one_minus * w).denominator)
            for w in range(self.max_weight + 1)
        ]
        return np.array(table, dtype=np.int64)[self.weights]


def get_cache(code: QuantumTannerCode) -> LocalCodewordCache:
    if code._decoder_cache is None:
        code._decoder_cache = LocalCodewordCache(code)
    return code._decoder_cache


@dataclass
class Step:
    step: int
    vertex: int
    vertex_class: int
    codeword: int
    x_weight: int
    weight_before: int
    weight_after: int

    def as_dict(self) -> dict:
        return {
            "step": self.step,
            "vertex": self.vertex,
            "class": self.vertex_class,
            "|x|": self.x_weight,
            "before": self.weight_before,
            "after": self.weight_after,
        }


@dataclass
class MismatchState:
    """Evolving mismatch Ẑ plus flip accumulators and the vertex worklist."""

    code: QuantumTannerCode
    zhat: int
    initial_zhat: int
    eps01_sum: int
    acc_c0: int = 0
    acc_c1: int = 0
    acc_r0: int = 0
    acc_r1: int = 0
    worklist: deque = field(default_factory=deque)
    in_queue: bytearray = field(default_factory=bytearray)
    steps: list[Step] = field(default_factory=list)

    def accumulators(self) -> tuple[BitVector, BitVector, BitVector, BitVector]:
        n = self.code.n
        return (
            BitVector(n, self.acc_c0),
            BitVector(n, self.acc_c1),
            BitVector(n, self.acc_r0),
            BitVector(n, self.acc_r1),
        )


def local_min_correction(code: QuantumTannerCode, v: int, local_syndrome: int) -> int:
    """Coset-leader correction for one V1 vertex, lifted to global faces."""
    cache = get_cache(code)
    leader = cache.coset_table.get(local_syndrome, 0)
    return _lift(leader, cache.views[v])


def _lift(local_bits: int, view: list[int]) -> int:
    out = 0
    while local_bits:
        lsb = local_bits & -local_bits
        out |= 1 << view[lsb.bit_length() - 1]
        local_bits ^= lsb
    return out


def _extract(global_bits: int, view: list[int]) -> int:
    out = 0
    for p, q in enumerate(view):
        out |= ((global_bits >> q) & 1) << p
    return out


def initial_mismatch(code: QuantumTannerCode, noisy_syndrome: BitVector) -> MismatchState:
    """Per-vertex minimum corrections and their XOR (the noisy mismatch)."""
    if noisy_syndrome.n != code.h_z.rows:
        raise DimensionMismatchError(code.h_z.rows, noisy_syndrome.n, "syndrome length")
    cache = get_cache(code)
    zhat = 0
    eps01 = 0
    order = code.complex.group.order
    sig = noisy_syndrome.bits
    r1 = code.r1
    block = (1 << r1) - 1
    for pos, v in enumerate(code.v1_vertices):
        s = (sig >> (pos * r1)) & block
        if s == 0:
            continue
        lifted = _lift(cache.coset_table.get(s, 0), cache.views[v])
        zhat ^= lifted
        if pos < order:  # first block is the effective V01 class
            eps01 ^= lifted
    state = MismatchState(
        code=code,
        zhat=zhat,
        initial_zhat=zhat,
        eps01_sum=eps01,
        in_queue=bytearray(code.complex.num_vertices),
    )
    for v in range(code.complex.num_vertices):
        if cache.view_masks[v] & zhat:
            state.worklist.append(v)
            state.in_queue[v] = 1
    return state


def _scan(
    cache: LocalCodewordCache, zloc: int, thresholds: np.ndarray
) -> Optional[int]:
    """Index of the first cached codeword meeting the reduction threshold.

    The list is sorted by weight descending, so the first hit is a
    maximal-weight satisfying codeword (lexicographic tie-break); only
    weights ≤ 2|zloc| can qualify, which bounds the scanned slice.
    """
    if zloc == 0:
        return None
    start = int(np.searchsorted(cache.neg_weights, -2 * zloc.bit_count()))
    if start >= len(cache.weights):
        return None
    masks = cache.masks[start:]
    hits = _popcount_array(masks & np.uint64(zloc)).astype(np.int64)
    cond = 2 * hits - cache.weights[start:] >= thresholds[start:]
    if not cond.any():
        return None
    return start + int(np.argmax(cond))


def find_reducing_codeword(
    code: QuantumTannerCode, zhat_bits: int, v: int, theta: Fraction | float
) -> Optional[tuple[int, int, int]]:
    """(x, c, r) on Q(v), as local Δ² masks, with |Ẑ|-|Ẑ+x| ≥ ceil(θ|x|),
    or None.  Scans weight-descending, so the hit has maximal |x|."""
    cache = get_cache(code)
    theta = as_fraction(theta)
    if not 0 < theta <= 1:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    thr_table = [
        -((-(theta * w).numerator) // (theta * w).denominator)
        for w in range(cache.max_weight + 1)
    ]
    thresholds = np.array(thr_table, dtype=np.int64)[cache.weights]
    zloc = _extract(zhat_bits, cache.views[v])
    idx = _scan(cache, zloc, thresholds)
    if idx is None:
        return None
    return int(cache.masks[idx]), cache.c_parts[idx], cache.r_parts[idx]


def _apply(state: MismatchState, cache: LocalCodewordCache, v: int, idx: int) -> int:
    """XOR codeword idx into the state at vertex v; returns changed faces."""
    code = state.code
    view = cache.views[v]
    c_g = _lift(cache.c_parts[idx], view)
    r_g = _lift(cache.r_parts[idx], view)
    changed = c_g ^ r_g
    eff = code.effective_class(v)
    i, j = eff >> 1, eff & 1
    if j == 0:
        state.acc_c0 ^= c_g
    else:
        state.acc_c1 ^= c_g
    if i == 0:
        state.acc_r0 ^= r_g
    else:
        state.acc_r1 ^= r_g
    before = state.zhat.bit_count()
    state.zhat ^= changed
    state.steps.append(
        Step(
            step=len(state.steps),
            vertex=v,
            vertex_class=eff,
            codeword=idx,
            x_weight=int(cache.weights[idx]),
            weight_before=before,
            weight_after=state.zhat.bit_count(),
        )
    )
    return changed


def sequential_mismatch_decomposition(
    state: MismatchState, eps: Fraction | float = Fraction(1, 2)
) -> tuple[BitVector, BitVector, BitVector, BitVector]:
    """Greedy decomposition: FIFO over vertices whose views intersect Ẑ,
    removing any local codeword that clears ≥ ceil((1-ε)|x|) weight."""
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    code = state.code
    cache = get_cache(code)
    thresholds = cache.seq_thresholds(eps)
    work = state.worklist
    while state.zhat and work:
        v = work.popleft()
        state.in_queue[v] = 0
        mask = cache.view_masks[v]
        if mask & state.zhat == 0:
            continue
        zloc = _extract(state.zhat, cache.views[v])
        idx = _scan(cache, zloc, thresholds)
        if idx is None:
            continue
        changed = _apply(state, cache, v, idx)
        requeue = set()
        while changed:
            lsb = changed & -changed
            requeue.update(cache.face_vertices[lsb.bit_length() - 1])
            changed ^= lsb
        for u in sorted(requeue):
            if not state.in_queue[u]:
                work.append(u)
                state.in_queue[u] = 1
    return state.accumulators()


def parallel_mismatch_decomposition(
    state: MismatchState, k: int
) -> tuple[BitVector, BitVector, BitVector, BitVector]:
    """k sweeps over the four vertex classes with the fixed 1/2 threshold.

    Views of same-class vertices are disjoint, so in-class updates
    commute and the sweep equals evaluation against the class-entry
    snapshot; vertices are visited in group-element order for
    scheduling-independent output.
    """
    if k < 1:
        raise ValueError(f"iteration count must be >= 1, got {k}")
    code = state.code
    cache = get_cache(code)
    cx = code.complex
    order = cx.group.order
    flip = 1 if code.flip_roles else 0
    for _ in range(k):
        if state.zhat == 0:
            break
        changed_any = False
        for eff_cls in (V00, V01, V10, V11):
            raw = eff_cls ^ flip
            base = raw * order
            for v in range(base, base + order):
                if cache.view_masks[v] & state.zhat == 0:
                    continue
                zloc = _extract(state.zhat, cache.views[v])
                idx = _scan(cache, zloc, cache.par_thresholds)
                if idx is not None:
                    _apply(state, cache, v, idx)
                    changed_any = True
        if not changed_any:
            break
    return state.accumulators()


def _finish(state: MismatchState) -> BitVector:
    code = state.code
    return BitVector(code.n, state.eps01_sum ^ state.acc_c1 ^ state.acc_r0)


def sequential_decode(
    code: QuantumTannerCode,
    noisy_syndrome: BitVector,
    eps: Fraction | float = Fraction(1, 2),
    return_state: bool = False,
):
    """Full sequential decoder: local corrections, mismatch decomposition,
    then f̂ = Σ_{V01} ε̃_v + Ĉ₁ + R̂₀."""
    state = initial_mismatch(code, noisy_syndrome)
    sequential_mismatch_decomposition(state, eps)
    f = _finish(state)
    return (f, state) if return_state else f


def parallel_decode(
    code: QuantumTannerCode,
    noisy_syndrome: BitVector,
    k: int,
    return_state: bool = False,
):
    """Full parallel decoder with k decomposition sweeps (θ = 1/2)."""
    state = initial_mismatch(code, noisy_syndrome)
    parallel_mismatch_decomposition(state, k)
    f = _finish(state)
    return (f, state) if return_state else f
