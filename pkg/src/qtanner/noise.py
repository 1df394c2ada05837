"""Noise models, single-shot trials, multi-round protocols and sweeps.

Every trial derives its own counter-based RNG stream from
(master seed, stream id), so results are reproducible bit for bit no
matter how trials are scheduled.  Wall-clock timing is only recorded
when explicitly requested, because timing breaks byte-identical output.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import decoder as dec
from . import tanner
from .gf2 import BitVector
from .tanner import QuantumTannerCode

RNG_ALGORITHM = "philox4x64"
_M64 = (1 << 64) - 1

TRIAL_CSV_FIELDS = [
    "instance_id",
    "decoder",
    "param",
    "p",
    "q",
    "e_weight",
    "d_weight",
    "d_vertex_support",
    "residual_weight",
    "residual_reduced_proxy",
    "failure_class",
    "seed",
    "ms",
]

POINT_CSV_FIELDS = [
    "instance_id",
    "decoder",
    "param",
    "p",
    "q",
    "trials",
    "failures",
    "failure_freq",
    "wilson_lo",
    "wilson_hi",
    "mean_residual",
    "mean_ms",
]

MULTIROUND_CSV_FIELDS = [
    "instance_id",
    "decoder",
    "param",
    "p",
    "q",
    "trial",
    "round",
    "e_weight",
    "d_weight",
    "d_vertex_support",
    "residual_weight",
    "failure_class",
    "seed",
]


def make_rng(master_seed: int, stream: int) -> np.random.Generator:
    """Counter-based stream RNG: Philox keyed by (master seed, stream id)."""
    key = ((master_seed & _M64) << 64) | (stream & _M64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class NoiseModel:
    """Data noise: bernoulli(p) or adversarial exact weight w (optionally
    persistent across rounds).  Syndrome noise: bernoulli(q), adversarial
    exact weight s, or vertex_bounded touching at most t V1 vertices."""

    data_kind: str = "bernoulli"
    p: float = 0.0
    w: int = 0
    persistence: float = 0.0
    syn_kind: str = "bernoulli"
    q: float = 0.0
    s: int = 0
    t: int = 0

    def to_json(self) -> dict:
        return {
            "data": {"kind": self.data_kind, "p": self.p, "w": self.w,
                     "persistence": self.persistence},
            "syndrome": {"kind": self.syn_kind, "q": self.q, "s": self.s, "t": self.t},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NoiseModel":
        d = obj.get("data", {})
        s = obj.get("syndrome", {})
        return cls(
            data_kind=d.get("kind", "bernoulli"),
            p=float(d.get("p", 0.0)),
            w=int(d.get("w", 0)),
            persistence=float(d.get("persistence", 0.0)),
            syn_kind=s.get("kind", "bernoulli"),
            q=float(s.get("q", 0.0)),
            s=int(s.get("s", 0)),
            t=int(s.get("t", 0)),
        )


@dataclass(frozen=True)
class DecoderConfig:
    kind: str  # "sequential" | "parallel"
    eps: Fraction = Fraction(1, 2)
    k: int = 1

    @property
    def param(self) -> str:
        return f"eps={self.eps}" if self.kind == "sequential" else f"k={self.k}"

    def decode(self, code: QuantumTannerCode, syn: BitVector) -> BitVector:
        if self.kind == "sequential":
            return dec.sequential_decode(code, syn, self.eps)
        if self.kind == "parallel":
            return dec.parallel_decode(code, syn, self.k)
        raise ValueError(f"unknown decoder kind {self.kind!r}")

    def to_json(self) -> dict:
        if self.kind == "sequential":
            return {"kind": "sequential", "eps": str(self.eps)}
        return {"kind": "parallel", "k": self.k}

    @classmethod
    def from_json(cls, obj: dict) -> "DecoderConfig":
        if obj["kind"] == "sequential":
            return cls("sequential", eps=Fraction(obj.get("eps", "1/2")))
        if obj["kind"] == "parallel":
            return cls("parallel", k=int(obj.get("k", 1)))
        raise ValueError(f"unknown decoder kind {obj['kind']!r}")


def _sample_bits_bernoulli(n: int, prob: float, rng) -> int:
    if prob <= 0.0 or n == 0:
        return 0
    hits = np.nonzero(rng.random(n) < prob)[0]
    bits = 0
    for i in hits:
        bits |= 1 << int(i)
    return bits


def _sample_bits_exact_weight(n: int, w: int, rng, keep_from: Optional[int] = None,
                              persistence: float = 0.0) -> int:
    if w > n:
        raise ValueError(f"adversarial weight {w} exceeds {n} positions")
    if w == 0:
        return 0
    kept: list[int] = []
    if keep_from and persistence > 0.0:
        prev = []
        b = keep_from
        while b:
            lsb = b & -b
            prev.append(lsb.bit_length() - 1)
            b ^= lsb
        n_keep = min(int(persistence * w), len(prev), w)
        if n_keep:
            kept = [int(x) for x in rng.choice(len(prev), size=n_keep, replace=False)]
            kept = [prev[i] for i in kept]
    remaining = [i for i in range(n) if i not in set(kept)]
    fresh = rng.choice(len(remaining), size=w - len(kept), replace=False)
    bits = 0
    for i in kept:
        bits |= 1 << i
    for i in fresh:
        bits |= 1 << remaining[int(i)]
    return bits


def sample_errors(
    code: QuantumTannerCode, model: NoiseModel, rng, prev_data: int = 0
) -> tuple[BitVector, BitVector]:
    """Draw (data error e, syndrome error D) from the model; exact-weight
    contracts hold by construction."""
    if model.data_kind == "bernoulli":
        e = _sample_bits_bernoulli(code.n, model.p, rng)
    elif model.data_kind == "adversarial":
        e = _sample_bits_exact_weight(
            code.n, model.w, rng, keep_from=prev_data, persistence=model.persistence
        )
    else:
        raise ValueError(f"unknown data noise {model.data_kind!r}")

    rz = code.h_z.rows
    if model.syn_kind == "bernoulli":
        d = _sample_bits_bernoulli(rz, model.q, rng)
    elif model.syn_kind == "adversarial":
        d = _sample_bits_exact_weight(rz, model.s, rng)
    elif model.syn_kind == "vertex_bounded":
        d = 0
        if rz and code.r1 and model.t:
            n_v = len(code.v1_vertices)
            hit = rng.choice(n_v, size=min(model.t, n_v), replace=False)
            for pos in sorted(int(x) for x in hit):
                pattern = int(rng.integers(1, 1 << code.r1))
                d |= pattern << (pos * code.r1)
    else:
        raise ValueError(f"unknown syndrome noise {model.syn_kind!r}")
    return BitVector(code.n, e), BitVector(rz, d)


def vertex_support_size(code: QuantumTannerCode, d: BitVector) -> int:
    """Number of V1 vertices whose check block of D is nonzero."""
    if code.r1 == 0:
        return 0
    block = (1 << code.r1) - 1
    bits = d.bits
    count = 0
    for pos in range(len(code.v1_vertices)):
        if (bits >> (pos * code.r1)) & block:
            count += 1
    return count


@dataclass
class TrialRecord:
    instance_id: str
    decoder: str
    param: str
    p: float
    q: float
    e_weight: int
    d_weight: int
    d_vertex_support: int
    f_weight: int
    residual_weight: int
    residual_reduced_proxy: int
    failure_class: str
    seed: int
    ms: float

    def csv_row(self) -> dict:
        return {k: getattr(self, k) for k in TRIAL_CSV_FIELDS}


def run_single_shot_trial(
    code: QuantumTannerCode,
    model: NoiseModel,
    cfg: DecoderConfig,
    rng,
    instance_id: str = "",
    seed: int = 0,
    record_timing: bool = False,
    presampled: Optional[tuple[BitVector, BitVector]] = None,
) -> TrialRecord:
    """One sample-decode-classify cycle under a single noisy measurement."""
    e, d = presampled if presampled is not None else sample_errors(code, model, rng)
    syn = BitVector(code.h_z.rows, tanner.syndrome_bits_z(code, e.bits) ^ d.bits)
    t0 = time.perf_counter() if record_timing else 0.0
    f = cfg.decode(code, syn)
    ms = (time.perf_counter() - t0) * 1000.0 if record_timing else 0.0
    residual = BitVector(code.n, e.bits ^ f.bits)
    return TrialRecord(
        instance_id=instance_id,
        decoder=cfg.kind,
        param=cfg.param,
        p=model.p if model.data_kind == "bernoulli" else float(model.w),
        q=model.q if model.syn_kind == "bernoulli" else float(model.s or model.t),
        e_weight=e.weight(),
        d_weight=d.weight(),
        d_vertex_support=vertex_support_size(code, d),
        f_weight=f.weight(),
        residual_weight=residual.weight(),
        residual_reduced_proxy=tanner.reduced_weight(code, residual, "greedy"),
        failure_class=tanner.classify_residual(code, residual),
        seed=seed,
        ms=ms,
    )


@dataclass
class RoundRecord:
    round: int
    e_weight: int
    d_weight: int
    d_vertex_support: int
    residual_weight: int


@dataclass
class MultiRoundRecord:
    """Residuals carried across rounds; the final row is an ideal decode."""

    instance_id: str
    decoder: str
    param: str
    p: float
    q: float
    seed: int
    rounds: list[RoundRecord] = field(default_factory=list)
    final_class: str = ""
    final_residual_weight: int = 0
    final_reduced_proxy: int = 0
    e_xor_all: int = 0
    f_xor_all: int = 0
    residual_bits: int = 0


def run_multiround(
    code: QuantumTannerCode,
    model: NoiseModel,
    cfg: DecoderConfig,
    rounds: int,
    rng,
    instance_id: str = "",
    seed: int = 0,
    final_eps: Fraction = Fraction(1, 2),
) -> MultiRoundRecord:
    """rounds cycles of (new error, noisy syndrome, decode), residual fed
    forward, then one noiseless sequential decode as the final readout."""
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    rec = MultiRoundRecord(
        instance_id=instance_id,
        decoder=cfg.kind,
        param=cfg.param,
        p=model.p if model.data_kind == "bernoulli" else float(model.w),
        q=model.q if model.syn_kind == "bernoulli" else float(model.s or model.t),
        seed=seed,
    )
    residual = 0
    prev_data = 0
    rz = code.h_z.rows
    for i in range(1, rounds + 1):
        e, d = sample_errors(code, model, rng, prev_data=prev_data)
        prev_data = e.bits
        syn = BitVector(rz, tanner.syndrome_bits_z(code, residual ^ e.bits) ^ d.bits)
        f = cfg.decode(code, syn)
        residual ^= e.bits ^ f.bits
        rec.e_xor_all ^= e.bits
        rec.f_xor_all ^= f.bits
        rec.rounds.append(
            RoundRecord(
                round=i,
                e_weight=e.weight(),
                d_weight=d.weight(),
                d_vertex_support=vertex_support_size(code, d),
                residual_weight=residual.bit_count(),
            )
        )
    ideal = BitVector(rz, tanner.syndrome_bits_z(code, residual))
    f_final = dec.sequential_decode(code, ideal, final_eps)
    final_residual = BitVector(code.n, residual ^ f_final.bits)
    rec.f_xor_all ^= f_final.bits
    rec.residual_bits = final_residual.bits
    rec.final_class = tanner.classify_residual(code, final_residual)
    rec.final_residual_weight = final_residual.weight()
    rec.final_reduced_proxy = tanner.reduced_weight(code, final_residual, "greedy")
    return rec


def sweep_stream_id(point_idx: int, trial_idx: int) -> int:
    return (point_idx << 20) | trial_idx


def run_sweep(
    code: QuantumTannerCode,
    models: Sequence[NoiseModel],
    cfgs: Sequence[DecoderConfig],
    trials: int,
    master_seed: int,
    instance_id: str = "",
    record_timing: bool = False,
) -> list[TrialRecord]:
    """All (grid point, trial, decoder) records, single process.

    Errors are sampled once per (point, trial) and decoded by every
    config, so decoder comparisons are paired on the seed column.
    """
    records: list[TrialRecord] = []
    for pi, model in enumerate(models):
        for ti in range(trials):
            stream = sweep_stream_id(pi, ti)
            rng = make_rng(master_seed, stream)
            e, d = sample_errors(code, model, rng)
            for cfg in cfgs:
                records.append(
                    run_single_shot_trial(
                        code,
                        model,
                        cfg,
                        rng,
                        instance_id=instance_id,
                        seed=stream,
                        record_timing=record_timing,
                        presampled=(e, d),
                    )
                )
    return records


def wilson_interval(failures: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    phat = failures / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * ((phat * (1 - phat) + z * z / (4 * trials)) / trials) ** 0.5 / denom
    return max(0.0, center - half), min(1.0, center + half)


def aggregate_records(records: Iterable[TrialRecord]) -> list[dict]:
    """Per (instance, point, decoder) summary with Wilson 95% interval on
    the logical-failure frequency."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.instance_id, r.p, r.q, r.decoder, r.param), []).append(r)
    rows = []
    for (iid, p, q, dec_name, param), rs in sorted(groups.items(), key=lambda kv: str(kv[0])):
        n = len(rs)
        fails = sum(1 for r in rs if r.failure_class == tanner.LOGICAL)
        lo, hi = wilson_interval(fails, n)
        rows.append(
            {
                "instance_id": iid,
                "decoder": dec_name,
                "param": param,
                "p": p,
                "q": q,
                "trials": n,
                "failures": fails,
                "failure_freq": fails / n,
                "wilson_lo": lo,
                "wilson_hi": hi,
                "mean_residual": sum(r.residual_weight for r in rs) / n,
                "mean_ms": sum(r.ms for r in rs) / n,
            }
        )
    return rows


def ols_slope_ci(xs: Sequence[float], ys: Sequence[float], z: float = 1.959964
                 ) -> tuple[float, float, float]:
    """(slope, lo, hi) of an ordinary least-squares fit y ~ x."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    n = len(x)
    if n < 3 or np.ptp(x) == 0:
        return 0.0, 0.0, 0.0
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = ym - slope * xm
    rss = float(((y - intercept - slope * x) ** 2).sum())
    se = (rss / (n - 2) / sxx) ** 0.5
    return slope, slope - z * se, slope + z * se


def estimate_threshold(
    code: QuantumTannerCode,
    cfg: DecoderConfig,
    trials: int = 100,
    master_seed: int = 0,
    lo: float = 0.0,
    hi: float = 0.5,
    iters: int = 8,
    instance_id: str = "",
) -> float:
    """Bisect the bernoulli p = q level where the not-corrected frequency
    crosses 1/2; a coarse, reproducible operating-point estimate."""
    for it in range(iters):
        mid = (lo + hi) / 2
        model = NoiseModel(data_kind="bernoulli", p=mid, syn_kind="bernoulli", q=mid)
        fails = 0
        for ti in range(trials):
            rng = make_rng(master_seed, (it << 24) | ti)
            rec = run_single_shot_trial(code, model, cfg, rng, instance_id=instance_id)
            if rec.failure_class != tanner.CORRECTED:
                fails += 1
        if fails / trials < 0.5:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def write_csv(path, fieldnames: Sequence[str], rows: Iterable[dict],
              header_comments: Sequence[str] = ()) -> None:
    """CSV with '\\n' line endings and optional '#' comment header lines,
    byte-stable for fixed inputs."""
    with open(path, "w", newline="") as fh:
        for line in header_comments:
            fh.write(f"# {line}\n")
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in fieldnames})
