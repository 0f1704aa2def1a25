"""Exhaustive and seeded random sweeps over k-subspaces containing 1.

Every orbit of a full-length code contains exactly ``(q^k-1)/(q-1)`` subspaces
through 1, so counting those is counting each orbit that many times. The hot
loop works on whole batches of element-log arrays: one bincount of pairwise
log differences per batch gives every shift intersection of every subspace.
Only the survivors of the (t = 1, distance) filter are turned into Subspace
objects and handed to :func:`analyze_2dim`.
"""

from __future__ import annotations

import json
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import InfeasibleSearchError, PreconditionError, SameOrbitError
from .gf_tower import FieldCtx, FieldSpec, build_field, ctx_from_spec
from .orbit import Q_value, proj_size
from .structure import analyze_2dim
from .subspace import Subspace, batch_containing_one, count_containing_one, random_containing_one

log = logging.getLogger(__name__)

_CELL_BUDGET = 1 << 22  # cap on B * max(L^2, d) per vectorized batch


@dataclass(frozen=True, order=True)
class SearchRecord:
    q: int
    n: int
    k: int
    lambda2: int
    case: str
    r: int
    N: int

    @property
    def N_orbits(self) -> int | None:
        size = proj_size(self.q, self.k)
        return self.N // size if self.N % size == 0 else None

    def row(self) -> dict:
        d = asdict(self)
        d["N_orbits"] = self.N_orbits
        return d


@dataclass(frozen=True)
class MergedRecord:
    q: int
    n: int
    k: int
    lambda2: int
    r: int
    N: int


@dataclass(frozen=True)
class SweepConfig:
    mode: str = "exhaustive"
    sample_count: int = 1000
    seed: int = 0
    distance_filter: int | None = None  # target ds; default 2k - 4
    workers: int = 1
    checkpoint_interval: int = 50_000
    checkpoint_path: str | None = None
    max_candidates: int = 2_000_000

    def __post_init__(self):
        if self.mode not in ("exhaustive", "random"):
            raise ValueError(f"unknown sweep mode {self.mode!r}")
        if self.workers < 1 or self.checkpoint_interval < 1 or self.sample_count < 0:
            raise ValueError("workers, checkpoint_interval must be positive and sample_count non-negative")


@dataclass
class SweepResult:
    """Aggregates of one sweep; ``records`` is the (lambda2, case, r) -> N view."""

    q: int
    n: int
    k: int
    mode: str
    candidates: int = 0
    full_length: int = 0
    filtered: int = 0
    sidon: int = 0
    sidon_exceptions: int = 0
    counts: Counter = field(default_factory=Counter)

    def merge(self, part: dict) -> None:
        for key in ("candidates", "full_length", "filtered", "sidon", "sidon_exceptions"):
            setattr(self, key, getattr(self, key) + part[key])
        for (lam2, case, r), N in part["counts"]:
            self.counts[(lam2, case, r)] += N

    @property
    def records(self) -> list[SearchRecord]:
        return sorted(
            SearchRecord(self.q, self.n, self.k, lam2, case, r, N)
            for (lam2, case, r), N in self.counts.items()
        )

    def state(self) -> dict:
        return {
            "candidates": self.candidates, "full_length": self.full_length, "filtered": self.filtered,
            "sidon": self.sidon, "sidon_exceptions": self.sidon_exceptions,
            "counts": sorted([list(key), N] for key, N in self.counts.items()),
        }


def merge_cases(records: list[SearchRecord]) -> list[MergedRecord]:
    """Compact view: one row per (lambda2, r), case dropped."""
    acc: Counter = Counter()
    for rec in records:
        acc[(rec.q, rec.n, rec.k, rec.lambda2, rec.r)] += rec.N
    return [MergedRecord(*key, N) for key, N in sorted(acc.items())]


# -- batch kernel -------------------------------------------------------------


def _batch_counts(ctx: FieldCtx, elems: np.ndarray) -> np.ndarray:
    """``out[b, a] = |U_b cap gamma^a U_b| - 1`` for a batch of element-log arrays."""
    B, L = elems.shape
    d = ctx.d
    diffs = (elems[:, :, None] - elems[:, None, :]) % d
    flat = diffs.reshape(B, L * L) + (np.arange(B, dtype=np.int64) * d)[:, None]
    return np.bincount(flat.ravel(), minlength=B * d).reshape(B, d) // (ctx.q - 1)


def _batch_dims(ctx: FieldCtx, k: int, counts: np.ndarray) -> np.ndarray:
    sizes = np.array([ctx.q**i - 1 for i in range(k + 1)], dtype=np.int64)
    dims = np.searchsorted(sizes, counts)
    if np.any(sizes[np.minimum(dims, k)] != counts):
        raise ArithmeticError("intersection size is not a power of q")
    return dims


def _scan_batch(ctx: FieldCtx, k: int, row_logs: np.ndarray, elems: np.ndarray, part: dict, ell_target: int) -> None:
    q, d = ctx.q, ctx.d
    dims = _batch_dims(ctx, k, _batch_counts(ctx, elems))
    full = dims == k
    t1 = full.sum(axis=1) == 1  # only the class of 1 fixes U
    ell = np.where(full, 0, dims).max(axis=1)
    part["candidates"] += len(elems)
    part["full_length"] += int(t1.sum())

    sid = t1 & (ell == 1)
    if sid.any():
        lam0 = (dims[sid] == 0).sum(axis=1)
        lam1 = (dims[sid] == 1).sum(axis=1)
        Q = Q_value(q, k)
        part["sidon"] += int(sid.sum())
        part["sidon_exceptions"] += int(np.count_nonzero((lam1 != Q) | (lam0 != d - Q - 1)))

    for b in np.flatnonzero(t1 & (ell == ell_target)):
        U = Subspace(ctx, np.sort(elems[b]), [0] + row_logs[b].tolist(), k=k)
        res = analyze_2dim(U)
        if not res.checks.passed:
            raise ArithmeticError(f"structure checks failed for {U!r}: {res.checks.failures}")
        lam2 = int((dims[b] == 2).sum())
        if lam2 != res.lambda2:
            raise ArithmeticError(f"batch lambda2={lam2} but analysis gives {res.lambda2} for {U!r}")
        part["filtered"] += 1
        part["counts"][(res.lambda2, res.case, res.r)] += 1


def _batch_size(ctx: FieldCtx, k: int) -> int:
    L = ctx.q**k - 1
    return max(1, _CELL_BUDGET // max(L * L, ctx.d))


def _empty_part() -> dict:
    return {"candidates": 0, "full_length": 0, "filtered": 0, "sidon": 0, "sidon_exceptions": 0, "counts": Counter()}


def _finish(part: dict) -> dict:
    part["counts"] = sorted(part["counts"].items())
    return part


def _scan_exhaustive(spec: dict, k: int, start: int, stop: int, ell_target: int) -> dict:
    ctx = ctx_from_spec(FieldSpec.from_dict(spec))
    part = _empty_part()
    B = _batch_size(ctx, k)
    for lo in range(start, stop, B):
        for row_logs, elems in batch_containing_one(ctx, k, lo, min(lo + B, stop)):
            _scan_batch(ctx, k, row_logs, elems, part, ell_target)
    return _finish(part)


def _scan_random(spec: dict, k: int, start: int, stop: int, ell_target: int, seed: int) -> dict:
    ctx = ctx_from_spec(FieldSpec.from_dict(spec))
    part = _empty_part()
    B = _batch_size(ctx, k)
    for lo in range(start, stop, B):
        subs = [random_containing_one(ctx, k, [seed, i]) for i in range(lo, min(lo + B, stop))]
        rows = np.array([U.basis[1:] for U in subs], dtype=np.int64).reshape(len(subs), k - 1)
        _scan_batch(ctx, k, rows, np.stack([U.logs for U in subs]), part, ell_target)
    return _finish(part)


# -- drivers -------------------------------------------------------------------


def _check_params(ctx: FieldCtx, k: int, config: SweepConfig) -> int:
    if not 3 <= k <= ctx.n / 2:
        raise PreconditionError(f"sweeps need 3 <= k <= n/2, got k={k}, n={ctx.n}")
    ds = 2 * k - 4 if config.distance_filter is None else config.distance_filter
    if ds != 2 * k - 4:
        raise PreconditionError("the (lambda2, r) analysis is defined for distance 2k-4 only")
    return k - ds // 2


def _load_checkpoint(path: Path, header: dict, result: SweepResult) -> int:
    if not path.exists():
        return 0
    data = json.loads(path.read_text())
    if data["header"] != header:
        raise ValueError(f"checkpoint {path} belongs to a different sweep")
    st = data["state"]
    result.merge({**st, "counts": [(tuple(key), N) for key, N in st["counts"]]})
    return int(data["next_index"])


def _save_checkpoint(path: Path, header: dict, result: SweepResult, next_index: int) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps({"header": header, "next_index": next_index, "state": result.state()}))
    os.replace(tmp, path)


def run_sweep(q: int, n: int, k: int, config: SweepConfig = SweepConfig(), modulus=None, ctx: FieldCtx | None = None) -> SweepResult:
    """Exhaustive or random sweep with deterministic, worker-independent aggregation."""
    if ctx is None:
        from .gf_tower import prime_power

        p, e = prime_power(q)
        ctx = build_field(p, e, n, modulus)
    if ctx.q != q or ctx.n != n:
        raise ValueError("ctx does not match (q, n)")
    ell_target = _check_params(ctx, k, config)
    total = count_containing_one(ctx, k) if config.mode == "exhaustive" else config.sample_count
    if total > config.max_candidates:
        raise InfeasibleSearchError(f"{total} candidates exceed the ceiling {config.max_candidates}")

    spec = ctx.spec.to_dict()
    header = {"q": q, "n": n, "k": k, "mode": config.mode, "spec": spec,
              "seed": config.seed if config.mode == "random" else None, "total": total}
    result = SweepResult(q, n, k, config.mode)
    ckpt = Path(config.checkpoint_path) if config.checkpoint_path else None
    start = _load_checkpoint(ckpt, header, result) if ckpt else 0

    step = config.checkpoint_interval
    ranges = [(lo, min(lo + step, total)) for lo in range(start, total, step)]
    if config.mode == "exhaustive":
        jobs = [(_scan_exhaustive, (spec, k, lo, hi, ell_target)) for lo, hi in ranges]
    else:
        jobs = [(_scan_random, (spec, k, lo, hi, ell_target, config.seed)) for lo, hi in ranges]

    def consume(parts):
        for (lo, hi), part in zip(ranges, parts):
            result.merge(part)
            log.info("sweep %s: %d/%d", header["mode"], hi, total)
            if ckpt:
                _save_checkpoint(ckpt, header, result, hi)

    if config.workers == 1 or len(jobs) <= 1:
        consume(fn(*args) for fn, args in jobs)
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(fn, *args) for fn, args in jobs]
            consume(f.result() for f in futures)

    if config.mode == "exhaustive":
        size = proj_size(q, k)
        bad = [rec for rec in result.records if rec.N % size]
        if bad:
            raise ArithmeticError(f"counts not divisible by {size}: {bad}")
    return result


def exhaustive_sweep(q: int, n: int, k: int, config: SweepConfig | None = None, modulus=None) -> list[SearchRecord]:
    config = config or SweepConfig()
    if config.mode != "exhaustive":
        config = SweepConfig(**{**asdict(config), "mode": "exhaustive"})
    return run_sweep(q, n, k, config, modulus).records


def random_sweep(q: int, n: int, k: int, config: SweepConfig | None = None, modulus=None) -> list[SearchRecord]:
    config = config or SweepConfig(mode="random")
    if config.mode != "random":
        config = SweepConfig(**{**asdict(config), "mode": "random"})
    return run_sweep(q, n, k, config, modulus).records


def reference_sweep(q: int, n: int, k: int, modulus=None) -> list[SearchRecord]:
    """Single-threaded sweep through the per-subspace API; slow, used as a cross-check."""
    from .gf_tower import prime_power
    from .orbit import intersection_distribution
    from .subspace import enumerate_containing_one

    p, e = prime_power(q)
    ctx = build_field(p, e, n, modulus)
    counts: Counter = Counter()
    for U in enumerate_containing_one(ctx, k):
        prof = intersection_distribution(U)
        if prof.t == 1 and prof.ds == 2 * k - 4:
            res = analyze_2dim(U, prof, verify=False)
            counts[(res.lambda2, res.case, res.r)] += 1
    return sorted(SearchRecord(q, n, k, *key, N) for key, N in counts.items())


@dataclass(frozen=True)
class SidonCensus:
    q: int
    n: int
    k: int
    count: int
    exceptions: int
    expected: tuple[int, int]
    certificates: tuple[tuple[int, ...], ...]  # bases of a few spaces certified by both methods


def sidon_census(q: int, n: int, k: int, config: SweepConfig | None = None, modulus=None, n_certificates: int = 3) -> SidonCensus:
    """Count Sidon spaces through 1 and check each against the closed-form distribution."""
    from .gf_tower import prime_power
    from .orbit import fraction_set, is_sidon, sidon_distribution

    config = config or SweepConfig()
    p, e = prime_power(q)
    ctx = build_field(p, e, n, modulus)
    expected = sidon_distribution(q, n, k)
    # the Sidon test needs only the batch dimensions, so skip the 2k-4 analysis
    total = count_containing_one(ctx, k)
    if total > config.max_candidates:
        raise InfeasibleSearchError(f"{total} candidates exceed the ceiling {config.max_candidates}")
    count = exc = 0
    B = _batch_size(ctx, k)
    for lo in range(0, total, B):
        for _, elems in batch_containing_one(ctx, k, lo, min(lo + B, total)):
            dims = _batch_dims(ctx, k, _batch_counts(ctx, elems))
            full = dims == k
            sid = (full.sum(axis=1) == 1) & (np.where(full, 0, dims).max(axis=1) == 1)
            lam = np.stack([(dims[sid] == 0).sum(axis=1), (dims[sid] == 1).sum(axis=1)], axis=1)
            count += int(sid.sum())
            exc += int(np.count_nonzero(np.any(lam != np.array(expected), axis=1)))

    certs = []
    i = 0
    while len(certs) < n_certificates and count and i < 10_000:
        U = random_containing_one(ctx, k, [config.seed, 1_000_003, i])
        i += 1
        if is_sidon(U):
            if fraction_set(U).f != Q_value(q, k) + 1:
                exc += 1
            certs.append(U.basis)
    return SidonCensus(q, n, k, count, exc, expected, tuple(certs))


def sidon_pair_search(ctx: FieldCtx, k: int, seed: int, max_tries: int = 10_000) -> tuple[Subspace, Subspace]:
    """First pair (in seeded sampling order) of Sidon spaces with the two-space Sidon property."""
    from .multiorbit import two_space_sidon
    from .orbit import is_sidon

    found: list[Subspace] = []
    for i in range(max_tries):
        U = random_containing_one(ctx, k, [seed, i])
        if U in found or not is_sidon(U):
            continue
        for V in found:
            try:
                if two_space_sidon(V, U):
                    return V, U
            except SameOrbitError:
                continue
        found.append(U)
    raise InfeasibleSearchError(f"no two-space Sidon pair within {max_tries} samples")

