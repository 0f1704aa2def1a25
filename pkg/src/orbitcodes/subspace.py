"""F_q-subspaces of F_{q^n} stored as element sets.

A :class:`Subspace` keeps the sorted logs of its nonzero elements together
with a boolean membership vector over all logs, so intersections are an AND
plus a popcount and multiplicative shifts are index rotations. Canonical
RREF bases are only used for enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .exceptions import PreconditionError
from .gf_tower import ZERO, FieldCtx


def int_log(count: int, q: int) -> int:
    """Exact ``log_q(count)``; raises if ``count`` is not a power of q."""
    k = 0
    c = count
    while c > 1:
        c, r = divmod(c, q)
        if r:
            raise ValueError(f"{count} is not a power of {q}")
        k += 1
    if c != 1:
        raise ValueError(f"{count} is not a power of {q}")
    return k


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


class Subspace:
    """A k-dimensional F_q-subspace of F_{q^n}.

    ``logs`` is the sorted array of logs of the nonzero elements (length
    ``q^k - 1``); ``basis`` a tuple of ``k`` element logs spanning it.
    """

    def __init__(self, ctx: FieldCtx, logs: np.ndarray, basis: Sequence[int], k: int | None = None):
        self.ctx = ctx
        logs = np.asarray(logs, dtype=np.int64)
        logs.setflags(write=False)
        self.logs = logs
        self.basis = tuple(int(b) for b in basis)
        self.k = int_log(len(logs) + 1, ctx.q) if k is None else k

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.ctx.N, dtype=bool)
        m[self.logs] = True
        m.setflags(write=False)
        return m

    @cached_property
    def key(self) -> bytes:
        return self.logs.tobytes()

    def __len__(self) -> int:
        return len(self.logs) + 1

    def __contains__(self, a: int) -> bool:
        return a == ZERO or bool(self.mask[a % self.ctx.N])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ctx.spec == other.ctx.spec and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Subspace(k={self.k}, basis={list(self.basis)})"

    def proj_points(self) -> np.ndarray:
        """One representative log per projective point of U (the smallest)."""
        d = self.ctx.d
        _, idx = np.unique(self.logs % d, return_index=True)
        return self.logs[idx]


@dataclass(frozen=True)
class StabilizerInfo:
    t: int
    s: int


def _check_same(U: Subspace, V: Subspace) -> None:
    if U.ctx is not V.ctx and U.ctx.spec != V.ctx.spec:
        raise ValueError("subspaces live in different fields")


def _vec_digits(ctx: FieldCtx, logs) -> np.ndarray:
    logs = np.asarray(logs, dtype=np.int64)
    vecs = np.where(logs == ZERO, 0, ctx.exp[np.where(logs == ZERO, 0, logs)])
    return ctx.digits(vecs)


def _digits_to_logs(ctx: FieldCtx, digits: np.ndarray) -> np.ndarray:
    return ctx.log[digits @ ctx.powers_of_p]


def span(ctx: FieldCtx, generators: Sequence[int]) -> Subspace:
    """Smallest F_q-subspace containing ``generators`` (logs or ``ZERO``).

    Generators already in the span are dropped from the stored basis.
    """
    p, m = ctx.p, ctx.m
    elems = np.zeros((1, m), dtype=np.int64)
    members = {0}
    basis = []
    coeff = np.arange(p, dtype=np.int64)[:, None, None]
    for g in generators:
        g = int(g)
        if g == ZERO:
            continue
        g %= ctx.N
        if int(ctx.exp[g]) in members:
            continue
        basis.append(g)
        for z in ctx.prime_scalar_logs:
            gd = _vec_digits(ctx, [(g + int(z)) % ctx.N])[0]
            elems = ((elems[None, :, :] + coeff * gd[None, None, :]) % p).reshape(-1, m)
        members = set((elems @ ctx.powers_of_p).tolist())
    logs = np.sort(_digits_to_logs(ctx, elems)[1:]) if len(elems) > 1 else np.empty(0, np.int64)
    return Subspace(ctx, logs, basis, k=len(basis))


def subfield_subspace(ctx: FieldCtx, t: int) -> Subspace:
    """F_{q^t} as an F_q-subspace, with basis ``1, w, ..., w^(t-1)`` for a primitive w."""
    logs = ctx.subfield_logs(t)
    c = ctx.cofactors[t]
    return Subspace(ctx, logs, [(j * c) % ctx.N for j in range(t)], k=t)


def shift(U: Subspace, alpha: int) -> Subspace:
    """``alpha * U``."""
    if alpha == ZERO:
        raise ValueError("shift by zero")
    N = U.ctx.N
    logs = np.sort((U.logs + alpha) % N)
    return Subspace(U.ctx, logs, [(b + alpha) % N for b in U.basis], k=U.k)


def intersect_dim(U: Subspace, V: Subspace) -> int:
    _check_same(U, V)
    return int_log(int(np.count_nonzero(U.mask & V.mask)) + 1, U.ctx.q)


def intersection(U: Subspace, V: Subspace) -> Subspace:
    _check_same(U, V)
    logs = np.intersect1d(U.logs, V.logs, assume_unique=True)
    return Subspace(U.ctx, logs, _basis_from_logs(U.ctx, logs))


def _basis_from_logs(ctx: FieldCtx, logs: np.ndarray) -> list[int]:
    return list(span(ctx, logs).basis)


def subspace_sum(U: Subspace, V: Subspace) -> Subspace:
    _check_same(U, V)
    return span(U.ctx, list(U.basis) + list(V.basis))


def stabilizer(U: Subspace) -> StabilizerInfo:
    """Largest t | gcd(k, n) with ``F_{q^t}^* U = U``."""
    ctx = U.ctx
    if U.k < 1:
        raise PreconditionError("stabilizer needs k >= 1")
    g = math.gcd(U.k, ctx.n)
    t = 1
    for cand in range(g, 0, -1):
        if g % cand:
            continue
        if np.all(U.mask[(U.logs + ctx.cofactors[cand]) % ctx.N]):
            t = cand
            break
    return StabilizerInfo(t, (ctx.q**t - 1) // (ctx.q - 1))


def contains_field_shift(U: Subspace, t: int) -> int | None:
    """Some ``g`` with ``gamma^g * F_{q^t} <= U``, or None.

    Tests each projective representative u of U for ``u F_{q^t} <= U``.
    """
    ctx = U.ctx
    if ctx.n % t or t > U.k:
        return None
    sub = ctx.subfield_logs(t)
    reps = U.proj_points()
    ok = U.mask[(reps[:, None] + sub[None, :]) % ctx.N].all(axis=1)
    hits = np.flatnonzero(ok)
    return int(reps[hits[0]]) if len(hits) else None


# -- enumeration of subspaces containing 1 ---------------------------------


@lru_cache(maxsize=64)
def _pivot_table(r: int, c: int, q: int) -> tuple[tuple, tuple, tuple]:
    """Pivot patterns of r x c RREF matrices, their free cells and cumulative counts."""
    patterns = tuple(itertools.combinations(range(c), r))
    frees = []
    cum = [0]
    for piv in patterns:
        pset = set(piv)
        free = tuple((i, j) for i in range(r) for j in range(piv[i] + 1, c) if j not in pset)
        frees.append(free)
        cum.append(cum[-1] + q ** len(free))
    return patterns, tuple(frees), tuple(cum)


def count_containing_one(ctx: FieldCtx, k: int) -> int:
    return gaussian_binomial(ctx.n - 1, k - 1, ctx.q)


def _fq_index_logs(ctx: FieldCtx) -> np.ndarray:
    """F_q element index -> log (index 0 is zero)."""
    return np.concatenate([[ZERO], ctx.scalar_logs])


def _rref_batch(ctx: FieldCtx, k: int, start: int, stop: int, chunk: int = 4096) -> Iterator[np.ndarray]:
    """Yield (B, k-1, n-1) arrays of F_q element indices, RREF in quotient coordinates."""
    q = ctx.q
    r, c = k - 1, ctx.n - 1
    patterns, frees, cum = _pivot_table(r, c, q)
    pi = max(0, int(np.searchsorted(cum, start, side="right")) - 1)
    while pi < len(patterns) and cum[pi] < stop:
        lo = max(start, cum[pi]) - cum[pi]
        hi = min(stop, cum[pi + 1]) - cum[pi]
        piv, free = patterns[pi], frees[pi]
        for a in range(lo, hi, chunk):
            fill = np.arange(a, min(a + chunk, hi), dtype=np.int64)
            mats = np.zeros((len(fill), r, c), dtype=np.int64)
            for i, j in enumerate(piv):
                mats[:, i, j] = 1  # index 1 is the scalar 1 (log 0)
            for pos, (i, j) in enumerate(free):
                mats[:, i, j] = (fill // q**pos) % q
            yield mats
        pi += 1


def _rows_to_digits(ctx: FieldCtx, mats: np.ndarray) -> np.ndarray:
    """Digits (B, r, m) of the row elements sum_j R_ij gamma^(j+1)."""
    N = ctx.N
    coeff_logs = _fq_index_logs(ctx)[mats]  # (B, r, c)
    cols = np.arange(1, mats.shape[2] + 1, dtype=np.int64)
    term_logs = np.where(coeff_logs == ZERO, ZERO, (coeff_logs + cols) % N)
    digits = _vec_digits(ctx, term_logs)  # (B, r, c, m)
    return digits.sum(axis=2) % ctx.p


@lru_cache(maxsize=64)
def _combo_matrix(p: int, g: int) -> np.ndarray:
    """All vectors of F_p^g as rows, the zero vector first."""
    idx = np.arange(p**g, dtype=np.int64)
    return (idx[:, None] // p ** np.arange(g, dtype=np.int64)) % p


def _element_logs(ctx: FieldCtx, gen_digits: np.ndarray) -> np.ndarray:
    """Logs of all nonzero F_p-combinations of F_p-generators (B, g, m) -> (B, p^g - 1)."""
    C = _combo_matrix(ctx.p, gen_digits.shape[1])
    elems = np.einsum("cg,bgm->bcm", C, gen_digits) % ctx.p
    return _digits_to_logs(ctx, elems[:, 1:, :])


def batch_containing_one(ctx: FieldCtx, k: int, start: int = 0, stop: int | None = None):
    """Yield ``(row_logs, element_logs)`` batches for enumeration indices [start, stop).

    ``row_logs`` has shape (B, k-1): the non-trivial basis vectors; the
    element logs (B, q^k - 1) are unsorted.
    """
    total = count_containing_one(ctx, k)
    stop = total if stop is None else min(stop, total)
    if k < 1 or k > ctx.n:
        raise PreconditionError(f"need 1 <= k <= n, got k={k}")
    N = ctx.N
    zeta = ctx.prime_scalar_logs
    one_digits = _vec_digits(ctx, zeta)  # (e, m)
    for mats in _rref_batch(ctx, k, start, stop):
        B = mats.shape[0]
        row_digits = _rows_to_digits(ctx, mats)  # (B, r, m)
        row_logs = _digits_to_logs(ctx, row_digits)
        parts = [np.broadcast_to(one_digits, (B,) + one_digits.shape)]
        for z in zeta:
            parts.append(_vec_digits(ctx, (row_logs + int(z)) % N))
        gens = np.concatenate(parts, axis=1)
        yield row_logs, _element_logs(ctx, gens)


def enumerate_containing_one(ctx: FieldCtx, k: int, start: int = 0, stop: int | None = None) -> Iterator[Subspace]:
    """Every k-dim subspace containing 1 exactly once (RREF order), optionally a slice."""
    for row_logs, elems in batch_containing_one(ctx, k, start, stop):
        for rows, logs in zip(row_logs, elems):
            yield Subspace(ctx, np.sort(logs), [0] + [int(x) for x in rows], k=k)


def random_containing_one(ctx: FieldCtx, k: int, seed=None) -> Subspace:
    """Uniformly random k-dim subspace containing 1; deterministic under ``seed``.

    ``seed`` may be anything accepted by :func:`numpy.random.default_rng`.
    """
    if k < 1 or k > ctx.n:
        raise PreconditionError(f"need 1 <= k <= n, got k={k}")
    rng = np.random.default_rng(seed)
    gens = [0]
    U = span(ctx, gens)
    while U.k < k:
        v = int(rng.integers(1, ctx.order))
        a = int(ctx.log[v])
        if a in U:
            continue
        gens.append(a)
        U = span(ctx, gens)
    return U
