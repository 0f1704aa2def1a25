"""Input checks shared by the estimator, io and cli layers."""

from __future__ import annotations

from typing import Iterable

from .exceptions import FieldError, PreconditionError
from .gf_tower import ZERO, FieldCtx, prime_power
from .subspace import Subspace, span


def check_field_params(q: int, n: int) -> tuple[int, int]:
    """``(p, e)`` for a prime power q; rejects non prime powers and n < 1."""
    if not isinstance(q, int) or not isinstance(n, int) or isinstance(q, bool):
        raise FieldError("q and n must be integers")
    if n < 1:
        raise FieldError(f"n must be positive, got {n}")
    return prime_power(q)


def parse_element(ctx: FieldCtx, token) -> int:
    """An element given as a log (int), or the string ``"zero"``."""
    if isinstance(token, str):
        token = token.strip()
        if token.lower() == "zero":
            return ZERO
        token = int(token)
    if isinstance(token, bool) or not isinstance(token, int):
        raise ValueError(f"element must be a log or 'zero', got {token!r}")
    return token % ctx.N


def check_basis(ctx: FieldCtx, basis: Iterable) -> Subspace:
    """Span of the given logs; they must be linearly independent and nonzero."""
    logs = [parse_element(ctx, b) for b in basis]
    if not logs:
        raise PreconditionError("basis is empty")
    if ZERO in logs:
        raise PreconditionError("basis contains zero")
    U = span(ctx, logs)
    if U.k != len(logs):
        raise PreconditionError(f"basis of {len(logs)} elements spans only dimension {U.k}")
    return U


def check_coords(ctx: FieldCtx, rows: Iterable[Iterable[int]]) -> Subspace:
    """Span of vectors given as F_p coordinate lists (polynomial basis, low degree first)."""
    logs = []
    for row in rows:
        row = [int(c) for c in row]
        if len(row) != ctx.m or any(not 0 <= c < ctx.p for c in row):
            raise ValueError(f"coordinate row must have {ctx.m} entries in [0, {ctx.p})")
        logs.append(ctx.from_poly(row))
    return check_basis(ctx, logs)
