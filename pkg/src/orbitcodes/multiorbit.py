"""Unions of several cyclic orbits: cross intersections and the two-space Sidon property.

For a pair (U, V) of k-spaces, ``|U cap gamma^a V| - 1`` for every class a
comes out of the same difference histogram used for one orbit, now with
differences ``u - v`` across the two spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .exceptions import MixedStabilizerError, PreconditionError, SameOrbitError
from .orbit import (
    CheckReport,
    OrbitProfile,
    Q_value,
    _dims_from_counts,
    _report,
    diff_class_counts,
    intersection_distribution,
    is_sidon,
    proj_size,
)
from .subspace import Subspace, _check_same, stabilizer


@dataclass(frozen=True)
class PairData:
    f_UV: int
    Q_hat: int
    cross_lambda: tuple[int, ...]  # index 0 holds lambda_0 = d - sum_{i>=1} lambda_i
    ell_UV: int

    def identities(self, q: int) -> CheckReport:
        lam = self.cross_lambda
        checks = [
            ("f_UV = sum lambda_i", self.f_UV == sum(lam[1:])),
            ("Q_hat = sum [i]_q lambda_i", self.Q_hat == sum(proj_size(q, i) * lam[i] for i in range(1, len(lam)))),
        ]
        return _report("pair_identities", checks, {"f_UV": self.f_UV, "Q_hat": self.Q_hat})


def cross_dims(U: Subspace, V: Subspace) -> dict[int, int]:
    """``{class a: dim(U cap gamma^a V)}`` over the classes where it is positive."""
    _check_same(U, V)
    if U.k != V.k:
        raise PreconditionError("cross distributions need equal dimensions")
    counts = diff_class_counts(U.ctx, U.logs, V.logs)
    frac = np.flatnonzero(counts)
    dims = _dims_from_counts(counts[frac], U.ctx.q, U.k)
    return dict(zip(frac.tolist(), dims.tolist()))


def cross_distribution(U: Subspace, V: Subspace) -> PairData:
    """Cross intersection distribution of Orb(U) against Orb(V); the orbits must differ."""
    ctx = U.ctx
    dims = cross_dims(U, V)
    same = [a for a, i in dims.items() if i == U.k]
    if same:
        raise SameOrbitError(f"U = gamma^{same[0]} V: generators share an orbit")
    hist = np.bincount(np.fromiter(dims.values(), dtype=np.int64, count=len(dims)), minlength=U.k)
    ell = int(np.flatnonzero(hist)[-1]) if len(dims) else 0
    lam = [int(x) for x in hist[: ell + 1]]
    lam[0] = ctx.d - sum(lam[1:])
    return PairData(f_UV=len(dims), Q_hat=proj_size(ctx.q, U.k) ** 2, cross_lambda=tuple(lam), ell_UV=ell)


@dataclass(frozen=True)
class TwoSpaceCertificate:
    by_definition: bool
    by_dimension: bool

    @property
    def agree(self) -> bool:
        return self.by_definition == self.by_dimension


def _two_space_by_definition(U: Subspace, V: Subspace) -> bool:
    # ab = cd with a,c in U and b,d in V forces a~c, b~d iff all point products differ
    prods = (U.proj_points()[:, None] + V.proj_points()[None, :]) % U.ctx.d
    return len(np.unique(prods)) == prods.size


def two_space_certificate(U: Subspace, V: Subspace) -> TwoSpaceCertificate:
    if U == V:
        raise PreconditionError("two-space Sidon test needs U != V")
    dims = cross_dims(U, V)
    return TwoSpaceCertificate(_two_space_by_definition(U, V), max(dims.values(), default=0) <= 1)


def two_space_sidon(U: Subspace, V: Subspace) -> bool:
    """Two-space Sidon test; the product definition and ``max dim(U cap aV) <= 1`` must agree."""
    cert = two_space_certificate(U, V)
    if not cert.agree:
        raise ArithmeticError(f"two-space Sidon methods disagree for {U!r}, {V!r}: {cert}")
    return cert.by_definition


@dataclass
class UnionCode:
    generators: list[Subspace]
    q: int
    n: int
    k: int
    t: int
    lam: tuple[int, ...]
    ds: int
    size: int
    profiles: list[OrbitProfile] = field(repr=False)
    pairs: dict[tuple[int, int], PairData] = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.generators)

    @property
    def delta(self) -> dict[int, int]:
        s = proj_size(self.q, self.t)
        return {2 * (self.k - i): self.lam[i] // s for i in range(len(self.lam))}

    def to_dict(self) -> dict:
        return {
            "m": self.m, "q": self.q, "n": self.n, "k": self.k, "t": self.t,
            "size": self.size, "ds": self.ds, "lambda": list(self.lam),
            "pairs": [
                {"i": i, "j": j, "f_UV": p.f_UV, "lambda": list(p.cross_lambda)}
                for (i, j), p in sorted(self.pairs.items())
            ],
        }


def union_distribution(generators: list[Subspace]) -> UnionCode:
    """Intersection distribution of the union of the orbits of ``generators``.

    Sums the single-orbit counts and, for every j < j', the cross counts with
    U_j as the left reference space.
    """
    if not generators:
        raise PreconditionError("need at least one generator")
    U0 = generators[0]
    ctx, k = U0.ctx, U0.k
    for U in generators[1:]:
        _check_same(U0, U)
        if U.k != k:
            raise PreconditionError("all generators must have the same dimension")
    ts = [stabilizer(U).t for U in generators]
    if len(set(ts)) > 1:
        raise MixedStabilizerError(f"stabilizer degrees differ: {ts}")
    t = ts[0]
    profiles = [intersection_distribution(U) for U in generators]
    pairs = {}
    for i in range(len(generators)):
        for j in range(i + 1, len(generators)):
            pairs[(i, j)] = cross_distribution(generators[i], generators[j])

    width = max([len(p.lam) for p in profiles] + [len(p.cross_lambda) for p in pairs.values()])
    lam = [0] * width
    for vec in [p.lam for p in profiles] + [p.cross_lambda for p in pairs.values()]:
        for i, x in enumerate(vec):
            lam[i] += x
    while len(lam) > 1 and lam[-1] == 0:
        lam.pop()
    ell = len(lam) - 1
    m = len(generators)
    return UnionCode(
        generators=list(generators), q=ctx.q, n=ctx.n, k=k, t=t, lam=tuple(lam),
        ds=2 * (k - ell), size=m * (ctx.q**ctx.n - 1) // (ctx.q**t - 1),
        profiles=profiles, pairs=pairs,
    )


def union_closed_form(q: int, n: int, k: int, m: int) -> tuple[int, int]:
    """(lambda_0, lambda_1) of m Sidon orbits that are pairwise two-space Sidon."""
    d = proj_size(q, n)
    Q, Q_hat = Q_value(q, k), proj_size(q, k) ** 2
    lam1 = m * Q + comb(m, 2) * Q_hat
    lam0 = m * (d - Q - 1) + comb(m, 2) * (d - Q_hat)
    return lam0, lam1


def verify_union_theorem(generators: list[Subspace]) -> CheckReport:
    """Certify the inputs, then compare the measured union distribution with the closed form."""
    if len(generators) < 2:
        raise PreconditionError("a union needs at least two generators")
    for i, U in enumerate(generators):
        if not is_sidon(U):
            raise PreconditionError(f"generator {i} is not a Sidon space")
    for i in range(len(generators)):
        for j in range(i + 1, len(generators)):
            if not two_space_sidon(generators[i], generators[j]):
                raise PreconditionError(f"generators {i}, {j} are not two-space Sidon")
    code = union_distribution(generators)
    q, n, k, m = code.q, code.n, code.k, code.m
    expect = union_closed_form(q, n, k, m)
    checks = [
        (f"|C| = {code.size}", code.size == m * proj_size(q, n)),
        (f"ds = {code.ds} = 2k-2", code.ds == 2 * k - 2),
        (f"lambda = {code.lam} matches {expect}", code.lam == expect),
        ("sum lambda = m(d-1) + C(m,2) d", sum(code.lam) == m * (proj_size(q, n) - 1) + comb(m, 2) * proj_size(q, n)),
    ]
    for p in code.pairs.values():
        checks.append(("pair identities", p.identities(q).passed))
    return _report("union_theorem", checks, {"lambda": code.lam, "closed_form": expect, "size": code.size})
