"""Single-orbit analytics: intersection distributions, fraction sets, Sidon checks.

Every shift class is indexed by ``a mod d`` with ``d = (q^n-1)/(q-1)``; the
class of ``gamma^a`` is the projective point of ``gamma^a``. The number of
nonzero elements in ``U cap gamma^a U`` equals the number of pairs
``(x, y)`` of logs of U with ``x - y = a`` (mod q^n - 1), so one histogram of
pairwise log differences yields every intersection dimension at once. Only
classes hit by a difference (the fraction set) can have nonzero
intersection; the rest are counted by complement.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import PreconditionError
from .gf_tower import FieldCtx
from .subspace import Subspace, int_log, stabilizer


def proj_size(q: int, i: int) -> int:
    """``(q^i - 1)/(q - 1)``, the number of points of PG(i-1, q)."""
    return (q**i - 1) // (q - 1)


def Q_value(q: int, k: int) -> int:
    """Number of ordered pairs of distinct projective points of a k-space."""
    return proj_size(q, k) * ((q**k - q) // (q - 1))


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a verification routine; ``failures`` lists what went wrong."""

    name: str
    passed: bool
    failures: tuple[str, ...] = ()
    values: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed


def _report(name: str, checks: list[tuple[str, bool]], values: dict | None = None) -> CheckReport:
    failed = tuple(msg for msg, ok in checks if not ok)
    return CheckReport(name, not failed, failed, values or {})


@dataclass(frozen=True)
class OrbitProfile:
    q: int
    n: int
    k: int
    t: int
    orbit_size: int
    ell: int
    lam: tuple[int, ...]
    delta: dict[int, int]
    ds: int

    @property
    def s(self) -> int:
        return proj_size(self.q, self.t)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = list(d.pop("lam"))
        d["delta"] = {str(k): v for k, v in self.delta.items()}
        return d


@dataclass(frozen=True)
class FractionData:
    fractions: np.ndarray
    f: int
    s: int
    Q: int
    psi_histogram: dict[int, int]


def diff_class_counts(ctx: FieldCtx, logs_u: np.ndarray, logs_v: np.ndarray | None = None) -> np.ndarray:
    """``out[a] = |U cap gamma^a V| - 1`` for every shift class ``a`` in [0, d).

    ``V`` defaults to ``U``.
    """
    logs_v = logs_u if logs_v is None else logs_v
    diffs = (logs_u[:, None] - logs_v[None, :]) % ctx.d
    # each class holds q-1 shifts, all giving the same intersection
    return np.bincount(diffs.ravel(), minlength=ctx.d) // (ctx.q - 1)


def _dims_from_counts(counts: np.ndarray, q: int, kmax: int) -> np.ndarray:
    dims = np.full(counts.shape, -1, dtype=np.int64)
    for i in range(kmax + 1):
        dims[counts + 1 == q**i] = i
    if np.any(dims < 0):
        raise ArithmeticError("intersection size is not a power of q")
    return dims


def _check_k(U: Subspace) -> None:
    if U.k < 1:
        raise PreconditionError("orbit analysis needs k >= 1")
    if 2 * U.k > U.ctx.n:
        raise PreconditionError(
            f"k={U.k} > n/2={U.ctx.n / 2}: analyse the orthogonal complement (dimension n-k) instead"
        )


def shift_dimensions(U: Subspace) -> dict[int, int]:
    """``{class: dim(U cap alpha U)}`` for every class in the fraction set F(U)."""
    counts = diff_class_counts(U.ctx, U.logs)
    frac = np.flatnonzero(counts)
    dims = _dims_from_counts(counts[frac], U.ctx.q, U.k)
    return dict(zip(frac.tolist(), dims.tolist()))


def intersection_classes(U: Subspace) -> dict[int, np.ndarray]:
    """``{i: sorted classes with dim(U cap alpha U) = i}`` for 1 <= i < k."""
    dims = shift_dimensions(U)
    out: dict[int, list[int]] = {}
    for a, i in dims.items():
        if i < U.k:
            out.setdefault(i, []).append(a)
    return {i: np.array(sorted(v), dtype=np.int64) for i, v in sorted(out.items())}


def profile_from_dims(q: int, n: int, k: int, t: int, dims: np.ndarray) -> OrbitProfile:
    """Assemble a profile from the intersection dimensions of all classes in F(U)."""
    d = proj_size(q, n)
    s = proj_size(q, t)
    hist = np.bincount(dims, minlength=k + 1)
    nonstab = hist[1:k]
    ell = int(np.flatnonzero(nonstab)[-1]) + 1 if nonstab.any() else 0
    lam = [0] * (ell + 1)
    for i in range(1, ell + 1):
        lam[i] = int(hist[i])
    lam[0] = d - s - sum(lam[1:])
    delta = {2 * (k - i): lam[i] // s for i in range(ell + 1)}
    return OrbitProfile(
        q=q, n=n, k=k, t=t, orbit_size=(q**n - 1) // (q**t - 1),
        ell=ell, lam=tuple(lam), delta=delta, ds=2 * (k - ell),
    )


def intersection_distribution(U: Subspace) -> OrbitProfile:
    """Intersection and distance distribution of Orb(U); requires 1 <= k <= n/2."""
    _check_k(U)
    ctx = U.ctx
    t = stabilizer(U).t
    dims = np.fromiter(shift_dimensions(U).values(), dtype=np.int64)
    return profile_from_dims(ctx.q, ctx.n, U.k, t, dims)


def fraction_set(U: Subspace) -> FractionData:
    ctx = U.ctx
    if U.k < 1:
        raise PreconditionError("fraction set needs k >= 1")
    reps = U.proj_points()
    # ordered pairs of projective points, diagonal included so that 1 is hit
    cls = ((reps[:, None] - reps[None, :]) % ctx.d).ravel()
    per_class = np.bincount(cls, minlength=ctx.d)
    fractions = np.flatnonzero(per_class)
    sizes, mult = np.unique(per_class[fractions], return_counts=True)
    t = stabilizer(U).t
    return FractionData(
        fractions=fractions,
        f=len(fractions),
        s=proj_size(ctx.q, t),
        Q=Q_value(ctx.q, U.k),
        psi_histogram=dict(zip(sizes.tolist(), mult.tolist())),
    )


def psi_preimages(U: Subspace) -> dict[int, int]:
    """``{class: number of ordered projective pairs (u, v) with u/v in class}``."""
    reps = U.proj_points()
    cls = ((reps[:, None] - reps[None, :]) % U.ctx.d).ravel()
    keys, counts = np.unique(cls, return_counts=True)
    return dict(zip(keys.tolist(), counts.tolist()))


def verify_psi_preimages(U: Subspace) -> CheckReport:
    """Preimage sizes against dimensions measured by direct bitset intersection."""
    ctx = U.ctx
    q, k = ctx.q, U.k
    t = stabilizer(U).t
    body = U.mask
    checks = []
    for a, size in psi_preimages(U).items():
        dim = int_log(int(np.count_nonzero(body & np.roll(body, a))) + 1, q)
        if dim == k:
            ok = size == proj_size(q, k) and a % ctx.cofactors[t] == 0
        else:
            ok = size == proj_size(q, dim) and dim % t == 0 and dim >= 1
        checks.append((f"class {a}: preimage {size}, dim {dim}", ok))
    return _report("psi_preimages", checks, {"classes": len(checks)})


@dataclass(frozen=True)
class SidonCertificate:
    by_definition: bool
    by_distance: bool

    @property
    def agree(self) -> bool:
        return self.by_definition == self.by_distance


def _sidon_by_definition(U: Subspace) -> bool:
    reps = U.proj_points()
    iu, ju = np.triu_indices(len(reps))
    prods = (reps[iu] + reps[ju]) % U.ctx.d
    return len(np.unique(prods)) == len(prods)


def sidon_certificate(U: Subspace) -> SidonCertificate:
    if U.k < 2:
        raise PreconditionError("Sidon certification needs k >= 2")
    prof = intersection_distribution(U)
    by_distance = prof.t == 1 and prof.ds == 2 * U.k - 2
    return SidonCertificate(_sidon_by_definition(U), by_distance)


def is_sidon(U: Subspace) -> bool:
    """Sidon test; the definition and the orbit-distance criterion must agree."""
    cert = sidon_certificate(U)
    if not cert.agree:
        raise ArithmeticError(f"Sidon methods disagree for {U!r}: {cert}")
    return cert.by_definition


def sidon_distribution(q: int, n: int, k: int) -> tuple[int, int]:
    """(lambda_0, lambda_1) shared by every optimal full-length orbit."""
    if not 2 <= k <= n / 2:
        raise PreconditionError("need 2 <= k <= n/2")
    lam1 = Q_value(q, k)
    return proj_size(q, n) - lam1 - 1, lam1


def counting_identities(profile: OrbitProfile, frac: FractionData) -> CheckReport:
    """f = s + sum lambda_i, Q = sum [i]_q lambda_i + [k]_q (s-1), and the f bounds."""
    q, k = profile.q, profile.k
    lam = profile.lam
    s = frac.s
    rhs_q = sum(proj_size(q, i) * lam[i] for i in range(1, len(lam))) + proj_size(q, k) * (s - 1)
    checks = [
        ("f = s + sum lambda_i", frac.f == s + sum(lam[1:])),
        ("Q = sum [i]_q lambda_i + [k]_q (s-1)", frac.Q == rhs_q),
        ("[k]_q <= f <= Q + 1", proj_size(q, k) <= frac.f <= frac.Q + 1),
        ("s matches stabilizer", s == profile.s),
    ]
    if profile.t == 1:
        checks.append(("f - 1 = sum lambda_i (t=1)", frac.f - 1 == sum(lam[1:])))
    return _report("counting_identities", checks, {"f": frac.f, "Q": frac.Q})


def gen_sidon_check(U: Subspace) -> CheckReport:
    """f bounds refined by the stabilizer degree t, and the extremal cases."""
    prof = intersection_distribution(U)
    frac = fraction_set(U)
    q, k, n, t = prof.q, prof.k, prof.n, prof.t
    top = ((q**k - 1) // (q**t - 1)) * ((q**k - q**t) // (q - 1))
    s = proj_size(q, t)
    f = frac.f
    checks = [(f"{proj_size(q, k)} <= f={f} <= {top + s}", proj_size(q, k) <= f <= top + s)]
    if t < k:
        checks.append(("f at upper bound iff ds = 2(k-t)", (f == top + s) == (prof.ds == 2 * (k - t))))
    if prof.ds == 2 * (k - t) and t < k:
        lam_t = prof.lam[t] if len(prof.lam) > t else 0
        checks.append((f"lambda_t={lam_t} == {top}", lam_t == top))
        checks.append(("lambda_0 = (q^n - q^t)/(q-1) - lambda_t", prof.lam[0] == (q**n - q**t) // (q - 1) - lam_t))
    if 2 * t == k:
        checks.append(("f = (q^(3k/2)-1)/(q-1)", f == proj_size(q, 3 * k // 2)))
    if t == k:
        checks.append(("spread: f = [k]_q", f == proj_size(q, k)))
    return _report("gen_sidon", checks, {"t": t, "f": f, "ds": prof.ds})


def lambda_from_f(q: int, k: int, f: int) -> tuple[int, int]:
    """(lambda_1, lambda_2) of a full-length orbit with distance 2k-4, from f alone.

    Raises ValueError when the values come out negative or fractional, which
    means the orbit cannot be of that type.
    """
    Q = Q_value(q, k)
    num1 = (q + 1) * (f - 1) - Q
    num2 = Q - (f - 1)
    if num1 % q or num2 % q:
        raise ValueError(f"f={f} gives non-integral lambda values for q={q}, k={k}")
    lam1, lam2 = num1 // q, num2 // q
    if lam1 < 0 or lam2 < 0:
        raise ValueError(f"f={f} gives negative lambda values for q={q}, k={k}")
    return lam1, lam2
