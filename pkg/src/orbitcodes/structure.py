"""Two-dimensional maximal intersections of full-length orbits with distance 2k-4.

The F_q-action ``phi(alpha, lam) = alpha / (1 + lam*alpha)`` on F_{q^n} \\ F_q
permutes the shifts ``alpha`` that share a given maximal intersection V, and
the sets ``A_V`` of such shifts come in families of shifted copies of V.
Counting these families (``r``) pins down ``lambda_2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import PreconditionError
from .gf_tower import ZERO, FieldCtx
from .orbit import (
    CheckReport,
    OrbitProfile,
    Q_value,
    _report,
    fraction_set,
    intersection_classes,
    intersection_distribution,
    proj_size,
)
from .subspace import Subspace, _basis_from_logs, contains_field_shift


def _fq_elements(ctx: FieldCtx) -> np.ndarray:
    return np.concatenate([[ZERO], ctx.scalar_logs])


def phi_apply(ctx: FieldCtx, alpha: int, lam: int) -> int:
    """``alpha / (1 + lam*alpha)`` for ``alpha`` outside F_q and ``lam`` in F_q (logs)."""
    if alpha == ZERO or ctx.in_subfield(alpha, 1):
        raise ValueError("phi is defined only off F_q")
    if lam != ZERO and not ctx.in_subfield(lam, 1):
        raise ValueError("lam must lie in F_q")
    denom = ctx.add(0, ctx.mul(lam, alpha))
    return ctx.div(alpha, denom)


@dataclass(frozen=True)
class PhiOrbit:
    base: int
    members: tuple[int, ...]  # phi(base, lam), lam running over F_q (zero first)
    proj_members: tuple[int, ...]  # sorted classes of the members


def phi_orbit(ctx: FieldCtx, alpha: int) -> PhiOrbit:
    if alpha == ZERO or ctx.in_subfield(alpha, 1):
        raise ValueError("phi is defined only off F_q")
    lams = _fq_elements(ctx)
    denom = ctx.add_arrays(0, ctx.mul_arrays(lams, alpha))
    members = (alpha - denom) % ctx.N
    return PhiOrbit(int(alpha), tuple(members.tolist()), tuple(sorted((members % ctx.d).tolist())))


def phi_class_matrix(ctx: FieldCtx) -> np.ndarray:
    """Row ``a-1`` holds the classes of ``phi(gamma^a, lam)`` for a in [1, d)."""
    a = np.arange(1, ctx.d, dtype=np.int64)[:, None]
    lams = _fq_elements(ctx)[None, :]
    denom = ctx.add_arrays(0, ctx.mul_arrays(lams, a))
    return ((a - denom) % ctx.N) % ctx.d


def phi_partition(ctx: FieldCtx) -> list[tuple[int, ...]]:
    """Projectivized phi-orbits partitioning P(F_{q^n}) minus the class of 1."""
    rows = np.unique(np.sort(phi_class_matrix(ctx), axis=1), axis=0)
    return [tuple(int(x) for x in r) for r in rows]


@dataclass(frozen=True)
class AVSet:
    V: Subspace
    members: np.ndarray  # sorted classes alpha with V <= U cap alpha U

    def __len__(self) -> int:
        return len(self.members)


def compute_A_V(U: Subspace, V: Subspace) -> AVSet:
    """All classes alpha with ``V <= U cap alpha U``, scanning the fraction set of U."""
    ctx = U.ctx
    if not np.all(U.mask[V.logs]):
        raise ValueError("V is not contained in U")
    cand = fraction_set(U).fractions
    ok = U.mask[(V.logs[None, :] - cand[:, None]) % ctx.N].all(axis=1)
    return AVSet(V, cand[ok])


def verify_A_V_decomposition(U: Subspace, av: AVSet, t: int = 1) -> CheckReport:
    """``A_V`` minus the stabilizer classes is a union of projectivized phi-orbits."""
    ctx = U.ctx
    c_t = ctx.cofactors[t]
    members = set(av.members.tolist())
    stab = {a for a in members if a % c_t == 0}
    checks = [("stabilizer classes present", len(stab) == proj_size(ctx.q, t))]
    for a in sorted(members - stab):
        orb = set(phi_orbit(ctx, a).proj_members)
        checks.append((f"phi-orbit of class {a} inside A_V", orb <= members))
    rest = len(members) - len(stab)
    checks.append(("|A_V| = a*q + s", rest % ctx.q == 0))
    return _report("A_V_decomposition", checks, {"size": len(members)})


@dataclass
class Family:
    members: list[bytes]
    A_V: dict[bytes, list[int]]  # member key -> A_V classes (1 included)


@dataclass
class TwoDimAnalysis:
    case: str
    r: int
    lambda2: int
    field_shift_witness: int | None
    families: list[Family]
    intersections: dict[bytes, np.ndarray] = field(repr=False)
    checks: CheckReport | None = None

    def to_dict(self, ctx: FieldCtx) -> dict:
        fams = []
        for fam in self.families:
            for key in fam.members:
                fams.append(
                    {
                        "V_basis": _basis_from_logs(ctx, self.intersections[key]),
                        "A_V_classes": fam.A_V[key],
                    }
                )
        return {
            "case": self.case,
            "r": self.r,
            "lambda2": self.lambda2,
            "families": fams,
            "witnesses": {"field_shift": self.field_shift_witness},
        }


def _find(parent: dict, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _exists_unit_relation(ctx: FieldCtx, alpha: int, beta: int) -> bool:
    """True iff ``1 = lam/alpha + mu/beta`` for some lam, mu in F_q^*."""
    ia, ib = ctx.inv(alpha), ctx.inv(beta)
    sc = ctx.scalar_logs
    lhs = ctx.add_arrays((sc[:, None] + ia) % ctx.N, (sc[None, :] + ib) % ctx.N)
    return bool(np.any(lhs == 0))


def analyze_2dim(U: Subspace, profile: OrbitProfile | None = None, verify: bool = True) -> TwoDimAnalysis:
    """Case (field shift or not), family count r and lambda_2 for a t=1, ds=2k-4 orbit."""
    ctx = U.ctx
    q, N, d = ctx.q, ctx.N, ctx.d
    prof = profile or intersection_distribution(U)
    if prof.t != 1 or prof.ds != 2 * U.k - 4:
        raise PreconditionError("analyze_2dim needs a full-length orbit with distance 2k-4")
    cls2 = intersection_classes(U).get(2, np.empty(0, np.int64))

    inter: dict[bytes, np.ndarray] = {}
    shifts: dict[bytes, list[int]] = {}
    for a in cls2.tolist():
        v = np.intersect1d(U.logs, (U.logs + a) % N, assume_unique=True)
        key = v.tobytes()
        inter.setdefault(key, v)
        shifts.setdefault(key, []).append(a)

    c2 = ctx.cofactors.get(2)
    field_keys = [key for key, v in inter.items() if c2 is not None and np.all((v - v[0]) % c2 == 0)]
    witness = contains_field_shift(U, 2)
    case = "A" if witness is not None else "B"

    checks: list[tuple[str, bool]] = [("at most one field-shift intersection", len(field_keys) <= 1)]
    checks.append(("case agrees with intersection list", (case == "A") == (len(field_keys) == 1)))

    full_keys = [key for key in inter if key not in field_keys]
    parent = {key: key for key in full_keys}
    for key in full_keys:
        v = inter[key]
        for a in shifts[key]:
            w = np.sort((v - a) % N).tobytes()
            if w not in parent:
                checks.append((f"shift of V by class {-a % d} is an intersection", False))
                continue
            parent[_find(parent, w)] = _find(parent, key)

    groups: dict[bytes, list[bytes]] = {}
    for key in full_keys:
        groups.setdefault(_find(parent, key), []).append(key)
    families = [
        Family(sorted(g), {key: sorted([0] + shifts[key]) for key in sorted(g)})
        for g in groups.values()
    ]
    families.sort(key=lambda fam: fam.members[0])
    r = len(families)
    lambda2 = len(cls2)

    if verify:
        for key in field_keys:
            pf = sorted({(j * c2) % d for j in range(q + 1)})
            checks.append(("field-shift A_V = P(F_{q^2})", sorted([0] + shifts[key]) == pf))
        for key in full_keys:
            a_cls = shifts[key]
            checks.append((f"|A_V| = q+1 ({len(a_cls) + 1})", len(a_cls) == q))
            alpha = a_cls[0]
            for beta in a_cls[1:]:
                checks.append(("A_V relation 1 = lam/alpha + mu/beta", _exists_unit_relation(ctx, alpha, beta)))
            for ai in a_cls:
                w = np.sort((inter[key] - ai) % N).tobytes()
                if w in shifts:
                    expect = sorted({(aj - ai) % d for aj in a_cls} | {(-ai) % d})
                    checks.append(("A of shifted V", sorted([0] + shifts[w]) == expect))
            V = Subspace(ctx, inter[key], [], k=2)
            av = compute_A_V(U, V)
            checks.append(("A_V scan matches intersections", av.members.tolist() == sorted([0] + a_cls)))
        for fam in families:
            checks.append((f"family size q+1 ({len(fam.members)})", len(fam.members) == q + 1))
        expected = (q if case == "A" else 0) + r * q * (q + 1)
        checks.append((f"lambda2={lambda2} = {expected}", lambda2 == expected))
        checks.append(("lambda2 agrees with profile", lambda2 == prof.lam[2]))
        if case == "B":
            checks.append(("case B has r >= 1", r >= 1))
        checks.append(("lambda2 mod q(q+1) in {0, q}", lambda2 % (q * (q + 1)) in (0, q)))

    return TwoDimAnalysis(
        case=case,
        r=r,
        lambda2=lambda2,
        field_shift_witness=witness,
        families=families,
        intersections=inter,
        checks=_report("analyze_2dim", checks, {"r": r, "lambda2": lambda2}) if verify else None,
    )


def check_2k4_inequalities(profile: OrbitProfile, f: int) -> CheckReport:
    """Bounds on lambda_1, lambda_2 and f for full-length orbits with distance 2k-4."""
    q, k = profile.q, profile.k
    if profile.t != 1 or profile.ds != 2 * k - 4:
        raise PreconditionError("needs a full-length orbit with distance 2k-4")
    Q = Q_value(q, k)
    lam1, lam2 = profile.lam[1], profile.lam[2]
    checks = [
        (f"q <= lambda2={lam2} <= Q/(q+1)={Q // (q + 1)}", q <= lam2 and (q + 1) * lam2 <= Q),
        (f"0 <= lambda1={lam1} <= Q - q(q+1)", 0 <= lam1 <= Q - q * (q + 1)),
        (f"Q/(q+1) <= f-1={f - 1} <= Q - q^2", Q <= (q + 1) * (f - 1) and f - 1 <= Q - q * q),
        ("lambda2 mod q(q+1) in {0, q}", lam2 % (q * (q + 1)) in (0, q)),
    ]
    return _report("2k-4 inequalities", checks, {"lambda1": lam1, "lambda2": lam2, "f": f})
