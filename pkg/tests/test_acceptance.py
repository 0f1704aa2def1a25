"""Acceptance suite: one or more tests per criterion, summarised as PASS/FAIL lines.

Set ORBITCODES_SLOW=1 to include the two long exhaustive rows of the table.
Run on its own with ``pytest tests/test_acceptance.py -v``.
"""

import os
from functools import lru_cache

import numpy as np
import pytest

from oracles import distribution_from_polynomials
from orbitcodes.gf_tower import build_field, primitive_polynomials
from orbitcodes.multiorbit import two_space_sidon, union_closed_form, union_distribution, verify_union_theorem
from orbitcodes.orbit import (
    counting_identities,
    fraction_set,
    gen_sidon_check,
    intersection_classes,
    intersection_distribution,
    is_sidon,
    proj_size,
    psi_preimages,
    sidon_distribution,
    verify_psi_preimages,
)
from orbitcodes.search import SweepConfig, exhaustive_sweep, run_sweep, sidon_census, sidon_pair_search
from orbitcodes.structure import analyze_2dim, phi_class_matrix, phi_orbit, phi_partition
from orbitcodes.subspace import random_containing_one, span, stabilizer

SLOW = os.environ.get("ORBITCODES_SLOW") == "1"


def criterion(num, text):
    return pytest.mark.criterion(num, text)


@lru_cache(maxsize=None)
def sweep(q, n, k):
    return run_sweep(q, n, k)


def _field(q, n, modulus=None):
    p, e = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1)}[q]
    return build_field(p, e, n, modulus)


# -- 1: exhaustive table ------------------------------------------------------

# (lambda2, case, r, N) as measured; the reference rows give (lambda2, r, N).
# For (2,8,4) the reference row prints r = 4 next to lambda2 = 20; 20 = 2 + 3*6 forces r = 3.
TABLE = {
    (2, 6, 3): [(2, "A", 0, 35), (6, "B", 1, 63)],
    (2, 7, 3): [(6, "B", 1, 147)],
    (2, 8, 3): [(2, "A", 0, 140), (6, "B", 1, 280), (14, "A", 2, 7)],
    (2, 9, 3): [(6, "B", 1, 588)],
    (2, 10, 3): [(2, "A", 0, 595), (6, "B", 1, 1190)],
    (3, 6, 3): [(3, "A", 0, 130), (12, "B", 1, 377)],
    (3, 7, 3): [(12, "B", 1, 1183)],
    (3, 8, 3): [(3, "A", 0, 1170), (12, "B", 1, 3510), (39, "A", 3, 13)],
    (5, 6, 3): [(5, "A", 0, 806), (30, "B", 1, 3999)],
    (2, 8, 4): [
        (12, "B", 2, 1080), (14, "A", 2, 1200), (18, "B", 3, 3000), (20, "A", 3, 1200),
        (24, "B", 4, 2760), (30, "B", 5, 1200), (38, "A", 6, 750),
    ],
}
SLOW_TABLE = {
    (2, 9, 4): [(6, 1, 31995), (12, 2, 33120), (18, 3, 11340), (24, 4, 7560), (30, 5, 2025)],
    (2, 10, 4): [
        (2, 0, 35700), (6, 1, 213375), (8, 1, 2550), (12, 2, 164235), (14, 2, 7650),
        (18, 3, 22725), (20, 3, 7650), (24, 4, 14325), (30, 5, 3750),
    ],
}
C1 = "exhaustive table rows reproduced exactly"


@criterion(1, C1)
@pytest.mark.parametrize("params", list(TABLE), ids=lambda p: "q%d_n%d_k%d" % p)
def test_c1_table_row(params):
    got = [(r.lambda2, r.N) for r in sweep(*params).records]
    assert got == [(lam2, N) for lam2, _, _, N in TABLE[params]]
    assert [(r.lambda2, r.case, r.r, r.N) for r in sweep(*params).records] == TABLE[params]


@criterion(1, C1)
@pytest.mark.slow
@pytest.mark.skipif(not SLOW, reason="long exhaustive row; set ORBITCODES_SLOW=1")
@pytest.mark.parametrize("params", list(SLOW_TABLE), ids=lambda p: "q%d_n%d_k%d" % p)
def test_c1_long_table_row(params):
    got = [(r.lambda2, r.r, r.N) for r in exhaustive_sweep(*params, SweepConfig(workers=os.cpu_count() or 1))]
    assert got == SLOW_TABLE[params]


# -- 2: the q=2, n=11, k=5 example --------------------------------------------

TRINOMIAL_11 = [1, 0, 1] + [0] * 8 + [1]
EXAMPLE_11 = {
    "U": ([0, 417, 1823, 1983, 64], (1343, 624, 60, 18)),
    "V": ([0, 1332, 468, 749, 1627], (1343, 600, 96, 6)),
}
W_BASIS = [0, 1618, 942, 1041, 1315]
C2 = "q=2, n=11, k=5 example profiles as stated"


@criterion(2, C2)
@pytest.mark.parametrize("name", ["U", "V"])
def test_c2_stated_profile(name):
    ctx = build_field(2, 1, 11, TRINOMIAL_11)
    basis, stated = EXAMPLE_11[name]
    U = span(ctx, basis)
    prof = intersection_distribution(U)
    assert fraction_set(U).f == 703
    # lambda_0 is asserted exactly as stated in the criterion, which expects 1343
    assert prof.lam == stated


@criterion(2, C2)
def test_c2_w_distance():
    ctx = build_field(2, 1, 11, TRINOMIAL_11)
    W = span(ctx, W_BASIS)
    prof = intersection_distribution(W)
    assert prof.ds == 6 == 2 * 5 - 4 and fraction_set(W).f == 703


# -- 3: the q=3, n=8, k=3 example ---------------------------------------------

C3 = "q=3, n=8, k=3 example for rho inside and outside F_81"


@criterion(3, C3)
def test_c3_rho_in_f81():
    ctx = build_field(3, 1, 8)
    c2, c4, d = ctx.cofactors[2], ctx.cofactors[4], ctx.d
    expect = sorted({(j * c4) % d for j in range(1, 40)})
    rhos = [j * c4 for j in range(1, 80) if (j * c4) % c2]
    assert len(rhos) >= 50
    for rho in rhos:
        U = span(ctx, [0, c2, rho])
        prof = intersection_distribution(U)
        assert prof.lam[1:] == (0, 39)
        assert intersection_classes(U)[2].tolist() == expect


@criterion(3, C3)
def test_c3_rho_outside_f81():
    ctx = build_field(3, 1, 8)
    c2, c4, d = ctx.cofactors[2], ctx.cofactors[4], ctx.d
    expect = sorted({(j * c2) % d for j in range(1, 4)})
    rng = np.random.default_rng(3081)
    rhos = [int(x) for x in rng.choice(ctx.N, 200, replace=False) if x % c4][:60]
    assert len(rhos) >= 50
    for rho in rhos:
        U = span(ctx, [0, c2, rho])
        prof = intersection_distribution(U)
        assert prof.lam[1:] == (144, 3)
        assert intersection_classes(U)[2].tolist() == expect


# -- 4: Sidon spaces in sweeps -------------------------------------------------

SIDON_PARAMS = [(2, n, k) for n in range(6, 11) for k in (3, 4) if k <= n / 2] + [(3, n, 3) for n in range(6, 9)]
C4 = "every swept Sidon space has the closed-form (lambda_0, lambda_1)"


@criterion(4, C4)
@pytest.mark.parametrize("params", SIDON_PARAMS, ids=lambda p: "q%d_n%d_k%d" % p)
def test_c4_sidon_census(params):
    cen = sidon_census(*params)
    assert cen.exceptions == 0
    if params == (2, 8, 4):
        # no Sidon 4-space exists in F_256; the structure sweep keeps its own tally
        assert cen.count == sweep(*params).sidon == 0
    else:
        assert cen.count > 0
    assert cen.expected == sidon_distribution(*params)
    for basis in cen.certificates:
        U = span(_field(params[0], params[1]), basis)
        assert is_sidon(U) and intersection_distribution(U).lam == cen.expected


# -- 5: identities on random subspaces -------------------------------------------

IDENTITY_PARAMS = [(2, 7, 3), (2, 8, 4), (3, 6, 3), (4, 5, 2), (2, 9, 3), (5, 4, 2)]
C5 = "counting identities and psi-preimage sizes on 1000+ random subspaces"


def _structured(ctx, k, rng):
    """A few subspaces with t > 1 so the t | i part of the psi check is exercised."""
    out = []
    for t in ctx.divisors:
        if 1 < t <= k and k % t == 0:
            c = ctx.cofactors[t]
            for _ in range(3):
                gens = [int(x) for x in rng.integers(0, ctx.N, k // t)]
                gens[0] = 0
                basis = [(g + j * c) % ctx.N for g in gens for j in range(t)]
                out.append(span(ctx, basis))
    return [U for U in out if U.k == k]


@criterion(5, C5)
@pytest.mark.parametrize("params", IDENTITY_PARAMS, ids=lambda p: "q%d_n%d_k%d" % p)
def test_c5_identities(params):
    q, n, k = params
    ctx = _field(q, n)
    rng = np.random.default_rng(q * 100 + n * 10 + k)
    structured = _structured(ctx, k, rng)
    subs = [random_containing_one(ctx, k, [q, n, k, i]) for i in range(170)] + structured
    seen_t = set()
    for U in subs:
        prof = intersection_distribution(U)
        frac = fraction_set(U)
        t = stabilizer(U).t
        seen_t.add(t)
        assert counting_identities(prof, frac).passed
        assert gen_sidon_check(U).passed
        allowed = {proj_size(q, i) for i in range(1, k + 1) if i % t == 0} | {proj_size(q, k)}
        pre = psi_preimages(U)
        assert set(pre.values()) <= allowed
        assert sum(pre.values()) == proj_size(q, k) ** 2
        assert len(pre) == frac.f
        assert verify_psi_preimages(U).passed
    assert len(subs) >= 170
    assert seen_t != {1} or not structured


# -- 6: oracle equivalence -------------------------------------------------------

ORACLE_PARAMS = [(2, 1, 6, 3), (2, 1, 8, 3), (3, 1, 5, 2), (2, 2, 4, 2), (2, 1, 9, 4)]
C6 = "fraction-restricted distribution equals the independent all-shifts oracle"


@criterion(6, C6)
@pytest.mark.parametrize("params", ORACLE_PARAMS, ids=lambda p: "p%d_e%d_n%d_k%d" % p)
def test_c6_oracle(params):
    p, e, n, k = params
    ctx = build_field(p, e, n)
    for i in range(100):
        U = random_containing_one(ctx, k, [p, e, n, k, i])
        prof = intersection_distribution(U)
        assert (prof.t, prof.lam) == distribution_from_polynomials(p, e, ctx.spec.modulus, U.basis)


# -- 7: phi action -----------------------------------------------------------------

C7 = "phi-action partition and its class and subfield properties"


@criterion(7, C7)
@pytest.mark.parametrize("q", [2, 3])
def test_c7_partition(q):
    for n in range(2, 11):
        ctx = build_field(q, 1, n)
        parts = phi_partition(ctx)
        assert len(parts) == (q ** (n - 1) - 1) // (q - 1)
        assert all(len(set(x)) == q for x in parts)
        assert sorted(c for x in parts for c in x) == list(range(1, ctx.d))


@criterion(7, C7)
@pytest.mark.parametrize("q", [2, 3])
def test_c7_properties(q):
    for n in range(2, 7):
        ctx = build_field(q, 1, n)
        M = phi_class_matrix(ctx)
        for a in range(1, ctx.N):
            if ctx.in_subfield(a, 1):
                continue
            orb = phi_orbit(ctx, a)
            # the projectivized orbit depends only on the class of a
            assert orb.proj_members == tuple(sorted(M[a % ctx.d - 1].tolist()))
            for t in ctx.divisors:
                inside = ctx.in_subfield(a, t)
                assert all(ctx.in_subfield(b, t) == inside for b in orb.members)


# -- 8: structure checks on every filtered subspace -----------------------------

STRUCT_PARAMS = [(2, 6, 3), (2, 7, 3), (2, 8, 3), (3, 6, 3), (3, 7, 3), (3, 8, 3)]
C8 = "A_V sizes, field-shift uniqueness and lambda_2 decomposition on every filtered subspace"


@criterion(8, C8)
@pytest.mark.parametrize("params", STRUCT_PARAMS, ids=lambda p: "q%d_n%d_k%d" % p)
def test_c8_structure(params):
    # the sweep runs the verified analysis on each filtered subspace and raises on any failed check
    q = params[0]
    res = sweep(*params)
    assert res.filtered == sum(r.N for r in res.records) > 0
    for r in res.records:
        assert r.lambda2 == q * (r.case == "A") + r.r * q * (q + 1)
        assert r.lambda2 % (q * (q + 1)) in (0, q)


@criterion(8, C8)
def test_c8_sample_reanalysed():
    ctx = build_field(3, 1, 7)
    hits = 0
    for i in range(400):
        U = random_containing_one(ctx, 3, [8, i])
        prof = intersection_distribution(U)
        if prof.t == 1 and prof.ds == 2:
            res = analyze_2dim(U, prof)
            assert res.checks.passed, res.checks.failures
            assert all(len(fam.members) == 4 for fam in res.families)
            hits += 1
    assert hits > 0


# -- 9: union of two Sidon orbits --------------------------------------------------

C9 = "union of a searched two-space Sidon pair matches the closed form"


@criterion(9, C9)
@pytest.mark.parametrize("params", [(2, 8, 3), (3, 7, 3)], ids=lambda p: "q%d_n%d_k%d" % p)
def test_c9_union(params):
    q, n, k = params
    ctx = _field(q, n)
    U, V = sidon_pair_search(ctx, k, seed=2024)
    assert is_sidon(U) and is_sidon(V) and two_space_sidon(U, V)
    assert verify_union_theorem([U, V]).passed
    code = union_distribution([U, V])
    assert code.lam == union_closed_form(q, n, k, 2)
    assert code.size == 2 * proj_size(q, n)
    assert code.ds == 2 * k - 2


# -- 10: determinism -----------------------------------------------------------------

C10 = "records invariant under worker count and primitive modulus"


@criterion(10, C10)
@pytest.mark.parametrize("params", [(2, 8, 3), (3, 6, 3)], ids=lambda p: "q%d_n%d_k%d" % p)
def test_c10_determinism(params):
    q, n, k = params
    base = exhaustive_sweep(q, n, k, SweepConfig(workers=1))
    assert exhaustive_sweep(q, n, k, SweepConfig(workers=max(2, os.cpu_count() or 1), checkpoint_interval=4096)) == base
    polys = list(primitive_polynomials(q, n))
    assert polys[0] != polys[-1]
    assert exhaustive_sweep(q, n, k, modulus=polys[0]) == base
    assert exhaustive_sweep(q, n, k, modulus=polys[-1]) == base


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
