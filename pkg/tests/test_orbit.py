import numpy as np
import pytest

from orbitcodes.exceptions import PreconditionError
from orbitcodes.gf_tower import build_field
from orbitcodes.orbit import (
    Q_value,
    counting_identities,
    fraction_set,
    gen_sidon_check,
    intersection_classes,
    intersection_distribution,
    is_sidon,
    lambda_from_f,
    proj_size,
    psi_preimages,
    sidon_certificate,
    sidon_distribution,
    verify_psi_preimages,
)
from orbitcodes.subspace import random_containing_one, span, subfield_subspace

from oracles import distribution_bruteforce

TRINOMIAL_11 = [1, 0, 1] + [0] * 8 + [1]


@pytest.fixture(scope="module")
def f2048():
    return build_field(2, 1, 11, TRINOMIAL_11)


def _example_spaces(ctx):
    U = span(ctx, [0, 417, 1823, 1983, 64])
    V = span(ctx, [0, 1332, 468, 749, 1627])
    W = span(ctx, [0, 1618, 942, 1041, 1315])
    return U, V, W


def test_k5_fixtures_in_2048(f2048):
    U, V, W = _example_spaces(f2048)
    pu, pv, pw = (intersection_distribution(X) for X in (U, V, W))
    assert pu.lam[1:] == (624, 60, 18) and pu.ds == 4 and pu.t == 1
    assert pv.lam[1:] == (600, 96, 6) and pv.ds == 4
    assert pw.lam[1:] == (588, 114) and pw.ds == 6
    for X in (U, V, W):
        assert fraction_set(X).f == 703


def test_lambda0_is_the_complement_count(f2048):
    # lambda_0 is what remains of the d - s non-stabilizer classes
    U, V, _ = _example_spaces(f2048)
    for X in (U, V):
        prof = intersection_distribution(X)
        assert sum(prof.lam) == f2048.d - 1
        assert prof.lam[0] == 1344


def test_distribution_matches_bruteforce_shift_scan():
    rng = np.random.default_rng(11)
    for p, e, n, k in [(2, 1, 7, 3), (3, 1, 5, 2), (2, 2, 4, 2), (2, 1, 8, 4), (2, 1, 6, 3)]:
        ctx = build_field(p, e, n)
        for _ in range(8):
            U = random_containing_one(ctx, k, rng.integers(1 << 31))
            t, lam = distribution_bruteforce(ctx, U)
            prof = intersection_distribution(U)
            assert prof.t == t and prof.lam == lam


def test_profile_derived_fields():
    ctx = build_field(2, 1, 8)
    U = span(ctx, [0, 1, 2, 3])
    prof = intersection_distribution(U)
    assert prof.orbit_size == (2**8 - 1) // (2**prof.t - 1)
    assert prof.ds == 2 * (prof.k - prof.ell)
    assert all(prof.delta[2 * (prof.k - i)] * prof.s == prof.lam[i] for i in range(prof.ell + 1))
    d = prof.to_dict()
    assert d["lambda"] == list(prof.lam) and d["delta"]


@pytest.mark.parametrize("p,e,n,k", [(2, 1, 7, 3), (2, 1, 8, 4), (3, 1, 6, 3), (2, 2, 4, 2), (5, 1, 4, 2), (2, 1, 12, 4)])
def test_counting_identities_hold(p, e, n, k):
    ctx = build_field(p, e, n)
    rng = np.random.default_rng(p * 1000 + n * 10 + k)
    for _ in range(25):
        U = random_containing_one(ctx, k, rng.integers(1 << 31))
        prof = intersection_distribution(U)
        frac = fraction_set(U)
        rep = counting_identities(prof, frac)
        assert rep.passed, rep.failures
        assert gen_sidon_check(U).passed
        assert verify_psi_preimages(U).passed


def test_identities_with_nontrivial_stabilizer():
    ctx = build_field(2, 1, 12)
    w = ctx.cofactors[2]
    U = span(ctx, [0, w, 5, (5 + w) % ctx.N])  # an F_4-space
    prof = intersection_distribution(U)
    assert prof.t == 2
    assert counting_identities(prof, fraction_set(U)).passed
    rep = gen_sidon_check(U)
    assert rep.passed, rep.failures
    # t = k/2: f = (q^{3k/2}-1)/(q-1)
    assert fraction_set(U).f == proj_size(2, 6)


def test_psi_preimage_sizes_are_projective_space_sizes():
    ctx = build_field(3, 1, 6)
    U = random_containing_one(ctx, 3, 3)
    allowed = {proj_size(3, i) for i in range(1, 4)}
    assert set(psi_preimages(U).values()) <= allowed
    assert sum(psi_preimages(U).values()) == proj_size(3, 3) ** 2


def test_spread_profile():
    ctx = build_field(3, 1, 6)
    S = subfield_subspace(ctx, 3)
    prof = intersection_distribution(S)
    assert prof.t == 3 and prof.ell == 0 and prof.lam == (ctx.d - 13,)
    assert prof.ds == 6 and fraction_set(S).f == 13
    assert gen_sidon_check(S).passed


def test_sidon_closed_form_and_certificates():
    assert sidon_distribution(2, 6, 3) == (20, 42)
    ctx = build_field(2, 1, 7)
    found = 0
    for i in range(60):
        U = random_containing_one(ctx, 3, [7, i])
        cert = sidon_certificate(U)
        assert cert.agree
        if cert.by_definition:
            found += 1
            prof = intersection_distribution(U)
            assert prof.lam == sidon_distribution(2, 7, 3)
            assert fraction_set(U).f == Q_value(2, 3) + 1
    assert found > 0


def test_every_full_length_2_space_is_sidon():
    ctx = build_field(3, 1, 5)
    for i in range(30):
        U = random_containing_one(ctx, 2, [1, i])
        assert is_sidon(U) == (intersection_distribution(U).t == 1)


def test_lambda_from_f():
    assert lambda_from_f(2, 5, 703) == (588, 114)
    assert lambda_from_f(2, 4, 187) == (174, 12)
    with pytest.raises(ValueError):
        lambda_from_f(2, 4, 188)
    with pytest.raises(ValueError):
        lambda_from_f(3, 3, 2)
    with pytest.raises(ValueError):
        lambda_from_f(3, 3, 30)


def test_lambda_from_f_on_sampled_2k4_spaces():
    ctx = build_field(2, 1, 8)
    hits = 0
    for i in range(80):
        U = random_containing_one(ctx, 4, [2, i])
        prof = intersection_distribution(U)
        if prof.t == 1 and prof.ds == 4:
            hits += 1
            assert lambda_from_f(2, 4, fraction_set(U).f) == prof.lam[1:3]
    assert hits > 10


def test_intersection_classes_cover_fraction_set():
    ctx = build_field(2, 1, 9)
    U = random_containing_one(ctx, 3, 99)
    cls = intersection_classes(U)
    frac = fraction_set(U)
    joined = np.sort(np.concatenate([np.array([0])] + list(cls.values())))
    assert np.array_equal(joined, frac.fractions)


def test_preconditions():
    ctx = build_field(2, 1, 6)
    with pytest.raises(PreconditionError):
        intersection_distribution(span(ctx, [0, 1, 2, 3]))
    with pytest.raises(PreconditionError):
        sidon_certificate(span(ctx, [0]))
    with pytest.raises(PreconditionError):
        sidon_distribution(2, 5, 3)


def test_example_lambda0_from_independent_oracle():
    # the example is sometimes quoted with lambda_0 = 1343; both routes give 1344 = d - 1 - (f - 1)
    from oracles import distribution_from_polynomials

    t, lam = distribution_from_polynomials(2, 1, TRINOMIAL_11, [0, 417, 1823, 1983, 64])
    assert t == 1 and lam == (1344, 624, 60, 18)
