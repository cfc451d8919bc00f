import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eberlein.errors import DomainError, FitFailure, InvalidInput, Underdetermined
from eberlein.semigroup import (DiscSemicharacter, DualKind, NumericalSemigroup, bezout,
                                classify_dual, conductor, eval_disc, fit_semicharacter, gcd_of,
                                member)


def sieve_conductor(gens):
    """Oracle: reachability table far past the Schur bound."""
    d = math.gcd(*gens)
    limit = 4 * max(gens) ** 2 // d + 4 * max(gens)
    reach = np.zeros(limit + 1, dtype=bool)
    reach[0] = True
    for k in range(1, limit + 1):
        reach[k] = any(k >= g and reach[k - g] for g in gens)
    multiples = np.arange(0, limit + 1, d)
    gaps = multiples[~reach[multiples]]
    return int(gaps.max()) + d if gaps.size else d


disc_points = st.builds(lambda r, t: math.sqrt(r) * cmath.exp(2j * math.pi * t),
                        st.floats(0, 1), st.floats(0, 1))
generator_sets = st.lists(st.integers(1, 40), min_size=1, max_size=4)


@pytest.mark.parametrize("gens, d", [((3,), 3), ((4, 6), 2), ((6, 10, 15), 1)])
def test_gcd_examples(gens, d):
    assert gcd_of(NumericalSemigroup(gens)) == d


@pytest.mark.parametrize("gens, c", [((2, 3), 2), ((3, 5), 8), ((7,), 7), ((4, 6), 4), ((6, 10, 15), 30)])
def test_conductor_examples(gens, c):
    assert conductor(NumericalSemigroup(gens)) == c


def test_membership_examples():
    S = NumericalSemigroup((3, 5))
    assert not member(S, 7)
    assert member(S, 8)
    assert 0 not in S
    assert member(NumericalSemigroup((2, 3), include_zero=True), 0)
    assert S.members_upto(10) == [3, 5, 6, 8, 9, 10]


def test_zero_generator_is_folded_into_include_zero():
    S = NumericalSemigroup((0, 2, 3))
    assert S.include_zero and S.generators == (2, 3)


@pytest.mark.parametrize("gens", [(), (0,), (0, 0)])
def test_no_positive_generator_is_rejected(gens):
    with pytest.raises(InvalidInput):
        NumericalSemigroup(gens)


def test_negative_or_fractional_generator_is_rejected():
    with pytest.raises(InvalidInput):
        NumericalSemigroup((3, -5))
    with pytest.raises(InvalidInput):
        NumericalSemigroup((2.5, 3))


@settings(max_examples=60, deadline=None)
@given(generator_sets)
def test_conductor_matches_sieve_and_respects_coarse_bound(gens):
    S = NumericalSemigroup(tuple(gens))
    assert S.conductor == sieve_conductor(S.generators)
    assert S.conductor <= S.coarse_bound()
    assert S.conductor % S.d == 0


@given(st.lists(st.integers(1, 500), min_size=1, max_size=5))
def test_bezout_identity(values):
    g, m = bezout(values)
    assert g == math.gcd(*values)
    assert sum(a * b for a, b in zip(values, m)) == g


def test_eval_examples():
    S = NumericalSemigroup((2, 3))
    assert eval_disc(DiscSemicharacter(1), S, 7) == 1
    assert eval_disc(DiscSemicharacter(0), S, 5) == 0
    assert eval_disc(DiscSemicharacter(1j), NumericalSemigroup((2, 4)), 6) == pytest.approx(-1j)
    assert eval_disc(DiscSemicharacter(0.5), S, 4) == 0.0625
    assert eval_disc(DiscSemicharacter(0.3), NumericalSemigroup((2, 3), True), 0) == 1
    assert eval_disc(DiscSemicharacter(zero_flag=True), S, 9) == 0


def test_eval_outside_semigroup_is_a_domain_error():
    with pytest.raises(DomainError):
        eval_disc(DiscSemicharacter(0.5), NumericalSemigroup((3, 5)), 7)


def test_semicharacter_outside_disc_is_rejected():
    with pytest.raises(DomainError):
        DiscSemicharacter(1.01)


@settings(max_examples=50, deadline=None)
@given(disc_points, st.sampled_from([(2, 3), (3, 5), (4, 6), (6, 10, 15)]))
def test_multiplicative_contractive_involutive(z, gens):
    S = NumericalSemigroup(gens)
    sig, conj = DiscSemicharacter(z), DiscSemicharacter(z.conjugate())
    members = S.members_upto(S.conductor + 10)
    vals = {s: eval_disc(sig, S, s) for s in members}
    for s in members:
        assert abs(vals[s]) <= 1
        assert vals[s].conjugate() == eval_disc(conj, S, s)
        for t in members:
            if s + t in vals:
                assert abs(vals[s + t] - vals[s] * vals[t]) <= 1e-12 * max(1.0, abs(vals[s + t]))


def test_classification():
    assert classify_dual(NumericalSemigroup((0, 2, 3))).kind is DualKind.FULL_DISC
    rep = classify_dual(NumericalSemigroup((2, 3)))
    assert rep.kind is DualKind.PUNCTURED_DISC and rep.zero_adjoined
    assert rep.describe() == "PuncturedDisc, d=1, conductor=2"


def test_fit_bezout_example():
    sig, res = fit_semicharacter(NumericalSemigroup((2, 3)), [(2, 0.25), (3, 0.125)])
    assert sig.z == pytest.approx(0.5, abs=1e-15) and res <= 1e-15


def test_fit_rejects_values_outside_the_family():
    with pytest.raises(FitFailure) as info:
        fit_semicharacter(NumericalSemigroup((2, 3)), [(2, 0.25), (3, 0.5)])
    assert info.value.max_residual > 0


def test_fit_all_zero_gives_zero_functional():
    sig, _ = fit_semicharacter(NumericalSemigroup((2, 3)), [(2, 0), (3, 0), (5, 0)])
    assert sig.zero_flag


def test_fit_all_zero_with_identity_gives_z_zero():
    sig, _ = fit_semicharacter(NumericalSemigroup((0, 2, 3)), [(0, 1), (2, 0), (3, 0)])
    assert not sig.zero_flag and sig.z == 0


def test_fit_needs_points_reaching_the_gcd():
    with pytest.raises(Underdetermined):
        fit_semicharacter(NumericalSemigroup((2, 3)), [(2, 0.25), (4, 0.0625)])
    with pytest.raises(Underdetermined):
        fit_semicharacter(NumericalSemigroup((2, 3), True), [(0, 1)])


def test_fit_rejects_points_outside_the_semigroup():
    with pytest.raises(DomainError):
        fit_semicharacter(NumericalSemigroup((3, 5)), [(7, 0.1)])


def test_fit_without_adjacent_pair_uses_bezout_combination():
    S = NumericalSemigroup((6, 10, 15))
    z = 0.9 * cmath.exp(0.7j)
    samples = [(s, eval_disc(DiscSemicharacter(z), S, s)) for s in (6, 10, 15)]
    sig, res = fit_semicharacter(S, samples)
    assert abs(sig.z - z) <= 1e-12 and res <= 1e-12


@settings(max_examples=50, deadline=None)
@given(disc_points, st.sampled_from([(2, 3), (3, 5), (4, 6), (6, 10, 15)]))
def test_fit_round_trip(z, gens):
    S = NumericalSemigroup(gens)
    samples = [(s, eval_disc(DiscSemicharacter(z), S, s)) for s in S.members_upto(S.conductor + 12)]
    sig, res = fit_semicharacter(S, samples, tol=1e-10)
    assert res <= 1e-10
    for s, v in samples:
        assert abs(eval_disc(sig, S, s) - v) <= 1e-10
