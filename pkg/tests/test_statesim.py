import math

import pytest
from hypothesis import assume, given, settings

from qubitjm.construction import construct_joint
from qubitjm.core import Vec3, pair_context
from qubitjm.criteria import thm1_margin
from qubitjm.statesim import (
    QubitState,
    empirical_marginal_check,
    marginal_probability,
    outcome_probabilities,
    qubit_state,
    sample_outcomes,
)

from conftest import obs, pairs

PAIR = (obs(0, (0.7, 0, 0)), obs(0, (0, 0.7, 0)))
MIXED = qubit_state((0, 0, 0))


def test_state_validation():
    qubit_state((1, 0, 0))
    with pytest.raises(ValueError):
        qubit_state((1.0, 0.1, 0))


def test_mixed_state_probabilities_are_c0():
    j = construct_joint(*PAIR)
    p = outcome_probabilities(j, MIXED)
    assert all(v == pytest.approx(0.25) for v in p.values())
    a, b = obs(0.2, (0.3, 0.1, 0)), obs(-0.1, (0.0, 0.4, 0.2))
    j = construct_joint(a, b)
    for k, v in outcome_probabilities(j, MIXED).items():
        assert v == j[k].c0


@settings(max_examples=200)
@given(pairs)
def test_marginals_and_affinity(p):
    a, b = p
    assume(thm1_margin(pair_context(a, b)) >= 0)
    j = construct_joint(a, b)
    r = Vec3(0.3, -0.5, 0.6)
    probs = outcome_probabilities(j, QubitState(r))
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(-1e-12 <= v <= 1 + 1e-12 for v in probs.values())
    for mu in (1, -1):
        row = probs[mu, 1] + probs[mu, -1]
        assert row == pytest.approx(marginal_probability(a, mu, QubitState(r)), abs=1e-12)
        assert row == pytest.approx((1 + mu * a.x + mu * a.m.dot(r)) / 2, abs=1e-12)
    pp = outcome_probabilities(j, QubitState(r))
    pm = outcome_probabilities(j, QubitState(-r))
    p0 = outcome_probabilities(j, MIXED)
    for k in p0:
        assert p0[k] == pytest.approx((pp[k] + pm[k]) / 2, abs=1e-14)


def test_sampling_is_deterministic_and_complete():
    j = construct_joint(*PAIR)
    c1 = sample_outcomes(j, MIXED, 1000, seed=11)
    c2 = sample_outcomes(j, MIXED, 1000, seed=11)
    assert c1 == c2 and sum(c1.values()) == 1000
    assert sample_outcomes(j, MIXED, 0, seed=1) == {k: 0 for k in c1}


def test_uniform_sampling_within_four_sigma():
    j = construct_joint(*PAIR)
    n = 10 ** 6
    counts = sample_outcomes(j, MIXED, n, seed=3)
    sigma = math.sqrt(n * 0.25 * 0.75)
    assert all(abs(c - n / 4) <= 4 * sigma for c in counts.values())
    assert empirical_marginal_check(counts, *PAIR, MIXED).max_abs_z <= 4


def test_broken_marginals_are_detected():
    j = construct_joint(obs(0.2, (0.5, 0, 0)), obs(0, (0, 0.3, 0)))
    a, b = obs(0.2, (0.5, 0, 0)), obs(0, (0, 0.3, 0))
    counts = sample_outcomes(j, MIXED, 10 ** 5, seed=5)
    swapped = {(mu, nu): counts[-mu, nu] for mu, nu in counts}
    assert empirical_marginal_check(counts, a, b, MIXED).passed
    assert not empirical_marginal_check(swapped, a, b, MIXED).passed


def test_eigenstate_of_sharp_observable():
    a, b = obs(0, (1, 0, 0)), obs(0, (0.4, 0, 0))
    j = construct_joint(a, b)
    st = qubit_state((1, 0, 0))
    counts = sample_outcomes(j, st, 10 ** 4, seed=2)
    rep = empirical_marginal_check(counts, a, b, st)
    assert rep.frequencies["A+"] == 1.0
    assert rep.z_scores["A+"] == 0.0


def test_x_polarised_state_marginal():
    j = construct_joint(*PAIR)
    st = qubit_state((1, 0, 0))
    counts = sample_outcomes(j, st, 10 ** 5, seed=9)
    rep = empirical_marginal_check(counts, *PAIR, st)
    assert rep.expected["A+"] == pytest.approx(0.85)
    assert rep.frequencies["A+"] == pytest.approx(0.85, abs=0.01)
    assert rep.passed
