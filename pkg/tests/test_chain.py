import json
from fractions import Fraction as F
from math import factorial

import pytest

from hopfchains.chain import (
    Distribution,
    build_transition_matrix,
    distribution_to_dict,
    evolve,
    expectation,
    is_stationary,
    lumping_check,
    matrix_to_csv,
    matrix_to_dict,
    point_mass,
    stationary_distributions,
    uniform_distribution,
)
from hopfchains.forests import forest_algebra, parse_forest
from hopfchains.hopf import LinComb, apply_cpp, beta_n, eta
from hopfchains.presets import (
    riffle_spec,
    top_or_bottom_spec,
    top_to_random_spec,
    trinomial_spec,
)
from hopfchains.shuffle import (
    Word,
    deck_from_string,
    descent_peak_sets,
    distinct_deck,
    rearrangement_class,
)


def _class_chain(n, spec_fn):
    alg, deck = distinct_deck(n)
    states = rearrangement_class(alg, deck)
    return alg, deck, build_transition_matrix(alg, spec_fn(n), states=states)


def test_top_to_random_row():
    _, deck, K = _class_chain(3, top_to_random_spec)
    row = {str(s): p for s, p in K.row_of(deck).items()}
    assert row == {"123": F(1, 3), "213": F(1, 3), "231": F(1, 3)}


def test_repeated_deck_row():
    alg, deck = deck_from_string("aab")
    states = rearrangement_class(alg, deck)
    K = build_transition_matrix(alg, top_to_random_spec(3), states=states)
    row = {str(s): p for s, p in K.row_of(deck).items()}
    assert row == {"aab": F(2, 3), "aba": F(1, 3)}


def test_rows_sum_to_one_across_presets():
    for spec_fn in (top_to_random_spec, riffle_spec, lambda n: top_or_bottom_spec(n, F(1, 3))):
        _, _, K = _class_chain(4, spec_fn)
        for row in K.kernel.entries:
            assert sum(row) == 1
            assert all(p >= 0 for p in row)


def test_doob_identity_directly():
    # row sums of the unscaled operator, weighted by the rescaling constants
    alg, deck = distinct_deck(4)
    spec = riffle_spec(4)
    beta = beta_n(spec)
    for x in rearrangement_class(alg, deck)[:6]:
        image = apply_cpp(alg, LinComb.single(x), spec)
        lhs = sum(c * eta(alg, y) for y, c in image.items())
        assert lhs == beta * eta(alg, x)


def test_state_space_closure_enforced():
    alg, deck = distinct_deck(3)
    states = rearrangement_class(alg, deck)
    with pytest.raises(ValueError):
        build_transition_matrix(alg, top_to_random_spec(3), states=states[:3])


def test_max_states_cap():
    alg, deck = distinct_deck(5)
    states = rearrangement_class(alg, deck)
    with pytest.raises(ValueError):
        build_transition_matrix(alg, top_to_random_spec(5), states=states, max_states=100)


def test_evolve_basics():
    _, deck, K = _class_chain(3, top_to_random_spec)
    start = point_mass(K, deck)
    assert evolve(K, start, 0).weights == start.weights
    one = evolve(K, start, 1)
    assert {str(s): p for s, p in zip(one.states, one.weights) if p} == {
        "123": F(1, 3),
        "213": F(1, 3),
        "231": F(1, 3),
    }
    with pytest.raises(ValueError):
        evolve(K, start, -1)


def test_distribution_validation():
    _, deck, K = _class_chain(3, top_to_random_spec)
    with pytest.raises(ValueError):
        Distribution(states=K.states, weights=[F(1)] * 6)
    with pytest.raises(ValueError):
        Distribution(states=K.states, weights=[F(-1)] + [F(1, 3)] * 5 + [F(1, 3)])


def test_expectation_constant_and_linearity():
    _, deck, K = _class_chain(3, top_to_random_spec)
    start = point_mass(K, deck)
    for t in range(4):
        assert expectation(K, start, t, lambda s: F(1)) == 1
    stat_a = lambda s: F(len(descent_peak_sets(s, "123").descents))
    stat_b = lambda s: F(1, 2)
    combo = lambda s: 3 * stat_a(s) + stat_b(s)
    got = expectation(K, start, 2, combo)
    want = 3 * expectation(K, start, 2, stat_a) + expectation(K, start, 2, stat_b)
    assert got == want


def test_stationary_uniform_on_distinct_decks():
    for n in (3, 4):
        alg, deck = distinct_deck(n)
        states = rearrangement_class(alg, deck)
        (pi,) = stationary_distributions(alg, n, states=states)
        assert all(wt == F(1, factorial(n)) for wt in pi.weights)


def test_stationary_repeated_deck():
    alg, deck = deck_from_string("aab")
    states = rearrangement_class(alg, deck)
    (pi,) = stationary_distributions(alg, 3, states=states)
    assert all(wt == F(1, 3) for wt in pi.weights)


def test_stationary_fixed_by_every_spec():
    alg, deck = distinct_deck(4)
    states = rearrangement_class(alg, deck)
    pis = stationary_distributions(alg, 4, states=states)
    for spec in (top_to_random_spec(4), riffle_spec(4), trinomial_spec(4, F(1, 4), F(1, 2), F(1, 4))):
        K = build_transition_matrix(alg, spec, states=states)
        for pi in pis:
            assert is_stationary(K, pi)


def test_stationary_full_word_space_splits_by_content():
    # one law per letter multiset; disjoint supports make them independent
    alg, _ = deck_from_string("ab")
    pis = stationary_distributions(alg, 3)
    assert len(pis) == 4
    supports = [frozenset(str(s) for s, wt in zip(pi.states, pi.weights) if wt) for pi in pis]
    assert len(set(supports)) == 4
    K = build_transition_matrix(alg, riffle_spec(3))
    for pi in pis:
        assert is_stationary(K, pi)


def test_stationary_forest_point_mass():
    falg = forest_algebra()
    (pi,) = stationary_distributions(falg, 2)
    assert distribution_to_dict(pi) == {"()()": "1"}
    spec = top_to_random_spec(2)
    K = build_transition_matrix(falg, spec)
    assert is_stationary(K, pi)
    # the two-vertex chain absorbs into the all-dots forest
    path = parse_forest("(())")
    assert K.row_of(path) == {parse_forest("()()"): F(1)}


def test_lumping_identity_and_constant():
    _, deck, K = _class_chain(3, top_to_random_spec)
    res = lumping_check(K, lambda s: str(s))
    assert res.ok and res.quotient.size == K.size
    res = lumping_check(K, lambda s: "all")
    assert res.ok and res.quotient.size == 1
    assert res.quotient.kernel.entries == ((F(1),),)


def test_lumping_descents_under_riffle():
    alg, deck = distinct_deck(4)
    states = rearrangement_class(alg, deck)
    K = build_transition_matrix(alg, riffle_spec(4), states=states)
    res = lumping_check(K, lambda s: tuple(sorted(descent_peak_sets(s, alg.alphabet).descents)))
    assert res.ok
    assert res.quotient.size == 8
    for row in res.quotient.kernel.entries:
        assert sum(row) == 1


def test_lumping_failure_produces_witness():
    _, deck, K = _class_chain(3, top_to_random_spec)
    # first letter is not a Markov statistic for this chain
    res = lumping_check(K, lambda s: s.letters[0])
    assert not res.ok
    x, x2, label_class = res.witness
    assert x.letters[0] == x2.letters[0]


def test_exports():
    _, deck, K = _class_chain(3, top_to_random_spec)
    csv_text = matrix_to_csv(K)
    lines = csv_text.strip().split("\n")
    assert lines[0] == "state,123,132,213,231,312,321"
    assert len(lines) == 7
    data = matrix_to_dict(K)
    assert data["beta"] == "3"
    assert json.dumps(data)  # serialisable
    assert data["rows"][0][0] == "1/3"

    dist = uniform_distribution(K)
    assert distribution_to_dict(dist)["123"] == "1/6"
