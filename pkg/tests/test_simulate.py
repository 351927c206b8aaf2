from fractions import Fraction as F

import pytest

from hopfchains.chain import build_transition_matrix, expectation, point_mass
from hopfchains.presets import (
    biased_spec,
    riffle_spec,
    top_m_ordered_spec,
    top_m_unordered_spec,
    top_or_bottom_spec,
    top_to_random_spec,
    trinomial_spec,
)
from hopfchains.shuffle import (
    Word,
    distinct_deck,
    rearrangement_class,
    weighted_descent_stat,
)
from hopfchains.simulate import (
    RngStream,
    cut_and_drop,
    empirical_row_check,
    gsr_stepper,
    run_trajectories,
    sample_composition,
    sample_trajectory,
)

SEED = 1234


def test_rng_streams_are_independent_and_reproducible():
    a = [RngStream(7, 0).randbelow(1000) for _ in range(5)]
    b = [RngStream(7, 0).randbelow(1000) for _ in range(5)]
    c = [RngStream(7, 1).randbelow(1000) for _ in range(5)]
    assert a == b
    assert a != c


def test_rng_randbelow_bounds():
    rng = RngStream(3, 0)
    draws = [rng.randbelow(7) for _ in range(2000)]
    assert set(draws) <= set(range(7))
    assert set(draws) == set(range(7))
    with pytest.raises(ValueError):
        rng.randbelow(0)


def test_sample_composition_point_mass():
    spec = top_to_random_spec(5)
    rng = RngStream(SEED, 0)
    for _ in range(50):
        assert sample_composition(spec, rng) == (1, 4)


def test_sample_composition_coin_flip_frequencies():
    spec = top_or_bottom_spec(4, F(1, 2))
    rng = RngStream(SEED, 0)
    n_draws = 100_000
    hits = sum(sample_composition(spec, rng) == (1, 3) for _ in range(n_draws))
    sigma = (n_draws * 0.25) ** 0.5
    assert abs(hits - n_draws / 2) < 3 * sigma


def test_sample_composition_riffle_law():
    spec = riffle_spec(3)
    rng = RngStream(SEED, 0)
    n_draws = 60_000
    counts = {}
    for _ in range(n_draws):
        comp = sample_composition(spec, rng)
        counts[comp] = counts.get(comp, 0) + 1
    expected = {(3,): F(2, 8), (1, 2): F(3, 8), (2, 1): F(3, 8)}
    for comp, p in expected.items():
        sigma = (n_draws * float(p) * (1 - float(p))) ** 0.5
        assert abs(counts.get(comp, 0) - n_draws * float(p)) < 3 * sigma


def test_cut_and_drop_single_pile_is_identity():
    deck = Word("1234")
    for trial in range(20):
        assert cut_and_drop(deck, (4,), RngStream(SEED, trial)) == deck


def test_cut_and_drop_top_to_random_insertion():
    # cutting (1, n-1) and dropping proportionally inserts the old top card
    # uniformly: over many trials all 4 insertion positions appear
    deck = Word("1234")
    rng = RngStream(SEED, 0)
    seen = {str(cut_and_drop(deck, (1, 3), rng)) for _ in range(500)}
    assert seen == {"1234", "2134", "2314", "2341"}


def test_cut_and_drop_rejects_bad_composition():
    with pytest.raises(ValueError):
        cut_and_drop(Word("123"), (1, 1), RngStream(0, 0))


def test_gsr_top_to_random_marginal():
    alg, deck = distinct_deck(3)
    states = rearrangement_class(alg, deck)
    spec = top_to_random_spec(3)
    K = build_transition_matrix(alg, spec, states=states)
    check = empirical_row_check(K, deck, trials=60_000, seed=SEED, stepper=gsr_stepper(spec))
    assert not check.over_4_sigma
    assert check.chi_square < check.chi_square_limit


@pytest.mark.parametrize(
    "label,spec_fn",
    [
        ("riffle2", lambda n: riffle_spec(n, 2)),
        ("riffle3", lambda n: riffle_spec(n, 3)),
        ("biased", lambda n: biased_spec(n, (F(1, 3), F(2, 3)))),
        ("top-m-ordered", lambda n: top_m_ordered_spec(n, 2)),
        ("top-m-unordered", lambda n: top_m_unordered_spec(n, 2)),
        ("top-or-bottom", lambda n: top_or_bottom_spec(n, F(1, 2))),
        ("trinomial", lambda n: trinomial_spec(n, F(1, 4), F(1, 2), F(1, 4))),
    ],
)
def test_gsr_marginal_equivalence_all_presets(label, spec_fn):
    # cut-and-drop sampling must realise the exact matrix row
    for n in (3, 4):
        alg, deck = distinct_deck(n)
        states = rearrangement_class(alg, deck)
        spec = spec_fn(n)
        K = build_transition_matrix(alg, spec, states=states)
        trials = 40_000
        check = empirical_row_check(K, deck, trials=trials, seed=SEED, stepper=gsr_stepper(spec))
        assert not check.over_4_sigma, (label, n, check.over_4_sigma)
        assert check.chi_square < check.chi_square_limit, (label, n)


def test_gsr_marginal_equivalence_n5_sample():
    alg, deck = distinct_deck(5)
    states = rearrangement_class(alg, deck)
    spec = riffle_spec(5)
    K = build_transition_matrix(alg, spec, states=states)
    check = empirical_row_check(K, deck, trials=50_000, seed=SEED, stepper=gsr_stepper(spec))
    assert not check.over_4_sigma
    assert check.chi_square < check.chi_square_limit


def test_matrix_stepper_matches_row():
    alg, deck = distinct_deck(3)
    states = rearrangement_class(alg, deck)
    spec = top_to_random_spec(3)
    K = build_transition_matrix(alg, spec, states=states)
    check = empirical_row_check(K, deck, trials=30_000, seed=SEED)
    assert not check.over_4_sigma


def test_trajectory_determinism():
    spec = riffle_spec(4)
    deck = Word("1234")
    t1 = sample_trajectory(deck, 10, gsr_stepper(spec), RngStream(SEED, 5))
    t2 = sample_trajectory(deck, 10, gsr_stepper(spec), RngStream(SEED, 5))
    assert t1 == t2
    assert len(t1) == 11


def test_run_trajectories_time_zero():
    deck = Word("1234")
    spec = riffle_spec(4)
    stat = {"descents": lambda w_: F(0) if str(w_) == "1234" else F(1)}
    report = run_trajectories(deck, 0, 10, gsr_stepper(spec), SEED, stat)
    assert report.series["descents"].mean(0) == 0
    assert report.series["descents"].variance(0) == 0


def test_run_trajectories_mean_matches_exact():
    n, q = 4, F(1, 2)
    alg, deck = distinct_deck(n)
    states = rearrangement_class(alg, deck)
    spec = top_or_bottom_spec(n, q)
    K = build_transition_matrix(alg, spec, states=states)
    stat_fn = lambda w_: weighted_descent_stat(w_, q, alg.alphabet)
    report = run_trajectories(deck, 1, 50_000, gsr_stepper(spec), SEED, {"wd": stat_fn})
    target = expectation(K, point_mass(K, deck), 1, stat_fn)
    series = report.series["wd"]
    sem = (float(series.variance(1)) / report.trials) ** 0.5
    assert abs(float(series.mean(1)) - float(target)) < 3 * sem


def test_two_handed_descent_mean_at_t2():
    # ascending 5-card deck, two riffles: expected descent count (1-2^-2)*2
    from hopfchains.shuffle import descent_peak_sets

    alg, deck = distinct_deck(5)
    spec = riffle_spec(5)
    stat_fn = lambda w_: F(len(descent_peak_sets(w_, alg.alphabet).descents))
    report = run_trajectories(deck, 2, 30_000, gsr_stepper(spec), SEED, {"d": stat_fn})
    series = report.series["d"]
    sem = (float(series.variance(2)) / report.trials) ** 0.5
    assert abs(float(series.mean(2)) - 1.5) < 3 * sem


def test_matrix_stepper_on_forests():
    from hopfchains.forests import forest_algebra, parse_forest
    from hopfchains.presets import trinomial_spec

    falg = forest_algebra()
    K = build_transition_matrix(falg, trinomial_spec(3, F(1, 4), F(1, 2), F(1, 4)))
    check = empirical_row_check(K, parse_forest("(()())"), trials=30_000, seed=SEED)
    assert not check.over_4_sigma
    assert check.chi_square < check.chi_square_limit


def test_report_serialises_with_metadata():
    deck = Word("123")
    spec = riffle_spec(3)
    report = run_trajectories(deck, 2, 100, gsr_stepper(spec), SEED, {"c": lambda w_: F(1)})
    data = report.to_dict()
    assert data["cut_convention"].startswith("top pile first")
    assert data["statistics"]["c"][0]["mean"] == 1.0
