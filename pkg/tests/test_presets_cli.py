import json
from fractions import Fraction as F

import pytest

from hopfchains.chain import build_transition_matrix
from hopfchains.cli import main
from hopfchains.hopf import SpecError, beta_n, spec_from_dict, spec_to_dict
from hopfchains.presets import (
    biased_spec,
    expand_preset,
    preset_names,
    riffle_spec,
    top_m_unordered_spec,
    top_or_bottom_spec,
    top_to_random_spec,
    trinomial_spec,
    weak_compositions,
)
from hopfchains.shuffle import distinct_deck, rearrangement_class


def test_weak_compositions():
    comps = list(weak_compositions(2, 2))
    assert comps == [(0, 2), (1, 1), (2, 0)]
    assert all(sum(c) == 4 for c in weak_compositions(4, 3))


def test_top_or_bottom_at_q_one_is_top_to_random():
    assert top_or_bottom_spec(5, F(1)) == top_to_random_spec(5)


def test_biased_at_half_matches_riffle_up_to_scale():
    # same chain: the specs differ only by the constant 2^-n
    n = 3
    alg, deck = distinct_deck(n)
    states = rearrangement_class(alg, deck)
    K_riffle = build_transition_matrix(alg, riffle_spec(n), states=states)
    K_biased = build_transition_matrix(alg, biased_spec(n, (F(1, 2), F(1, 2))), states=states)
    assert K_riffle.kernel == K_biased.kernel
    assert beta_n(riffle_spec(n)) == 2**n * beta_n(biased_spec(n, (F(1, 2), F(1, 2))))


def test_trinomial_expansion_hand_checked_n2():
    q1, q2, q3 = F(1, 4), F(1, 2), F(1, 4)
    spec = trinomial_spec(2, q1, q2, q3)
    terms = dict(spec.terms)
    assert terms[(2,)] == q2**2
    assert terms[(1, 1)] == q1**2 / 2 + q3**2 / 2 + q1 * q3 + q1 * q2 + q2 * q3
    assert beta_n(spec) == 1


def test_trinomial_requires_probability_vector():
    with pytest.raises(SpecError):
        trinomial_spec(3, F(1, 2), F(1, 2), F(1, 2))
    with pytest.raises(SpecError):
        trinomial_spec(3, F(-1, 4), F(1), F(1, 4))


def test_top_m_unordered_composition():
    spec = top_m_unordered_spec(5, 2)
    assert spec.terms == (((1, 1, 3), F(1)),)
    spec = top_m_unordered_spec(2, 2)  # the tail block is empty and strips away
    assert spec.terms == (((1, 1), F(1)),)


def test_expand_preset_dispatch():
    assert expand_preset("riffle", 4, {"a": "3"}) == riffle_spec(4, 3)
    assert expand_preset("top-or-bottom", 4, {"q": "1/3"}) == top_or_bottom_spec(4, F(1, 3))
    assert expand_preset("biased", 4, {"q": "1/3"}) == biased_spec(4, (F(1, 3), F(2, 3)))
    assert expand_preset("biased", 3, {"qs": "1/4+1/4+1/2"}) == biased_spec(
        3, (F(1, 4), F(1, 4), F(1, 2))
    )
    assert expand_preset("trinomial", 3, {"q1": "1/4", "q2": "1/2", "q3": "1/4"}) == trinomial_spec(
        3, F(1, 4), F(1, 2), F(1, 4)
    )
    assert "riffle" in preset_names()


def test_expand_preset_errors():
    with pytest.raises(SpecError):
        expand_preset("nope", 4)
    with pytest.raises(SpecError):
        expand_preset("top-m-ordered", 4, {})
    with pytest.raises(SpecError):
        expand_preset("riffle", 4, {"bogus": "1"})


# ---------------------------------------------------------------------------
# CLI


def test_cli_matrix_json(tmp_path, capsys):
    out = tmp_path / "m.json"
    code = main(
        [
            "matrix",
            "--algebra",
            "shuffle",
            "--distinct",
            "3",
            "--preset",
            "top-to-random",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    data = json.loads(out.read_text())
    assert data["format_version"] == 1
    assert data["matrix"]["states"][0] == "123"
    assert data["matrix"]["rows"][0][0] == "1/3"


def test_cli_matrix_csv_round_trip(tmp_path):
    out = tmp_path / "m.csv"
    args = [
        "matrix",
        "--algebra",
        "shuffle",
        "--deck",
        "aab",
        "--preset",
        "riffle",
        "--format",
        "csv",
        "--out",
        str(out),
    ]
    assert main(args) == 0
    first = out.read_text()
    assert main(args) == 0
    assert out.read_text() == first  # deterministic export
    assert first.splitlines()[0] == "state,aab,aba,baa"


def test_cli_spectrum_verified(capsys):
    code = main(
        [
            "spectrum",
            "--algebra",
            "shuffle",
            "--distinct",
            "4",
            "--preset",
            "top-to-random",
            "--verify-matrix",
        ]
    )
    captured = capsys.readouterr()
    assert code == 0
    data = json.loads(captured.out)
    assert data["by_eigenvalue"] == {"1": 1, "1/2": 6, "1/4": 8, "0": 9}
    assert data["matrix_verification"]["ok"]


def test_cli_spectrum_forests(capsys):
    code = main(
        ["spectrum", "--algebra", "forests", "--n", "3", "--preset", "riffle", "--verify-matrix"]
    )
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["matrix_verification"]["ok"]


def test_cli_evolve_matches_closed_form(capsys):
    code = main(
        [
            "evolve",
            "--algebra",
            "shuffle",
            "--distinct",
            "4",
            "--preset",
            "top-or-bottom",
            "--params",
            "q=1/2",
            "--q",
            "1/2",
            "--t",
            "5",
            "--stat",
            "weighted-descents",
        ]
    )
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    values = [row["expectation"] for row in data["values"]]
    expect = [str((1 - F(1, 2) ** t) * F(1, 2)) for t in range(6)]
    assert values == expect


def test_cli_simulate_deterministic(capsys):
    args = [
        "simulate",
        "--algebra",
        "shuffle",
        "--distinct",
        "4",
        "--preset",
        "riffle",
        "--t",
        "2",
        "--trials",
        "500",
        "--seed",
        "99",
        "--stat",
        "descents",
    ]
    assert main(args) == 0
    first = json.loads(capsys.readouterr().out)
    assert main(args) == 0
    second = json.loads(capsys.readouterr().out)
    assert first == second
    assert first["statistics"]["descents"][1]["target"] is not None


def test_cli_evolve_forest_statistic(capsys):
    code = main(
        [
            "evolve",
            "--algebra",
            "forests",
            "--forest",
            "((()))",
            "--preset",
            "trinomial",
            "--params",
            "q1=1/4,q2=1/2,q3=1/4",
            "--stat",
            "f_j",
            "--j",
            "2",
            "--q1",
            "1/4",
            "--q3",
            "1/4",
            "--t",
            "2",
        ]
    )
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["values"]) == 3


def test_cli_stationary(capsys):
    code = main(["stationary", "--algebra", "shuffle", "--deck", "aab"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    (pi,) = data["distributions"]
    assert pi["weights"] == {"aab": "1/3", "aba": "1/3", "baa": "1/3"}


def test_cli_eigvecs(capsys):
    code = main(["eigvecs", "--algebra", "shuffle", "--distinct", "2", "--q", "1"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["verified"] and data["count"] >= 2


def test_cli_usage_errors(capsys):
    assert main(["matrix", "--algebra", "shuffle", "--preset", "riffle"]) == 2
    assert main(["matrix", "--algebra", "shuffle", "--distinct", "3"]) == 2
    assert main(["matrix", "--algebra", "shuffle", "--distinct", "3", "--preset", "nope"]) == 2
    capsys.readouterr()


def test_cli_spec_file(tmp_path, capsys):
    spec = top_or_bottom_spec(3, F(1, 2))
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec_to_dict(spec)))
    code = main(
        ["matrix", "--algebra", "shuffle", "--distinct", "3", "--spec", str(path)]
    )
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert spec_from_dict(data["spec"]) == spec
