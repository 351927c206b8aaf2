from fractions import Fraction as F

import pytest

from hopfchains.forests import forest_algebra, parse_forest
from hopfchains.hopf import (
    AlgebraHandle,
    CppSpec,
    LinComb,
    SpecError,
    TensorComb,
    apply_cpp,
    apply_proj_convolution,
    beta_n,
    check_bialgebra_compatibility,
    check_coassociativity,
    check_state_space_basis,
    composition_law,
    coproduct,
    eta,
    iterated_coproduct,
    iterated_product,
    multinomial,
    normalize_spec,
    product,
    spec_from_dict,
    spec_to_dict,
)
from hopfchains.presets import (
    biased_spec,
    riffle_spec,
    top_or_bottom_spec,
    top_to_random_spec,
)
from hopfchains.shuffle import ShuffleAlgebra, Word


def w(s):
    return Word(s)


def lc(s):
    return LinComb.single(Word(s))


ALG2 = ShuffleAlgebra("ab")
ALG3 = ShuffleAlgebra("abc")


# ---------------------------------------------------------------------------
# linear combinations


def test_lincomb_no_zero_terms():
    v = LinComb({w("a"): F(1)}) - LinComb({w("a"): F(1)})
    assert v.is_zero()
    assert len(v) == 0


def test_lincomb_arithmetic():
    v = lc("ab") + lc("ab") + lc("ba").scale(F(3))
    assert v.coefficient(w("ab")) == 2
    assert v.coefficient(w("ba")) == 3
    assert (F(1, 2) * v).coefficient(w("ab")) == 1


def test_tensorcomb_arity_guard():
    with pytest.raises(ValueError):
        TensorComb(2, {(w("a"),): F(1)})
    t = TensorComb.single((w("a"), w("b")))
    with pytest.raises(ValueError):
        t + TensorComb.single((w("a"),))


# ---------------------------------------------------------------------------
# structure maps


def test_product_unit():
    assert product(ALG3, lc(""), lc("abc")) == lc("abc")


def test_product_interleavings():
    got = product(ALG3, lc("ac"), lc("cb"))
    expect = LinComb(
        {w("accb"): F(2), w("acbc"): F(1), w("cacb"): F(1), w("cabc"): F(1), w("cbac"): F(1)}
    )
    assert got == expect


def test_forest_product_of_vertices():
    falg = forest_algebra()
    dot = parse_forest("()")
    assert falg.product_basis(dot, dot) == LinComb.single(parse_forest("()()"))


def test_coproduct_of_word():
    got = coproduct(ALG3, lc("accb"))
    expect = TensorComb(
        2,
        {
            (w(""), w("accb")): F(1),
            (w("a"), w("ccb")): F(1),
            (w("ac"), w("cb")): F(1),
            (w("acc"), w("b")): F(1),
            (w("accb"), w("")): F(1),
        },
    )
    assert got == expect


def test_degree_one_primitive():
    got = coproduct(ALG3, lc("c"))
    assert got == TensorComb(2, {(w(""), w("c")): F(1), (w("c"), w("")): F(1)})


def test_iterated_coproduct_arity_one_and_three():
    assert iterated_coproduct(ALG2, lc("ab"), 1) == TensorComb(1, {(w("ab"),): F(1)})

    # independent oracle: brute-force double deconcatenations
    expected = {}
    word = "ab"
    for i in range(3):
        for j in range(i, 3):
            key = (w(word[:i]), w(word[i:j]), w(word[j:]))
            expected[key] = expected.get(key, 0) + 1
    got = iterated_coproduct(ALG2, lc("ab"), 3)
    assert got == TensorComb(3, {k: F(v) for k, v in expected.items()})


def test_coassociativity_small_degrees():
    assert check_coassociativity(ALG2, 4) == []
    assert check_coassociativity(forest_algebra(), 4) == []


def test_iterated_product_three_letters():
    t = TensorComb.single((w("a"), w("b"), w("c")))
    got = iterated_product(ALG3, t)
    perms = ["abc", "acb", "bac", "bca", "cab", "cba"]
    assert got == LinComb({w(p): F(1) for p in perms})


def test_iterated_product_associativity():
    # m(m (x) id) and m(id (x) m) agree on tensor inputs
    t = TensorComb.single((w("ab"), w("a"), w("b")))
    via_left = iterated_product(
        ALG2, TensorComb.single((w("ab"), w("a")))
    )
    lhs = LinComb.zero()
    for key, c in via_left.items():
        lhs = lhs + product(ALG2, LinComb.single(key), lc("b")).scale(c)
    assert iterated_product(ALG2, t) == lhs


# ---------------------------------------------------------------------------
# projection convolutions


def test_proj_convolution_break_one_then_rest():
    got = apply_proj_convolution(ALG3, lc("abc"), (1, 2))
    assert got == LinComb({w("abc"): F(1), w("bac"): F(1), w("bca"): F(1)})


def test_proj_convolution_whole_block_is_identity():
    assert apply_proj_convolution(ALG3, lc("abc"), (3,)) == lc("abc")


def test_proj_convolution_two_singles():
    # deconcatenation has a single (1,1) split of ab, which then shuffles
    got = apply_proj_convolution(ALG2, lc("ab"), (1, 1))
    assert got == LinComb({w("ab"): F(1), w("ba"): F(1)})


def test_proj_convolution_degree_mismatch():
    with pytest.raises(ValueError):
        apply_proj_convolution(ALG3, lc("abc"), (1, 1))


def test_zero_stripping_invariance():
    for word in ["ab", "ba", "aa"]:
        a = apply_proj_convolution(ALG2, lc(word), (1, 1))
        b = apply_proj_convolution(ALG2, lc(word), (1, 0, 1))
        c = apply_proj_convolution(ALG2, lc(word), (0, 1, 1, 0))
        assert a == b == c


def test_apply_cpp_riffle_on_two_cards():
    # row sums must match 2^n, which pins the (1,1) term to ab + ba
    got = apply_cpp(ALG2, lc("ab"), riffle_spec(2))
    assert got == LinComb({w("ab"): F(3), w("ba"): F(1)})
    assert sum(c for _, c in got.items()) == 4


def test_apply_cpp_top_to_random():
    got = apply_cpp(ALG3, lc("abc"), top_to_random_spec(3))
    assert got == LinComb({w("abc"): F(1), w("bac"): F(1), w("bca"): F(1)})


def test_apply_cpp_linearity():
    spec = riffle_spec(2)
    x, y = lc("ab"), lc("ba")
    lhs = apply_cpp(ALG2, x + y.scale(F(2, 3)), spec)
    rhs = apply_cpp(ALG2, x, spec) + apply_cpp(ALG2, y, spec).scale(F(2, 3))
    assert lhs == rhs


def test_apply_cpp_preserves_degree():
    spec = riffle_spec(3)
    for word in ["aab", "abc", "cba"]:
        out = apply_cpp(ALG3, lc(word), spec)
        assert {k.degree for k in out.support()} == {3}


# ---------------------------------------------------------------------------
# specs


def test_normalize_strips_zero_parts():
    spec = normalize_spec(3, [((1, 0, 2), F(1))])
    assert spec.terms == (((1, 2), F(1)),)


def test_normalize_merges_and_validates():
    spec = normalize_spec(2, [((0, 2), F(1)), ((2, 0), F(1)), ((1, 1), F(1))])
    assert dict(spec.terms) == {(2,): F(2), (1, 1): F(1)}
    with pytest.raises(SpecError):
        normalize_spec(3, [((3,), F(1))])
    with pytest.raises(SpecError):
        normalize_spec(2, [((0, 2), F(1)), ((2, 0), F(1))])
    with pytest.raises(SpecError):
        normalize_spec(2, [((1, 1), F(-1))])
    with pytest.raises(SpecError):
        normalize_spec(2, [((1, 2), F(1))])


def test_no_valid_operator_at_degree_one():
    with pytest.raises(SpecError):
        normalize_spec(1, [((1,), F(1))])


def test_beta_values():
    assert beta_n(top_to_random_spec(5)) == 5
    for n in (2, 3, 4):
        assert beta_n(riffle_spec(n)) == 2**n
        assert beta_n(biased_spec(n, (F(1, 3), F(2, 3)))) == 1
    assert multinomial(4, (1, 3)) == 4


def test_composition_law_examples():
    assert composition_law(top_to_random_spec(4)) == {(1, 3): F(1)}
    law = composition_law(top_or_bottom_spec(4, F(1, 2)))
    assert law == {(1, 3): F(1, 2), (3, 1): F(1, 2)}
    law2 = composition_law(riffle_spec(2))
    assert law2 == {(2,): F(1, 2), (1, 1): F(1, 2)}
    assert sum(law2.values()) == 1


def test_spec_json_round_trip():
    spec = top_or_bottom_spec(4, F(1, 3))
    assert spec_from_dict(spec_to_dict(spec)) == spec


# ---------------------------------------------------------------------------
# rescaling and structure checks


def test_eta_words_always_one():
    for word in ["a", "ab", "accb"]:
        assert eta(ALG3 if "c" in word else ALG2, w(word)) == 1


def test_eta_forests():
    falg = forest_algebra()
    assert eta(falg, parse_forest("()()")) == 2
    assert eta(falg, parse_forest("(())")) == 1


def test_eta_forest_matches_removal_order_count():
    # oracle: count vertex-removal orders that always take a current root
    falg = forest_algebra()

    def removal_orders(trees) -> int:
        if not trees:
            return 1
        total = 0
        for i, tree in enumerate(trees):
            rest = trees[:i] + trees[i + 1 :] + tuple(tree)
            total += removal_orders(rest)
        return total

    for n in range(1, 6):
        for f in falg.basis(n):
            assert eta(falg, f) == removal_orders(f.trees), f


def test_state_space_checks_pass():
    assert check_state_space_basis(ALG2, 5) == []
    assert check_state_space_basis(forest_algebra(), 5) == []
    assert check_bialgebra_compatibility(ALG2, 4) == []
    assert check_bialgebra_compatibility(forest_algebra(), 4) == []


class _BadKey:
    def __init__(self, name, degree):
        self.name = name
        self.degree = degree

    def __eq__(self, other):
        return isinstance(other, _BadKey) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class _PrimitiveDegreeTwo(AlgebraHandle):
    """Artificial algebra whose degree-2 basis element never breaks."""

    name = "bad"

    def __init__(self):
        super().__init__()
        self.unit = _BadKey("1", 0)
        self.x = _BadKey("x", 1)
        self.y = _BadKey("y", 2)

    def basis(self, n):
        return {0: [self.unit], 1: [self.x], 2: [self.y]}.get(n, [])

    def product_basis(self, a, b):
        if a.degree == 0:
            return LinComb.single(b)
        if b.degree == 0:
            return LinComb.single(a)
        return LinComb.zero()

    def coproduct_basis(self, a):
        if a.degree == 0:
            return TensorComb.single((self.unit, self.unit))
        return TensorComb(
            2, {(self.unit, a): F(1), (a, self.unit): F(1)}
        )


def test_artificial_primitive_is_reported():
    violations = check_state_space_basis(_PrimitiveDegreeTwo(), 2)
    assert any("primitive" in v for v in violations)


def test_eta_zero_is_reported():
    bad = _PrimitiveDegreeTwo()
    with pytest.raises(ValueError):
        eta(bad, bad.y)
