"""Words as decks of cards: the shuffle algebra and its concatenation dual.

The shuffle algebra has all words over a fixed alphabet as its basis; the
product of two words is the sum of all their interleavings (with
multiplicity) and the coproduct is the sum of all prefix/suffix splits.
Its graded dual is the free associative algebra on the same letters:
product is concatenation, coproduct sends a word to the sum over all
position subsets of (restriction, complement).

Also here: deck statistics.  A descent is a position where a card sits on
a card of smaller value; a peak is a position whose card exceeds both
neighbours (indexed by the predecessor of the middle card, so peak
positions range over 1..n-2).  The binomially weighted forms of these
statistics have closed-form expectations under top-or-bottom insertion
shuffles, which the acceptance suite exercises.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product as cartesian
from math import comb

from .hopf import AlgebraHandle, LinComb, TensorComb, _add_term
from .linalg import rat

_ONE = Fraction(1)


class Word:
    """An immutable sequence of card labels; degree = number of cards."""

    __slots__ = ("letters",)

    def __init__(self, letters):
        self.letters = tuple(letters)

    @property
    def degree(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __str__(self) -> str:
        return "".join(self.letters)

    def __repr__(self) -> str:
        return f"Word({''.join(self.letters)!r})"


EMPTY_WORD = Word(())


def shuffle_product(w: Word, z: Word) -> LinComb:
    """Sum of all interleavings of w and z, counted with multiplicity."""
    total = len(w.letters) + len(z.letters)
    out: dict = {}
    for positions in combinations(range(total), len(w.letters)):
        merged = [None] * total
        for p, letter in zip(positions, w.letters):
            merged[p] = letter
        it = iter(z.letters)
        for i in range(total):
            if merged[i] is None:
                merged[i] = next(it)
        _add_term(out, Word(merged), _ONE)
    return LinComb._wrap(out)


def deconcat_coproduct(w: Word) -> TensorComb:
    """Sum of all prefix (x) suffix splits, each with coefficient 1."""
    out = {}
    for i in range(len(w.letters) + 1):
        pair = (Word(w.letters[:i]), Word(w.letters[i:]))
        _add_term(out, pair, _ONE)
    return TensorComb._wrap(2, out)


def concat_product(w: Word, z: Word) -> LinComb:
    """Concatenation; a single word with coefficient 1."""
    return LinComb.single(Word(w.letters + z.letters))


def deshuffle_coproduct(w: Word) -> TensorComb:
    """Sum over position subsets S of (w restricted to S) (x) (rest)."""
    n = len(w.letters)
    out: dict = {}
    for size in range(n + 1):
        for chosen in combinations(range(n), size):
            chosen_set = set(chosen)
            left = Word(w.letters[i] for i in chosen)
            right = Word(w.letters[i] for i in range(n) if i not in chosen_set)
            _add_term(out, (left, right), _ONE)
    return TensorComb._wrap(2, out)


class ShuffleAlgebra(AlgebraHandle):
    """Words with interleaving product and deconcatenation coproduct."""

    commutative = True
    cocommutative = False

    def __init__(self, alphabet):
        super().__init__()
        letters = tuple(alphabet)
        if len(set(letters)) != len(letters):
            raise ValueError(f"alphabet has repeated labels: {letters}")
        if not letters:
            raise ValueError("alphabet must be nonempty")
        self.alphabet = letters
        self.rank = {a: i for i, a in enumerate(letters)}
        self.name = f"shuffle[{''.join(letters)}]"
        self._basis_cache: dict = {}

    def basis(self, n: int) -> list:
        cached = self._basis_cache.get(n)
        if cached is None:
            cached = [Word(t) for t in cartesian(self.alphabet, repeat=n)]
            self._basis_cache[n] = cached
        return cached

    def product_basis(self, x: Word, y: Word) -> LinComb:
        return shuffle_product(x, y)

    def coproduct_basis(self, x: Word) -> TensorComb:
        return deconcat_coproduct(x)


class FreeAssociativeAlgebra(AlgebraHandle):
    """Words with concatenation product and subset-split coproduct.

    This is the graded dual of the shuffle algebra on the same letters;
    it is cocommutative, which is what the insertion-shuffle eigenvector
    construction needs.
    """

    commutative = False
    cocommutative = True

    def __init__(self, alphabet):
        super().__init__()
        letters = tuple(alphabet)
        if len(set(letters)) != len(letters):
            raise ValueError(f"alphabet has repeated labels: {letters}")
        if not letters:
            raise ValueError("alphabet must be nonempty")
        self.alphabet = letters
        self.rank = {a: i for i, a in enumerate(letters)}
        self.name = f"free-assoc[{''.join(letters)}]"
        self._basis_cache: dict = {}

    def basis(self, n: int) -> list:
        cached = self._basis_cache.get(n)
        if cached is None:
            cached = [Word(t) for t in cartesian(self.alphabet, repeat=n)]
            self._basis_cache[n] = cached
        return cached

    def product_basis(self, x: Word, y: Word) -> LinComb:
        return concat_product(x, y)

    def coproduct_basis(self, x: Word) -> TensorComb:
        return deshuffle_coproduct(x)


# ---------------------------------------------------------------------------
# deck construction helpers

_DIGITS = "123456789"


def distinct_deck(n: int) -> tuple[ShuffleAlgebra, Word]:
    """Alphabet 1 < 2 < ... < n with the ascending deck as start state."""
    if not 1 <= n <= 9:
        raise ValueError("distinct decks supported for 1 <= n <= 9")
    alg = ShuffleAlgebra(_DIGITS[:n])
    return alg, Word(alg.alphabet)


def deck_from_string(deck: str) -> tuple[ShuffleAlgebra, Word]:
    """Algebra on the deck's letters (sorted lexicographically) plus the deck."""
    if not deck:
        raise ValueError("deck must be nonempty")
    alg = ShuffleAlgebra(sorted(set(deck)))
    return alg, Word(deck)


def ascending_word(alg: ShuffleAlgebra, word: Word) -> Word:
    """The same multiset of cards arranged in increasing order."""
    return Word(sorted(word.letters, key=alg.rank.__getitem__))


def rearrangement_class(alg: ShuffleAlgebra, word: Word) -> list[Word]:
    """All words with the same letter multiset, in canonical order.

    Shuffling never changes which cards are in the deck, so this class is
    closed under every breaking-size operator and is the natural state
    space for a chain started at `word`.
    """
    seen = {Word(p) for p in permutations(word.letters)}
    return sorted(seen, key=lambda w: tuple(alg.rank[a] for a in w.letters))


def word_content(alg: ShuffleAlgebra, word: Word) -> tuple[int, ...]:
    """Letter multiplicities of a word, aligned with the alphabet order."""
    counts = [0] * len(alg.alphabet)
    for letter in word.letters:
        counts[alg.rank[letter]] += 1
    return tuple(counts)


def lyndon_words(alphabet, max_len: int) -> dict[int, list[tuple[str, ...]]]:
    """Lyndon words over an ordered alphabet, grouped by length.

    A word is Lyndon when it is strictly smaller than each of its proper
    suffixes under the alphabet order.  Lengths run from 1 to max_len;
    brute-force filtering is plenty at desk scale.
    """
    letters = tuple(alphabet)
    rank = {a: i for i, a in enumerate(letters)}
    result: dict[int, list[tuple[str, ...]]] = {}
    for n in range(1, max_len + 1):
        found = []
        for t in cartesian(letters, repeat=n):
            ranks = tuple(rank[a] for a in t)
            if all(ranks < ranks[i:] for i in range(1, n)):
                found.append(t)
        result[n] = found
    return result


# ---------------------------------------------------------------------------
# deck statistics


@dataclass(frozen=True)
class DeckStatistics:
    """Descent and peak position sets of a deck."""

    descents: frozenset
    peaks: frozenset


def descent_peak_sets(word: Word, alphabet) -> DeckStatistics:
    """Descents in 1..n-1 and peaks in 1..n-2 (peak i = middle card at i+1)."""
    rank = {a: i for i, a in enumerate(alphabet)}
    vals = [rank[a] for a in word.letters]
    n = len(vals)
    descents = frozenset(i for i in range(1, n) if vals[i - 1] > vals[i])
    peaks = frozenset(
        i for i in range(1, n - 1) if vals[i - 1] < vals[i] and vals[i] > vals[i + 1]
    )
    return DeckStatistics(descents=descents, peaks=peaks)


def descent_count(word: Word, alphabet) -> int:
    return len(descent_peak_sets(word, alphabet).descents)


def peak_count(word: Word, alphabet) -> int:
    return len(descent_peak_sets(word, alphabet).peaks)


def weighted_descent_stat(word: Word, q, alphabet) -> Fraction:
    """Sum over descents i of C(n-2, i-1) q^(i-1) (1-q)^(n-1-i)."""
    q = rat(q)
    n = word.degree
    stats = descent_peak_sets(word, alphabet)
    total = Fraction(0)
    for i in stats.descents:
        total += comb(n - 2, i - 1) * q ** (i - 1) * (1 - q) ** (n - 1 - i)
    return total


def weighted_peak_stat(word: Word, q, alphabet) -> Fraction:
    """Sum over peaks i of C(n-3, i-1) q^(i-1) (1-q)^(n-2-i)."""
    q = rat(q)
    n = word.degree
    stats = descent_peak_sets(word, alphabet)
    total = Fraction(0)
    for i in stats.peaks:
        total += comb(n - 3, i - 1) * q ** (i - 1) * (1 - q) ** (n - 2 - i)
    return total
