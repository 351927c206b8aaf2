"""Unlabelled rooted forests with the root-cut coproduct.

A forest is a multiset of rooted trees; its degree is the total vertex
count.  The product of two forests is their disjoint union.  The
coproduct of a single tree T is the sum of (T minus S) (x) S over all
connected subtrees S that are empty or contain the root; for a multi-tree
forest the per-tree coproducts multiply in the tensor square.

Canonical form: a tree is a tuple of child trees sorted by their
parenthesised encoding, a forest is a tuple of trees sorted the same way.
"(()())" is a root with two leaf children, "()()" two isolated roots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from math import comb

from .hopf import AlgebraHandle, LinComb, TensorComb, _add_term, tensor_square_product
from .linalg import rat

_ONE = Fraction(1)


def _canon_tree(children) -> tuple:
    kids = tuple(_canon_tree(c) for c in children)
    return tuple(sorted(kids, key=_enc_tree))


def _enc_tree(tree) -> str:
    return "(" + "".join(_enc_tree(c) for c in tree) + ")"


def _tree_size(tree) -> int:
    return 1 + sum(_tree_size(c) for c in tree)


class Forest:
    """Canonical unlabelled rooted forest; hashable, equality by shape."""

    __slots__ = ("trees", "encoding", "_size")

    def __init__(self, trees):
        canon = tuple(sorted((_canon_tree(t) for t in trees), key=_enc_tree))
        self.trees = canon
        self.encoding = "".join(_enc_tree(t) for t in canon)
        self._size = sum(_tree_size(t) for t in canon)

    @property
    def degree(self) -> int:
        return self._size

    def __eq__(self, other) -> bool:
        return isinstance(other, Forest) and self.trees == other.trees

    def __hash__(self):
        return hash(self.trees)

    def __str__(self) -> str:
        return self.encoding

    def __repr__(self) -> str:
        return f"Forest({self.encoding!r})"


EMPTY_FOREST = Forest(())
SINGLE_VERTEX = Forest(((),))


def parse_forest(encoding: str) -> Forest:
    """Parse a parenthesised encoding back into a canonical forest."""
    trees = []
    stack = []
    for ch in encoding:
        if ch == "(":
            stack.append([])
        elif ch == ")":
            if not stack:
                raise ValueError(f"unbalanced encoding: {encoding!r}")
            done = tuple(stack.pop())
            if stack:
                stack[-1].append(done)
            else:
                trees.append(done)
        else:
            raise ValueError(f"unexpected character {ch!r} in forest encoding")
    if stack:
        raise ValueError(f"unbalanced encoding: {encoding!r}")
    return Forest(trees)


@lru_cache(maxsize=None)
def enumerate_trees(n: int) -> tuple:
    """All rooted trees with n vertices: a root over each (n-1)-vertex forest."""
    if n < 1:
        return ()
    return tuple(_canon_tree(f.trees) for f in enumerate_forests(n - 1))


@lru_cache(maxsize=None)
def enumerate_forests(n: int) -> tuple[Forest, ...]:
    """All rooted forests with n vertices, sorted by canonical encoding.

    Generated as multisets over the global tree list, choosing trees in
    non-decreasing index order so each multiset appears exactly once.
    """
    if n < 0:
        return ()
    if n == 0:
        return (EMPTY_FOREST,)
    pool = []
    for size in range(1, n + 1):
        pool.extend((size, t) for t in enumerate_trees(size))

    results = []

    def extend(start: int, remaining: int, chosen: list) -> None:
        if remaining == 0:
            results.append(Forest(tuple(chosen)))
            return
        for idx in range(start, len(pool)):
            size, tree = pool[idx]
            if size > remaining:
                continue
            chosen.append(tree)
            extend(idx, remaining - size, chosen)
            chosen.pop()

    extend(0, n, [])
    return tuple(sorted(results, key=lambda f: f.encoding))


def forest_product(f: Forest, g: Forest) -> LinComb:
    """Disjoint union, as a single canonical forest."""
    return LinComb.single(Forest(f.trees + g.trees))


def _tree_cuts(tree) -> list:
    """All (left forest trees, kept root subtree) pairs for one tree.

    `kept` ranges over the connected subtrees containing the root; the
    left part collects everything cut away.  The empty subtree case is
    handled by the caller.
    """
    per_child = []
    for child in tree:
        opts = [((child,), None)]  # drop the whole child into the left part
        opts.extend(_tree_cuts(child))
        per_child.append(opts)
    cuts = []
    for combo in cartesian(*per_child) if per_child else [()]:
        left: tuple = ()
        kept_children = []
        for child_left, child_kept in combo:
            left = left + child_left
            if child_kept is not None:
                kept_children.append(child_kept)
        cuts.append((left, _canon_tree(kept_children)))
    return cuts


@lru_cache(maxsize=None)
def _tree_coproduct(tree) -> TensorComb:
    out: dict = {}
    whole = Forest((tree,))
    _add_term(out, (whole, EMPTY_FOREST), _ONE)  # S empty
    for left, kept in _tree_cuts(tree):
        _add_term(out, (Forest(left), Forest((kept,))), _ONE)
    return TensorComb._wrap(2, out)


class ForestAlgebra(AlgebraHandle):
    """Rooted forests with disjoint-union product and root-cut coproduct."""

    name = "forests"
    commutative = True
    cocommutative = False

    def basis(self, n: int) -> list:
        return list(enumerate_forests(n))

    def product_basis(self, x: Forest, y: Forest) -> LinComb:
        return forest_product(x, y)

    def coproduct_basis(self, x: Forest) -> TensorComb:
        result = TensorComb.single((EMPTY_FOREST, EMPTY_FOREST))
        for tree in x.trees:
            result = tensor_square_product(self, result, _tree_coproduct(tree))
        return result


_FOREST_ALGEBRA = ForestAlgebra()


def forest_algebra() -> ForestAlgebra:
    """The shared forest-algebra handle (safe: handles are immutable)."""
    return _FOREST_ALGEBRA


# ---------------------------------------------------------------------------
# vertex statistics


@dataclass(frozen=True)
class VertexStats:
    """Per-vertex counts: descendants, ancestors (both including the
    vertex itself) and the size of its connected component."""

    desc: int
    anc: int
    component: int


def vertex_stats(f: Forest) -> list[VertexStats]:
    """Statistics for every vertex of the forest (order: encoding walk)."""
    stats: list[VertexStats] = []

    def walk(tree, depth: int, component: int) -> int:
        size = 1
        for child in tree:
            size += walk(child, depth + 1, component)
        stats.append(VertexStats(desc=size, anc=depth + 1, component=component))
        return size

    for tree in f.trees:
        walk(tree, 0, _tree_size(tree))
    return stats


def f_j_statistic(f: Forest, j: int, q1, q3) -> Fraction:
    """Sum over vertices of q1^desc(u) q3^anc(u) C(desc(u), j).

    Vertices with fewer than j descendants contribute 0.
    """
    if j < 2:
        raise ValueError("statistic defined for j >= 2")
    q1 = rat(q1)
    q3 = rat(q3)
    total = Fraction(0)
    for st in vertex_stats(f):
        if st.desc >= j:
            total += q1**st.desc * q3**st.anc * comb(st.desc, j)
    return total
