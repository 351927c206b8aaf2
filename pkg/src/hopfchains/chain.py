"""Markov chains from breaking-size operators, with exact arithmetic.

The transition probability from x to y is the coefficient of y in the
operator applied to x, conjugated by the basis rescaling and divided by
the normalising constant:

    K[x][y] = c_xy * eta(y) / (beta_n * eta(x)).

Row sums then equal 1 identically; the builder checks this for every row
and fails loudly otherwise rather than normalising anything away.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Optional

from .hopf import AlgebraHandle, CppSpec, LinComb, apply_cpp, beta_n, eta
from .linalg import RatMatrix, rat

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class TransitionMatrix:
    """Exact row-stochastic kernel over an ordered list of states."""

    states: list
    kernel: RatMatrix
    etas: Optional[list] = None
    beta: Optional[Fraction] = None
    spec: Optional[CppSpec] = None
    algebra: Optional[AlgebraHandle] = None
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {s: i for i, s in enumerate(self.states)}

    @property
    def size(self) -> int:
        return len(self.states)

    def probability(self, x, y) -> Fraction:
        return self.kernel.at(self.index[x], self.index[y])

    def row_of(self, x) -> dict:
        i = self.index[x]
        return {
            y: p for y, p in zip(self.states, self.kernel.row(i)) if p
        }


def build_transition_matrix(
    alg: AlgebraHandle,
    spec: CppSpec,
    states=None,
    max_states: int = 1000,
) -> TransitionMatrix:
    """Build the chain kernel for an operator spec at its degree.

    `states` defaults to the full degree-n basis; passing a sublist (for
    example one deck's rearrangement class) restricts to it, and the
    builder raises if the operator ever leaves that set.
    """
    n = spec.n
    if states is None:
        states = alg.basis(n)
    states = list(states)
    if not states:
        raise ValueError(f"empty state space at degree {n}")
    if len(states) > max_states:
        raise ValueError(
            f"state space has {len(states)} elements, above the cap {max_states}; "
            "raise max_states to proceed"
        )
    for s in states:
        if s.degree != n:
            raise ValueError(f"state {s!r} has degree {s.degree}, spec degree is {n}")
    index = {s: i for i, s in enumerate(states)}
    etas = [eta(alg, s) for s in states]
    beta = beta_n(spec)
    rows = []
    for i, x in enumerate(states):
        image = apply_cpp(alg, LinComb.single(x), spec)
        row = [_ZERO] * len(states)
        for y, c in image.items():
            j = index.get(y)
            if j is None:
                raise ValueError(
                    f"state space not closed: {x!r} reaches {y!r} outside the given states"
                )
            row[j] = c * etas[j] / (beta * etas[i])
        total = sum(row, _ZERO)
        if total != 1:
            raise ArithmeticError(
                f"row for {x!r} sums to {total}, not 1: rescaling identity violated"
            )
        if any(p < 0 for p in row):
            raise ArithmeticError(f"negative transition probability in row for {x!r}")
        rows.append(row)
    return TransitionMatrix(
        states=states,
        kernel=RatMatrix.from_rows(rows),
        etas=etas,
        beta=beta,
        spec=spec,
        algebra=alg,
        index=index,
    )


@dataclass
class Distribution:
    """Exact probability vector aligned with a state list."""

    states: list
    weights: list
    provenance: Optional[tuple] = None

    def __post_init__(self):
        if len(self.states) != len(self.weights):
            raise ValueError("weights must align with states")
        if any(w < 0 for w in self.weights):
            raise ValueError("negative weight in distribution")
        if sum(self.weights, _ZERO) != 1:
            raise ValueError("distribution weights must sum to exactly 1")

    def weight_of(self, state) -> Fraction:
        try:
            return self.weights[self.states.index(state)]
        except ValueError:
            return _ZERO

    def as_dict(self) -> dict:
        return {s: w for s, w in zip(self.states, self.weights) if w}


def point_mass(matrix: TransitionMatrix, state) -> Distribution:
    if state not in matrix.index:
        raise ValueError(f"state {state!r} not in the chain's state space")
    weights = [_ZERO] * matrix.size
    weights[matrix.index[state]] = _ONE
    return Distribution(states=matrix.states, weights=weights)


def uniform_distribution(matrix: TransitionMatrix) -> Distribution:
    w = Fraction(1, matrix.size)
    return Distribution(states=matrix.states, weights=[w] * matrix.size)


def evolve(matrix: TransitionMatrix, start: Distribution, t: int) -> Distribution:
    """Distribution after t steps: start x K^t, computed exactly."""
    if t < 0:
        raise ValueError("negative time")
    if start.states != matrix.states:
        raise ValueError("distribution is over a different state list")
    weights = list(start.weights)
    kernel = matrix.kernel
    for _ in range(t):
        new = [_ZERO] * matrix.size
        for i, wi in enumerate(weights):
            if not wi:
                continue
            for j, kij in enumerate(kernel.row(i)):
                if kij:
                    new[j] += wi * kij
        weights = new
    return Distribution(states=matrix.states, weights=weights)


def expectation(
    matrix: TransitionMatrix,
    start: Distribution,
    t: int,
    stat: Callable,
) -> Fraction:
    """Exact expectation of a rational statistic after t steps."""
    dist = evolve(matrix, start, t)
    total = _ZERO
    for state, w in zip(dist.states, dist.weights):
        if w:
            total += w * rat(stat(state))
    return total


# ---------------------------------------------------------------------------
# stationary distributions


def stationary_distributions(
    alg: AlgebraHandle,
    n: int,
    states=None,
    max_states: int = 1000,
) -> list[Distribution]:
    """One stationary distribution per multiset of degree-1 basis elements.

    The weight of x is eta(x)/n!^2 times the number of ways (summed over
    all orderings of the multiset) to build x as a product of the chosen
    degree-1 pieces.  These vectors are fixed by every breaking-size
    operator's chain at degree n; they depend on the algebra only.
    Multisets whose distribution vanishes on the given state list (it
    lives on a different invariant class) are skipped.
    """
    if states is None:
        states = alg.basis(n)
    states = list(states)
    if len(states) > max_states:
        raise ValueError(
            f"state space has {len(states)} elements, above the cap {max_states}"
        )
    singles = alg.basis(1)
    if not singles:
        raise ValueError("degree-1 basis is empty; no stationary construction")
    results = []
    nfact = factorial(n)
    for multiset in itertools.combinations_with_replacement(singles, n):
        coeffs = _symmetrized_product(alg, multiset)
        weights = []
        for x in states:
            c = coeffs.get(x, _ZERO)
            weights.append(c * eta(alg, x) / Fraction(nfact**2))
        total = sum(weights, _ZERO)
        if total == 0:
            continue
        if total != 1:
            raise ArithmeticError(
                f"stationary weights for multiset {multiset!r} sum to {total}; "
                "the state list does not cover this class"
            )
        results.append(
            Distribution(states=states, weights=weights, provenance=multiset)
        )
    return results


def _symmetrized_product(alg: AlgebraHandle, multiset) -> dict:
    """Coefficients of the sum over all orderings of the multiset product."""
    if alg.commutative:
        acc = {multiset[0]: _ONE}
        for key in multiset[1:]:
            new: dict = {}
            for x, cx in acc.items():
                for k, ck in alg.product_basis(x, key).items():
                    new[k] = new.get(k, _ZERO) + cx * ck
            acc = new
        nfact = factorial(len(multiset))
        return {k: nfact * v for k, v in acc.items()}
    out: dict = {}
    for order in itertools.permutations(multiset):
        acc = {order[0]: _ONE}
        for key in order[1:]:
            new = {}
            for x, cx in acc.items():
                for k, ck in alg.product_basis(x, key).items():
                    new[k] = new.get(k, _ZERO) + cx * ck
            acc = new
        for k, v in acc.items():
            out[k] = out.get(k, _ZERO) + v
    return out


def is_stationary(matrix: TransitionMatrix, dist: Distribution) -> bool:
    """Exact fixed-point test: dist x K == dist."""
    return evolve(matrix, dist, 1).weights == dist.weights


# ---------------------------------------------------------------------------
# lumping


@dataclass
class LumpingResult:
    """Outcome of a strong-lumpability check."""

    ok: bool
    quotient: Optional[TransitionMatrix] = None
    witness: Optional[tuple] = None  # (x, x_prime, label_class)

    def __bool__(self) -> bool:
        return self.ok


def lumping_check(matrix: TransitionMatrix, statistic: Callable) -> LumpingResult:
    """Check that a statistic is Markov for this chain.

    Strong lumpability: states with equal labels must give equal total
    probability into every label class.  On success the quotient chain is
    returned; on failure the witness triple (x, x', class) is reported.
    """
    labels = [statistic(s) for s in matrix.states]
    classes = sorted(set(labels), key=repr)
    class_index = {c: i for i, c in enumerate(classes)}
    lumped_rows: dict = {}
    for i, x in enumerate(matrix.states):
        sums = [_ZERO] * len(classes)
        for j, p in enumerate(matrix.kernel.row(i)):
            if p:
                sums[class_index[labels[j]]] += p
        label = labels[i]
        if label in lumped_rows:
            prev_state, prev_sums = lumped_rows[label]
            if prev_sums != sums:
                bad = next(
                    classes[k] for k in range(len(classes)) if prev_sums[k] != sums[k]
                )
                return LumpingResult(ok=False, witness=(prev_state, x, bad))
        else:
            lumped_rows[label] = (x, sums)
    kernel = RatMatrix.from_rows([lumped_rows[c][1] for c in classes])
    quotient = TransitionMatrix(states=classes, kernel=kernel)
    return LumpingResult(ok=True, quotient=quotient)


# ---------------------------------------------------------------------------
# export


def matrix_to_csv(matrix: TransitionMatrix) -> str:
    """CSV with a header row of state encodings and rational-string entries."""
    lines = ["state," + ",".join(str(s) for s in matrix.states)]
    for s, row in zip(matrix.states, matrix.kernel.entries):
        lines.append(str(s) + "," + ",".join(str(e) for e in row))
    return "\n".join(lines) + "\n"


def matrix_to_dict(matrix: TransitionMatrix) -> dict:
    data = {
        "states": [str(s) for s in matrix.states],
        "rows": [[str(e) for e in row] for row in matrix.kernel.entries],
    }
    if matrix.beta is not None:
        data["beta"] = str(matrix.beta)
    if matrix.etas is not None:
        data["etas"] = [str(e) for e in matrix.etas]
    return data


def distribution_to_dict(dist: Distribution) -> dict:
    return {str(s): str(w) for s, w in zip(dist.states, dist.weights) if w}
