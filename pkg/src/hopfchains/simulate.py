"""Seeded Monte Carlo simulation of breaking-size chains.

Randomness comes from `RngStream`, a deterministic source keyed by a seed
and a stream index: the pair is hashed into a Mersenne Twister state and
all draws go through integer rejection sampling, so identical
(seed, stream, draw sequence) gives identical trajectories on every
platform.  All probability weights are realised by exact integer
inverse-CDF over a common denominator; floating point appears only in the
reporting layer.

Shuffles have a direct sampler (`gsr_step`): cut the deck into consecutive
piles of the sampled sizes, top pile first, then build the new deck from
the bottom by repeatedly dropping the bottommost card of a pile chosen
with probability proportional to its current size.  Any built transition
matrix can also be sampled row by row (`matrix_stepper`).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable

from .chain import TransitionMatrix
from .hopf import CppSpec, composition_law
from .shuffle import Word

_ZERO = Fraction(0)


class RngStream:
    """Deterministic pseudo-random stream identified by (seed, stream)."""

    __slots__ = ("seed", "stream", "_rng")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed
        self.stream = stream
        material = f"hopfchains:{seed}:{stream}".encode()
        state = int.from_bytes(hashlib.sha256(material).digest(), "big")
        self._rng = random.Random(state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection on getrandbits."""
        if n <= 0:
            raise ValueError("randbelow needs a positive bound")
        k = n.bit_length()
        r = self._rng.getrandbits(k)
        while r >= n:
            r = self._rng.getrandbits(k)
        return r

    def pick_weighted(self, weights: list[int]) -> int:
        """Index drawn with probability weight/total (integer inverse-CDF)."""
        total = sum(weights)
        r = self.randbelow(total)
        acc = 0
        for i, w in enumerate(weights):
            acc += w
            if r < acc:
                return i
        raise AssertionError("unreachable")  # pragma: no cover


def _integer_weights(pairs) -> tuple[list, list[int]]:
    """Convert (item, Fraction probability) pairs to exact integer weights."""
    items = [item for item, _ in pairs]
    probs = [p for _, p in pairs]
    denom = lcm(*(p.denominator for p in probs))
    return items, [int(p * denom) for p in probs]


_law_cache: dict = {}


def sample_composition(spec: CppSpec, rng: RngStream) -> tuple[int, ...]:
    """Draw a piece-size composition from the spec's breaking law, exactly."""
    cached = _law_cache.get(spec)
    if cached is None:
        cached = _integer_weights(sorted(composition_law(spec).items()))
        _law_cache[spec] = cached
    comps, weights = cached
    return comps[rng.pick_weighted(weights)]


def cut_and_drop(deck: Word, comp, rng: RngStream) -> Word:
    """Cut into consecutive piles of the given sizes (top pile first), then
    rebuild the deck from the bottom by dropping the bottommost card of a
    pile chosen with probability proportional to its current size."""
    letters = deck.letters
    if sum(comp) != len(letters):
        raise ValueError(f"composition {comp} does not cut a deck of {len(letters)}")
    piles = []
    at = 0
    for size in comp:
        piles.append(list(letters[at : at + size]))
        at += size
    bottom_up = []
    sizes = [len(p) for p in piles]
    remaining = sum(sizes)
    while remaining:
        r = rng.randbelow(remaining)
        acc = 0
        for i, s in enumerate(sizes):
            acc += s
            if r < acc:
                bottom_up.append(piles[i].pop())
                sizes[i] -= 1
                break
        remaining -= 1
    return Word(reversed(bottom_up))


def gsr_step(deck: Word, spec: CppSpec, rng: RngStream) -> Word:
    """One cut-and-drop shuffle step with the spec's piece-size law."""
    return cut_and_drop(deck, sample_composition(spec, rng), rng)


def gsr_stepper(spec: CppSpec) -> Callable:
    return lambda state, rng: gsr_step(state, spec, rng)


def matrix_stepper(matrix: TransitionMatrix) -> Callable:
    """Generic row sampler for any built transition matrix."""
    row_cache: dict = {}

    def step(state, rng: RngStream):
        cached = row_cache.get(state)
        if cached is None:
            i = matrix.index[state]
            pairs = [
                (matrix.states[j], p)
                for j, p in enumerate(matrix.kernel.row(i))
                if p
            ]
            cached = _integer_weights(pairs)
            row_cache[state] = cached
        targets, weights = cached
        return targets[rng.pick_weighted(weights)]

    return step


def sample_trajectory(start, steps: int, stepper: Callable, rng: RngStream) -> list:
    """States X_0, X_1, ..., X_steps of one simulated run."""
    states = [start]
    for _ in range(steps):
        states.append(stepper(states[-1], rng))
    return states


@dataclass
class StatSeries:
    """Exact running sums for one statistic at each time step."""

    total: list  # Fraction sums per t
    total_sq: list
    trials: int

    def mean(self, t: int) -> Fraction:
        return self.total[t] / self.trials

    def variance(self, t: int) -> Fraction:
        m = self.mean(t)
        return self.total_sq[t] / self.trials - m * m


@dataclass
class SimulationReport:
    """Per-step sample moments for each registered statistic."""

    steps: int
    trials: int
    seed: int
    series: dict  # name -> StatSeries

    def to_dict(self, exact_targets: dict | None = None) -> dict:
        out: dict = {
            "trials": self.trials,
            "steps": self.steps,
            "seed": self.seed,
            "cut_convention": "top pile first, drops rebuild the deck bottom-up",
            "statistics": {},
        }
        for name, series in self.series.items():
            rows = []
            for t in range(self.steps + 1):
                row = {
                    "t": t,
                    "mean": float(series.mean(t)),
                    "mean_exact": str(series.mean(t)),
                    "variance": float(series.variance(t)),
                }
                if exact_targets and name in exact_targets:
                    row["target"] = str(exact_targets[name][t])
                rows.append(row)
            out["statistics"][name] = rows
        return out


def run_trajectories(
    start,
    steps: int,
    trials: int,
    stepper: Callable,
    seed: int,
    stats: dict,
) -> SimulationReport:
    """Run independent trajectories and accumulate exact sample moments.

    Each trial uses its own stream (seed, trial+1), so the aggregate does
    not depend on execution order and a parallel split would reproduce the
    serial result bit for bit.
    """
    series = {
        name: StatSeries(
            total=[_ZERO] * (steps + 1),
            total_sq=[_ZERO] * (steps + 1),
            trials=trials,
        )
        for name in stats
    }
    for trial in range(trials):
        rng = RngStream(seed, trial + 1)
        state = start
        for t in range(steps + 1):
            if t:
                state = stepper(state, rng)
            for name, fn in stats.items():
                value = fn(state)
                s = series[name]
                s.total[t] += value
                s.total_sq[t] += value * value
    return SimulationReport(steps=steps, trials=trials, seed=seed, series=series)


# ---------------------------------------------------------------------------
# empirical-vs-exact comparison helpers (reporting layer: floats allowed)


@dataclass
class RowCheck:
    """Empirical one-step law against an exact matrix row."""

    trials: int
    max_z: float
    over_3_sigma: list  # state strings with 3 < z <= 4
    over_4_sigma: list
    chi_square: float
    chi_square_limit: float

    @property
    def ok(self) -> bool:
        return not self.over_4_sigma


def empirical_row_check(
    matrix: TransitionMatrix,
    start,
    trials: int,
    seed: int,
    stepper: Callable | None = None,
) -> RowCheck:
    """Sample one-step transitions and compare against the exact row.

    Entries beyond 3 binomial standard deviations are flagged; beyond 4
    they count as failures.  A chi-square statistic over the row support
    is reported against the approximate 0.999 quantile.
    """
    if stepper is None:
        stepper = matrix_stepper(matrix)
    rng = RngStream(seed, 0)
    counts: dict = {}
    for _ in range(trials):
        nxt = stepper(start, rng)
        counts[nxt] = counts.get(nxt, 0) + 1
    row = matrix.row_of(start)
    unexpected = set(counts) - set(row)
    if unexpected:
        raise AssertionError(f"sampler reached states of probability zero: {unexpected}")
    max_z = 0.0
    flag3, flag4 = [], []
    chi = 0.0
    for state, p in row.items():
        pf = float(p)
        observed = counts.get(state, 0)
        expected = trials * pf
        sigma = (trials * pf * (1.0 - pf)) ** 0.5
        z = abs(observed - expected) / sigma if sigma else 0.0
        max_z = max(max_z, z)
        if z > 4.0:
            flag4.append(str(state))
        elif z > 3.0:
            flag3.append(str(state))
        if expected:
            chi += (observed - expected) ** 2 / expected
    limit = chi_square_quantile(len(row) - 1, 0.999)
    return RowCheck(
        trials=trials,
        max_z=max_z,
        over_3_sigma=flag3,
        over_4_sigma=flag4,
        chi_square=chi,
        chi_square_limit=limit,
    )


def chi_square_quantile(df: int, p: float = 0.999) -> float:
    """Wilson-Hilferty approximation to the chi-square quantile."""
    if df < 1:
        return 0.0
    z = {0.999: 3.090232306167813, 0.99: 2.3263478740408408}.get(p)
    if z is None:
        raise ValueError("supported tail levels: 0.99, 0.999")
    a = 2.0 / (9.0 * df)
    return df * (1.0 - a + z * a**0.5) ** 3
