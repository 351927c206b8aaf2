"""Named operator presets and their expansion to validated specs.

Every preset expands to the same canonical form: a list of (composition,
weight) terms handed to `normalize_spec`.  Weights may be any
non-negative rationals; probability-style presets (biased, trinomial)
normalise so that the overall constant beta_n is 1.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .hopf import CppSpec, SpecError, normalize_spec
from .linalg import rat

_ONE = Fraction(1)


def weak_compositions(n: int, parts: int):
    """All tuples of `parts` non-negative integers summing to n."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in weak_compositions(n - first, parts - 1):
            yield (first,) + rest


def riffle_spec(n: int, a: int = 2) -> CppSpec:
    """a-handed riffle: weight 1 on every cut into at most a piles."""
    if a < 2:
        raise SpecError("riffle needs at least 2 hands")
    return normalize_spec(n, [(comp, _ONE) for comp in weak_compositions(n, a)])


def biased_spec(n: int, qs) -> CppSpec:
    """Biased cuts: pile sizes (d_1..d_a) get weight prod q_i^(d_i).

    The q_i must be non-negative and sum to 1; with all q_i = 1/a this is
    the a-handed riffle up to the overall constant.
    """
    qs = [rat(q) for q in qs]
    if len(qs) < 2:
        raise SpecError("biased cuts need at least 2 pile probabilities")
    if any(q < 0 for q in qs):
        raise SpecError("pile probabilities must be non-negative")
    if sum(qs) != 1:
        raise SpecError(f"pile probabilities must sum to 1, got {sum(qs)}")
    terms = []
    for comp in weak_compositions(n, len(qs)):
        w = _ONE
        for q, d in zip(qs, comp):
            w *= q**d
        terms.append((comp, w))
    return normalize_spec(n, terms)


def top_m_ordered_spec(n: int, m: int) -> CppSpec:
    """Cut off the top m cards as a block and reinsert, keeping their order."""
    if not 1 <= m <= n:
        raise SpecError(f"m must be within 1..{n}")
    return normalize_spec(n, [((m, n - m), _ONE)])


def top_m_unordered_spec(n: int, m: int) -> CppSpec:
    """Cut off the top m cards one by one and reinsert in any order."""
    if not 1 <= m <= n:
        raise SpecError(f"m must be within 1..{n}")
    return normalize_spec(n, [((1,) * m + (n - m,), _ONE)])


def top_or_bottom_spec(n: int, q) -> CppSpec:
    """Move the top card with probability q, else the bottom card."""
    q = rat(q)
    if not 0 <= q <= 1:
        raise SpecError("q must lie in [0, 1]")
    return normalize_spec(n, [((1, n - 1), q), ((n - 1, 1), 1 - q)])


def top_to_random_spec(n: int) -> CppSpec:
    return normalize_spec(n, [((1, n - 1), _ONE)])


def bottom_to_random_spec(n: int) -> CppSpec:
    return normalize_spec(n, [((n - 1, 1), _ONE)])


def trinomial_spec(n: int, q1, q2, q3) -> CppSpec:
    """Trinomial top-and-bottom moves.

    Each term peels m1 cards singly off the top and m3 singly off the
    bottom, keeping a middle block of size m2, with weight
    q1^m1 q2^m2 q3^m3 / (m1! m3!) over all m1+m2+m3 = n.
    """
    q1, q2, q3 = rat(q1), rat(q2), rat(q3)
    if any(q < 0 for q in (q1, q2, q3)):
        raise SpecError("trinomial parameters must be non-negative")
    if q1 + q2 + q3 != 1:
        raise SpecError(f"trinomial parameters must sum to 1, got {q1 + q2 + q3}")
    terms = []
    for m1 in range(n + 1):
        for m2 in range(n + 1 - m1):
            m3 = n - m1 - m2
            comp = (1,) * m1 + (m2,) + (1,) * m3
            w = q1**m1 * q2**m2 * q3**m3 / (factorial(m1) * factorial(m3))
            terms.append((comp, w))
    return normalize_spec(n, terms)


_PRESETS = {
    "riffle": (riffle_spec, ("a",)),
    "biased": (None, ("q", "qs")),  # expanded specially below
    "top-m-ordered": (top_m_ordered_spec, ("m",)),
    "top-m-unordered": (top_m_unordered_spec, ("m",)),
    "top-or-bottom": (top_or_bottom_spec, ("q",)),
    "top-to-random": (top_to_random_spec, ()),
    "bottom-to-random": (bottom_to_random_spec, ()),
    "trinomial": (trinomial_spec, ("q1", "q2", "q3")),
}


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def expand_preset(name: str, n: int, params: dict | None = None) -> CppSpec:
    """Expand a named preset at degree n; parameters as {"q": "1/3", ...}.

    Accepted names and parameters:
      riffle [a=2]; biased (q | qs=q1,..,qa); top-m-ordered (m);
      top-m-unordered (m); top-or-bottom (q); top-to-random;
      bottom-to-random; trinomial (q1, q2, q3).
    """
    params = dict(params or {})
    if name not in _PRESETS:
        raise SpecError(f"unknown preset {name!r}; known: {', '.join(preset_names())}")
    if name == "riffle":
        a = int(params.pop("a", 2))
        _reject_extras(name, params)
        return riffle_spec(n, a)
    if name == "biased":
        if "qs" in params:
            qs = [rat(q) for q in str(params.pop("qs")).split("+")]
        elif "q" in params:
            q = rat(params.pop("q"))
            qs = [q, 1 - q]
        else:
            raise SpecError("biased needs q (two hands) or qs=q1+q2+...")
        _reject_extras(name, params)
        return biased_spec(n, qs)
    if name in ("top-m-ordered", "top-m-unordered"):
        if "m" not in params:
            raise SpecError(f"{name} needs parameter m")
        m = int(params.pop("m"))
        _reject_extras(name, params)
        fn = top_m_ordered_spec if name == "top-m-ordered" else top_m_unordered_spec
        return fn(n, m)
    if name == "top-or-bottom":
        q = rat(params.pop("q", _ONE / 2))
        _reject_extras(name, params)
        return top_or_bottom_spec(n, q)
    if name == "top-to-random":
        _reject_extras(name, params)
        return top_to_random_spec(n)
    if name == "bottom-to-random":
        _reject_extras(name, params)
        return bottom_to_random_spec(n)
    if name == "trinomial":
        missing = [k for k in ("q1", "q2", "q3") if k not in params]
        if missing:
            raise SpecError(f"trinomial needs parameters {', '.join(missing)}")
        q1, q2, q3 = params.pop("q1"), params.pop("q2"), params.pop("q3")
        _reject_extras(name, params)
        return trinomial_spec(n, q1, q2, q3)
    raise SpecError(f"unhandled preset {name!r}")  # pragma: no cover


def _reject_extras(name: str, params: dict) -> None:
    if params:
        raise SpecError(f"unknown parameters for preset {name!r}: {sorted(params)}")
