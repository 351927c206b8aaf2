"""Graded connected Hopf-algebra plumbing over explicit combinatorial bases.

An `AlgebraHandle` supplies three things: a deterministic basis enumeration
per degree, the product of two basis elements, and the coproduct of one.
Everything else here is generic over the handle: rational linear
combinations, iterated (co)products, convolutions of graded projections
(the "break into pieces of prescribed sizes, then recombine" operators),
the normalisation constant of such an operator, the basis rescaling that
makes its matrix row-stochastic, and the structural checks a basis must
satisfy for those operators to define Markov chains.

Basis keys must be hashable, canonical (equal iff they denote the same
combinatorial object) and carry a `.degree` attribute; the unique degree-0
key plays the role of the unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .linalg import rat

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _add_term(d: dict, key, coeff) -> None:
    cur = d.get(key)
    if cur is None:
        if coeff:
            d[key] = coeff
    else:
        cur = cur + coeff
        if cur:
            d[key] = cur
        else:
            del d[key]


def _key_str(key) -> str:
    s = str(key)
    return s if s else "1"


class LinComb:
    """A finite rational linear combination of basis keys.

    Zero coefficients are never stored, so equality of combinations is
    plain dict equality.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            self.terms = {}
        else:
            self.terms = {k: rat(v) for k, v in dict(terms).items() if v}

    @classmethod
    def _wrap(cls, terms: dict) -> "LinComb":
        lc = cls.__new__(cls)
        lc.terms = terms
        return lc

    @classmethod
    def zero(cls) -> "LinComb":
        return cls._wrap({})

    @classmethod
    def single(cls, key, coeff=_ONE) -> "LinComb":
        coeff = rat(coeff)
        return cls._wrap({key: coeff} if coeff else {})

    def coefficient(self, key) -> Fraction:
        return self.terms.get(key, _ZERO)

    def items(self):
        return self.terms.items()

    def support(self):
        return set(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def scale(self, c) -> "LinComb":
        c = rat(c)
        if not c:
            return LinComb.zero()
        return LinComb._wrap({k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c) -> "LinComb":
        return self.scale(c)

    def __add__(self, other: "LinComb") -> "LinComb":
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_term(out, k, v)
        return LinComb._wrap(out)

    def __sub__(self, other: "LinComb") -> "LinComb":
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_term(out, k, -v)
        return LinComb._wrap(out)

    def __neg__(self) -> "LinComb":
        return self.scale(-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinComb) and self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms, key=_key_str):
            c = self.terms[key]
            bits.append(f"{c}*{_key_str(key)}" if c != 1 else _key_str(key))
        return " + ".join(bits)


class TensorComb:
    """A linear combination of arity-a tensors of basis keys."""

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms=None):
        self.arity = arity
        if terms is None:
            self.terms = {}
        else:
            self.terms = {tuple(k): rat(v) for k, v in dict(terms).items() if v}
        for k in self.terms:
            if len(k) != arity:
                raise ValueError(f"tensor key {k} has arity {len(k)}, expected {arity}")

    @classmethod
    def _wrap(cls, arity: int, terms: dict) -> "TensorComb":
        t = cls.__new__(cls)
        t.arity = arity
        t.terms = terms
        return t

    @classmethod
    def single(cls, keys, coeff=_ONE) -> "TensorComb":
        keys = tuple(keys)
        coeff = rat(coeff)
        return cls._wrap(len(keys), {keys: coeff} if coeff else {})

    def coefficient(self, keys) -> Fraction:
        return self.terms.get(tuple(keys), _ZERO)

    def items(self):
        return self.terms.items()

    def is_zero(self) -> bool:
        return not self.terms

    def scale(self, c) -> "TensorComb":
        c = rat(c)
        if not c:
            return TensorComb._wrap(self.arity, {})
        return TensorComb._wrap(self.arity, {k: c * v for k, v in self.terms.items()})

    def __add__(self, other: "TensorComb") -> "TensorComb":
        if self.arity != other.arity:
            raise ValueError("tensor arity mismatch")
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_term(out, k, v)
        return TensorComb._wrap(self.arity, out)

    def __sub__(self, other: "TensorComb") -> "TensorComb":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TensorComb)
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for keys in sorted(self.terms, key=lambda ks: tuple(_key_str(k) for k in ks)):
            c = self.terms[keys]
            tens = " (x) ".join(_key_str(k) for k in keys)
            bits.append(f"{c}*[{tens}]" if c != 1 else f"[{tens}]")
        return " + ".join(bits)


class AlgebraHandle:
    """Interface for a graded connected algebra/coalgebra on a combinatorial basis.

    Subclasses provide `basis`, `product_basis` and `coproduct_basis`, and
    set the `commutative` / `cocommutative` flags.  Handles are immutable
    after construction; the internal caches only memoise pure functions.
    """

    name = "abstract"
    commutative = False
    cocommutative = False

    def __init__(self):
        self._eta_cache: dict = {}

    def basis(self, n: int) -> list:
        """All basis keys of degree n, in a fixed canonical order."""
        raise NotImplementedError

    def unit_key(self):
        return self.basis(0)[0]

    def degree_one(self) -> list:
        return list(self.basis(1))

    def product_basis(self, x, y) -> LinComb:
        raise NotImplementedError

    def coproduct_basis(self, x) -> TensorComb:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<algebra {self.name}>"


# ---------------------------------------------------------------------------
# linear extensions of the structure maps


def product(alg: AlgebraHandle, w: LinComb, z: LinComb) -> LinComb:
    """Bilinear extension of the basis product."""
    out: dict = {}
    for x, cx in w.items():
        for y, cy in z.items():
            c = cx * cy
            for k, ck in alg.product_basis(x, y).items():
                _add_term(out, k, c * ck)
    return LinComb._wrap(out)


def coproduct(alg: AlgebraHandle, x: LinComb) -> TensorComb:
    """Linear extension of the basis coproduct (arity 2)."""
    out: dict = {}
    for key, c in x.items():
        for pair, ck in alg.coproduct_basis(key).items():
            _add_term(out, pair, c * ck)
    return TensorComb._wrap(2, out)


def tensor_square_product(alg: AlgebraHandle, s: TensorComb, t: TensorComb) -> TensorComb:
    """Componentwise product on H (x) H: (a(x)b)·(c(x)d) = (a·c)(x)(b·d)."""
    if s.arity != 2 or t.arity != 2:
        raise ValueError("tensor_square_product expects arity-2 tensors")
    out: dict = {}
    for (a, b), cs in s.items():
        for (c, d), ct in t.items():
            coeff = cs * ct
            left = alg.product_basis(a, c)
            right = alg.product_basis(b, d)
            for kl, cl in left.items():
                for kr, cr in right.items():
                    _add_term(out, (kl, kr), coeff * cl * cr)
    return TensorComb._wrap(2, out)


def iterated_coproduct(alg: AlgebraHandle, x: LinComb, a: int) -> TensorComb:
    """a-fold coproduct; a=1 is the identity, a=2 the plain coproduct.

    Built by expanding the last tensor leg at each step.  Coassociativity
    makes the result independent of which leg is expanded.
    """
    if a < 1:
        raise ValueError("arity must be >= 1")
    terms = {(k,): c for k, c in x.items()}
    for _ in range(a - 1):
        new: dict = {}
        for keys, c in terms.items():
            head = keys[:-1]
            for (u, v), ck in alg.coproduct_basis(keys[-1]).items():
                _add_term(new, head + (u, v), c * ck)
        terms = new
    return TensorComb._wrap(a, terms)


def _product_of_keys(alg: AlgebraHandle, keys) -> dict:
    """Left-to-right product of a sequence of basis keys, as a terms dict."""
    acc = {keys[0]: _ONE}
    for key in keys[1:]:
        new: dict = {}
        for x, cx in acc.items():
            for k, ck in alg.product_basis(x, key).items():
                _add_term(new, k, cx * ck)
        acc = new
    return acc


def iterated_product(alg: AlgebraHandle, t: TensorComb) -> LinComb:
    """Multiply the tensor legs together, left to right."""
    out: dict = {}
    for keys, c in t.items():
        if len(keys) == 0:
            _add_term(out, alg.unit_key(), c)
            continue
        for k, ck in _product_of_keys(alg, keys).items():
            _add_term(out, k, c * ck)
    return LinComb._wrap(out)


def homogeneous_degree(x: LinComb):
    """Common degree of all terms, or None for the zero combination."""
    degrees = {k.degree for k in x.terms}
    if not degrees:
        return None
    if len(degrees) > 1:
        raise ValueError(f"not homogeneous: degrees {sorted(degrees)}")
    return degrees.pop()


def apply_proj_convolution(alg: AlgebraHandle, x: LinComb, D) -> LinComb:
    """Break x into pieces of sizes exactly (d_1, ..., d_a), then recombine.

    Concretely: take the a-fold coproduct, keep only the tensors whose leg
    degrees match D (a graded projection on each leg), and multiply the
    legs back together.  Parts equal to 0 are allowed; the corresponding
    leg just picks off the unit.
    """
    D = tuple(int(d) for d in D)
    if any(d < 0 for d in D):
        raise ValueError(f"negative part in composition {D}")
    n = sum(D)
    deg = homogeneous_degree(x)
    if deg is None:
        return LinComb.zero()
    if deg != n:
        raise ValueError(f"degree mismatch: element has degree {deg}, composition sums to {n}")
    out: dict = {}
    delta = iterated_coproduct(alg, x, len(D))
    for keys, c in delta.items():
        if tuple(k.degree for k in keys) != D:
            continue
        for k, ck in _product_of_keys(alg, keys).items():
            _add_term(out, k, c * ck)
    return LinComb._wrap(out)


# ---------------------------------------------------------------------------
# breaking-size operators


class SpecError(ValueError):
    """Raised when an operator specification violates its axioms."""


@dataclass(frozen=True)
class CppSpec:
    """A validated non-negatively weighted sum of projection convolutions.

    `terms` maps compositions of n (no zero parts, canonically sorted) to
    positive rational weights.  Validity requires at least one weighted
    composition with two or more parts, so the operator genuinely breaks
    degree-n elements into smaller pieces.
    """

    n: int
    terms: tuple  # tuple of (composition tuple, Fraction weight)

    def max_arity(self) -> int:
        return max(len(comp) for comp, _ in self.terms)

    def __str__(self) -> str:
        bits = [f"{w}*Proj{comp}" for comp, w in self.terms]
        return " + ".join(bits)


def normalize_spec(n: int, terms) -> CppSpec:
    """Strip zero parts, merge equal compositions, and validate.

    Zero parts act through the unit and drop out of both the operator and
    its normalising constant, so the stripped form is a faithful canonical
    representative.  Raises SpecError (naming the offending term) if a
    weight is negative, a composition does not sum to n, or no positive
    weight sits on a composition with every part smaller than n.
    """
    if n < 1:
        raise SpecError(f"degree must be >= 1, got {n}")
    merged: dict = {}
    for comp, weight in terms:
        w = rat(weight)
        comp = tuple(int(d) for d in comp)
        if any(d < 0 for d in comp):
            raise SpecError(f"negative part in composition {comp}")
        if sum(comp) != n:
            raise SpecError(f"composition {comp} does not sum to n={n}")
        if w < 0:
            raise SpecError(f"negative weight {w} on composition {comp}")
        if w == 0:
            continue
        stripped = tuple(d for d in comp if d)
        merged[stripped] = merged.get(stripped, _ZERO) + w
    if not merged:
        raise SpecError("no composition carries positive weight")
    if not any(len(comp) >= 2 for comp in merged):
        raise SpecError(
            f"invalid operator at degree {n}: all weight sits on ({n},), "
            "which only rescales; some weight must break into smaller pieces"
        )
    return CppSpec(n=n, terms=tuple(sorted(merged.items())))


def multinomial(n: int, parts) -> int:
    """n! / (d_1! ... d_a!) for a composition of n."""
    result = factorial(n)
    for d in parts:
        result //= factorial(d)
    return result


def beta_n(spec: CppSpec) -> Fraction:
    """Normalising constant: sum of weight x multinomial over the terms."""
    return sum((w * multinomial(spec.n, comp) for comp, w in spec.terms), _ZERO)


def composition_law(spec: CppSpec) -> dict:
    """Probability of each piece-size composition in the breaking step.

    The probabilities are exact rationals and sum to 1.
    """
    beta = beta_n(spec)
    return {comp: w * multinomial(spec.n, comp) / beta for comp, w in spec.terms}


def apply_cpp(alg: AlgebraHandle, x: LinComb, spec: CppSpec) -> LinComb:
    """Apply the weighted sum of projection convolutions to homogeneous x.

    The a-fold coproduct is computed once per arity appearing in the spec
    and bucketed by leg-degree profile, so each composition term is a
    dictionary lookup.
    """
    deg = homogeneous_degree(x)
    if deg is None:
        return LinComb.zero()
    if deg != spec.n:
        raise ValueError(f"degree mismatch: element degree {deg}, spec degree {spec.n}")
    by_arity: dict = {}
    for comp, w in spec.terms:
        by_arity.setdefault(len(comp), []).append((comp, w))
    out: dict = {}
    for arity in sorted(by_arity):
        delta = iterated_coproduct(alg, x, arity)
        buckets: dict = {}
        for keys, c in delta.items():
            profile = tuple(k.degree for k in keys)
            buckets.setdefault(profile, []).append((keys, c))
        for comp, w in by_arity[arity]:
            for keys, c in buckets.get(comp, ()):
                wc = w * c
                for k, ck in _product_of_keys(alg, keys).items():
                    _add_term(out, k, wc * ck)
    return LinComb._wrap(out)


# ---------------------------------------------------------------------------
# basis rescaling and structural checks


def eta(alg: AlgebraHandle, key) -> Fraction:
    """Rescaling constant of a basis element of degree n >= 1.

    This is the coefficient sum after breaking the element all the way
    down into n degree-1 pieces; equivalently the number (with
    multiplicity) of ways to peel off one degree-1 piece at a time.  For a
    valid state space basis it is strictly positive.
    """
    if key.degree < 1:
        raise ValueError("eta is defined for degree >= 1")
    value = _eta(alg, key)
    if value <= 0:
        raise ValueError(
            f"rescaling constant of {key!r} is {value}; "
            "basis cannot carry a Markov chain"
        )
    return value


def _eta(alg: AlgebraHandle, key) -> Fraction:
    if key.degree == 0:
        return _ONE
    cached = alg._eta_cache.get(key)
    if cached is not None:
        return cached
    total = _ZERO
    for (w, c), coeff in alg.coproduct_basis(key).items():
        if c.degree == 1:
            total += coeff * _eta(alg, w)
    alg._eta_cache[key] = total
    return total


def check_state_space_basis(alg: AlgebraHandle, n_max: int) -> list[str]:
    """Verify the axioms a graded basis needs to carry Markov chains.

    Checks, for all degrees <= n_max: a one-dimensional degree 0,
    non-negative product and coproduct structure constants, degree
    additivity, and the absence of primitive basis elements above degree 1
    (every object of size > 1 must break into strictly smaller pieces).
    Only basis elements are inspected; the algebra may well contain
    primitive non-basis elements.  Returns a list of violation messages,
    empty on success.
    """
    violations = []
    b0 = alg.basis(0)
    if len(b0) != 1:
        violations.append(f"degree 0 has dimension {len(b0)}, expected 1")
    for d in range(n_max + 1):
        for x in alg.basis(d):
            delta = alg.coproduct_basis(x)
            inner = False
            for (u, v), c in delta.items():
                if c < 0:
                    violations.append(f"negative coproduct coefficient {c} on {u!r}(x){v!r} in {x!r}")
                if u.degree + v.degree != d:
                    violations.append(f"coproduct of {x!r} not degree-additive at {u!r}(x){v!r}")
                if 0 < u.degree < d:
                    inner = True
            if d > 1 and not inner:
                violations.append(f"primitive basis element {x!r} in degree {d}")
    for i in range(n_max + 1):
        for j in range(n_max + 1 - i):
            for x in alg.basis(i):
                for y in alg.basis(j):
                    for k, c in alg.product_basis(x, y).items():
                        if c < 0:
                            violations.append(
                                f"negative product coefficient {c} on {k!r} in {x!r}*{y!r}"
                            )
                        if k.degree != i + j:
                            violations.append(f"product {x!r}*{y!r} not degree-additive at {k!r}")
    return violations


def check_coassociativity(alg: AlgebraHandle, n_max: int) -> list[str]:
    """Compare both arity-3 refinements of the coproduct, degree by degree."""
    violations = []
    for d in range(n_max + 1):
        for x in alg.basis(d):
            delta = alg.coproduct_basis(x)
            left: dict = {}
            right: dict = {}
            for (u, v), c in delta.items():
                for (a, b), cu in alg.coproduct_basis(u).items():
                    _add_term(left, (a, b, v), c * cu)
                for (a, b), cv in alg.coproduct_basis(v).items():
                    _add_term(right, (u, a, b), c * cv)
            if left != right:
                violations.append(f"coassociativity fails on {x!r}")
    return violations


def check_bialgebra_compatibility(alg: AlgebraHandle, n_max: int) -> list[str]:
    """Coproduct of a product vs product of coproducts, for small degrees."""
    violations = []
    for i in range(n_max + 1):
        for j in range(n_max + 1 - i):
            for x in alg.basis(i):
                for y in alg.basis(j):
                    lhs = coproduct(alg, alg.product_basis(x, y))
                    rhs = tensor_square_product(
                        alg, alg.coproduct_basis(x), alg.coproduct_basis(y)
                    )
                    if lhs != rhs:
                        violations.append(f"compatibility fails on {x!r} * {y!r}")
    return violations


# ---------------------------------------------------------------------------
# JSON form of operator specifications


def spec_to_dict(spec: CppSpec) -> dict:
    return {
        "n": spec.n,
        "terms": [
            {"composition": list(comp), "weight": str(w)} for comp, w in spec.terms
        ],
    }


def spec_from_dict(data: dict) -> CppSpec:
    try:
        n = int(data["n"])
        terms = [(t["composition"], rat(t["weight"])) for t in data["terms"]]
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed spec JSON: {exc}") from exc
    return normalize_spec(n, terms)
