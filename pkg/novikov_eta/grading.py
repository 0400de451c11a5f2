"""Graded polynomial arithmetic over F2, Z_(2) and Q.

Monomials are exponent tuples with trailing zeros stripped: position ``j`` of a
monomial in family ``F`` is the exponent of the generator with index
``F.first_index + j``. A key of a :class:`Polynomial` is a tuple holding one such
monomial per family of its context.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import zip_longest
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from novikov_eta.config import get_config
from novikov_eta.exceptions import ContextError, NotTwoLocalError, TruncationError

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]
Key = tuple[Monomial, ...]


# ---------------------------------------------------------------------------
# Degrees
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class MultiDegree:
    """Cohomological degree s, Novikov degree t, internal degree u and optional motivic weight w."""

    s: int = 0
    t: int = 0
    u: int = 0
    w: Optional[int] = None

    @property
    def stem(self) -> int:
        return self.u - self.s

    @property
    def coweight(self) -> Optional[int]:
        return None if self.w is None else self.stem - self.w

    def __add__(self, other: "MultiDegree") -> "MultiDegree":
        w = None if self.w is None or other.w is None else self.w + other.w
        return MultiDegree(self.s + other.s, self.t + other.t, self.u + other.u, w)

    def shift(self, ds: int = 0, dt: int = 0, du: int = 0, dw: int = 0) -> "MultiDegree":
        w = None if self.w is None else self.w + dw
        return MultiDegree(self.s + ds, self.t + dt, self.u + du, w)

    def __str__(self) -> str:
        if self.w is None:
            return f"(s={self.s},t={self.t},u={self.u})"
        return f"(s={self.s},t={self.t},u={self.u},w={self.w})"


@dataclass(frozen=True)
class GeneratorFamily:
    """A named, indexed family of polynomial generators.

    ``parity`` selects the degree rule: ``even`` gives 2(2^i - 1), ``odd`` gives 2^(i+1) - 1.
    Motivic families also carry the weight 2^i - 1. ``max_exponent`` marks exterior-like
    families whose squares are rewritten by a relation elsewhere.
    """

    name: str
    symbol: str
    first_index: int
    parity: str = "even"
    motivic: bool = False
    novikov: bool = False
    max_exponent: Optional[int] = None

    def degree(self, index: int) -> int:
        if self.parity == "even":
            return 2 * (2**index - 1)
        return 2 ** (index + 1) - 1

    def weight(self, index: int) -> int:
        if not self.motivic:
            raise ContextError(f"Family {self.name} carries no motivic weight")
        return 2**index - 1

    def truncation(self, max_u: Optional[int] = None) -> int:
        """Largest generator index K with degree(K) <= max_u."""
        max_u = get_config().max_u if max_u is None else max_u
        index = self.first_index
        while self.degree(index + 1) <= max_u:
            index += 1
        return index

    def generator(self, index: int) -> Monomial:
        if index < self.first_index:
            raise ContextError(f"{self.name} has no generator with index {index}")
        return (0,) * (index - self.first_index) + (1,)

    def name_of(self, index: int) -> str:
        return f"{self.symbol}{index}"


ZETA = GeneratorFamily("zeta", "ζ", 1)
Q_FAMILY = GeneratorFamily("q", "q", 0, novikov=True)
V_FAMILY = GeneratorFamily("v", "v", 1)
M_FAMILY = GeneratorFamily("m", "m", 1)
T_FAMILY = GeneratorFamily("t", "t", 1)
XI = GeneratorFamily("xi", "ξ", 1, motivic=True)
TAU_FAMILY = GeneratorFamily("tau_fam", "τ", 0, parity="odd", motivic=True, max_exponent=1)

FAMILIES = {family.name: family for family in (ZETA, Q_FAMILY, V_FAMILY, M_FAMILY, T_FAMILY, XI, TAU_FAMILY)}


# ---------------------------------------------------------------------------
# Monomials
# ---------------------------------------------------------------------------


def strip(exponents: Iterable[int]) -> Monomial:
    exps = list(exponents)
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return tuple(x + y for x, y in zip_longest(a, b, fillvalue=0))


def mono_pow(a: Monomial, k: int) -> Monomial:
    return tuple(k * x for x in a) if k else ()


def mono_degree(family: GeneratorFamily, m: Monomial) -> int:
    return sum(e * family.degree(family.first_index + j) for j, e in enumerate(m) if e)


def mono_weight(family: GeneratorFamily, m: Monomial) -> int:
    return sum(e * family.weight(family.first_index + j) for j, e in enumerate(m) if e)


def mono_total(m: Monomial) -> int:
    return sum(m)


def mono_exponent(family: GeneratorFamily, m: Monomial, index: int) -> int:
    j = index - family.first_index
    return m[j] if 0 <= j < len(m) else 0


def mono_name(family: GeneratorFamily, m: Monomial) -> str:
    parts = []
    for j, e in enumerate(m):
        if e == 1:
            parts.append(family.name_of(family.first_index + j))
        elif e:
            parts.append(f"{family.name_of(family.first_index + j)}^{e}")
    return "·".join(parts) if parts else "1"


def key_mul(a: Key, b: Key) -> Key:
    return tuple(mono_mul(x, y) for x, y in zip(a, b))


def key_degree(context: Sequence[GeneratorFamily], key: Key) -> int:
    return sum(mono_degree(family, m) for family, m in zip(context, key))


def key_name(context: Sequence[GeneratorFamily], key: Key) -> str:
    parts = [mono_name(family, m) for family, m in zip(context, key) if m]
    return "·".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# Basis enumeration
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _family_basis(family: GeneratorFamily, u: int, t: Optional[int]) -> tuple[Monomial, ...]:
    top = family.truncation(u)
    indices = list(range(top, family.first_index - 1, -1))
    found: list[Monomial] = []
    exps = [0] * (top - family.first_index + 1)

    def extend(pos: int, remaining_u: int, remaining_t: Optional[int]) -> None:
        if pos == len(indices):
            if remaining_u == 0 and (remaining_t is None or remaining_t == 0):
                found.append(strip(exps))
            return
        index = indices[pos]
        slot = index - family.first_index
        d = family.degree(index)
        if d == 0:
            if remaining_u != 0 or remaining_t is None:
                return
            exps[slot] = remaining_t
            extend(pos + 1, 0, 0)
            exps[slot] = 0
            return
        bound = remaining_u // d
        if family.max_exponent is not None:
            bound = min(bound, family.max_exponent)
        if remaining_t is not None:
            bound = min(bound, remaining_t)
        for e in range(bound + 1):
            exps[slot] = e
            extend(pos + 1, remaining_u - e * d, None if remaining_t is None else remaining_t - e)
        exps[slot] = 0

    extend(0, u, t)
    return tuple(sorted(found))


def enumerate_basis(
    context: Union[GeneratorFamily, Sequence[GeneratorFamily]],
    u: int,
    t: Optional[int] = None,
    max_u: Optional[int] = None,
) -> list:
    """List every monomial of internal degree ``u`` in graded-lexicographic order.

    For a single family the result is a list of exponent tuples; for a context of several
    families it is a list of keys. ``t`` fixes the total exponent of the Novikov-graded
    family (q), which is required whenever that family has a degree-zero generator.

    Raises:
        TruncationError: If ``u`` exceeds MAX_U.
        ContextError: If the q-family is enumerated without a Novikov degree.
    """
    max_u = get_config().max_u if max_u is None else max_u
    if u > max_u:
        raise TruncationError(u, max_u)
    if u < 0:
        return []
    if isinstance(context, GeneratorFamily):
        if context.novikov and t is None:
            raise ContextError(f"Enumerating {context.name} needs a Novikov degree t")
        return list(_family_basis(context, u, t if context.novikov else None))

    context = tuple(context)
    keys: list[Key] = []

    def split(pos: int, remaining: int, prefix: tuple) -> None:
        family = context[pos]
        if pos == len(context) - 1:
            for m in enumerate_basis(family, remaining, t if family.novikov else None, max_u):
                keys.append(prefix + (m,))
            return
        for d in range(remaining + 1):
            if family.novikov and t is None:
                raise ContextError(f"Enumerating {family.name} needs a Novikov degree t")
            for m in _family_basis(family, d, t if family.novikov else None):
                split(pos + 1, remaining - d, prefix + (m,))

    split(0, u, ())
    return sorted(keys)


# ---------------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------------


def nu2(x: Union[int, Fraction]) -> int:
    """2-adic valuation of a nonzero integer or rational."""
    if x == 0:
        raise ValueError("the 2-adic valuation of 0 is not defined")
    if isinstance(x, Fraction):
        return nu2(x.numerator) - nu2(x.denominator) if x.denominator != 1 else nu2(x.numerator)
    x = abs(int(x))
    return (x & -x).bit_length() - 1


class LocalRational(Fraction):
    """A rational number with odd denominator, i.e. an element of Z localized at 2."""

    __slots__ = ()

    def __new__(cls, numerator=0, denominator=None):
        self = super().__new__(cls, numerator, denominator)
        if self.denominator % 2 == 0:
            raise NotTwoLocalError(f"{self.numerator}/{self.denominator} is not 2-local")
        return self

    def valuation(self) -> int:
        return nu2(self.numerator)


def localrat_normalize(n: int, d: int) -> LocalRational:
    """Reduce n/d to lowest terms.

    Raises:
        ZeroDivisionError: If ``d`` is zero.
        NotTwoLocalError: If the reduced denominator is even.
    """
    if d == 0:
        raise ZeroDivisionError("localrat_normalize with zero denominator")
    return LocalRational(n, d)


class Ring(str, Enum):
    F2 = "F2"
    Z2 = "Z(2)"
    Q = "Q"

    def normalize(self, c):
        if self is Ring.F2:
            return int(c) % 2 if not isinstance(c, Fraction) else _fraction_mod2(c)
        if self is Ring.Z2:
            return c if isinstance(c, LocalRational) else LocalRational(c)
        return Fraction(c)


def _fraction_mod2(c: Fraction) -> int:
    if c.denominator % 2 == 0:
        raise NotTwoLocalError(f"{c} has no reduction mod 2")
    return c.numerator % 2


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Sparse polynomial over a tuple of generator families.

    ``terms`` maps keys to nonzero coefficients; iteration follows the canonical
    graded-lexicographic order.
    """

    __slots__ = ("context", "ring", "terms")

    def __init__(
        self,
        context: Union[GeneratorFamily, Sequence[GeneratorFamily]],
        terms: Optional[Mapping[Key, object]] = None,
        ring: Ring = Ring.Q,
    ):
        self.context = (context,) if isinstance(context, GeneratorFamily) else tuple(context)
        self.ring = ring
        self.terms: dict[Key, object] = {}
        for key, coeff in (terms or {}).items():
            self._accumulate(key, coeff)

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, context, value=1, ring: Ring = Ring.Q) -> "Polynomial":
        context = (context,) if isinstance(context, GeneratorFamily) else tuple(context)
        return cls(context, {tuple(() for _ in context): value}, ring)

    @classmethod
    def generator(cls, context, family: GeneratorFamily, index: int, ring: Ring = Ring.Q) -> "Polynomial":
        context = (context,) if isinstance(context, GeneratorFamily) else tuple(context)
        if family not in context:
            raise ContextError(f"{family.name} is not part of the context")
        key = tuple(family.generator(index) if f == family else () for f in context)
        return cls(context, {key: 1}, ring)

    def _accumulate(self, key: Key, coeff) -> None:
        key = tuple(strip(m) for m in key)
        if len(key) != len(self.context):
            raise ContextError(f"Key {key} does not match a context of {len(self.context)} families")
        value = self.ring.normalize(self.terms.get(key, 0) + coeff)
        if value:
            self.terms[key] = value
        else:
            self.terms.pop(key, None)

    def copy(self) -> "Polynomial":
        clone = Polynomial(self.context, ring=self.ring)
        clone.terms = dict(self.terms)
        return clone

    # -- inspection ---------------------------------------------------------

    def __iter__(self) -> Iterator[tuple[Key, object]]:
        return iter(self.sorted_terms())

    def sorted_terms(self) -> list[tuple[Key, object]]:
        return sorted(self.terms.items(), key=lambda item: (key_degree(self.context, item[0]), item[0]))

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({key_degree(self.context, key) for key in self.terms}) <= 1

    def degree(self) -> Optional[int]:
        degrees = {key_degree(self.context, key) for key in self.terms}
        if len(degrees) > 1:
            raise ContextError("degree() of an inhomogeneous polynomial")
        return degrees.pop() if degrees else None

    def coefficient(self, key: Key):
        return self.terms.get(tuple(strip(m) for m in key), 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.context == other.context and self.ring == other.ring and self.terms == other.terms
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.context, self.ring, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, coeff in self.sorted_terms():
            name = key_name(self.context, key)
            if coeff == 1:
                parts.append(name)
            elif name == "1":
                parts.append(str(coeff))
            else:
                parts.append(f"{coeff}·{name}")
        return " + ".join(parts)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if not isinstance(other, Polynomial):
            raise ContextError(f"Cannot combine a polynomial with {type(other).__name__}")
        if self.context != other.context or self.ring != other.ring:
            raise ContextError(
                f"Mixed contexts: {[f.name for f in self.context]}/{self.ring.value} "
                f"vs {[f.name for f in other.context]}/{other.ring.value}"
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        result = self.copy()
        for key, coeff in other.terms.items():
            result._accumulate(key, coeff)
        return result

    def __neg__(self) -> "Polynomial":
        return self.scale(-1)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        result = Polynomial(self.context, ring=self.ring)
        for key, coeff in self.terms.items():
            result._accumulate(key, coeff * c)
        return result

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        result = Polynomial(self.context, ring=self.ring)
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                result._accumulate(key_mul(k1, k2), c1 * c2)
        return result

    __rmul__ = scale

    def __pow__(self, k: int) -> "Polynomial":
        result = Polynomial.constant(self.context, 1, self.ring)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def with_ring(self, ring: Ring) -> "Polynomial":
        """Reinterpret the coefficients in another ring (reduction mod 2 when ``ring`` is F2)."""
        return Polynomial(self.context, self.terms, ring)

    def substitute(self, images: Mapping[tuple[int, int], "Polynomial"], target_context, ring: Ring) -> "Polynomial":
        """Apply the ring map sending generator (family position, index) to ``images[...]``.

        Generators without an image are mapped to the same generator of ``target_context``
        when that family is present there.
        """
        target_context = (target_context,) if isinstance(target_context, GeneratorFamily) else tuple(target_context)
        powers: dict[tuple[int, int, int], Polynomial] = {}

        def image_power(pos: int, index: int, e: int) -> Polynomial:
            cached = powers.get((pos, index, e))
            if cached is None:
                base = images.get((pos, index))
                if base is None:
                    family = self.context[pos]
                    base = Polynomial.generator(target_context, family, index, ring)
                cached = base**e
                powers[(pos, index, e)] = cached
            return cached

        result = Polynomial(target_context, ring=ring)
        for key, coeff in self.terms.items():
            term = Polynomial.constant(target_context, coeff, ring)
            for pos, (family, m) in enumerate(zip(self.context, key)):
                for j, e in enumerate(m):
                    if e:
                        term = term * image_power(pos, family.first_index + j, e)
            result = result + term
        return result


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    """Product of two polynomials in the same context.

    Raises:
        ContextError: If the contexts or coefficient rings differ.
    """
    return a * b
