"""Normalized cobar complexes.

A term of a cobar element is keyed by ``(prefix, word)``:

* ``P;Q`` / ``P;Qmod2``: prefix is a Q-monomial, the word a tuple of P-monomials, F2 coefficients;
* ``BPBP;BPstar`` / ``BPBP;BPstarMod2``: prefix is a v-monomial, the word a tuple of t-monomials,
  Z_(2) (resp. F2) coefficients;
* ``AMot;M2`` / ``EMot;M2``: prefix is the exponent of τ, the word a tuple of M2-basis monomials.

BP differentials are evaluated in the m-basis, where the right unit and the diagonal have
closed forms, and converted back to the v-basis afterwards.
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

from novikov_eta.config import get_config
from novikov_eta.exceptions import BudgetError, ContextError, FiltrationError, IntegralityError, TruncationError
from novikov_eta.grading import (
    Q_FAMILY,
    T_FAMILY,
    TAU_FAMILY,
    V_FAMILY,
    XI,
    ZETA,
    LocalRational,
    Monomial,
    MultiDegree,
    Polynomial,
    Ring,
    enumerate_basis,
    mono_degree,
    mono_mul,
    mono_name,
    mono_total,
    nu2,
    strip,
)
from novikov_eta.hopf import (
    COMODULE_BP,
    COMODULE_BPMOD2,
    COMODULE_M2,
    COMODULE_Q,
    COMODULE_QMOD2,
    HOPF_AMOT,
    HOPF_BPBP,
    HOPF_EMOT,
    HOPF_P,
    ComoduleSpec,
    HopfSpec,
    amot_degree,
    amot_weight,
    coaction_Q,
    eta_R_m_monomial,
    m_in_v,
    reduced_coaction_Q,
    reduced_diagonal_BP_m,
    v_in_m,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CobarContext:
    """A (Hopf algebra, comodule) pair."""

    id: str
    hopf: HopfSpec = field(compare=False)
    comodule: ComoduleSpec = field(compare=False)

    @property
    def is_bp(self) -> bool:
        return self.hopf.id == "BPBP"

    @property
    def is_motivic(self) -> bool:
        return self.hopf.tau_linear

    @property
    def mod2(self) -> bool:
        return self.comodule.mod_q0

    def __str__(self) -> str:
        return self.id


P_Q = CobarContext("P;Q", HOPF_P, COMODULE_Q)
P_QMOD2 = CobarContext("P;Qmod2", HOPF_P, COMODULE_QMOD2)
BP = CobarContext("BPBP;BPstar", HOPF_BPBP, COMODULE_BP)
BP_MOD2 = CobarContext("BPBP;BPstarMod2", HOPF_BPBP, COMODULE_BPMOD2)
AMOT = CobarContext("AMot;M2", HOPF_AMOT, COMODULE_M2)
EMOT = CobarContext("EMot;M2", HOPF_EMOT, COMODULE_M2)

CONTEXTS = {context.id: context for context in (P_Q, P_QMOD2, BP, BP_MOD2, AMOT, EMOT)}


def get_context(context_id: str) -> CobarContext:
    try:
        return CONTEXTS[context_id]
    except KeyError:
        raise ContextError(f"Unknown cobar context {context_id!r}; expected one of {sorted(CONTEXTS)}") from None


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


class CobarElement:
    """A finite sum of coefficient-prefixed words in canonical (coefficient-left) form."""

    __slots__ = ("context", "terms")

    def __init__(self, context: CobarContext, terms: Optional[dict] = None):
        self.context = context
        self.terms: dict = {}
        for key, coeff in (terms or {}).items():
            self._accumulate(key, coeff)

    def _integral(self) -> bool:
        return self.context.is_bp and not self.context.mod2

    def _accumulate(self, key, coeff) -> None:
        if self._integral():
            value = Fraction(self.terms.get(key, 0)) + Fraction(coeff)
            if value:
                if value.denominator % 2 == 0:
                    raise IntegralityError(f"Coefficient {value} of {key} is not 2-local")
                self.terms[key] = LocalRational(value)
            else:
                self.terms.pop(key, None)
        else:
            value = (self.terms.get(key, 0) + _mod2(coeff)) % 2
            if value:
                self.terms[key] = 1
            else:
                self.terms.pop(key, None)

    @classmethod
    def from_keys(cls, context: CobarContext, keys: Iterable) -> "CobarElement":
        element = cls(context)
        for key in keys:
            element._accumulate(key, 1)
        return element

    # -- inspection ---------------------------------------------------------

    @property
    def s(self) -> int:
        lengths = {len(word) for _, word in self.terms}
        if len(lengths) > 1:
            raise ContextError(f"Cobar element mixes cohomological degrees {sorted(lengths)}")
        return lengths.pop() if lengths else 0

    def degree(self) -> Optional[MultiDegree]:
        degrees = {_key_degree(self.context, key) for key in self.terms}
        if len(degrees) > 1:
            raise ContextError(f"Cobar element is not homogeneous: {sorted(degrees)}")
        return degrees.pop() if degrees else None

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda item: _sort_key(self.context, item[0]))

    def __iter__(self):
        return iter(self.sorted_terms())

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, CobarElement):
            return self.context == other.context and self.terms == other.terms
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.context.id, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (prefix, word), coeff in self.sorted_terms():
            prefix_name = _prefix_name(self.context, prefix)
            body = "[" + "|".join(_slot_name(self.context, slot) for slot in word) + "]"
            lead = "" if prefix_name == "1" else prefix_name
            if coeff != 1:
                lead = f"{coeff}·{lead}" if lead else f"{coeff}"
            parts.append(f"{lead}{body}")
        return " + ".join(parts)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "CobarElement") -> None:
        if not isinstance(other, CobarElement) or other.context != self.context:
            raise ContextError("Cobar elements from different contexts cannot be combined")

    def copy(self) -> "CobarElement":
        clone = CobarElement(self.context)
        clone.terms = dict(self.terms)
        return clone

    def __add__(self, other: "CobarElement") -> "CobarElement":
        self._check(other)
        result = self.copy()
        for key, coeff in other.terms.items():
            result._accumulate(key, coeff)
        return result

    def __neg__(self) -> "CobarElement":
        return self.scale(-1)

    def __sub__(self, other: "CobarElement") -> "CobarElement":
        return self + (-other)

    def scale(self, c) -> "CobarElement":
        result = CobarElement(self.context)
        for key, coeff in self.terms.items():
            result._accumulate(key, coeff * c)
        return result

    def reduce_mod2(self) -> "CobarElement":
        """Reduction of an integral BP element to the mod-2 context."""
        if self.context != BP:
            raise ContextError(f"reduce_mod2 expects an integral BP element, got {self.context}")
        result = CobarElement(BP_MOD2)
        for key, coeff in self.terms.items():
            result._accumulate(key, coeff)
        return result


def _mod2(coeff) -> int:
    if isinstance(coeff, Fraction):
        if coeff.denominator % 2 == 0:
            raise IntegralityError(f"{coeff} has no reduction mod 2")
        return coeff.numerator % 2
    return int(coeff) % 2


def _slot_degree(context: CobarContext, slot) -> int:
    return context.hopf.degree(slot)


def _key_degree(context: CobarContext, key) -> MultiDegree:
    prefix, word = key
    u_word = sum(_slot_degree(context, slot) for slot in word)
    if context.is_motivic:
        weight = sum(amot_weight(slot) for slot in word) - prefix
        return MultiDegree(len(word), 0, u_word, weight)
    if context.is_bp:
        return MultiDegree(len(word), 0, u_word + mono_degree(V_FAMILY, prefix))
    return MultiDegree(len(word), mono_total(prefix), u_word + mono_degree(Q_FAMILY, prefix))


def _sort_key(context: CobarContext, key):
    prefix, word = key
    return (
        tuple(_slot_degree(context, slot) for slot in word),
        word,
        prefix,
    )


def _prefix_name(context: CobarContext, prefix) -> str:
    if context.is_motivic:
        return "1" if prefix == 0 else ("τ" if prefix == 1 else f"τ^{prefix}")
    family = V_FAMILY if context.is_bp else Q_FAMILY
    return mono_name(family, prefix)


def _slot_name(context: CobarContext, slot) -> str:
    if context.is_motivic:
        xi, taus = slot
        parts = [p for p in (mono_name(XI, xi) if xi else "", mono_name(TAU_FAMILY, taus) if taus else "") if p]
        return "·".join(parts)
    return mono_name(T_FAMILY if context.is_bp else ZETA, slot)


# ---------------------------------------------------------------------------
# BP basis conversion and coefficient crossing
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _v_monomial_in_m(v: Monomial) -> tuple:
    result = {(): Fraction(1)}
    for j, e in enumerate(v):
        if e:
            factor = v_in_m(V_FAMILY.first_index + j) ** e
            nxt: dict = defaultdict(Fraction)
            for k1, c1 in result.items():
                for (k2,), c2 in factor.terms.items():
                    nxt[mono_mul(k1, k2)] += c1 * c2
            result = {k: c for k, c in nxt.items() if c}
    return tuple(result.items())


@lru_cache(maxsize=None)
def _m_monomial_in_v(m: Monomial) -> tuple:
    result = {(): Fraction(1)}
    for j, e in enumerate(m):
        if e:
            factor = m_in_v(j + 1) ** e
            nxt: dict = defaultdict(Fraction)
            for k1, c1 in result.items():
                for (k2,), c2 in factor.terms.items():
                    nxt[mono_mul(k1, k2)] += c1 * c2
            result = {k: c for k, c in nxt.items() if c}
    return tuple(result.items())


def _to_m_terms(element: CobarElement) -> dict:
    terms: dict = defaultdict(Fraction)
    for (v, word), coeff in element.terms.items():
        for m, c in _v_monomial_in_m(v):
            terms[(m, word)] += c * coeff
    return {key: c for key, c in terms.items() if c}


def _from_m_terms(m_terms: dict, context: CobarContext) -> CobarElement:
    v_terms: dict = defaultdict(Fraction)
    for (m, word), coeff in m_terms.items():
        for v, c in _m_monomial_in_v(m):
            v_terms[(v, word)] += c * coeff
    result = CobarElement(context)
    for key, coeff in v_terms.items():
        if not coeff:
            continue
        if coeff.denominator % 2 == 0:
            raise IntegralityError(f"Prefix coefficient {coeff} of {key} is not 2-local after conversion to v-basis")
        result._accumulate(key, coeff)
    return result


@lru_cache(maxsize=None)
def _cross_left(pending: Monomial, slots: tuple) -> tuple:
    """Move an m-coefficient sitting right of ``slots`` to the far left.

    Uses t ⊗ b t' = η_R(b) t ⊗ t', one slot at a time from right to left. Returns
    ((m-coefficient, new slots), rational) pairs.
    """
    state = {(pending, ()): Fraction(1)}
    for slot in reversed(slots):
        nxt: dict = defaultdict(Fraction)
        for (b, suffix), c in state.items():
            for (m2, t2), c2 in eta_R_m_monomial(b).terms.items():
                nxt[(m2, (mono_mul(slot, t2),) + suffix)] += c * c2
        state = {key: c for key, c in nxt.items() if c}
    return tuple(state.items())


def _bp_differential_m(m_terms: dict) -> dict:
    """Cobar differential of an element in the m-basis (canonical words)."""
    out: dict = defaultdict(Fraction)
    for (prefix, word), coeff in m_terms.items():
        for (m2, t2), c2 in eta_R_m_monomial(prefix).terms.items():
            if t2:
                out[(m2, (t2,) + word)] += coeff * c2
        for i, gamma in enumerate(word, start=1):
            sign = -1 if i % 2 else 1
            head, tail = word[: i - 1], word[i:]
            by_coefficient: dict = defaultdict(list)
            for (a, x, y), c3 in reduced_diagonal_BP_m(gamma).terms.items():
                by_coefficient[a].append((x, y, c3))
            for a, pieces in by_coefficient.items():
                for (b, new_head), c4 in _cross_left(a, head):
                    new_prefix = mono_mul(prefix, b)
                    for x, y, c3 in pieces:
                        out[(new_prefix, new_head + (x, y) + tail)] += sign * coeff * c3 * c4
    return {key: c for key, c in out.items() if c}


# ---------------------------------------------------------------------------
# Canonicalization of raw BP expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RawTerm:
    """A BP cobar term whose coefficients may sit inside slots.

    ``slots`` holds (v-monomial coefficient, t-monomial) pairs, read left to right.
    """

    coefficient: Fraction
    prefix: Monomial
    slots: tuple


def canonicalize(x: Union[CobarElement, Sequence[RawTerm]], context: Optional[CobarContext] = None) -> CobarElement:
    """Pull every coefficient to the prefix, converting to the v-basis.

    Raises:
        IntegralityError: If a prefix coefficient ends up outside Z_(2).
        ContextError: If a slot has no positive-degree t-part.
    """
    if isinstance(x, CobarElement):
        if not x.context.is_bp:
            return x.copy()
        return _from_m_terms(_to_m_terms(x), x.context)
    context = context or BP
    m_terms: dict = defaultdict(Fraction)
    for term in x:
        prefix_m = _v_monomial_in_m(term.prefix)
        state = {((), ()): Fraction(1)}
        for coeff_v, t_part in reversed(term.slots):
            if not t_part:
                raise ContextError(f"Slot with coefficient {coeff_v} has no positive-degree t-part")
            nxt: dict = defaultdict(Fraction)
            for (b, suffix), c in state.items():
                for (m2, t2), c2 in eta_R_m_monomial(b).terms.items():
                    for a, c3 in _v_monomial_in_m(coeff_v):
                        nxt[(mono_mul(a, m2), (mono_mul(t_part, t2),) + suffix)] += c * c2 * c3
            state = {key: c for key, c in nxt.items() if c}
        for (b, word), c in state.items():
            for p, cp in prefix_m:
                m_terms[(mono_mul(p, b), word)] += Fraction(term.coefficient) * c * cp
    return _from_m_terms({k: c for k, c in m_terms.items() if c}, context)


# ---------------------------------------------------------------------------
# Differentials
# ---------------------------------------------------------------------------


def _f2_differential_keys(context: CobarContext, key) -> dict:
    """Differential of a single basis key in an F2 or F2[τ] context.

    Returns {target key: 1} for F2 contexts; for τ-linear contexts the keys already
    carry the τ-power in their prefix.
    """
    prefix, word = key
    out: dict = {}

    def toggle(target) -> None:
        if target in out:
            del out[target]
        else:
            out[target] = 1

    if context.is_motivic:
        for i, gamma in enumerate(word):
            for k, left, right in context.hopf.reduced_diagonal(gamma):
                toggle((prefix + k, word[:i] + (left, right) + word[i + 1 :]))
        return out

    for c2, p in reduced_coaction_Q(prefix, context.mod2):
        toggle((c2, (p,) + word))
    for i, gamma in enumerate(word):
        for left, right in context.hopf.reduced_diagonal(gamma):
            toggle((prefix, word[:i] + (left, right) + word[i + 1 :]))
    return out


def differential(x: CobarElement) -> CobarElement:
    """Cobar differential d(c[γ1|…|γs]) = ψ̄(c)[γ1|…] + Σ (-1)^i c[…|Δ̄γi|…].

    Raises:
        IntegralityError: Propagated from the v-basis conversion.
    """
    context = x.context
    if context.is_bp:
        integral = x if context == BP else CobarElement(BP, {key: 1 for key in x.terms})
        d = _from_m_terms(_bp_differential_m(_to_m_terms(integral)), BP)
        return d if context == BP else d.reduce_mod2()
    result = CobarElement(context)
    for key in x.terms:
        for target in _f2_differential_keys(context, key):
            result._accumulate(target, 1)
    return result


def concatenate(a: CobarElement, b: CobarElement) -> CobarElement:
    """Cochain-level product a·b.

    For a comodule-algebra coefficient the coaction of b's prefix is distributed over a's
    slots: (m[a1|…|as])(n[b…]) = Σ m n(0) [a1 n(1)|…|as n(s)|b…].
    """
    if a.context != b.context:
        raise ContextError("Cannot multiply cobar elements from different contexts")
    context = a.context
    result = CobarElement(context)
    if context.is_motivic:
        for (k1, w1), c1 in a.terms.items():
            for (k2, w2), c2 in b.terms.items():
                result._accumulate((k1 + k2, w1 + w2), c1 * c2)
        return result
    if context.is_bp:
        # Only products with a coefficient-free right factor are needed on the BP side.
        for (p1, w1), c1 in a.terms.items():
            for (p2, w2), c2 in b.terms.items():
                if p2:
                    raise ContextError("BP products need a right factor with unit prefix")
                result._accumulate((p1, w1 + w2), c1 * c2)
        return result
    for (m, w1), _ in a.terms.items():
        s = len(w1)
        for (n, w2), _ in b.terms.items():
            for n0, distributed in _iterated_coaction(n, s, context.mod2):
                new_word = tuple(mono_mul(slot, extra) for slot, extra in zip(w1, distributed))
                result._accumulate((mono_mul(m, n0), new_word + w2), 1)
    return result


@lru_cache(maxsize=None)
def _iterated_coaction(n: Monomial, s: int, mod2: bool) -> tuple:
    """ψ^(s)(n) = Σ n(0) ⊗ n(1) ⊗ … ⊗ n(s) as a tuple of (n(0), (n(1), …, n(s))) over F2."""
    state = {(n, ()): 1}
    for _ in range(s):
        nxt: dict = {}
        for (m, tail), _ in state.items():
            for m0, p in coaction_Q(m, mod2):
                key = (m0, (p,) + tail)
                if key in nxt:
                    del nxt[key]
                else:
                    nxt[key] = 1
        state = nxt
    return tuple(state)


# ---------------------------------------------------------------------------
# Filtration, associated graded, splitting
# ---------------------------------------------------------------------------


def _term_filtration(context: CobarContext, prefix: Monomial, coeff) -> int:
    valuation = 0 if context.mod2 else nu2(coeff)
    return valuation + mono_total(prefix)


def filtration(x: CobarElement) -> Optional[int]:
    """I-adic filtration: min over terms of ν2(coefficient) + total v-exponent (None for 0)."""
    if not x.context.is_bp:
        raise ContextError("filtration is defined on BP cobar elements")
    if x.is_zero():
        return None
    return min(_term_filtration(x.context, prefix, coeff) for (prefix, _), coeff in x.terms.items())


def gr_project(x: CobarElement, f: int) -> CobarElement:
    """Terms of filtration exactly f, mapped by 2↦q0, vi↦qi, ti↦ζi.

    Raises:
        FiltrationError: If x has terms of filtration below f.
    """
    current = filtration(x)
    target = P_QMOD2 if x.context.mod2 else P_Q
    if current is None:
        return CobarElement(target)
    if current < f:
        raise FiltrationError(f"Element has filtration {current} < {f}")
    result = CobarElement(target)
    for (prefix, word), coeff in x.terms.items():
        if _term_filtration(x.context, prefix, coeff) != f:
            continue
        q0 = 0 if x.context.mod2 else nu2(coeff)
        result._accumulate((strip((q0,) + prefix), word), 1)
    return result


def split_lift(z: CobarElement) -> CobarElement:
    """The non-linear section ζi↦ti, qi↦vi, q0↦2 of gr_project."""
    if z.context not in (P_Q, P_QMOD2):
        raise ContextError(f"split_lift expects a P-context element, got {z.context}")
    target = BP_MOD2 if z.context.mod2 else BP
    result = CobarElement(target)
    for (prefix, word), _ in z.terms.items():
        q0 = prefix[0] if prefix else 0
        result._accumulate((strip(prefix[1:]), word), 2**q0)
    return result


def project_E(x: CobarElement) -> Polynomial:
    """Coefficient of [ζ1|…|ζ1] in a P-context element, as an F2 polynomial in Q."""
    if x.context not in (P_Q, P_QMOD2):
        raise ContextError(f"project_E expects a P-context element, got {x.context}")
    result = Polynomial(Q_FAMILY, ring=Ring.F2)
    for (prefix, word), _ in x.terms.items():
        if all(slot == (1,) for slot in word):
            result = result + Polynomial(Q_FAMILY, {(prefix,): 1}, Ring.F2)
    return result


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _slot_monomials(hopf_id: str, d: int, max_u: int) -> tuple:
    hopf = _hopf_by_id(hopf_id)
    return tuple(hopf.slot_basis(d, max_u))


def _hopf_by_id(hopf_id: str) -> HopfSpec:
    for context in CONTEXTS.values():
        if context.hopf.id == hopf_id:
            return context.hopf
    raise ContextError(f"Unknown Hopf algebra {hopf_id!r}")


def _max_slot_weight(d: int) -> int:
    return d // 2


@lru_cache(maxsize=None)
def _count_words(hopf_id: str, s: int, total: int, min_weight: Optional[int], max_u: int) -> int:
    if s == 0:
        return 1 if total == 0 and (min_weight is None or min_weight <= 0) else 0
    if min_weight is not None and min_weight > _max_slot_weight(total):
        return 0
    hopf = _hopf_by_id(hopf_id)
    count = 0
    for d in range(1, total + 1):
        for slot in _slot_monomials(hopf_id, d, max_u):
            rest_weight = None if min_weight is None else min_weight - hopf.weight(slot)
            count += _count_words(hopf_id, s - 1, total - d, rest_weight, max_u)
    return count


@lru_cache(maxsize=None)
def _words(hopf_id: str, s: int, total: int, min_weight: Optional[int], max_u: int) -> tuple:
    """Words of s positive-degree slots with the given total degree, slot degrees ascending first."""
    if s == 0:
        return ((),) if total == 0 and (min_weight is None or min_weight <= 0) else ()
    if min_weight is not None and min_weight > _max_slot_weight(total):
        return ()
    hopf = _hopf_by_id(hopf_id)
    found = []
    for d in range(1, total + 1):
        for slot in _slot_monomials(hopf_id, d, max_u):
            rest_weight = None if min_weight is None else min_weight - hopf.weight(slot)
            for rest in _words(hopf_id, s - 1, total - d, rest_weight, max_u):
                found.append((slot,) + rest)
    return tuple(found)


def _q_prefixes(context: CobarContext, u0: int, t: int, max_u: int) -> list:
    prefixes = enumerate_basis(Q_FAMILY, u0, t, max_u=max_u)
    if context.mod2:
        prefixes = [p for p in prefixes if not (p and p[0])]
    return prefixes


def _check_bounds(context: CobarContext, degree: MultiDegree, max_u: int) -> None:
    config = get_config()
    if degree.u > max_u:
        raise TruncationError(degree.u, max_u)
    if degree.s > config.max_s + 1 or degree.t > config.max_t + 1:
        logger.debug("Block %s %s lies past the configured s/t bounds", context, degree)


def block_size(context: CobarContext, degree: MultiDegree, max_u: Optional[int] = None) -> int:
    """Number of basis elements of a block, computed without enumerating it."""
    max_u = get_config().max_u if max_u is None else max_u
    s, t, u, w = degree.s, degree.t, degree.u, degree.w
    if context.is_motivic:
        return _count_words(context.hopf.id, s, u, w, max_u)
    total = 0
    for u0 in range(0, u + 1, 2):
        n_prefix = len(_q_prefixes(context, u0, t, max_u))
        if n_prefix:
            total += n_prefix * _count_words(context.hopf.id, s, u - u0, None, max_u)
    return total


@lru_cache(maxsize=None)
def _block_basis(context: CobarContext, degree: MultiDegree, max_u: int) -> tuple:
    s, t, u, w = degree.s, degree.t, degree.u, degree.w
    if context.is_motivic:
        words = _words(context.hopf.id, s, u, w, max_u)
        if w is None:
            return tuple((0, word) for word in words)
        return tuple((sum(amot_weight(slot) for slot in word) - w, word) for word in words)
    basis = []
    for u0 in range(0, u + 1, 2):
        prefixes = _q_prefixes(context, u0, t, max_u)
        if not prefixes:
            continue
        words = _words(context.hopf.id, s, u - u0, None, max_u)
        basis.extend((prefix, word) for prefix in prefixes for word in words)
    return tuple(basis)


def block_basis(context: CobarContext, degree: MultiDegree, max_u: Optional[int] = None) -> tuple:
    """Canonical basis of Ω^{s}(Γ; M^t)_u (weight w for motivic contexts).

    Raises:
        BudgetError: If the block exceeds the configured budget.
        ContextError: For the integral BP context, which has no finite blocks.
    """
    if context.is_bp:
        raise ContextError("BP cobar complexes are evaluated elementwise, not blockwise")
    config = get_config()
    max_u = config.max_u if max_u is None else max_u
    _check_bounds(context, degree, max_u)
    size = block_size(context, degree, max_u)
    if size > config.block_budget:
        raise BudgetError(context.id, degree, size, config.block_budget)
    return _block_basis(context, degree, max_u)


@dataclass(frozen=True)
class ComplexBlock:
    """Basis of one block and its differential into the next block.

    ``d_out[i]`` lists the target indices hit by basis element ``i`` (F2 contexts) or maps
    target indices to F2[τ] bit-polynomials (unweighted τ-linear blocks).
    """

    context: CobarContext
    degree: MultiDegree
    basis: tuple
    index: dict = field(compare=False, repr=False)
    d_out: tuple = field(compare=False, repr=False)
    target_size: int = 0

    def __len__(self) -> int:
        return len(self.basis)

    def element(self, i: int) -> CobarElement:
        return CobarElement.from_keys(self.context, [self.basis[i]])

    def element_from_bits(self, indices: Iterable[int]) -> CobarElement:
        return CobarElement.from_keys(self.context, [self.basis[i] for i in indices])

    def coordinates(self, x: CobarElement) -> list[int]:
        """Indices of the basis elements occurring in x.

        Raises:
            ContextError: If x has a term outside this block.
        """
        indices = []
        for key in x.terms:
            try:
                indices.append(self.index[key])
            except KeyError:
                raise ContextError(f"Term {key} does not belong to block {self.context} {self.degree}") from None
        return sorted(indices)


_block_cache: dict = {}


def build_block(context: CobarContext, s: int, t: int, u: int, w: Optional[int] = None) -> ComplexBlock:
    """Assemble the basis of Ω^{s,t,u(,w)} and its differential matrix into degree s+1.

    Raises:
        BudgetError: With the block size, when the basis exceeds the configured cap.
    """
    config = get_config()
    degree = MultiDegree(s, t, u, w)
    cache_key = (context.id, degree, config.max_u, config.block_budget)
    cached = _block_cache.get(cache_key)
    if cached is not None:
        return cached
    basis = block_basis(context, degree)
    target_basis = block_basis(context, degree.shift(ds=1))
    target_index = {key: i for i, key in enumerate(target_basis)}
    tau_matrix = context.is_motivic and w is None
    rows = []
    for key in basis:
        image = _f2_differential_keys(context, key)
        if tau_matrix:
            row: dict = {}
            for (k, word), _ in image.items():
                j = _lookup(target_index, (0, word), context, degree)
                row[j] = row.get(j, 0) ^ (1 << k)
            rows.append({j: bits for j, bits in row.items() if bits})
        else:
            rows.append(tuple(sorted(_lookup(target_index, target, context, degree) for target in image)))
    block = ComplexBlock(
        context=context,
        degree=degree,
        basis=basis,
        index={key: i for i, key in enumerate(basis)},
        d_out=tuple(rows),
        target_size=len(target_basis),
    )
    logger.debug("Built block %s %s: %d basis elements", context, degree, len(basis))
    _block_cache[cache_key] = block
    return block


def _lookup(index: dict, key, context: CobarContext, degree: MultiDegree) -> int:
    try:
        return index[key]
    except KeyError:
        raise ContextError(f"Differential of a {context} element at {degree} left the next block: {key}") from None


def clear_block_cache() -> None:
    _block_cache.clear()
    _block_basis.cache_clear()


def d_squared_is_zero(block: ComplexBlock, following: ComplexBlock) -> bool:
    """Check d∘d = 0 between two consecutive F2 blocks."""
    for row in block.d_out:
        acc: set = set()
        for j in row:
            for k in following.d_out[j]:
                acc ^= {k}
        if acc:
            return False
    return True


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------

_FACTOR = re.compile(r"(ζ|z|xi|ξ|q|v|m|tau|τ|t)(\d*)(?:\^(\d+))?")
_SEPARATORS = re.compile(r"[\s*·]+")
_COEFFICIENT = re.compile(r"^\s*(\d+(?:/\d+)?)?\s*[*·]?\s*")


def _split_terms(text: str) -> list[tuple[int, str]]:
    text = text.replace("−", "-")
    terms = []
    depth = 0
    sign = 1
    current = ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if depth == 0 and ch in "+-":
            if current.strip():
                terms.append((sign, current))
            sign = -1 if ch == "-" else 1
            current = ""
            continue
        current += ch
    if current.strip():
        terms.append((sign, current))
    return terms


def _parse_factors(text: str) -> list[tuple[str, Optional[int], int]]:
    factors = []
    position = 0
    text = text.strip()
    while position < len(text):
        gap = _SEPARATORS.match(text, position)
        if gap:
            position = gap.end()
            continue
        match = _FACTOR.match(text, position)
        if not match:
            raise ValueError(f"Cannot parse monomial near {text[position:]!r}")
        symbol, index, exponent = match.groups()
        factors.append((symbol, int(index) if index else None, int(exponent) if exponent else 1))
        position = match.end()
    return factors


def _monomial(family, factors) -> Monomial:
    exps: dict = defaultdict(int)
    for index, e in factors:
        exps[index - family.first_index] += e
    size = max(exps, default=-1) + 1
    return strip(exps.get(j, 0) for j in range(size))


def _parse_prefix(context: CobarContext, text: str):
    factors = _parse_factors(text)
    if context.is_motivic:
        power = 0
        for symbol, index, e in factors:
            if symbol not in ("τ", "tau") or index is not None:
                raise ValueError(f"Unexpected prefix factor {symbol}{index} in a motivic element")
            power += e
        return power
    family = V_FAMILY if context.is_bp else Q_FAMILY
    expected = "v" if context.is_bp else "q"
    for symbol, index, _ in factors:
        if symbol != expected or index is None:
            raise ValueError(f"Unexpected prefix factor {symbol}{index} for context {context}")
    return _monomial(family, [(index, e) for _, index, e in factors])


def _parse_slot(context: CobarContext, text: str):
    factors = _parse_factors(text)
    if context.is_motivic:
        xi = [(index, e) for symbol, index, e in factors if symbol in ("ξ", "xi")]
        taus = [(index, e) for symbol, index, e in factors if symbol in ("τ", "tau") and index is not None]
        if any(e > 1 for _, e in taus) or len({i for i, _ in taus}) != len(taus):
            raise ValueError(f"Slot {text!r} repeats a τ-generator; write it in the M2 basis")
        return (_monomial(XI, xi), _monomial(TAU_FAMILY, taus))
    if context.is_bp:
        coeff = _monomial(V_FAMILY, [(index, e) for symbol, index, e in factors if symbol == "v"])
        t_part = _monomial(T_FAMILY, [(index, e) for symbol, index, e in factors if symbol == "t"])
        return (coeff, t_part)
    return _monomial(ZETA, [(index, e) for symbol, index, e in factors if symbol in ("ζ", "z")])


def parse_cobar(context: Union[CobarContext, str], text: str) -> CobarElement:
    """Read an element written like ``v1^2[t1] + 2 v1[t1^2] + 4/3 [t1^3]``.

    Slots may hold sums (``q1[ζ2+ζ1^3]``); BP slots may carry v-coefficients, which are
    pulled to the prefix by :func:`canonicalize`.
    """
    if isinstance(context, str):
        context = get_context(context)
    raw: list[RawTerm] = []
    simple: dict = defaultdict(Fraction)
    for sign, chunk in _split_terms(text):
        if "[" in chunk:
            head, _, rest = chunk.partition("[")
            body = rest.rsplit("]", 1)[0]
            slot_texts = [] if not body.strip() else body.split("|")
        else:
            head, slot_texts = chunk, []
        match = _COEFFICIENT.match(head)
        coeff = Fraction(match.group(1)) if match.group(1) else Fraction(1)
        prefix = _parse_prefix(context, head[match.end() :])
        alternatives = [[_parse_slot(context, piece) for piece in slot.split("+")] for slot in slot_texts]
        words: list[tuple] = [()]
        for options in alternatives:
            words = [word + (option,) for word in words for option in options]
        for word in words:
            if context.is_bp:
                raw.append(RawTerm(sign * coeff, prefix, word))
            else:
                simple[(prefix, word)] += sign * coeff
    if context.is_bp:
        integral = canonicalize(raw, BP)
        return integral.reduce_mod2() if context == BP_MOD2 else integral
    return CobarElement(context, {key: c for key, c in simple.items() if c})
