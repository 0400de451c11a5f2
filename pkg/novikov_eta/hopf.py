"""Structure maps of the Hopf algebras and comodules in play.

* ``P = F2[ζ1, ζ2, ...]`` with Δζn = Σ ζi ⊗ ζj^(2^i), and its quotient ``E = E[ζ1]``.
* ``Q = F2[q0, q1, ...]`` with coaction qn ↦ Σ qi ⊗ ζj^(2^i), and ``Q/(q0)``.
* The BP Hopf algebroid, computed inside ``Q[m1, m2, ...][t1, t2, ...]`` (m-basis) and
  converted to Hazewinkel v-generators only at the boundary.
* The motivic dual Steenrod algebra ``A_Mot`` over ``M2 = F2[τ]`` with τn² = τ ξ(n+1),
  and its exterior quotient ``E_Mot``.

F2 sums are frozensets of terms; symmetric difference is addition.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional

from novikov_eta.exceptions import IntegralityError, NotTwoLocalError
from novikov_eta.grading import (
    M_FAMILY,
    Q_FAMILY,
    T_FAMILY,
    TAU_FAMILY,
    V_FAMILY,
    XI,
    ZETA,
    GeneratorFamily,
    Monomial,
    Polynomial,
    Ring,
    enumerate_basis,
    mono_degree,
    mono_mul,
    mono_pow,
    mono_weight,
    strip,
)

logger = logging.getLogger(__name__)

# Right-hand tensor factor of BP_*BP ⊗ BP_*BP.
T_RIGHT = GeneratorFamily("t_right", "t'", 1)

M_CTX = (M_FAMILY,)
V_CTX = (V_FAMILY,)
MT_CTX = (M_FAMILY, T_FAMILY)
VT_CTX = (V_FAMILY, T_FAMILY)
MTT_CTX = (M_FAMILY, T_FAMILY, T_RIGHT)
VTT_CTX = (V_FAMILY, T_FAMILY, T_RIGHT)

AMotMonomial = tuple[Monomial, Monomial]


def _toggle(acc: set, item) -> None:
    if item in acc:
        acc.remove(item)
    else:
        acc.add(item)


def _tensor_product(a: Iterable[tuple[Monomial, Monomial]], b: Iterable[tuple[Monomial, Monomial]]) -> frozenset:
    acc: set = set()
    for l1, r1 in a:
        for l2, r2 in b:
            _toggle(acc, (mono_mul(l1, l2), mono_mul(r1, r2)))
    return frozenset(acc)


def _frobenius(terms: Iterable[tuple[Monomial, Monomial]], k: int) -> frozenset:
    scale = 2**k
    return frozenset((mono_pow(left, scale), mono_pow(right, scale)) for left, right in terms)


def _power_by_bits(generator_terms: frozenset, e: int) -> frozenset:
    """Raise an F2 sum of commuting tensors to the e-th power using Frobenius on each bit."""
    result = frozenset({((), ())})
    k = 0
    while e:
        if e & 1:
            result = _tensor_product(result, _frobenius(generator_terms, k))
        e >>= 1
        k += 1
    return result


# ---------------------------------------------------------------------------
# P and E
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _diagonal_zeta(n: int) -> frozenset:
    terms = set()
    for i in range(n + 1):
        left = ZETA.generator(i) if i else ()
        right = mono_pow(ZETA.generator(n - i), 2**i) if n - i else ()
        _toggle(terms, (left, right))
    return frozenset(terms)


@lru_cache(maxsize=None)
def diagonal_P(m: Monomial) -> frozenset:
    """Δ of a P-monomial as a set of (left, right) P-monomials."""
    result = frozenset({((), ())})
    for j, e in enumerate(m):
        if e:
            result = _tensor_product(result, _power_by_bits(_diagonal_zeta(ZETA.first_index + j), e))
    return result


def reduced_diagonal_P(m: Monomial) -> frozenset:
    return frozenset((left, right) for left, right in diagonal_P(m) if left and right)


def project_to_E(m: Monomial) -> Optional[Monomial]:
    """Image of a P-monomial in E[ζ1]: 1 and ζ1 survive, everything else is zero."""
    if m in ((), (1,)):
        return m
    return None


def reduced_diagonal_E(m: Monomial) -> frozenset:
    return frozenset()


def counit_P(m: Monomial) -> int:
    return 1 if not m else 0


# ---------------------------------------------------------------------------
# Q and Q/(q0)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _coaction_q(n: int) -> frozenset:
    terms = set()
    for i in range(n + 1):
        left = Q_FAMILY.generator(i)
        right = mono_pow(ZETA.generator(n - i), 2**i) if n - i else ()
        _toggle(terms, (left, right))
    return frozenset(terms)


@lru_cache(maxsize=None)
def coaction_Q(m: Monomial, mod_q0: bool = False) -> frozenset:
    """ψ of a Q-monomial as a set of (Q-monomial, P-monomial) pairs.

    With ``mod_q0`` the coaction of Q/(q0) is returned: q0-divisible left factors vanish.
    """
    result = frozenset({((), ())})
    for j, e in enumerate(m):
        if e:
            result = _tensor_product(result, _power_by_bits(_coaction_q(Q_FAMILY.first_index + j), e))
    if mod_q0:
        result = frozenset((left, right) for left, right in result if not (left and left[0]))
    return result


def reduced_coaction_Q(m: Monomial, mod_q0: bool = False) -> frozenset:
    return frozenset((left, right) for left, right in coaction_Q(m, mod_q0) if right)


def coaction_Q_mod2(m: Monomial) -> frozenset:
    return coaction_Q(m, True)


def coaction_trivial(m: Monomial) -> frozenset:
    return frozenset({(m, ())})


# ---------------------------------------------------------------------------
# BP: Hazewinkel generators, right unit, diagonal
# ---------------------------------------------------------------------------


def _m(n: int, context=M_CTX) -> Polynomial:
    if n == 0:
        return Polynomial.constant(context, 1, Ring.Q)
    return Polynomial.generator(context, M_FAMILY, n, Ring.Q)


def _v(n: int, context=V_CTX) -> Polynomial:
    return Polynomial.generator(context, V_FAMILY, n, Ring.Q)


@lru_cache(maxsize=None)
def v_in_m(n: int) -> Polynomial:
    """v_n in Q[m1, m2, ...] from 2m_n = Σ_{0≤i<n} m_i v_{n-i}^(2^i)."""
    result = _m(n).scale(2)
    for i in range(1, n):
        result = result - _m(i) * v_in_m(n - i) ** (2**i)
    return result


@lru_cache(maxsize=None)
def m_in_v(n: int) -> Polynomial:
    """m_n in Q[v1, v2, ...]; denominators are powers of 2."""
    if n == 0:
        return Polynomial.constant(V_CTX, 1, Ring.Q)
    total = Polynomial(V_CTX, ring=Ring.Q)
    for i in range(n):
        total = total + m_in_v(i) * _v(n - i) ** (2**i)
    return total.scale(Fraction(1, 2))


def v_to_m(poly: Polynomial, target_context=None) -> Polynomial:
    """Rewrite the v-family (position 0) of ``poly`` in the m-basis."""
    target = tuple((M_FAMILY,) + poly.context[1:]) if target_context is None else target_context
    images = {}
    for key in poly.terms:
        for j, e in enumerate(key[0]):
            if e:
                n = V_FAMILY.first_index + j
                images[(0, n)] = _embed(v_in_m(n), target)
    return poly.substitute(images, target, Ring.Q)


def m_to_v(poly: Polynomial, target_context=None) -> Polynomial:
    """Rewrite the m-family (position 0) of ``poly`` in the v-basis; coefficients stay rational."""
    target = tuple((V_FAMILY,) + poly.context[1:]) if target_context is None else target_context
    images = {}
    for key in poly.terms:
        for j, e in enumerate(key[0]):
            if e:
                n = M_FAMILY.first_index + j
                images[(0, n)] = _embed(m_in_v(n), target)
    return poly.substitute(images, target, Ring.Q)


def _embed(poly: Polynomial, target_context) -> Polynomial:
    """Place a one-family polynomial into position 0 of a wider context."""
    padding = tuple(() for _ in target_context[1:])
    return Polynomial(target_context, {key + padding: c for key, c in poly.terms.items()}, poly.ring)


def to_local(poly: Polynomial) -> Polynomial:
    """Assert 2-local integrality and return the polynomial over Z_(2).

    Raises:
        IntegralityError: If some coefficient has an even denominator.
    """
    try:
        return poly.with_ring(Ring.Z2)
    except NotTwoLocalError as exc:
        raise IntegralityError(f"Non-integral BP coefficient in {poly!r}: {exc}") from exc


@lru_cache(maxsize=None)
def _eta_R_m_generator(n: int) -> Polynomial:
    """η_R(m_n) = Σ_{i+j=n} m_i t_j^(2^i) in Q[m][t]."""
    result = Polynomial(MT_CTX, ring=Ring.Q)
    for i in range(n + 1):
        j = n - i
        m_part = M_FAMILY.generator(i) if i else ()
        t_part = mono_pow(T_FAMILY.generator(j), 2**i) if j else ()
        result = result + Polynomial(MT_CTX, {(m_part, t_part): 1}, Ring.Q)
    return result


@lru_cache(maxsize=None)
def eta_R_m_monomial(m: Monomial) -> Polynomial:
    """η_R of an m-monomial, as a polynomial in (m, t)."""
    result = Polynomial.constant(MT_CTX, 1, Ring.Q)
    for j, e in enumerate(m):
        if e:
            result = result * _eta_R_m_generator(M_FAMILY.first_index + j) ** e
    return result


def eta_R_m(c: Polynomial) -> Polynomial:
    """η_R of a polynomial in the m-basis (context ``M_CTX``), landing in ``MT_CTX``."""
    result = Polynomial(MT_CTX, ring=Ring.Q)
    for (m,), coeff in c.terms.items():
        result = result + eta_R_m_monomial(m).scale(coeff)
    return result


def eta_R(c: Polynomial, mod2: bool = False) -> Polynomial:
    """Right unit of a BP_*-element given in the v-basis.

    Returns a polynomial over ``(v, t)`` with Z_(2) coefficients, or over F2 with ``mod2``.

    Raises:
        IntegralityError: If the converted result is not 2-locally integral.
    """
    result = to_local(m_to_v(eta_R_m(v_to_m(c.with_ring(Ring.Q), M_CTX)), VT_CTX))
    return result.with_ring(Ring.F2) if mod2 else result


@lru_cache(maxsize=None)
def _diagonal_t_generator(n: int) -> Polynomial:
    """Δt_n in the m-basis over (m, t, t')."""
    if n == 0:
        return Polynomial.constant(MTT_CTX, 1, Ring.Q)
    result = Polynomial(MTT_CTX, ring=Ring.Q)
    for i in range(n + 1):
        for j in range(n - i + 1):
            k = n - i - j
            m_part = M_FAMILY.generator(i) if i else ()
            left = mono_pow(T_FAMILY.generator(j), 2**i) if j else ()
            right = mono_pow(T_RIGHT.generator(k), 2 ** (i + j)) if k else ()
            result = result + Polynomial(MTT_CTX, {(m_part, left, right): 1}, Ring.Q)
    for i in range(1, n + 1):
        m_i = Polynomial(MTT_CTX, {(M_FAMILY.generator(i), (), ()): 1}, Ring.Q)
        result = result - m_i * _diagonal_t_generator(n - i) ** (2**i)
    return result


@lru_cache(maxsize=None)
def diagonal_BP_m(m: Monomial) -> Polynomial:
    """Δ of a t-monomial in the m-basis over (m, t, t')."""
    result = Polynomial.constant(MTT_CTX, 1, Ring.Q)
    for j, e in enumerate(m):
        if e:
            result = result * _diagonal_t_generator(T_FAMILY.first_index + j) ** e
    return result


@lru_cache(maxsize=None)
def reduced_diagonal_BP_m(m: Monomial) -> Polynomial:
    """Δ̄ = Δ - γ⊗1 - 1⊗γ of a t-monomial, m-basis."""
    full = diagonal_BP_m(m)
    edges = Polynomial(MTT_CTX, {((), m, ()): 1, ((), (), m): 1}, Ring.Q)
    reduced = full - edges
    stray = [key for key in reduced.terms if not key[1] or not key[2]]
    if stray:
        raise IntegralityError(f"Diagonal of t-monomial {m} has unexpected unit-side terms {stray}")
    return reduced


def diagonal_BP(m: Monomial) -> Polynomial:
    """Δ of a t-monomial with coefficients moved to the v-basis (context ``VTT_CTX``, Z_(2))."""
    return to_local(m_to_v(diagonal_BP_m(m), VTT_CTX))


def t1_tensor_t1_coefficient(m: Monomial) -> Polynomial:
    """BP_*-coefficient (v-basis) of t1⊗t1 in Δ(t^m)."""
    diagonal = diagonal_BP(m)
    coefficient = Polynomial(V_CTX, ring=Ring.Z2)
    for (v_part, left, right), c in diagonal.terms.items():
        if left == (1,) and right == (1,):
            coefficient = coefficient + Polynomial(V_CTX, {(v_part,): c}, Ring.Z2)
    return coefficient


def counit_BP(m: Monomial) -> int:
    return 1 if not m else 0


# ---------------------------------------------------------------------------
# A_Mot and E_Mot over F2[τ]
# ---------------------------------------------------------------------------


def amot_degree(m: AMotMonomial) -> int:
    return mono_degree(XI, m[0]) + mono_degree(TAU_FAMILY, m[1])


def amot_weight(m: AMotMonomial) -> int:
    return mono_weight(XI, m[0]) + mono_weight(TAU_FAMILY, m[1])


def amot_mul(a: AMotMonomial, b: AMotMonomial) -> tuple[int, AMotMonomial]:
    """Product of two M2-basis monomials, renormalized with τ_n² = τ ξ_(n+1).

    Returns the power of τ produced and the resulting basis monomial.
    """
    xi = list(mono_mul(a[0], b[0]))
    tau_a, tau_b = a[1], b[1]
    length = max(len(tau_a), len(tau_b))
    taus = []
    tau_power = 0
    for i in range(length):
        e = (tau_a[i] if i < len(tau_a) else 0) + (tau_b[i] if i < len(tau_b) else 0)
        if e == 2:
            tau_power += 1
            # τ_i² = τ ξ_(i+1); ξ_(i+1) sits at position i of the ξ monomial.
            while len(xi) <= i:
                xi.append(0)
            xi[i] += 1
            e = 0
        taus.append(e)
    return tau_power, (strip(xi), strip(taus))


def emot_mul(a: AMotMonomial, b: AMotMonomial) -> Optional[tuple[int, AMotMonomial]]:
    """Product in the exterior quotient E_Mot, or None when a τ_i repeats."""
    if a[0] or b[0]:
        return None
    tau_power, product = amot_mul(a, b)
    if tau_power:
        return None
    return 0, product


def _amot_tensor_product(a: Iterable, b: Iterable, mul: Callable) -> frozenset:
    acc: set = set()
    for k1, l1, r1 in a:
        for k2, l2, r2 in b:
            left = mul(l1, l2)
            right = mul(r1, r2)
            if left is None or right is None:
                continue
            _toggle(acc, (k1 + k2 + left[0] + right[0], left[1], right[1]))
    return frozenset(acc)


_AMOT_ONE = frozenset({(0, ((), ()), ((), ()))})


@lru_cache(maxsize=None)
def _diagonal_xi(n: int) -> frozenset:
    terms: set = set()
    for i in range(n + 1):
        left = (mono_pow(XI.generator(n - i), 2**i) if n - i else (), ())
        right = (XI.generator(i) if i else (), ())
        _toggle(terms, (0, left, right))
    return frozenset(terms)


@lru_cache(maxsize=None)
def _diagonal_tau(n: int) -> frozenset:
    terms: set = {(0, ((), TAU_FAMILY.generator(n)), ((), ()))}
    for i in range(n + 1):
        left = (mono_pow(XI.generator(n - i), 2**i) if n - i else (), ())
        right = ((), TAU_FAMILY.generator(i))
        _toggle(terms, (0, left, right))
    return frozenset(terms)


@lru_cache(maxsize=None)
def diagonal_AMot(m: AMotMonomial) -> frozenset:
    """Δ of an M2-basis monomial ξ^E τ^δ as a set of (τ-power, left, right)."""
    result = _AMOT_ONE
    xi, taus = m
    for j, e in enumerate(xi):
        for _ in range(e):
            result = _amot_tensor_product(result, _diagonal_xi(XI.first_index + j), amot_mul)
    for j, e in enumerate(taus):
        if e:
            result = _amot_tensor_product(result, _diagonal_tau(TAU_FAMILY.first_index + j), amot_mul)
    return result


def reduced_diagonal_AMot(m: AMotMonomial) -> frozenset:
    return frozenset((k, left, right) for k, left, right in diagonal_AMot(m) if left != ((), ()) and right != ((), ()))


@lru_cache(maxsize=None)
def diagonal_EMot(m: AMotMonomial) -> frozenset:
    """Δ in E_Mot, where every τ_i is primitive."""
    result = _AMOT_ONE
    for j, e in enumerate(m[1]):
        if e:
            n = TAU_FAMILY.first_index + j
            primitive = frozenset(
                {(0, ((), TAU_FAMILY.generator(n)), ((), ())), (0, ((), ()), ((), TAU_FAMILY.generator(n)))}
            )
            result = _amot_tensor_product(result, primitive, emot_mul)
    return result


def reduced_diagonal_EMot(m: AMotMonomial) -> frozenset:
    return frozenset((k, left, right) for k, left, right in diagonal_EMot(m) if left != ((), ()) and right != ((), ()))


def counit_AMot(m: AMotMonomial) -> int:
    return 1 if m == ((), ()) else 0


@lru_cache(maxsize=None)
def amot_basis(u: int, max_u: Optional[int] = None) -> tuple[AMotMonomial, ...]:
    return tuple(tuple(key) for key in enumerate_basis((XI, TAU_FAMILY), u, max_u=max_u))


@lru_cache(maxsize=None)
def emot_basis(u: int, max_u: Optional[int] = None) -> tuple[AMotMonomial, ...]:
    return tuple(((), taus) for taus in enumerate_basis(TAU_FAMILY, u, max_u=max_u))


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HopfSpec:
    """A Hopf algebra usable as the coalgebra of a cobar complex.

    ``reduced_diagonal`` returns F2 sums; for τ-linear algebras each term carries a τ-power.
    """

    id: str
    coefficients: str
    families: tuple
    relations: tuple = ()
    tau_linear: bool = False
    slot_basis: Optional[Callable] = field(default=None, compare=False)
    reduced_diagonal: Optional[Callable] = field(default=None, compare=False)
    degree: Optional[Callable] = field(default=None, compare=False)
    weight: Optional[Callable] = field(default=None, compare=False)


@dataclass(frozen=True)
class ComoduleSpec:
    """A comodule over one of the Hopf algebras, given by its coefficient family and coaction."""

    id: str
    family: Optional[GeneratorFamily]
    mod_q0: bool = False
    coaction: Optional[Callable] = field(default=None, compare=False)


def p_basis(u: int, max_u: Optional[int] = None) -> tuple[Monomial, ...]:
    return tuple(enumerate_basis(ZETA, u, max_u=max_u))


def e_basis(u: int, max_u: Optional[int] = None) -> tuple[Monomial, ...]:
    return ((1,),) if u == 2 else ()


def p_degree(m: Monomial) -> int:
    return mono_degree(ZETA, m)


def t_degree(m: Monomial) -> int:
    return mono_degree(T_FAMILY, m)


HOPF_P = HopfSpec("P", "F2", (ZETA,), slot_basis=p_basis, reduced_diagonal=reduced_diagonal_P, degree=p_degree)
HOPF_E = HopfSpec("E", "F2", (ZETA,), slot_basis=e_basis, reduced_diagonal=reduced_diagonal_E, degree=p_degree)
HOPF_BPBP = HopfSpec("BPBP", "Z(2)", (V_FAMILY, T_FAMILY), degree=t_degree)
HOPF_AMOT = HopfSpec(
    "AMot",
    "F2[τ]",
    (XI, TAU_FAMILY),
    relations=("τ_n^2 = τ·ξ_(n+1)",),
    tau_linear=True,
    slot_basis=amot_basis,
    reduced_diagonal=reduced_diagonal_AMot,
    degree=amot_degree,
    weight=amot_weight,
)
HOPF_EMOT = HopfSpec(
    "EMot",
    "F2[τ]",
    (TAU_FAMILY,),
    relations=("τ_n^2 = 0",),
    tau_linear=True,
    slot_basis=emot_basis,
    reduced_diagonal=reduced_diagonal_EMot,
    degree=amot_degree,
    weight=amot_weight,
)

COMODULE_Q = ComoduleSpec("Q", Q_FAMILY, coaction=coaction_Q)
COMODULE_QMOD2 = ComoduleSpec("Qmod2", Q_FAMILY, mod_q0=True, coaction=coaction_Q_mod2)
COMODULE_BP = ComoduleSpec("BPstar", V_FAMILY)
COMODULE_BPMOD2 = ComoduleSpec("BPstarMod2", V_FAMILY, mod_q0=True)
COMODULE_M2 = ComoduleSpec("M2", None, coaction=coaction_trivial)
