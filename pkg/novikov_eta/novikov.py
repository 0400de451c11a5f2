"""The algebraic Novikov layer.

- ``novikov_d1``: d1 of the algebraic Novikov spectral sequence via the splitting lift.
- ``margolis``: homology of Q^t (or (Q/q0)^t) under the operator P¹.
- ``detect_class`` / ``localize_h0``: the localization H*(P;M) → h0⁻¹H*(P;M) and its
  certification against the lines u−s < 5s−4 (onto) and u−s < 5s−10 (iso).
- ``minimal_lift_exponent``: the smallest N with q_{n+1}h0^N in the image of H*(P;Q¹).
- ``detect_alpha``: cocycle representatives of the ᾱ_s and their localized detection.
- ``assemble_Einfty``: the localized E2 = E∞ page, checked by ``einfty_mismatches``.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Optional

from novikov_eta.cobar import (
    BP,
    BP_MOD2,
    P_Q,
    P_QMOD2,
    CobarContext,
    CobarElement,
    concatenate,
    differential,
    filtration,
    gr_project,
    parse_cobar,
    project_E,
    split_lift,
)
from novikov_eta.datasets import SSDataset
from novikov_eta.exceptions import CertificationError, CocycleError, FiltrationError, SearchError
from novikov_eta.ext import ExtClass, ExtRegion, solve_coboundary
from novikov_eta.grading import (
    Q_FAMILY,
    V_FAMILY,
    Monomial,
    MultiDegree,
    Polynomial,
    Ring,
    enumerate_basis,
    mono_degree,
    mono_name,
    mono_total,
    strip,
)
from novikov_eta.hopf import VT_CTX, coaction_Q, eta_R
from novikov_eta.linalg import BitMatrix, EchelonBasis, bits_to_int, int_to_bits, nullspace, solve

logger = logging.getLogger(__name__)

LIFT_SEARCH_BOUND = 8

BP_COCYCLES = (
    "[t1]",
    "v1^2[t1] + 2v1[t1^2] + 4/3[t1^3]",
    "v2[t1|t1] + v1[t1|t1^3] - v1[t1^2|t1^2] + v1[t1^3|t1] - 3v1[t1|t2]"
    " + 2[t1|t1t2] + 2[t1^2|t1^3] - 2[t1^2|t2] + 2[t1t2|t1]",
)

MASSEY_COCYCLES = (
    "[ζ1]",
    "q1^2[ζ1] + q0q1[ζ1^2] + q0^2[ζ1^3]",
    "q2[ζ1|ζ1] + q1[ζ1|ζ1^3] + q1[ζ1^2|ζ1^2] + q1[ζ1^3|ζ1] + q1[ζ1|ζ2]"
    " + q0[ζ1|ζ1ζ2] + q0[ζ1^2|ζ1^3] + q0[ζ1^2|ζ2] + q0[ζ1ζ2|ζ1]",
)


def module_context(module_id: str) -> CobarContext:
    return P_QMOD2 if module_id in ("Qmod2", P_QMOD2.id, "mod2") else P_Q


def _module_id(context: CobarContext) -> str:
    return "Qmod2" if context.mod2 else "Q"


# ---------------------------------------------------------------------------
# d1
# ---------------------------------------------------------------------------


def novikov_d1_cochain(z: CobarElement, t: int) -> CobarElement:
    """gr^{t+1} d(split_lift(z)) for a cocycle z of Ω(P; Q^t).

    Raises:
        FiltrationError: If d(split_lift(z)) has filtration below t+1, i.e. z was not a cocycle.
    """
    lifted = differential(split_lift(z))
    f = filtration(lifted)
    if f is not None and f < t + 1:
        raise FiltrationError(f"d(split_lift(z)) has filtration {f} < {t + 1}; z is not a cocycle")
    return gr_project(lifted, t + 1)


def novikov_d1(engine: ExtRegion, x: ExtClass) -> ExtClass:
    """d1 x in H^{s+1,u}(P; Q^{t+1}) (or the Q/(q0) analogue)."""
    target_degree = x.degree.shift(ds=1, dt=1)
    home = engine.block(target_degree)
    if x.is_zero():
        return ExtClass.zero(home)
    image = novikov_d1_cochain(x.representative(), x.degree.t)
    return ExtClass.make(home, home.express(image))


# ---------------------------------------------------------------------------
# Margolis homology
# ---------------------------------------------------------------------------


def _q_basis(module_id: str, t: int, u: int) -> list[Monomial]:
    if u < 0:
        return []
    basis = enumerate_basis(Q_FAMILY, u, t, max_u=max(u, 0))
    if module_id == "Qmod2":
        basis = [m for m in basis if not (m and m[0])]
    return basis


def p1(m: Monomial, module_id: str = "Q") -> frozenset:
    """P¹ of a Q-monomial: the ζ1-coefficient of its coaction."""
    return frozenset(left for left, right in coaction_Q(m, module_id == "Qmod2") if right == (1,))


@dataclass
class MargolisGroup:
    """H(M; P¹) at one (t, u): kernel/image/homology with reduction helpers."""

    t: int
    u: int
    basis: list
    kernel_dim: int
    image_dim: int
    homology: list = field(default_factory=list)
    image: EchelonBasis = field(default_factory=EchelonBasis, repr=False)
    preimage: EchelonBasis = field(default_factory=EchelonBasis, repr=False)
    coordinates: EchelonBasis = field(default_factory=EchelonBasis, repr=False)
    source_basis: list = field(default_factory=list, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.homology)

    def vector(self, monomials) -> int:
        index = {m: i for i, m in enumerate(self.basis)}
        return bits_to_int(index[m] for m in monomials)

    def normal_form(self, monomials) -> frozenset:
        v = self.image.normal_form(self.vector(monomials))
        return frozenset(self.basis[i] for i in int_to_bits(v))

    def homology_coordinates(self, monomials) -> tuple:
        remainder, tag = self.coordinates.reduce(self.vector(monomials))
        if remainder:
            raise CocycleError(f"{sorted(monomials)} is not in the kernel of P¹ at (t,u)=({self.t},{self.u})")
        return tuple((tag >> i) & 1 for i in range(self.dimension))

    def p1_preimage(self, monomials) -> Optional[frozenset]:
        """Some e with P¹(e) = the given element, or None."""
        remainder, tag = self.preimage.reduce(self.vector(monomials))
        if remainder:
            return None
        return frozenset(self.source_basis[i] for i in int_to_bits(tag))


@dataclass
class MargolisData:
    module_id: str
    max_t: int
    max_u: int
    groups: dict = field(default_factory=dict)

    def group(self, t: int, u: int) -> MargolisGroup:
        key = (t, u)
        if key not in self.groups:
            self.groups[key] = margolis_group(self.module_id, t, u)
        return self.groups[key]

    def dimension(self, t: int, u: int) -> int:
        return self.group(t, u).dimension


def margolis_group(module_id: str, t: int, u: int) -> MargolisGroup:
    """H(M^t; P¹) at internal degree u, with the image of P¹ from degree u+2."""
    basis = _q_basis(module_id, t, u)
    index = {m: i for i, m in enumerate(basis)}
    lower = {m: i for i, m in enumerate(_q_basis(module_id, t, u - 2))}
    outgoing = BitMatrix.from_rows([[lower[n] for n in p1(m, module_id)] for m in basis], max(len(lower), 1))
    source_basis = _q_basis(module_id, t, u + 2)
    image = EchelonBasis()
    preimage = EchelonBasis()
    coordinates = EchelonBasis()
    image_dim = 0
    for j, m in enumerate(source_basis):
        v = bits_to_int(index[n] for n in p1(m, module_id))
        preimage.insert(v, 1 << j)
        if image.insert(v):
            coordinates.insert(v)
            image_dim += 1
    kernel_dim = 0
    homology = []
    if basis:
        kernel = nullspace(outgoing.transpose())
        kernel_dim = kernel.rows
        for i in range(kernel.rows):
            v = kernel.row_int(i)
            if coordinates.insert(v, 1 << len(homology)):
                homology.append(frozenset(basis[k] for k in int_to_bits(v)))
    return MargolisGroup(
        t=t,
        u=u,
        basis=basis,
        kernel_dim=kernel_dim,
        image_dim=image_dim,
        homology=homology,
        image=image,
        preimage=preimage,
        coordinates=coordinates,
        source_basis=source_basis,
    )


def margolis(module_id: str, max_t: int, max_u: int) -> MargolisData:
    """P¹-homology of Q^t (``"Q"``) or (Q/q0)^t (``"Qmod2"``) for t ≤ max_t, u ≤ max_u."""
    data = MargolisData(module_id, max_t, max_u)
    for t in range(max_t + 1):
        for u in range(0, max_u + 1, 2):
            data.group(t, u)
    logger.debug("Margolis homology of %s computed up to t=%d, u=%d", module_id, max_t, max_u)
    return data


def localized_generators(module_id: str, max_u: int) -> list[Monomial]:
    """Polynomial generators of H(M; P¹): q1², q2, q3, … (sphere) or q1, q2, … (mod 2)."""
    generators = [(0, 2)] if module_id == "Q" else [(0, 1)]
    n = 2
    while mono_degree(Q_FAMILY, Q_FAMILY.generator(n)) <= max_u:
        generators.append(Q_FAMILY.generator(n))
        n += 1
    return generators


def localized_monomials(module_id: str, t: int, u: int) -> list[Monomial]:
    """Monomials of F2[q1², q2, …] (or F2[q1, q2, …]) of Novikov degree t and internal degree u."""
    result = []
    for m in _q_basis("Qmod2", t, u):
        if module_id == "Q" and len(m) > 1 and m[1] % 2:
            continue
        result.append(m)
    return result


def margolis_prediction(module_id: str, t: int, u: int) -> int:
    return len(localized_monomials(module_id, t, u))


# ---------------------------------------------------------------------------
# Localization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Detection:
    """Image of a class of H^{s,t,u}(P;M) in h0⁻¹H ≅ F2[h0^±1] ⊗ H(M;P¹)."""

    s: int
    t: int
    u: int
    coordinates: tuple
    normal_form: frozenset

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)

    @property
    def name(self) -> str:
        if self.is_zero:
            return "0"
        h0 = "h0" if self.s == 1 else f"h0^{self.s}"
        parts = sorted(mono_name(Q_FAMILY, m) for m in self.normal_form)
        body = " + ".join(parts)
        if body == "1":
            return h0
        return f"{body}·{h0}" if len(parts) == 1 else f"({body})·{h0}"


def detect_cochain(z: CobarElement, data: MargolisData, s: int, t: int, u: int) -> Detection:
    coefficient = project_E(z)
    monomials = [key[0] for key in coefficient.terms]
    group = data.group(t, u - 2 * s)
    return Detection(s, t, u, group.homology_coordinates(monomials), group.normal_form(monomials))


def detect_class(x: ExtClass, data: Optional[MargolisData] = None) -> Detection:
    """Localized detection: the [ζ1]^s coefficient of the representative modulo im P¹."""
    degree = x.degree
    data = data or MargolisData(_module_id(x.home.context), degree.t, degree.u)
    if x.is_zero():
        group = data.group(degree.t, degree.u - 2 * degree.s)
        return Detection(degree.s, degree.t, degree.u, (0,) * group.dimension, frozenset())
    return detect_cochain(x.representative(), data, degree.s, degree.t, degree.u)


@dataclass(frozen=True)
class LocalizedGroup:
    """Localization data at one (stem, s, t)."""

    stem: int
    s: int
    t: int
    u: int
    dimension: int
    computed_dimension: int
    rank: int
    surjective: bool
    bijective: bool
    certified: bool
    towers: tuple = ()


def surjectivity_line(stem: int, s: int) -> bool:
    return stem < 5 * s - 4


def certified_line(stem: int, s: int) -> bool:
    return stem < 5 * s - 10


def localize_h0(engine: ExtRegion, data: Optional[MargolisData] = None, job=None) -> dict:
    """Localization map per (stem, s, t) of the engine's region, with certification.

    Raises:
        CertificationError: If the region holds no certified bidegree, or if the map fails
            to be onto / bijective where the vanishing-line argument says it must be.
    """
    region = engine.region
    module_id = _module_id(engine.context)
    data = data or MargolisData(module_id, region.max_t, region.max_u)
    groups: dict = {}
    violations = []
    for degree in engine.region.degrees(engine.context):
        s, t, u = degree.s, degree.t, degree.u
        if s == 0 or u - 2 * s < 0:
            continue
        ext_block = engine.block(degree)
        group = data.group(t, u - 2 * s)
        images = EchelonBasis()
        for x in ext_block.basis_classes():
            detection = detect_class(x, data)
            images.insert(bits_to_int(i for i, c in enumerate(detection.coordinates) if c))
        rank = len(images)
        stem = u - s
        record = LocalizedGroup(
            stem=stem,
            s=s,
            t=t,
            u=u,
            dimension=group.dimension,
            computed_dimension=ext_block.dimension,
            rank=rank,
            surjective=rank == group.dimension,
            bijective=rank == group.dimension == ext_block.dimension,
            certified=certified_line(stem, s),
            towers=tuple(sorted(" + ".join(mono_name(Q_FAMILY, m) for m in sorted(h)) for h in group.homology)),
        )
        groups[(stem, s, t)] = record
        if surjectivity_line(stem, s) and not record.surjective:
            violations.append((stem, s, t))
        if record.certified and not record.bijective:
            violations.append((stem, s, t))
    if violations:
        raise CertificationError("Localization map fails inside the vanishing-line region.", violations)
    if not any(record.certified for record in groups.values()):
        raise CertificationError("Region too shallow: no bidegree satisfies u-s < 5s-10.", list(groups))
    certified = sum(record.certified for record in groups.values())
    message = f"Localized {len(groups)} bidegrees of {engine.context}; {certified} certified"
    logger.info(message)
    if job is not None:
        job.logger.info(message)
    return groups


def vanishing_violations(engine: ExtRegion) -> list[MultiDegree]:
    """Degrees with nonzero Ext where u−s < s or 0 < u−s < s+t."""
    bad = []
    for degree, ext_block in engine.blocks.items():
        stem = degree.u - degree.s
        if ext_block.dimension and (stem < degree.s or 0 < stem < degree.s + degree.t):
            bad.append(degree)
    return sorted(bad, key=lambda d: (d.u, d.s, d.t))


# ---------------------------------------------------------------------------
# Lifting search
# ---------------------------------------------------------------------------


@dataclass
class LiftResult:
    n: int
    exponent: int
    target: Monomial
    lift: ExtClass
    representative: CobarElement

    @property
    def target_name(self) -> str:
        return mono_name(Q_FAMILY, self.target)


def lift_target(n: int) -> Monomial:
    return (0, 2) if n == 0 else Q_FAMILY.generator(n + 1)


def find_lift(engine: ExtRegion, target: Monomial, s: int, data: MargolisData) -> Optional[CobarElement]:
    """A cocycle of Ω^s(P;Q^t) whose [ζ1]^s coefficient is exactly ``target``, or None."""
    t = mono_total(target)
    u = mono_degree(Q_FAMILY, target) + 2 * s
    ext_block = engine.block(MultiDegree(s, t, u))
    group = data.group(t, u - 2 * s)
    goal = group.homology_coordinates([target])
    if not any(goal):
        return None
    detections = [detect_class(x, data).coordinates for x in ext_block.basis_classes()]
    if not detections:
        return None
    matrix = BitMatrix.from_rows(
        [[j for j, d in enumerate(detections) if d[i]] for i in range(group.dimension)], len(detections)
    )
    x = solve(matrix, list(goal))
    if x is None:
        return None
    lift = ExtClass.make(ext_block, x)
    representative = lift.representative()
    coefficient = frozenset(key[0] for key in project_E(representative).terms)
    correction = group.p1_preimage(coefficient ^ {target})
    if correction is None:
        raise CocycleError(f"E-projection of the lift differs from {mono_name(Q_FAMILY, target)} outside im P¹")
    word = tuple((1,) for _ in range(s - 1))
    adjust = CobarElement.from_keys(engine.context, [(e, word) for e in correction])
    return representative + differential(adjust)


def minimal_lift_exponent(n: int, engine: ExtRegion, data: Optional[MargolisData] = None) -> LiftResult:
    """Smallest N ≤ 8 such that g·h0^N lifts to H^N(P; Q^t), g = q_{n+1} (n ≥ 1) or q1² (n = 0).

    Raises:
        SearchError: If no N up to the bound (or up to the region edge) works.
    """
    target = lift_target(n)
    t = mono_total(target)
    data = data or MargolisData(_module_id(engine.context), engine.region.max_t, engine.region.max_u)
    for exponent in range(1, LIFT_SEARCH_BOUND + 1):
        u = mono_degree(Q_FAMILY, target) + 2 * exponent
        degree = MultiDegree(exponent, t, u)
        if not engine.region.contains(degree):
            raise SearchError(
                f"No lift of {mono_name(Q_FAMILY, target)}·h0^N for N < {exponent}; "
                f"N = {exponent} needs {degree}, outside the region {engine.region}"
            )
        representative = find_lift(engine, target, exponent, data)
        if representative is not None:
            logger.info("%s·h0^%d lifts to H*(P;Q^%d)", mono_name(Q_FAMILY, target), exponent, t)
            return LiftResult(n, exponent, target, engine.class_of(representative), representative)
    raise SearchError(f"No lift of {mono_name(Q_FAMILY, target)}·h0^N with N ≤ {LIFT_SEARCH_BOUND}")


@dataclass(frozen=True)
class GeneratorDifferential:
    """Derived d1 of a localized generator: the detection of d1 on a lift."""

    generator: str
    exponent: int
    detection: str
    expected: str

    @property
    def agrees(self) -> bool:
        return self.detection == self.expected


def derive_generator_d1(n: int, engine: ExtRegion, data: Optional[MargolisData] = None) -> GeneratorDifferential:
    """Compute d1 of the localized generator q_{n+1} (n ≥ 2) from a lift and the splitting map."""
    data = data or MargolisData(_module_id(engine.context), engine.region.max_t, engine.region.max_u)
    result = minimal_lift_exponent(n, engine, data)
    image = novikov_d1(engine, result.lift)
    detection = detect_class(image, data)
    expected = f"{mono_name(Q_FAMILY, Q_FAMILY.generator(n))}^2·h0^{result.exponent + 1}"
    return GeneratorDifferential(result.target_name, result.exponent, detection.name, expected)


# ---------------------------------------------------------------------------
# ᾱ_s
# ---------------------------------------------------------------------------


@dataclass
class AlphaRecord:
    s: int
    representative: CobarElement
    detection: Optional[str]
    complex: str
    notes: list = field(default_factory=list)


def alpha_representative(s: int) -> CobarElement:
    """((v1 + 2t1)^s − v1^s)/2 for odd s, the classical cocycles otherwise."""
    if s < 1:
        raise ValueError("ᾱ_s needs s ≥ 1")
    if s == 2:
        return parse_cobar(BP, "v1[t1] + [t1^2]")
    if s == 4:
        return parse_cobar(BP_MOD2, "[t1^4] + v2[t1] + v1[t2] + v1[t1^3] + v1^2[t1^2]")
    if s % 2 == 0:
        return parse_cobar(BP_MOD2, f"v1^{s - 4}v2[t1] + v1^{s - 3}[t2] + v1^{s - 3}[t1^3]")
    terms = {}
    for k in range(1, s + 1):
        terms[(strip((s - k,)), ((k,),))] = comb(s, k) * 2 ** (k - 1)
    return CobarElement(BP, terms)


def _require_cocycle(x: CobarElement, what: str) -> None:
    d = differential(x)
    if not d.is_zero():
        raise CocycleError(f"{what} is not a cocycle: d = {d!r}")


def detect_alpha(s: int, data: Optional[MargolisData] = None) -> AlphaRecord:
    """Verify the ᾱ_s representative and compute its localized detection.

    Raises:
        CocycleError: If a representative fails to be a cocycle.
    """
    representative = alpha_representative(s)
    _require_cocycle(representative, f"ᾱ{s} representative")
    complex_id = representative.context.id
    if s == 2:
        return AlphaRecord(s, representative, None, complex_id, ["ᾱ2 is ᾱ1-torsion; no localized detection"])
    if s == 4:
        return _detect_alpha4(representative, data)
    f = filtration(representative)
    gr = gr_project(representative, f)
    _require_cocycle(gr, f"gr^{f} of ᾱ{s}")
    module_id = "Qmod2" if representative.context.mod2 else "Q"
    data = data or MargolisData(module_id, f, 2 * s)
    detection = detect_cochain(gr, data, 1, f, 2 * s)
    notes = []
    if s % 2:
        lead = representative.terms.get((strip((s - 1,)), ((1,),)))
        notes.append(f"leading term {lead}·v1^{s - 1}[t1]")
    return AlphaRecord(s, representative, detection.name, complex_id, notes)


def v2_t1_coefficient(total: CobarElement) -> int:
    """Coefficient of v2[t1|t1|t1|t1] in ᾱ1³ᾱ4 + dy', which must be odd.

    Raises:
        CertificationError: If the coefficient is even.
    """
    coefficient = total.terms.get((V_FAMILY.generator(2), ((1,),) * 4), 0)
    if coefficient % 2 == 0:
        raise CertificationError(
            f"ᾱ1³ᾱ4 has even coefficient {coefficient} on v2[t1|t1|t1|t1]; it is not detected by q2·h0^4",
            [(4, 1, 14)],
        )
    return coefficient


def _detect_alpha4(representative: CobarElement, data: Optional[MargolisData]) -> AlphaRecord:
    """ᾱ1³ᾱ4: solve dy = [ζ1⁴|ζ1|ζ1|ζ1], lift y, and read off the filtration-1 [t1]⁴ coefficient."""
    target = parse_cobar(P_QMOD2, "[ζ1^4|ζ1|ζ1|ζ1]")
    y = solve_coboundary(target)
    if y is None:
        raise CocycleError("[ζ1^4|ζ1|ζ1|ζ1] is not a coboundary; h0^3 h2 should vanish")
    product = concatenate(representative, parse_cobar(BP_MOD2, "[t1|t1|t1]"))
    total = product + differential(split_lift(y))
    f = filtration(total)
    if f is not None and f < 1:
        raise FiltrationError(f"ᾱ4·[t1|t1|t1] + dy' has filtration {f}, expected ≥ 1")
    gr = gr_project(total, 1)
    data = data or MargolisData("Qmod2", 1, 6)
    detection = detect_cochain(gr, data, 4, 1, 14)
    coefficient = v2_t1_coefficient(total)
    notes = [f"coefficient of v2[t1|t1|t1|t1] is {coefficient}"]
    return AlphaRecord(4, representative, detection.name, representative.context.id, notes)


def expected_alpha_detection(s: int) -> Optional[str]:
    """Name of the localized class ᾱ_s should be detected by (None for s = 2).

    q1^(s−1)·h0 for odd s, q1^(s−4)·q2·h0 for even s ≥ 6 (mod 2) and q2·h0⁴ for ᾱ1³ᾱ4.
    """
    if s == 2:
        return None
    if s == 4:
        module_id, m, s_detect = "Qmod2", Q_FAMILY.generator(2), 4
    elif s % 2:
        module_id, m, s_detect = "Q", strip((0, s - 1)), 1
    else:
        module_id, m, s_detect = "Qmod2", strip((0, s - 4, 1)), 1
    t = mono_total(m)
    a = mono_degree(Q_FAMILY, m)
    group = MargolisData(module_id, t, a).group(t, a)
    return Detection(s_detect, t, a + 2 * s_detect, group.homology_coordinates([m]), group.normal_form([m])).name


def eta_r_congruence(n: int) -> bool:
    """η_R(v_{n+1}) ≡ v_{n+1} + v_n t1^(2^n) + v_n² t1 mod (2, v1, …, v_{n−1})."""
    image = eta_R(Polynomial.generator((V_FAMILY,), V_FAMILY, n + 1, Ring.Q), mod2=True)
    reduced = Polynomial(VT_CTX, ring=Ring.F2)
    for (v_part, t_part), c in image.terms.items():
        if any(v_part[: n - 1]):
            continue
        reduced = reduced + Polynomial(VT_CTX, {(v_part, t_part): c}, Ring.F2)
    vn = V_FAMILY.generator(n)
    expected = Polynomial(
        VT_CTX,
        {
            (V_FAMILY.generator(n + 1), ()): 1,
            (vn, (2**n,)): 1,
            (tuple(2 * e for e in vn), (1,)): 1,
        },
        Ring.F2,
    )
    return reduced == expected


# ---------------------------------------------------------------------------
# E∞ of the localized spectral sequence
# ---------------------------------------------------------------------------


def localized_d1(m: Monomial) -> frozenset:
    """d1 on a localized monomial: the derivation q_{n+1} ↦ q_n² (times h0) for n ≥ 2."""
    result: set = set()
    for position, e in enumerate(m):
        if position < 3 or e % 2 == 0:
            continue
        exps = list(m)
        exps[position] -= 1
        exps[position - 1] += 2
        result ^= {strip(exps)}
    return frozenset(result)


@dataclass
class PageGroup:
    """E1 and E2 = E∞ of the localized page at one (t, A).

    ``cycles`` are bitsets over ``basis`` spanning E∞ modulo ``boundaries``.
    """

    t: int
    a: int
    e1: int
    e2: int
    names: tuple
    basis: list = field(default_factory=list, repr=False)
    boundaries: EchelonBasis = field(default_factory=EchelonBasis, repr=False)
    cycles: list = field(default_factory=list, repr=False)

    def vector(self, monomials) -> int:
        index = {m: i for i, m in enumerate(self.basis)}
        return bits_to_int(index[m] for m in monomials)


def localized_page(module_id: str, max_t: int, max_a: int) -> dict:
    """E1 and E2 = E∞ of the localized page per (t, A), A = u − 2s."""
    monomials = {}
    for t in range(max_t + 2):
        for a in range(0, max_a + 3, 2):
            monomials[(t, a)] = localized_monomials(module_id, t, a)
    result = {}
    for t in range(max_t + 1):
        for a in range(0, max_a + 1, 2):
            basis = monomials[(t, a)]
            index = {m: i for i, m in enumerate(basis)}
            targets = {m: i for i, m in enumerate(monomials.get((t + 1, a - 2), []))}
            boundaries = EchelonBasis()
            span = EchelonBasis()
            for m in monomials.get((t - 1, a + 2), []):
                v = bits_to_int(index[k] for k in localized_d1(m))
                boundaries.insert(v)
                span.insert(v)
            names = []
            cycles = []
            if basis:
                rows = [[targets[k] for k in localized_d1(m)] for m in basis]
                outgoing = BitMatrix.from_rows(rows, max(len(targets), 1))
                kernel = nullspace(outgoing.transpose())
                for i in range(kernel.rows):
                    v = kernel.row_int(i)
                    if span.insert(v):
                        cycles.append(v)
                        names.append(" + ".join(mono_name(Q_FAMILY, basis[k]) for k in int_to_bits(v)))
            e2 = len(names)
            result[(t, a)] = PageGroup(t, a, len(basis), e2, tuple(names), basis, boundaries, cycles)
            logger.debug("Localized E2 of %s at (t,A)=(%d,%d): %d of %d survive", module_id, t, a, e2, len(basis))
    return result


def assemble_Einfty(
    module_id: str,
    max_s: int,
    max_t: int,
    max_u: int,
    derived: Optional[list] = None,
    verified_t: Optional[int] = None,
) -> SSDataset:
    """Localized E∞ classes at s = 1..max_s with u = A + 2s ≤ max_u.

    ``derived`` lists GeneratorDifferential records computed by ``derive_generator_d1``; the
    remaining generator differentials are applied as input. ``verified_t`` is the largest
    Novikov degree covered by derived differentials.
    """
    context_id = P_QMOD2.id if module_id == "Qmod2" else P_Q.id
    derived = derived or []
    for record in derived:
        if not record.agrees:
            logger.warning("Derived d1 of %s is %s, expected %s", record.generator, record.detection, record.expected)
    page = localized_page(module_id, max_t, max_u)
    if verified_t is not None and max_t + 1 > verified_t:
        logger.warning(
            "Input differential q_{n+1} ↦ q_n² applied up to t=%d, beyond the derived window t ≤ %d",
            max_t + 1,
            verified_t,
        )
    dataset = SSDataset(name=f"localized-ANSS-{module_id}", context=context_id, page="Einf")
    for (t, a), group in sorted(page.items()):
        for s in range(1, max_s + 1):
            u = a + 2 * s
            if u > max_u:
                continue
            h0 = "h0" if s == 1 else f"h0^{s}"
            for name in group.names:
                label = h0 if name == "1" else f"{name}·{h0}"
                dataset.add(MultiDegree(s, t, u), label, tower=True)
    dataset.metadata["module"] = module_id
    dataset.metadata["derived"] = [
        {"generator": d.generator, "exponent": d.exponent, "detection": d.detection, "agrees": d.agrees}
        for d in derived
    ]
    derived_names = {d.generator for d in derived}
    dataset.metadata["input"] = [
        f"q{n + 1} -> q{n}^2·h0"
        for n in range(2, Q_FAMILY.truncation(max_u))
        if Q_FAMILY.name_of(n + 1) not in derived_names
    ]
    return dataset


def einfty_prediction(module_id: str, t: int, a: int) -> int:
    """Monomials of F2[q1², q2]/(q2²) (sphere) or F2[q1, q2]/(q2²) (mod 2) at (t, A)."""
    q1 = mono_degree(Q_FAMILY, Q_FAMILY.generator(1))
    q2 = mono_degree(Q_FAMILY, Q_FAMILY.generator(2))
    count = 0
    for j in (0, 1):
        i = t - j
        if i < 0 or i * q1 + j * q2 != a:
            continue
        if module_id == "Q" and i % 2:
            continue
        count += 1
    return count


def einfty_mismatches(dataset: SSDataset, max_s: int, max_t: int, max_u: int) -> list[tuple]:
    """(s, t, u, assembled, predicted) wherever an assembled E∞ page differs from its closed form."""
    module_id = dataset.metadata["module"]
    counts = Counter((item.degree.s, item.degree.t, item.degree.u) for item in dataset.classes)
    bad = []
    for s in range(1, max_s + 1):
        for t in range(max_t + 1):
            for u in range(2 * s, max_u + 1, 2):
                expected = einfty_prediction(module_id, t, u - 2 * s)
                got = counts.get((s, t, u), 0)
                if got != expected:
                    bad.append((s, t, u, got, expected))
    return bad


def einfty_inclusion(max_t: int, max_u: int) -> dict:
    """Per (t, A): sphere E∞ dim, mod-2 E∞ dim and the rank of the map induced by Q → Q/q0."""
    sphere = localized_page("Q", max_t, max_u)
    moore = localized_page("Qmod2", max_t, max_u)
    report = {}
    for key, group in sphere.items():
        other = moore[key]
        image = EchelonBasis()
        for v in group.cycles:
            monomials = [group.basis[i] for i in int_to_bits(v)]
            image.insert(other.boundaries.normal_form(other.vector(monomials)))
        report[key] = (group.e2, other.e2, len(image))
    return report
