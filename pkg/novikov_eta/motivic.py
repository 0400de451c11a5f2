"""Motivic layer: τ-extension, the two localized routes and their E∞ pages.

Route A runs the localized motivic Adams–Novikov spectral sequence from a small DGA
presentation (``d3 ᾱ3 = τ ᾱ1⁴``). Route B computes the motivic Adams E2 over F2[τ]
from the A_Mot cobar complex, localizes it at h0 = [ξ1] and applies ``d2 v_{n+1} = v_n² h0``.
Both pages are compared in ``novikov_eta.diffsync``.
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from diffsync import Adapter

from novikov_eta.cobar import AMOT, EMOT, CobarContext, CobarElement, build_block, concatenate, parse_cobar
from novikov_eta.config import get_config
from novikov_eta.datasets import SSDataset
from novikov_eta.diffsync.adapter_closed_form import ClosedFormAdapter
from novikov_eta.diffsync.adapter_routes import RouteAdapter
from novikov_eta.diffsync.models import DimensionEntry
from novikov_eta.exceptions import CertificationError, CocycleError, ContextError, GradingError, RegionError
from novikov_eta.ext import ExtRegion, Region
from novikov_eta.grading import MultiDegree
from novikov_eta.linalg import (
    BitMatrix,
    EchelonBasis,
    TauMatrix,
    bits_to_int,
    int_to_bits,
    nullspace,
    snf_tau,
    tau_power,
)

logger = logging.getLogger(__name__)

_Q_NAME = re.compile(r"q(\d+)")


def adams_tridegree(degree: MultiDegree) -> MultiDegree:
    """Motivic Adams tridegree (s + t, u + t, u/2) of a class of H^{s,u}(P; Q^t).

    Raises:
        GradingError: If u is odd.
    """
    if degree.u % 2:
        raise GradingError(f"{degree} has odd internal degree and no motivic weight")
    return MultiDegree(degree.s + degree.t, 0, degree.u + degree.t, degree.u // 2)


def to_adams_grading(dataset: SSDataset) -> SSDataset:
    """Regrade a P;Q page into motivic Adams tridegrees, renaming q_n to v_n."""
    regraded = SSDataset(
        name=f"{dataset.name}[Adams]", context="motivic", page=dataset.page, metadata=dict(dataset.metadata)
    )
    for item in dataset.sorted_classes():
        regraded.add(adams_tridegree(item.degree), _Q_NAME.sub(r"v\1", item.name), item.tower)
    for arrow in dataset.arrows:
        regraded.add_arrow(arrow.kind, adams_tridegree(arrow.source), adams_tridegree(arrow.target), arrow.label)
    return regraded


# h0 of the localized motivic Adams spectral sequence: the class of [ξ1], image of h0 = [ζ1].
H0_MOTIVIC = "[ξ1]"
H0_DEGREE = adams_tridegree(MultiDegree(1, 0, 2))

# v2²h0, the image of q2²·h0.
GI_TARGET_DEGREE = adams_tridegree(MultiDegree(1, 2, 14))

# Engines of the last motivic_adams_e2 run per context, reused by the class-level checks.
_engines: dict = {}


# ---------------------------------------------------------------------------
# τ-extension
# ---------------------------------------------------------------------------


def tau_weight(u: int, n: int) -> int:
    """Weight of τ^n·x for a classical class x of internal degree u."""
    if u % 2:
        raise GradingError(f"τ-extension needs even internal degree, got u={u}")
    return u // 2 - n


def tau_extend(dataset: SSDataset, max_tau: int = 0) -> SSDataset:
    """Classes τ^n·x, 0 ≤ n ≤ max_tau, with weight u/2 − n; arrows pick up the τ-power that keeps weight.

    Raises:
        GradingError: If a class or arrow endpoint has odd u, or an arrow changes u by an odd amount.
    """
    extended = SSDataset(
        name=f"{dataset.name}[τ]", context=dataset.context, page=dataset.page, metadata=dict(dataset.metadata)
    )
    for item in dataset.sorted_classes():
        for n in range(max_tau + 1):
            degree = item.degree
            weighted = MultiDegree(degree.s, degree.t, degree.u, tau_weight(degree.u, n))
            name = item.name if n == 0 else (f"τ·{item.name}" if n == 1 else f"τ^{n}·{item.name}")
            extended.add(weighted, name, item.tower)
    for arrow in dataset.arrows:
        shift = arrow.target.u - arrow.source.u
        if shift % 2:
            raise GradingError(f"Arrow {arrow} changes u by an odd amount")
        for n in range(max_tau + 1):
            source = MultiDegree(arrow.source.s, arrow.source.t, arrow.source.u, tau_weight(arrow.source.u, n))
            target_n = n + shift // 2
            target = MultiDegree(arrow.target.s, arrow.target.t, arrow.target.u, tau_weight(arrow.target.u, target_n))
            if source.w != target.w:
                raise GradingError(f"Re-weighted arrow {arrow} does not preserve weight")
            extended.add_arrow(arrow.kind, source, target, arrow.label)
    extended.metadata["max_tau"] = max_tau
    return extended


# ---------------------------------------------------------------------------
# Localized DGAs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DGAGenerator:
    """A polynomial generator with its (s, stem, weight)."""

    name: str
    s: int
    stem: int
    weight: int

    @property
    def coweight(self) -> int:
        return self.stem - self.weight

    @property
    def shift(self) -> int:
        """s − stem, which inverting a coweight-0 unit leaves unchanged."""
        return self.s - self.stem


@dataclass
class DGAPresentation:
    """F2[unit^±1] ⊗ F2[generators]/(squares of ``square_zero``) with a derivation.

    ``differentials`` maps a generator name to its image as ``(unit power, {name: exponent})``.
    The unit must have coweight 0 and shift 0, so everything is graded by (coweight, shift).
    """

    name: str
    unit: DGAGenerator
    generators: tuple
    differentials: dict = field(default_factory=dict)
    square_zero: frozenset = frozenset()
    renames: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.unit.coweight or self.unit.shift:
            raise GradingError(f"Unit {self.unit.name} must have coweight 0 and s = stem")
        if any(g.coweight <= 0 for g in self.generators):
            raise GradingError("Generators need positive coweight")
        self._index = {g.name: i for i, g in enumerate(self.generators)}
        for name, (power, target) in self.differentials.items():
            source = self.generators[self._index[name]]
            exps = self._exps(target)
            if self.monomial_weight(power, exps) != source.weight:
                raise GradingError(f"d({name}) does not preserve weight")
            if self.monomial_stem(power, exps) != source.stem - 1:
                raise GradingError(f"d({name}) does not lower the stem by one")

    def _exps(self, target: dict) -> tuple:
        exps = [0] * len(self.generators)
        for name, e in target.items():
            exps[self._index[name]] = e
        return tuple(exps)

    def monomial_stem(self, power: int, exps: tuple) -> int:
        return power * self.unit.stem + sum(e * g.stem for e, g in zip(exps, self.generators))

    def monomial_weight(self, power: int, exps: tuple) -> int:
        return power * self.unit.weight + sum(e * g.weight for e, g in zip(exps, self.generators))

    def monomial_s(self, power: int, exps: tuple) -> int:
        return power * self.unit.s + sum(e * g.s for e, g in zip(exps, self.generators))

    def coweight(self, exps: tuple) -> int:
        return sum(e * g.coweight for e, g in zip(exps, self.generators))

    def shift(self, exps: tuple) -> int:
        return sum(e * g.shift for e, g in zip(exps, self.generators))

    def is_zero(self, exps: tuple) -> bool:
        return any(exps[self._index[name]] >= 2 for name in self.square_zero)

    def monomials(self, coweight: int) -> list[tuple]:
        """Nonzero monomials of the given coweight, unit power omitted."""
        found = []

        def extend(pos: int, remaining: int, exps: list) -> None:
            if pos == len(self.generators):
                if remaining == 0 and not self.is_zero(tuple(exps)):
                    found.append(tuple(exps))
                return
            cw = self.generators[pos].coweight
            top = remaining // cw
            if self.generators[pos].name in self.square_zero:
                top = min(top, 1)
            for e in range(top + 1):
                exps.append(e)
                extend(pos + 1, remaining - e * cw, exps)
                exps.pop()

        extend(0, coweight, [])
        return sorted(found)

    def d(self, exps: tuple) -> dict:
        """d of a monomial as {exps: unit power} over F2."""
        out: dict = {}
        for i, e in enumerate(exps):
            name = self.generators[i].name
            if e % 2 == 0 or name not in self.differentials:
                continue
            power, target = self.differentials[name]
            new = list(exps)
            new[i] -= 1
            for j, te in enumerate(self._exps(target)):
                new[j] += te
            key = tuple(new)
            if self.is_zero(key):
                continue
            if key in out:
                del out[key]
            else:
                out[key] = power
        return out

    def check(self, max_coweight: int) -> None:
        """d² = 0 on every monomial up to ``max_coweight``.

        Raises:
            CocycleError: On the first monomial with d² ≠ 0.
        """
        for c in range(max_coweight + 1):
            for exps in self.monomials(c):
                twice: set = set()
                for key in self.d(exps):
                    twice ^= set(self.d(key))
                if twice:
                    raise CocycleError(f"{self.name}: d² ≠ 0 on {self.monomial_name(exps)}")

    def monomial_name(self, exps: tuple) -> str:
        parts = []
        for e, g in zip(exps, self.generators):
            for (name, k), alias in self.renames.items():
                if name == g.name and e >= k:
                    parts.append(alias if e == k else f"{alias}·{g.name}^{e - k}")
                    break
            else:
                if e == 1:
                    parts.append(g.name)
                elif e:
                    parts.append(f"{g.name}^{e}")
        return "·".join(parts) if parts else "1"

    def homology(self, max_coweight: int) -> dict:
        """Basis of the homology per (coweight, shift), as lists of (name, exps) cycle representatives."""
        pieces: dict = defaultdict(list)
        for c in range(max_coweight + 2):
            for exps in self.monomials(c):
                pieces[(c, self.shift(exps))].append(exps)
        result = {}
        for (c, sh), basis in sorted(pieces.items()):
            if c > max_coweight:
                continue
            index = {m: i for i, m in enumerate(basis)}
            boundaries = EchelonBasis()
            for (c_in, sh_in), sources in pieces.items():
                if c_in != c + 1:
                    continue
                for m in sources:
                    image = self.d(m)
                    if image and all(key in index for key in image):
                        boundaries.insert(bits_to_int(index[key] for key in image))
            targets: dict = {}
            rows = []
            for m in basis:
                row = []
                for key in self.d(m):
                    row.append(targets.setdefault(key, len(targets)))
                rows.append(row)
            kernel = nullspace(BitMatrix.from_rows(rows, max(len(targets), 1)).transpose())
            classes = []
            for i in range(kernel.rows):
                v = kernel.row_int(i)
                if boundaries.insert(v):
                    terms = [basis[k] for k in int_to_bits(v)]
                    classes.append((" + ".join(self.monomial_name(m) for m in terms), terms[0]))
            result[(c, sh)] = classes
        return result

    def page(self, max_coweight: int, stems: range, page: str, homology: bool = True) -> SSDataset:
        """Classes at every (stem, weight) of the window, by multiplying with unit powers."""
        dataset = SSDataset(name=self.name, context="motivic", page=page)
        pieces = self.homology(max_coweight) if homology else self._chains(max_coweight)
        for (c, sh), classes in sorted(pieces.items()):
            for name, exps in classes:
                for stem in stems:
                    power = stem - self.monomial_stem(0, exps)
                    s = self.monomial_s(power, exps)
                    weight = self.monomial_weight(power, exps)
                    unit = "" if power == 0 else (f"{self.unit.name}^{power}" if power != 1 else self.unit.name)
                    label = "·".join(part for part in (unit, name if name != "1" else "") if part) or "1"
                    dataset.add(MultiDegree(s, 0, stem + s, weight), label)
        dataset.metadata["presentation"] = self.name
        dataset.metadata["max_coweight"] = max_coweight
        return dataset

    def _chains(self, max_coweight: int) -> dict:
        pieces: dict = defaultdict(list)
        for c in range(max_coweight + 1):
            for exps in self.monomials(c):
                pieces[(c, self.shift(exps))].append((self.monomial_name(exps), exps))
        return pieces


ALPHA1 = DGAGenerator("ᾱ1", 1, 1, 1)
ANSS_PRESENTATION_GENERATORS = (
    DGAGenerator("τ", 0, 0, -1),
    DGAGenerator("ᾱ3", 1, 5, 3),
    DGAGenerator("ᾱ4", 1, 7, 4),
)


def anss_presentation() -> DGAPresentation:
    """F2[τ][ᾱ1^±1, ᾱ3, ᾱ4]/(ᾱ1ᾱ4²) with d3 ᾱ3 = τ ᾱ1⁴; ᾱ5 := ᾱ1⁻¹ᾱ3²."""
    return DGAPresentation(
        name="localized-MANSS",
        unit=ALPHA1,
        generators=ANSS_PRESENTATION_GENERATORS,
        differentials={"ᾱ3": (4, {"τ": 1})},
        square_zero=frozenset({"ᾱ4"}),
        renames={("ᾱ3", 2): "ᾱ5"},
    )


def adams_presentation(max_coweight: int) -> DGAPresentation:
    """F2[h0^±1][v1⁴, v2, v3, …] with d2 v_{n+1} = v_n² h0 for n ≥ 2."""
    generators = [DGAGenerator("v1^4", 4, 8, 4)]
    n = 2
    while 2**n - 1 <= max_coweight + 1:
        generators.append(DGAGenerator(f"v{n}", 1, 2 ** (n + 1) - 2, 2**n - 1))
        n += 1
    differentials = {f"v{k + 1}": (1, {f"v{k}": 2}) for k in range(2, n - 1)}
    return DGAPresentation(
        name="localized-MASS",
        unit=DGAGenerator("h0", 1, 1, 1),
        generators=tuple(generators),
        differentials=differentials,
    )


def run_localized_manss(max_coweight: int = 12, max_stem: int = 24) -> SSDataset:
    """E∞ of the localized motivic Adams–Novikov spectral sequence (E4 = E∞)."""
    presentation = anss_presentation()
    presentation.check(max_coweight + 1)
    stems = range(-max_stem, max_stem + 1)
    einfty = presentation.page(max_coweight, stems, "Einf")
    e2 = presentation.page(max_coweight, stems, "E2", homology=False)
    einfty.metadata["E2"] = dict(e2.stem_weight_table())
    einfty.metadata["route"] = "A"
    logger.info("Route A: %d E∞ classes over |stem| ≤ %d, coweight ≤ %d", len(einfty), max_stem, max_coweight)
    return einfty


def tau_is_boundary() -> bool:
    """Whether τ is hit by d3 (it is d3 of ᾱ1⁻⁴ᾱ3)."""
    presentation = anss_presentation()
    tau = tuple(1 if g.name == "τ" else 0 for g in presentation.generators)
    classes = presentation.homology(1).get((1, presentation.shift(tau)), [])
    return not any(exps == tau for _, exps in classes)


# ---------------------------------------------------------------------------
# Motivic Adams E2 over F2[τ]
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MotivicExtBlock:
    """Ext at one tridegree (s, u, w): F2 dimension and the F2[τ]-summands generated here."""

    degree: MultiDegree
    dimension: int
    free_generators: int
    torsion: tuple = ()


@dataclass(frozen=True)
class TauDecomposition:
    """F2[τ]-module structure of Ext^{s,u} summed over weights: free rank and torsion orders."""

    s: int
    u: int
    free_rank: int
    torsion: tuple


def _motivic_context(algebra: str) -> CobarContext:
    if algebra == "AMot":
        return AMOT
    if algebra == "EMot":
        return EMOT
    raise ContextError(f"Unknown motivic algebra {algebra!r}; expected AMot or EMot")


def tau_multiply(z: CobarElement, power: int = 1) -> CobarElement:
    return CobarElement(z.context, {(k + power, word): c for (k, word), c in z.terms.items()})


def _tau_rank(engine: ExtRegion, s: int, u: int, w: int, j: int) -> int:
    """Rank of τ^j from weight w to weight w − j (weights below 0 are isomorphic to weight 0)."""
    if w > u // 2 or w < 0:
        return 0
    source = engine.block(MultiDegree(s, 0, u, w))
    if j == 0:
        return source.dimension
    j = min(j, w)
    if j == 0:
        return source.dimension
    target = engine.block(MultiDegree(s, 0, u, w - j))
    images = EchelonBasis()
    for i in range(source.dimension):
        coordinates = target.express(tau_multiply(source.representative(i), j))
        images.insert(bits_to_int(k for k, c in enumerate(coordinates) if c))
    return len(images)


def weighted_decomposition(engine: ExtRegion, s: int, u: int) -> list[MotivicExtBlock]:
    """Split Ext^{s,u} into τ-chains by the weight of their generator."""
    top = u // 2
    ranks: dict = {}

    def r(w: int, j: int) -> int:
        if (w, j) not in ranks:
            ranks[(w, j)] = _tau_rank(engine, s, u, w, j)
        return ranks[(w, j)]

    blocks = []
    for w in range(top + 1):
        free = r(w, w) - r(w + 1, w + 1)
        torsion = []
        for k in range(1, w + 1):
            at_least_k = r(w, k - 1) - r(w + 1, k)
            at_least_next = r(w, k) - r(w + 1, k + 1)
            torsion.extend([k] * (at_least_k - at_least_next))
        blocks.append(MotivicExtBlock(MultiDegree(s, 0, u, w), r(w, 0), free, tuple(torsion)))
    return blocks


def snf_decomposition(context: CobarContext, s: int, u: int) -> TauDecomposition:
    """Free rank and torsion orders of Ext^{s,u} from the unweighted cobar blocks over F2[τ].

    Raises:
        CocycleError: If an invariant factor is not a power of τ.
    """
    outgoing = build_block(context, s, 0, u)
    out_rank = TauMatrix.from_sparse(outgoing.d_out, outgoing.target_size).at_tau(1).rank() if len(outgoing) else 0
    torsion = []
    in_rank = 0
    if s > 0:
        incoming = build_block(context, s - 1, 0, u)
        if len(incoming):
            diagonal, _, _ = snf_tau(TauMatrix.from_sparse(incoming.d_out, incoming.target_size))
            in_rank = len(diagonal)
            for entry in diagonal:
                k = tau_power(entry)
                if k is None:
                    raise CocycleError(f"Invariant factor of ({s},{u}) is not a τ-power")
                if k:
                    torsion.append(k)
    free_rank = len(outgoing) - out_rank - in_rank
    return TauDecomposition(s, u, free_rank, tuple(sorted(torsion)))


def motivic_adams_e2(
    region: Region,
    algebra: str = "AMot",
    store=None,
    job=None,
    verify_snf: bool = True,
) -> dict[MultiDegree, MotivicExtBlock]:
    """Cohomology of the A_Mot (or E_Mot) cobar complex over M2 per tridegree.

    Raises:
        CertificationError: If the weightwise τ-chain count disagrees with the Smith normal form.
    """
    context = _motivic_context(algebra)
    engine = ExtRegion(context, region, store=store, job=job)
    engine.compute_all(get_config().workers)
    result: dict = {}
    mismatches = []
    for u in range(region.max_u + 1):
        for s in range(region.max_s + 1):
            blocks = weighted_decomposition(engine, s, u)
            for block in blocks:
                result[block.degree] = block
            if not verify_snf:
                continue
            snf = snf_decomposition(context, s, u)
            free = sum(block.free_generators for block in blocks)
            torsion = tuple(sorted(k for block in blocks for k in block.torsion))
            if (free, torsion) != (snf.free_rank, snf.torsion):
                mismatches.append((s, u))
    if mismatches:
        raise CertificationError("τ-chain decomposition disagrees with the Smith normal form", mismatches)
    message = f"Motivic Adams E2 over {algebra}: {sum(1 for b in result.values() if b.dimension)} nonzero tridegrees"
    logger.info(message)
    if job is not None:
        job.logger.info(message)
    _engines[context.id] = engine
    return result


def motivic_engine(region: Region, algebra: str = "AMot", store=None) -> ExtRegion:
    context = _motivic_context(algebra)
    engine = _engines.get(context.id)
    if engine is None or engine.region != region:
        engine = ExtRegion(context, region, store=store)
        _engines[context.id] = engine
    return engine


@dataclass
class GiTarget:
    """The h0-tower carrying v2²h0: its localized cell and top cocycle.

    ``dimensions`` lists dim Ext at (s, A + 2s, B + s) for s = 1..top.s.
    """

    degree: MultiDegree
    cell: tuple
    top: MultiDegree
    representative: CobarElement = field(repr=False)
    dimensions: tuple = ()


def stable_dimension(series: list[int], depth: int) -> Optional[int]:
    """Common value of the last ``depth`` + 1 entries, or None if they differ."""
    tail = series[-(depth + 1) :]
    return tail[-1] if len(set(tail)) == 1 else None


def verify_gi_target(engine: ExtRegion, stability_depth: Optional[int] = None) -> GiTarget:
    """v2²h0 spans its localized cell: the h0-tower there is stable of dimension 1.

    Ext^{3,16,7} itself vanishes; the class lives on the h0-tower of the cell
    (A, B) = (10, 4), whose first nonzero member sits at s = 4.

    Raises:
        RegionError: If the region holds fewer than ``stability_depth`` + 1 members of the tower.
        CertificationError: If the tower is unstable, has dimension ≠ 1, or h0 fails to act on it.
    """
    depth = get_config().stability_depth if stability_depth is None else stability_depth
    degree = GI_TARGET_DEGREE
    a, b = degree.u - 2 * degree.s, degree.w - degree.s
    region = engine.region
    top = min(region.max_s, (region.max_u - a) // 2)
    # The tower is zero up to s = degree.s; its first member sits one filtration higher.
    if top < degree.s + 1 + depth:
        raise RegionError(f"{engine.context} {region} holds too little of the h0-tower at (A,B)=({a},{b})")
    series = [engine.block(MultiDegree(s, 0, a + 2 * s, b + s)).dimension for s in range(1, top + 1)]
    dimension = stable_dimension(series, depth)
    if dimension is None:
        raise CertificationError(f"h0-tower at (A,B)=({a},{b}) has not stabilized: {series}", [(a, b)])
    if dimension != 1 or localized_monomial_count(a, b) != 1:
        raise CertificationError(
            f"h0-tower at (A,B)=({a},{b}) has dimension {dimension}, expected v2²h0 alone", [(a, b)]
        )
    below = engine.block(MultiDegree(top - 1, 0, a + 2 * (top - 1), b + top - 1))
    upper = engine.block(MultiDegree(top, 0, a + 2 * top, b + top))
    if not any(upper.express(concatenate(below.representative(0), parse_cobar(engine.context, H0_MOTIVIC)))):
        raise CertificationError(f"h0 annihilates the tower at (A,B)=({a},{b})", [(a, b)])
    logger.info("v2²h0 spans (A,B)=(%d,%d); tower dimensions %s", a, b, series)
    return GiTarget(degree, (a, b), upper.degree, upper.representative(0), tuple(series))


# ---------------------------------------------------------------------------
# Localization of route B
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalizedEntry:
    """Stable h0-tower count at A = u − 2s, B = w − s."""

    a: int
    b: int
    dimension: Optional[int]
    expected: int
    top_s: int

    @property
    def stable(self) -> bool:
        return self.dimension is not None


def localized_monomial_count(a: int, b: int, max_coweight: Optional[int] = None) -> int:
    """Monomials of F2[v1⁴, v2, v3, …] at (A, B) = (b − 2s, w − s)."""
    generators = [(4, 0)]
    n = 2
    while 2 ** (n + 1) - 3 <= a:
        generators.append((2 ** (n + 1) - 3, 2**n - 2))
        n += 1

    def count(pos: int, ra: int, rb: int) -> int:
        if pos == len(generators):
            return 1 if ra == 0 and rb == 0 else 0
        ga, gb = generators[pos]
        total = 0
        e = 0
        while e * ga <= ra and e * gb <= rb:
            total += count(pos + 1, ra - e * ga, rb - e * gb)
            e += 1
        return total

    return count(0, a, b)


def localize_motivic(blocks: dict, region: Region, stability_depth: int) -> list[LocalizedEntry]:
    """h0-stable dimensions per (A, B) wherever ``stability_depth`` + 1 consecutive s agree."""
    entries = []
    for a in range(0, region.max_u + 1):
        for b in range(0, a + 1):
            series = []
            for s in range(1, region.max_s + 1):
                u, w = a + 2 * s, b + s
                if u > region.max_u or w > u // 2:
                    continue
                block = blocks.get(MultiDegree(s, 0, u, w))
                if block is not None:
                    series.append((s, block.dimension))
            if len(series) < stability_depth + 1:
                continue
            dimension = stable_dimension([dim for _, dim in series], stability_depth)
            entries.append(LocalizedEntry(a, b, dimension, localized_monomial_count(a, b), series[-1][0]))
    return entries


def _certify_cells(entries: list[LocalizedEntry], presentation: DGAPresentation, max_coweight: int) -> tuple:
    """Cells (A, B) whose stable dimension matches the monomial count, and (A, B, reason) for the rest."""
    certified = set()
    failures = []
    seen = set()
    for entry in entries:
        seen.add((entry.a, entry.b))
        if entry.a - entry.b > max_coweight + 1:
            continue
        if not entry.stable:
            failures.append((entry.a, entry.b, "unstable"))
        elif entry.dimension != entry.expected:
            failures.append((entry.a, entry.b, f"dimension {entry.dimension}, expected {entry.expected}"))
        else:
            certified.add((entry.a, entry.b))
    for c in range(max_coweight + 2):
        for exps in presentation.monomials(c):
            cell = (-presentation.shift(exps), -presentation.shift(exps) - c)
            if cell not in seen:
                seen.add(cell)
                failures.append((*cell, "outside region"))
    return certified, sorted(failures)


def localized_motivic_adams(
    region: Region,
    blocks: Optional[dict] = None,
    stability_depth: Optional[int] = None,
    max_coweight: int = 12,
    max_stem: int = 24,
    check_gi: bool = True,
    job=None,
) -> SSDataset:
    """Localized motivic Adams E2 (checked against F2[h0^±1, v1⁴, v2, v3, …]) and its E∞.

    E∞ keeps the homology of a cell (A, B) only when that cell and its d2 neighbours
    (A ± 3, B ± 2) are certified; ``metadata["uncertified"]`` lists every cell of the
    window that is not.

    Raises:
        CertificationError: If no (A, B) stabilizes inside the region.
    """
    stability_depth = get_config().stability_depth if stability_depth is None else stability_depth
    if blocks is None:
        blocks = motivic_adams_e2(region, job=job)
    entries = localize_motivic(blocks, region, stability_depth)
    stable = [entry for entry in entries if entry.stable]
    if not stable:
        raise CertificationError("No h0-tower stabilized; enlarge the region", [(e.a, e.b) for e in entries])
    mismatches = [(e.a, e.b, e.dimension, e.expected) for e in stable if e.dimension != e.expected]
    for a, b, got, expected in mismatches:
        logger.warning("Localized motivic E2 at (A,B)=(%d,%d) is %d, expected %d", a, b, got, expected)
    gi = None
    if check_gi:
        gi = repr(verify_gi_target(motivic_engine(region), stability_depth))
    presentation = adams_presentation(max_coweight)
    presentation.check(max_coweight + 1)
    certified, uncertified = _certify_cells(entries, presentation, max_coweight)
    occupied = {
        (-presentation.shift(exps), -presentation.shift(exps) - c)
        for c in range(max_coweight + 2)
        for exps in presentation.monomials(c)
    }

    def trusted(cell: tuple) -> bool:
        a, b = cell
        neighbours = [(a + 3, b + 2), (a - 3, b - 2)]
        return cell in certified and all(n in certified or n not in occupied for n in neighbours)

    einfty = SSDataset(name=presentation.name, context="motivic", page="Einf")
    full = presentation.page(max_coweight, range(-max_stem, max_stem + 1), "Einf")
    for item in full.classes:
        a, b = item.degree.u - 2 * item.degree.s, item.degree.w - item.degree.s
        if trusted((a, b)):
            einfty.add(item.degree, item.name, item.tower)
    if uncertified:
        logger.warning("Route B leaves %d cells uncertified: %s", len(uncertified), uncertified)
    einfty.metadata.update(full.metadata)
    einfty.metadata.update(
        {
            "route": "B",
            "stable": len(stable),
            "unstable": [(e.a, e.b) for e in entries if not e.stable],
            "mismatches": mismatches,
            "uncertified": uncertified,
            "gi_target": gi,
        }
    )
    return einfty


# ---------------------------------------------------------------------------
# Route comparison
# ---------------------------------------------------------------------------


@dataclass
class RouteComparison:
    """Itemized differences between the two routes and the closed form."""

    window: tuple
    route_a_vs_b: list = field(default_factory=list)
    route_a_vs_closed_form: list = field(default_factory=list)
    route_b_vs_closed_form: list = field(default_factory=list)
    coweight_lines: dict = field(default_factory=dict)
    uncertified: list = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        differences = self.route_a_vs_b or self.route_a_vs_closed_form or self.route_b_vs_closed_form
        return not (differences or self.uncertified)


def _differences(source: Adapter, dest: Adapter) -> list[tuple]:
    """(stem, weight, source dimension, dest dimension) per differing cell."""
    items = []
    for element in source.diff_to(dest).get_children():
        if element.action is None:
            continue
        keys = element.keys
        items.append(
            (
                int(keys["stem"]),
                int(keys["weight"]),
                (element.source_attrs or {}).get("dimension", 0),
                (element.dest_attrs or {}).get("dimension", 0),
            )
        )
    return sorted(items)


def compare_routes(route_a: SSDataset, route_b: SSDataset, max_coweight: int = 12, max_stem: int = 24, job=None):
    """Compare the E∞ (stem, weight) tables of both routes with F2[η^±1, σ, μ9]/(σ²)."""
    adapter_a = RouteAdapter(dataset=route_a, max_stem=max_stem, max_coweight=max_coweight, job=job)
    adapter_b = RouteAdapter(dataset=route_b, max_stem=max_stem, max_coweight=max_coweight, job=job)
    closed = ClosedFormAdapter(max_stem=max_stem, max_coweight=max_coweight)
    for adapter in (adapter_a, adapter_b, closed):
        adapter.load()
    report = RouteComparison(
        window=(max_stem, max_coweight),
        route_a_vs_b=_differences(adapter_a, adapter_b),
        route_a_vs_closed_form=_differences(adapter_a, closed),
        route_b_vs_closed_form=_differences(adapter_b, closed),
        uncertified=list(route_b.metadata.get("uncertified", [])),
    )
    for c in range(max_coweight + 1):
        entry = closed.get_or_none(DimensionEntry, {"stem": 0, "weight": -c})
        report.coweight_lines[c] = entry.names if entry is not None else ""
    if report.agrees:
        logger.info("Both routes agree with the closed form on |stem| ≤ %d, coweight ≤ %d", max_stem, max_coweight)
    else:
        logger.warning(
            "Route comparison found %d/%d/%d differing cells",
            len(report.route_a_vs_b),
            len(report.route_a_vs_closed_form),
            len(report.route_b_vs_closed_form),
        )
        if report.uncertified:
            logger.warning("Route B certifies no E∞ at %s", report.uncertified)
    return report
