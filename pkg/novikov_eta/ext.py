"""Cohomology of cobar complexes over a region.

``ExtRegion`` owns the computed ``ExtBlock`` objects of one context and exposes products,
triple Massey products, coboundary solving and expression of cocycles in the basis.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from novikov_eta.cobar import (
    P_Q,
    P_QMOD2,
    CobarContext,
    CobarElement,
    ComplexBlock,
    build_block,
    concatenate,
    get_context,
    parse_cobar,
)
from novikov_eta.config import RunConfig, get_config, set_config
from novikov_eta.exceptions import CocycleError, NotDefinedError, RegionError
from novikov_eta.grading import MultiDegree
from novikov_eta.linalg import BitMatrix, EchelonBasis, bits_to_int, int_to_bits, nullspace, solve

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """Bounds of a computation: 0 ≤ s ≤ max_s, 0 ≤ u ≤ max_u, 0 ≤ t ≤ max_t."""

    max_s: int
    max_u: int
    max_t: int = 0
    max_s_plus_t: Optional[int] = None

    def contains(self, degree: MultiDegree) -> bool:
        if not (0 <= degree.s <= self.max_s and 0 <= degree.u <= self.max_u and 0 <= degree.t <= self.max_t):
            return False
        return self.max_s_plus_t is None or degree.s + degree.t <= self.max_s_plus_t

    def degrees(self, context: CobarContext) -> Iterator[MultiDegree]:
        """Every (s, t, u[, w]) of the region, ordered by (u, s, t, w)."""
        for u in range(self.max_u + 1):
            if not context.is_motivic and u % 2:
                continue
            for s in range(self.max_s + 1):
                if context.is_motivic:
                    for w in range(u // 2 + 1):
                        yield MultiDegree(s, 0, u, w)
                    continue
                for t in range(self.max_t + 1):
                    degree = MultiDegree(s, t, u)
                    if self.contains(degree):
                        yield degree

    @classmethod
    def from_config(cls, config: Optional[RunConfig] = None) -> "Region":
        config = config or get_config()
        return cls(max_s=config.max_s, max_u=config.max_u, max_t=config.max_t)


# ---------------------------------------------------------------------------
# Blocks and classes
# ---------------------------------------------------------------------------


@dataclass
class ExtBlock:
    """H^{s,t,u} with chosen representative cocycles.

    ``representatives`` are int bitsets over ``block.basis``; ``echelon`` spans the
    boundaries and representatives, tagged by representative coordinates.
    """

    context: CobarContext
    degree: MultiDegree
    dimension: int
    representatives: tuple
    block: ComplexBlock = field(repr=False, compare=False)
    echelon: EchelonBasis = field(repr=False, compare=False)
    boundary_rank: int = 0
    names: list = field(default_factory=list, compare=False)

    def __post_init__(self):
        if not self.names:
            self.names = [None] * self.dimension

    def representative(self, i: int) -> CobarElement:
        return self.block.element_from_bits(int_to_bits(self.representatives[i]))

    def basis_classes(self) -> list["ExtClass"]:
        return [ExtClass.unit(self, i) for i in range(self.dimension)]

    def express(self, z: CobarElement) -> tuple[int, ...]:
        """Coordinates of the class of the cocycle z in this block's basis.

        Raises:
            CocycleError: If z is not a cocycle of this block.
        """
        if z.is_zero():
            return (0,) * self.dimension
        if z.context != self.context:
            raise CocycleError(f"{z!r} lives in {z.context}, not {self.context}")
        v = bits_to_int(self.block.coordinates(z))
        remainder, tag = self.echelon.reduce(v)
        if remainder:
            raise CocycleError(f"{z!r} is not a cocycle at {self.context} {self.degree}")
        return tuple((tag >> i) & 1 for i in range(self.dimension))

    def is_boundary(self, z: CobarElement) -> bool:
        return not any(self.express(z))


@dataclass(frozen=True)
class ExtClass:
    """A cohomology class given by coordinates in its home block."""

    home: ExtBlock = field(compare=False)
    coordinates: tuple
    degree: MultiDegree = None
    context_id: str = ""

    @classmethod
    def make(cls, home: ExtBlock, coordinates) -> "ExtClass":
        return cls(home, tuple(int(c) & 1 for c in coordinates), home.degree, home.context.id)

    @classmethod
    def unit(cls, home: ExtBlock, i: int) -> "ExtClass":
        return cls.make(home, [1 if j == i else 0 for j in range(home.dimension)])

    @classmethod
    def zero(cls, home: ExtBlock) -> "ExtClass":
        return cls.make(home, [0] * home.dimension)

    def is_zero(self) -> bool:
        return not any(self.coordinates)

    def representative(self) -> CobarElement:
        result = CobarElement(self.home.context)
        for i, c in enumerate(self.coordinates):
            if c:
                result = result + self.home.representative(i)
        return result

    @property
    def name(self) -> Optional[str]:
        if self.is_zero():
            return "0"
        names = [
            self.home.names[i] or f"x{self.degree.s},{self.degree.t},{self.degree.u}#{i}"
            for i, c in enumerate(self.coordinates)
            if c
        ]
        return " + ".join(names)

    def __add__(self, other: "ExtClass") -> "ExtClass":
        if other.degree != self.degree or other.context_id != self.context_id:
            raise RegionError("Cannot add classes from different blocks")
        return ExtClass.make(self.home, [a ^ b for a, b in zip(self.coordinates, other.coordinates)])

    def __repr__(self) -> str:
        return f"ExtClass({self.context_id} {self.degree}: {self.name})"


# ---------------------------------------------------------------------------
# Block computation
# ---------------------------------------------------------------------------


def _out_matrix(block: ComplexBlock) -> BitMatrix:
    return BitMatrix.from_rows(block.d_out, block.target_size)


def compute_ext_block(context: CobarContext, degree: MultiDegree) -> ExtBlock:
    """Cycles modulo boundaries of one block, with deterministic representatives.

    Boundaries come from the rows of the incoming differential; cycles are the nullspace
    of the transposed outgoing differential, taken in free-column order.
    """
    s, t, u, w = degree.s, degree.t, degree.u, degree.w
    block = build_block(context, s, t, u, w)
    n = len(block)
    echelon = EchelonBasis()
    boundary_rank = 0
    if s > 0 and n:
        incoming = build_block(context, s - 1, t, u, w)
        for row in incoming.d_out:
            if echelon.insert(bits_to_int(row)):
                boundary_rank += 1
    representatives = []
    if n:
        cycles = nullspace(_out_matrix(block).transpose())
        for i in range(cycles.rows):
            v = cycles.row_int(i)
            if echelon.insert(v, 1 << len(representatives)):
                representatives.append(v)
    logger.debug(
        "Ext %s %s: basis %d, boundaries %d, dimension %d", context, degree, n, boundary_rank, len(representatives)
    )
    return ExtBlock(
        context=context,
        degree=degree,
        dimension=len(representatives),
        representatives=tuple(representatives),
        block=block,
        echelon=echelon,
        boundary_rank=boundary_rank,
    )


def rebuild_ext_block(context: CobarContext, degree: MultiDegree, representatives: tuple) -> ExtBlock:
    """Reconstruct an ExtBlock from stored representatives, re-verifying them.

    Raises:
        CocycleError: If a stored representative is not a cocycle, the representatives are
            dependent modulo boundaries, or the dimension disagrees with the ranks.
    """
    s, t, u, w = degree.s, degree.t, degree.u, degree.w
    block = build_block(context, s, t, u, w)
    echelon = EchelonBasis()
    boundary_rank = 0
    if s > 0 and len(block):
        incoming = build_block(context, s - 1, t, u, w)
        for row in incoming.d_out:
            if echelon.insert(bits_to_int(row)):
                boundary_rank += 1
    outgoing = _out_matrix(block)
    for k, v in enumerate(representatives):
        image = 0
        for i in int_to_bits(v):
            image ^= bits_to_int(block.d_out[i])
        if image:
            raise CocycleError(f"Stored representative {k} at {context} {degree} is not a cocycle")
        if not echelon.insert(v, 1 << k):
            raise CocycleError(f"Stored representatives at {context} {degree} are dependent modulo boundaries")
    expected = len(block) - outgoing.rank() - boundary_rank
    if expected != len(representatives):
        raise CocycleError(f"Stored dimension {len(representatives)} at {context} {degree} differs from {expected}")
    return ExtBlock(
        context=context,
        degree=degree,
        dimension=len(representatives),
        representatives=tuple(representatives),
        block=block,
        echelon=echelon,
        boundary_rank=boundary_rank,
    )


def _compute_task(context_id: str, degree: MultiDegree, config: RunConfig) -> tuple:
    set_config(config)
    ext_block = compute_ext_block(get_context(context_id), degree)
    return degree, ext_block.representatives


# ---------------------------------------------------------------------------
# Region engine
# ---------------------------------------------------------------------------


class ExtRegion:
    """Lazily computed Ext blocks of one context over a region."""

    def __init__(self, context: CobarContext, region: Region, store=None, job=None):
        self.context = context
        self.region = region
        self.store = store
        self.job = job
        self.blocks: dict[MultiDegree, ExtBlock] = {}

    def _log(self, level: str, message: str) -> None:
        getattr(logger, level)(message)
        if self.job is not None:
            getattr(self.job.logger, level)(message)

    # -- computation --------------------------------------------------------

    def block(self, degree: MultiDegree) -> ExtBlock:
        """ExtBlock at ``degree``, computed or loaded on first use.

        Raises:
            RegionError: If ``degree`` lies outside the region.
        """
        cached = self.blocks.get(degree)
        if cached is not None:
            return cached
        if not self._inside(degree):
            raise RegionError(f"{self.context} {degree} lies outside the computed region {self.region}")
        ext_block = None
        if self.store is not None:
            ext_block = self.store.load(self.context, degree)
        if ext_block is None:
            ext_block = compute_ext_block(self.context, degree)
            if self.store is not None:
                self.store.save(ext_block)
        self.blocks[degree] = ext_block
        return ext_block

    def _inside(self, degree: MultiDegree) -> bool:
        if self.context.is_motivic:
            return 0 <= degree.s <= self.region.max_s and 0 <= degree.u <= self.region.max_u
        return self.region.contains(degree)

    def compute_all(self, workers: int = 1) -> dict[MultiDegree, ExtBlock]:
        """Compute every block of the region, then run the labeling pass."""
        degrees = [d for d in self.region.degrees(self.context) if d not in self.blocks]
        if self.store is not None:
            for degree in list(degrees):
                loaded = self.store.load(self.context, degree)
                if loaded is not None:
                    self.blocks[degree] = loaded
                    degrees.remove(degree)
            if self.blocks:
                self._log("info", f"Loaded {len(self.blocks)} blocks of {self.context} from cache")
        if workers > 1 and len(degrees) > 1:
            config = get_config()
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_compute_task, self.context.id, d, config) for d in degrees]
                for future in futures:
                    degree, representatives = future.result()
                    self.blocks[degree] = rebuild_ext_block(self.context, degree, representatives)
                    if self.store is not None:
                        self.store.save(self.blocks[degree])
        else:
            for degree in degrees:
                self.block(degree)
        self._log("info", f"Computed {len(degrees)} blocks of {self.context} over {self.region}")
        label_classes(self)
        return self.blocks

    def dimension(self, degree: MultiDegree) -> int:
        return self.block(degree).dimension

    # -- classes ------------------------------------------------------------

    def class_of(self, z: CobarElement) -> ExtClass:
        """The class of a homogeneous cocycle."""
        degree = z.degree()
        if degree is None:
            raise CocycleError("The zero cochain has no degree; use ExtClass.zero")
        home = self.block(degree)
        return ExtClass.make(home, home.express(z))

    def parse_class(self, text: str) -> ExtClass:
        return self.class_of(parse_cobar(self.context, text))

    def express_in_basis(self, z: CobarElement) -> tuple[int, ...]:
        return self.class_of(z).coordinates

    def product(self, a: ExtClass, b: ExtClass) -> ExtClass:
        """Class of the concatenated representatives.

        Raises:
            RegionError: If the product lands outside the region.
        """
        degree = _sum_degree(a.degree, b.degree)
        if not self._inside(degree):
            raise RegionError(f"Product {a.name}·{b.name} lands at {degree}, outside {self.region}")
        home = self.block(degree)
        if a.is_zero() or b.is_zero():
            return ExtClass.zero(home)
        return ExtClass.make(home, home.express(concatenate(a.representative(), b.representative())))

    def power(self, a: ExtClass, k: int) -> ExtClass:
        result = a
        for _ in range(k - 1):
            result = self.product(result, a)
        return result

    def solve_coboundary(self, z: CobarElement) -> Optional[CobarElement]:
        """A cochain y with d(y) = z (free variables zero), or None when z is not a coboundary."""
        return solve_coboundary(z)

    def massey(self, a: ExtClass, b: ExtClass, c: ExtClass) -> "MasseyCoset":
        """⟨a, b, c⟩ as a representative class and its indeterminacy a·H + H·c.

        Raises:
            NotDefinedError: If a·b or b·c is nonzero.
        """
        if not self.product(a, b).is_zero() or not self.product(b, c).is_zero():
            raise NotDefinedError(f"⟨{a.name}, {b.name}, {c.name}⟩ is not defined: a·b or b·c is nonzero")
        rep_a, rep_b, rep_c = a.representative(), b.representative(), c.representative()
        u = solve_coboundary(concatenate(rep_a, rep_b))
        v = solve_coboundary(concatenate(rep_b, rep_c))
        if u is None or v is None:
            raise NotDefinedError("Defining system not found although the products vanish")
        value = concatenate(u, rep_c) + concatenate(rep_a, v)
        degree = _sum_degree(_sum_degree(a.degree, b.degree), c.degree).shift(ds=-1)
        if not self._inside(degree):
            raise RegionError(f"Massey product lands at {degree}, outside {self.region}")
        home = self.block(degree)
        representative = ExtClass.make(home, home.express(value)) if not value.is_zero() else ExtClass.zero(home)
        indeterminacy = EchelonBasis()
        left_degree = _sum_degree(b.degree, c.degree).shift(ds=-1)
        right_degree = _sum_degree(a.degree, b.degree).shift(ds=-1)
        for x in self._classes_at(left_degree):
            _insert_class(indeterminacy, self.product(a, x))
        for x in self._classes_at(right_degree):
            _insert_class(indeterminacy, self.product(x, c))
        return MasseyCoset(representative=representative, indeterminacy=indeterminacy)

    def _classes_at(self, degree: MultiDegree) -> list[ExtClass]:
        if degree.s < 0 or not self._inside(degree):
            return []
        return self.block(degree).basis_classes()


def _insert_class(basis: EchelonBasis, x: ExtClass) -> None:
    basis.insert(sum(c << i for i, c in enumerate(x.coordinates)))


def _sum_degree(a: MultiDegree, b: MultiDegree) -> MultiDegree:
    w = None if a.w is None or b.w is None else a.w + b.w
    return MultiDegree(a.s + b.s, a.t + b.t, a.u + b.u, w)


@dataclass
class MasseyCoset:
    representative: ExtClass
    indeterminacy: EchelonBasis = field(repr=False)

    @property
    def indeterminacy_dimension(self) -> int:
        return len(self.indeterminacy)

    def contains(self, x: ExtClass) -> bool:
        if x.degree != self.representative.degree:
            return False
        diff = sum((a ^ b) << i for i, (a, b) in enumerate(zip(x.coordinates, self.representative.coordinates)))
        return self.indeterminacy.contains(diff)


def solve_coboundary(z: CobarElement) -> Optional[CobarElement]:
    """Deterministic preimage under the cobar differential, or None.

    Raises:
        CocycleError: If z is not homogeneous.
    """
    if z.is_zero():
        return CobarElement(z.context)
    degree = z.degree()
    if degree.s == 0:
        return None
    target = build_block(z.context, degree.s, degree.t, degree.u, degree.w)
    source = build_block(z.context, degree.s - 1, degree.t, degree.u, degree.w)
    if not len(source):
        return None
    rhs_bits = set(target.coordinates(z))
    rhs = [1 if i in rhs_bits else 0 for i in range(len(target))]
    matrix = BitMatrix.from_rows(source.d_out, len(target)).transpose()
    x = solve(matrix, rhs)
    if x is None:
        return None
    return source.element_from_bits(i for i, bit in enumerate(x) if bit)


def cohomology(context, region: Region, store=None, job=None, workers: Optional[int] = None) -> ExtRegion:
    """Compute every block of ``region`` for ``context`` (a CobarContext or its id)."""
    if isinstance(context, str):
        context = get_context(context)
    engine = ExtRegion(context, region, store=store, job=job)
    engine.compute_all(workers or get_config().workers)
    return engine


# ---------------------------------------------------------------------------
# Labeling
# ---------------------------------------------------------------------------


def _named_cocycles(context: CobarContext, degree: MultiDegree) -> list[tuple[str, str]]:
    """Candidate (name, cochain text) pairs whose classes get a provable label at ``degree``."""
    s, t, u = degree.s, degree.t, degree.u
    candidates = []
    if context == P_QMOD2 and t:
        return candidates
    q0 = f"q0^{t}" if t > 1 else ("q0" if t == 1 else "")
    if u == 2 * s:
        word = "[" + "|".join(["ζ1"] * s) + "]"
        name = "·".join(part for part in (q0, f"h0^{s}" if s > 1 else ("h0" if s == 1 else "")) if part) or "1"
        candidates.append((name, f"{q0}{word}"))
    if s == 1 and t == 0 and u >= 4 and u & (u - 1) == 0:
        n = u.bit_length() - 2
        candidates.append((f"h{n}", f"[ζ1^{2**n}]"))
    return candidates


def label_classes(engine: ExtRegion) -> None:
    """Label a basis class when a named cocycle reduces to exactly that basis element."""
    if engine.context not in (P_Q, P_QMOD2):
        return
    for degree, ext_block in sorted(engine.blocks.items(), key=lambda item: (item[0].u, item[0].s, item[0].t)):
        for name, text in _named_cocycles(engine.context, degree):
            try:
                coordinates = ext_block.express(parse_cobar(engine.context, text))
            except CocycleError:
                logger.warning("Named cochain %s at %s is not a cocycle", name, degree)
                continue
            if sum(coordinates) == 1:
                ext_block.names[coordinates.index(1)] = name


def total_dimension(engine: ExtRegion, s: int, u: int) -> int:
    """Σ_t dim H^{s,u}(Γ; M^t) over the computed t-range."""
    degrees = [MultiDegree(s, t, u) for t in range(engine.region.max_t + 1)]
    return sum(engine.dimension(degree) for degree in degrees if engine.region.contains(degree))


__all__ = [
    "ExtBlock",
    "ExtClass",
    "ExtRegion",
    "MasseyCoset",
    "Region",
    "cohomology",
    "compute_ext_block",
    "rebuild_ext_block",
    "solve_coboundary",
    "total_dimension",
]
