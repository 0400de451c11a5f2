"""Jobs behind the novikov-eta subcommands.

Jobs:
    ExtJob: Compute Ext over a region for each selected context.
    NovikovD1Job: Tabulate d1 of the algebraic Novikov spectral sequence; derive generator d1's.
    LocalizeJob: Localize at h0 and certify against the vanishing lines.
    VerifyJob: Named verification suites (cocycles, Massey products, η_R, vanishing, …).
    MasseyJob: One triple Massey product with its indeterminacy.
    MotivicJob: The two localized motivic routes and their comparison.
    ChartJob: SVG/TSV charts of a computed region or a localized E∞ page.

Each job records one ``CheckResult`` per check; the CLI exits 0 iff all of them pass.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from novikov_eta.cache import BlockStore
from novikov_eta.charts import ChartSpec, chart, emit
from novikov_eta.cobar import AMOT, BP, P_Q, P_QMOD2, CobarContext, differential, parse_cobar
from novikov_eta.config import RunConfig, get_config
from novikov_eta.datasets import SSDataset
from novikov_eta.exceptions import NovikovEtaError
from novikov_eta.ext import ExtRegion, Region, cohomology
from novikov_eta.motivic import (
    GI_TARGET_DEGREE,
    compare_routes,
    localized_motivic_adams,
    motivic_engine,
    run_localized_manss,
    tau_is_boundary,
    to_adams_grading,
    verify_gi_target,
)
from novikov_eta.novikov import (
    BP_COCYCLES,
    MASSEY_COCYCLES,
    assemble_Einfty,
    derive_generator_d1,
    detect_alpha,
    einfty_inclusion,
    einfty_mismatches,
    eta_r_congruence,
    expected_alpha_detection,
    localize_h0,
    margolis,
    margolis_prediction,
    novikov_d1,
    vanishing_violations,
)
from novikov_eta.utils import format_dimension_report, get_cache_engine, write_artifact

logger = logging.getLogger(__name__)

CONTEXTS = {"sphere": P_Q, "mod2": P_QMOD2, "motivic": AMOT}

MODULES = {"sphere": "Q", "mod2": "Qmod2"}

SUITES = ("lemma61", "cor62-massey", "eta-r", "vanishing", "margolis", "alpha", "gi-e2")

# Region holding both Massey products ⟨h1, q0², h0⟩ and ⟨h0, q0, h1²⟩ and their indeterminacy.
MASSEY_REGION = Region(max_s=3, max_u=12, max_t=3)

ALPHA_RANGE = range(1, 9)


@dataclass(frozen=True)
class CheckResult:
    check: str
    passed: bool
    detail: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def as_json(self) -> str:
        return json.dumps({"check": self.check, "status": self.status, "detail": self.detail}, ensure_ascii=False)


class Job:
    """Base class: configuration, a job logger, the block store and the check ledger."""

    name = "job"

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or get_config()
        self.logger = logging.getLogger(f"{__name__}.{self.name}")
        self.results: list[CheckResult] = []
        self.artifacts: list[Path] = []
        self._store: Optional[BlockStore] = None

    @property
    def store(self) -> Optional[BlockStore]:
        if not self.config.use_cache:
            return None
        if self._store is None:
            self._store = BlockStore(get_cache_engine(self.config.cache_dir), self.config, job=self)
        return self._store

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def region(self) -> Region:
        return Region.from_config(self.config)

    def record(self, check: str, passed: bool, detail: str = "") -> CheckResult:
        result = CheckResult(check, passed, detail)
        self.results.append(result)
        if passed:
            self.logger.info(f"{check}: {detail}")
        else:
            self.logger.error(f"{check} failed: {detail}")
        return result

    def fail(self, check: str, exc: NovikovEtaError) -> CheckResult:
        return self.record(check, False, f"{type(exc).__name__}: {exc}")

    def write(self, filename: str, data: bytes) -> Path:
        path = write_artifact(Path(self.config.output_dir) / filename, data)
        self.artifacts.append(path)
        return path

    def engine(self, context: CobarContext, region: Optional[Region] = None) -> ExtRegion:
        return cohomology(context, region or self.region, store=self.store, job=self, workers=self.config.workers)

    def run(self, **kwargs) -> bool:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# ext / novikov-d1 / localize
# ---------------------------------------------------------------------------


class ExtJob(Job):
    """Compute H^{s,u}(P; Q^t) (and friends) over the configured region."""

    name = "ext"

    def run(self, contexts: Optional[list[str]] = None) -> bool:
        for key in contexts or self.config.contexts:
            context = CONTEXTS[key]
            self.logger.info(f"Computing Ext of {context} over {self.region}...")
            try:
                engine = self.engine(context)
            except NovikovEtaError as exc:
                self.fail(f"ext:{key}", exc)
                continue
            self.write(f"ext-{key}.txt", format_dimension_report(engine).encode("utf-8"))
            nonzero = sum(1 for block in engine.blocks.values() if block.dimension)
            self.record(f"ext:{key}", True, f"{len(engine.blocks)} blocks, {nonzero} nonzero")
        return self.passed


class NovikovD1Job(Job):
    """d1 on every basis class whose target lies in the region, plus the derived generator d1's."""

    name = "novikov-d1"

    def run(self, context: str = "sphere", generators: tuple = (2,)) -> bool:
        try:
            engine = self.engine(CONTEXTS[context])
        except NovikovEtaError as exc:
            self.fail(f"novikov-d1:{context}", exc)
            return False
        lines = ["s\tt\tu\tclass\td1"]
        nonzero = 0
        for degree in sorted(engine.blocks, key=lambda d: (d.u, d.s, d.t)):
            if not engine.region.contains(degree.shift(ds=1, dt=1)):
                continue
            for x in engine.blocks[degree].basis_classes():
                image = novikov_d1(engine, x)
                nonzero += not image.is_zero()
                lines.append(f"{degree.s}\t{degree.t}\t{degree.u}\t{x.name}\t{image.name}")
        self.write(f"novikov-d1-{context}.tsv", ("\n".join(lines) + "\n").encode("utf-8"))
        self.record(f"novikov-d1:{context}", True, f"{len(lines) - 1} classes, {nonzero} nonzero d1")

        if engine.context.mod2:
            return self.passed
        # q1²- and q2-towers are permanent: d1 vanishes on their lifts.
        for name, text in (("q1^2·h0", MASSEY_COCYCLES[1]), ("q2·h0^2", MASSEY_COCYCLES[2])):
            try:
                x = engine.class_of(parse_cobar(engine.context, text))
                image = novikov_d1(engine, x)
                self.record(f"d1({name})", image.is_zero(), f"d1 = {image.name}")
            except NovikovEtaError as exc:
                self.fail(f"d1({name})", exc)
        for n in generators:
            try:
                derived = derive_generator_d1(n, engine)
            except NovikovEtaError as exc:
                self.fail(f"d1(q{n + 1})", exc)
                continue
            self.record(
                f"d1(q{n + 1})",
                derived.agrees,
                f"lift at h0^{derived.exponent}, d1 detected by {derived.detection} (expected {derived.expected})",
            )
        return self.passed


class LocalizeJob(Job):
    """Localization at h0, certified bidegree by bidegree against the 5s−4 / 5s−10 lines."""

    name = "localize"

    def run(self, context: str = "sphere") -> bool:
        try:
            engine = self.engine(CONTEXTS[context])
            groups = localize_h0(engine, job=self)
        except NovikovEtaError as exc:
            self.fail(f"localize:{context}", exc)
            return False
        lines = ["stem\ts\tt\tcomputed\tlocalized\trank\tonto\tiso\tcertified\ttowers"]
        for (stem, s, t), group in sorted(groups.items()):
            lines.append(
                "\t".join(
                    str(value)
                    for value in (
                        stem,
                        s,
                        t,
                        group.computed_dimension,
                        group.dimension,
                        group.rank,
                        int(group.surjective),
                        int(group.bijective),
                        int(group.certified),
                        ";".join(group.towers),
                    )
                )
            )
        self.write(f"localize-{context}.tsv", ("\n".join(lines) + "\n").encode("utf-8"))
        certified = sum(group.certified for group in groups.values())
        self.record(f"localize:{context}", True, f"{len(groups)} bidegrees, {certified} certified")

        module_id = MODULES[context]
        dataset = assemble_Einfty(module_id, self.config.max_s, self.config.max_t, self.config.max_u)
        mismatches = einfty_mismatches(dataset, self.config.max_s, self.config.max_t, self.config.max_u)
        detail = f"differs from closed form at {mismatches}" if mismatches else f"{len(dataset)} localized E∞ classes"
        self.record(f"einf:{context}", not mismatches, detail)
        self.write(f"einf-{context}-adams.tsv", format_stem_weight_table(to_adams_grading(dataset)).encode("utf-8"))
        if context == "sphere":
            report = einfty_inclusion(self.config.max_t, self.config.max_u)
            bad = [key for key, (sphere, _moore, image) in report.items() if image != sphere]
            self.record("einf:inclusion", not bad, f"non-injective at {bad}" if bad else "sphere E∞ ⊂ mod-2 E∞")
        return self.passed


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


class VerifyJob(Job):
    """Named verification suites."""

    name = "verify"

    def run(self, suite: str) -> bool:
        handler = getattr(self, "suite_" + suite.replace("-", "_"), None)
        if suite not in SUITES or handler is None:
            raise ValueError(f"unknown suite {suite!r}; expected one of {list(SUITES)}")
        self.logger.info(f"Running verification suite {suite}...")
        try:
            handler()
        except NovikovEtaError as exc:
            self.fail(suite, exc)
        return self.passed

    def suite_lemma61(self):
        exact = 0
        for i, text in enumerate(BP_COCYCLES, start=1):
            d = differential(parse_cobar(BP, text))
            exact += d.is_zero()
            if not d.is_zero():
                self.record(f"lemma61:{i}", False, f"d = {d!r}")
        self.record("lemma61", exact == len(BP_COCYCLES), f"{exact}/{len(BP_COCYCLES)} cocycles exact")

    def suite_cor62_massey(self):
        cocycles = 0
        for i, text in enumerate(MASSEY_COCYCLES, start=1):
            d = differential(parse_cobar(P_Q, text))
            cocycles += d.is_zero()
            if not d.is_zero():
                self.record(f"cor62:{i}", False, f"d = {d!r}")
        self.record("cor62:cocycles", cocycles == len(MASSEY_COCYCLES), f"{cocycles}/{len(MASSEY_COCYCLES)} cocycles")
        engine = ExtRegion(P_Q, MASSEY_REGION, store=self.store, job=self)
        h0, h1 = engine.parse_class("[ζ1]"), engine.parse_class("[ζ1^2]")
        q0, q0_squared = engine.parse_class("q0[]"), engine.parse_class("q0^2[]")
        for label, (a, b, c), text in (
            ("⟨h1,q0^2,h0⟩", (h1, q0_squared, h0), MASSEY_COCYCLES[1]),
            ("⟨h0,q0,h1^2⟩", (h0, q0, engine.power(h1, 2)), MASSEY_COCYCLES[2]),
        ):
            coset = engine.massey(a, b, c)
            member = engine.parse_class(text)
            self.record(
                f"cor62:{label}",
                coset.contains(member),
                f"indeterminacy dimension {coset.indeterminacy_dimension}",
            )

    def suite_eta_r(self):
        # v_{n+1} sits in degree 2^(n+2) − 2.
        indices = [n for n in range(1, self.config.max_u) if 2 ** (n + 2) - 2 <= self.config.max_u]
        failed = [f"v{n + 1}" for n in indices if not eta_r_congruence(n)]
        checked = ", ".join(f"v{n + 1}" for n in indices)
        self.record("eta-r", not failed, f"checked {checked}" + (f"; fails for {failed}" if failed else ""))

    def suite_vanishing(self):
        engine = self.engine(P_Q)
        bad = vanishing_violations(engine)
        self.record("vanishing", not bad, f"{len(bad)} violations" + (f": {[str(d) for d in bad[:10]]}" if bad else ""))

    def suite_margolis(self):
        for module_id in ("Q", "Qmod2"):
            data = margolis(module_id, self.config.max_t, self.config.max_u)
            bad = [
                (t, u)
                for (t, u), group in sorted(data.groups.items())
                if group.dimension != margolis_prediction(module_id, t, u)
            ]
            self.record(f"margolis:{module_id}", not bad, f"{len(data.groups)} groups, mismatches {bad}")

    def suite_alpha(self):
        for s in ALPHA_RANGE:
            try:
                record = detect_alpha(s)
            except NovikovEtaError as exc:
                self.fail(f"alpha:{s}", exc)
                continue
            expected = expected_alpha_detection(s)
            detail = f"{record.complex}: detected by {record.detection}" + (
                f" ({'; '.join(record.notes)})" if record.notes else ""
            )
            self.record(f"alpha:{s}", record.detection == expected, detail)

    def suite_gi_e2(self):
        depth = self.config.stability_depth
        a = GI_TARGET_DEGREE.u - 2 * GI_TARGET_DEGREE.s
        # First nonzero member of the h0-tower through v2²h0 is at s = 4.
        top = GI_TARGET_DEGREE.s + 1 + depth
        region = Region(max_s=top, max_u=a + 2 * top)
        target = verify_gi_target(motivic_engine(region, store=self.store), depth)
        self.record(
            "gi-e2",
            True,
            f"v2²h0 spans (A,B)={target.cell}: tower {target.dimensions}, top class {target.representative!r}",
        )


# ---------------------------------------------------------------------------
# massey / motivic / chart
# ---------------------------------------------------------------------------


class MasseyJob(Job):
    """⟨a, b, c⟩ for three cocycles given as text."""

    name = "massey"

    def run(self, a: str, b: str, c: str, context: str = "sphere", member: Optional[str] = None) -> bool:
        engine = ExtRegion(CONTEXTS[context], self.region, store=self.store, job=self)
        label = f"⟨{a}, {b}, {c}⟩"
        try:
            coset = engine.massey(engine.parse_class(a), engine.parse_class(b), engine.parse_class(c))
        except NovikovEtaError as exc:
            self.fail(f"massey:{label}", exc)
            return False
        representative = coset.representative
        detail = (
            f"{representative.degree}: {representative.name or representative.coordinates}, "
            f"indeterminacy dimension {coset.indeterminacy_dimension}"
        )
        if member is None:
            self.record(f"massey:{label}", True, detail)
        else:
            try:
                contains = coset.contains(engine.parse_class(member))
            except NovikovEtaError as exc:
                self.fail(f"massey:{label}∋{member}", exc)
                return False
            self.record(f"massey:{label}∋{member}", contains, detail)
        return self.passed


def format_stem_weight_table(dataset: SSDataset) -> str:
    lines = ["stem\tweight\tcoweight\tdimension"]
    for (stem, weight), count in sorted(dataset.stem_weight_table().items()):
        lines.append(f"{stem}\t{weight}\t{stem - weight}\t{count}")
    return "\n".join(lines) + "\n"


class MotivicJob(Job):
    """Route A (ANSS presentation), route B (motivic Adams over F2[τ]) and their comparison."""

    name = "motivic"

    def run(self, route: str, max_coweight: int = 12, max_stem: int = 24) -> bool:
        if route not in ("anss", "adams", "compare"):
            raise ValueError(f"route must be anss, adams or compare, got {route!r}")
        route_a = route_b = None
        try:
            if route in ("anss", "compare"):
                route_a = run_localized_manss(max_coweight, max_stem)
                self.write("motivic-anss.tsv", format_stem_weight_table(route_a).encode("utf-8"))
                self.record("motivic:tau-boundary", tau_is_boundary(), "τ = d3(ᾱ1⁻⁴ᾱ3)")
            if route in ("adams", "compare"):
                region = Region(max_s=self.config.max_s, max_u=self.config.max_u)
                route_b = localized_motivic_adams(region, max_coweight=max_coweight, max_stem=max_stem, job=self)
                self.write("motivic-adams.tsv", format_stem_weight_table(route_b).encode("utf-8"))
                mismatches = route_b.metadata["mismatches"]
                self.record(
                    "motivic:localized-e2",
                    not mismatches,
                    f"{route_b.metadata['stable']} stable (A,B) cells, mismatches {mismatches}",
                )
                uncertified = route_b.metadata["uncertified"]
                self.record(
                    "motivic:B-certified",
                    not uncertified,
                    f"uncertified cells {uncertified}" if uncertified else "every cell of the window is certified",
                )
        except NovikovEtaError as exc:
            self.fail(f"motivic:{route}", exc)
            return False

        comparison = compare_routes(
            route_a or route_b, route_b or route_a, max_coweight=max_coweight, max_stem=max_stem, job=self
        )
        if route == "compare":
            self.record("motivic:A-vs-B", not comparison.route_a_vs_b, f"{len(comparison.route_a_vs_b)} cells differ")
        differences = comparison.route_a_vs_closed_form if route_a is not None else comparison.route_b_vs_closed_form
        self.record(
            f"motivic:{route}-closed-form",
            not differences,
            f"{len(differences)} cells differ from F2[η^±1, σ, μ9]/(σ²) on |stem| ≤ {max_stem}, "
            f"coweight ≤ {max_coweight}",
        )
        if route == "compare":
            self.record(
                "motivic:B-closed-form",
                not comparison.route_b_vs_closed_form,
                f"{len(comparison.route_b_vs_closed_form)} cells differ",
            )
        return self.passed


class ChartJob(Job):
    """Charts of a computed Ext region (``page='ext'``) or of the localized E∞ page."""

    name = "chart"

    def run(
        self,
        context: str = "sphere",
        projection: str = "novikov",
        fmt: str = "svg",
        page: str = "ext",
        max_x: int = 15,
        max_y: int = 8,
        d1: bool = False,
    ) -> bool:
        spec = ChartSpec(
            projection=projection,
            max_x=max_x,
            max_y=max_y,
            multiplicity_threshold=self.config.multiplicity_threshold,
        )
        try:
            if page == "einf":
                dataset = assemble_Einfty(MODULES[context], self.config.max_s, self.config.max_t, self.config.max_u)
                document = emit(spec, dataset, fmt)
            else:
                document = chart(self.engine(CONTEXTS[context]), spec, fmt, d1=d1)
        except NovikovEtaError as exc:
            self.fail(f"chart:{context}", exc)
            return False
        path = self.write(f"chart-{context}-{page}-{projection}.{fmt}", document)
        self.record(f"chart:{context}", True, f"{path} ({len(document)} bytes)")
        return self.passed


JOBS = {
    "ext": ExtJob,
    "novikov-d1": NovikovD1Job,
    "localize": LocalizeJob,
    "verify": VerifyJob,
    "massey": MasseyJob,
    "motivic": MotivicJob,
    "chart": ChartJob,
}
