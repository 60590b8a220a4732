"""Report sections and their assembly.

Each command asks for a list of :class:`Section` subclasses. Their
dependencies are pulled in and ordered with a topological sort, then each
section is computed once, timed, and rendered as JSON or as a table.
"""

import logging
from abc import abstractmethod
from dataclasses import dataclass, field
from graphlib import TopologicalSorter
from typing import Any

from loopalg.cobar import CobarAlgebra, build_cobar, omega_homology
from loopalg.config import RunConfig
from loopalg.dga.base import FDGA, ValidationReport, characteristic_caveat, validate_fdga
from loopalg.hochschild.complex import e2_page, hochschild_homology, loop_homology
from loopalg.hochschild.ring import HomologyRing
from loopalg.intersection import (
    ChainMapError,
    IntersectionReport,
    LiftSolver,
    image_centrality,
    image_contains,
    induced_I,
    intersection_chain_map,
    kernel_nilpotency,
    surjectivity_profile,
)
from loopalg.utils import format as fmt
from loopalg.utils.logging import PhaseTimer, debug_time

logger = logging.getLogger(__name__)

SCHEMA = 1


@dataclass
class RunContext:
    """Shared state of one run: inputs, computed objects and diagnostics."""

    config: RunConfig
    algebra: FDGA
    results: dict[type["Section"], Any] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    invalid: bool = False
    timer: PhaseTimer = field(default_factory=PhaseTimer)

    @property
    def min_degree(self) -> int | None:
        return self.config.min_degree

    @property
    def max_degree(self) -> int:
        return self.config.max_degree


class Section:
    """A report section.

    Parameters
    ----------
    context
        The run it belongs to.
    """

    #: Key of the section in JSON reports
    name: str
    #: Title in table reports
    title: str
    #: Sections computed before this one
    deps: list[type["Section"]] = []

    def __init__(self, context: RunContext):
        self.context = context

    def get(self, section: type["Section"]) -> Any:
        assert section in self.deps
        return self.context.results[section]

    @abstractmethod
    def compute(self) -> Any:
        """Compute the section's object."""

    @abstractmethod
    def as_dict(self, value: Any) -> dict:  # type: ignore[type-arg]
        """JSON form of the computed object."""

    def render(self, value: Any) -> str:
        """Table form; indented JSON-like text by default."""
        return "\n".join(f"{k}: {v}" for k, v in self.as_dict(value).items())


def _ring_dict(ring: HomologyRing) -> dict:  # type: ignore[type-arg]
    window = ring.window
    return {
        "window": [window.min_degree, window.max_degree],
        "coefficients": window.meta,
        "shift": ring.shift,
        "betti": {str(n): b for n, b in ring.betti_table().items()},
        "classes": [
            {
                "label": c.label,
                "degree": c.degree,
                "representative": window.chain_label(ring.representative(c.label)),
            }
            for n in ring.degrees
            for c in ring.classes.get(n, [])
        ],
        "unit": ring.unit,
        "products": [[x, y, z, v] for x, y, z, v in ring.constants()],
        "relations": [[x, y] for x, y in ring.relations()],
    }


def _ring_table(ring: HomologyRing, title: str) -> str:
    lines = [fmt.betti_table(ring.betti_table(), title, ring.shift)]
    classes = [
        (c.label, fmt.degree(c.degree, ring.shift))
        for n in ring.degrees
        for c in ring.classes.get(n, [])
    ]
    lines += ["", fmt.table(classes, ["class", "degree"])]
    if ring.structure:
        constants = [(f"{x}•{y}", z, fmt.scalar(v)) for x, y, z, v in ring.constants()]
        lines += ["", fmt.table(constants, ["product", "class", "coefficient"])]
        relations = [(f"{x}•{y}", "0") for x, y in ring.relations()]
        lines += ["", fmt.table(relations, ["relation", "value"])]
    return "\n".join(lines)


class Validation(Section):
    name = "validation"
    title = "Validation"

    def compute(self) -> ValidationReport:
        report = validate_fdga(self.context.algebra)
        if not report.valid:
            self.context.invalid = True
        return report

    def as_dict(self, value: ValidationReport) -> dict:  # type: ignore[type-arg]
        return value.as_dict()

    def render(self, value: ValidationReport) -> str:
        rows = [
            ("valid", value.valid),
            ("graded commutative", value.commutative),
            ("Poincaré duality", value.poincare),
            ("characteristic caveat", value.characteristic_caveat),
        ]
        text = fmt.table(rows, ["check", "result"])
        if value.violations:
            text += "\n\n" + "\n".join(str(v) for v in value.violations)
        return text


class Cobar(Section):
    name = "cobar"
    title = "Cobar construction"
    deps = [Validation]

    def compute(self) -> CobarAlgebra:
        return build_cobar(self.context.algebra)

    def as_dict(self, value: CobarAlgebra) -> dict:  # type: ignore[type-arg]
        return {
            "generators": [
                {"label": label, "degree": degree} for label, degree in value.generators
            ],
            "differential": {
                value.word_label((i,)): value.chain_label(value.generator_differential(i))
                for i in range(len(value.generators))
            },
        }


class LoopRing(Section):
    name = "loop_homology"
    title = "Loop homology"
    deps = [Cobar]

    def compute(self) -> HomologyRing:
        ctx = self.context
        return loop_homology(ctx.algebra, ctx.max_degree, ctx.min_degree, self.get(Cobar))

    def as_dict(self, value: HomologyRing) -> dict:  # type: ignore[type-arg]
        return _ring_dict(value)

    def render(self, value: HomologyRing) -> str:
        return f"degrees of A⊗T(W); loop homology H_*+{value.shift}\n" + _ring_table(
            value, "betti"
        )


class OmegaRing(Section):
    name = "omega_homology"
    title = "Homology of the based loop space"
    deps = [Cobar]

    def compute(self) -> HomologyRing:
        return omega_homology(self.get(Cobar), self.context.max_degree)

    def as_dict(self, value: HomologyRing) -> dict:  # type: ignore[type-arg]
        return _ring_dict(value)

    def render(self, value: HomologyRing) -> str:
        return _ring_table(value, "betti")


class ChainMapCheck(Section):
    name = "chain_map"
    title = "ε⊗1 chain map"
    deps = [Cobar, LoopRing]

    def compute(self) -> bool:
        try:
            intersection_chain_map(
                self.context.algebra, self.get(LoopRing).window, self.get(Cobar)
            )
        except ChainMapError as e:
            self.context.violations.append(str(e))
            return False
        return True

    def as_dict(self, value: bool) -> dict:  # type: ignore[type-arg]
        return {"commutes": value}


class Intersection(Section):
    name = "intersection"
    title = "Intersection morphism"
    deps = [LoopRing, OmegaRing, ChainMapCheck]

    def compute(self) -> IntersectionReport:
        report = induced_I(self.get(LoopRing), self.get(OmegaRing))
        for x, y in report.multiplicative_violations:
            self.context.violations.append(f"I({x}•{y}) != I({x})I({y})")
        return report

    def as_dict(self, value: IntersectionReport) -> dict:  # type: ignore[type-arg]
        return value.as_dict()

    def render(self, value: IntersectionReport) -> str:
        rows = [
            (
                n,
                value.rank(n),
                "; ".join(fmt.label_chain(v) for v in value.kernel.get(n, [])) or "-",
                "; ".join(fmt.label_chain(v) for v in value.image.get(n, [])) or "-",
            )
            for n in value.degrees
        ]
        text = fmt.table(rows, ["degree", "rank", "kernel", "image"])
        if value.vanishes_above(0):
            text += "\n\nI = 0 in all degrees ≥ 1"
        return text


class Nilpotency(Section):
    name = "nilpotency"
    title = "Nilpotency of Ker I"
    deps = [Intersection]

    def compute(self) -> Any:
        record = kernel_nilpotency(self.get(Intersection))
        if not record.respected:
            self.context.violations.append(
                f"{record.observed} kernel classes have a nonzero product, bound {record.bound}"
            )
        return record

    def as_dict(self, value: Any) -> dict:  # type: ignore[type-arg]
        return value.as_dict()


class Centrality(Section):
    name = "centrality"
    title = "Centrality of Im I"
    deps = [Intersection]

    def compute(self) -> Any:
        record = image_centrality(self.get(Intersection))
        for x, y in record.violations:
            self.context.violations.append(f"[{x}, {y}] != 0")
        return record

    def as_dict(self, value: Any) -> dict:  # type: ignore[type-arg]
        return value.as_dict()


class Surjectivity(Section):
    name = "surjectivity"
    title = "Surjectivity of I"
    deps = [Intersection]

    def compute(self) -> Any:
        return surjectivity_profile(self.get(Intersection))

    def as_dict(self, value: Any) -> dict:  # type: ignore[type-arg]
        return value.as_dict()

    def render(self, value: Any) -> str:
        rows = [(n, "yes" if ok else "no") for n, ok in value.degrees.items()]
        text = fmt.table(rows, ["degree", "surjective"])
        return text + f"\n\nsurjective throughout window: {value.surjective}"


class LiftCheck(Section):
    """Compares lifting witnesses with image membership for every ``H(ΩM)`` class."""

    name = "lift_check"
    title = "Lifting witnesses"
    deps = [Cobar, OmegaRing, Intersection]

    def compute(self) -> dict:  # type: ignore[type-arg]
        c, omega, report = self.get(Cobar), self.get(OmegaRing), self.get(Intersection)
        outcomes: dict[str, bool] = {}
        for n in omega.degrees:
            if not omega.classes.get(n):
                continue
            solver = LiftSolver(c, n)
            for cls in omega.classes[n]:
                alpha = {word: v for (_, word), v in omega.representative(cls.label).items()}
                lifted = solver.solve(alpha).found
                if lifted != image_contains(report, alpha):
                    self.context.violations.append(
                        f"lifting {cls.label} disagrees with the image of I"
                    )
                outcomes[cls.label] = lifted
        return outcomes

    def as_dict(self, value: dict) -> dict:  # type: ignore[type-arg]
        return {"lifts": value}


class Hochschild(Section):
    name = "hochschild"
    title = "Hochschild cohomology"
    deps = [Cobar]

    def compute(self) -> HomologyRing:
        ctx = self.context
        return hochschild_homology(
            ctx.algebra,
            ctx.config.coefficients,
            ctx.max_degree,
            ctx.min_degree,
            self.get(Cobar),
        )

    def as_dict(self, value: HomologyRing) -> dict:  # type: ignore[type-arg]
        return _ring_dict(value)

    def render(self, value: HomologyRing) -> str:
        return f"coefficients {value.window.meta}\n" + _ring_table(value, "dimension")


class E2(Section):
    name = "e2"
    title = "E2 page"
    deps = [Validation]

    def compute(self) -> HomologyRing:
        ctx = self.context
        return e2_page(ctx.algebra, ctx.max_degree, ctx.min_degree)

    def as_dict(self, value: HomologyRing) -> dict:  # type: ignore[type-arg]
        return _ring_dict(value)

    def render(self, value: HomologyRing) -> str:
        return _ring_table(value, "dimension")


COMMAND_SECTIONS: dict[str, list[type[Section]]] = {
    "validate": [Validation],
    "loop-homology": [Validation, LoopRing],
    "omega-homology": [Validation, OmegaRing],
    "intersection": [Validation, Intersection, Nilpotency, Centrality, Surjectivity],
    "hochschild": [Validation, Hochschild],
    "e2": [Validation, E2],
}


def order_sections(desired: list[type[Section]]) -> list[type[Section]]:
    """`desired` with every dependency, in dependency order."""
    required = list(desired)
    i = 0
    while i < len(required):
        for dep in required[i].deps:
            if dep not in required:
                required.append(dep)
        i += 1
    graph = {section: section.deps for section in required}
    return list(TopologicalSorter(graph).static_order())


@dataclass
class Report:
    """The outcome of one command."""

    context: RunContext
    sections: list[tuple[type[Section], Any]]

    @property
    def exit_code(self) -> int:
        if self.context.invalid:
            return 2
        if self.context.violations:
            return 3
        return 0

    def as_dict(self) -> dict:  # type: ignore[type-arg]
        ctx = self.context
        a = ctx.algebra
        document = {
            "schema": SCHEMA,
            "config": ctx.config.as_dict(),
            "algebra": {
                "name": a.name,
                "field": a.field,
                "formal_dimension": a.formal_dimension,
                "generators": [
                    {"label": label, "degree": a.cohomological_degree(i)}
                    for i, label in enumerate(a.labels)
                ],
            },
            "diagnostics": {
                "characteristic_caveat": characteristic_caveat(a),
                "theorem_violations": list(ctx.violations),
                "skipped": ctx.invalid,
            },
            "sections": {section.name: section(ctx).as_dict(value) for section, value in self.sections},
        }
        if ctx.config.timings:
            document["timings"] = ctx.timer.as_dict()
        return document

    def to_table(self) -> str:
        ctx = self.context
        a = ctx.algebra
        header = f"{a.name} over {a.field}, formal dimension {a.formal_dimension}"
        parts = [header, "=" * len(header)]
        if characteristic_caveat(a):
            parts.append(
                f"caveat: characteristic {a.field.characteristic} ≤ {a.formal_dimension};"
                " commutative models may not apply"
            )
        for section, value in self.sections:
            parts += ["", section.title, "-" * len(section.title), section(ctx).render(value)]
        if ctx.violations:
            parts += ["", "Violations", "----------", *ctx.violations]
        if ctx.config.timings:
            timings = [(name, f"{t:0.3f}") for name, t in ctx.timer.timings.items()]
            parts += ["", fmt.table(timings, ["phase", "seconds"])]
        return "\n".join(parts) + "\n"


@debug_time
def build_report(
    config: RunConfig, algebra: FDGA, sections: list[type[Section]] | None = None
) -> Report:
    """Compute the sections of `config.command` (or `sections`) for `algebra`.

    Sections after a failed validation are skipped.
    """
    desired = sections if sections is not None else list(COMMAND_SECTIONS[config.command])
    if config.command == "intersection" and config.lift_check and LiftCheck not in desired:
        desired.append(LiftCheck)
    context = RunContext(config, algebra)
    computed = []
    for section in order_sections(desired):
        if context.invalid:
            logger.warning(f"skipping {section.name}: {algebra} is not valid")
            continue
        with context.timer.phase(section.name):
            value = section(context).compute()
        context.results[section] = value
        computed.append((section, value))
    return Report(context, computed)
