"""The intersection morphism ``I = H(ε⊗1)`` from loop homology to ``H(ΩM)``.

``ε⊗1 : A ⊗ T(W) → T(W)`` keeps the terms ``1⊗x`` and kills ``e_i⊗x``.
Everything here is checked inside a degree window; products and commutators
that leave the window are counted as unobserved rather than zero.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from loopalg import LoopAlgError
from loopalg.cobar import (
    Chain,
    CobarAlgebra,
    build_cobar,
    chain_degree,
    cobar_differential,
    cobar_window,
    omega_homology,
)
from loopalg.dga.base import UNIT, FDGA
from loopalg.dga.bimodule import self_bimodule
from loopalg.hochschild.complex import DifferentialEngine, loop_homology, slice_keys
from loopalg.hochschild.ring import HomologyRing, LabelChain
from loopalg.hochschild.window import ComplexWindow, KeyChain, WindowExceeded
from loopalg.linalg.homology import NotACycle
from loopalg.linalg.scalars import Scalar, sign
from loopalg.linalg.sparse import (
    Column,
    ColumnEchelon,
    LinearSolver,
    SparseMatrix,
    SparseVector,
    kernel_basis,
)
from loopalg.utils.format import label_chain
from loopalg.utils.logging import debug_time, info_time

logger = logging.getLogger(__name__)


class IntersectionError(LoopAlgError):
    """Problem computing the intersection morphism."""


class WindowMismatch(IntersectionError, ValueError):
    """The two sides were computed over different windows or algebras."""


class ChainMapError(IntersectionError):
    """``ε⊗1`` fails to commute with the differentials."""


@dataclass(eq=False)
class ChainMap:
    """A degree-preserving map between two windows, one matrix per slice."""

    source: ComplexWindow
    target: ComplexWindow
    matrices: dict[int, SparseMatrix]

    def apply(self, degree: int, chain: Mapping) -> KeyChain:  # type: ignore[type-arg]
        vector = self.source.to_vector(degree, chain)
        return self.target.to_chain(degree, self.matrices[degree].apply(vector))


def _augmentation_columns(source: ComplexWindow, target: ComplexWindow, degree: int) -> list[Column]:
    index = target.index(degree)
    one = source.field.one
    return [
        {index[UNIT, word]: one} if s == UNIT else {} for s, word in source.keys.get(degree, [])
    ]


def intersection_chain_map(
    a: FDGA, window: ComplexWindow, c: CobarAlgebra | None = None
) -> ChainMap:
    """``ε⊗1`` from a loop homology window to the cobar window of the same range.

    Parameters
    ----------
    a
        The algebra `window` was built from.
    window
        A window with coefficients ``A``.
    c
        The cobar algebra of `a`, built if not given.

    Returns
    -------
    ChainMap
        The map, checked to commute with the differentials on every slice.

    Raises
    ------
    WindowMismatch
        If `window` does not have coefficients ``A``.
    ChainMapError
        If the square fails to commute somewhere.
    """
    if window.meta != "A" or window.multiply is None:
        raise WindowMismatch(f"{window} is not a loop homology window")
    c = c if c is not None else build_cobar(a)
    target = cobar_window(c, window.max_degree, window.min_degree)
    matrices = {
        degree: SparseMatrix.from_columns(
            target.dimension(degree), a.field, _augmentation_columns(window, target, degree)
        )
        for degree in window.keys
    }
    for degree in range(window.min_degree, window.max_degree + 1):
        down_then_across = matrices[degree - 1] @ window.differential(degree)
        across_then_down = target.differential(degree) @ matrices[degree]
        if down_then_across != across_then_down:
            raise ChainMapError(f"ε⊗1 is not a chain map in degree {degree} for {a}")
    logger.debug(f"ε⊗1 commutes with D on {window}")
    return ChainMap(window, target, matrices)


@dataclass
class NilpotencyRecord:
    """Products of kernel classes found inside the window.

    `observed` is the largest number of kernel classes with a nonzero
    in-window product; `bound` is ``d/2``.
    """

    observed: int
    bound: Fraction
    max_length: int
    unobserved: int
    witnesses: dict[int, str] = field(default_factory=dict)

    @property
    def respected(self) -> bool:
        return self.observed <= self.bound

    def as_dict(self) -> dict:  # type: ignore[type-arg]
        return {
            "observed": self.observed,
            "bound": self.bound,
            "max_length": self.max_length,
            "respected": self.respected,
            "unobserved": self.unobserved,
            "witnesses": {str(k): v for k, v in self.witnesses.items()},
        }


@dataclass
class CentralityRecord:
    """Graded commutators of image classes with every class of ``H(ΩM)``."""

    checks: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def violations(self) -> list[tuple[str, str]]:
        return [(x, y) for x, y, outcome in self.checks if outcome == "nonzero"]

    @property
    def unobserved(self) -> int:
        return sum(1 for *_, outcome in self.checks if outcome == "unobserved")

    @property
    def central(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:  # type: ignore[type-arg]
        return {
            "checked": sum(1 for *_, outcome in self.checks if outcome == "zero"),
            "unobserved": self.unobserved,
            "violations": [list(pair) for pair in self.violations],
            "central": self.central,
        }


@dataclass(eq=False)
class IntersectionReport:
    """``I`` on homology bases, degree by degree.

    Parameters
    ----------
    loop, omega
        Source and target rings.
    matrices
        Degree ``n`` matrix with a row per ``H_n(ΩM)`` class and a column per
        loop homology class.
    images
        ``I`` of each loop homology class.
    kernel, image
        Bases per degree, as combinations of labels.
    multiplicative_violations
        Pairs ``(x, y)`` with ``I(x•y) != I(x)I(y)``.
    unobserved_products
        Pairs whose image product leaves the window.
    """

    loop: HomologyRing
    omega: HomologyRing
    matrices: dict[int, SparseMatrix]
    images: dict[str, LabelChain]
    kernel: dict[int, list[LabelChain]]
    image: dict[int, list[LabelChain]]
    multiplicative_violations: list[tuple[str, str]] = field(default_factory=list)
    unobserved_products: int = 0
    nilpotency: NilpotencyRecord | None = None
    centrality: CentralityRecord | None = None
    _echelons: dict[int, tuple[ColumnEchelon, list[str]]] = field(
        default_factory=dict, repr=False
    )

    @property
    def degrees(self) -> range:
        return self.loop.degrees

    def rank(self, degree: int) -> int:
        return len(self.image.get(degree, []))

    @property
    def surjective_degrees(self) -> list[int]:
        return [n for n in self.degrees if self.rank(n) == self.omega.betti(n)]

    def vanishes_above(self, degree: int = 0) -> bool:
        """Whether ``I`` is zero in every window degree above `degree`."""
        return all(self.rank(n) == 0 for n in self.degrees if n > degree)

    def as_dict(self) -> dict:  # type: ignore[type-arg]
        degrees = {}
        for n in self.degrees:
            degrees[str(n)] = {
                "rank": self.rank(n),
                "kernel": [label_chain(v) for v in self.kernel.get(n, [])],
                "image": [label_chain(v) for v in self.image.get(n, [])],
            }
        return {
            "window": [self.loop.window.min_degree, self.loop.window.max_degree],
            "map": {label: label_chain(image) for label, image in self.images.items()},
            "degrees": degrees,
            "multiplicative": not self.multiplicative_violations,
            "multiplicative_violations": [list(p) for p in self.multiplicative_violations],
            "unobserved_products": self.unobserved_products,
            "surjective_degrees": self.surjective_degrees,
            "vanishes_in_positive_degrees": self.vanishes_above(0),
        }


def _coordinates(ring: HomologyRing, degree: int, chain: Mapping[str, Scalar]) -> Column:
    position = {c.label: c.index for c in ring.classes.get(degree, [])}
    return {position[label]: v for label, v in chain.items() if v}


def _labels(ring: HomologyRing, degree: int, vector: Mapping[int, Scalar]) -> LabelChain:
    classes = ring.classes.get(degree, [])
    return {classes[i].label: v for i, v in sorted(vector.items()) if v}


def _check_windows(loop: HomologyRing, omega: HomologyRing) -> None:
    lw, ow = loop.window, omega.window
    if lw.meta != "A" or ow.meta != "cobar":
        raise WindowMismatch(f"expected loop and cobar windows, got {lw} and {ow}")
    if lw.field != ow.field:
        raise WindowMismatch(f"fields {lw.field} and {ow.field} differ")
    if lw.max_degree != ow.max_degree or ow.min_degree > max(lw.min_degree, 0):
        raise WindowMismatch(f"{lw} and {ow} do not cover the same degrees")


@debug_time
def induced_I(ring_LM: HomologyRing, ring_Omega: HomologyRing) -> IntersectionReport:
    """Express ``I`` on homology bases and check that it is multiplicative.

    Parameters
    ----------
    ring_LM
        Loop homology ring.
    ring_Omega
        ``H(ΩM)`` over the same top degree.

    Returns
    -------
    IntersectionReport
        Matrices, kernels, images and the multiplicativity check.

    Raises
    ------
    WindowMismatch
        If the rings do not come from matching windows.
    """
    _check_windows(ring_LM, ring_Omega)
    field_ = ring_LM.field
    images: dict[str, LabelChain] = {}
    matrices: dict[int, SparseMatrix] = {}
    kernel: dict[int, list[LabelChain]] = {}
    image: dict[int, list[LabelChain]] = {}
    echelons: dict[int, tuple[ColumnEchelon, list[str]]] = {}
    for n in ring_LM.degrees:
        columns = []
        for cls in ring_LM.classes.get(n, []):
            rep = ring_LM.representative(cls.label)
            augmented = {(UNIT, word): v for (s, word), v in rep.items() if s == UNIT}
            if ring_Omega.in_window(n):
                try:
                    images[cls.label] = ring_Omega.project(n, augmented)
                except WindowExceeded as e:
                    raise WindowMismatch(f"{cls.label} does not map into {ring_Omega.window}") from e
            elif augmented:
                raise WindowMismatch(f"{cls.label} maps outside {ring_Omega.window}")
            else:
                images[cls.label] = {}
            columns.append(_coordinates(ring_Omega, n, images[cls.label]))
        matrix = SparseMatrix.from_columns(ring_Omega.betti(n), field_, columns)
        matrices[n] = matrix
        kernel[n] = [_labels(ring_LM, n, v) for v in kernel_basis(matrix)]
        echelon = ColumnEchelon(field_)
        image[n] = []
        for column in columns:
            residual, _, _ = echelon.reduce(column)
            if residual:
                image[n].append(_labels(ring_Omega, n, echelon.insert(residual)))
        echelons[n] = (echelon, [c.label for c in ring_Omega.classes.get(n, [])])

    report = IntersectionReport(
        ring_LM, ring_Omega, matrices, images, kernel, image, _echelons=echelons
    )
    for (x, y), product in ring_LM.structure.items():
        try:
            expected = ring_Omega.multiply(images[x], images[y])
        except WindowExceeded:
            report.unobserved_products += 1
            continue
        if _image_of(report, product) != expected:
            report.multiplicative_violations.append((x, y))
    if report.multiplicative_violations:
        logger.warning(
            f"I is not multiplicative on {len(report.multiplicative_violations)} pairs,"
            f" first {report.multiplicative_violations[0]}"
        )
    logger.info(f"I has ranks { {n: report.rank(n) for n in report.degrees} }")
    return report


def _image_of(report: IntersectionReport, chain: Mapping[str, Scalar]) -> LabelChain:
    result: LabelChain = {}
    for label, a in chain.items():
        for z, b in report.images[label].items():
            value = result.get(z, 0) + a * b
            if value:
                result[z] = value
            else:
                result.pop(z, None)
    return result


def kernel_nilpotency(report: IntersectionReport, ring: HomologyRing | None = None) -> NilpotencyRecord:
    """Multiply kernel classes together until the products vanish.

    Products of up to ``⌊d/2⌋ + 1`` kernel classes are formed whenever every
    partial product stays in the window.

    Parameters
    ----------
    report
        The intersection report supplying the kernel.
    ring
        The loop homology ring; that of `report` by default.

    Returns
    -------
    NilpotencyRecord
        Also stored on `report`.
    """
    ring = ring if ring is not None else report.loop
    d = ring.shift
    bound = Fraction(d, 2)
    max_length = d // 2 + 1
    order = {label: i for i, label in enumerate(ring.labels())}
    generators = [
        (n, v) for n in report.degrees for v in report.kernel.get(n, [])
    ]
    record = NilpotencyRecord(0, bound, max_length, 0)
    power = list(generators)
    length = 1
    if power:
        record.observed = 1
        record.witnesses[1] = label_chain(power[0][1])
    while power and length < max_length:
        length += 1
        spans: dict[int, ColumnEchelon] = {}
        products: list[tuple[int, LabelChain]] = []
        for n, p in power:
            for m, k in generators:
                if not ring.in_window(n + m):
                    record.unobserved += 1
                    continue
                product = ring.multiply(p, k)
                if not product:
                    continue
                echelon = spans.setdefault(n + m, ColumnEchelon(ring.field))
                if echelon.add({order[z]: v for z, v in product.items()}):
                    products.append((n + m, product))
        power = products
        if power:
            record.observed = length
            record.witnesses[length] = label_chain(power[0][1])
    if not record.respected:
        logger.warning(f"{record.observed} kernel classes multiply to a nonzero class, bound {bound}")
    report.nilpotency = record
    return record


def image_centrality(report: IntersectionReport, ring_Omega: HomologyRing | None = None) -> CentralityRecord:
    """Graded commutators of the image basis with every ``H(ΩM)`` class.

    Parameters
    ----------
    report
        The intersection report supplying the image.
    ring_Omega
        Target ring; that of `report` by default.

    Returns
    -------
    CentralityRecord
        Every check with outcome ``zero``, ``nonzero`` or ``unobserved``;
        also stored on `report`.
    """
    ring = ring_Omega if ring_Omega is not None else report.omega
    record = CentralityRecord()
    for n in report.degrees:
        for x in report.image.get(n, []):
            for m in ring.degrees:
                for cls in ring.classes.get(m, []):
                    y = {cls.label: ring.field.one}
                    try:
                        forward = ring.multiply(x, y)
                        backward = ring.multiply(y, x)
                    except WindowExceeded:
                        record.checks.append((label_chain(x), cls.label, "unobserved"))
                        continue
                    s = sign(n * m)
                    commutator = dict(forward)
                    for z, v in backward.items():
                        value = commutator.get(z, 0) - s * v
                        if value:
                            commutator[z] = value
                        else:
                            commutator.pop(z, None)
                    outcome = "nonzero" if commutator else "zero"
                    record.checks.append((label_chain(x), cls.label, outcome))
    if record.violations:
        logger.warning(f"image of I is not central: {record.violations[:3]}")
    report.centrality = record
    return record


@dataclass
class LiftWitness:
    """A cycle ``1⊗α + Σ e_i⊗α_i`` of the loop model.

    `alphas` maps the label of ``e_i`` to ``α_i``.
    """

    alpha: Chain
    degree: int
    alphas: dict[str, Chain]
    cycle: KeyChain
    found = True


@dataclass
class NoWitness:
    """No cycle of the loop model augments to `alpha`."""

    alpha: Chain
    degree: int
    found = False


class LiftSolver:
    """Lifts of cobar cycles of one degree through ``ε⊗1``.

    The unknowns are the coefficients of the keys ``e_i⊗x`` of the loop model
    slice; the matrix is ``D`` restricted to them and is reduced once.
    """

    def __init__(self, c: CobarAlgebra, degree: int):
        self.c = c
        self.degree = degree
        n = self_bimodule(c.base)
        self.engine = DifferentialEngine(c, n)
        self.unknowns = [key for key in slice_keys(c, n, degree) if key[0] != UNIT]
        self.rows = {key: i for i, key in enumerate(slice_keys(c, n, degree - 1))}
        matrix = SparseMatrix.from_columns(
            len(self.rows),
            c.field,
            ({self.rows[k]: v for k, v in self.engine(key).items()} for key in self.unknowns),
        )
        self.solver = LinearSolver(matrix)
        logger.debug(
            f"lift system in degree {degree}: {len(self.rows)} equations,"
            f" {len(self.unknowns)} unknowns",
            extra=dict(action="lift", degree=degree, n=len(self.unknowns)),
        )

    def _boundary(self, chain: Mapping) -> KeyChain:  # type: ignore[type-arg]
        result: KeyChain = {}
        for key, v in chain.items():
            for k, w in self.engine(key).items():
                value = result.get(k, 0) + v * w
                if value:
                    result[k] = value
                else:
                    result.pop(k, None)
        return result

    def solve(self, alpha: Mapping[tuple[int, ...], Scalar]) -> LiftWitness | NoWitness:
        """Find ``α_i`` with ``D(1⊗α + Σ e_i⊗α_i) = 0``.

        Raises
        ------
        NotACycle
            If `alpha` has nonzero differential.
        """
        alpha = {word: v for word, v in alpha.items() if v}
        if alpha and chain_degree(self.c, alpha) != self.degree:
            raise ValueError(f"{self.c.chain_label(alpha)} is not in degree {self.degree}")
        if cobar_differential(self.c, alpha):
            raise NotACycle(f"{self.c.chain_label(alpha)} is not a cycle")
        upstairs = {(UNIT, word): v for word, v in alpha.items()}
        rhs = {self.rows[k]: -v for k, v in self._boundary(upstairs).items()}
        solution = self.solver.solve(SparseVector(len(self.rows), rhs))
        if solution is None:
            return NoWitness(alpha, self.degree)
        cycle = dict(upstairs)
        alphas: dict[str, Chain] = {}
        labels = self.c.base.full_labels
        for j, v in solution:
            s, word = self.unknowns[j]
            cycle[s, word] = v
            alphas.setdefault(labels[s], {})[word] = v
        if self._boundary(cycle):
            raise ChainMapError(f"lift of {self.c.chain_label(alpha)} is not a cycle")
        return LiftWitness(alpha, self.degree, alphas, cycle)


def lift_witness(
    c: CobarAlgebra, alpha: Mapping[tuple[int, ...], Scalar]
) -> LiftWitness | NoWitness:
    """Search for ``α_i`` making ``1⊗α + Σ e_i⊗α_i`` a cycle of the loop model.

    Such ``α_i`` exist exactly when ``[α]`` is in the image of ``I``. Each
    ``α_i`` lives in the single degree ``|α| + |w_i| + 1``, so the search is
    an exact finite linear system.

    Parameters
    ----------
    c
        The cobar algebra.
    alpha
        A cycle of ``T(W)``.

    Returns
    -------
    LiftWitness | NoWitness
        Verified witnesses, or the certificate that none exist.

    Raises
    ------
    NotACycle
        If `alpha` is not a cycle.
    """
    degree = chain_degree(c, alpha) if any(alpha.values()) else 0
    return LiftSolver(c, degree).solve(alpha)


def image_contains(report: IntersectionReport, alpha: Mapping[tuple[int, ...], Scalar]) -> bool:
    """Whether the class of the cobar cycle `alpha` lies in the image of ``I``."""
    alpha = {word: v for word, v in alpha.items() if v}
    if not alpha:
        return True
    omega = report.omega
    n = _word_degree(omega, alpha)
    classes = omega.project(n, {(UNIT, word): v for word, v in alpha.items()})
    echelon, labels = report._echelons[n]
    position = {label: i for i, label in enumerate(labels)}
    residual, _, _ = echelon.reduce({position[z]: v for z, v in classes.items()})
    return not residual


def _word_degree(ring: HomologyRing, alpha: Mapping[tuple[int, ...], Scalar]) -> int:
    window = ring.window
    for degree in window.reported_degrees:
        index = window.index(degree)
        if all((UNIT, word) in index for word in alpha):
            return degree
    raise WindowExceeded(f"chain is not homogeneous inside {window}")


@dataclass
class SurjectivityProfile:
    """``rank I_n == dim H_n(ΩM)`` per window degree."""

    degrees: dict[int, bool]

    @property
    def surjective(self) -> bool:
        return all(self.degrees.values())

    @property
    def failing(self) -> list[int]:
        return [n for n, ok in self.degrees.items() if not ok]

    def as_dict(self) -> dict:  # type: ignore[type-arg]
        return {
            "degrees": {str(n): ok for n, ok in self.degrees.items()},
            "surjective_throughout_window": self.surjective,
        }


def surjectivity_profile(report: IntersectionReport) -> SurjectivityProfile:
    surjective = set(report.surjective_degrees)
    return SurjectivityProfile({n: n in surjective for n in report.degrees})


@info_time
def intersection_report(
    a: FDGA,
    max_degree: int,
    min_degree: int | None = None,
    c: CobarAlgebra | None = None,
) -> IntersectionReport:
    """Loop homology, ``H(ΩM)``, ``I`` and its diagnostics in one window.

    The chain map is checked, then the nilpotency and centrality records are
    filled in.
    """
    c = c if c is not None else build_cobar(a)
    ring_LM = loop_homology(a, max_degree, min_degree, c)
    intersection_chain_map(a, ring_LM.window, c)
    ring_Omega = omega_homology(c, max_degree)
    report = induced_I(ring_LM, ring_Omega)
    kernel_nilpotency(report)
    image_centrality(report)
    return report
