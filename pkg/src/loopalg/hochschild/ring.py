"""Homology rings of windowed complexes.

Products are computed on representatives and reduced by the projector of
the target degree; a product whose degree leaves the window is unobserved,
which is different from zero.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Mapping

from loopalg.hochschild.window import (
    ComplexWindow,
    Key,
    KeyChain,
    NotSupported,
    WindowExceeded,
)
from loopalg.linalg.scalars import FieldSpec, Scalar, sign
from loopalg.utils.logging import debug_time

logger = logging.getLogger(__name__)

LabelChain = dict[str, Scalar]


@dataclass(frozen=True)
class HomologyClass:
    """A homology basis class: its label, degree and position in that degree."""

    label: str
    degree: int
    index: int


@dataclass(eq=False)
class HomologyRing:
    """Homology of a window with representatives and product structure.

    Parameters
    ----------
    window
        The complex.
    classes
        Basis classes per reported degree.
    structure
        ``(x, y) -> x•y`` on labels, for every pair whose product lies in
        the window (zero products included as empty dictionaries).
    unit
        Label of the unit class when there is one.
    shift
        Degree shift to quote in tables (the formal dimension for loop
        homology, else 0).
    """

    window: ComplexWindow
    classes: dict[int, list[HomologyClass]]
    structure: dict[tuple[str, str], LabelChain] = field(default_factory=dict)
    unit: str | None = None
    shift: int = 0

    def __post_init__(self) -> None:
        self.by_label = {c.label: c for cs in self.classes.values() for c in cs}

    @property
    def field(self) -> FieldSpec:
        return self.window.field

    @property
    def degrees(self) -> range:
        return self.window.reported_degrees

    def betti(self, degree: int) -> int:
        return len(self.classes.get(degree, []))

    def betti_table(self) -> dict[int, int]:
        return {degree: self.betti(degree) for degree in self.degrees}

    def labels(self) -> list[str]:
        return [c.label for degree in self.degrees for c in self.classes.get(degree, [])]

    def degree(self, label: str) -> int:
        return self.by_label[label].degree

    def in_window(self, degree: int) -> bool:
        return self.window.reports(degree)

    def representative(self, label: str) -> KeyChain:
        c = self.by_label[label]
        rep = self.window.homology(c.degree).representatives[c.index]
        return self.window.to_chain(c.degree, rep.terms)

    def project(self, degree: int, chain: Mapping[Key, Scalar]) -> LabelChain:
        """Class of the cycle `chain` as a combination of labels."""
        coordinates = self.window.homology(degree).project(
            self.window.to_vector(degree, chain)
        )
        return {
            c.label: v for c, v in zip(self.classes.get(degree, []), coordinates) if v
        }

    def product(self, x: str, y: str) -> LabelChain:
        """``x • y`` in homology.

        Raises
        ------
        WindowExceeded
            If the product degree is outside the window.
        """
        if (x, y) not in self.structure:
            target = self.degree(x) + self.degree(y)
            raise WindowExceeded(f"{x}•{y} lands in degree {target}, outside the window")
        return self.structure[x, y]

    def multiply(self, u: Mapping[str, Scalar], v: Mapping[str, Scalar]) -> LabelChain:
        """Bilinear extension of :meth:`product` to label combinations."""
        result: LabelChain = {}
        for x, a in u.items():
            for y, b in v.items():
                for z, c in self.product(x, y).items():
                    value = result.get(z, 0) + a * b * c
                    if value:
                        result[z] = value
                    else:
                        result.pop(z, None)
        return result

    def observed(self, x: str, y: str) -> bool:
        return (x, y) in self.structure

    def constants(self) -> list[tuple[str, str, str, Scalar]]:
        """Nonzero structure constants ``(x, y, z, c)`` with ``x•y ∋ c z``."""
        order = {label: i for i, label in enumerate(self.labels())}
        return sorted(
            (
                (x, y, z, c)
                for (x, y), result in self.structure.items()
                for z, c in result.items()
            ),
            key=lambda t: (order[t[0]], order[t[1]], order[t[2]]),
        )

    def relations(self) -> list[tuple[str, str]]:
        """Observed products that vanish, excluding those with the unit."""
        order = {label: i for i, label in enumerate(self.labels())}
        return sorted(
            (
                (x, y)
                for (x, y), result in self.structure.items()
                if not result and self.unit not in (x, y)
            ),
            key=lambda t: (order[t[0]], order[t[1]]),
        )


def multiply_key_chains(
    window: ComplexWindow, x: Mapping[Key, Scalar], y: Mapping[Key, Scalar]
) -> KeyChain:
    if window.multiply is None:
        raise NotSupported(f"{window} carries no product")
    result: KeyChain = {}
    for p, a in x.items():
        for q, b in y.items():
            for key, c in window.multiply(p, q).items():
                value = result.get(key, 0) + a * b * c
                if value:
                    result[key] = value
                else:
                    result.pop(key, None)
    return result


def chain_degree(window: ComplexWindow, chain: Mapping[Key, Scalar]) -> int:
    for degree in window.keys:
        if chain and all(key in window.index(degree) for key in chain):
            return degree
    raise WindowExceeded(f"{window.chain_label(chain)} is not a homogeneous chain in {window}")


def cup_product(
    window: ComplexWindow, x: Mapping[Key, Scalar], y: Mapping[Key, Scalar]
) -> list[Scalar]:
    """Product of two cycles, in homology coordinates of the target degree.

    Parameters
    ----------
    window
        A window carrying a product.
    x, y
        Nonzero homogeneous cycles.

    Returns
    -------
    list[Scalar]
        Coordinates of ``[x y]`` in the window's homology basis.

    Raises
    ------
    WindowExceeded
        If either factor or the product lies outside the window.
    NotACycle
        If a factor is not a cycle.
    """
    dx, dy = chain_degree(window, x), chain_degree(window, y)
    for degree, chain in ((dx, x), (dy, y)):
        window.homology(degree).project(window.to_vector(degree, chain))
    target = dx + dy
    product = multiply_key_chains(window, x, y)
    return window.homology(target).project(window.to_vector(target, product))


@debug_time
def homology_ring(
    window: ComplexWindow,
    labeller: Callable[[KeyChain], str | None] | None = None,
    shift: int = 0,
) -> HomologyRing:
    """Homology classes and, when the window has one, the product.

    Parameters
    ----------
    window
        The complex.
    labeller
        Returns a friendly name for a representative, or `None`.
    shift
        Degree shift quoted in tables.

    Returns
    -------
    HomologyRing
        The ring; the product is recorded for every in-window pair.
    """
    classes: dict[int, list[HomologyClass]] = {}
    used: set[str] = set()
    for degree in window.reported_degrees:
        slice_ = window.homology(degree)
        classes[degree] = []
        for i, rep in enumerate(slice_.representatives):
            label = labeller(window.to_chain(degree, rep.terms)) if labeller else None
            if label is None or label in used:
                label = f"h{degree}_{i}"
            used.add(label)
            classes[degree].append(HomologyClass(label, degree, i))
    ring = HomologyRing(window, classes, shift=shift)

    if window.multiply is not None and window.reports(0):
        unit = ring.project(0, {(0, ()): window.field.one})
        if len(unit) == 1 and next(iter(unit.values())) == window.field.one:
            ring.unit = next(iter(unit))
        _fill_products(ring)
    logger.info(
        f"homology of {window}: total dimension {sum(ring.betti_table().values())},"
        f" {len(ring.structure)} products"
    )
    return ring


def _fill_products(ring: HomologyRing) -> None:
    window = ring.window
    representatives = {label: ring.representative(label) for label in ring.labels()}
    for x in ring.labels():
        for y in ring.labels():
            target = ring.degree(x) + ring.degree(y)
            if not ring.in_window(target):
                continue
            chain = multiply_key_chains(window, representatives[x], representatives[y])
            ring.structure[x, y] = ring.project(target, chain)


def graded_commutator(ring: HomologyRing, x: str, y: str) -> LabelChain:
    """``x•y - (-1)^{|x||y|} y•x`` in homology."""
    s = sign(ring.degree(x) * ring.degree(y))
    result = dict(ring.product(x, y))
    for z, c in ring.product(y, x).items():
        value = result.get(z, 0) - s * c
        if value:
            result[z] = value
        else:
            result.pop(z, None)
    return result


def graded_convolution(first: Mapping[int, int], second: Mapping[int, int]) -> dict[int, int]:
    """Betti table of a graded tensor product: ``c_n = Σ_{i+j=n} a_i b_j``."""
    result: dict[int, int] = defaultdict(int)
    for i, a in first.items():
        for j, b in second.items():
            result[i + j] += a * b
    return dict(sorted(result.items()))
