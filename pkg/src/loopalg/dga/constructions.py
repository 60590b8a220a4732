"""New algebras from old: tensor products, connected sums and cohomology."""

import logging
from dataclasses import replace
from typing import Mapping

from loopalg.dga.base import (
    UNIT,
    FDGA,
    DGAError,
    cohomology,
    validate_fdga,
)
from loopalg.linalg.graded import GradedBasis
from loopalg.linalg.scalars import FieldMismatch, FieldSpec, sign
from loopalg.linalg.sparse import Column, axpy

logger = logging.getLogger(__name__)


class ConstructionError(DGAError):
    """An input does not meet a construction's preconditions."""


class DimensionMismatch(ConstructionError):
    pass


class NotFormal(ConstructionError):
    pass


class NotCommutative(ConstructionError):
    pass


class NotPoincare(ConstructionError):
    pass


def point(field: FieldSpec) -> FDGA:
    """The ground field itself: Ā = 0."""
    return FDGA("pt", field, GradedBasis(), {}, {}, 0)


def rename(a: FDGA, mapping: Mapping[str, str] | None = None, suffix: str = "") -> FDGA:
    """Relabel basis elements through `mapping`, then append `suffix`."""
    mapping = mapping or {}
    basis = GradedBasis(
        tuple((mapping.get(label, label) + suffix, degree) for label, degree in a.basis)
    )
    return replace(a, basis=basis)


def _disjoint_labels(a: FDGA, b: FDGA) -> FDGA:
    taken = set(a.labels)
    while taken & set(b.labels):
        b = rename(b, suffix="'")
    return b


def _rebuild(
    name: str,
    field: FieldSpec,
    entries: list[tuple[str, int]],
    mul: "Mapping[tuple[int, int], Column]",
    diff: "Mapping[int, Column]",
    formal_dimension: int,
) -> FDGA:
    """Sort `entries` (full-index tables, unit excluded) into canonical order."""
    order = sorted(range(len(entries)), key=lambda i: (-entries[i][1], entries[i][0]))
    position = {old: new for new, old in enumerate(order)}
    basis = GradedBasis(tuple(entries[i] for i in order))

    def moved(col: Column) -> Column:
        return {position[k]: v for k, v in col.items()}

    product = {(position[i], position[j]): moved(col) for (i, j), col in mul.items() if col}
    differential = {position[i]: moved(col) for i, col in diff.items() if col}
    return FDGA(name, field, basis, product, differential, formal_dimension)


def tensor_product(a: FDGA, b: FDGA) -> FDGA:
    """The graded tensor product ``A ⊗ B``.

    ``(x⊗y)(x'⊗y') = (-1)^{|y||x'|} xx' ⊗ yy'`` and
    ``d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy``. Basis labels are juxtaposed, with
    primes appended to `b`'s labels if the two bases share a label.

    Parameters
    ----------
    a, b
        The factors.

    Returns
    -------
    FDGA
        The product algebra of formal dimension ``d_a + d_b``.

    Raises
    ------
    FieldMismatch
        If the factors have different coefficient fields.
    """
    if a.field != b.field:
        raise FieldMismatch(f"cannot tensor {a} with {b}")
    b = _disjoint_labels(a, b)
    field = a.field
    pairs = [(x, y) for x in range(a.dimension) for y in range(b.dimension) if (x, y) != (UNIT, UNIT)]
    index = {pair: i for i, pair in enumerate(pairs)}

    def label(x: int, y: int) -> str:
        if x == UNIT:
            return b.full_labels[y]
        if y == UNIT:
            return a.full_labels[x]
        return a.full_labels[x] + b.full_labels[y]

    def degree(x: int, y: int) -> int:
        return a.full_degrees[x] + b.full_degrees[y]

    def embed(col_a: Column, col_b: Column, coefficient: int = 1) -> Column:
        result: Column = {}
        for x, u in col_a.items():
            for y, v in col_b.items():
                result[index[x, y]] = field(coefficient) * u * v
        return result

    entries = [(label(x, y), degree(x, y)) for x, y in pairs]
    mul: dict[tuple[int, int], Column] = {}
    for x, y in pairs:
        for x2, y2 in pairs:
            col = embed(
                a.mul(x, x2), b.mul(y, y2), sign(b.full_degrees[y] * a.full_degrees[x2])
            )
            if col:
                mul[index[x, y], index[x2, y2]] = col
    diff: dict[int, Column] = {}
    for x, y in pairs:
        col = embed(a.d(x), {y: field.one})
        axpy(col, field(sign(a.full_degrees[x])), embed({x: field.one}, b.d(y)))
        if col:
            diff[index[x, y]] = col
    result = _rebuild(
        f"{a.name}⊗{b.name}",
        field,
        entries,
        mul,
        diff,
        a.formal_dimension + b.formal_dimension,
    )
    logger.debug(f"tensor product {result.name} has dimension {result.dimension}")
    return result


def _check_summand(a: FDGA) -> None:
    if not a.is_formal:
        raise NotFormal(f"{a} has a nonzero differential")
    report = validate_fdga(a)
    if not report.valid:
        raise ConstructionError(f"{a} is not a valid algebra: {report.violations[0]}")
    if not report.commutative:
        raise NotCommutative(f"{a} is not graded commutative")
    if not report.poincare:
        raise NotPoincare(f"{a} does not satisfy Poincaré duality")


def connected_sum(a: FDGA, b: FDGA, top: str = "omega") -> FDGA:
    """Cohomology algebra of the connected sum of two closed manifolds.

    Positive classes below the top degree are kept, the two fundamental
    classes are identified as `top`, and products between the summands vanish.

    Parameters
    ----------
    a, b
        Formal, commutative Poincaré duality algebras of equal dimension ≥ 3.
    top
        Label of the shared fundamental class.

    Returns
    -------
    FDGA
        The connected sum.

    Raises
    ------
    DimensionMismatch
        If the formal dimensions differ or are below 3.
    NotFormal, NotCommutative, NotPoincare
        If a summand fails the corresponding precondition.
    FieldMismatch
        If the summands have different fields.
    """
    if a.field != b.field:
        raise FieldMismatch(f"cannot form connected sum of {a} and {b}")
    d = a.formal_dimension
    if b.formal_dimension != d:
        raise DimensionMismatch(f"dimensions {d} and {b.formal_dimension} differ")
    if d < 3:
        raise DimensionMismatch(f"connected sum needs dimension at least 3, not {d}")
    _check_summand(a)
    _check_summand(b)
    b = _disjoint_labels(a, b)
    while top in a.labels or top in b.labels:
        top += "'"

    entries: list[tuple[str, int]] = [(top, -d)]
    mul: dict[tuple[int, int], Column] = {}
    for summand in (a, b):
        position: dict[int, int] = {}
        for x in range(1, summand.dimension):
            if summand.full_degrees[x] == -d:
                position[x] = 0
            else:
                position[x] = len(entries)
                entries.append((summand.full_labels[x], summand.full_degrees[x]))
        for x in range(1, summand.dimension):
            for y in range(1, summand.dimension):
                col: Column = {}
                for k, v in summand.mul(x, y).items():
                    axpy(col, v, {position[k]: summand.field.one})
                if col and position[x] and position[y]:
                    mul[position[x], position[y]] = col
    result = _rebuild(f"{a.name}#{b.name}", a.field, entries, mul, {}, d)
    logger.debug(f"connected sum {result.name} has dimension {result.dimension}")
    return result


def cohomology_algebra(a: FDGA) -> FDGA:
    """The algebra ``H(A)`` with zero differential.

    Classes whose representative is a single basis element with coefficient
    one keep that element's label; others are named ``h{degree}_{index}``.
    """
    h = cohomology(a)
    field = a.field
    entries: list[tuple[str, int]] = []
    where: dict[tuple[int, int], int] = {}
    for degree in sorted(h.slices, reverse=True):
        if degree == 0:
            continue
        for i in range(h.betti(degree)):
            rep = h.representative(degree, i)
            if len(rep) == 1 and next(iter(rep.values())) == field.one:
                label = a.full_labels[next(iter(rep))]
            else:
                label = f"h{-degree}_{i}"
            where[degree, i] = len(entries)
            entries.append((label, degree))
    mul: dict[tuple[int, int], Column] = {}
    for (deg_x, i), x in where.items():
        for (deg_y, j), y in where.items():
            target = deg_x + deg_y
            if h.betti(target) == 0:
                continue
            product = a.multiply(h.representative(deg_x, i), h.representative(deg_y, j))
            coordinates = h.project(target, product)
            col = {where[target, k]: v for k, v in enumerate(coordinates) if v}
            if col:
                mul[x, y] = col
    name = a.name if a.is_formal else f"H({a.name})"
    return _rebuild(name, field, entries, mul, {}, a.formal_dimension)
