"""Finite-dimensional augmented differential graded algebras.

An :class:`FDGA` stores the augmentation ideal Ā. Degrees are lower
(homological): a cochain of cohomological degree ``n`` sits in degree ``-n``.
The unit is never listed; "full" indices put it at position 0 and shift the
basis of Ā up by one.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from loopalg import LoopAlgError
from loopalg.linalg.graded import GradedBasis
from loopalg.linalg.homology import HomologySlice, homology_of_slice
from loopalg.linalg.scalars import FieldSpec, Scalar, sign
from loopalg.linalg.sparse import Column, SparseMatrix, axpy, dense_rank

logger = logging.getLogger(__name__)

UNIT = 0
UNIT_LABEL = "1"


class DGAError(LoopAlgError):
    """Problem with an algebra."""


@dataclass(frozen=True, eq=False)
class FDGA:
    """A finite-dimensional augmented DGA given by structure constants.

    Parameters
    ----------
    name
        Display name.
    field
        Coefficient field.
    basis
        Basis of Ā with lower degrees.
    product
        ``(i, j) -> {k: α}`` meaning ``e_i e_j = Σ α e_k`` (indices into Ā).
    differential
        ``i -> {j: ρ}`` meaning ``d e_i = Σ ρ e_j``.
    formal_dimension
        The top degree ``d``.
    """

    name: str
    field: FieldSpec
    basis: GradedBasis
    product: dict[tuple[int, int], Column]
    differential: dict[int, Column]
    formal_dimension: int

    @classmethod
    def from_tables(
        cls,
        name: str,
        field: FieldSpec,
        generators: Iterable[tuple[str, int]],
        products: Mapping[tuple[str, str], Mapping[str, Scalar | int]],
        differential: Mapping[str, Mapping[str, Scalar | int]],
        formal_dimension: int,
    ) -> "FDGA":
        """Build from label-keyed tables, sorting the basis canonically.

        Parameters
        ----------
        name
            Display name.
        field
            Coefficient field.
        generators
            ``(label, cohomological degree)`` pairs.
        products
            ``(left, right) -> {result: coefficient}``.
        differential
            ``source -> {result: coefficient}``.
        formal_dimension
            The top degree.

        Returns
        -------
        FDGA
            Basis sorted by cohomological degree then label.

        Raises
        ------
        KeyError
            If a table names an undeclared label.
        """
        entries = sorted(generators, key=lambda entry: (entry[1], entry[0]))
        basis = GradedBasis(tuple((label, -degree) for label, degree in entries))

        def column(terms: Mapping[str, Scalar | int]) -> Column:
            result: Column = {}
            for label, coefficient in terms.items():
                value = field(coefficient)
                if value:
                    result[basis.index(label)] = result.get(basis.index(label), 0) + value
            return {k: v for k, v in result.items() if v}

        product = {}
        for (left, right), terms in products.items():
            col = column(terms)
            if col:
                product[basis.index(left), basis.index(right)] = col
        diff = {}
        for source, terms in differential.items():
            col = column(terms)
            if col:
                diff[basis.index(source)] = col
        return cls(name, field, basis, product, diff, formal_dimension)

    def __str__(self) -> str:
        return f"{self.name} over {self.field}"

    @property
    def labels(self) -> list[str]:
        return self.basis.labels

    def cohomological_degree(self, i: int) -> int:
        return -self.basis.degree(i)

    # full-index arithmetic, unit at 0

    @property
    def dimension(self) -> int:
        return len(self.basis) + 1

    @cached_property
    def full_labels(self) -> list[str]:
        return [UNIT_LABEL] + self.basis.labels

    @cached_property
    def full_degrees(self) -> list[int]:
        return [0] + self.basis.degrees

    def full_in_degree(self, degree: int) -> list[int]:
        return [k for k, d in enumerate(self.full_degrees) if d == degree]

    @cached_property
    def is_formal(self) -> bool:
        return not self.differential

    def mul(self, x: int, y: int) -> Column:
        """Product of two full basis elements."""
        if x == UNIT:
            return {y: self.field.one}
        if y == UNIT:
            return {x: self.field.one}
        col = self.product.get((x - 1, y - 1))
        if not col:
            return {}
        return {k + 1: v for k, v in col.items()}

    def d(self, x: int) -> Column:
        if x == UNIT:
            return {}
        col = self.differential.get(x - 1)
        if not col:
            return {}
        return {k + 1: v for k, v in col.items()}

    def multiply(self, u: Mapping[int, Scalar], v: Mapping[int, Scalar]) -> Column:
        result: Column = {}
        for x, a in u.items():
            for y, b in v.items():
                axpy(result, a * b, self.mul(x, y))
        return result

    def apply_d(self, u: Mapping[int, Scalar]) -> Column:
        result: Column = {}
        for x, a in u.items():
            axpy(result, a, self.d(x))
        return result

    def is_commutative(self) -> bool:
        """Whether ``e_i e_j = (-1)^{|e_i||e_j|} e_j e_i`` for every pair."""
        for x, y in itertools.combinations_with_replacement(range(1, self.dimension), 2):
            lhs = self.mul(x, y)
            rhs: Column = {}
            axpy(rhs, self.field(sign(self.full_degrees[x] * self.full_degrees[y])), self.mul(y, x))
            if lhs != rhs:
                return False
        return True

    def degree_matrix(self, degree: int) -> SparseMatrix:
        """The differential from full degree `degree` to `degree - 1`."""
        source = self.full_in_degree(degree)
        target = {k: i for i, k in enumerate(self.full_in_degree(degree - 1))}
        return SparseMatrix.from_columns(
            len(target),
            self.field,
            ({target[k]: v for k, v in self.d(x).items()} for x in source),
        )


@dataclass
class Cohomology:
    """Cohomology of an FDGA, one slice per lower degree."""

    algebra: FDGA
    slices: dict[int, HomologySlice]
    indices: dict[int, list[int]]

    def representative(self, degree: int, i: int) -> Column:
        """Representative ``i`` in `degree`, on full indices."""
        local = self.slices[degree].representatives[i]
        return {self.indices[degree][j]: v for j, v in local.terms.items()}

    def project(self, degree: int, chain: Mapping[int, Scalar]) -> list[Scalar]:
        position = {k: j for j, k in enumerate(self.indices[degree])}
        return self.slices[degree].project({position[k]: v for k, v in chain.items()})

    def betti(self, degree: int) -> int:
        return self.slices[degree].betti if degree in self.slices else 0


def cohomology(a: FDGA) -> Cohomology:
    """Compute H(A) degree by degree."""
    low = min(a.full_degrees)
    slices = {}
    indices = {}
    for degree in range(low, 1):
        indices[degree] = a.full_in_degree(degree)
        slices[degree] = homology_of_slice(
            a.degree_matrix(degree + 1), a.degree_matrix(degree), degree
        )
    return Cohomology(a, slices, indices)


def poincare_pairing_nondegenerate(a: FDGA, h: Cohomology | None = None) -> bool:
    """Whether the product pairing ``H^k ⊗ H^{d-k} → H^d ≅ k`` is perfect."""
    h = h if h is not None else cohomology(a)
    top = -a.formal_dimension
    if h.betti(top) != 1:
        return False
    for degree in range(top, 1):
        other = top - degree
        n, m = h.betti(degree), h.betti(other)
        if n != m:
            return False
        if n == 0:
            continue
        rows = []
        for i in range(n):
            x = h.representative(degree, i)
            row = []
            for j in range(m):
                y = h.representative(other, j)
                row.append(h.project(top, a.multiply(x, y))[0])
            rows.append(row)
        pairing = SparseMatrix.from_entries(
            n, m, a.field, ((r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row) if v)
        )
        if dense_rank(pairing) != n:
            return False
    return True


@dataclass(frozen=True)
class Violation:
    """One failed axiom, naming the offending basis elements."""

    kind: str
    elements: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.kind}: ({', '.join(self.elements)})"
        return f"{text} {self.detail}" if self.detail else text


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_fdga`. Empty `violations` means valid."""

    algebra: str
    violations: list[Violation] = field(default_factory=list)
    commutative: bool = False
    poincare: bool = False
    characteristic_caveat: bool = False

    @property
    def valid(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "valid": self.valid,
            "commutative": self.commutative,
            "poincare": self.poincare,
            "characteristic_caveat": self.characteristic_caveat,
            "violations": [
                {"kind": v.kind, "elements": list(v.elements), "detail": v.detail}
                for v in self.violations
            ],
        }


def characteristic_caveat(a: FDGA) -> bool:
    """Commutative models need characteristic 0 or ``p > d``."""
    p = a.field.characteristic
    return p != 0 and p <= a.formal_dimension


def _format(a: FDGA, chain: Column) -> str:
    return " + ".join(f"{v}*{a.full_labels[k]}" for k, v in sorted(chain.items())) or "0"


def validate_fdga(a: FDGA) -> ValidationReport:
    """Check every FDGA axiom and report each failure.

    Parameters
    ----------
    a
        The algebra to check.

    Returns
    -------
    ValidationReport
        Violations plus the commutativity, Poincaré duality and
        characteristic flags.
    """
    report = ValidationReport(a.name)
    violations = report.violations
    label = a.full_labels
    degree = a.full_degrees
    d = a.formal_dimension
    elements = range(1, a.dimension)

    if a.basis and d < 2:
        violations.append(Violation("dimension", (), f"formal dimension {d} < 2"))
    for x in elements:
        n = -degree[x]
        if n < 2 or n > d:
            violations.append(
                Violation("connectivity", (label[x],), f"cohomological degree {n} outside [2, {d}]")
            )

    for x, y in itertools.product(elements, repeat=2):
        for k in a.mul(x, y):
            if degree[k] != degree[x] + degree[y]:
                violations.append(
                    Violation("product degree", (label[x], label[y], label[k]))
                )
    for x in elements:
        for k in a.d(x):
            if degree[k] != degree[x] - 1:
                violations.append(Violation("differential degree", (label[x], label[k])))

    for x, y, z in itertools.product(elements, repeat=3):
        left = a.multiply(a.mul(x, y), {z: a.field.one})
        right = a.multiply({x: a.field.one}, a.mul(y, z))
        if left != right:
            violations.append(
                Violation(
                    "associativity",
                    (label[x], label[y], label[z]),
                    f"(xy)z = {_format(a, left)} but x(yz) = {_format(a, right)}",
                )
            )

    for x in elements:
        twice = a.apply_d(a.d(x))
        if twice:
            violations.append(Violation("d^2", (label[x],), f"d(d x) = {_format(a, twice)}"))

    for x, y in itertools.product(elements, repeat=2):
        lhs = a.apply_d(a.mul(x, y))
        rhs = a.multiply(a.d(x), {y: a.field.one})
        axpy(rhs, a.field(sign(degree[x])), a.multiply({x: a.field.one}, a.d(y)))
        if lhs != rhs:
            violations.append(
                Violation(
                    "leibniz",
                    (label[x], label[y]),
                    f"d(xy) = {_format(a, lhs)} but dx.y ± x.dy = {_format(a, rhs)}",
                )
            )

    report.commutative = a.is_commutative()
    if not violations:
        report.poincare = poincare_pairing_nondegenerate(a)
    report.characteristic_caveat = characteristic_caveat(a)
    logger.info(
        f"validated {a}: {len(violations)} violations, commutative {report.commutative},"
        f" poincare {report.poincare}"
    )
    return report
