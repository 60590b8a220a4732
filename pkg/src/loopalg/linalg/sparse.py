"""Sparse exact vectors and matrices, echelon forms and linear solving.

Vectors are stored as ``{index: coefficient}`` dictionaries without zeros and
matrices column by column, since every matrix in the engine is assembled from
the images of basis elements.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from loopalg import LoopAlgError
from loopalg.linalg.scalars import FieldSpec, Scalar

logger = logging.getLogger(__name__)

Column = dict[int, Scalar]


class LinalgError(LoopAlgError):
    """Linear algebra failure."""


class ShapeError(LinalgError, ValueError):
    """Incompatible dimensions."""


class NotAComplex(LinalgError):
    """Two consecutive differentials do not compose to zero."""


def axpy(target: Column, coefficient: Scalar, source: Mapping[int, Scalar]) -> None:
    """``target += coefficient * source`` in place, dropping zeros."""
    if not coefficient:
        return
    for i, value in source.items():
        new = target.get(i, 0) + coefficient * value
        if new:
            target[i] = new
        else:
            target.pop(i, None)


def scaled(coefficient: Scalar, source: Mapping[int, Scalar]) -> Column:
    if not coefficient:
        return {}
    return {i: coefficient * value for i, value in source.items()}


@dataclass(frozen=True, eq=False)
class SparseVector:
    """A vector in a space of dimension `size`, stored by its nonzero terms."""

    size: int
    terms: Column = field(default_factory=dict)

    def __post_init__(self) -> None:
        for i, value in list(self.terms.items()):
            if not 0 <= i < self.size:
                raise ShapeError(f"index {i} outside a space of dimension {self.size}")
            if not value:
                del self.terms[i]

    def __getitem__(self, i: int) -> Scalar | int:
        return self.terms.get(i, 0)

    def __iter__(self) -> Iterator[tuple[int, Scalar]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self.size == other.size and self.terms == other.terms

    def __add__(self, other: "SparseVector") -> "SparseVector":
        self._check(other)
        terms = dict(self.terms)
        axpy(terms, 1, other.terms)
        return SparseVector(self.size, terms)

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        self._check(other)
        terms = dict(self.terms)
        axpy(terms, -1, other.terms)
        return SparseVector(self.size, terms)

    def __neg__(self) -> "SparseVector":
        return SparseVector(self.size, scaled(-1, self.terms))

    def scale(self, coefficient: Scalar) -> "SparseVector":
        return SparseVector(self.size, scaled(coefficient, self.terms))

    def _check(self, other: "SparseVector") -> None:
        if self.size != other.size:
            raise ShapeError(f"dimensions {self.size} and {other.size}")

    @property
    def support(self) -> list[int]:
        return sorted(self.terms)


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """An exact `rows` × `cols` matrix stored column by column.

    Parameters
    ----------
    rows, cols
        The shape.
    field
        The coefficient field.
    columns
        One ``{row: coefficient}`` dictionary per column, without zeros.
    """

    rows: int
    cols: int
    field: FieldSpec
    columns: tuple[Column, ...]

    def __post_init__(self) -> None:
        if len(self.columns) != self.cols:
            raise ShapeError(f"{len(self.columns)} columns given for {self.cols}")
        for column in self.columns:
            for i, value in list(column.items()):
                if not 0 <= i < self.rows:
                    raise ShapeError(f"row {i} outside {self.rows} rows")
                if not value:
                    del column[i]

    @classmethod
    def from_columns(
        cls, rows: int, field: FieldSpec, columns: Iterable[Mapping[int, Scalar]]
    ) -> "SparseMatrix":
        columns = tuple(dict(column) for column in columns)
        return cls(rows, len(columns), field, columns)

    @classmethod
    def from_entries(
        cls,
        rows: int,
        cols: int,
        field: FieldSpec,
        entries: Iterable[tuple[int, int, Scalar]],
    ) -> "SparseMatrix":
        columns: list[Column] = [{} for _ in range(cols)]
        for row, col, value in entries:
            if not 0 <= col < cols:
                raise ShapeError(f"column {col} outside {cols} columns")
            if row in columns[col]:
                raise ShapeError(f"duplicate entry ({row}, {col})")
            columns[col][row] = field(value)
        return cls(rows, cols, field, tuple(columns))

    @classmethod
    def from_dense(cls, field: FieldSpec, data: list[list[int]]) -> "SparseMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls.from_entries(
            rows,
            cols,
            field,
            ((r, c, v) for r, row in enumerate(data) for c, v in enumerate(row) if v),
        )

    @classmethod
    def zero(cls, rows: int, cols: int, field: FieldSpec) -> "SparseMatrix":
        return cls(rows, cols, field, tuple({} for _ in range(cols)))

    @classmethod
    def identity(cls, n: int, field: FieldSpec) -> "SparseMatrix":
        return cls(n, n, field, tuple({i: field.one} for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> list[tuple[int, int, Scalar]]:
        return sorted(
            (row, col, value)
            for col, column in enumerate(self.columns)
            for row, value in column.items()
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.columns == other.columns

    def is_zero(self) -> bool:
        return not any(self.columns)

    def apply(self, vector: Mapping[int, Scalar]) -> Column:
        """Multiply by a vector given as ``{column: coefficient}``."""
        result: Column = {}
        for j, coefficient in vector.items():
            axpy(result, coefficient, self.columns[j])
        return result

    def __matmul__(
        self, other: "SparseMatrix | SparseVector"
    ) -> "SparseMatrix | SparseVector":
        if isinstance(other, SparseVector):
            if other.size != self.cols:
                raise ShapeError(f"{self.shape} matrix times {other.size}-vector")
            return SparseVector(self.rows, self.apply(other.terms))
        if other.rows != self.cols:
            raise ShapeError(f"{self.shape} matrix times {other.shape} matrix")
        return SparseMatrix(
            self.rows,
            other.cols,
            self.field,
            tuple(self.apply(column) for column in other.columns),
        )

    def transpose(self) -> "SparseMatrix":
        columns: list[Column] = [{} for _ in range(self.rows)]
        for col, column in enumerate(self.columns):
            for row, value in column.items():
                columns[row][col] = value
        return SparseMatrix(self.cols, self.rows, self.field, tuple(columns))

    def permuted(self, row_order: list[int], col_order: list[int]) -> "SparseMatrix":
        """Reorder: new row ``i`` is old row ``row_order[i]``, likewise columns."""
        new_row = {old: new for new, old in enumerate(row_order)}
        return SparseMatrix(
            self.rows,
            self.cols,
            self.field,
            tuple(
                {new_row[r]: v for r, v in self.columns[old].items()}
                for old in col_order
            ),
        )

    def row_dicts(self) -> list[Column]:
        rows: list[Column] = [{} for _ in range(self.rows)]
        for col, column in enumerate(self.columns):
            for row, value in column.items():
                rows[row][col] = value
        return rows

    def to_dense(self) -> np.ndarray:
        dense = np.empty((self.rows, self.cols), dtype=object)
        dense.fill(self.field.zero)
        for row, col, value in self.entries:
            dense[row, col] = value
        return dense

    def rank(self) -> int:
        echelon = ColumnEchelon(self.field)
        return sum(echelon.add(column) for column in self.columns)


class ColumnEchelon:
    """Incremental column reduction keyed by the lowest nonzero row.

    Every stored vector is normalised so that its pivot entry is one. Stored
    vectors may carry a tag and a transform (the combination of inserted
    columns that produced them).

    Parameters
    ----------
    field
        The coefficient field.
    track
        Whether to record transforms.
    """

    def __init__(self, field: FieldSpec, track: bool = False):
        self.field = field
        self.track = track
        self.pivots: dict[int, tuple[Column, Column | None, int | None]] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(
        self, vector: Mapping[int, Scalar], transform: Mapping[int, Scalar] | None = None
    ) -> tuple[Column, Column | None, dict[int, Scalar]]:
        """Reduce `vector` against the stored pivots.

        Returns
        -------
        tuple
            The residual, the updated transform and the coefficients used for
            each tagged pivot (``vector = residual + Σ c·stored``).
        """
        residual = dict(vector)
        tracked = dict(transform) if transform is not None else None
        used: dict[int, Scalar] = {}
        while residual:
            low = max(residual)
            pivot = self.pivots.get(low)
            if pivot is None:
                break
            stored, stored_transform, tag = pivot
            coefficient = residual[low]
            axpy(residual, -coefficient, stored)
            if tracked is not None and stored_transform is not None:
                axpy(tracked, -coefficient, stored_transform)
            if tag is not None:
                used[tag] = used.get(tag, 0) + coefficient
        return residual, tracked, used

    def insert(
        self,
        residual: Column,
        transform: Column | None = None,
        tag: int | None = None,
    ) -> Column:
        """Store an already reduced, nonzero vector; return its normalised form."""
        low = max(residual)
        assert low not in self.pivots
        inverse = self.field.inv(residual[low])
        stored = scaled(inverse, residual)
        stored_transform = (
            scaled(inverse, transform) if transform is not None and self.track else None
        )
        self.pivots[low] = (stored, stored_transform, tag)
        return stored

    def add(
        self,
        vector: Mapping[int, Scalar],
        transform: Mapping[int, Scalar] | None = None,
        tag: int | None = None,
    ) -> bool:
        residual, tracked, _ = self.reduce(vector, transform)
        if not residual:
            return False
        self.insert(residual, tracked, tag)
        return True


def kernel_basis(m: SparseMatrix) -> list[Column]:
    """A basis of the null space of `m`, one vector per dependent column."""
    echelon = ColumnEchelon(m.field, track=True)
    kernel = []
    for j, column in enumerate(m.columns):
        residual, transform, _ = echelon.reduce(column, {j: m.field.one})
        assert transform is not None
        if residual:
            echelon.insert(residual, transform)
        else:
            kernel.append(transform)
    return kernel


def row_reduce(m: SparseMatrix) -> tuple[int, SparseMatrix, SparseMatrix]:
    """Reduced row-echelon form with the row operations that produce it.

    Pivots are chosen by scanning columns left to right and taking the first
    remaining row with a nonzero entry.

    Parameters
    ----------
    m
        The matrix to reduce.

    Returns
    -------
    tuple[int, SparseMatrix, SparseMatrix]
        ``(rank, reduced, basis_change)`` with ``basis_change @ m == reduced``.
    """
    field = m.field
    rows = m.row_dicts()
    change: list[Column] = [{i: field.one} for i in range(m.rows)]
    rank = 0
    for col in range(m.cols):
        pivot = next((r for r in range(rank, m.rows) if col in rows[r]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        change[rank], change[pivot] = change[pivot], change[rank]
        inverse = field.inv(rows[rank][col])
        rows[rank] = scaled(inverse, rows[rank])
        change[rank] = scaled(inverse, change[rank])
        for r in range(m.rows):
            if r != rank and col in rows[r]:
                factor = rows[r][col]
                axpy(rows[r], -factor, rows[rank])
                axpy(change[r], -factor, change[rank])
        rank += 1
    reduced = SparseMatrix.from_entries(
        m.rows, m.cols, field, ((r, c, v) for r, row in enumerate(rows) for c, v in row.items())
    )
    basis_change = SparseMatrix.from_entries(
        m.rows,
        m.rows,
        field,
        ((r, c, v) for r, row in enumerate(change) for c, v in row.items()),
    )
    return rank, reduced, basis_change


class LinearSolver:
    """Column echelon of a fixed matrix, reusable for many right-hand sides."""

    def __init__(self, m: SparseMatrix):
        self.matrix = m
        self.echelon = ColumnEchelon(m.field, track=True)
        for j, column in enumerate(m.columns):
            self.echelon.add(column, {j: m.field.one})
        logger.debug(f"solver for {m.shape} matrix has rank {len(self.echelon)}")

    def solve(self, b: SparseVector) -> SparseVector | None:
        if b.size != self.matrix.rows:
            raise ShapeError(f"{self.matrix.shape} system with {b.size}-vector")
        residual = dict(b.terms)
        solution: Column = {}
        while residual:
            low = max(residual)
            pivot = self.echelon.pivots.get(low)
            if pivot is None:
                return None
            stored, transform, _ = pivot
            coefficient = residual[low]
            axpy(residual, -coefficient, stored)
            assert transform is not None
            axpy(solution, coefficient, transform)
        return SparseVector(self.matrix.cols, solution)


def solve_linear(m: SparseMatrix, b: SparseVector) -> SparseVector | None:
    """Solve ``m @ x == b``.

    The solution returned has every free (non-pivot) column set to zero.

    Parameters
    ----------
    m
        The system matrix.
    b
        The right-hand side.

    Returns
    -------
    SparseVector | None
        A solution, or `None` when the system has none.

    Raises
    ------
    ShapeError
        If `b` does not have `m.rows` entries.
    """
    if b.size != m.rows:
        raise ShapeError(f"{m.shape} system with {b.size}-vector")
    return LinearSolver(m).solve(b)


def dense_rank(m: SparseMatrix) -> int:
    """Rank by plain dense Gaussian elimination on a numpy object array.

    Independent of the sparse code paths; used to cross-check them.
    """
    a = m.to_dense()
    n_rows, n_cols = a.shape
    rank = 0
    for col in range(n_cols):
        nonzero = [r for r in range(rank, n_rows) if a[r, col] != 0]
        if not nonzero:
            continue
        a[[rank, nonzero[0]]] = a[[nonzero[0], rank]]
        a[rank] = a[rank] * m.field.inv(a[rank, col])
        for r in range(n_rows):
            if r != rank and a[r, col] != 0:
                a[r] = a[r] - a[rank] * a[r, col]
        rank += 1
        if rank == n_rows:
            break
    return rank
