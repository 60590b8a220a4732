"""Homology of a three-term slice ``C_{n+1} → C_n → C_{n-1}``."""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from loopalg.linalg.scalars import FieldSpec, Scalar
from loopalg.linalg.sparse import (
    Column,
    ColumnEchelon,
    LinalgError,
    NotAComplex,
    ShapeError,
    SparseMatrix,
    SparseVector,
    kernel_basis,
)

logger = logging.getLogger(__name__)


class NotACycle(LinalgError, ValueError):
    """A chain handed to a projector has nonzero boundary or is not reducible."""


@dataclass(eq=False)
class HomologySlice:
    """Homology in one degree with chosen representative cycles.

    Parameters
    ----------
    degree
        The degree of the middle term.
    dimension
        Dimension of the middle term.
    betti
        Dimension of homology.
    representatives
        One cycle per homology basis class.
    echelon
        Reduced boundaries and representatives; drives :meth:`project`.
    """

    degree: int
    dimension: int
    betti: int
    representatives: list[SparseVector]
    echelon: ColumnEchelon = field(repr=False)
    field: FieldSpec = field(repr=False)

    def project(self, cycle: SparseVector | Column) -> list[Scalar]:
        """Coordinates of the class of `cycle` in the homology basis.

        Parameters
        ----------
        cycle
            A cycle of the middle term.

        Returns
        -------
        list[Scalar]
            One coefficient per representative.

        Raises
        ------
        NotACycle
            If `cycle` is not a combination of boundaries and representatives.
        """
        terms = cycle.terms if isinstance(cycle, SparseVector) else cycle
        residual, _, used = self.echelon.reduce(terms)
        if residual:
            raise NotACycle(f"chain in degree {self.degree} is not a cycle")
        zero = self.field.zero
        return [used.get(i, zero) for i in range(self.betti)]

    def is_boundary(self, cycle: SparseVector | Column) -> bool:
        return not any(self.project(cycle))


class NotBlockDiagonal(LinalgError, ValueError):
    """A differential has an entry between different blocks."""


def homology_of_slice(
    d_in: SparseMatrix,
    d_out: SparseMatrix,
    degree: int,
    blocks: tuple[Sequence[int], Sequence[int], Sequence[int]] | None = None,
) -> HomologySlice:
    """Compute homology at the middle of ``d_in`` then ``d_out``.

    Boundaries are reduced first, then the kernel of `d_out` is reduced
    against them; every cycle that survives becomes a representative.

    Parameters
    ----------
    d_in
        The differential into the slice.
    d_out
        The differential out of the slice.
    degree
        The degree of the slice, for labelling.
    blocks
        Optional block labels for the columns of `d_in`, the middle term and
        the rows of `d_out`. Both differentials must respect the labels; the
        kernel is then computed one block at a time.

    Returns
    -------
    HomologySlice
        The Betti number, representatives and projector.

    Raises
    ------
    NotAComplex
        If ``d_out @ d_in`` is not zero or the shapes do not chain.
    NotBlockDiagonal
        If `blocks` is given and a differential mixes two blocks.
    """
    if d_in.rows != d_out.cols:
        raise NotAComplex(
            f"degree {degree}: incoming {d_in.shape} and outgoing {d_out.shape} do not chain"
        )
    for j, column in enumerate(d_in.columns):
        if d_out.apply(column):
            raise NotAComplex(f"degree {degree}: d∘d is nonzero on column {j}")
    field_ = d_out.field
    echelon = ColumnEchelon(field_)
    if blocks is None:
        parts = [(list(d_in.columns), kernel_basis(d_out))]
    else:
        parts = list(_block_parts(d_in, d_out, degree, *blocks))
    rank_in = 0
    kernel = 0
    representatives = []
    for boundaries, cycles in parts:
        rank_in += sum(echelon.add(column) for column in boundaries)
        kernel += len(cycles)
        for cycle in cycles:
            residual, _, _ = echelon.reduce(cycle)
            if residual:
                stored = echelon.insert(residual, tag=len(representatives))
                representatives.append(SparseVector(d_out.cols, dict(stored)))
    betti = len(representatives)
    assert betti == kernel - rank_in
    logger.debug(
        f"H_{degree}: dim {d_out.cols}, ker {kernel}, im {rank_in}, betti {betti}, "
        f"blocks {len(parts)}",
        extra=dict(action="homology", degree=degree),
    )
    return HomologySlice(degree, d_out.cols, betti, representatives, echelon, field_)


def _block_parts(
    d_in: SparseMatrix,
    d_out: SparseMatrix,
    degree: int,
    in_blocks: Sequence[int],
    middle_blocks: Sequence[int],
    out_blocks: Sequence[int],
) -> Iterator[tuple[list[Column], list[Column]]]:
    """Boundaries and kernel vectors of each block, in global indices."""
    if (len(in_blocks), len(middle_blocks), len(out_blocks)) != (
        d_in.cols,
        d_out.cols,
        d_out.rows,
    ):
        raise ShapeError(f"degree {degree}: block labels do not match the differentials")
    middle: dict[int, list[int]] = defaultdict(list)
    for i, block in enumerate(middle_blocks):
        middle[block].append(i)
    incoming: dict[int, list[Column]] = defaultdict(list)
    for j, column in enumerate(d_in.columns):
        if any(middle_blocks[i] != in_blocks[j] for i in column):
            raise NotBlockDiagonal(f"degree {degree}: incoming column {j} leaves its block")
        incoming[in_blocks[j]].append(column)
    for block, members in sorted(middle.items()):
        rows: dict[int, int] = {}
        local_columns = []
        for i in members:
            local = {}
            for r, value in d_out.columns[i].items():
                if out_blocks[r] != block:
                    raise NotBlockDiagonal(
                        f"degree {degree}: outgoing column {i} leaves its block"
                    )
                local[rows.setdefault(r, len(rows))] = value
            local_columns.append(local)
        local_d = SparseMatrix.from_columns(len(rows), d_out.field, local_columns)
        cycles = [
            {members[i]: value for i, value in cycle.items()}
            for cycle in kernel_basis(local_d)
        ]
        yield incoming.pop(block, []), cycles
    if any(incoming.values()):
        raise NotBlockDiagonal(f"degree {degree}: boundaries in an empty block")
