"""Finite degree windows of chain complexes ``N ⊗ T(W)``.

A slice key is ``(s, word)``: basis element ``s`` of the coefficient module
and a word in the cobar generators. A window built for
``[min_degree, max_degree]`` holds slices ``min_degree - 1 .. max_degree`` and
reports homology in ``min_degree .. max_degree - 1``.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping

from loopalg import LoopAlgError
from loopalg.linalg.graded import GradedBasis
from loopalg.linalg.homology import HomologySlice, homology_of_slice
from loopalg.linalg.scalars import FieldSpec, Scalar
from loopalg.linalg.sparse import Column, NotAComplex, ShapeError, SparseMatrix

logger = logging.getLogger(__name__)

Key = tuple[int, tuple[int, ...]]
KeyChain = dict[Key, Scalar]


class HochschildError(LoopAlgError):
    """Problem building or using a Hochschild window."""


class WindowExceeded(HochschildError, IndexError):
    """A degree outside the computed window was requested."""


class NotSupported(HochschildError):
    """The input is outside what the operation handles."""


@dataclass(eq=False)
class ComplexWindow:
    """Slices and differentials of a complex in a range of degrees.

    Parameters
    ----------
    field
        Coefficient field.
    min_degree, max_degree
        The window; see the module docstring.
    keys
        Ordered slice keys per degree.
    meta
        Coefficient descriptor: ``"A"``, ``"k"``, ``"A^"``, ``"cobar"`` or a
        bimodule name.
    key_label
        Renders a key.
    multiply
        Product of two keys, when the complex is an algebra.
    length_graded
        Whether the differential raises word length by exactly one. Homology
        is then computed one word length at a time.
    """

    field: FieldSpec
    min_degree: int
    max_degree: int
    keys: dict[int, list[Key]]
    meta: str
    key_label: Callable[[Key], str]
    multiply: Callable[[Key, Key], Mapping[Key, Scalar]] | None = None
    length_graded: bool = False
    differentials: dict[int, SparseMatrix] = field(default_factory=dict)
    _index: dict[int, dict[Key, int]] = field(default_factory=dict, repr=False)
    _homology: dict[int, HomologySlice] = field(default_factory=dict, repr=False)

    @property
    def reported_degrees(self) -> range:
        return range(self.min_degree, self.max_degree)

    def reports(self, degree: int) -> bool:
        return self.min_degree <= degree < self.max_degree

    def index(self, degree: int) -> dict[Key, int]:
        if degree not in self._index:
            self._index[degree] = {key: i for i, key in enumerate(self.keys.get(degree, []))}
        return self._index[degree]

    def dimension(self, degree: int) -> int:
        return len(self.keys.get(degree, []))

    @property
    def slices(self) -> dict[int, GradedBasis]:
        return {
            degree: GradedBasis(tuple((self.key_label(key), degree) for key in keys))
            for degree, keys in self.keys.items()
        }

    def set_differential(self, degree: int, matrix: SparseMatrix) -> None:
        if matrix.shape != (self.dimension(degree - 1), self.dimension(degree)):
            raise ShapeError(
                f"differential from degree {degree} has shape {matrix.shape},"
                f" slices have {self.dimension(degree - 1)} and {self.dimension(degree)}"
            )
        self.differentials[degree] = matrix

    def differential(self, degree: int) -> SparseMatrix:
        if degree not in self.differentials:
            raise WindowExceeded(f"no differential from degree {degree} in {self}")
        return self.differentials[degree]

    def check_complex(self) -> None:
        """Raise :class:`NotAComplex` unless every ``D∘D`` in the window vanishes."""
        for degree in range(self.min_degree, self.max_degree):
            outer, inner = self.differential(degree), self.differential(degree + 1)
            for j, column in enumerate(inner.columns):
                if outer.apply(column):
                    key = self.keys[degree + 1][j]
                    raise NotAComplex(
                        f"D∘D is nonzero on {self.key_label(key)} in degree {degree + 1}"
                    )

    def homology(self, degree: int) -> HomologySlice:
        if not self.reports(degree):
            raise WindowExceeded(
                f"degree {degree} outside the reported range"
                f" [{self.min_degree}, {self.max_degree - 1}]"
            )
        if degree not in self._homology:
            self._homology[degree] = homology_of_slice(
                self.differential(degree + 1),
                self.differential(degree),
                degree,
                self.length_blocks(degree) if self.length_graded else None,
            )
        return self._homology[degree]

    def length_blocks(self, degree: int) -> tuple[list[int], list[int], list[int]]:
        """Block labels for the slices around `degree`, by the word length they reach in it."""
        return (
            [len(word) + 1 for _, word in self.keys[degree + 1]],
            [len(word) for _, word in self.keys[degree]],
            [len(word) - 1 for _, word in self.keys[degree - 1]],
        )

    def betti_table(self) -> dict[int, int]:
        return {degree: self.homology(degree).betti for degree in self.reported_degrees}

    def to_vector(self, degree: int, chain: Mapping[Key, Scalar]) -> Column:
        index = self.index(degree)
        try:
            return {index[key]: v for key, v in chain.items() if v}
        except KeyError as e:
            raise WindowExceeded(f"chain is not in the degree {degree} slice") from e

    def to_chain(self, degree: int, vector: Mapping[int, Scalar]) -> KeyChain:
        keys = self.keys[degree]
        return {keys[i]: v for i, v in vector.items()}

    def chain_label(self, chain: Mapping[Key, Scalar]) -> str:
        if not chain:
            return "0"
        return " + ".join(f"{v}*{self.key_label(key)}" for key, v in sorted(chain.items()))

    def __str__(self) -> str:
        return f"window [{self.min_degree}, {self.max_degree}] with coefficients {self.meta}"
