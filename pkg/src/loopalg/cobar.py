"""The cobar construction ``(T(W), d)`` of a finite DGA.

``W`` has one generator ``w_j`` for each basis element ``e_j`` of Ā, in lower
degree ``|e_j|_coh - 1``. Chains of ``T(W)`` are dictionaries from words
(tuples of generator indices) to coefficients. Words print as ``<u|u>`` in
the labels of Ā; the empty word is ``<>``.

The constants of ``d`` are fixed by requiring the canonical element
``θ = Σ_j -(-1)^{n_j} e_j ⊗ w_j`` of ``A ⊗ T(W)`` to satisfy
``δθ + θ² = 0``, where ``n_j`` is the cohomological degree of ``e_j``:

* ``β_i^j = (-1)^{n_j + 1} ρ_j^i``
* ``a_i^{jk} = (-1)^{n_j (n_k + 1)} α_{jk}^i``
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from loopalg import LoopAlgError
from loopalg.dga.base import FDGA
from loopalg.hochschild.ring import HomologyRing, homology_ring
from loopalg.hochschild.window import ComplexWindow, WindowExceeded
from loopalg.linalg.graded import GradedBasis
from loopalg.linalg.scalars import FieldSpec, Scalar, sign
from loopalg.linalg.sparse import SparseMatrix
from loopalg.utils.logging import debug_time

logger = logging.getLogger(__name__)

Word = tuple[int, ...]
Chain = dict[Word, Scalar]


class CobarError(LoopAlgError):
    """The cobar construction cannot be formed."""


class SignConventionError(CobarError):
    """The cobar differential does not square to zero."""


class TensorWord(NamedTuple):
    letters: Word
    degree: int


def add_to(target: Chain, coefficient: Scalar, source: Mapping[Word, Scalar]) -> None:
    """``target += coefficient * source`` on word chains."""
    if not coefficient:
        return
    for word, value in source.items():
        new = target.get(word, 0) + coefficient * value
        if new:
            target[word] = new
        else:
            target.pop(word, None)


@dataclass(eq=False)
class CobarAlgebra:
    """The tensor algebra ``T(W)`` with the cobar differential.

    Parameters
    ----------
    base
        The algebra ``A``.
    generators
        Basis of ``W``; generator ``j`` is dual to ``s e_j``.
    linear
        ``i -> {j: β_i^j}``.
    quadratic
        ``i -> {(j, k): a_i^{jk}}``.
    """

    base: FDGA
    generators: GradedBasis
    linear: dict[int, dict[int, Scalar]]
    quadratic: dict[int, dict[tuple[int, int], Scalar]]
    _words: dict[int, list[Word]] = dataclasses.field(default_factory=dict, repr=False)
    _d_cache: dict[Word, Chain] = dataclasses.field(default_factory=dict, repr=False)

    @property
    def field(self) -> FieldSpec:
        return self.base.field

    def degree(self, word: Iterable[int]) -> int:
        return sum(self.generators.degree(j) for j in word)

    def generator_differential(self, i: int) -> Chain:
        """``d(w_i)`` as a chain."""
        chain: Chain = {(j,): v for j, v in self.linear.get(i, {}).items()}
        for (j, k), v in self.quadratic.get(i, {}).items():
            chain[j, k] = v
        return chain

    def word_label(self, word: Iterable[int]) -> str:
        return "<" + "|".join(self.generators.label(j) for j in word) + ">"

    def chain_label(self, chain: Mapping[Word, Scalar]) -> str:
        if not chain:
            return "0"
        return " + ".join(
            f"{v}*{self.word_label(word)}"
            for word, v in sorted(chain.items(), key=lambda t: (len(t[0]), t[0]))
        )


def build_cobar(a: FDGA, check_degree: int | None = None) -> CobarAlgebra:
    """Compute the cobar constants of `a` and check ``d² = 0``.

    Parameters
    ----------
    a
        A valid FDGA.
    check_degree
        Generators up to this degree are checked; all generators by default.

    Returns
    -------
    CobarAlgebra
        The cobar algebra.

    Raises
    ------
    SignConventionError
        If ``d(d(w_i)) != 0`` for some generator.
    """
    field_ = a.field
    n = [a.cohomological_degree(j) for j in range(len(a.basis))]
    if any(degree < 2 for degree in n):
        raise CobarError(f"{a} has generators below cohomological degree 2")
    generators = GradedBasis(tuple((label, n[j] - 1) for j, label in enumerate(a.labels)))
    linear: dict[int, dict[int, Scalar]] = {}
    for j, col in a.differential.items():
        for i, rho in col.items():
            linear.setdefault(i, {})[j] = field_(sign(n[j] + 1)) * rho
    quadratic: dict[int, dict[tuple[int, int], Scalar]] = {}
    for (j, k), col in a.product.items():
        for i, alpha in col.items():
            quadratic.setdefault(i, {})[j, k] = field_(sign(n[j] * (n[k] + 1))) * alpha
    c = CobarAlgebra(a, generators, linear, quadratic)
    for i in range(len(generators)):
        if check_degree is not None and generators.degree(i) > check_degree:
            continue
        twice = cobar_differential(c, c.generator_differential(i))
        if twice:
            raise SignConventionError(
                f"d(d({c.word_label((i,))})) = {c.chain_label(twice)} in {a}"
            )
    logger.debug(
        f"cobar of {a}: {len(generators)} generators,"
        f" {sum(map(len, quadratic.values()))} quadratic terms"
    )
    return c


def enumerate_words(c: CobarAlgebra, degree: int) -> list[TensorWord]:
    """All words of total `degree`, shortest first then lexicographic.

    Parameters
    ----------
    c
        The cobar algebra.
    degree
        A degree ≥ 0.

    Returns
    -------
    list[TensorWord]
        The words; degree 0 gives only the empty word.
    """
    return [TensorWord(word, degree) for word in _words(c, degree)]


def _words(c: CobarAlgebra, degree: int) -> list[Word]:
    if degree < 0:
        return []
    if degree in c._words:
        return c._words[degree]
    if degree == 0:
        words: list[Word] = [()]
    else:
        words = []
        for j in range(len(c.generators)):
            rest = degree - c.generators.degree(j)
            words.extend((j,) + tail for tail in _words(c, rest))
        words.sort(key=lambda word: (len(word), word))
    c._words[degree] = words
    return words


def word_differential(c: CobarAlgebra, word: Word) -> Chain:
    """``d`` of a single word, extended from generators as a derivation."""
    if word in c._d_cache:
        return c._d_cache[word]
    result: Chain = {}
    prefix_degree = 0
    for position, letter in enumerate(word):
        dw = c.generator_differential(letter)
        if dw:
            before, after = word[:position], word[position + 1 :]
            s = c.field(sign(prefix_degree))
            for middle, v in dw.items():
                add_to(result, s * v, {before + middle + after: c.field.one})
        prefix_degree += c.generators.degree(letter)
    c._d_cache[word] = result
    return result


def cobar_differential(c: CobarAlgebra, x: Mapping[Word, Scalar]) -> Chain:
    """Apply the cobar differential to a chain.

    Parameters
    ----------
    c
        The cobar algebra.
    x
        A chain on words.

    Returns
    -------
    Chain
        ``d x``; a homogeneous chain of degree ``n`` maps to degree ``n - 1``.
    """
    result: Chain = {}
    for word, v in x.items():
        add_to(result, v, word_differential(c, word))
    return result


def multiply_chains(x: Mapping[Word, Scalar], y: Mapping[Word, Scalar]) -> Chain:
    """Concatenation product of two chains."""
    result: Chain = {}
    for u, a in x.items():
        for w, b in y.items():
            add_to(result, a * b, {u + w: 1})
    return result


def chain_degree(c: CobarAlgebra, x: Mapping[Word, Scalar]) -> int:
    """Degree of a nonzero homogeneous chain."""
    degrees = {c.degree(word) for word in x}
    if len(degrees) != 1:
        raise ValueError(f"chain {c.chain_label(x)} is not homogeneous")
    return degrees.pop()


def commutator(c: CobarAlgebra, x: Mapping[Word, Scalar], y: Mapping[Word, Scalar]) -> Chain:
    """The graded commutator ``[x, y] = xy - (-1)^{|x||y|} yx``."""
    if not x or not y:
        return {}
    result = multiply_chains(x, y)
    s = sign(chain_degree(c, x) * chain_degree(c, y))
    add_to(result, c.field(-s), multiply_chains(y, x))
    return result


def cobar_window(c: CobarAlgebra, max_degree: int, min_degree: int = 0) -> ComplexWindow:
    """The complex ``(T(W), d)`` between `min_degree` and `max_degree`.

    Keys are ``(0, word)`` pairs so that the window has the same shape as a
    Hochschild window with trivial coefficients.
    """
    if max_degree < min_degree + 1:
        raise WindowExceeded(f"empty window [{min_degree}, {max_degree}]")
    keys = {
        degree: [(0, word) for word in _words(c, degree)]
        for degree in range(min_degree - 1, max_degree + 1)
    }
    window = ComplexWindow(
        field=c.field,
        min_degree=min_degree,
        max_degree=max_degree,
        keys=keys,
        meta="cobar",
        key_label=lambda key: c.word_label(key[1]),
        multiply=lambda p, q: {(0, p[1] + q[1]): c.field.one},
        length_graded=not c.linear,
    )
    for degree in range(min_degree, max_degree + 1):
        window.set_differential(
            degree,
            _slice_matrix(c, window, degree),
        )
    window.check_complex()
    return window


def _slice_matrix(c: CobarAlgebra, window: ComplexWindow, degree: int) -> SparseMatrix:
    target = window.index(degree - 1)
    return SparseMatrix.from_columns(
        len(target),
        c.field,
        (
            {target[0, word]: v for word, v in word_differential(c, key[1]).items()}
            for key in window.keys[degree]
        ),
    )


def _sphere_label(c: CobarAlgebra, rep: dict[tuple[int, Word], Scalar]) -> str | None:
    if len(c.generators) != 1 or len(rep) != 1:
        return None
    ((_, word),) = rep.keys()
    k = len(word)
    return "1" if k == 0 else ("v" if k == 1 else f"v^{k}")


@debug_time
def omega_homology(c: CobarAlgebra, max_degree: int) -> HomologyRing:
    """Homology of ``(T(W), d)`` in degrees ``0 .. max_degree - 1``.

    Parameters
    ----------
    c
        The cobar algebra.
    max_degree
        At least 1.

    Returns
    -------
    HomologyRing
        Betti numbers, representatives and the concatenation product.
    """
    window = cobar_window(c, max_degree)
    ring = homology_ring(window, labeller=lambda rep: _sphere_label(c, rep))
    logger.info(
        f"H(ΩM) for {c.base}: betti {ring.betti_table()}",
        extra=dict(action="omega_homology", n=max_degree),
    )
    return ring

