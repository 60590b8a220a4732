"""Hochschild cochains with coefficients in a bimodule, as ``N ⊗ T(W)``.

For a basis element ``n ⊗ x`` the differential is

    D(n⊗x) = dn⊗x + (-1)^{|n|} n⊗dx + θ·(n⊗x) - (-1)^{|n|+|x|} (n⊗x)·θ

with ``θ = Σ_j σ_j e_j ⊗ w_j`` and ``σ_j = -(-1)^{n_j}``. For ``N = A`` this
is the loop homology model, a dga under
``(a⊗x)(a'⊗y) = (-1)^{|x||a'|} aa' ⊗ xy``.
"""

import logging
from typing import Mapping

from loopalg.cobar import (
    CobarAlgebra,
    SignConventionError,
    Word,
    _words,
    build_cobar,
    word_differential,
)
from loopalg.dga.base import UNIT, FDGA, validate_fdga
from loopalg.dga.bimodule import (
    Bimodule,
    BimoduleError,
    coefficient_bimodule,
    self_bimodule,
    validate_bimodule,
)
from loopalg.dga.constructions import cohomology_algebra
from loopalg.hochschild.ring import HomologyRing, homology_ring
from loopalg.hochschild.window import (
    ComplexWindow,
    Key,
    KeyChain,
    NotSupported,
    WindowExceeded,
)
from loopalg.linalg.scalars import Scalar, sign
from loopalg.linalg.sparse import SparseMatrix
from loopalg.utils.logging import debug_time, info_time

logger = logging.getLogger(__name__)


def _add(target: KeyChain, coefficient: Scalar, key: Key) -> None:
    value = target.get(key, 0) + coefficient
    if value:
        target[key] = value
    else:
        target.pop(key, None)


class DifferentialEngine:
    """Evaluates ``D`` on slice keys of ``N ⊗ T(W)``."""

    def __init__(self, c: CobarAlgebra, n: Bimodule):
        self.c = c
        self.n = n
        a = c.base
        field = a.field
        self.field = field
        generators = range(len(c.generators))
        # n_j parity equals the parity of the lower degree of e_j
        self.parity = [a.full_degrees[j + 1] % 2 for j in generators]
        self.sigma = [field(-sign(self.parity[j])) for j in generators]
        self.w_degree = [c.generators.degree(j) for j in generators]
        self.left: dict[int, list[tuple[int, dict[int, Scalar]]]] = {}
        self.right: dict[int, list[tuple[int, dict[int, Scalar]]]] = {}
        for (x, s), col in sorted(n.left.items()):
            self.left.setdefault(s, []).append((x - 1, col))
        for (s, x), col in sorted(n.right.items()):
            self.right.setdefault(s, []).append((x - 1, col))

    def __call__(self, key: Key) -> KeyChain:
        s, x = key
        c, n, field = self.c, self.n, self.field
        deg_s = n.basis.degree(s)
        deg_x = c.degree(x)
        result: KeyChain = {}
        for t, v in n.d(s).items():
            _add(result, v, (t, x))
        s_sign = field(sign(deg_s))
        for word, v in word_differential(c, x).items():
            _add(result, s_sign * v, (s, word))
        for j, col in self.left.get(s, []):
            coefficient = self.sigma[j] * sign(self.w_degree[j] * deg_s)
            for t, v in col.items():
                _add(result, coefficient * v, (t, (j,) + x))
        for j, col in self.right.get(s, []):
            coefficient = -self.sigma[j] * sign(deg_s + deg_x + deg_x * self.parity[j])
            for t, v in col.items():
                _add(result, coefficient * v, (t, x + (j,)))
        return result


def slice_keys(c: CobarAlgebra, n: Bimodule, degree: int) -> list[Key]:
    keys = [
        (s, word)
        for s, (_, module_degree) in enumerate(n.basis)
        for word in _words(c, degree - module_degree)
    ]
    keys.sort(key=lambda key: (len(key[1]), key[1], key[0]))
    return keys


def _self_product(a: FDGA, c: CobarAlgebra):  # type: ignore[no-untyped-def]
    def multiply(p: Key, q: Key) -> dict[Key, Scalar]:
        (s, x), (t, y) = p, q
        coefficient = a.field(sign(c.degree(x) * a.full_degrees[t]))
        return {(k, x + y): coefficient * v for k, v in a.mul(s, t).items()}

    return multiply


def loop_model_differential(
    a: FDGA,
    element: Mapping[Key, Scalar],
    c: CobarAlgebra | None = None,
    commutative: bool | None = None,
) -> KeyChain:
    """The loop homology differential from its closed formulas.

    ``D(a⊗1) = da⊗1 + Σ_j (-1)^{|a|+|e_j|} [a, e_j]⊗w_j`` and
    ``D(1⊗b) = 1⊗db - Σ_j (-1)^{|e_j|} e_j⊗[w_j, b]``, extended as a
    derivation through ``a⊗b = (a⊗1)(1⊗b)``. For a graded-commutative
    algebra the commutators ``[a, e_j]`` vanish and are skipped.

    Parameters
    ----------
    a
        The algebra.
    element
        A chain of ``(full index, word)`` keys.
    c
        The cobar algebra of `a`, built if not given.
    commutative
        Use the commutative form; detected when not given.

    Returns
    -------
    KeyChain
        ``D(element)``.
    """
    c = c if c is not None else build_cobar(a)
    if commutative is None:
        commutative = a.is_commutative()
    field = a.field
    deg = a.full_degrees
    generators = range(len(c.generators))
    result: KeyChain = {}
    for (s, x), coefficient in element.items():
        deg_x = c.degree(x)
        for t, v in a.d(s).items():
            _add(result, coefficient * v, (t, x))
        if not commutative:
            for j in generators:
                e = j + 1
                outer = coefficient * sign(deg[s] + deg[e])
                for t, v in a.mul(s, e).items():
                    _add(result, outer * v, (t, (j,) + x))
                for t, v in a.mul(e, s).items():
                    _add(result, -outer * sign(deg[s] * deg[e]) * v, (t, (j,) + x))
        s_sign = coefficient * sign(deg[s])
        for word, v in word_differential(c, x).items():
            _add(result, s_sign * v, (s, word))
        for j in generators:
            e = j + 1
            outer = -s_sign * sign(deg[e])
            for t, v in a.mul(s, e).items():
                _add(result, outer * v, (t, (j,) + x))
                _add(result, -outer * sign(c.generators.degree(j) * deg_x) * v, (t, x + (j,)))
    return {key: field(v) for key, v in result.items()}


def _check_generators(
    a: FDGA, c: CobarAlgebra, window: ComplexWindow, engine: DifferentialEngine
) -> None:
    commutative = a.is_commutative()
    generators: list[Key] = [(x, ()) for x in range(1, a.dimension)]
    generators += [(UNIT, (j,)) for j in range(len(c.generators))]
    for key in generators:
        degree = a.full_degrees[key[0]] + c.degree(key[1])
        if degree not in window.differentials:
            continue
        expected = loop_model_differential(a, {key: a.field.one}, c, commutative)
        if engine(key) != expected:
            raise SignConventionError(
                f"D({window.key_label(key)}) disagrees with the closed formula in {a}"
            )
        if commutative:
            general = loop_model_differential(a, {key: a.field.one}, c, False)
            if general != expected:
                raise SignConventionError(
                    f"commutative form of D({window.key_label(key)}) is wrong in {a}"
                )


def key_labeller(c: CobarAlgebra, n: Bimodule):  # type: ignore[no-untyped-def]
    def label(key: Key) -> str:
        s, word = key
        return f"{n.basis.label(s)}⊗{c.word_label(word)}"

    return label


@info_time
def hochschild_complex(
    a: FDGA,
    n: Bimodule,
    max_degree: int,
    min_degree: int | None = None,
    c: CobarAlgebra | None = None,
    check: bool = True,
) -> ComplexWindow:
    """Build the window of ``N ⊗ T(W)`` in ``[min_degree, max_degree]``.

    Parameters
    ----------
    a
        A valid algebra.
    n
        A bimodule over `a`.
    max_degree
        Top slice built; homology is reported below it.
    min_degree
        Lowest reported degree; defaults to the lowest degree of `n`.
    c
        The cobar algebra of `a`, built if not given.
    check
        Validate `n`, and for ``N = A`` compare ``D`` on generators with
        :func:`loop_model_differential`.

    Returns
    -------
    ComplexWindow
        Slices and differentials, with ``D² = 0`` verified.

    Raises
    ------
    BimoduleError
        If `n` fails its axioms.
    NotAComplex
        If ``D² != 0`` somewhere in the window.
    """
    if n.base is not a:
        raise BimoduleError(f"{n.name} is a bimodule over {n.base}, not {a}")
    if check:
        violations = validate_bimodule(n)
        if violations:
            raise BimoduleError(f"{n.name} over {a}: {violations[0]}")
    min_degree = n.bottom_degree if min_degree is None else min_degree
    if max_degree <= min_degree:
        raise WindowExceeded(f"empty window [{min_degree}, {max_degree}]")
    c = c if c is not None else build_cobar(a)
    engine = DifferentialEngine(c, n)
    keys = {
        degree: slice_keys(c, n, degree) for degree in range(min_degree - 1, max_degree + 1)
    }
    window = ComplexWindow(
        field=a.field,
        min_degree=min_degree,
        max_degree=max_degree,
        keys=keys,
        meta=n.name,
        key_label=key_labeller(c, n),
        multiply=_self_product(a, c) if n.kind == "self" else None,
        length_graded=a.is_formal and not n.differential,
    )
    for degree in range(min_degree, max_degree + 1):
        target = window.index(degree - 1)
        columns = []
        for i, key in enumerate(keys[degree]):
            columns.append({target[k]: v for k, v in engine(key).items()})
            if i and i % 5000 == 0:
                logger.debug(
                    f"degree {degree}: {i} of {len(keys[degree])} columns",
                    extra=dict(action="assemble", degree=degree, i=i, n=len(keys[degree])),
                )
        window.set_differential(degree, SparseMatrix.from_columns(len(target), a.field, columns))
    window.check_complex()
    if check and n.kind == "self":
        _check_generators(a, c, window, engine)
    logger.info(
        f"built {window} for {a}: slice sizes "
        f"{ {degree: len(k) for degree, k in keys.items()} }"
    )
    return window


def sphere_labeller(a: FDGA):  # type: ignore[no-untyped-def]
    """Names ``1, a, b, c, v, v^k, u⊗v^k`` for single-term sphere classes."""

    def label(rep: KeyChain) -> str | None:
        if len(a.basis) != 1 or len(rep) != 1:
            return None
        ((s, word),) = rep.keys()
        k = len(word)
        if s == UNIT:
            return {0: "1", 1: "v", 2: "c"}.get(k, f"v^{k}")
        return {0: "a", 1: "b"}.get(k, f"u⊗v^{k}")

    return label


@debug_time
def loop_homology(
    a: FDGA,
    max_degree: int,
    min_degree: int | None = None,
    c: CobarAlgebra | None = None,
) -> HomologyRing:
    """The loop homology ring ``H(A ⊗ T(W), D)`` in a window.

    Degrees are those of ``A ⊗ T(W)``; the ring's `shift` is the formal
    dimension, so degree ``n`` here is ``H_{n+d}`` of the free loop space.
    """
    min_degree = -a.formal_dimension if min_degree is None else min_degree
    window = hochschild_complex(a, self_bimodule(a), max_degree, min_degree, c)
    return homology_ring(window, labeller=sphere_labeller(a), shift=a.formal_dimension)


def hochschild_homology(
    a: FDGA,
    coefficients: str,
    max_degree: int,
    min_degree: int | None = None,
    c: CobarAlgebra | None = None,
) -> HomologyRing:
    """Homology of the Hochschild window with ``self``, ``trivial`` or ``dual`` coefficients."""
    n = coefficient_bimodule(a, coefficients)
    if n.kind == "self":
        return loop_homology(a, max_degree, min_degree, c)
    window = hochschild_complex(a, n, max_degree, min_degree, c)
    return homology_ring(window)


def e2_page(a: FDGA, max_degree: int, min_degree: int | None = None) -> HomologyRing:
    """``HH(H, H)`` for ``H = H(A)``, the second page converging to loop homology.

    Parameters
    ----------
    a
        The algebra; its cohomology is used when ``d != 0``.
    max_degree, min_degree
        The window.

    Returns
    -------
    HomologyRing
        Loop homology of ``(H, 0)``.

    Raises
    ------
    NotSupported
        If `a` has a nonzero differential and is not graded commutative.
    """
    if a.is_formal:
        h = a
    elif validate_fdga(a).commutative:
        h = cohomology_algebra(a)
    else:
        raise NotSupported(f"{a} has a differential and a noncommutative product")
    return loop_homology(h, max_degree, min_degree)


def generator_word(c: CobarAlgebra, label: str, power: int = 1) -> Word:
    """The word ``w^power`` for the generator dual to `label`."""
    return (c.generators.index(label),) * power
