"""Differential graded bimodules over an :class:`~loopalg.dga.base.FDGA`.

Actions are indexed by full algebra indices (unit at 0), which always act as
the identity and are therefore never stored.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Literal, Mapping

from loopalg.dga.base import UNIT, UNIT_LABEL, FDGA, DGAError, Violation
from loopalg.linalg.graded import GradedBasis
from loopalg.linalg.scalars import Scalar, sign
from loopalg.linalg.sparse import Column, axpy

logger = logging.getLogger(__name__)

CoefficientKind = Literal["self", "trivial", "dual", "general"]


class BimoduleError(DGAError):
    """A bimodule fails its axioms."""


@dataclass(frozen=True, eq=False)
class Bimodule:
    """A finite dg bimodule ``N`` over `base`.

    Parameters
    ----------
    name
        Display name (``k``, ``A``, ``A^``).
    kind
        Which coefficient family this is.
    base
        The algebra acting.
    basis
        Basis of ``N`` with lower degrees.
    differential
        ``s -> d n_s``.
    left
        ``(x, s) -> e_x · n_s`` for nonunit full indices ``x``.
    right
        ``(s, x) -> n_s · e_x``.
    """

    name: str
    kind: CoefficientKind
    base: FDGA
    basis: GradedBasis
    differential: dict[int, Column]
    left: dict[tuple[int, int], Column]
    right: dict[tuple[int, int], Column]

    def __len__(self) -> int:
        return len(self.basis)

    def d(self, s: int) -> Column:
        return self.differential.get(s, {})

    def act_left(self, x: int, s: int) -> Column:
        if x == UNIT:
            return {s: self.base.field.one}
        return self.left.get((x, s), {})

    def act_right(self, s: int, x: int) -> Column:
        if x == UNIT:
            return {s: self.base.field.one}
        return self.right.get((s, x), {})

    def apply_d(self, n: Mapping[int, Scalar]) -> Column:
        result: Column = {}
        for s, c in n.items():
            axpy(result, c, self.d(s))
        return result

    def left_multiply(self, a: Mapping[int, Scalar], n: Mapping[int, Scalar]) -> Column:
        result: Column = {}
        for x, c in a.items():
            for s, e in n.items():
                axpy(result, c * e, self.act_left(x, s))
        return result

    def right_multiply(self, n: Mapping[int, Scalar], a: Mapping[int, Scalar]) -> Column:
        result: Column = {}
        for s, e in n.items():
            for x, c in a.items():
                axpy(result, e * c, self.act_right(s, x))
        return result

    @property
    def bottom_degree(self) -> int:
        return min(self.basis.degrees, default=0)


def self_bimodule(a: FDGA) -> Bimodule:
    """``A`` over itself, on the full basis."""
    basis = GradedBasis(tuple(zip(a.full_labels, a.full_degrees)))
    nonunit = range(1, a.dimension)
    everything = range(a.dimension)
    left = {(x, s): col for x in nonunit for s in everything if (col := a.mul(x, s))}
    right = {(s, x): col for s in everything for x in nonunit if (col := a.mul(s, x))}
    differential = {s: col for s in everything if (col := a.d(s))}
    return Bimodule("A", "self", a, basis, differential, left, right)


def trivial_bimodule(a: FDGA) -> Bimodule:
    """The ground field ``k``, with Ā acting by zero."""
    return Bimodule("k", "trivial", a, GradedBasis(((UNIT_LABEL, 0),)), {}, {}, {})


def dual_bimodule(a: FDGA) -> Bimodule:
    """The linear dual ``A^∨ = Hom(A, k)``.

    The dual basis element ``φ_b`` of ``b`` sits in lower degree ``-|b|``.
    For ``f ∈ A`` and ``α ∈ A^∨``, ``(f·α)(h) = (-1)^{|f|} α(h f)`` and
    ``(α·f)(h) = α(f h)``; the differential is ``dα = -(-1)^{|α|} α∘d``.
    """
    field = a.field
    everything = range(a.dimension)
    nonunit = range(1, a.dimension)
    degree = a.full_degrees
    basis = GradedBasis(tuple((f"{label}^", -deg) for label, deg in zip(a.full_labels, degree)))
    left: dict[tuple[int, int], Column] = {}
    right: dict[tuple[int, int], Column] = {}
    for x in nonunit:
        for c in everything:
            for b, v in a.mul(c, x).items():
                left.setdefault((x, b), {})[c] = field(sign(degree[x])) * v
            for b, v in a.mul(x, c).items():
                right.setdefault((b, x), {})[c] = v
    differential: dict[int, Column] = {}
    for c in everything:
        for b, v in a.d(c).items():
            differential.setdefault(b, {})[c] = -field(sign(degree[b])) * v
    return Bimodule("A^", "dual", a, basis, differential, left, right)


def coefficient_bimodule(a: FDGA, kind: str) -> Bimodule:
    """Look up a coefficient module by name."""
    constructors = {"self": self_bimodule, "trivial": trivial_bimodule, "dual": dual_bimodule}
    if kind not in constructors:
        raise BimoduleError(f"unknown coefficients {kind!r}, expected one of {sorted(constructors)}")
    return constructors[kind](a)


def validate_bimodule(n: Bimodule) -> list[Violation]:
    """List every failed bimodule axiom of `n`.

    Checks degree additivity, the three associativity laws, Leibniz on both
    sides and ``d² = 0``.

    Parameters
    ----------
    n
        The bimodule.

    Returns
    -------
    list[Violation]
        Empty when `n` is a dg bimodule.
    """
    a = n.base
    one = a.field.one
    violations = []
    alg = a.full_labels
    mod = n.basis.labels
    deg = a.full_degrees
    mdeg = n.basis.degrees
    nonunit = range(1, a.dimension)
    elements = range(len(n))

    for x, s in itertools.product(nonunit, elements):
        for t in n.act_left(x, s):
            if mdeg[t] != deg[x] + mdeg[s]:
                violations.append(Violation("left degree", (alg[x], mod[s], mod[t])))
        for t in n.act_right(s, x):
            if mdeg[t] != deg[x] + mdeg[s]:
                violations.append(Violation("right degree", (mod[s], alg[x], mod[t])))
    for s in elements:
        for t in n.d(s):
            if mdeg[t] != mdeg[s] - 1:
                violations.append(Violation("differential degree", (mod[s], mod[t])))
        if n.apply_d(n.d(s)):
            violations.append(Violation("d^2", (mod[s],)))

    for x, y, s in itertools.product(nonunit, nonunit, elements):
        ns = {s: one}
        if n.left_multiply(a.mul(x, y), ns) != n.left_multiply({x: one}, n.act_left(y, s)):
            violations.append(Violation("left associativity", (alg[x], alg[y], mod[s])))
        if n.right_multiply(ns, a.mul(x, y)) != n.right_multiply(n.act_right(s, x), {y: one}):
            violations.append(Violation("right associativity", (mod[s], alg[x], alg[y])))
        if n.right_multiply(n.act_left(x, s), {y: one}) != n.left_multiply(
            {x: one}, n.act_right(s, y)
        ):
            violations.append(Violation("middle associativity", (alg[x], mod[s], alg[y])))

    for x, s in itertools.product(nonunit, elements):
        ns = {s: one}
        lhs = n.apply_d(n.act_left(x, s))
        rhs = n.left_multiply(a.d(x), ns)
        axpy(rhs, a.field(sign(deg[x])), n.left_multiply({x: one}, n.d(s)))
        if lhs != rhs:
            violations.append(Violation("left leibniz", (alg[x], mod[s])))
        lhs = n.apply_d(n.act_right(s, x))
        rhs = n.right_multiply(n.d(s), {x: one})
        axpy(rhs, a.field(sign(mdeg[s])), n.right_multiply(ns, a.d(x)))
        if lhs != rhs:
            violations.append(Violation("right leibniz", (mod[s], alg[x])))

    logger.debug(f"bimodule {n.name} over {a}: {len(violations)} violations")
    return violations
