"""Builtin cohomology algebras: spheres, projective spaces, products, connected sums.

Examples are parameterised classes, so ``Sphere[3]`` is the three-sphere and
``Product[(Sphere[3], Sphere[3])]`` its square. Names typed on the command
line are read by :data:`example_grammar`::

    sphere:3   sphere(3)   cp:2   product(sphere:3, cp(2))
    connected-sum(product(sphere:3,sphere:3), product(sphere:3,sphere:3))
    connected-sum-s3x3
"""

import logging
from abc import abstractmethod
from dataclasses import replace
from functools import reduce
from typing import Any

import pyparsing as pp

from loopalg.dga.base import FDGA, DGAError
from loopalg.dga.constructions import connected_sum, rename, tensor_product
from loopalg.linalg.scalars import FieldSpec

logger = logging.getLogger(__name__)


class UnknownExample(DGAError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ExampleMeta(type):
    """A metaclass for :class:`Example`."""

    classes: dict[tuple[str, Any], type] = {}

    def __getitem__(cls, item: Any) -> type["Example"]:
        """Return the subclass of `cls` with `item` as its parameter."""
        key = (cls.__name__, item)
        if key in ExampleMeta.classes:
            return ExampleMeta.classes[key]
        cls.check(item)
        example = type(f"{cls.__name__}[{item!r}]", (cls,), {"parameter": item})
        ExampleMeta.classes[key] = example
        return example


class Example(metaclass=ExampleMeta):
    """A named algebra that can be built over any field."""

    #: Names accepted by the grammar
    names: tuple[str, ...] = ()
    #: One-line description for ``loopalg examples``
    description = ""
    #: Usage pattern for ``loopalg examples``
    usage = ""
    #: The parameter given with ``[]``
    parameter: Any = None

    @classmethod
    def check(cls, parameter: Any) -> None:
        """Reject parameters the example cannot be built with."""

    @classmethod
    @abstractmethod
    def title(cls) -> str:
        """The canonical grammar string."""

    @classmethod
    @abstractmethod
    def build(cls, field: FieldSpec) -> FDGA:
        """Construct the algebra over `field`."""


class Sphere(Example):
    names = ("sphere", "s")
    description = "cohomology of the n-sphere, Λu/u² with |u| = n"
    usage = "sphere:n"

    @classmethod
    def check(cls, parameter: Any) -> None:
        if not isinstance(parameter, int) or parameter < 2:
            raise UnknownExample(f"sphere needs a dimension n >= 2, not {parameter!r}")

    @classmethod
    def title(cls) -> str:
        return f"sphere:{cls.parameter}"

    @classmethod
    def build(cls, field: FieldSpec) -> FDGA:
        n = cls.parameter
        return FDGA.from_tables(f"S{n}", field, [("u", n)], {}, {}, n)


class ComplexProjective(Example):
    names = ("cp",)
    description = "cohomology of CPⁿ, k[x]/x^{n+1} with |x| = 2"
    usage = "cp:n"

    @classmethod
    def check(cls, parameter: Any) -> None:
        if not isinstance(parameter, int) or parameter < 1:
            raise UnknownExample(f"cp needs n >= 1, not {parameter!r}")

    @classmethod
    def title(cls) -> str:
        return f"cp:{cls.parameter}"

    @classmethod
    def build(cls, field: FieldSpec) -> FDGA:
        n = cls.parameter

        def power(k: int) -> str:
            return "x" if k == 1 else f"x{k}"

        generators = [(power(k), 2 * k) for k in range(1, n + 1)]
        products = {
            (power(i), power(j)): {power(i + j): 1}
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if i + j <= n
        }
        return FDGA.from_tables(f"CP{n}", field, generators, products, {}, 2 * n)


class Product(Example):
    names = ("product",)
    description = "tensor product of the factors; factor i has i appended to its labels"
    usage = "product(x, y, ...)"

    @classmethod
    def check(cls, parameter: Any) -> None:
        if not isinstance(parameter, tuple) or len(parameter) < 2:
            raise UnknownExample("product needs at least two factors")

    @classmethod
    def title(cls) -> str:
        return f"product({','.join(factor.title() for factor in cls.parameter)})"

    @classmethod
    def build(cls, field: FieldSpec) -> FDGA:
        factors = [
            rename(factor.build(field), suffix=str(i))
            for i, factor in enumerate(cls.parameter, start=1)
        ]
        result = reduce(tensor_product, factors)
        name = "×".join(factor.name for factor in factors)
        return replace(result, name=name)


class ConnectedSum(Example):
    names = ("connected-sum",)
    description = "connected sum of two formal Poincaré duality algebras"
    usage = "connected-sum(x, y)"

    @classmethod
    def check(cls, parameter: Any) -> None:
        if not isinstance(parameter, tuple) or len(parameter) != 2:
            raise UnknownExample("connected-sum needs exactly two summands")

    @classmethod
    def title(cls) -> str:
        first, second = cls.parameter
        return f"connected-sum({first.title()},{second.title()})"

    @classmethod
    def build(cls, field: FieldSpec) -> FDGA:
        first, second = cls.parameter
        return connected_sum(first.build(field), second.build(field))


class ConnectedSumExample(Example):
    names = ("connected-sum-s3x3", "connected-sum-example", "connected_sum_example")
    description = (
        "(S3×S3×S3)#(S3×S3×S3) with classes a, b, c and e, f, g;"
        " its intersection morphism vanishes in positive degrees"
    )
    usage = "connected-sum-s3x3"

    @classmethod
    def title(cls) -> str:
        return "connected-sum-s3x3"

    @staticmethod
    def _cube(field: FieldSpec, labels: str) -> FDGA:
        sphere = Sphere[3].build(field)
        factors = [rename(sphere, {"u": label}) for label in labels]
        cube = reduce(tensor_product, factors)
        return replace(cube, name="S3×S3×S3")

    @classmethod
    def build(cls, field: FieldSpec) -> FDGA:
        result = connected_sum(cls._cube(field, "abc"), cls._cube(field, "efg"))
        return replace(result, name="(S3×S3×S3)#(S3×S3×S3)")


def _get_all_subclasses(cls: type) -> set[type]:
    return set(cls.__subclasses__()).union(
        [s for c in cls.__subclasses__() for s in _get_all_subclasses(c)]
    )


def get_examples() -> list[type[Example]]:
    """The unparameterised example families, in a stable order."""
    families = [e for e in _get_all_subclasses(Example) if "names" in e.__dict__]
    return sorted(families, key=lambda e: e.names[0])


def _by_name() -> dict[str, type[Example]]:
    return {name: e for e in get_examples() for name in e.names}


integer = pp.common.integer
identifier = pp.Word(pp.alphas, pp.alphanums + "-_").set_name("name")
example_grammar = pp.Forward().set_name("example")
arguments = pp.Suppress("(") + pp.Group(
    pp.Opt(pp.DelimitedList(integer | example_grammar, delim=","))
) + pp.Suppress(")")
example_grammar <<= pp.Group(identifier + pp.Opt(pp.Suppress(":") + integer | arguments))


def _resolve(node: pp.ParseResults) -> type[Example]:
    head = node[0].lower().replace("_", "-")
    family = _by_name().get(head)
    if family is None:
        raise UnknownExample(f"unknown example {node[0]!r}")
    if len(node) == 1:
        if family is ConnectedSumExample:
            return family
        raise UnknownExample(f"{head} needs a parameter, e.g. {family.usage}")
    argument = node[1]
    if isinstance(argument, pp.ParseResults):
        values = [
            item if isinstance(item, int) else _resolve(item) for item in argument
        ]
        if family in (Sphere, ComplexProjective):
            if len(values) != 1:
                raise UnknownExample(f"{head} takes one integer")
            return family[values[0]]
        if any(isinstance(value, int) for value in values):
            raise UnknownExample(f"{head} takes algebras, not integers")
        return family[tuple(values)]
    if family in (Sphere, ComplexProjective):
        return family[argument]
    raise UnknownExample(f"{head} does not take an integer")


def parse_example_name(name: str) -> type[Example]:
    """Turn a builtin name into its :class:`Example` class.

    Parameters
    ----------
    name
        For instance ``"sphere:3"`` or ``"product(sphere:3,sphere:3)"``.

    Returns
    -------
    type[Example]
        The parameterised example.

    Raises
    ------
    UnknownExample
        If the name does not parse or names no example.
    """
    try:
        result = example_grammar.parse_string(name.strip(), parse_all=True)
    except pp.ParseException as e:
        raise UnknownExample(f"cannot read example name {name!r}: {e}") from e
    return _resolve(result[0])


def builtin_example(name: str, field: FieldSpec | None = None) -> FDGA:
    """Build a builtin algebra by name, over ℚ unless `field` is given."""
    example = parse_example_name(name)
    a = example.build(field or FieldSpec.rationals())
    logger.debug(f"built {example.title()} as {a}")
    return a
