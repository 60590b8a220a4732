"""Reading algebra description files.

A description is a UTF-8 JSON document::

    {"name": "S2", "field": "q", "formal_dimension": 2,
     "generators": [{"name": "u", "degree": 2}],
     "products": [{"left": "u", "right": "u", "result": []}],
     "differential": [{"source": "u", "result": []}]}

``field`` is ``"q"`` or ``{"fp": p}``; each ``result`` is a list of
``{"gen": label, "coeff": scalar}``. Degrees are cohomological.
"""

import json
import logging
from typing import Any

from loopalg.dga.base import FDGA, DGAError
from loopalg.linalg.scalars import FieldSpec, InvalidInverse, ScalarParseError, is_prime

logger = logging.getLogger(__name__)


class AlgebraFileError(DGAError):
    """An algebra description could not be read."""


class MalformedAlgebraFile(AlgebraFileError, ValueError):
    pass


class UnknownLabel(AlgebraFileError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class NotPrime(AlgebraFileError, ValueError):
    pass


def parse_field(value: Any) -> FieldSpec:
    """Read the ``field`` entry of a description.

    Parameters
    ----------
    value
        ``"q"`` or ``{"fp": p}``.

    Returns
    -------
    FieldSpec
        The coefficient field.

    Raises
    ------
    NotPrime
        If ``p`` is not a prime.
    MalformedAlgebraFile
        For any other shape.
    """
    if isinstance(value, str) and value.lower() in ("q", "rationals"):
        return FieldSpec.rationals()
    if isinstance(value, dict) and set(value) == {"fp"}:
        p = value["fp"]
        if not isinstance(p, int) or isinstance(p, bool):
            raise MalformedAlgebraFile(f"characteristic must be an integer, not {p!r}")
        if not is_prime(p):
            raise NotPrime(f"{p} is not a prime")
        return FieldSpec.prime(p)
    raise MalformedAlgebraFile(f"unrecognised field {value!r}")


def _require(document: Any, key: str, kind: type | tuple[type, ...]) -> Any:
    if not isinstance(document, dict):
        raise MalformedAlgebraFile(f"expected an object, not {document!r}")
    if key not in document:
        raise MalformedAlgebraFile(f"missing {key!r}")
    value = document[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise MalformedAlgebraFile(f"{key!r} has the wrong type")
    return value


def parse_algebra_file(text: bytes | str, field: FieldSpec | None = None) -> FDGA:
    """Parse a JSON algebra description.

    The result is in canonical order but not validated; run
    :func:`~loopalg.dga.base.validate_fdga` on it.

    Parameters
    ----------
    text
        The document.
    field
        Overrides the document's field when given.

    Returns
    -------
    FDGA
        The algebra.

    Raises
    ------
    MalformedAlgebraFile
        If the document is not JSON or does not follow the schema.
    UnknownLabel
        If a table refers to an undeclared generator.
    NotPrime
        If the field's characteristic is not prime.
    """
    try:
        document = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedAlgebraFile(f"not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise MalformedAlgebraFile("top level must be an object")

    name = _require(document, "name", str)
    file_field = parse_field(_require(document, "field", (str, dict)))
    field = field or file_field
    formal_dimension = _require(document, "formal_dimension", int)

    generators = []
    for entry in _require(document, "generators", list):
        if not isinstance(entry, dict):
            raise MalformedAlgebraFile(f"generator entry {entry!r} is not an object")
        generators.append((_require(entry, "name", str), _require(entry, "degree", int)))
    labels = {label for label, _ in generators}
    if len(labels) != len(generators):
        raise MalformedAlgebraFile("generator names are not unique")

    def known(label: Any) -> str:
        if label not in labels:
            raise UnknownLabel(f"unknown generator {label!r}")
        return label

    def result(entry: dict) -> dict:
        terms: dict = {}
        for term in _require(entry, "result", list):
            if not isinstance(term, dict):
                raise MalformedAlgebraFile(f"result term {term!r} is not an object")
            gen = known(_require(term, "gen", str))
            try:
                coefficient = field(str(term.get("coeff", "1")))
            except (ScalarParseError, InvalidInverse) as e:
                raise MalformedAlgebraFile(str(e)) from e
            terms[gen] = terms.get(gen, field.zero) + coefficient
        return terms

    products = {}
    for entry in document.get("products", []):
        key = (known(_require(entry, "left", str)), known(_require(entry, "right", str)))
        if key in products:
            raise MalformedAlgebraFile(f"product {key} given twice")
        products[key] = result(entry)
    differential = {}
    for entry in document.get("differential", []):
        source = known(_require(entry, "source", str))
        if source in differential:
            raise MalformedAlgebraFile(f"differential of {source!r} given twice")
        differential[source] = result(entry)

    a = FDGA.from_tables(name, field, generators, products, differential, formal_dimension)
    logger.info(f"parsed {a} with {len(a.basis)} generators")
    return a
