import json

import hypothesis
import pytest

from loopalg.dga.examples import builtin_example
from loopalg.linalg.scalars import FieldSpec

hypothesis.settings.register_profile("fast", max_examples=10)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)

Q = FieldSpec.rationals()
F2 = FieldSpec.prime(2)
F5 = FieldSpec.prime(5)


@pytest.fixture
def q():
    return Q


@pytest.fixture(params=[Q, F2, F5], ids=str)
def any_field(request):
    return request.param


@pytest.fixture
def s2():
    return builtin_example("sphere:2")


@pytest.fixture
def s3():
    return builtin_example("sphere:3")


@pytest.fixture
def cp2():
    return builtin_example("cp:2")


@pytest.fixture
def no_user_config(tmp_path, monkeypatch):
    monkeypatch.setattr("loopalg.config.DEFAULT_CONFIG", tmp_path / "absent.yaml")
    return tmp_path


def algebra_document(name, generators, products=(), differential=(), dimension=None, field="q"):
    """A JSON algebra description from compact tables."""
    return json.dumps(
        {
            "name": name,
            "field": field,
            "formal_dimension": dimension
            if dimension is not None
            else max(degree for _, degree in generators),
            "generators": [{"name": n, "degree": d} for n, d in generators],
            "products": [
                {
                    "left": left,
                    "right": right,
                    "result": [{"gen": g, "coeff": c} for g, c in result],
                }
                for left, right, result in products
            ],
            "differential": [
                {"source": source, "result": [{"gen": g, "coeff": c} for g, c in result]}
                for source, result in differential
            ],
        }
    )


S2_DOCUMENT = algebra_document("S2", [("u", 2)], [("u", "u", [])], [("u", [])])

#: x·x = y, x·y = z but y·x = 0
NON_ASSOCIATIVE = algebra_document(
    "broken",
    [("x", 2), ("y", 4), ("z", 6)],
    [("x", "x", [("y", 1)]), ("x", "y", [("z", 1)])],
)

#: d x = y and x·y = z, so d(x·x) = 0 but d x·x + x·d x = z
NOT_LEIBNIZ = algebra_document(
    "leibniz",
    [("x", 2), ("y", 3), ("z", 5)],
    [("x", "y", [("z", 1)])],
    [("x", [("y", 1)])],
)

#: u in degree 3 plus an acyclic pair p -> q
ACYCLIC_PAIR = algebra_document(
    "S3+pq",
    [("u", 3), ("p", 4), ("q", 5)],
    [],
    [("p", [("q", 1)])],
)

#: x·y = z, y·x = 0, with an acyclic pair p -> q
NONCOMMUTATIVE_WITH_DIFFERENTIAL = algebra_document(
    "skew",
    [("x", 2), ("y", 2), ("z", 4), ("p", 5), ("q", 6)],
    [("x", "y", [("z", 1)])],
    [("p", [("q", 1)])],
)
