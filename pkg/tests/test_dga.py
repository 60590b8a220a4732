import warnings

import pytest
from conftest import (
    ACYCLIC_PAIR,
    NON_ASSOCIATIVE,
    NOT_LEIBNIZ,
    S2_DOCUMENT,
    algebra_document,
)

from loopalg.dga.base import cohomology, validate_fdga
from loopalg.dga.bimodule import (
    BimoduleError,
    coefficient_bimodule,
    dual_bimodule,
    self_bimodule,
    trivial_bimodule,
    validate_bimodule,
)
from loopalg.dga.constructions import (
    DimensionMismatch,
    NotFormal,
    cohomology_algebra,
    connected_sum,
    point,
    tensor_product,
)
from loopalg.dga.examples import (
    ConnectedSumExample,
    Product,
    Sphere,
    UnknownExample,
    builtin_example,
    get_examples,
    parse_example_name,
)
from loopalg.dga.parse import (
    MalformedAlgebraFile,
    NotPrime,
    UnknownLabel,
    parse_algebra_file,
)
from loopalg.linalg.scalars import FieldMismatch, FieldSpec

BUILTINS = [
    "sphere:2",
    "sphere:3",
    "sphere(5)",
    "cp:2",
    "cp:3",
    "product(sphere:3,sphere:3)",
    "product(sphere:2, sphere:3)",
    "connected-sum(product(sphere:3,sphere:3),product(sphere:3,sphere:3))",
    "connected-sum-s3x3",
]


def test_parse_s2():
    a = parse_algebra_file(S2_DOCUMENT)
    assert a.name == "S2"
    assert a.field == FieldSpec.rationals()
    assert a.labels == ["u"]
    assert a.cohomological_degree(0) == 2
    assert a.formal_dimension == 2
    assert a.product == {}
    report = validate_fdga(a)
    assert report.valid
    assert report.commutative
    assert report.poincare


def test_parse_field_override():
    a = parse_algebra_file(S2_DOCUMENT, FieldSpec.prime(3))
    assert a.field == FieldSpec.prime(3)


def test_parse_canonical_order():
    a = parse_algebra_file(
        algebra_document("cp2", [("x2", 4), ("x", 2)], [("x", "x", [("x2", "1")])])
    )
    assert a.labels == ["x", "x2"]
    assert a.basis.degrees == [-2, -4]
    assert a.mul(1, 1) == {2: 1}


@pytest.mark.parametrize(
    "document, error",
    [
        ("{", MalformedAlgebraFile),
        ("[]", MalformedAlgebraFile),
        (algebra_document("bad", [("u", 2)], [("u", "v", [])]), UnknownLabel),
        (algebra_document("bad", [("u", 2)], [("u", "u", [("w", 1)])]), UnknownLabel),
        (algebra_document("bad", [("u", 2)], field={"fp": 4}), NotPrime),
        (algebra_document("bad", [("u", 2)], field="r"), MalformedAlgebraFile),
        (algebra_document("bad", [("u", 2), ("u", 3)]), MalformedAlgebraFile),
        (algebra_document("bad", [("u", 2)], [("u", "u", [("u", "x")])]), MalformedAlgebraFile),
    ],
)
def test_parse_errors(document, error):
    with pytest.raises(error):
        parse_algebra_file(document)


def test_missing_key():
    with pytest.raises(MalformedAlgebraFile, match="formal_dimension"):
        parse_algebra_file('{"name": "x", "field": "q", "generators": []}')


def test_associativity_violation():
    report = validate_fdga(parse_algebra_file(NON_ASSOCIATIVE))
    assert not report.valid
    assert [(v.kind, v.elements) for v in report.violations] == [
        ("associativity", ("x", "x", "x"))
    ]
    assert not report.poincare


def test_leibniz_violation():
    report = validate_fdga(parse_algebra_file(NOT_LEIBNIZ))
    assert [(v.kind, v.elements) for v in report.violations] == [("leibniz", ("x", "x"))]


def test_connectivity_violation():
    report = validate_fdga(parse_algebra_file(algebra_document("low", [("t", 1)], dimension=2)))
    assert [v.kind for v in report.violations] == ["connectivity"]


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("p", [None, 5, 7])
def test_builtins_are_valid(name, p):
    field = FieldSpec.prime(p) if p else FieldSpec.rationals()
    report = validate_fdga(builtin_example(name, field))
    assert report.valid, report.violations
    assert report.commutative
    assert report.poincare


def test_characteristic_caveat():
    assert validate_fdga(builtin_example("sphere:3", FieldSpec.prime(3))).characteristic_caveat
    assert not validate_fdga(builtin_example("sphere:3", FieldSpec.prime(5))).characteristic_caveat
    assert not validate_fdga(builtin_example("sphere:3")).characteristic_caveat


def test_example_names():
    assert parse_example_name("sphere:3") is Sphere[3]
    assert parse_example_name("s(3)") is Sphere[3]
    assert parse_example_name("product(sphere:3, sphere:3)") is Product[(Sphere[3], Sphere[3])]
    assert parse_example_name("connected-sum-example") is ConnectedSumExample
    assert parse_example_name("connected_sum_example") is ConnectedSumExample
    assert parse_example_name("cp(2)") is parse_example_name("cp:2")
    assert Product[(Sphere[3], Sphere[3])].title() == "product(sphere:3,sphere:3)"


def test_nested_argument_lists():
    with warnings.catch_warnings():
        warnings.simplefilter("error", DeprecationWarning)
        example = parse_example_name("product(sphere:3, product(sphere:2, sphere:2), s(3))")
    assert example is Product[(Sphere[3], Product[(Sphere[2], Sphere[2])], Sphere[3])]


@pytest.mark.parametrize(
    "name", ["sphere", "sphere:1", "torus:2", "product(sphere:2)", "cp(1, 2)", "sphere:"]
)
def test_unknown_examples(name):
    with pytest.raises(UnknownExample):
        builtin_example(name)


def test_get_examples():
    names = [e.names[0] for e in get_examples()]
    assert names == sorted(names)
    assert {"sphere", "cp", "product", "connected-sum", "connected-sum-s3x3"} <= set(names)


def test_tensor_product(s2, s3):
    a = tensor_product(s2, s3)
    assert validate_fdga(a).valid
    assert a.formal_dimension == 5
    assert a.labels == ["u", "u'", "uu'"]
    assert [a.cohomological_degree(i) for i in range(3)] == [2, 3, 5]


def test_tensor_product_signs(s3):
    a = builtin_example("product(sphere:3,sphere:3)")
    assert a.labels == ["u1", "u2", "u1u2"]
    u1, u2, top = 1, 2, 3
    assert a.mul(u1, u2) == {top: 1}
    assert a.mul(u2, u1) == {top: -1}
    assert a.mul(u1, u1) == {}


def test_tensor_with_point(s2):
    a = tensor_product(s2, point(s2.field))
    assert a.labels == s2.labels
    assert a.formal_dimension == 2


def test_tensor_field_mismatch(s2):
    with pytest.raises(FieldMismatch):
        tensor_product(s2, builtin_example("sphere:2", FieldSpec.prime(3)))


def test_connected_sum_of_spheres(s3):
    a = connected_sum(s3, s3)
    assert a.labels == ["omega"]
    assert a.formal_dimension == 3


def test_connected_sum():
    cube = builtin_example("connected-sum-s3x3")
    assert cube.formal_dimension == 9
    assert len(cube.basis) == 13
    assert [cube.cohomological_degree(i) for i in range(len(cube.basis))].count(6) == 6
    h = cohomology(cube)
    assert h.betti(-3) == 6
    assert h.betti(-9) == 1


def test_connected_sum_errors(cp2, s2):
    with pytest.raises(DimensionMismatch):
        connected_sum(cp2, builtin_example("product(sphere:3,sphere:3)"))
    with pytest.raises(DimensionMismatch):
        connected_sum(s2, s2)
    with pytest.raises(NotFormal):
        connected_sum(parse_algebra_file(ACYCLIC_PAIR), builtin_example("sphere:5"))


def test_cohomology_algebra():
    a = parse_algebra_file(ACYCLIC_PAIR)
    assert not a.is_formal
    h = cohomology_algebra(a)
    assert h.is_formal
    assert h.labels == ["u"]
    assert h.formal_dimension == 5


def test_cohomology_algebra_of_formal(cp2):
    h = cohomology_algebra(cp2)
    assert h.labels == cp2.labels
    assert h.product == cp2.product


@pytest.mark.parametrize("name", ["sphere:2", "cp:2", "product(sphere:2,sphere:3)"])
@pytest.mark.parametrize("kind", ["self", "trivial", "dual"])
def test_bimodules_satisfy_axioms(name, kind):
    a = builtin_example(name)
    n = coefficient_bimodule(a, kind)
    assert validate_bimodule(n) == []


def test_dual_bimodule_of_nonformal():
    assert validate_bimodule(dual_bimodule(parse_algebra_file(ACYCLIC_PAIR))) == []


def test_dual_bimodule(s2):
    n = dual_bimodule(s2)
    assert n.basis.labels == ["1^", "u^"]
    assert n.basis.degrees == [0, 2]
    assert n.act_left(1, 1) == {0: 1}
    assert n.act_right(1, 1) == {0: 1}
    assert n.act_left(1, 0) == {}


def test_self_and_trivial(s2):
    assert len(self_bimodule(s2)) == 2
    k = trivial_bimodule(s2)
    assert len(k) == 1
    assert k.act_left(1, 0) == {}


def test_unknown_coefficients(s2):
    with pytest.raises(BimoduleError):
        coefficient_bimodule(s2, "twisted")
