import itertools

import pytest
from conftest import ACYCLIC_PAIR, NONCOMMUTATIVE_WITH_DIFFERENTIAL

from loopalg.cobar import build_cobar, omega_homology
from loopalg.dga.bimodule import BimoduleError, self_bimodule, trivial_bimodule
from loopalg.dga.constructions import cohomology_algebra
from loopalg.dga.examples import builtin_example
from loopalg.dga.parse import parse_algebra_file
from loopalg.hochschild.complex import (
    DifferentialEngine,
    e2_page,
    generator_word,
    hochschild_complex,
    hochschild_homology,
    loop_homology,
    loop_model_differential,
)
from loopalg.hochschild.ring import cup_product, graded_commutator, graded_convolution
from loopalg.hochschild.window import NotSupported, WindowExceeded
from loopalg.linalg.homology import homology_of_slice
from loopalg.linalg.scalars import FieldSpec
from loopalg.linalg.sparse import dense_rank

S3_LABELS = {
    -3: "a",
    -1: "b",
    0: "1",
    1: "u⊗v^2",
    2: "v",
    3: "u⊗v^3",
    4: "c",
    5: "u⊗v^4",
    6: "v^3",
    7: "u⊗v^5",
    8: "v^4",
    9: "u⊗v^6",
}


def test_loop_homology_s3(s3):
    ring = loop_homology(s3, 10)
    assert ring.shift == 3
    assert ring.degrees == range(-3, 10)
    assert ring.betti_table() == {n: 0 if n == -2 else 1 for n in range(-3, 10)}
    assert {ring.degree(label): label for label in ring.labels()} == S3_LABELS
    assert ring.unit == "1"


def test_loop_homology_s3_products(s3):
    ring = loop_homology(s3, 10)
    assert ring.product("b", "u⊗v^2") == {}
    assert ring.product("v", "v") == {"c": 1}
    assert ring.product("a", "v") == {"b": 1}
    assert ring.product("1", "u⊗v^2") == {"u⊗v^2": 1}
    assert ("b", "b") in ring.relations()


def test_loop_homology_s2(s2):
    ring = loop_homology(s2, 8)
    assert ring.betti_table() == {n: 1 for n in range(-2, 8)}
    labels = {ring.degree(label): label for label in ring.labels()}
    assert labels == {
        -2: "a",
        -1: "b",
        0: "1",
        1: "u⊗v^3",
        2: "c",
        3: "u⊗v^5",
        4: "v^4",
        5: "u⊗v^7",
        6: "v^6",
        7: "u⊗v^9",
    }
    assert ring.product("b", "c") == {"u⊗v^3": 1}
    assert ring.product("c", "c") == {"v^4": 1}
    for relation in [("a", "c"), ("b", "b"), ("a", "u⊗v^3")]:
        assert relation in ring.relations()


def test_loop_model_differential_s2(s2):
    # D(1⊗v) = -2 u⊗v², D(1⊗v²) = 0
    v = generator_word(build_cobar(s2), "u")
    assert loop_model_differential(s2, {(0, v): 1}) == {(1, v * 2): -2}
    assert loop_model_differential(s2, {(0, v * 2): 1}) == {}


def test_s2_over_f2():
    a = builtin_example("sphere:2", FieldSpec.prime(2))
    ring = loop_homology(a, 4)
    assert ring.betti(0) == 2
    assert set(ring.classes[0][i].label for i in range(2)) == {"1", "u⊗v^2"}
    assert ring.product("a", "c") == {"u⊗v^2": 1}


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("name", ["sphere:2", "cp:2"])
def test_dense_oracle(name, p):
    a = builtin_example(name, FieldSpec.prime(p))
    window = loop_homology(a, 6).window
    for n in window.reported_degrees:
        dim = window.dimension(n)
        rank_out = dense_rank(window.differential(n))
        rank_in = dense_rank(window.differential(n + 1))
        assert window.homology(n).betti == dim - rank_out - rank_in


@pytest.mark.parametrize("name", ["sphere:2", "sphere:3", "cp:2", "product(sphere:2,sphere:3)"])
def test_engine_matches_closed_formula(name):
    a = builtin_example(name)
    c = build_cobar(a)
    engine = DifferentialEngine(c, self_bimodule(a))
    window = loop_homology(a, 5, c=c).window
    for degree, keys in window.keys.items():
        for key in keys:
            assert engine(key) == loop_model_differential(a, {key: 1}, c)


def test_engine_matches_noncommutative_formula(cp2):
    c = build_cobar(cp2)
    engine = DifferentialEngine(c, self_bimodule(cp2))
    window = loop_homology(cp2, 4, c=c).window
    for keys in window.keys.values():
        for key in keys:
            assert engine(key) == loop_model_differential(cp2, {key: 1}, c, commutative=False)


@pytest.mark.parametrize("name", ["sphere:2", "sphere:3", "cp:2", "product(sphere:2,sphere:3)"])
def test_graded_commutative(name):
    ring = loop_homology(builtin_example(name), 6)
    for x, y in itertools.product(ring.labels(), repeat=2):
        if ring.observed(x, y) and ring.observed(y, x):
            assert graded_commutator(ring, x, y) == {}


@pytest.mark.parametrize("name", ["sphere:2", "sphere:3", "cp:2"])
def test_associative(name):
    ring = loop_homology(builtin_example(name), 6)
    for x, y, z in itertools.product(ring.labels(), repeat=3):
        try:
            left = ring.multiply(ring.product(x, y), {z: 1})
            right = ring.multiply({x: 1}, ring.product(y, z))
        except WindowExceeded:
            continue
        assert left == right


@pytest.mark.slow
def test_kunneth(s3):
    product = builtin_example("product(sphere:3,sphere:3)")
    ring = loop_homology(product, 8, -6)
    sphere = loop_homology(s3, 11).betti_table()
    expected = graded_convolution(sphere, sphere)
    assert ring.betti_table() == {n: expected.get(n, 0) for n in range(-6, 8)}


@pytest.mark.parametrize("name", ["sphere:2", "sphere:3", "cp:2"])
def test_duality(name):
    a = builtin_example(name)
    d = a.formal_dimension
    dual = hochschild_homology(a, "dual", 8, 0)
    loop = loop_homology(a, 8 - d)
    for n in range(0, 8):
        assert dual.betti(n) == loop.betti(n - d)


@pytest.mark.parametrize("name", ["sphere:2", "sphere:3", "cp:2"])
def test_trivial_coefficients(name):
    a = builtin_example(name)
    trivial = hochschild_homology(a, "trivial", 8)
    omega = omega_homology(build_cobar(a), 8)
    assert trivial.betti_table() == omega.betti_table()
    assert trivial.structure == {}


def test_self_coefficients_are_loop_homology(s3):
    assert hochschild_homology(s3, "self", 6).betti_table() == loop_homology(s3, 6).betti_table()


def test_window_labels(s2):
    window = hochschild_complex(s2, trivial_bimodule(s2), 3)
    assert window.meta == "k"
    assert window.slices[2].labels == ["1⊗<u|u>"]
    with pytest.raises(WindowExceeded):
        window.homology(3)
    with pytest.raises(WindowExceeded):
        window.differential(7)


def test_empty_window(s2):
    with pytest.raises(WindowExceeded):
        hochschild_complex(s2, self_bimodule(s2), 1, 1)


def test_bimodule_over_other_algebra(s2, s3):
    with pytest.raises(BimoduleError):
        hochschild_complex(s2, self_bimodule(s3), 4)


def test_nonformal_loop_homology():
    a = parse_algebra_file(ACYCLIC_PAIR)
    ring = loop_homology(a, 6)
    expected = loop_homology(cohomology_algebra(a), 6)
    assert ring.betti_table() == expected.betti_table()


def test_e2_formal(cp2):
    assert e2_page(cp2, 8).betti_table() == loop_homology(cp2, 8).betti_table()
    assert e2_page(cp2, 8, -4).degrees == range(-4, 8)


def test_e2_nonformal():
    a = parse_algebra_file(ACYCLIC_PAIR)
    e2 = e2_page(a, 6)
    assert e2.betti_table() == loop_homology(cohomology_algebra(a), 6).betti_table()


def test_e2_not_supported():
    with pytest.raises(NotSupported):
        e2_page(parse_algebra_file(NONCOMMUTATIVE_WITH_DIFFERENTIAL), 6)


def test_cup_product(s3):
    ring = loop_homology(s3, 10)
    v = ring.representative("v")
    assert cup_product(ring.window, v, v) == [1]
    assert cup_product(ring.window, ring.representative("a"), v) == [1]
    with pytest.raises(WindowExceeded):
        cup_product(ring.window, ring.representative("v^3"), ring.representative("v^3"))


def test_s2_over_f2_table():
    # over F_2 the differential D(1⊗v) = -2 u⊗v² vanishes
    ring = loop_homology(builtin_example("sphere:2", FieldSpec.prime(2)), 8)
    assert ring.betti_table() == {-2: 1, -1: 1, **{n: 2 for n in range(8)}}


@pytest.mark.parametrize("field", [FieldSpec.rationals(), FieldSpec.prime(5)], ids=str)
@pytest.mark.parametrize("name", ["sphere:2", "cp:2", "product(sphere:2,sphere:3)"])
def test_length_blocks_agree(name, field):
    a = builtin_example(name, field)
    windows = [loop_homology(a, 6).window, omega_homology(build_cobar(a), 6).window]
    for window in windows:
        assert window.length_graded
        for n in window.reported_degrees:
            blocked = window.homology(n)
            plain = homology_of_slice(window.differential(n + 1), window.differential(n), n)
            assert blocked.betti == plain.betti
            for rep in blocked.representatives:
                assert any(plain.project(rep))
            for rep in plain.representatives:
                assert any(blocked.project(rep))


def test_nonformal_window_is_not_length_graded():
    a = parse_algebra_file(ACYCLIC_PAIR)
    assert not loop_homology(a, 4).window.length_graded
    assert not omega_homology(build_cobar(a), 4).window.length_graded
