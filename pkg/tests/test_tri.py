import random

import pytest
from hypothesis import given, settings, strategies as st

from normkit.tri import (
    TriangulationError,
    parse_triangulation,
    serialize_triangulation,
    validate,
)

from corpus import CLOSED, TRIANGULATIONS, random_gluing, tri
from oracles import edge_classes, euler_of_triangulation, orientable_by_search, vertex_classes


def test_unglued_tet_skeleta():
    T = parse_triangulation("tets 1\n")
    sk = T.skeleta
    assert len(T.boundary_faces()) == 4
    assert (len(sk.vertex_classes), len(sk.edge_classes), len(sk.face_classes)) == (4, 6, 4)
    assert sk.euler_characteristic == 1


@pytest.mark.parametrize("name", CLOSED)
def test_closed_examples(name):
    T = tri(name)
    rep = validate(T)
    assert rep.ok, rep.violations
    assert rep.closed and rep.orientable
    assert T.skeleta.euler_characteristic == 0
    assert sum(T.skeleta.edge_degrees) == 6 * T.tet_count
    for members in T.skeleta.face_classes:
        assert len(members) == 2


def test_twotet_degrees():
    T = tri("twotet.tri")
    assert T.tet_count == 2 and T.is_closed
    assert sum(T.skeleta.edge_degrees) == 12


@pytest.mark.parametrize("name", TRIANGULATIONS)
def test_skeleta_match_relabelling_oracle(name):
    T = tri(name)
    sk = T.skeleta
    assert len(sk.vertex_classes) == len(set(vertex_classes(T).values()))
    assert len(sk.edge_classes) == len(set(edge_classes(T).values()))
    assert sk.euler_characteristic == euler_of_triangulation(T)
    assert validate(T).orientable == orientable_by_search(T)


def test_self_gluing_rejected():
    with pytest.raises(TriangulationError, match="involution"):
        parse_triangulation("tets 1\nglue 0 0 0 0 0123\n")
    rep = validate(parse_triangulation("tets 1\nglue 0 0 0 0 0123\n", strict=False))
    assert not rep.ok and any("(0,0)" in v for v in rep.violations)


def test_face_incompatible_permutation_rejected():
    with pytest.raises(TriangulationError):
        parse_triangulation("tets 2\nglue 0 0 1 0 1023\n")


def test_conflicting_inverse_reported():
    text = "tets 2\nglue 0 0 1 0 0123\nglue 1 0 0 1 1023\n"
    with pytest.raises(TriangulationError):
        parse_triangulation(text)
    rep = validate(parse_triangulation(text, strict=False))
    assert not rep.ok


def test_syntax_error_has_line_number():
    with pytest.raises(TriangulationError, match="line 2"):
        parse_triangulation("tets 1\nglue zero\n")


@pytest.mark.parametrize("name", TRIANGULATIONS)
def test_roundtrip_bundled(name):
    T = tri(name)
    text = serialize_triangulation(T)
    T2 = parse_triangulation(text)
    assert T2.gluings == T.gluings
    assert serialize_triangulation(T2) == text


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), t=st.integers(1, 3), closed=st.booleans())
def test_random_gluings(seed, t, closed):
    T = random_gluing(random.Random(seed), t, closed)
    text = serialize_triangulation(T)
    assert serialize_triangulation(parse_triangulation(text, strict=False)) == text
    sk = T.skeleta
    assert sk.euler_characteristic == euler_of_triangulation(T)
    assert sum(sk.edge_degrees) == 6 * t
    for members in sk.face_classes:
        assert len(members) in (1, 2)
    rep = validate(T)
    assert rep.orientable == orientable_by_search(T)
    if rep.ok and rep.closed:
        assert sk.euler_characteristic == 0
