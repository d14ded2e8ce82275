import random

import pytest
from hypothesis import given, settings, strategies as st

from normkit.tri import EDGES
from normkit.nsurf import (
    AlmostNormalPiece,
    AlmostNormalSurface,
    NormalSurfaceVector,
    SurfaceError,
    boundary_weight,
    compatible,
    edge_class_crossings,
    euler_characteristic,
    haken_sum,
    parse_surface,
    serialize_surface,
    surface_from_dict,
    surface_to_dict,
    validate_surface,
    vertex_link,
    weight,
)

from corpus import CLOSED, TRIANGULATIONS, random_pair, surface, tri
from oracles import edge_classes, euler_from_cells, matching_matrix, vertex_classes


def _links(name):
    T = tri(name)
    return [vertex_link(T, u) for u in range(len(T.skeleta.vertex_classes))]


def test_empty_surface():
    for name in TRIANGULATIONS:
        T = tri(name)
        z = NormalSurfaceVector.zero(T.tet_count)
        assert validate_surface(z, T).ok
        assert weight(z, T) == 0
        assert euler_characteristic(z, T) == 0


def test_two_quad_types_violation():
    T = tri("doubled_tet.tri")
    v = NormalSurfaceVector((0, 0, 0, 0, 1, 1, 0) + (0,) * 7)
    rep = validate_surface(v, T)
    assert any("tetrahedron 0" in x and "quad" in x for x in rep.violations)


def test_dimension_mismatch():
    with pytest.raises(SurfaceError):
        validate_surface(NormalSurfaceVector((0,) * 7), tri("twotet.tri"))


def test_octagon_with_quads_rejected():
    T = tri("unglued.tri")
    s = AlmostNormalSurface(NormalSurfaceVector((0, 0, 0, 0, 1, 0, 0)), AlmostNormalPiece(0, "oct1"))
    assert not validate_surface(s, T).ok


def test_at_most_one_piece():
    text = "surface x\ntet 0 : 0 0 0 0 | 0 0 0\npiece 0 oct0\npiece 0 oct1\n"
    with pytest.raises(SurfaceError):
        parse_surface(text)


@pytest.mark.parametrize("name", CLOSED)
def test_vertex_links(name):
    T = tri(name)
    rows = matching_matrix(T)
    labels = vertex_classes(T)
    ecls = edge_classes(T)
    for u, link in enumerate(_links(name)):
        assert validate_surface(link, T).ok
        assert all(sum(r * x for r, x in zip(row, link.coords)) == 0 for row in rows)
        assert euler_characteristic(link, T) == 2 == euler_from_cells(T, link.coords)
        # one crossing per edge-class endpoint at u
        corners = {k for k, lab in labels.items() if lab == labels[T.skeleta.vertex_classes[u][0]]}
        ends = 0
        for cls in set(ecls.values()):
            a, e = cls
            ends += sum((a, c) in corners for c in EDGES[e])
        assert weight(link, T) == ends
        doubled = haken_sum(link, link, T)
        assert euler_characteristic(doubled, T) == 4
        assert doubled.coords == tuple(2 * x for x in link.coords)


def test_boundary_weight():
    T = tri("unglued.tri")
    v = NormalSurfaceVector((1, 0, 0, 0, 0, 0, 0))
    assert boundary_weight(v, T) == 3
    assert boundary_weight(_links("twotet.tri")[0], tri("twotet.tri")) == 0


def test_compatibility_examples():
    z = NormalSurfaceVector.zero(1)
    q0 = NormalSurfaceVector((0, 0, 0, 0, 1, 0, 0))
    q1 = NormalSurfaceVector((0, 0, 0, 0, 0, 2, 0))
    assert compatible(z, q1) and compatible(q0, q0)
    assert not compatible(q0, q1)
    with pytest.raises(SurfaceError):
        haken_sum(q0, q1)


def test_splitting_euler_by_parts():
    T = tri("twotet.tri")
    H = surface("twotet_splitting.srf")
    sphere = surface("twotet_sphere.srf")
    link = _links("twotet.tri")[0]
    assert validate_surface(H, T).ok
    assert H.base.coords == tuple(a + 3 * b for a, b in zip(sphere.base.coords, link.coords))
    assert euler_characteristic(H, T) == euler_characteristic(sphere, T) + 3 * euler_characteristic(link, T) == 8


@pytest.mark.parametrize("name", ["onetet_splitting.srf", "twotet_splitting.srf", "twotet_sphere.srf"])
def test_surface_formats_roundtrip(name):
    s = surface(name)
    assert parse_surface(serialize_surface(s)) == s
    assert surface_from_dict(surface_to_dict(s)) == s


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10**6), which=st.sampled_from(TRIANGULATIONS))
def test_sum_laws_and_additivity(seed, which):
    rng = random.Random(seed)
    T = tri(which)
    J, K = random_pair(rng, which)
    F = haken_sum(J, K, T)
    assert validate_surface(F, T).ok
    assert haken_sum(K, J, T).coords == F.coords
    assert haken_sum(J, NormalSurfaceVector.zero(T.tet_count), T).coords == J.coords
    assert haken_sum(F, J, T).coords == haken_sum(J, haken_sum(K, J, T), T).coords
    assert weight(F, T) == weight(J, T) + weight(K, T)
    assert euler_characteristic(F, T) == euler_characteristic(J, T) + euler_characteristic(K, T)
    assert euler_characteristic(F, T) == euler_from_cells(T, F.coords)
    if not T.is_closed:
        assert boundary_weight(F, T) == boundary_weight(J, T) + boundary_weight(K, T)
    # every representative of an edge class sees the same number of crossings
    edge_class_crossings(F, T)
