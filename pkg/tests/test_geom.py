from collections import Counter
from fractions import Fraction

import pytest

from normkit.geom import (
    _curve_record,
    band_kind,
    classify_bands,
    curve_components,
    disk_patch_diagnostic,
    irregular_exchange_weights,
    parallel_families_consecutive,
    realization_violations,
    realize,
    regular_switch,
    surface_components,
    trace_intersections,
)
from normkit.nsurf import NormalSurfaceVector, euler_characteristic, haken_sum, vertex_link
from normkit.tri import EDGES

from corpus import CLOSED, SPLITTINGS, TRIANGULATIONS, pair_stream, surface, tri, vertex_surfaces
from oracles import _bary, _global_point, stitched_curves, vertex_classes

PAIRS = list(pair_stream(11, 60))


def _face_arcs(r, a, f, param):
    out = set()
    for d in r.disks[a]:
        for i, (ff, _, _) in enumerate(d.arcs):
            if ff != f:
                continue
            ends = [d.vertices[i], d.vertices[(i + 1) % len(d.vertices)]]
            out.add(frozenset(_global_point(r.tri, a, f, _bary(a, e, param(a, e, pos))) for e, pos in ends))
    return out


def _check_face_matching(r):
    for (a, f), (b, g, _) in r.tri.gluings.items():
        assert _face_arcs(r, a, f, r.param) == _face_arcs(r, b, g, r.param)


def _all_surfaces():
    for n in TRIANGULATIONS:
        for v in vertex_surfaces(n):
            yield n, v
    for n, s in SPLITTINGS:
        yield n, surface(s)
    for n, J, K in PAIRS[:20]:
        yield n, haken_sum(J, K)


@pytest.mark.parametrize("n,s", list(_all_surfaces()))
def test_realize_roundtrip(n, s):
    T = tri(n)
    r = realize(s, T)
    assert not realization_violations(r)
    base = s.base if hasattr(s, "base") else s
    assert r.coords().coords == base.coords
    assert parallel_families_consecutive(r)
    _check_face_matching(r)


def test_empty_realization():
    T = tri("twotet.tri")
    r = realize(NormalSurfaceVector.zero(2), T)
    assert r.disk_count == 0 and not realization_violations(r)


@pytest.mark.parametrize("name", CLOSED)
def test_vertex_link_parameters(name):
    T = tri(name)
    labels = vertex_classes(T)
    for u in range(len(T.skeleta.vertex_classes)):
        for k in (1, 2):
            link = NormalSurfaceVector(tuple(k * x for x in vertex_link(T, u).coords))
            r = realize(link, T)
            mine = labels[T.skeleta.vertex_classes[u][0]]
            for a, stack in enumerate(r.disks):
                for d in stack:
                    v = d.dtype[1]
                    for e, pos in d.vertices:
                        i, j = EDGES[e]
                        # crossings on this edge: k per endpoint lying in the class
                        n = k * sum(labels[(a, c)] == mine for c in (i, j))
                        assert r.edge_counts[a][e] == n
                        # copies nearest the cut-off corner come first
                        depth = pos if v == i else n - 1 - pos
                        assert depth == d.copy
                        assert r.param(a, e, pos) == Fraction(pos + 1, n + 1)
            assert parallel_families_consecutive(r)
            assert len(surface_components(r)) == k


@pytest.mark.parametrize("n,J,K", PAIRS)
def test_trace_matches_stitcher(n, J, K):
    T = tri(n)
    curves = trace_intersections(realize(J, T), realize(K, T))
    expect = stitched_curves(curves.geometry)
    assert expect is not None
    assert (sum(c.closed for c in curves), sum(not c.closed for c in curves)) == expect


@pytest.mark.parametrize("n,J,K", PAIRS[:30])
def test_trace_swap_symmetry(n, J, K):
    T = tri(n)
    Jr, Kr = realize(J, T), realize(K, T)
    ab = trace_intersections(Jr, Kr)
    ba = trace_intersections(Kr, Jr)
    assert len(ab) == len(ba)
    flip = Counter((c.closed, tuple((a, kl, jl) for a, jl, kl, _ in c.itinerary), c.orientation_K) for c in ab)
    back = Counter((c.closed, tuple((a, jl, kl) for a, jl, kl, _ in c.itinerary), c.orientation_J) for c in ba)
    assert flip == back


def test_empty_and_parallel_give_no_curves():
    for n in CLOSED:
        T = tri(n)
        z = realize(NormalSurfaceVector.zero(T.tet_count), T)
        for v in vertex_surfaces(n):
            r = realize(v, T)
            assert trace_intersections(z, r) == []
            assert trace_intersections(r, r) == []
            Fr = regular_switch(z, r)
            assert Fr.coords().coords == v.coords


@pytest.mark.parametrize("n,J,K", PAIRS)
def test_switch_equals_sum(n, J, K):
    T = tri(n)
    Jr, Kr = realize(J, T), realize(K, T)
    curves = trace_intersections(Jr, Kr)
    report = classify_bands(curves)
    Fr = regular_switch(Jr, Kr, report, curves)
    assert Fr.coords().coords == haken_sum(J, K, T).coords
    assert not realization_violations(Fr)


def test_doubled_link_by_switch():
    T = tri("twotet.tri")
    link = vertex_link(T, 0)
    r = realize(link, T)
    assert regular_switch(r, r).coords().coords == tuple(2 * x for x in link.coords)


@pytest.mark.parametrize("n,J,K", PAIRS)
def test_band_rule_and_seams(n, J, K):
    T = tri(n)
    curves = trace_intersections(realize(J, T), realize(K, T))
    report = classify_bands(curves)
    for c in report.curves:
        assert report.kinds[c.id] == band_kind(c)
        if not c.closed:
            assert report.kinds[c.id] == "rectangle"
        else:
            # corpus surfaces are orientable, so every band is an annulus
            assert report.kinds[c.id] == "annulus"
    assert all(s["core"] != "reversing" for s in report.seams)


@pytest.mark.parametrize("n,J,K", PAIRS[:30])
def test_orientation_independent_of_start(n, J, K):
    T = tri(n)
    curves = trace_intersections(realize(J, T), realize(K, T))
    geo = curves.geometry
    for cid, (closed, entries) in enumerate(curve_components(geo)):
        if not closed:
            continue
        first, _ = _curve_record(geo, cid, True, entries)
        for k in range(1, len(entries)):
            again, _ = _curve_record(geo, cid, True, entries[k:] + entries[:k])
            assert (again.orientation_J, again.orientation_K) == (first.orientation_J, first.orientation_K)
            assert band_kind(again) == band_kind(first)


def test_rectangles_on_unglued_tet():
    kinds = Counter()
    for n, J, K in PAIRS:
        if n == "unglued.tri":
            T = tri(n)
            report = classify_bands(trace_intersections(realize(J, T), realize(K, T)))
            kinds.update(report.kinds.values())
    assert kinds["rectangle"] > 0 and kinds["annulus"] == 0


@pytest.mark.parametrize("n,J,K", PAIRS)
def test_patch_euler_count(n, J, K):
    T = tri(n)
    curves = trace_intersections(realize(J, T), realize(K, T))
    report = classify_bands(curves)
    arcs = sum(not c.closed for c in curves)
    # cutting along an arc raises chi by one on each surface, along a circle by nothing
    total = sum(p.euler_characteristic for p in report.patches)
    assert total == euler_characteristic(J, T) + euler_characteristic(K, T) + 2 * arcs
    disks = disk_patch_diagnostic(report)
    assert all(p.euler_characteristic == 1 and p.boundary_count == 1 for p in disks)


def test_disk_patch_diagnostic_examples():
    T = tri("twotet.tri")
    z = realize(NormalSurfaceVector.zero(2), T)
    link = realize(vertex_link(T, 0), T)
    assert disk_patch_diagnostic(classify_bands(trace_intersections(z, link))) == []
    # two disjoint corner triangles of the unglued tetrahedron are disks
    U = tri("unglued.tri")
    a = realize(NormalSurfaceVector((1, 0, 0, 0, 0, 0, 0)), U)
    b = realize(NormalSurfaceVector((0, 1, 0, 0, 0, 0, 0)), U)
    report = classify_bands(trace_intersections(a, b))
    assert [p.id for p in disk_patch_diagnostic(report)] == ["J0", "K0"]


@pytest.mark.parametrize("n,J,K", PAIRS)
def test_irregular_exchange_preserves_weight(n, J, K):
    T = tri(n)
    curves = trace_intersections(realize(J, T), realize(K, T))
    for c in curves:
        if c.closed:
            w = irregular_exchange_weights(curves, c.id)
            assert w["weight_F_prime"] == w["weight_F"]


def test_irregular_exchange_symmetric():
    T = tri("doubled_tet.tri")
    quad = NormalSurfaceVector((0, 0, 0, 0, 1, 0, 0) * 2)
    link = vertex_link(T, 0)
    out = []
    for J, K in ((quad, link), (link, quad)):
        curves = trace_intersections(realize(J, T), realize(K, T), reduce=False)
        closed = [c for c in curves if c.closed]
        assert closed
        out.append([irregular_exchange_weights(curves, c.id)["components"] for c in closed])
    assert out[0] == out[1]
