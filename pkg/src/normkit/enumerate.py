"""Vertex normal surfaces by double description over the matching cone.

Vertex surfaces (extreme rays of the admissible part of the cone) stand in
for fundamental surfaces here; the full Hilbert basis is not computed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .nsurf import NormalSurfaceVector, disk_arcs, validate_surface, weight, euler_characteristic
from .tri import Triangulation, face_vertices
from . import bounds


@dataclass(frozen=True)
class MatchingSystem:
    rows: tuple[tuple[int, ...], ...]
    columns: int
    # per tetrahedron, the three quad column indices
    quad_columns: tuple[tuple[int, int, int], ...]

    def apply(self, coords) -> list[int]:
        return [sum(r * x for r, x in zip(row, coords)) for row in self.rows]

    def admissible(self, coords) -> bool:
        return all(sum(1 for c in cols if coords[c]) <= 1 for cols in self.quad_columns)


def _arc_column(a: int, f: int, v: int) -> dict[int, int]:
    col = {}
    for v2 in range(4):
        if (f, v) in disk_arcs(("t", v2)):
            col[7 * a + v2] = col.get(7 * a + v2, 0) + 1
    for k in range(3):
        if (f, v) in disk_arcs(("q", k)):
            col[7 * a + 4 + k] = col.get(7 * a + 4 + k, 0) + 1
    return col


def build_matching_system(tri: Triangulation) -> MatchingSystem:
    n = 7 * tri.tet_count
    rows = []
    for (a, f), (b, g, p) in sorted(tri.gluings.items()):
        if (a, f) > (b, g):
            continue
        for v in face_vertices(f):
            row = [0] * n
            for c, m in _arc_column(a, f, v).items():
                row[c] += m
            for c, m in _arc_column(b, g, p[v]).items():
                row[c] -= m
            rows.append(tuple(row))
    quads = tuple((7 * a + 4, 7 * a + 5, 7 * a + 6) for a in range(tri.tet_count))
    return MatchingSystem(tuple(rows), n, quads)


def _primitive(v: list[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def extreme_rays(system: MatchingSystem) -> list[tuple[int, ...]]:
    """Extreme rays of {x >= 0, Ax = 0}, each as a primitive integer vector.

    Plain double description: start from the orthant's unit rays and cut by
    one hyperplane at a time, combining adjacent +/- pairs.  Adjacency uses
    the combinatorial zero-set test, which is exact for pointed cones.
    """
    n = system.columns
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    for row in system.rows:
        if not any(row):
            continue
        vals = [sum(r * x for r, x in zip(row, ray)) for ray in rays]
        zero = [r for r, s in zip(rays, vals) if s == 0]
        pos = [(r, s) for r, s in zip(rays, vals) if s > 0]
        neg = [(r, s) for r, s in zip(rays, vals) if s < 0]
        zsets = [frozenset(i for i, x in enumerate(r) if x == 0) for r in rays]
        new = list(zero)
        for rp, sp in pos:
            zp = frozenset(i for i, x in enumerate(rp) if x == 0)
            for rn, sn in neg:
                zn = frozenset(i for i, x in enumerate(rn) if x == 0)
                common = zp & zn
                adjacent = True
                for other, zo in zip(rays, zsets):
                    if other is rp or other is rn:
                        continue
                    if common <= zo:
                        adjacent = False
                        break
                if adjacent:
                    new.append(_primitive([sp * y - sn * x for x, y in zip(rp, rn)]))
        rays = sorted(set(new))
    return rays


@dataclass
class EnumerationResult:
    surfaces: list[NormalSurfaceVector]
    complete: bool
    skipped: int = 0


def enumerate_vertex_surfaces(tri: Triangulation, cap: int = 1000) -> EnumerationResult:
    """Admissible vertex surfaces with every coordinate at most ``cap``.

    Vertex surfaces exceeding the cap are dropped and the result is marked
    incomplete.
    """
    system = build_matching_system(tri)
    out = []
    skipped = 0
    for ray in extreme_rays(system):
        if not system.admissible(ray):
            continue
        if max(ray) > cap:
            skipped += 1
            continue
        out.append(ray)
    out.sort(key=lambda r: (sum(r), r))
    surfaces = [NormalSurfaceVector(r, f"v{i}") for i, r in enumerate(out)]
    for s in surfaces:
        report = validate_surface(s, tri)
        if not report.ok:
            raise AssertionError(f"enumerated vector fails validation: {report.violations}")
    return EnumerationResult(surfaces, skipped == 0, skipped)


def check_fundamental_bounds(v, tri: Triangulation) -> dict:
    """Weight and Euler characteristic against the 2^(14 n) fundamental-surface bound."""
    limit = bounds.fundamental_bounds(tri.tet_count).value.expand()
    w = weight(v, tri)
    chi = euler_characteristic(v, tri)
    return {
        "bound": limit,
        "weight": w,
        "euler_characteristic": chi,
        "weight_ok": w <= limit,
        "weight_margin": limit - w,
        "euler_ok": chi >= -limit,
        "euler_margin": chi + limit,
        "ok": w <= limit and chi >= -limit,
    }
