"""Search small closed triangulations for examples worth bundling.

For each closed orientable 1- and 2-tetrahedron gluing whose vertex links
are spheres, enumerate vertex normal surfaces and almost normal surfaces
(extreme rays of the cone with octagon columns, one octagon), and report
the connected separating almost normal ones with their block statistics.

    python3 scripts/find_corpus.py --tets 2 --limit 20
"""

from __future__ import annotations

import argparse
import itertools
import sys

from normkit.blocks import BlockError, count_core_blocks, decompose_blocks
from normkit.enumerate import build_matching_system, extreme_rays, MatchingSystem
from normkit.geom import realize, surface_components
from normkit.nsurf import (
    AlmostNormalPiece,
    AlmostNormalSurface,
    NormalSurfaceVector,
    disk_arcs,
    euler_characteristic,
    validate_surface,
    vertex_link,
)
from normkit.tri import ALL_PERMS, Triangulation, face_vertices, serialize_triangulation, validate


def pairings(items):
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for p in pairings(rest):
            yield [(first, items[i])] + p


def closed_triangulations(t: int):
    slots = [(a, f) for a in range(t) for f in range(4)]
    for pairing in pairings(slots):
        for perms in itertools.product(range(len(ALL_PERMS)), repeat=len(pairing)):
            gluings = {}
            ok = True
            for ((a, f), (b, g)), pi in zip(pairing, perms):
                p = ALL_PERMS[pi]
                if p[f] != g:
                    ok = False
                    break
                inv = [0] * 4
                for i, x in enumerate(p):
                    inv[x] = i
                gluings[(a, f)] = (b, g, p)
                gluings[(b, g)] = (a, f, tuple(inv))
            if ok:
                yield Triangulation(t, gluings)


def is_manifold(tri: Triangulation) -> bool:
    rep = validate(tri)
    if not rep.ok or not rep.orientable or rep.euler_characteristic != 0:
        return False
    # connectivity of the dual graph
    seen, todo = {0}, [0]
    while todo:
        a = todo.pop()
        for f in range(4):
            b = tri.gluings[(a, f)][0]
            if b not in seen:
                seen.add(b)
                todo.append(b)
    if len(seen) != tri.tet_count:
        return False
    return all(euler_characteristic(vertex_link(tri, v), tri) == 2 for v in range(len(tri.skeleta.vertex_classes)))


def almost_normal_rays(tri: Triangulation) -> list[AlmostNormalSurface]:
    base = build_matching_system(tri)
    t = tri.tet_count
    n = 7 * t + 3 * t
    rows = []
    k = 0
    for (a, f), (b, g, p) in sorted(tri.gluings.items()):
        if (a, f) > (b, g):
            continue
        for v in face_vertices(f):
            row = list(base.rows[k]) + [0] * (3 * t)
            k += 1
            for o in range(3):
                row[7 * t + 3 * a + o] += disk_arcs(("o", o)).count((f, v))
                row[7 * t + 3 * b + o] -= disk_arcs(("o", o)).count((g, p[v]))
            rows.append(tuple(row))
    system = MatchingSystem(tuple(rows), n, base.quad_columns)
    out = []
    for ray in extreme_rays(system):
        octs = ray[7 * t:]
        if sum(octs) != 1:
            continue
        idx = octs.index(1)
        a, o = divmod(idx, 3)
        if any(ray[7 * a + 4 + q] for q in range(3)):
            continue
        if not system.admissible(ray[: 7 * t]):
            continue
        s = AlmostNormalSurface(NormalSurfaceVector(tuple(ray[: 7 * t])), AlmostNormalPiece(a, f"oct{o}"))
        if validate_surface(s, tri).ok:
            out.append(s)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tets", type=int, default=1)
    ap.add_argument("--limit", type=int, default=10)
    args = ap.parse_args(argv)
    seen_keys = set()
    found = 0
    for tri in closed_triangulations(args.tets):
        if not is_manifold(tri):
            continue
        key = (tuple(sorted(tri.skeleta.edge_degrees)), len(tri.skeleta.vertex_classes))
        for s in almost_normal_rays(tri):
            r = realize(s, tri)
            if len(surface_components(r)) != 1:
                continue
            try:
                V, W = decompose_blocks(r)
            except BlockError:
                continue
            chi = euler_characteristic(s, tri)
            k2 = key + (s.base.coords, s.exceptional.kind)
            if k2 in seen_keys:
                continue
            seen_keys.add(k2)
            prod = [sum(b.is_product for b in X.blocks) for X in (V, W)]
            print(f"# degrees {key} chi={chi} coords={s.base.coords} piece={s.exceptional.tet}:{s.exceptional.kind} "
                  f"products V/W={prod} cores V/W={count_core_blocks(V)}/{count_core_blocks(W)}")
            print(serialize_triangulation(tri))
            found += 1
            if found >= args.limit:
                return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
