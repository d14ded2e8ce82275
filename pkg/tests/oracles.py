"""Independent reference computations used by the tests.

Nothing here imports the algorithms it checks; the matching matrix is
rebuilt from face arcs and extreme rays are found by linear algebra over
sympy's rationals.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd

from sympy import Matrix

from normkit.tri import EDGES, face_vertices

# normal arcs in face f cutting off corner v, for each disk type
_TRI_ARCS = {v: {(f, v) for f in range(4) if f != v} for v in range(4)}
_QUADS = ((0, 1), (0, 2), (0, 3))  # quad k separates {0, k+1} from the rest


def _quad_arcs(k):
    a, b = _QUADS[k]
    other = [x for x in range(4) if x not in (a, b)]
    arcs = set()
    for f in range(4):
        corners = set(face_vertices(f))
        # the quad meets face f in one arc cutting off the corner of f that
        # is alone on its side
        side1 = corners & {a, b}
        side2 = corners & set(other)
        lone = side1 if len(side1) == 1 else side2
        arcs.add((f, lone.pop()))
    return arcs


def disk_arcs(col):
    return _TRI_ARCS[col] if col < 4 else _quad_arcs(col - 4)


def matching_matrix(tri):
    n = 7 * tri.tet_count
    rows = []
    seen = set()
    for (a, f), (b, g, p) in sorted(tri.gluings.items()):
        if (b, g) in seen:
            continue
        seen.add((a, f))
        for v in face_vertices(f):
            row = [0] * n
            for c in range(7):
                if (f, v) in disk_arcs(c):
                    row[7 * a + c] += 1
                if (g, p[v]) in disk_arcs(c):
                    row[7 * b + c] -= 1
            rows.append(row)
    return rows


def admissible_supports(t):
    """Column sets with at most one quad type per tetrahedron."""
    per_tet = []
    for a in range(t):
        opts = []
        for tris in product((0, 1), repeat=4):
            base = [7 * a + v for v in range(4) if tris[v]]
            opts.append(base)
            opts += [base + [7 * a + 4 + k] for k in range(3)]
        per_tet.append(opts)
    for combo in product(*per_tet):
        cols = [c for part in combo for c in part]
        if cols:
            yield cols


def brute_force_vertex_surfaces(tri, cap=6):
    """Admissible extreme rays of the matching cone with every coordinate <= cap.

    A ray with support S is extreme exactly when the matching matrix
    restricted to S has a one dimensional kernel spanned by a vector that
    is positive on all of S.
    """
    rows = matching_matrix(tri)
    n = 7 * tri.tet_count
    out = set()
    for cols in admissible_supports(tri.tet_count):
        if rows:
            M = Matrix([[r[c] for c in cols] for r in rows])
            kernel = M.nullspace()
        else:
            kernel = [Matrix([1])] if len(cols) == 1 else [None, None]
        if len(kernel) != 1:
            continue
        k = kernel[0]
        if all(x < 0 for x in k):
            k = -k
        if not all(x > 0 for x in k):
            continue
        den = 1
        for x in k:
            den = den * x.q // gcd(den, x.q)
        ints = [int(x * den) for x in k]
        g = 0
        for x in ints:
            g = gcd(g, x)
        vec = [0] * n
        for c, x in zip(cols, ints):
            vec[c] = x // g
        if max(vec) <= cap:
            out.add(tuple(vec))
    return out


def euler_from_cells(tri, coords):
    """chi = V - E + F counted from disks, face arcs and edge points.

    Each normal arc lies on a face shared by two tetrahedra (or one on the
    boundary); each edge point is shared by all tetrahedra around its edge
    class.  Points and arcs are counted per tetrahedron and divided by the
    number of tetrahedron slots they occupy.
    """

    cls = edge_classes(tri)
    size = {}
    for c in cls.values():
        size[c] = size.get(c, 0) + 1
    F = sum(coords)
    E = Fraction(0)
    V = Fraction(0)
    for a in range(tri.tet_count):
        x = coords[7 * a:7 * a + 7]
        for f in range(4):
            share = 2 if tri.partner(a, f) else 1
            for c in range(7):
                for ff, _ in disk_arcs(c):
                    if ff == f:
                        E += Fraction(x[c], share)
        for e, (i, j) in enumerate(EDGES):
            cross = x[i] + x[j] + sum(x[4 + k] for k in range(3)
                                      if len({i, j} & set(_QUADS[k])) == 1)
            V += Fraction(cross, size[cls[(a, e)]])
    return V - E + F


def edge_classes(tri):
    """(tet, edge index) -> class label, by repeated relabelling."""
    label = {(a, e): (a, e) for a in range(tri.tet_count) for e in range(6)}
    changed = True
    while changed:
        changed = False
        for (a, f), (b, g, p) in tri.gluings.items():
            for e, (i, j) in enumerate(EDGES):
                if f in (i, j):
                    continue
                img = tuple(sorted((p[i], p[j])))
                e2 = EDGES.index(img)
                lo = min(label[(a, e)], label[(b, e2)])
                for key in ((a, e), (b, e2)):
                    if label[key] != lo:
                        label[key] = lo
                        changed = True
    return label


def _bary(a, e, p):
    """Point at parameter p from the lower corner of edge e of tet a."""
    i, j = EDGES[e]
    w = [Fraction(0)] * 4
    w[i] += 1 - p
    w[j] += p
    return tuple(w)


def _segments_cross(P0, P1, Q0, Q1, drop):
    """Exact crossing of two chords of one face, in barycentric coordinates."""
    keep = [c for c in range(4) if c != drop][:2]
    px, py = P0[keep[0]], P0[keep[1]]
    rx, ry = P1[keep[0]] - px, P1[keep[1]] - py
    qx, qy = Q0[keep[0]], Q0[keep[1]]
    sx, sy = Q1[keep[0]] - qx, Q1[keep[1]] - qy
    den = rx * sy - ry * sx
    if den == 0:
        return None
    t = ((qx - px) * sy - (qy - py) * sx) / den
    u = ((qx - px) * ry - (qy - py) * rx) / den
    if not (0 < t < 1 and 0 < u < 1):
        return None
    return tuple(P0[c] + t * (P1[c] - P0[c]) for c in range(4))


def _global_point(tri, a, f, w):
    """Canonical name of a point on face f of tet a, shared by the glued face."""
    keys = [(a, f, w)]
    glued = tri.gluings.get((a, f))
    if glued:
        b, g, p = glued
        w2 = [Fraction(0)] * 4
        for v in range(4):
            w2[p[v]] = w[v]
        keys.append((b, g, tuple(w2)))
    return min(keys)


def stitched_curves(geo):
    """(closed, open) curve counts of J ∩ K from pairwise disk arc crossings.

    Returns None if some J disk and K disk meet in more than two points,
    since the pairing inside the tetrahedron is then not forced.
    """
    tri = geo.tri
    adj = {}
    for a in range(tri.tet_count):
        stacks = {S: geo.R[S].disks[a] for S in "JK"}
        chords = {}
        for S in "JK":
            for di, d in enumerate(stacks[S]):
                nv = len(d.vertices)
                for i, (f, _, _) in enumerate(d.arcs):
                    (e0, p0), (e1, p1) = d.vertices[i], d.vertices[(i + 1) % nv]
                    P0 = _bary(a, e0, geo.param(S, a, e0, p0))
                    P1 = _bary(a, e1, geo.param(S, a, e1, p1))
                    chords.setdefault((S, f), []).append((di, P0, P1))
        meet = {}
        for f in range(4):
            for dj, P0, P1 in chords.get(("J", f), []):
                for dk, Q0, Q1 in chords.get(("K", f), []):
                    X = _segments_cross(P0, P1, Q0, Q1, f)
                    if X is not None:
                        meet.setdefault((dj, dk), []).append(_global_point(tri, a, f, X))
        for pts in meet.values():
            if len(pts) != 2:
                return None
            x, y = pts
            adj.setdefault(x, []).append(y)
            adj.setdefault(y, []).append(x)
    seen = set()
    closed = opened = 0
    for start in sorted(adj):
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if any(len(adj[x]) == 1 for x in comp):
            opened += 1
        else:
            closed += 1
    return closed, opened


def vertex_classes(tri):
    label = {(a, v): (a, v) for a in range(tri.tet_count) for v in range(4)}
    changed = True
    while changed:
        changed = False
        for (a, f), (b, g, p) in tri.gluings.items():
            for v in range(4):
                if v == f:
                    continue
                lo = min(label[(a, v)], label[(b, p[v])])
                for key in ((a, v), (b, p[v])):
                    if label[key] != lo:
                        label[key] = lo
                        changed = True
    return label


def euler_of_triangulation(tri):
    V = len(set(vertex_classes(tri).values()))
    E = len(set(edge_classes(tri).values()))
    F = (4 * tri.tet_count + (4 * tri.tet_count - len(tri.gluings))) // 2
    return V - E + F - tri.tet_count


def _parity(p):
    inv = sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j])
    return -1 if inv % 2 else 1


def orientable_by_search(tri):
    """Try every assignment of tetrahedron orientations."""
    for signs in product((1, -1), repeat=tri.tet_count):
        if all(signs[a] * signs[b] * _parity(p) == -1 for (a, f), (b, g, p) in tri.gluings.items()):
            return True
    return False
