"""Straight-disk realizations and the exchange analysis of Haken sums.

Every disk is a polygon whose corners sit on tetrahedron edges at exact
rational parameters.  Along each edge the crossings are ordered from the
lower corner ``i``: first the triangles cutting off ``i``, then the middle
disks (quads, or an octagon), then the triangles cutting off the upper
corner.  The ``p``-th crossing of ``N`` sits at parameter ``(p + 1)/(N + 1)``,
which is symmetric under reversing the edge, so glued faces agree exactly.

For a sum ``J + K`` the disks of ``K`` are displaced by ``±eps`` along each
edge class.  The signs are chosen to keep normally parallel copies disjoint
and are then improved greedily to reduce the number of face crossings.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .nsurf import (
    AlmostNormalSurface,
    DiskType,
    QUAD_PAIRS,
    NormalSurfaceVector,
    SurfaceError,
    compatible,
    disk_arcs,
    disk_counts,
    disk_crossings,
    edge_crossings_in_tet,
    haken_sum,
    quad_partner,
    validate_surface,
    weight,
)
from .tri import EDGE_INDEX, EDGES, Triangulation, UnionFind, face_vertices

log = logging.getLogger(__name__)

DISK_ORDER: tuple[DiskType, ...] = (
    ("t", 0), ("t", 1), ("t", 2), ("t", 3), ("q", 0), ("q", 1), ("q", 2), ("o", 0), ("o", 1), ("o", 2),
)


class GeometryError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def disk_polygon(d: DiskType) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
    """Corners ``(edge, near)`` of a disk in boundary order and the arcs between them.

    ``near`` is -1 for an edge crossed once; an edge crossed twice has one
    corner near each of its endpoints.  Arc ``i`` is ``(face, corner cut off)``
    and joins corner ``i`` to corner ``i + 1``.
    """
    crossings = disk_crossings(d)
    adj: dict[tuple[int, int], list] = {}
    for e, n in sorted(crossings.items()):
        i, j = EDGES[e]
        for corner in ([(e, -1)] if n == 1 else [(e, i), (e, j)]):
            adj[corner] = []

    def corner_on(v: int, x: int) -> tuple[int, int]:
        e = EDGE_INDEX[(v, x)]
        return (e, -1) if crossings[e] == 1 else (e, v)

    for f, v in disk_arcs(d):
        x, y = [u for u in face_vertices(f) if u != v]
        p, q = corner_on(v, x), corner_on(v, y)
        adj[p].append(((f, v), q))
        adj[q].append(((f, v), p))
    start = min(adj)
    corners, arcs = [start], []
    prev, cur = None, start
    while True:
        arc, nxt = min(x for x in adj[cur] if x[0] != prev)
        arcs.append(arc)
        if nxt == start:
            break
        corners.append(nxt)
        prev, cur = arc, nxt
    if len(corners) != len(adj):
        raise GeometryError(f"disk {d} boundary is not a single cycle")
    return tuple(corners), tuple(arcs)


def _position(d: DiskType, m: int, e: int, near: int, counts: dict, n: int) -> int:
    """Position (from the lower corner) of copy ``m`` of ``d`` on edge ``e``."""
    i, j = EDGES[e]
    kind, x = d
    ti = counts.get(("t", i), 0)
    if kind == "t":
        return m if x == i else n - 1 - m
    if kind == "q":
        q = counts[d]
        zero_side = (0, quad_partner(x, 0))
        return ti + m if i in zero_side else ti + q - 1 - m
    return ti if near in (-1, i) else ti + 1


@dataclass(frozen=True)
class PlacedDisk:
    tet: int
    dtype: DiskType
    copy: int
    # (tet edge, position from its lower corner), in boundary order
    vertices: tuple[tuple[int, int], ...]
    # (face, corner cut off, index of the arc counted from that corner); arc i joins vertices i and i+1
    arcs: tuple[tuple[int, int, int], ...]
    piece: bool = False

    @property
    def label(self) -> str:
        return f"{self.tet}:{self.dtype[0]}{self.dtype[1]}.{self.copy}"


@dataclass(frozen=True)
class GeometricRealization:
    tri: Triangulation
    surface: object
    disks: tuple[tuple[PlacedDisk, ...], ...]
    # crossings per (tet, edge)
    edge_counts: tuple[tuple[int, ...], ...]

    def param(self, tet: int, e: int, pos: int) -> Fraction:
        return Fraction(pos + 1, self.edge_counts[tet][e] + 1)

    def class_param(self, tet: int, e: int, pos: int) -> tuple[int, Fraction]:
        """Edge class and parameter measured in the class orientation."""
        ci, rev = self.tri.edge_class_of[(tet, e)]
        p = self.param(tet, e, pos)
        return ci, (1 - p if rev else p)

    def coords(self) -> NormalSurfaceVector:
        counts = [0] * (7 * self.tri.tet_count)
        for stack in self.disks:
            for d in stack:
                if d.piece or d.dtype[0] == "o":
                    continue
                off = d.dtype[1] if d.dtype[0] == "t" else 4 + d.dtype[1]
                counts[7 * d.tet + off] += 1
        return NormalSurfaceVector(tuple(counts), getattr(self.surface, "name", None))

    def stack(self, tet: int) -> list[PlacedDisk]:
        return list(self.disks[tet])

    def arc_owner(self, tet: int) -> dict[tuple[int, int, int], PlacedDisk]:
        return {arc: d for d in self.disks[tet] for arc in d.arcs}

    @property
    def disk_count(self) -> int:
        return sum(len(s) for s in self.disks)


def realize(s, tri: Triangulation) -> GeometricRealization:
    """Place every disk of ``s`` as a straight polygon with rational corners."""
    report = validate_surface(s, tri)
    if not report.ok:
        raise SurfaceError("; ".join(report.violations))
    piece = s.exceptional if isinstance(s, AlmostNormalSurface) else None
    stacks, edge_counts = [], []
    for a in range(tri.tet_count):
        counts = disk_counts(s, a)
        if any(d[0] == "o" for d in counts) and any(d[0] == "q" for d in counts):
            raise GeometryError(f"tetrahedron {a}: octagon alongside quads has no straight realization")
        n = tuple(edge_crossings_in_tet(s, a, e) for e in range(6))
        piece_disks = list(piece.disks()) if piece is not None and piece.tet == a else []
        stack = []
        for d in DISK_ORDER:
            corners, arcs = disk_polygon(d)
            total = counts.get(d, 0)
            for m in range(total):
                verts = tuple((e, _position(d, m, e, near, counts, n[e])) for e, near in corners)
                placed_arcs = []
                for i, (f, v) in enumerate(arcs):
                    idx = set()
                    for e, pos in (verts[i], verts[(i + 1) % len(verts)]):
                        idx.add(pos if EDGES[e][0] == v else n[e] - 1 - pos)
                    if len(idx) != 1:
                        raise GeometryError(f"arc {(f, v)} of {d} copy {m} meets its edges at different depths")
                    placed_arcs.append((f, v, idx.pop()))
                # piece disks take the outermost copies of their type
                is_piece = m >= total - piece_disks.count(d)
                stack.append(PlacedDisk(a, d, m, verts, tuple(placed_arcs), is_piece))
        stacks.append(tuple(stack))
        edge_counts.append(n)
    return GeometricRealization(tri, s, tuple(stacks), tuple(edge_counts))


def realization_violations(r: GeometricRealization) -> list[str]:
    """Check disjointness data and the exact cross-face correspondence of arcs."""
    out = []
    tri = r.tri
    for a, stack in enumerate(r.disks):
        seen: dict[tuple[int, int], str] = {}
        for d in stack:
            for v in d.vertices:
                if v in seen:
                    out.append(f"tetrahedron {a}: disks {seen[v]} and {d.label} share edge point {v}")
                seen[v] = d.label
        for e in range(6):
            on_edge = sorted(pos for (ee, pos) in seen if ee == e)
            if on_edge != list(range(r.edge_counts[a][e])):
                out.append(f"tetrahedron {a} edge {e}: positions {on_edge} are not 0..{r.edge_counts[a][e] - 1}")
    for (a, f), (b, g, p) in sorted(tri.gluings.items()):
        if (a, f) > (b, g):
            continue
        mine = {}
        for d in r.disks[a]:
            for i, (ff, v, k) in enumerate(d.arcs):
                if ff == f:
                    ends = (d.vertices[i], d.vertices[(i + 1) % len(d.vertices)])
                    mine[(p[v], k)] = sorted(r.class_param(a, e, pos) for e, pos in ends)
        theirs = {}
        for d in r.disks[b]:
            for i, (ff, v, k) in enumerate(d.arcs):
                if ff == g:
                    ends = (d.vertices[i], d.vertices[(i + 1) % len(d.vertices)])
                    theirs[(v, k)] = sorted(r.class_param(b, e, pos) for e, pos in ends)
        if mine != theirs:
            out.append(f"faces ({a},{f}) and ({b},{g}): arc endpoints do not match")
    if r.coords().coords != _plain(r.surface).coords:
        out.append("disk counts differ from the surface coordinates")
    return out


def surface_components(r: GeometricRealization) -> list[list[str]]:
    """Connected components of the realized surface as lists of disk labels."""
    tri = r.tri
    uf = UnionFind(r.disk_count)
    index, owner = {}, {}
    for stack in r.disks:
        for d in stack:
            index[d.label] = len(index)
            for arc in d.arcs:
                owner[(d.tet, arc)] = d.label
    for (a, f), (b, g, p) in tri.gluings.items():
        for (tet, (ff, v, k)), label in owner.items():
            if tet == a and ff == f:
                uf.union(index[label], index[owner[(b, (g, p[v], k))]])
    # a tube joins its two disks
    for stack in r.disks:
        tubed = [index[d.label] for d in stack if d.piece and d.dtype[0] != "o"]
        for x in tubed[1:]:
            uf.union(tubed[0], x)
    labels = list(index)
    return [[labels[i] for i in c] for c in uf.classes()]


def _plain(s) -> NormalSurfaceVector:
    return s.base if isinstance(s, AlmostNormalSurface) else s


def parallel_families_consecutive(r: GeometricRealization) -> bool:
    """Disks of the same type occupy consecutive positions on every edge they cross."""
    for a, stack in enumerate(r.disks):
        for e in range(6):
            by_type: dict[DiskType, list[int]] = {}
            for d in stack:
                for ee, pos in d.vertices:
                    if ee == e:
                        by_type.setdefault(d.dtype, []).append(pos)
            for positions in by_type.values():
                positions = sorted(set(positions))
                if positions[-1] - positions[0] != len(positions) - 1:
                    return False
    return True


# ---------------------------------------------------------------------------
# Haken sums: placement of the second summand and intersection tracing


def _cyclic_coord(corners: tuple[int, int, int], i: int, j: int, p: Fraction) -> Fraction:
    """Position on the boundary circle of a face for a point at parameter ``p`` from ``i`` on edge ``ij``."""
    u0, u1, u2 = corners
    if (i, j) == (u0, u1):
        return p
    if (i, j) == (u1, u2):
        return 1 + p
    return 3 - p


def _plane_point(corners: tuple[int, int, int], i: int, j: int, p: Fraction) -> tuple[Fraction, Fraction]:
    u0, u1, u2 = corners
    pos = {u0: (Fraction(0), Fraction(0)), u1: (Fraction(1), Fraction(0)), u2: (Fraction(0), Fraction(1))}
    (xi, yi), (xj, yj) = pos[i], pos[j]
    return xi + p * (xj - xi), yi + p * (yj - yi)


def _cross(ax, ay, bx, by) -> Fraction:
    return ax * by - ay * bx


def _interleaved(a, b, c, d) -> bool:
    lo, hi = min(a, b), max(a, b)
    return (lo < c < hi) != (lo < d < hi)


def _noncrossing_matchings(items: list):
    """Non-crossing perfect matchings of points listed in circular order."""
    if not items:
        yield []
        return
    first = items[0]
    for k in range(1, len(items), 2):
        for inner in _noncrossing_matchings(items[1:k]):
            for outer in _noncrossing_matchings(items[k + 1:]):
                yield [(first, items[k])] + inner + outer


@dataclass(frozen=True)
class ExchangeCurve:
    id: int
    closed: bool
    # (tet, J disk label, K disk label, (start crossing, end crossing)) per segment
    itinerary: tuple
    orientation_J: str | None
    orientation_K: str | None
    # the regular corner keeps its label all the way round
    labels_consistent: bool = True

    @property
    def length(self) -> int:
        return len(self.itinerary)


class ExchangeCurves(list):
    """The traced curves; keeps the placement they were traced in."""

    geometry: "SumGeometry | None" = None


class SumGeometry:
    """Joint placement of two compatible normal surfaces and their intersection."""

    def __init__(self, Jr: GeometricRealization, Kr: GeometricRealization, eps: Fraction | None = None,
                 reduce: bool = True):
        self.tri = tri = Jr.tri
        self.R = {"J": Jr, "K": Kr}
        biggest = max([n for row in Jr.edge_counts for n in row] + [n for row in Kr.edge_counts for n in row] + [1])
        # any two distinct base parameters differ by at least 1/(biggest+1)^2
        self.eps = eps if eps is not None else Fraction(1, 4 * (biggest + 1) ** 2)
        self.reps = [members[0] for members in tri.skeleta.face_classes]
        self.to_rep: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
        for fc, members in enumerate(tri.skeleta.face_classes):
            b, g = members[0]
            self.to_rep[(b, g)] = (fc, (0, 1, 2, 3))
            for a, f in members[1:]:
                bb, gg, p = tri.gluings[(a, f)]
                assert (bb, gg) == (b, g)
                self.to_rep[(a, f)] = (fc, p)
        self.chords = {S: [self._face_chords(fc, S) for fc in range(len(self.reps))] for S in "JK"}
        self.signs: dict[tuple[int, int], int] = {}
        self._init_signs()
        self.initial_crossings = self.total_crossings()
        self.flips = 0
        if reduce:
            self._reduce()
        self.final_crossings = self.total_crossings()
        self._build()

    # -- placement ---------------------------------------------------------

    def _count(self, S: str, b: int, e: int) -> int:
        return self.R[S].edge_counts[b][e]

    def _face_chords(self, fc: int, S: str) -> dict[tuple[int, int], tuple[tuple[int, int], tuple[int, int]]]:
        b, g = self.reps[fc]
        out = {}
        for d in self.R[S].disks[b]:
            for i, (f, v, k) in enumerate(d.arcs):
                if f != g:
                    continue
                x, y = [u for u in face_vertices(g) if u != v]
                ends = []
                for u in (x, y):
                    e = EDGE_INDEX[(v, u)]
                    ends.append((e, k if v < u else self._count(S, b, e) - 1 - k))
                out[(v, k)] = tuple(ends)
        return out

    def _var(self, b: int, e: int, pos: int) -> tuple[int, int]:
        ci, rev = self.tri.edge_class_of[(b, e)]
        n = self._count("K", b, e)
        return ci, (n - 1 - pos if rev else pos)

    def param(self, S: str, b: int, e: int, pos: int) -> Fraction:
        """Parameter from the lower corner of tet ``b``'s edge ``e``."""
        n = self._count(S, b, e)
        base = Fraction(pos + 1, n + 1)
        if S == "J":
            return base
        ci, rev = self.tri.edge_class_of[(b, e)]
        cpos = n - 1 - pos if rev else pos
        cp = Fraction(cpos + 1, n + 1) + self.signs.get((ci, cpos), 1) * self.eps
        return 1 - cp if rev else cp

    def _init_signs(self) -> None:
        # K points riding on a J point get their side from the twin arcs
        variables = sorted({self._var(b, e, pos)
                            for fc, (b, g) in enumerate(self.reps)
                            for ends in self.chords["K"][fc].values() for e, pos in ends})
        index = {v: i for i, v in enumerate(variables)}
        uf = UnionFind(len(variables))
        for fc, (b, g) in enumerate(self.reps):
            for (w, l), kends in self.chords["K"][fc].items():
                for (v, k), jends in self.chords["J"][fc].items():
                    if v != w:
                        continue
                    if any(Fraction(kp + 1, self._count("K", b, e) + 1) != Fraction(jp + 1, self._count("J", b, e) + 1)
                           for (e, kp), (_, jp) in zip(kends, jends)):
                        continue
                    dirs = []
                    for e, kp in kends:
                        rev = self.tri.edge_class_of[(b, e)][1]
                        dirs.append((-1 if rev else 1) * (1 if EDGES[e][0] == w else -1))
                    a0, a1 = (index[self._var(b, e, kp)] for e, kp in kends)
                    uf.union(a0, a1, int(dirs[0] != dirs[1]))
        self._groups = [[variables[i] for i in c] for c in uf.classes()]
        for i, var in enumerate(variables):
            self.signs[var] = -1 if uf.find(i)[1] else 1
        self._faces_of_class: dict[int, set[int]] = {}
        for fc, (b, g) in enumerate(self.reps):
            for e in range(6):
                if g not in EDGES[e]:
                    self._faces_of_class.setdefault(self.tri.edge_class_of[(b, e)][0], set()).add(fc)

    def face_crossing_count(self, fc: int) -> int:
        b, g = self.reps[fc]
        corners = face_vertices(g)

        def coords(S, ends):
            return [_cyclic_coord(corners, *EDGES[e], self.param(S, b, e, pos)) for e, pos in ends]

        jc = [coords("J", ends) for ends in self.chords["J"][fc].values()]
        kc = [coords("K", ends) for ends in self.chords["K"][fc].values()]
        return sum(_interleaved(a, bb, c, d) for a, bb in jc for c, d in kc)

    def total_crossings(self) -> int:
        return sum(self.face_crossing_count(fc) for fc in range(len(self.reps)))

    def _reduce(self) -> None:
        """Greedy sign flips, first of twin groups then of single points, while crossings drop."""
        cost = {fc: self.face_crossing_count(fc) for fc in range(len(self.reps))}
        units = [g for g in self._groups if len(g) > 1] + [[v] for g in self._groups for v in g]
        for _ in range(20):
            improved = False
            for unit in units:
                faces = set().union(*(self._faces_of_class.get(c, set()) for c, _ in unit))
                before = sum(cost[fc] for fc in faces)
                for v in unit:
                    self.signs[v] = -self.signs[v]
                after = {fc: self.face_crossing_count(fc) for fc in faces}
                if sum(after.values()) < before:
                    cost.update(after)
                    improved = True
                    self.flips += 1
                else:
                    for v in unit:
                        self.signs[v] = -self.signs[v]
            if not improved:
                break

    # -- intersection --------------------------------------------------------

    def rep_key(self, S: str, a: int, f: int, e: int, pos: int) -> tuple[int, int]:
        """A point on edge ``e`` of face ``f`` in tet ``a``, in the face class's own frame."""
        _, p = self.to_rep[(a, f)]
        i, j = EDGES[e]
        e2 = EDGE_INDEX[(p[i], p[j])]
        return e2, (pos if p[i] < p[j] else self._count(S, a, e) - 1 - pos)

    def _build(self) -> None:
        # crossings of J and K arcs in each face class
        self.crossings: list[tuple] = []
        self.cross_at: dict[tuple, dict] = {}
        on_arc: dict[tuple, list] = {}
        for fc, (b, g) in enumerate(self.reps):
            corners = face_vertices(g)
            for jarc, jends in sorted(self.chords["J"][fc].items()):
                P = [_plane_point(corners, *EDGES[e], self.param("J", b, e, pos)) for e, pos in jends]
                for karc, kends in sorted(self.chords["K"][fc].items()):
                    Q = [_plane_point(corners, *EDGES[e], self.param("K", b, e, pos)) for e, pos in kends]
                    rx, ry = P[1][0] - P[0][0], P[1][1] - P[0][1]
                    sx, sy = Q[1][0] - Q[0][0], Q[1][1] - Q[0][1]
                    den = _cross(rx, ry, sx, sy)
                    if den == 0:
                        continue
                    qpx, qpy = Q[0][0] - P[0][0], Q[0][1] - P[0][1]
                    t = _cross(qpx, qpy, sx, sy) / den
                    u = _cross(qpx, qpy, rx, ry) / den
                    if not (0 < t < 1 and 0 < u < 1):
                        continue
                    X = (fc, jarc, karc)
                    self.crossings.append(X)
                    self.cross_at[X] = {"t": t, "u": u, "J": jends, "K": kends,
                                        "regular": _regular_pairing(jends, kends)}
                    on_arc.setdefault(("J", fc, jarc), []).append((t, X))
                    on_arc.setdefault(("K", fc, karc), []).append((u, X))
        self.on_arc = {}
        for key, items in on_arc.items():
            items.sort()
            if any(x[0] == y[0] for x, y in zip(items, items[1:])):
                raise GeometryError(f"degenerate placement: concurrent crossings on {key}")
            self.on_arc[key] = [X for _, X in items]

        # boundary of every disk as a cyclic list of corners and crossings
        self.boundary: dict[tuple[str, int, int], list] = {}
        self.arc_info: dict[tuple[str, int, int], list] = {}
        for S in "JK":
            for a, stack in enumerate(self.R[S].disks):
                for di, d in enumerate(stack):
                    entries, info = [], []
                    nv = len(d.vertices)
                    for i, (f, v, k) in enumerate(d.arcs):
                        fc, p = self.to_rep[(a, f)]
                        start = self.rep_key(S, a, f, *d.vertices[i])
                        end = self.rep_key(S, a, f, *d.vertices[(i + 1) % nv])
                        ends = self.chords[S][fc][(p[v], k)]
                        xs = list(self.on_arc.get((S, fc, (p[v], k)), []))
                        forward = start == ends[0]
                        if not forward:
                            assert start == ends[1]
                            xs.reverse()
                        info.append({"fc": fc, "face": f, "arc": (p[v], k), "start": start, "end": end,
                                     "forward": forward, "n": len(xs)})
                        entries.append(("v", i))
                        # a crossing is seen from tet a through face f
                        entries.extend(("x", (f, X), i) for X in xs)
                    self.boundary[(S, a, di)] = entries
                    self.arc_info[(S, a, di)] = info

        # pair up the crossings shared by a J disk and a K disk; ends are (face, crossing)
        self.segments: list[dict] = []
        self.where: dict[tuple[str, int, tuple], tuple[int, int]] = {}
        for a in range(self.tri.tet_count):
            groups: dict[tuple[int, int], list] = {}
            index = {}
            for S in "JK":
                for di in range(len(self.R[S].disks[a])):
                    for bi, ent in enumerate(self.boundary[(S, a, di)]):
                        if ent[0] == "x":
                            index[(S, ent[1])] = (di, bi)
                            self.where[(S, a, ent[1])] = (di, bi)
            for X in {ent for (S, ent) in index if S == "J"}:
                dj, _ = index[("J", X)]
                dk, _ = index[("K", X)]
                groups.setdefault((dj, dk), []).append(X)
            for (dj, dk), xs in sorted(groups.items()):
                self._pair(a, dj, dk, xs, index)

        self.incident: dict[tuple, list[tuple[int, int]]] = {}
        for si, seg in enumerate(self.segments):
            for end, (_, X) in enumerate(seg["ends"]):
                self.incident.setdefault(X, []).append((si, end))

    def _pair(self, a: int, dj: int, dk: int, xs: list, index: dict) -> None:
        order_j = sorted(xs, key=lambda X: index[("J", X)][1])
        pos_k = {X: index[("K", X)][1] for X in xs}
        fallback = None
        for matching in _noncrossing_matchings(order_j):
            if any(_interleaved(pos_k[x], pos_k[y], pos_k[z], pos_k[w])
                   for n1, (x, y) in enumerate(matching) for (z, w) in matching[n1 + 1:]):
                continue
            if fallback is None:
                fallback = matching
            if all(self._segment_consistent(a, dj, dk, x, y) for x, y in matching):
                break
        else:
            if fallback is None:
                raise GeometryError(f"tetrahedron {a}: disks {dj}, {dk} meet in an unrealizable pattern")
            matching = fallback
        for x, y in matching:
            self.segments.append({"tet": a, "J": dj, "K": dk, "ends": (x, y)})

    def transport(self, S: str, a: int, di: int, X, Y, marker):
        """Carry a side marker of the curve from crossing X to Y across disk ``di``."""
        entries = self.boundary[(S, a, di)]
        info = self.arc_info[(S, a, di)]
        i = entries[self.where[(S, a, X)][1]][2]
        j = entries[self.where[(S, a, Y)][1]][2]
        if marker == info[i]["end"]:
            forward = True
        elif marker == info[i]["start"]:
            forward = False
        else:
            raise GeometryError("marker is not an endpoint of the arc through the crossing")
        return info[j]["start"] if forward else info[j]["end"]

    def _segment_consistent(self, a: int, dj: int, dk: int, X, Y) -> bool:
        reg = self.cross_at[X[1]]["regular"]
        mj = self.cross_at[X[1]]["J"][0]
        mk = reg[mj]
        mj2 = self.transport("J", a, dj, X, Y, mj)
        mk2 = self.transport("K", a, dk, X, Y, mk)
        return self.cross_at[Y[1]]["regular"][mj2] == mk2

    def is_disjoint(self) -> bool:
        return not self.crossings


def _regular_pairing(jends, kends) -> dict:
    """J endpoint -> K endpoint for the exchange that yields normal arcs.

    Exactly one of the two pairings joins no two halves ending on the same
    edge of the face.
    """
    (e0, e1), (f0, f1) = jends, kends
    straight = {e0: f0, e1: f1}
    swapped = {e0: f1, e1: f0}
    ok = [m for m in (straight, swapped) if all(x[0] != y[0] for x, y in m.items())]
    if len(ok) != 1:
        raise GeometryError("crossing arcs admit no unique regular exchange")
    return ok[0]


# ---------------------------------------------------------------------------
# curves, bands, patches


def _walk(geo: SumGeometry, start_entry: tuple[int, int], closed: bool):
    """Follow segments from ``start_entry`` = (segment, end); yields (segment, from end)."""
    si, end = start_entry
    while True:
        yield si, end
        X = geo.segments[si]["ends"][1 - end][1]
        arrived = (si, 1 - end)
        nxt = [x for x in geo.incident[X] if x != arrived]
        if not nxt:
            return
        si, end = nxt[0]
        if closed and (si, end) == start_entry:
            return


class _Tracer:
    def __init__(self, geo: SumGeometry):
        self.geo = geo

    def step(self, si: int, end: int, mj, mk):
        seg = self.geo.segments[si]
        a, X, Y = seg["tet"], seg["ends"][end], seg["ends"][1 - end]
        return (self.geo.transport("J", a, seg["J"], X, Y, mj),
                self.geo.transport("K", a, seg["K"], X, Y, mk))

    def loop(self, entries, mj, mk):
        """Carry a corner once round; returns the final corner and whether labels held."""
        ok = True
        for si, end in entries:
            mj, mk = self.step(si, end, mj, mk)
            X = self.geo.segments[si]["ends"][1 - end][1]
            ok &= self.geo.cross_at[X]["regular"][mj] == mk
        return mj, mk, ok


def curve_components(geo: SumGeometry) -> list[tuple[bool, list[tuple[int, int]]]]:
    """Each intersection component as (closed, ordered segment entries)."""
    used: set[int] = set()
    out = []
    ends = sorted(X for X, inc in geo.incident.items() if len(inc) == 1)
    for X in ends:
        si, end = geo.incident[X][0]
        if si in used:
            continue
        entries = list(_walk(geo, (si, end), closed=False))
        used.update(s for s, _ in entries)
        out.append((False, entries))
    for X in sorted(geo.incident):
        for si, end in sorted(geo.incident[X]):
            if si in used:
                continue
            entries = list(_walk(geo, (si, end), closed=True))
            used.update(s for s, _ in entries)
            out.append((True, entries))
    return out


def _curve_record(geo: SumGeometry, cid: int, closed: bool, entries) -> tuple[ExchangeCurve, dict]:
    tracer = _Tracer(geo)
    itinerary = []
    for si, end in entries:
        seg = geo.segments[si]
        a = seg["tet"]
        itinerary.append((a, geo.R["J"].disks[a][seg["J"]].label, geo.R["K"].disks[a][seg["K"]].label,
                          (seg["ends"][end][1], seg["ends"][1 - end][1])))
    extra = {"seams": []}
    if not closed:
        ok = True
        X0 = geo.segments[entries[0][0]]["ends"][entries[0][1]][1]
        for mj in geo.cross_at[X0]["J"]:
            mk = geo.cross_at[X0]["regular"][mj]
            _, _, good = tracer.loop(entries, mj, mk)
            ok &= good
            extra["seams"].append({"kind": "rectangle", "core": None, "period": 1})
        return ExchangeCurve(cid, False, tuple(itinerary), None, None, ok), extra
    X0 = geo.segments[entries[0][0]]["ends"][entries[0][1]][1]
    mj0 = geo.cross_at[X0]["J"][0]
    mk0 = geo.cross_at[X0]["regular"][mj0]
    mj, mk, ok = tracer.loop(entries, mj0, mk0)
    sj = "preserving" if mj == mj0 else "reversing"
    sk = "preserving" if mk == mk0 else "reversing"
    if mj == mj0 and mk == mk0:
        corners = [(mj0, mk0), (geo.cross_at[X0]["J"][1], geo.cross_at[X0]["regular"][geo.cross_at[X0]["J"][1]])]
        for cj, ck in corners:
            fj, fk, good = tracer.loop(entries, cj, ck)
            ok &= good
            core = "preserving" if (fj, fk) == (cj, ck) else "reversing"
            extra["seams"].append({"kind": "annulus", "core": core, "period": 1})
    else:
        # the corner needs a second lap to come back
        fj, fk, good = tracer.loop(entries, mj, mk)
        ok &= good
        core = "preserving" if (fj, fk) == (mj0, mk0) else "reversing"
        extra["seams"].append({"kind": "annulus", "core": core, "period": 2})
    return ExchangeCurve(cid, True, tuple(itinerary), sj, sk, ok), extra


def band_kind(curve: ExchangeCurve) -> str:
    if not curve.closed:
        return "rectangle"
    return "annulus" if curve.orientation_J == "preserving" else "mobius"


@dataclass(frozen=True)
class Patch:
    id: str
    surface: str
    euler_characteristic: int
    boundary_count: int
    regions: int
    cut: bool

    @property
    def is_disk(self) -> bool:
        return self.euler_characteristic == 1 and self.boundary_count == 1


class _UF:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        self.add(x)
        self.add(y)
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if repr(ry) < repr(rx):
                rx, ry = ry, rx
            self.parent[ry] = rx


def patch_cells(geo: SumGeometry, S: str) -> dict:
    """Cell structure of surface ``S`` cut open along the intersection.

    Returns cells by dimension plus incidences: 0-cells are surface points on
    edges and one copy of each crossing per adjacent sub-arc; 1-cells are
    sub-arcs of normal arcs and the two sides of every segment; 2-cells are
    the regions the segments cut each disk into.
    """
    tri = geo.tri
    boundary_classes = {fc for fc, m in enumerate(tri.skeleta.face_classes) if len(m) == 1}
    cells = {0: set(), 1: set(), 2: set()}
    faces_of: dict = {}
    ends_of: dict = {}
    bdry1 = set()
    for a, stack in enumerate(geo.R[S].disks):
        for di, d in enumerate(stack):
            entries = geo.boundary[(S, a, di)]
            info = geo.arc_info[(S, a, di)]
            n = len(entries)
            partner = {}
            for seg in geo.segments:
                if seg["tet"] == a and seg[S] == di:
                    b1 = geo.where[(S, a, seg["ends"][0])][1]
                    b2 = geo.where[(S, a, seg["ends"][1])][1]
                    partner[b1], partner[b2] = b2, b1
            sub_ids, seen_on_arc = [], {}
            for t, ent in enumerate(entries):
                i = ent[1] if ent[0] == "v" else ent[2]
                s = 0 if ent[0] == "v" else seen_on_arc.get(i, 0) + 1
                if ent[0] == "x":
                    seen_on_arc[i] = s
                rec = info[i]
                sub = s if rec["forward"] else rec["n"] - s
                sub_ids.append(("arc", S, rec["fc"], rec["arc"], sub))

            def point(t):
                ent = entries[t % n]
                if ent[0] == "v":
                    e, pos = d.vertices[ent[1]]
                    return ("pt", S) + geo.R[S].class_param(a, e, pos)
                return None

            for t in range(n):
                arc = sub_ids[t]
                cells[1].add(arc)
                if arc[2] in boundary_classes:
                    bdry1.add(arc)
                p0 = point(t) or ("xc", S, entries[t][1][1], arc)
                p1 = point(t + 1) or ("xc", S, entries[(t + 1) % n][1][1], arc)
                ends_of[arc] = (p0, p1)
                cells[0].update((p0, p1))
            nxt = {}
            sides = {}
            for t in range(n):
                u = (t + 1) % n
                if entries[u][0] == "x":
                    if u not in partner:
                        raise GeometryError("crossing without a segment")
                    q = partner[u]
                    side = ("side", S, a, di, t)
                    sides[t] = side
                    cells[1].add(side)
                    bdry1.add(side)
                    ends_of[side] = (("xc", S, entries[u][1][1], sub_ids[t]),
                                     ("xc", S, entries[q][1][1], sub_ids[q]))
                    nxt[t] = q
                else:
                    nxt[t] = u
            done = set()
            for t in range(n):
                if t in done:
                    continue
                region = ("reg", S, a, di, t)
                cells[2].add(region)
                bound = []
                x = t
                while x not in done:
                    done.add(x)
                    bound.append(sub_ids[x])
                    if x in sides:
                        bound.append(sides[x])
                    x = nxt[x]
                faces_of[region] = bound
    return {"cells": cells, "faces_of": faces_of, "ends_of": ends_of, "boundary_1cells": bdry1}


def compute_patches(geo: SumGeometry, S: str) -> list[Patch]:
    data = patch_cells(geo, S)
    uf = _UF()
    for dim in (0, 1, 2):
        for c in data["cells"][dim]:
            uf.add(c)
    for region, bound in data["faces_of"].items():
        for c in bound:
            uf.union(region, c)
    for c, (p0, p1) in data["ends_of"].items():
        uf.union(c, p0)
        uf.union(c, p1)
    comps: dict = {}
    for dim in (0, 1, 2):
        for c in data["cells"][dim]:
            comps.setdefault(uf.find(c), {0: 0, 1: 0, 2: 0, "cells": []})
            comps[uf.find(c)][dim] += 1
            comps[uf.find(c)]["cells"].append(c)
    buf = _UF()
    for c in data["boundary_1cells"]:
        buf.add(c)
        for p in data["ends_of"][c]:
            buf.union(c, ("end", p))
    circles: dict = {}
    for c in data["boundary_1cells"]:
        circles.setdefault(uf.find(c), set()).add(buf.find(c))
    out = []
    ordered = sorted(comps.items(), key=lambda kv: min(repr(c) for c in kv[1]["cells"] if c[0] == "reg"))
    for n, (root, rec) in enumerate(ordered):
        cut = any(c[0] == "side" for c in rec["cells"])
        out.append(Patch(f"{S}{n}", S, rec[0] - rec[1] + rec[2], len(circles.get(root, ())), rec[2], cut))
    return out


@dataclass
class ExchangeBandReport:
    curves: list[ExchangeCurve]
    kinds: dict[int, str]
    # regular and irregular band counts per curve
    regular_bands: dict[int, int]
    irregular_bands: dict[int, int]
    patches: list[Patch]
    seams: list[dict]
    placement: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "curves": [{"id": c.id, "closed": c.closed, "kind": self.kinds[c.id], "length": c.length,
                        "orientation_J": c.orientation_J, "orientation_K": c.orientation_K,
                        "labels_consistent": c.labels_consistent} for c in self.curves],
            "patches": [{"id": p.id, "euler_characteristic": p.euler_characteristic,
                         "boundary_count": p.boundary_count} for p in self.patches],
            "seams": [{"id": s["id"], "curve": s["curve"], "kind": s["kind"], "orientation": s["core"]}
                      for s in self.seams],
            "placement": self.placement,
        }


def _check_summands(Jr: GeometricRealization, Kr: GeometricRealization) -> None:
    for r in (Jr, Kr):
        if isinstance(r.surface, AlmostNormalSurface) and r.surface.exceptional is not None:
            raise SurfaceError("exchange analysis needs normal summands")
    if not compatible(Jr.coords(), Kr.coords()):
        raise SurfaceError("summands are not compatible")


def sum_geometry(Jr: GeometricRealization, Kr: GeometricRealization, reduce: bool = True) -> SumGeometry:
    """Place ``K`` against ``J``, shrinking the offset if crossings become concurrent."""
    _check_summands(Jr, Kr)
    eps = None
    for attempt in range(8):
        try:
            geo = SumGeometry(Jr, Kr, eps, reduce)
        except GeometryError as exc:
            if "degenerate" not in str(exc):
                raise
            eps = (eps or Fraction(1, 4 * (1 + max(max(r) for r in Jr.edge_counts + Kr.edge_counts)) ** 2)) / 3
            log.info("re-offsetting after %s (attempt %d)", exc, attempt + 1)
            continue
        geo.retries = attempt
        return geo
    raise GeometryError("could not find a transverse placement")


def trace_intersections(Jr: GeometricRealization, Kr: GeometricRealization, tri: Triangulation | None = None,
                        reduce: bool = True) -> ExchangeCurves:
    """All components of J ∩ K, closed curves and properly embedded arcs.

    The summand with the larger coordinate vector is always the displaced
    one, so swapping J and K gives the same curves with the roles exchanged.
    """
    swapped = Kr.coords().coords < Jr.coords().coords
    geo = sum_geometry(Kr, Jr, reduce) if swapped else sum_geometry(Jr, Kr, reduce)
    out = ExchangeCurves()
    extras = []
    for cid, (closed, entries) in enumerate(curve_components(geo)):
        curve, extra = _curve_record(geo, cid, closed, entries)
        if swapped:
            curve = _swap_roles(curve)
        out.append(curve)
        extras.append(extra)
    out.geometry = geo
    out.swapped = swapped
    out.extras = extras
    return out


def _swap_roles(c: ExchangeCurve) -> ExchangeCurve:
    itinerary = tuple((a, kl, jl, tuple((fc, karc, jarc) for fc, jarc, karc in ends))
                      for a, jl, kl, ends in c.itinerary)
    return ExchangeCurve(c.id, c.closed, itinerary, c.orientation_K, c.orientation_J, c.labels_consistent)


def classify_bands(curves: ExchangeCurves, Jr: GeometricRealization | None = None,
                   Kr: GeometricRealization | None = None) -> ExchangeBandReport:
    geo = getattr(curves, "geometry", None)
    if geo is None:
        if Jr is None or Kr is None:
            raise ValueError("curves carry no placement; pass both realizations")
        curves = trace_intersections(Jr, Kr)
        geo = curves.geometry
    kinds, reg, irr, seams = {}, {}, {}, []
    for curve, extra in zip(curves, curves.extras):
        kinds[curve.id] = band_kind(curve)
        reg[curve.id] = len(extra["seams"])
        # the irregular sides pair up the same way as the regular ones
        irr[curve.id] = len(extra["seams"])
        for s in extra["seams"]:
            seams.append({"id": len(seams), "curve": curve.id, **s})
    patches = compute_patches(geo, "J") + compute_patches(geo, "K")
    if getattr(curves, "swapped", False):
        flip = {"J": "K", "K": "J"}
        patches = [Patch(flip[p.id[0]] + p.id[1:], flip[p.surface], p.euler_characteristic, p.boundary_count,
                         p.regions, p.cut) for p in patches]
        patches.sort(key=lambda p: (p.surface, int(p.id[1:])))
    placement = {"eps": str(geo.eps), "initial_crossings": geo.initial_crossings,
                 "final_crossings": geo.final_crossings, "sign_flips": geo.flips,
                 "retries": getattr(geo, "retries", 0)}
    return ExchangeBandReport(list(curves), kinds, reg, irr, patches, seams, placement)


def disk_patch_diagnostic(report: ExchangeBandReport) -> list[Patch]:
    """Patches that are disks; a reduced sum has none."""
    return [p for p in report.patches if p.is_disk]


# ---------------------------------------------------------------------------
# the regular switch


def _resolve_face(geo: SumGeometry, fc: int, irregular: frozenset = frozenset()) -> list[tuple]:
    """Endpoint pairs of the arcs left after exchanging at every crossing of the face.

    Crossings in ``irregular`` are resolved the other way.
    """
    chords = {("J", arc): ends for arc, ends in geo.chords["J"][fc].items()}
    chords.update({("K", arc): ends for arc, ends in geo.chords["K"][fc].items()})
    lists = {c: geo.on_arc.get((c[0], fc, c[1]), []) for c in chords}
    visited, pairs = set(), []
    for c in sorted(chords):
        for which in (0, 1):
            start = (c[0], chords[c][which])
            if start in visited:
                continue
            chord, behind, came_from = c, which, None
            while True:
                xs = lists[chord]
                S = chord[0]
                ends = chords[chord]
                step = 1 if behind == 0 else -1
                if came_from is None:
                    nxt_idx = 0 if behind == 0 else len(xs) - 1
                else:
                    nxt_idx = xs.index(came_from) + step
                if not 0 <= nxt_idx < len(xs):
                    stop = (S, ends[1 - behind])
                    break
                X = xs[nxt_idx]
                info = geo.cross_at[X]
                here = ends[behind]
                pairing = info["regular"]
                if X in irregular:
                    (j0, k0), (j1, k1) = sorted(pairing.items())
                    pairing = {j0: k1, j1: k0}
                if S == "J":
                    target = pairing[here]
                    other = ("K", X[2])
                else:
                    target = next(j for j, k in pairing.items() if k == here)
                    other = ("J", X[1])
                # carry on along the other chord, heading for ``target``
                behind = 0 if target == chords[other][1] else 1
                chord, came_from = other, X
            visited.update((start, stop))
            pairs.append((start, stop))
    return pairs


def _tet_curves(geo: SumGeometry, irregular: frozenset = frozenset(), faces: bool = False) -> list[list]:
    """Closed curves on each tetrahedron boundary after the exchange.

    Each curve is the cyclic list of its edge points ``(S, edge, position)``;
    with ``faces=True`` it comes with the face holding the arc from each
    point to the next (an arc may return to the edge it left).
    """
    tri = geo.tri
    pairs = [_resolve_face(geo, fc, irregular) for fc in range(len(geo.reps))]
    out = []
    for a in range(tri.tet_count):
        partner: dict[int, dict] = {}
        for f in range(4):
            fc, _ = geo.to_rep[(a, f)]
            to_local = {}
            for S in "JK":
                for e in range(6):
                    if f in EDGES[e]:
                        continue
                    for pos in range(geo._count(S, a, e)):
                        to_local[(S, geo.rep_key(S, a, f, e, pos))] = (S, e, pos)
            partner[f] = {}
            for p, q in pairs[fc]:
                lp, lq = to_local[p], to_local[q]
                partner[f][lp] = lq
                partner[f][lq] = lp
        points = sorted({p for f in partner for p in partner[f]})
        seen = set()
        curves = []
        for p in points:
            if p in seen:
                continue
            pts, via, cur = [], [], p
            face = min(f for f in range(4) if f not in EDGES[p[1]])
            while True:
                seen.add(cur)
                pts.append(cur)
                via.append(face)
                cur = partner[face][cur]
                face = next(f for f in range(4) if f not in EDGES[cur[1]] and f != face)
                if cur == p:
                    break
            curves.append((pts, via) if faces else pts)
        out.append(curves)
    return out


def switch_counts(geo: SumGeometry) -> NormalSurfaceVector:
    """Disk counts of the surface obtained by the regular exchange everywhere."""
    counts = [0] * (7 * geo.tri.tet_count)
    for a, curves in enumerate(_tet_curves(geo)):
        for pts in curves:
            counts[7 * a + _curve_type([p[1] for p in pts])] += 1
    return NormalSurfaceVector(tuple(counts))


def irregular_exchange_weights(curves: ExchangeCurves, curve_id: int) -> dict:
    """Weights after exchanging irregularly along one closed curve.

    The regular exchange elsewhere and the irregular one along the chosen
    curve give a surface ``F'``.  Each component is reported with its weight
    and Euler characteristic (every curve on a tetrahedron boundary spans a
    disk), together with ``w(F)`` and whether the component is normal.
    """
    geo = curves.geometry
    curve = next(c for c in curves if c.id == curve_id)
    if not curve.closed:
        raise GeometryError("the irregular exchange is taken along a closed curve")
    crossings = frozenset(x for entry in curve.itinerary for x in entry[3])
    if getattr(curves, "swapped", False):
        crossings = frozenset((fc, b, a) for fc, a, b in crossings)
    tri = geo.tri
    deg = tri.skeleta.edge_degrees
    tet_curves = _tet_curves(geo, crossings, faces=True)
    # disks meeting across a face share their arcs; key arcs in the rep frame
    nodes = [(a, i) for a, cs in enumerate(tet_curves) for i in range(len(cs))]
    index = {n: k for k, n in enumerate(nodes)}
    uf = UnionFind(len(nodes))
    arc_owner: dict = {}
    for a, cs in enumerate(tet_curves):
        for i, (pts, via) in enumerate(cs):
            for u, f in enumerate(via):
                p, q = pts[u], pts[(u + 1) % len(pts)]
                fc, _ = geo.to_rep[(a, f)]
                key = (fc, frozenset({(p[0], geo.rep_key(p[0], a, f, p[1], p[2])),
                                      (q[0], geo.rep_key(q[0], a, f, q[1], q[2]))}))
                other = arc_owner.setdefault(key, (a, i))
                uf.union(index[other], index[(a, i)])
    comps: dict[int, dict] = {}
    for (a, i), k in index.items():
        pts = tet_curves[a][i][0]
        c = comps.setdefault(uf.find(k)[0], {"disks": 0, "arcs": 0, "weight": Fraction(0), "normal": True})
        c["disks"] += 1
        c["arcs"] += len(pts)
        c["weight"] += sum(Fraction(1, deg[tri.edge_class_of[(a, p[1])][0]]) for p in pts)
        try:
            _curve_type([p[1] for p in pts])
        except GeometryError:
            c["normal"] = False
    J, K = geo.R["J"].coords(), geo.R["K"].coords()
    wF = weight(J, tri) + weight(K, tri)
    rows = []
    for c in comps.values():
        chi = c["disks"] - Fraction(c["arcs"], 2) + c["weight"]
        if c["weight"].denominator != 1 or chi.denominator != 1:
            raise GeometryError("an exchanged component does not close up")
        rows.append({"weight": int(c["weight"]), "euler_characteristic": int(chi), "normal": c["normal"]})
    rows.sort(key=lambda r: (r["weight"], r["euler_characteristic"], r["normal"]))
    return {"curve": curve_id, "weight_F": wF, "components": rows,
            "weight_F_prime": sum(r["weight"] for r in rows)}


def _curve_type(edges: list[int]) -> int:
    """Coordinate offset of the normal disk bounded by a curve through these edges."""
    if len(edges) == 3 and len(set(edges)) == 3:
        common = set(EDGES[edges[0]]) & set(EDGES[edges[1]]) & set(EDGES[edges[2]])
        if len(common) == 1:
            return common.pop()
    if len(edges) == 4 and len(set(edges)) == 4:
        missing = {EDGES[e] for e in range(6)} - {EDGES[e] for e in edges}
        for k in range(3):
            if missing == set(QUAD_PAIRS[k]):
                return 4 + k
    raise GeometryError(f"exchange produced a non-normal curve through edges {edges}")


def regular_switch(Jr: GeometricRealization, Kr: GeometricRealization,
                   report: ExchangeBandReport | None = None, curves: ExchangeCurves | None = None) -> GeometricRealization:
    """Realization of ``F = J + K`` built by cut-and-paste along the regular bands."""
    geo = curves.geometry if curves is not None and getattr(curves, "geometry", None) else sum_geometry(Jr, Kr)
    counts = switch_counts(geo)
    J, K = Jr.coords(), Kr.coords()
    name = f"{J.name}+{K.name}" if J.name and K.name else None
    F = NormalSurfaceVector(counts.coords, name)
    return realize(F, geo.tri)
