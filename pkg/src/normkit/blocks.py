"""Blocks of the complement of an almost normal surface and the complexity calculus.

Each tetrahedron is cut by the realized disks into blocks.  A block is a
product block when it lies between two normally parallel disks and a core
block otherwise.  Euler characteristics are computed from the barycentric
subdivision of the induced cell structure: a simplex is a chain of cells,
and chains living in a face or an edge are identified across gluings.  For
a blocked submanifold ``Y`` with frontier ``L``, the shrunken ``Y`` is the
span of chains avoiding ``L`` and its vertical boundary is spanned by the
chains that mix ``L`` and non-``L`` cells.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

from .geom import GeometricRealization, GeometryError, realize
from .nsurf import AlmostNormalSurface
from .tri import EDGE_INDEX, EDGES, Triangulation, UnionFind, face_vertices, perm_inverse

log = logging.getLogger(__name__)


class BlockError(ValueError):
    pass


@dataclass(frozen=True)
class FaceRegion:
    """A piece of a face of the triangulation cut out by normal arcs (rep frame)."""

    face_class: int
    id: int
    segments: tuple[tuple[int, int], ...]  # (rep edge, index)
    arcs: tuple[tuple[int, int], ...]  # (corner cut off, depth)
    corners: tuple[int, ...]
    sides: int

    @property
    def is_rectangle(self) -> bool:
        return self.sides == 4 and not self.corners


@dataclass(frozen=True)
class Block:
    tet: int
    id: int
    regions: tuple[tuple[int, int], ...]  # (local face, region id)
    disks: tuple[int, ...]  # indices into the tet's disk stack
    kind: str
    side: str
    rectangles: int
    touches_vertex: bool

    @property
    def key(self) -> tuple[int, int]:
        return (self.tet, self.id)

    @property
    def is_product(self) -> bool:
        return self.kind == "product"


class Decomposition:
    """Blocks of every tetrahedron, the side labels and the chain complex."""

    def __init__(self, r: GeometricRealization):
        self.r = r
        self.tri = tri = r.tri
        for stack in r.disks:
            for d in stack:
                if d.piece and d.dtype[0] != "o":
                    raise BlockError("tubed pieces are not supported in block decompositions")
        self.fc_members = tri.skeleta.face_classes
        self.to_rep = {}
        for fc, members in enumerate(self.fc_members):
            b, g = members[0]
            self.to_rep[(b, g)] = (fc, (0, 1, 2, 3))
            for a, f in members[1:]:
                self.to_rep[(a, f)] = (fc, tri.gluings[(a, f)][2])
        self.face_regions = [self._face_regions(fc) for fc in range(len(self.fc_members))]
        self._build_blocks()
        self._color()
        self._build_chains()

    # -- faces ----------------------------------------------------------------

    def _n(self, a: int, e: int) -> int:
        return self.r.edge_counts[a][e]

    def _face_regions(self, fc: int) -> list[FaceRegion]:
        b, g = self.fc_members[fc][0]
        u0, u1, u2 = face_vertices(g)
        marks: list[tuple] = [("c", u0)]
        # walk u0 -> u1 -> u2 -> u0 listing corners and surface points
        for i, j in ((u0, u1), (u1, u2)):
            e = EDGE_INDEX[(i, j)]
            marks += [("p", e, p) for p in range(self._n(b, e))]
            marks.append(("c", j))
        e = EDGE_INDEX[(u0, u2)]
        marks += [("p", e, p) for p in reversed(range(self._n(b, e)))]
        where = {m: i for i, m in enumerate(marks)}
        partner, arc_of = {}, {}
        for d in self.r.disks[b]:
            for i, (f, v, k) in enumerate(d.arcs):
                if f != g:
                    continue
                p, q = d.vertices[i], d.vertices[(i + 1) % len(d.vertices)]
                mp, mq = where[("p",) + p], where[("p",) + q]
                partner[mp], partner[mq] = mq, mp
                arc_of[mp] = arc_of[mq] = (v, k)
        m = len(marks)

        def rank(mark, e):
            lo, hi = EDGES[e]
            if mark[0] == "c":
                return 0 if mark[1] == lo else self._n(b, e) + 1
            return mark[2] + 1

        def interval(t):
            m1, m2 = marks[t], marks[(t + 1) % m]
            e = m1[1] if m1[0] == "p" else m2[1] if m2[0] == "p" else EDGE_INDEX[(m1[1], m2[1])]
            return e, min(rank(m1, e), rank(m2, e))

        nxt = {t: partner.get((t + 1) % m, (t + 1) % m) for t in range(m)}
        out, done = [], set()
        for t in range(m):
            if t in done:
                continue
            segs, arcs, corners = [], [], []
            cycle, x = [], t
            while x not in done:
                done.add(x)
                cycle.append(x)
                x = nxt[x]
            for x in cycle:
                segs.append(interval(x))
                end = (x + 1) % m
                if end in partner:
                    arcs.append(arc_of[end])
                elif marks[end][0] == "c":
                    corners.append(marks[end][1])
            # each edge segment and each arc is one side of the polygon
            sides = len(segs) + len(arcs)
            out.append(FaceRegion(fc, len(out), tuple(segs), tuple(sorted(set(arcs))), tuple(sorted(corners)),
                                  sides))
        return out

    def local_region_cells(self, a: int, f: int):
        """Face regions of face ``f`` of tet ``a`` in tet-local cells."""
        fc, p = self.to_rep[(a, f)]
        b, _ = self.fc_members[fc][0]
        pinv = perm_inverse(p)
        out = []
        for reg in self.face_regions[fc]:
            segs = []
            for e, idx in reg.segments:
                i, j = EDGES[e]
                li, lj = pinv[i], pinv[j]
                le = EDGE_INDEX[(li, lj)]
                segs.append((le, idx if li < lj else self._n(a, le) - idx))
            arcs = [(f, pinv[v], k) for v, k in reg.arcs]
            corners = [pinv[u] for u in reg.corners]
            out.append((reg, segs, arcs, corners))
        return out

    # -- blocks -----------------------------------------------------------------

    def _build_blocks(self) -> None:
        tri = self.tri
        self.blocks: dict[tuple[int, int], Block] = {}
        self.local: dict[int, dict] = {}
        for a in range(tri.tet_count):
            regions = {}
            for f in range(4):
                for reg, segs, arcs, corners in self.local_region_cells(a, f):
                    regions[(f, reg.id)] = (reg, segs, arcs, corners)
            keys = sorted(regions)
            index = {k: i for i, k in enumerate(keys)}
            uf = UnionFind(len(keys))
            by_seg: dict[tuple[int, int], list] = {}
            for k in keys:
                for s in regions[k][1]:
                    by_seg.setdefault(s, []).append(k)
            for s, ks in by_seg.items():
                if len(ks) != 2:
                    raise BlockError(f"tetrahedron {a}: edge segment {s} bounds {len(ks)} face regions")
                uf.union(index[ks[0]], index[ks[1]])
            owner = {arc: di for di, d in enumerate(self.r.disks[a]) for arc in d.arcs}
            groups = uf.classes()
            local_blocks = []
            for bid, g in enumerate(groups):
                members = [keys[i] for i in g]
                disks = sorted({owner[arc] for k in members for arc in regions[k][2]})
                local_blocks.append((members, disks))
            disk_sides: dict[int, list[int]] = {}
            for bid, (members, disks) in enumerate(local_blocks):
                for di in disks:
                    disk_sides.setdefault(di, []).append(bid)
            for di in range(len(self.r.disks[a])):
                if len(disk_sides.get(di, [])) != 2:
                    raise BlockError(f"tetrahedron {a}: disk {di} does not separate two blocks")
            self.local[a] = {"regions": regions, "blocks": local_blocks, "disk_blocks": disk_sides}

    def _classify(self, a: int, bid: int) -> str:
        members, disks = self.local[a]["blocks"][bid]
        stack = self.r.disks[a]
        if len(disks) == 2:
            d0, d1 = stack[disks[0]], stack[disks[1]]
            if d0.dtype == d1.dtype and d0.dtype[0] != "o":
                return "product"
        return "core"

    def _color(self) -> None:
        """Two-colour the blocks: same colour across faces, opposite across disks."""
        nodes = [(a, bid) for a in range(self.tri.tet_count) for bid in range(len(self.local[a]["blocks"]))]
        adj: dict[tuple, list] = {n: [] for n in nodes}
        region_block = {}
        for a in range(self.tri.tet_count):
            for bid, (members, _) in enumerate(self.local[a]["blocks"]):
                for f, rid in members:
                    fc, _ = self.to_rep[(a, f)]
                    region_block.setdefault((fc, rid), []).append((a, bid))
            for di, bids in self.local[a]["disk_blocks"].items():
                x, y = (a, bids[0]), (a, bids[1])
                adj[x].append((y, 1, ("disk", a, di)))
                adj[y].append((x, 1, ("disk", a, di)))
        for (fc, rid), bl in region_block.items():
            if len(bl) == 2:
                x, y = bl
                adj[x].append((y, 0, ("face", fc, rid)))
                adj[y].append((x, 0, ("face", fc, rid)))
        color: dict[tuple, int] = {}
        parent: dict[tuple, tuple | None] = {}
        for root in nodes:
            if root in color:
                continue
            color[root] = 0
            parent[root] = None
            queue = [root]
            while queue:
                x = queue.pop(0)
                for y, par, via in adj[x]:
                    if y not in color:
                        color[y] = color[x] ^ par
                        parent[y] = (x, via)
                        queue.append(y)
                    elif color[y] != color[x] ^ par:
                        raise BlockError("surface is not separating: odd cycle " + _cycle_text(parent, x, y, via))
        first = color[nodes[0]] if nodes else 0
        for a in range(self.tri.tet_count):
            for bid, (members, disks) in enumerate(self.local[a]["blocks"]):
                side = "V" if color[(a, bid)] == first else "W"
                regs = [self.local[a]["regions"][k][0] for k in members]
                blk = Block(a, bid, tuple(members), tuple(disks), self._classify(a, bid), side,
                            sum(r.is_rectangle for r in regs), any(r.corners for r in regs))
                self.blocks[(a, bid)] = blk
        self.region_block = region_block

    # -- cells and chains -----------------------------------------------------

    def _global(self, a: int, cell: tuple) -> tuple:
        tri = self.tri
        kind = cell[0]
        if kind == "c":
            return ("V", tri.vertex_class_of[(a, cell[1])])
        if kind in "ps":
            _, e, x = cell
            ci, rev = tri.edge_class_of[(a, e)]
            n = self._n(a, e)
            if kind == "p":
                return ("P", ci, n - 1 - x if rev else x)
            return ("S", ci, n - x if rev else x)
        if kind == "a":
            _, f, v, k = cell
            fc, p = self.to_rep[(a, f)]
            return ("A", fc, p[v], k)
        if kind == "r":
            fc, _ = self.to_rep[(a, cell[1])]
            return ("R", fc, cell[2])
        if kind == "d":
            return ("D", a, cell[1])
        return ("B", a, cell[1])

    def _local_closures(self, a: int) -> dict[tuple, frozenset]:
        """Cells of tet ``a`` with the set of cells in their boundary closure."""
        clos: dict[tuple, frozenset] = {}
        for v in range(4):
            clos[("c", v)] = frozenset()
        for e in range(6):
            n = self._n(a, e)
            i, j = EDGES[e]
            for p in range(n):
                clos[("p", e, p)] = frozenset()
            for idx in range(n + 1):
                lo = ("c", i) if idx == 0 else ("p", e, idx - 1)
                hi = ("c", j) if idx == n else ("p", e, idx)
                clos[("s", e, idx)] = frozenset((lo, hi))
        for di, d in enumerate(self.r.disks[a]):
            pts = [("p",) + v for v in d.vertices]
            arcs = []
            for i, (f, v, k) in enumerate(d.arcs):
                arc = ("a", f, v, k)
                clos[arc] = frozenset((pts[i], pts[(i + 1) % len(pts)]))
                arcs.append(arc)
            clos[("d", di)] = frozenset(pts + arcs)
        for (f, rid), (reg, segs, arcs, corners) in self.local[a]["regions"].items():
            cells = set()
            for e, idx in segs:
                cells.add(("s", e, idx))
                cells |= clos[("s", e, idx)]
            for arc in arcs:
                cells.add(("a",) + arc)
                cells |= clos[("a",) + arc]
            cells |= {("c", u) for u in corners}
            clos[("r", f, rid)] = frozenset(cells)
        for bid, (members, disks) in enumerate(self.local[a]["blocks"]):
            cells = set()
            for f, rid in members:
                cells.add(("r", f, rid))
                cells |= clos[("r", f, rid)]
            for di in disks:
                cells.add(("d", di))
                cells |= clos[("d", di)]
            clos[("b", bid)] = frozenset(cells)
        return clos

    def _chain_key(self, a: int, chain: tuple) -> tuple:
        top = chain[-1]
        kind = top[0]
        if kind in "bd":
            return ("T", a) + chain
        if kind in "ra":
            f = top[1]
            fc, p = self.to_rep[(a, f)]
            out = []
            for c in chain:
                if c[0] == "c":
                    out.append(("c", p[c[1]]))
                elif c[0] in "ps":
                    _, e, x = c
                    i, j = EDGES[e]
                    e2 = EDGE_INDEX[(p[i], p[j])]
                    n = self._n(a, e)
                    if p[i] > p[j]:
                        x = (n - 1 - x) if c[0] == "p" else (n - x)
                    out.append((c[0], e2, x))
                elif c[0] == "a":
                    out.append(("a", p[c[2]], c[3]))
                else:
                    out.append(("r", c[2]))
            return ("F", fc) + tuple(out)
        if kind in "ps":
            e = top[1]
            ci, rev = self.tri.edge_class_of[(a, e)]
            out = []
            for c in chain:
                if c[0] == "c":
                    lower = c[1] == EDGES[e][0]
                    out.append(("c", int(lower == rev)))
                else:
                    out.append(self._global(a, c)[:1] + self._global(a, c)[2:])
            return ("E", ci) + tuple(out)
        return ("V", self.tri.vertex_class_of[(a, top[1])])

    def _build_chains(self) -> None:
        self.chains: dict[tuple, tuple] = {}
        self.chain_local: dict[tuple, tuple[int, tuple]] = {}
        self.closure_global: dict[tuple[int, int], frozenset] = {}
        for a in range(self.tri.tet_count):
            clos = self._local_closures(a)
            memo: dict[tuple, list] = {}

            def chains_to(c):
                if c not in memo:
                    out = [(c,)]
                    for lower in clos[c]:
                        out.extend(ch + (c,) for ch in chains_to(lower))
                    memo[c] = out
                return memo[c]

            for c in clos:
                for ch in chains_to(c):
                    key = self._chain_key(a, ch)
                    g = tuple(self._global(a, x) for x in ch)
                    old = self.chains.get(key)
                    if old is None:
                        self.chains[key] = g
                        self.chain_local[key] = (a, ch)
                    elif old != g:
                        raise BlockError(f"chain {key} identified inconsistently")
            for bid in range(len(self.local[a]["blocks"])):
                self.closure_global[(a, bid)] = frozenset(self._global(a, x) for x in clos[("b", bid)]) | {("B", a, bid)}
        chi = sum((-1) ** (len(g) - 1) for g in self.chains.values())
        expected = self.tri.skeleta.euler_characteristic
        if chi != expected:
            raise BlockError(f"cell structure has Euler characteristic {chi}, triangulation has {expected}")

    def segment_cells(self, fc: int, rid: int) -> tuple:
        """Global edge segment cells on the sides of a face region."""
        b = self.fc_members[fc][0][0]
        return tuple(self._global(b, ("s", e, idx)) for e, idx in self.face_regions[fc][rid].segments)

    def subchain_key(self, key: tuple, positions: tuple[int, ...]) -> tuple:
        a, ch = self.chain_local[key]
        return self._chain_key(a, tuple(ch[i] for i in positions))


def _cycle_text(parent, x, y, via) -> str:
    def path(n):
        out = [n]
        while parent[n] is not None:
            n = parent[n][0]
            out.append(n)
        return out

    px, py = path(x), path(y)
    common = next(n for n in px if n in py)
    cyc = px[: px.index(common) + 1] + list(reversed(py[: py.index(common)]))
    return " -> ".join(f"block{n}" for n in cyc) + f" -> block{x} (closed by {via})"


@dataclass
class BlockComplex:
    """The blocks on one side of the surface."""

    side: str
    decomposition: Decomposition
    keys: tuple[tuple[int, int], ...]

    @property
    def blocks(self) -> list[Block]:
        return [self.decomposition.blocks[k] for k in self.keys]

    @property
    def tet_count(self) -> int:
        return self.decomposition.tri.tet_count

    def adjacency(self) -> dict[tuple[int, int], set]:
        """Blocks of this side meeting across a face region."""
        d = self.decomposition
        out = {k: set() for k in self.keys}
        for bl in d.region_block.values():
            if len(bl) == 2 and bl[0] in out and bl[1] in out and bl[0] != bl[1]:
                out[bl[0]].add(bl[1])
                out[bl[1]].add(bl[0])
        return out

    def disk_blocks(self) -> dict[tuple[int, int], tuple[int, int]]:
        """Surface disk (tet, index) -> the block of this side it bounds."""
        d = self.decomposition
        out = {}
        for a, loc in d.local.items():
            for di, bids in loc["disk_blocks"].items():
                for bid in bids:
                    if d.blocks[(a, bid)].side == self.side:
                        out[(a, di)] = (a, bid)
        return out

    def submanifold(self, keys=None) -> "ShrunkenSubmanifold":
        keys = self.keys if keys is None else keys
        bad = set(keys) - set(self.keys)
        if bad:
            raise BlockError(f"blocks {sorted(bad)} are not on side {self.side}")
        return ShrunkenSubmanifold(self, frozenset(keys))

    def as_dict(self) -> dict:
        return {
            "side": self.side,
            "blocks": [{"tet": b.tet, "id": b.id, "kind": b.kind, "disks": list(b.disks),
                        "vertical_faces": len(b.regions), "vertical_rectangles": b.rectangles,
                        "touches_vertex": b.touches_vertex} for b in self.blocks],
        }


class _DSU:
    def __init__(self):
        self.p: dict = {}

    def find(self, x):
        self.p.setdefault(x, x)
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if repr(ry) < repr(rx):
                rx, ry = ry, rx
            self.p[ry] = rx

    def groups(self, items) -> list[list]:
        out: dict = {}
        for x in items:
            out.setdefault(self.find(x), []).append(x)
        return sorted((sorted(g, key=repr) for g in out.values()), key=lambda g: repr(g[0]))


@dataclass(frozen=True)
class ShrunkenSubmanifold:
    """``Y``: a set of blocks of one side, shrunk away from its frontier."""

    complex: BlockComplex
    keys: frozenset

    @property
    def blocks(self) -> list[Block]:
        d = self.complex.decomposition
        return [d.blocks[k] for k in sorted(self.keys)]

    @cached_property
    def _cells(self) -> tuple[frozenset, frozenset]:
        d = self.complex.decomposition
        K = frozenset().union(*(d.closure_global[k] for k in self.keys)) if self.keys else frozenset()
        others = [k for k in self.complex.keys if k not in self.keys]
        outside = frozenset().union(*(d.closure_global[k] for k in others)) if others else frozenset()
        return K, K & outside

    @property
    def frontier_cells(self) -> frozenset:
        return self._cells[1]

    @cached_property
    def _stats(self) -> dict:
        d = self.complex.decomposition
        K, L = self._cells
        chi = chi_v = chi_k = chi_l = 0
        pairs_y: list[tuple] = []
        mixed2: list[tuple] = []
        mixed3: list[tuple] = []
        for key, g in d.chains.items():
            if g[-1] not in K:
                continue
            sign = (-1) ** (len(g) - 1)
            chi_k += sign
            inl = [c in L for c in g]
            if all(inl):
                chi_l += sign
            elif not any(inl):
                chi += sign
                if len(g) == 2:
                    pairs_y.append(g)
            else:
                chi_v -= sign
                if len(g) == 2:
                    mixed2.append(key)
                elif len(g) == 3:
                    mixed3.append(key)
        if chi_k - chi_l != chi - chi_v:
            raise BlockError("Euler characteristics of Y, its frontier and its vertical boundary disagree")
        # components of Y
        dsu = _DSU()
        cells_y = {c for c in K if c not in L}
        for c in cells_y:
            dsu.find(c)
        for g in pairs_y:
            dsu.union(g[0], g[1])
        comps = dsu.groups(cells_y)
        # components of the vertical boundary
        vs = _DSU()
        for key in mixed2:
            vs.find(key)
        for key in mixed3:
            _, ch = d.chain_local[key]
            g = d.chains[key]
            subs = [pos for pos in ((0, 1), (0, 2), (1, 2)) if (g[pos[0]] in L) != (g[pos[1]] in L)]
            ks = [d.subchain_key(key, pos) for pos in subs]
            for x in ks[1:]:
                vs.union(ks[0], x)
        vcomps = vs.groups(mixed2)
        # horizontal boundary: surface cells of Y away from the frontier
        horiz = {c for c in cells_y if c[0] in "DAP"}
        hs = _DSU()
        for c in horiz:
            hs.find(c)
        for g in pairs_y:
            if g[0] in horiz and g[1] in horiz:
                hs.union(g[0], g[1])
        hcomps = hs.groups(horiz)
        return {"chi": chi, "chi_v": chi_v, "components": comps, "vertical": vcomps, "horizontal": hcomps}

    @property
    def euler_characteristic(self) -> int:
        return self._stats["chi"]

    @property
    def vertical_boundary_count(self) -> int:
        return len(self._stats["vertical"])

    @property
    def vertical_boundary_euler(self) -> int:
        return self._stats["chi_v"]

    @property
    def component_count(self) -> int:
        return len(self._stats["components"])

    @property
    def complexity(self) -> int:
        return self.euler_characteristic + self.vertical_boundary_count

    @property
    def is_large(self) -> bool:
        return self.component_count == 1 and self.complexity <= 0

    def horizontal_disks(self) -> frozenset:
        return frozenset(c for comp in self._stats["horizontal"] for c in comp if c[0] == "D")

    def frontier_rectangles(self) -> list[tuple]:
        """Face regions of the frontier that are vertical rectangles."""
        d = self.complex.decomposition
        out = []
        for c in sorted(self.frontier_cells):
            if c[0] == "R" and d.face_regions[c[1]][c[2]].is_rectangle:
                out.append(c)
        return out

    def components(self) -> list["ShrunkenSubmanifold"]:
        out = []
        for comp in self._stats["components"]:
            keys = frozenset((c[1], c[2]) for c in comp if c[0] == "B")
            out.append(ShrunkenSubmanifold(self.complex, keys))
        return out

    def boundaries(self) -> tuple[list, list]:
        """Horizontal and vertical boundary components.

        Horizontal components are sets of surface cells; each vertical
        component is reported with its Euler characteristic and the frontier
        rectangles it runs through.
        """
        d = self.complex.decomposition
        K, L = self._cells
        vertical = []
        for comp in self._stats["vertical"]:
            cells = set()
            for key in comp:
                g = d.chains[key]
                cells.update(c for c in g if c in L)
            rects = sorted(c for c in cells if c[0] == "R" and d.face_regions[c[1]][c[2]].is_rectangle)
            vertical.append({"frontier_cells": len(cells), "rectangles": rects, "core_length": len(rects)})
        return [sorted(c) for c in self._stats["horizontal"]], vertical

    def as_dict(self) -> dict:
        h, v = self.boundaries()
        return {
            "blocks": [list(k) for k in sorted(self.keys)],
            "euler_characteristic": self.euler_characteristic,
            "horizontal_boundary": len(h),
            "vertical_boundary": self.vertical_boundary_count,
            "complexity": self.complexity,
            "components": self.component_count,
            "large": self.is_large,
        }


def decompose_blocks(Hr, tri: Triangulation | None = None) -> tuple[BlockComplex, BlockComplex]:
    """Blocks of the two sides of ``H``; accepts a realization or a surface."""
    if not isinstance(Hr, GeometricRealization):
        if tri is None:
            raise ValueError("a triangulation is needed to realize the surface")
        Hr = realize(Hr, tri)
    if not Hr.tri.is_closed:
        log.warning("block decomposition of a triangulation with boundary")
    if Hr.disk_count == 0:
        log.warning("empty surface: a single complex covers the whole manifold")
    d = Decomposition(Hr)
    keys = sorted(d.blocks)
    V = BlockComplex("V", d, tuple(k for k in keys if d.blocks[k].side == "V"))
    W = BlockComplex("W", d, tuple(k for k in keys if d.blocks[k].side == "W"))
    return V, W


def core_block_bound(t: int) -> int:
    return 6 * t + 1


def count_core_blocks(X: BlockComplex) -> int:
    n = sum(1 for b in X.blocks if not b.is_product)
    bound = core_block_bound(X.tet_count)
    if n > bound:
        raise BlockError(f"side {X.side} has {n} core blocks, more than 6t+1 = {bound}")
    return n


def boundaries(Y: ShrunkenSubmanifold) -> tuple[list, list]:
    return Y.boundaries()


def complexity(Y: ShrunkenSubmanifold) -> int:
    return Y.complexity


REMOVAL_BOUND = 32


@dataclass(frozen=True)
class RemovalReport:
    block: tuple[int, int]
    before: int
    after: int

    @property
    def delta(self) -> int:
        return self.after - self.before

    @property
    def ok(self) -> bool:
        return self.delta <= REMOVAL_BOUND


def remove_block(Y: ShrunkenSubmanifold, B) -> tuple[ShrunkenSubmanifold, RemovalReport]:
    key = B.key if isinstance(B, Block) else tuple(B)
    if key not in Y.keys:
        raise BlockError(f"block {key} is not in Y")
    Y2 = ShrunkenSubmanifold(Y.complex, Y.keys - {key})
    rep = RemovalReport(key, Y.complexity, Y2.complexity)
    if not rep.ok:
        raise BlockError(f"removing {key} raised complexity by {rep.delta} > {REMOVAL_BOUND}")
    return Y2, rep
