"""From a blocked splitting to the I-bundle ``Y1`` and its frontier graph.

``V1`` is the union of the product blocks of ``V``.  ``W2`` keeps the
product blocks of ``W`` whose horizontal boundary lies in that of ``V1``.
``Z2`` and ``Y1`` are minimum complexity components, the section surface
collapses ``Y1`` along its fibres, and the graph ``Theta_F`` is read off
the vertical rectangles of the frontier of ``Y1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .blocks import BlockComplex, ShrunkenSubmanifold, _DSU, count_core_blocks, decompose_blocks
from .bounds import check, derived_triangulation_bounds
from .nsurf import euler_characteristic

log = logging.getLogger(__name__)


class PipelineError(ValueError):
    pass


def _block_disks(Y: ShrunkenSubmanifold) -> frozenset:
    return frozenset(("D", b.tet, di) for b in Y.blocks for di in b.disks)


def _order(Y: ShrunkenSubmanifold) -> tuple:
    return tuple(sorted(Y.keys))


def build_V1_W2(V: BlockComplex, W: BlockComplex) -> tuple[ShrunkenSubmanifold, ShrunkenSubmanifold]:
    V1 = V.submanifold([b.key for b in V.blocks if b.is_product])
    top = V1.horizontal_disks()
    chosen = [b.key for b in W.blocks
              if b.is_product and all(("D", b.tet, di) in top for di in b.disks)]
    W2 = W.submanifold(chosen)
    if not V1.keys:
        log.warning("V has no product blocks; V1 and W2 are empty")
    if not W2.horizontal_disks() <= top:
        raise PipelineError("horizontal boundary of W2 is not contained in that of V1")
    return V1, W2


def select_components(V1: ShrunkenSubmanifold, W2: ShrunkenSubmanifold, reverse_ties: bool = False):
    """Minimum complexity component ``Z2`` of ``W2`` and the matching ``Y1``.

    Ties go to the lexicographically first block list (last with
    ``reverse_ties``).
    """
    if not W2.keys:
        raise PipelineError("W2 is empty")

    def best(comps):
        comps = sorted(comps, key=_order, reverse=reverse_ties)
        return min(comps, key=lambda Y: Y.complexity)

    Z2 = best(W2.components())
    disks = _block_disks(Z2)
    near = [Y for Y in V1.components() if _block_disks(Y) & disks]
    if not near:
        raise PipelineError("no component of V1 meets the horizontal boundary of Z2")
    return Z2, best(near)


# -- section surface ---------------------------------------------------------------


@dataclass
class SectionSurface:
    """Base of ``Y1``: one 2-cell per product block."""

    faces: int
    edges: int
    vertices: int
    boundary_count: int
    euler_characteristic: int
    complexity: int
    witness: list | None
    annulus: list | None

    @property
    def is_large(self) -> bool:
        return self.complexity <= 0

    def as_dict(self) -> dict:
        return {
            "faces": self.faces,
            "edges": self.edges,
            "vertices": self.vertices,
            "boundary_count": self.boundary_count,
            "euler_characteristic": self.euler_characteristic,
            "complexity": self.complexity,
            "large": self.is_large,
            "witness": self.witness,
            "vertical_annulus": self.annulus,
        }


def _block_cells(Y: ShrunkenSubmanifold, kind: str) -> dict[tuple, set]:
    d = Y.complex.decomposition
    return {k: {c for c in d.closure_global[k] if c[0] == kind} for k in sorted(Y.keys)}


def _fibres_consistent(Y: ShrunkenSubmanifold) -> None:
    d = Y.complex.decomposition
    for k in Y.keys:
        b = d.blocks[k]
        if not b.is_product:
            raise PipelineError(f"block {k} of Y1 is a {b.kind} block, not a product")
    # neighbouring product blocks must meet along vertical faces only
    for reg, bl in d.region_block.items():
        inside = [x for x in bl if x in Y.keys]
        if inside and not d.face_regions[reg[0]][reg[1]].is_rectangle:
            raise PipelineError(f"blocks {inside} meet along face region {reg}, which is not a vertical rectangle")


def _boundary_circles(Y: ShrunkenSubmanifold) -> int:
    """Boundary circles of the shrunken base, traced through local incidences.

    A frontier cell seen from a block is a node; frontier cells of one
    block that touch are joined, and a corner seen from two blocks across a
    shared interior face is joined as well.
    """
    d = Y.complex.decomposition
    _, L = Y._cells
    uf = _DSU()
    regions = _block_cells(Y, "R")
    corners = _block_cells(Y, "S")
    nodes = []
    for k in sorted(Y.keys):
        for c in sorted(regions[k] | corners[k]):
            if c in L:
                nodes.append((k, c))
                uf.find((k, c))
        for r in sorted(regions[k]):
            if r not in L:
                continue
            for s in d.segment_cells(r[1], r[2]):
                if s in L:
                    uf.union((k, r), (k, s))
    for reg, bl in sorted(d.region_block.items()):
        if len(bl) != 2 or bl[0] not in Y.keys or bl[1] not in Y.keys:
            continue
        rc = ("R", reg[0], reg[1])
        if rc in L:
            continue
        for s in d.segment_cells(reg[0], reg[1]):
            if s in L:
                uf.union((bl[0], s), (bl[1], s))
    return len({uf.find(n) for n in nodes})


def _dual_graph(Y: ShrunkenSubmanifold) -> list[tuple]:
    """Interior faces of the base as ``(block, block, region, flip)``.

    ``flip`` is 1 when the lower disk of one block continues into the upper
    disk of the other, so the fibre reverses crossing this face.
    """
    d = Y.complex.decomposition
    r = d.r
    _, L = Y._cells
    seen: dict = {}
    for k in sorted(Y.keys):
        b = d.blocks[k]
        a = b.tet
        for f, rid in b.regions:
            fc, p = d.to_rep[(a, f)]
            if ("R", fc, rid) in L:
                continue
            arc = d.face_regions[fc][rid].arcs[0]
            pos = next(i for i, di in enumerate(b.disks)
                       if any(g == f and (p[v], kk) == arc for g, v, kk in r.disks[a][di].arcs))
            seen.setdefault((fc, rid), []).append((k, pos))
    edges = []
    for reg, inc in sorted(seen.items()):
        if len(inc) != 2:
            raise PipelineError(f"face region {reg} has {len(inc)} incidences with Y1")
        (b1, p1), (b2, p2) = inc
        edges.append((b1, b2, reg, p1 ^ p2))
    return edges


def _separates(keys: list, edges: list[tuple], chosen: set) -> bool:
    """Whether the dual curve crossing exactly the ``chosen`` faces separates."""
    adj: dict = {k: [] for k in keys}
    for i, (a, b, _, _) in enumerate(edges):
        w = 1 if i in chosen else 0
        adj[a].append((b, w))
        adj[b].append((a, w))
    color = {keys[0]: 0}
    todo = [keys[0]]
    while todo:
        x = todo.pop()
        for y, w in adj[x]:
            want = color[x] ^ w
            if y not in color:
                color[y] = want
                todo.append(y)
            elif color[y] != want:
                return False
    return True


def _nonseparating_cycle(Y: ShrunkenSubmanifold) -> tuple[list, list] | None:
    """An orientation preserving dual cycle that does not separate the base.

    Candidates are the fundamental cycles of a spanning tree of the dual
    graph and sums of two of them.  Returns the blocks visited and the
    faces crossed.
    """
    keys = sorted(Y.keys)
    if not keys:
        return None
    edges = _dual_graph(Y)
    adj: dict = {k: [] for k in keys}
    for i, (a, b, _, _) in enumerate(edges):
        adj[a].append((b, i))
        adj[b].append((a, i))
    parent = {keys[0]: None}
    order = [keys[0]]
    for x in order:
        for y, i in adj[x]:
            if y not in parent:
                parent[y] = (x, i)
                order.append(y)

    def path(n) -> set:
        out = set()
        while parent[n] is not None:
            n, i = parent[n]
            out ^= {i}
        return out

    tree = {p[1] for p in parent.values() if p is not None}
    cycles = [path(a) ^ path(b) ^ {i} for i, (a, b, _, _) in enumerate(edges) if i not in tree]
    candidates = cycles + [x ^ y for j, x in enumerate(cycles) for y in cycles[j + 1:]]
    for cyc in candidates:
        if sum(edges[i][3] for i in cyc) % 2 == 0 and not _separates(keys, edges, cyc):
            blocks = sorted({k for i in cyc for k in edges[i][:2]})
            return [list(k) for k in blocks], [list(edges[i][2]) for i in sorted(cyc)]
    return None


def section_surface(Y1: ShrunkenSubmanifold) -> SectionSurface:
    _fibres_consistent(Y1)
    _, L = Y1._cells
    regions = set().union(*_block_cells(Y1, "R").values()) if Y1.keys else set()
    corners = set().union(*_block_cells(Y1, "S").values()) if Y1.keys else set()
    F = len(Y1.keys)
    E = sum(1 for c in regions if c not in L)
    Vn = sum(1 for c in corners if c not in L)
    chi = Vn - E + F
    b = _boundary_circles(Y1)
    c = chi + b
    witness = annulus = None
    if c <= 0 and Y1.component_count == 1:
        found = _nonseparating_cycle(Y1)
        if found is not None:
            # the fibres over the cycle meet each crossed face in one vertical arc
            witness, annulus = found
    return SectionSurface(F, E, Vn, b, chi, c, witness, annulus)


# -- Theta graph -------------------------------------------------------------------


@dataclass
class ThetaGraph:
    vertices: list
    edges: list  # (region cell, (segment cell, segment cell))
    t: int

    @property
    def valence(self) -> dict:
        out = {v: 0 for v in self.vertices}
        for _, (a, b) in self.edges:
            out[a] += 1
            out[b] += 1
        return out

    @property
    def min_valence(self) -> int | None:
        v = self.valence
        return min(v.values()) if v else None

    def checks(self) -> list[dict]:
        out = [
            check("Theta edges <= 4t", len(self.edges), 4 * self.t, strict=False),
            check("Theta vertices <= 4t", len(self.vertices), 4 * self.t, strict=False),
        ]
        if self.vertices:
            out.append(check("Theta valence >= 2", 2, self.min_valence, strict=False))
        return out

    def as_dict(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "edges": [[list(r), [list(a), list(b)]] for r, (a, b) in self.edges],
            "valence": [[list(v), n] for v, n in sorted(self.valence.items())],
            "checks": self.checks(),
        }


def theta_graph(Y1: ShrunkenSubmanifold) -> ThetaGraph:
    d = Y1.complex.decomposition
    edges = []
    verts = set()
    for r in Y1.frontier_rectangles():
        segs = d.segment_cells(r[1], r[2])
        if len(segs) != 2:
            raise PipelineError(f"frontier rectangle {r} has {len(segs)} vertical sides")
        edges.append((r, tuple(segs)))
        verts.update(segs)
    g = ThetaGraph(sorted(verts), edges, Y1.complex.tet_count)
    for c in g.checks():
        if not c["holds"]:
            raise PipelineError(f"Theta graph bound violated: {c['name']} ({c['lhs']} vs {c['rhs']})")
    return g


# -- checks ------------------------------------------------------------------------


def complexity_chain_check(result: "PipelineResult", g: Fraction | int) -> list[dict]:
    t = result.t
    W2, Z2, Y1 = result.W2, result.Z2, result.Y1
    out = [
        check("c(W2) <= 1 - g + 640t", W2.complexity, 1 - g + 640 * t, strict=False),
        check("|d_v W2| < 104t", W2.vertical_boundary_count, 104 * t),
    ]
    if Z2 is not None and W2.complexity <= 0:
        out.append(check("c(Z2) <= c(W2)/104t", Z2.complexity, Fraction(W2.complexity, 104 * t), strict=False))
        out.append(check("c(W2)/104t <= (1-g)/104t + 8", Fraction(W2.complexity, 104 * t),
                         Fraction(1 - g, 104 * t) + 8, strict=False))
        if Y1 is not None:
            out.append(check("c(Y1) <= c(Z2)/2", Y1.complexity, Fraction(Z2.complexity, 2), strict=False))
    return out


def size_bounds_check(t: int, theta: ThetaGraph | None = None) -> list[dict]:
    if theta is not None:
        beta = len(theta.edges)
        alpha = len(theta.vertices) * (6 * t - 1)
    else:
        beta, alpha = 4 * t, 4 * t * (6 * t - 1)
    out = [
        check("beta arcs <= 4t", beta, 4 * t, strict=False),
        check("alpha arcs <= 24t^2", alpha, 24 * t * t, strict=False),
    ]
    out.extend(derived_triangulation_bounds(t).checks)
    return out


# -- driver ------------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    reverse_ties: bool = False


@dataclass
class PipelineResult:
    t: int
    chi_H: int
    V1: ShrunkenSubmanifold
    W2: ShrunkenSubmanifold
    Z2: ShrunkenSubmanifold | None
    Y1: ShrunkenSubmanifold | None
    section: SectionSurface | None
    theta: ThetaGraph | None
    stats: dict = field(default_factory=dict)

    @property
    def genus(self) -> Fraction:
        return 1 - Fraction(self.chi_H, 2)

    def checks(self) -> list[dict]:
        out = complexity_chain_check(self, self.genus)
        out.append(check("d_h W2 within d_h V1", len(self.W2.horizontal_disks() - self.V1.horizontal_disks()), 0,
                         strict=False))
        if self.section is not None:
            out.append(check("c(section) = c(Y1)", self.section.complexity, self.Y1.complexity, strict=False))
            out.append(check("c(Y1) = c(section)", self.Y1.complexity, self.section.complexity, strict=False))
        if self.theta is not None:
            out.extend(self.theta.checks())
        out.extend(size_bounds_check(self.t, self.theta))
        return out

    @property
    def ok(self) -> bool:
        return all(c["holds"] for c in self.checks())

    def as_dict(self) -> dict:
        g = self.genus
        return {
            "t": self.t,
            "euler_characteristic_H": self.chi_H,
            "genus_H": str(g),
            "V1": self.V1.as_dict(),
            "W2": self.W2.as_dict(),
            "Z2": self.Z2.as_dict() if self.Z2 is not None else None,
            "Y1": self.Y1.as_dict() if self.Y1 is not None else None,
            "Y1_vertical_boundary": self.Y1.boundaries()[1] if self.Y1 is not None else None,
            "section": self.section.as_dict() if self.section else None,
            "theta": self.theta.as_dict() if self.theta else None,
            "stats": self.stats,
            "checks": self.checks(),
            "ok": self.ok,
        }


def run_pipeline(Hr, tri=None, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    V, W = decompose_blocks(Hr, tri)
    r = V.decomposition.r
    t = r.tri.tet_count
    chi = euler_characteristic(r.surface, r.tri)
    V1, W2 = build_V1_W2(V, W)
    Z2 = Y1 = section = theta = None
    if W2.keys:
        Z2, Y1 = select_components(V1, W2, config.reverse_ties)
        section = section_surface(Y1)
        theta = theta_graph(Y1)
    stats = {
        "core_blocks_V": count_core_blocks(V),
        "core_blocks_W": count_core_blocks(W),
        "product_blocks_V": sum(b.is_product for b in V.blocks),
        "product_blocks_W": sum(b.is_product for b in W.blocks),
        "V1_components": V1.component_count,
        "W2_components": W2.component_count,
        "vertical_boundary_W2": W2.vertical_boundary_count,
        "theta_edges": len(theta.edges) if theta else 0,
        "theta_vertices": len(theta.vertices) if theta else 0,
    }
    return PipelineResult(t, chi, V1, W2, Z2, Y1, section, theta, stats)
