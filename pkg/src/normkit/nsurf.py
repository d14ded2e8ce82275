"""Normal and almost normal surfaces in standard coordinates.

Per tetrahedron a surface has 4 triangle coordinates (triangle ``v`` cuts off
corner ``v``) and 3 quad coordinates (quad ``k`` separates the corner pairs
in ``QUAD_PAIRS[k]``).  Almost normal pieces are kept symbolically next to
the integer vector.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .tri import EDGES, EDGE_INDEX, Triangulation, face_vertices

log = logging.getLogger(__name__)

QUAD_PAIRS: dict[int, tuple[tuple[int, int], tuple[int, int]]] = {
    0: ((0, 1), (2, 3)),
    1: ((0, 2), (1, 3)),
    2: ((0, 3), (1, 2)),
}

# a disk type inside one tetrahedron: ("t", v), ("q", k) or ("o", k)
DiskType = tuple[str, int]


def quad_partner(k: int, v: int) -> int:
    for pair in QUAD_PAIRS[k]:
        if v in pair:
            return pair[0] if pair[1] == v else pair[1]
    raise ValueError(v)


def quad_separating(i: int, j: int) -> list[int]:
    """Quad types that separate corner i from corner j."""
    return [k for k in range(3) if quad_partner(k, i) != j]


def quad_type_of_pair(i: int, j: int) -> int:
    return next(k for k in range(3) if quad_partner(k, i) == j)


def disk_crossings(d: DiskType) -> dict[int, int]:
    """Edge index -> number of times the disk crosses that tetrahedron edge."""
    kind, x = d
    out = {}
    for e, (i, j) in enumerate(EDGES):
        if kind == "t":
            n = int(x in (i, j))
        elif kind == "q":
            n = int(quad_partner(x, i) != j)
        else:
            n = 2 if quad_partner(x, i) == j else 1
        if n:
            out[e] = n
    return out


def disk_arcs(d: DiskType) -> list[tuple[int, int]]:
    """Normal arcs of the disk boundary as (face, corner cut off)."""
    kind, x = d
    if kind == "t":
        return [(f, x) for f in range(4) if f != x]
    if kind == "q":
        return [(f, quad_partner(x, f)) for f in range(4)]
    # octagon: two arcs per face, cutting off the corners not paired with the face
    return [(f, v) for f in range(4) for v in face_vertices(f) if v != quad_partner(x, f)]


def disk_quad_type(d: DiskType) -> int | None:
    return d[1] if d[0] in "qo" else None


PIECE_KINDS = ("oct0", "oct1", "oct2")


@dataclass(frozen=True)
class AlmostNormalPiece:
    """An octagon (``oct<k>``) or a tube between two disk types (``tube:t0+q1``)."""

    tet: int
    kind: str

    def __post_init__(self):
        self.disks()  # validates the kind string

    @property
    def is_octagon(self) -> bool:
        return self.kind.startswith("oct")

    def disks(self) -> tuple[DiskType, ...]:
        if self.kind in PIECE_KINDS:
            return (("o", int(self.kind[3])),)
        if self.kind.startswith("tube:"):
            parts = self.kind[5:].split("+")
            if len(parts) == 2:
                out = []
                for p in parts:
                    if len(p) == 2 and p[0] in "tq" and p[1].isdigit():
                        d = (p[0], int(p[1]))
                        if (d[0] == "t" and d[1] < 4) or (d[0] == "q" and d[1] < 3):
                            out.append(d)
                if len(out) == 2:
                    a, b = out
                    if a[0] == "q" and b[0] == "q" and a != b:
                        raise ValueError(f"tube between different quad types is not embedded: {self.kind}")
                    return tuple(sorted(out, key=lambda d: (d[0] != "t", d)))
        raise ValueError(f"unknown almost normal piece kind {self.kind!r}")

    @property
    def euler_characteristic(self) -> int:
        return 1 if self.is_octagon else 0


@dataclass(frozen=True)
class NormalSurfaceVector:
    coords: tuple[int, ...]
    name: str | None = None

    @property
    def tet_count(self) -> int:
        return len(self.coords) // 7

    def tri(self, a: int, v: int) -> int:
        return self.coords[7 * a + v]

    def quad(self, a: int, k: int) -> int:
        return self.coords[7 * a + 4 + k]

    def count(self, a: int, d: DiskType) -> int:
        if d[0] == "t":
            return self.tri(a, d[1])
        if d[0] == "q":
            return self.quad(a, d[1])
        return 0

    def is_empty(self) -> bool:
        return not any(self.coords)

    @classmethod
    def zero(cls, tet_count: int, name: str | None = None) -> "NormalSurfaceVector":
        return cls((0,) * (7 * tet_count), name)

    @classmethod
    def from_rows(cls, rows, name: str | None = None) -> "NormalSurfaceVector":
        coords: list[int] = []
        for tris, quads in rows:
            coords.extend(tris)
            coords.extend(quads)
        return cls(tuple(coords), name)


@dataclass(frozen=True)
class AlmostNormalSurface:
    base: NormalSurfaceVector
    exceptional: AlmostNormalPiece | None = None

    @property
    def tet_count(self) -> int:
        return self.base.tet_count

    @property
    def name(self) -> str | None:
        return self.base.name


def _split(s) -> tuple[NormalSurfaceVector, AlmostNormalPiece | None]:
    if isinstance(s, AlmostNormalSurface):
        return s.base, s.exceptional
    return s, None


def disk_counts(s, a: int) -> dict[DiskType, int]:
    """All disks in tetrahedron ``a``, counting a tube's two disks and any octagon."""
    base, piece = _split(s)
    out: dict[DiskType, int] = {}
    for v in range(4):
        if base.tri(a, v):
            out[("t", v)] = base.tri(a, v)
    for k in range(3):
        if base.quad(a, k):
            out[("q", k)] = base.quad(a, k)
    if piece is not None and piece.tet == a:
        for d in piece.disks():
            out[d] = out.get(d, 0) + 1
    return out


def edge_crossings_in_tet(s, a: int, e: int) -> int:
    return sum(n * disk_crossings(d).get(e, 0) for d, n in disk_counts(s, a).items())


def arcs_in_face(s, a: int, f: int, v: int) -> int:
    """Number of normal arcs cutting off corner ``v`` on face ``f`` of tetrahedron ``a``."""
    return sum(n * disk_arcs(d).count((f, v)) for d, n in disk_counts(s, a).items())


@dataclass
class SurfaceReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class SurfaceError(ValueError):
    pass


def _check_dims(s, tri: Triangulation) -> None:
    base, piece = _split(s)
    if len(base.coords) != 7 * tri.tet_count:
        raise SurfaceError(f"vector has {len(base.coords)} coordinates, triangulation needs {7 * tri.tet_count}")
    if piece is not None and not 0 <= piece.tet < tri.tet_count:
        raise SurfaceError(f"almost normal piece in nonexistent tetrahedron {piece.tet}")


def validate_surface(s, tri: Triangulation) -> SurfaceReport:
    """Admissibility and matching violations; empty iff ``s`` is an embedded surface."""
    _check_dims(s, tri)
    base, piece = _split(s)
    report = SurfaceReport()
    if any(x < 0 for x in base.coords):
        report.violations.append("negative coordinate")
        return report
    for a in range(tri.tet_count):
        counts = disk_counts(s, a)
        quad_types = sorted({disk_quad_type(d) for d in counts if d[0] == "q"})
        if len(quad_types) > 1:
            report.violations.append(f"tetrahedron {a}: quad types {quad_types} are not simultaneously embeddable")
        if piece is not None and piece.tet == a and piece.is_octagon and quad_types:
            report.violations.append(f"tetrahedron {a}: octagon cannot coexist with quads")
    for (a, f), (b, g, p) in sorted(tri.gluings.items()):
        if (a, f) > (b, g):
            continue
        for v in face_vertices(f):
            mine = arcs_in_face(s, a, f, v)
            theirs = arcs_in_face(s, b, g, p[v])
            if mine != theirs:
                report.violations.append(
                    f"matching: face ({a},{f}) arc cutting {v} has {mine}, glued face ({b},{g}) has {theirs}"
                )
    return report


def edge_class_crossings(s, tri: Triangulation) -> list[int]:
    """Crossings of the surface with each edge class; checks all representatives agree."""
    out = []
    for ci, members in enumerate(tri.skeleta.edge_classes):
        counts = {edge_crossings_in_tet(s, a, e) for a, e, _ in members}
        if len(counts) != 1:
            raise SurfaceError(f"edge class {ci}: representatives disagree on crossing count {sorted(counts)}")
        out.append(counts.pop())
    return out


def weight(s, tri: Triangulation) -> int:
    _check_dims(s, tri)
    return sum(edge_class_crossings(s, tri))


def boundary_weight(s, tri: Triangulation) -> int:
    _check_dims(s, tri)
    if tri.is_closed:
        log.warning("boundary_weight on a closed triangulation is 0 by definition")
        return 0
    crossings = edge_class_crossings(s, tri)
    return sum(crossings[ci] for ci in sorted(tri.boundary_edge_classes))


def arc_count(s, tri: Triangulation) -> int:
    total = 0
    for members in tri.skeleta.face_classes:
        a, f = members[0]
        total += sum(arcs_in_face(s, a, f, v) for v in face_vertices(f))
    return total


def euler_characteristic(s, tri: Triangulation) -> int:
    _check_dims(s, tri)
    base, piece = _split(s)
    pieces = sum(base.coords)
    if piece is not None:
        pieces += piece.euler_characteristic
    return sum(edge_class_crossings(s, tri)) - arc_count(s, tri) + pieces


def compatible(J: NormalSurfaceVector, K: NormalSurfaceVector, tri: Triangulation | None = None) -> bool:
    if len(J.coords) != len(K.coords):
        raise SurfaceError("vectors have different dimensions")
    for a in range(J.tet_count):
        qj = {k for k in range(3) if J.quad(a, k)}
        qk = {k for k in range(3) if K.quad(a, k)}
        if qj and qk and qj != qk:
            return False
    return True


def haken_sum(J: NormalSurfaceVector, K: NormalSurfaceVector, tri: Triangulation | None = None) -> NormalSurfaceVector:
    if isinstance(J, AlmostNormalSurface) or isinstance(K, AlmostNormalSurface):
        raise SurfaceError("Haken sum is defined for normal surfaces only")
    if not compatible(J, K):
        raise SurfaceError("surfaces are not compatible (different quad types in some tetrahedron)")
    name = f"{J.name}+{K.name}" if J.name and K.name else None
    return NormalSurfaceVector(tuple(x + y for x, y in zip(J.coords, K.coords)), name)


def vertex_link(tri: Triangulation, vertex_class: int) -> NormalSurfaceVector:
    coords = [0] * (7 * tri.tet_count)
    for a, v in tri.skeleta.vertex_classes[vertex_class]:
        coords[7 * a + v] += 1
    return NormalSurfaceVector(tuple(coords), f"link{vertex_class}")


# ---- text and JSON formats ----


def serialize_surface(s) -> str:
    base, piece = _split(s)
    lines = [f"surface {base.name or 'unnamed'}"]
    for a in range(base.tet_count):
        t = " ".join(str(base.tri(a, v)) for v in range(4))
        q = " ".join(str(base.quad(a, k)) for k in range(3))
        lines.append(f"tet {a} : {t} | {q}")
    if piece is not None:
        lines.append(f"piece {piece.tet} {piece.kind}")
    return "\n".join(lines) + "\n"


def parse_surfaces(text: str) -> list:
    """Parse one or more ``surface`` blocks."""
    blocks: list[tuple[str, dict[int, tuple], AlmostNormalPiece | None]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "surface":
                blocks.append([line[len("surface"):].strip() or None, {}, None])  # type: ignore[arg-type]
            elif parts[0] == "tet":
                if not blocks:
                    raise SurfaceError("'tet' line before 'surface' header")
                a = int(parts[1])
                if parts[2] != ":" or parts[7] != "|" or len(parts) != 11:
                    raise SurfaceError("expected 'tet <i> : t0 t1 t2 t3 | q0 q1 q2'")
                tris = tuple(int(x) for x in parts[3:7])
                quads = tuple(int(x) for x in parts[8:11])
                if a in blocks[-1][1]:
                    raise SurfaceError(f"duplicate line for tetrahedron {a}")
                blocks[-1][1][a] = (tris, quads)
            elif parts[0] == "piece":
                if not blocks:
                    raise SurfaceError("'piece' line before 'surface' header")
                if blocks[-1][2] is not None:
                    raise SurfaceError("at most one almost normal piece per surface")
                blocks[-1][2] = AlmostNormalPiece(int(parts[1]), parts[2])
            else:
                raise SurfaceError(f"unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise SurfaceError(f"line {lineno}: {exc}") from None
    out = []
    for name, rows, piece in blocks:
        if sorted(rows) != list(range(len(rows))):
            raise SurfaceError(f"surface {name}: tetrahedron lines must cover 0..n-1")
        base = NormalSurfaceVector.from_rows([rows[a] for a in range(len(rows))], name)
        out.append(AlmostNormalSurface(base, piece) if piece is not None else base)
    return out


def parse_surface(text: str):
    surfaces = parse_surfaces(text)
    if len(surfaces) != 1:
        raise SurfaceError(f"expected exactly one surface, found {len(surfaces)}")
    return surfaces[0]


def surface_to_dict(s) -> dict:
    base, piece = _split(s)
    return {
        "name": base.name,
        "tets": [
            {"tri": [base.tri(a, v) for v in range(4)], "quad": [base.quad(a, k) for k in range(3)]}
            for a in range(base.tet_count)
        ],
        "piece": None if piece is None else {"tet": piece.tet, "kind": piece.kind},
    }


def surface_from_dict(d: dict):
    base = NormalSurfaceVector.from_rows([(r["tri"], r["quad"]) for r in d["tets"]], d.get("name"))
    if d.get("piece"):
        return AlmostNormalSurface(base, AlmostNormalPiece(d["piece"]["tet"], d["piece"]["kind"]))
    return base


def surface_to_json(s) -> str:
    return json.dumps(surface_to_dict(s), sort_keys=True)
