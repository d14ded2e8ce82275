"""Triangulations of 3-manifolds given by face gluing tables.

Tetrahedron corners are labelled 0..3 and face ``f`` is the face opposite
corner ``f``.  A gluing sends ``(a, f)`` to ``(b, g, perm)`` where ``perm``
is a permutation of corner labels with ``perm[f] == g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations

Perm = tuple[int, int, int, int]

# tetrahedron edges, indexed 0..5
EDGES: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {e: i for i, e in enumerate(EDGES)}
EDGE_INDEX.update({(j, i): k for (i, j), k in list(EDGE_INDEX.items())})


def face_vertices(f: int) -> tuple[int, int, int]:
    return tuple(v for v in range(4) if v != f)  # type: ignore[return-value]


def face_edges(f: int) -> tuple[int, int, int]:
    """Edge indices lying in face ``f``."""
    return tuple(k for k, (i, j) in enumerate(EDGES) if f not in (i, j))  # type: ignore[return-value]


def perm_inverse(p: Perm) -> Perm:
    inv = [0] * 4
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)  # type: ignore[return-value]


def perm_sign(p: Perm) -> int:
    sign = 1
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                sign = -sign
    return sign


def perm_str(p: Perm) -> str:
    return "".join(str(x) for x in p)


ALL_PERMS: tuple[Perm, ...] = tuple(permutations(range(4)))  # type: ignore[assignment]


class TriangulationError(ValueError):
    """Malformed triangulation text or an invalid gluing table."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnionFind:
    """Union-find with an optional parity bit on each element."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.parity = [0] * n

    def find(self, x: int) -> tuple[int, int]:
        path = []
        root = x
        while self.parent[root] != root:
            path.append(root)
            root = self.parent[root]
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parent[node] = root
            self.parity[node] = acc
        return root, (self.parity[x] if path else 0)

    def union(self, x: int, y: int, parity: int = 0) -> bool:
        """Join x and y; return False if this contradicts a recorded parity."""
        rx, px = self.find(x)
        ry, py = self.find(y)
        if rx == ry:
            return (px ^ py) == parity
        if rx > ry:
            rx, ry, px, py = ry, rx, py, px
        self.parent[ry] = rx
        self.parity[ry] = px ^ py ^ parity
        return True

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            groups.setdefault(self.find(x)[0], []).append(x)
        return sorted(groups.values())


@dataclass(frozen=True)
class SkeletonSummary:
    vertex_classes: list[list[tuple[int, int]]]
    # each edge class is a list of (tet, edge index, reversed?) relative to its first member
    edge_classes: list[list[tuple[int, int, bool]]]
    face_classes: list[list[tuple[int, int]]]
    euler_characteristic: int
    reversed_edges: list[int] = field(default_factory=list)

    @property
    def edge_degrees(self) -> list[int]:
        return [len(c) for c in self.edge_classes]


@dataclass(frozen=True)
class Triangulation:
    tet_count: int
    gluings: dict[tuple[int, int], tuple[int, int, Perm]]
    name: str | None = None

    def __hash__(self) -> int:
        return hash((self.tet_count, tuple(sorted(self.gluings.items())), self.name))

    @property
    def is_closed(self) -> bool:
        return len(self.gluings) == 4 * self.tet_count

    def partner(self, tet: int, face: int) -> tuple[int, int, Perm] | None:
        return self.gluings.get((tet, face))

    def boundary_faces(self) -> list[tuple[int, int]]:
        return [(a, f) for a in range(self.tet_count) for f in range(4) if (a, f) not in self.gluings]

    @cached_property
    def skeleta(self) -> SkeletonSummary:
        return compute_skeleta(self)

    @cached_property
    def edge_class_of(self) -> dict[tuple[int, int], tuple[int, bool]]:
        """(tet, edge) -> (edge class index, reversed relative to class orientation)."""
        out = {}
        for ci, members in enumerate(self.skeleta.edge_classes):
            for tet, e, rev in members:
                out[(tet, e)] = (ci, rev)
        return out

    @cached_property
    def face_class_of(self) -> dict[tuple[int, int], int]:
        return {m: ci for ci, members in enumerate(self.skeleta.face_classes) for m in members}

    @cached_property
    def vertex_class_of(self) -> dict[tuple[int, int], int]:
        return {m: ci for ci, members in enumerate(self.skeleta.vertex_classes) for m in members}

    @cached_property
    def boundary_edge_classes(self) -> frozenset[int]:
        out = set()
        for a, f in self.boundary_faces():
            for e in face_edges(f):
                out.add(self.edge_class_of[(a, e)][0])
        return frozenset(out)


def compute_skeleta(tri: Triangulation) -> SkeletonSummary:
    t = tri.tet_count
    verts = UnionFind(4 * t)
    edges = UnionFind(6 * t)
    reversed_edges = set()
    for (a, f), (b, g, p) in sorted(tri.gluings.items()):
        for v in face_vertices(f):
            verts.union(4 * a + v, 4 * b + p[v])
        for k in face_edges(f):
            i, j = EDGES[k]
            flip = int(p[i] > p[j])
            if not edges.union(6 * a + k, 6 * b + EDGE_INDEX[(p[i], p[j])], flip):
                reversed_edges.add(edges.find(6 * a + k)[0])

    vertex_classes = [[(x // 4, x % 4) for x in c] for c in verts.classes()]
    edge_classes = []
    for c in edges.classes():
        base_par = edges.find(c[0])[1]
        edge_classes.append([(x // 6, x % 6, bool(edges.find(x)[1] ^ base_par)) for x in c])

    seen = set()
    face_classes = []
    for a in range(t):
        for f in range(4):
            if (a, f) in seen:
                continue
            cls = [(a, f)]
            seen.add((a, f))
            other = tri.gluings.get((a, f))
            if other is not None and (other[0], other[1]) not in seen:
                cls.append((other[0], other[1]))
                seen.add((other[0], other[1]))
            face_classes.append(cls)

    rev_classes = sorted(i for i, c in enumerate(edges.classes()) if c[0] in reversed_edges)
    chi = len(vertex_classes) - len(edge_classes) + len(face_classes) - t
    return SkeletonSummary(vertex_classes, edge_classes, face_classes, chi, rev_classes)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    closed: bool = False
    orientable: bool | None = None
    euler_characteristic: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "closed": self.closed,
            "euler_characteristic": self.euler_characteristic,
            "orientable": self.orientable,
            "valid": self.ok,
            "violations": list(self.violations),
        }


def _structural_violations(tri: Triangulation) -> list[str]:
    out = []
    t = tri.tet_count
    if t < 1:
        out.append("tetrahedron count must be positive")
    for (a, f), (b, g, p) in sorted(tri.gluings.items()):
        if not (0 <= a < t and 0 <= b < t and 0 <= f < 4 and 0 <= g < 4):
            out.append(f"gluing ({a},{f}) -> ({b},{g}) out of range")
            continue
        if sorted(p) != [0, 1, 2, 3]:
            out.append(f"gluing ({a},{f}) has non-permutation {p}")
            continue
        if (a, f) == (b, g):
            out.append(f"involution violation: face slot ({a},{f}) glued to itself")
            continue
        if p[f] != g:
            out.append(f"permutation {perm_str(p)} on ({a},{f}) -> ({b},{g}) does not send face {f} to face {g}")
        back = tri.gluings.get((b, g))
        if back is None or back[0] != a or back[1] != f or back[2] != perm_inverse(p):
            out.append(f"involution violation: ({a},{f}) -> ({b},{g}) has no matching inverse gluing")
    return out


def orientation_signs(tri: Triangulation) -> list[int] | None:
    """Consistent tetrahedron orientations, or None if none exist."""
    signs: list[int | None] = [None] * tri.tet_count
    for start in range(tri.tet_count):
        if signs[start] is not None:
            continue
        signs[start] = 1
        stack = [start]
        while stack:
            a = stack.pop()
            for f in range(4):
                glued = tri.gluings.get((a, f))
                if glued is None:
                    continue
                b, _, p = glued
                want = -perm_sign(p) * signs[a]
                if signs[b] is None:
                    signs[b] = want
                    stack.append(b)
                elif signs[b] != want:
                    return None
    return signs  # type: ignore[return-value]


def validate(tri: Triangulation) -> ValidationReport:
    report = ValidationReport(violations=_structural_violations(tri))
    report.closed = tri.is_closed
    if report.violations:
        return report
    sk = compute_skeleta(tri)
    report.euler_characteristic = sk.euler_characteristic
    report.orientable = orientation_signs(tri) is not None
    for ci in sk.reversed_edges:
        report.violations.append(f"edge class {ci} is identified with itself in reverse")
    if report.closed and sk.euler_characteristic != 0:
        report.violations.append(
            f"closed triangulation has Euler characteristic {sk.euler_characteristic} (vertex links are not all spheres)"
        )
    return report


def parse_triangulation(text: str, strict: bool = True) -> Triangulation:
    """Read the ``tets``/``glue`` text format.

    Each gluing may be listed from one side only; the inverse is filled in.
    With ``strict=False`` no gluing-table checks are made, so the result can
    be passed to :func:`validate` for a full violation listing.
    """
    tet_count = None
    name = None
    raw: list[tuple[int, tuple[int, int], tuple[int, int, Perm]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "tets":
            if len(parts) != 2 or not parts[1].isdigit():
                raise TriangulationError("expected 'tets <count>'", lineno)
            if tet_count is not None:
                raise TriangulationError("duplicate 'tets' header", lineno)
            tet_count = int(parts[1])
        elif parts[0] == "name":
            name = line[len("name"):].strip() or None
        elif parts[0] == "glue":
            if tet_count is None:
                raise TriangulationError("'glue' before 'tets' header", lineno)
            if len(parts) != 6 or not all(x.isdigit() for x in parts[1:5]):
                raise TriangulationError("expected 'glue <a> <f> <b> <g> <p0p1p2p3>'", lineno)
            ptxt = parts[5]
            if len(ptxt) != 4 or not ptxt.isdigit() or sorted(ptxt) != ["0", "1", "2", "3"]:
                raise TriangulationError(f"bad permutation {ptxt!r}", lineno)
            a, f, b, g = (int(x) for x in parts[1:5])
            if f > 3 or g > 3 or a >= tet_count or b >= tet_count:
                raise TriangulationError("tetrahedron or face index out of range", lineno)
            p = tuple(int(c) for c in ptxt)
            raw.append((lineno, (a, f), (b, g, p)))  # type: ignore[arg-type]
        else:
            raise TriangulationError(f"unknown directive {parts[0]!r}", lineno)
    if tet_count is None:
        raise TriangulationError("missing 'tets' header")
    if tet_count < 1:
        raise TriangulationError("tetrahedron count must be positive")

    gluings: dict[tuple[int, int], tuple[int, int, Perm]] = {}
    for lineno, src, dst in raw:
        if strict:
            a, f = src
            b, g, p = dst
            if (a, f) == (b, g):
                raise TriangulationError(f"involution violation: face ({a},{f}) glued to itself", lineno)
            if p[f] != g:
                raise TriangulationError(f"permutation {perm_str(p)} does not send face {f} to face {g}", lineno)
            for key, val in ((src, dst), ((b, g), (a, f, perm_inverse(p)))):
                if key in gluings and gluings[key] != val:
                    raise TriangulationError(f"involution violation: face {key} glued twice", lineno)
                gluings[key] = val
        else:
            # keep the first claim on each face slot; validate() reports the rest
            gluings.setdefault(src, dst)
            b, g, p = dst
            if sorted(p) == [0, 1, 2, 3]:
                gluings.setdefault((b, g), (src[0], src[1], perm_inverse(p)))
    tri = Triangulation(tet_count, gluings, name)
    if strict:
        report = validate(tri)
        if not report.ok:
            raise TriangulationError("; ".join(report.violations))
    return tri


def serialize_triangulation(tri: Triangulation) -> str:
    lines = [f"tets {tri.tet_count}"]
    if tri.name:
        lines.insert(0, f"name {tri.name}")
    for (a, f), (b, g, p) in sorted(tri.gluings.items()):
        if (a, f) < (b, g):
            lines.append(f"glue {a} {f} {b} {g} {perm_str(p)}")
    return "\n".join(lines) + "\n"


def glue(tet_count: int, pairs, name: str | None = None) -> Triangulation:
    """Build a triangulation from one-sided ``(a, f, b, g, perm)`` tuples."""
    gluings = {}
    for a, f, b, g, p in pairs:
        p = tuple(p)
        gluings[(a, f)] = (b, g, p)
        gluings[(b, g)] = (a, f, perm_inverse(p))
    return Triangulation(tet_count, gluings, name)
