"""Bundled examples and seeded generators shared by the tests."""

from __future__ import annotations

import random
from functools import lru_cache

from normkit.cli import data_path
from normkit.enumerate import enumerate_vertex_surfaces
from normkit.nsurf import NormalSurfaceVector, compatible, parse_surface
from normkit.tri import parse_triangulation

TRIANGULATIONS = ("unglued.tri", "doubled_tet.tri", "onetet.tri", "twotet.tri")
CLOSED = ("doubled_tet.tri", "onetet.tri", "twotet.tri")
# (triangulation, surface): almost normal separating surfaces
SPLITTINGS = (
    ("onetet.tri", "onetet_splitting.srf"),
    ("twotet.tri", "twotet_splitting.srf"),
    ("twotet.tri", "twotet_sphere.srf"),
)


@lru_cache(maxsize=None)
def tri(name: str):
    return parse_triangulation(data_path(name).read_text())


@lru_cache(maxsize=None)
def surface(name: str):
    return parse_surface(data_path(name).read_text())


@lru_cache(maxsize=None)
def vertex_surfaces(name: str) -> tuple:
    return tuple(enumerate_vertex_surfaces(tri(name), cap=6).surfaces)


def _combo(rng: random.Random, pool: list, top: int) -> NormalSurfaceVector:
    while True:
        coeffs = [rng.randint(0, top) for _ in pool]
        if any(coeffs):
            break
    n = len(pool[0].coords)
    v = [0] * n
    for c, s in zip(coeffs, pool):
        for i in range(n):
            v[i] += c * s.coords[i]
    return NormalSurfaceVector(tuple(v))


def random_pair(rng: random.Random, name: str, top: int = 2):
    """Two compatible normal surfaces built from vertex surfaces.

    A quad type (or none) is fixed per tetrahedron and both summands are
    combinations of the vertex surfaces that respect it.
    """
    T = tri(name)
    verts = vertex_surfaces(name)
    while True:
        choice = [rng.choice([None, 0, 1, 2]) for _ in range(T.tet_count)]

        def fits(s):
            for a, q in enumerate(choice):
                for k in range(3):
                    if s.coords[7 * a + 4 + k] and k != q:
                        return False
            return True

        pool = [s for s in verts if fits(s)]
        if not pool:
            continue
        J = _combo(rng, rng.sample(pool, min(len(pool), 3)), top)
        K = _combo(rng, rng.sample(pool, min(len(pool), 3)), top)
        assert compatible(J, K, T)
        return J, K


def pair_stream(seed: int, count: int, top: int = 2):
    rng = random.Random(seed)
    for i in range(count):
        name = TRIANGULATIONS[i % len(TRIANGULATIONS)]
        J, K = random_pair(rng, name, top)
        yield name, J, K


def random_gluing(rng: random.Random, t: int, closed: bool = True):
    """A random face pairing of ``t`` tetrahedra (not necessarily a manifold)."""
    from normkit.tri import ALL_PERMS, glue

    slots = [(a, f) for a in range(t) for f in range(4)]
    rng.shuffle(slots)
    if not closed:
        slots = slots[: 2 * rng.randint(0, len(slots) // 2)]
    pairs = []
    for (a, f), (b, g) in zip(slots[::2], slots[1::2]):
        p = rng.choice([p for p in ALL_PERMS if p[f] == g])
        pairs.append((a, f, b, g, p))
    return glue(t, pairs)


def block_surfaces():
    """(triangulation, label, surface) for every decomposition the block tests use."""
    from normkit.nsurf import haken_sum

    for n, s in SPLITTINGS:
        yield n, s, surface(s)
    for n in TRIANGULATIONS:
        for v in vertex_surfaces(n):
            yield n, v.name, v
    for i, (n, J, K) in enumerate(pair_stream(5, 20)):
        yield n, f"sum{i}", haken_sum(J, K)
