"""Complexity of abstract compact surfaces and its monotonicity under inclusion.

``c(G) = chi(G) + |dG|`` is the Euler characteristic of ``G`` with every
boundary circle capped by a disk.  A connected subsurface never has smaller
complexity than the surface containing it; :func:`check_subsurface_monotonicity`
verifies this on an explicit decomposition and reports the intermediate
quantities of the standard counting argument.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class SurfaceSpecError(ValueError):
    pass


@dataclass(frozen=True)
class AbstractSurface:
    """A compact connected surface, up to homeomorphism.

    ``genus`` counts handles when orientable and cross-caps otherwise.
    """

    orientable: bool = True
    genus: int = 0
    boundary_count: int = 0

    def __post_init__(self):
        if self.genus < 0 or self.boundary_count < 0:
            raise SurfaceSpecError("genus and boundary count must be nonnegative")
        if not self.orientable and self.genus == 0:
            raise SurfaceSpecError("a nonorientable surface has at least one cross-cap")

    @property
    def euler_characteristic(self) -> int:
        handles = 2 * self.genus if self.orientable else self.genus
        return 2 - handles - self.boundary_count

    @property
    def complexity(self) -> int:
        return surface_complexity(self)

    def capped(self) -> "AbstractSurface":
        return AbstractSurface(self.orientable, self.genus, 0)

    @classmethod
    def from_euler(cls, chi: int, boundary_count: int, orientable: bool = True) -> "AbstractSurface":
        k = 2 - chi - boundary_count
        if k < 0 or (orientable and k % 2):
            raise SurfaceSpecError(f"no {'orientable' if orientable else 'nonorientable'} surface has "
                                   f"chi={chi} and {boundary_count} boundary circles")
        return cls(orientable, k // 2 if orientable else k, boundary_count)


DISK = AbstractSurface(True, 0, 1)
ANNULUS = AbstractSurface(True, 0, 2)
TORUS = AbstractSurface(True, 1, 0)


def surface_complexity(G: AbstractSurface | Iterable[AbstractSurface]) -> int:
    """``chi + |boundary|``; additive over a disjoint union given as a list."""
    if isinstance(G, AbstractSurface):
        return G.euler_characteristic + G.boundary_count
    return sum(surface_complexity(x) for x in G)


def is_large(G: AbstractSurface | Sequence[AbstractSurface]) -> bool:
    if not isinstance(G, AbstractSurface):
        if len(G) != 1:
            raise SurfaceSpecError("largeness is defined for connected surfaces")
        G = G[0]
    return surface_complexity(G) <= 0


@dataclass
class Decomposition:
    """``F`` cut along the boundary of ``G`` into ``G`` and ``pieces``.

    ``pairing`` lists, for each boundary circle of ``G`` in order, the
    ``(piece, circle)`` it is glued to.  Unglued circles of the pieces form
    the boundary of ``F``.
    """

    F: AbstractSurface
    G: AbstractSurface
    pieces: list[AbstractSurface] = field(default_factory=list)
    pairing: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True)
class MonotonicityCertificate:
    holds: bool
    slack: int
    c_F: int
    c_G: int
    n: int
    boundary_G: int
    boundary_G_prime: int
    c_G_prime: int
    steps: dict

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("holds", "slack", "c_F", "c_G", "n", "boundary_G", "boundary_G_prime", "c_G_prime", "steps")}


def _check_consistent(dec: Decomposition) -> None:
    F, G, pieces, pairing = dec.F, dec.G, dec.pieces, dec.pairing
    if not pieces:
        if pairing or F != G:
            raise SurfaceSpecError("with no complementary pieces G must equal F")
        return
    if len(pairing) != G.boundary_count:
        raise SurfaceSpecError(f"G has {G.boundary_count} boundary circles but {len(pairing)} are paired")
    used = set()
    for i, j in pairing:
        if not 0 <= i < len(pieces) or not 0 <= j < pieces[i].boundary_count:
            raise SurfaceSpecError(f"pairing refers to a missing circle ({i}, {j})")
        if (i, j) in used:
            raise SurfaceSpecError(f"circle ({i}, {j}) is paired twice")
        used.add((i, j))
    touched = {i for i, _ in pairing}
    if touched != set(range(len(pieces))):
        raise SurfaceSpecError("every complementary piece must meet G, otherwise F is disconnected")
    chi = G.euler_characteristic + sum(p.euler_characteristic for p in pieces)
    if chi != F.euler_characteristic:
        raise SurfaceSpecError(f"chi(F)={F.euler_characteristic} but the pieces give {chi}")
    free = sum(p.boundary_count for p in pieces) - len(pairing)
    if free != F.boundary_count:
        raise SurfaceSpecError(f"|dF|={F.boundary_count} but the pieces leave {free} circles free")
    if F.orientable and (not G.orientable or not all(p.orientable for p in pieces)):
        raise SurfaceSpecError("an orientable F cannot contain a nonorientable piece")


def check_subsurface_monotonicity(dec: Decomposition) -> MonotonicityCertificate:
    """Verify ``c(F) <= c(G)`` along the lines of the counting argument."""
    _check_consistent(dec)
    F, G = dec.F, dec.G
    cF, cG = surface_complexity(F), surface_complexity(G)
    if not dec.pieces:
        steps = {"trivial": True}
        return MonotonicityCertificate(cF <= cG, cG - cF, cF, cG, 0, G.boundary_count,
                                       F.boundary_count, 0, steps)
    n = len(dec.pieces)
    bG = G.boundary_count
    bGp = sum(p.boundary_count for p in dec.pieces)
    cGp = surface_complexity(dec.pieces)
    chi_Gp = sum(p.euler_characteristic for p in dec.pieces)
    steps = {
        "n <= |dG|": n <= bG,
        "|dG'| = |dG| + |dF|": bGp == bG + F.boundary_count,
        "c(G') <= 2n": cGp <= 2 * n,
        "2n <= 2|dG|": 2 * n <= 2 * bG,
        "chi(G') + |dF| <= |dG|": chi_Gp + F.boundary_count <= bG,
    }
    holds = cF <= cG and all(steps.values())
    return MonotonicityCertificate(holds, cG - cF, cF, cG, n, bG, bGp, cGp, steps)


# -- random instances ----------------------------------------------------------------


def _random_surface(rng: random.Random, orientable: bool, min_boundary: int, max_genus: int = 3) -> AbstractSurface:
    if orientable:
        return AbstractSurface(True, rng.randint(0, max_genus), min_boundary + rng.randint(0, 2))
    return AbstractSurface(False, rng.randint(1, max_genus + 1), min_boundary + rng.randint(0, 2))


def random_decomposition(rng: random.Random) -> Decomposition:
    """A random ``G`` inside a random ``F``.

    ``F`` is described by genus bookkeeping over the gluing graph, not by
    adding Euler characteristics: each extra cycle of the graph
    contributes a handle.
    """
    orientable = rng.random() < 0.7
    G = _random_surface(rng, orientable or rng.random() < 0.5, 1)
    n = rng.randint(1, G.boundary_count)
    need = [1] * n
    for _ in range(G.boundary_count - n):
        need[rng.randrange(n)] += 1
    pieces = []
    for k in need:
        po = orientable or rng.random() < 0.5
        p = _random_surface(rng, po, 0)
        pieces.append(AbstractSurface(p.orientable, p.genus, p.boundary_count + k))
    pairing = []
    for i, k in enumerate(need):
        pairing += [(i, j) for j in rng.sample(range(pieces[i].boundary_count), k)]
    order = list(range(G.boundary_count))
    rng.shuffle(order)
    pairing = [pairing[i] for i in order]
    cycles = len(pairing) - n  # edges minus (vertices - 1) of the gluing graph
    free = sum(p.boundary_count for p in pieces) - len(pairing)
    parts = [G] + pieces
    if all(p.orientable for p in parts):
        F = AbstractSurface(True, sum(p.genus for p in parts) + cycles, free)
    else:
        caps = sum(p.genus if not p.orientable else 2 * p.genus for p in parts) + 2 * cycles
        F = AbstractSurface(False, caps, free)
    return Decomposition(F, G, pieces, pairing)


def sweep(count: int = 10_000, seed: int = 0) -> dict:
    rng = random.Random(seed)
    failures = []
    worst = None
    for idx in range(count):
        dec = random_decomposition(rng)
        cert = check_subsurface_monotonicity(dec)
        if not cert.holds:
            failures.append(idx)
        worst = cert.slack if worst is None else min(worst, cert.slack)
    return {"count": count, "seed": seed, "failures": failures, "min_slack": worst}
