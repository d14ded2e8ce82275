import random

import pytest

from normkit.blocks import (
    REMOVAL_BOUND,
    BlockError,
    ShrunkenSubmanifold,
    core_block_bound,
    count_core_blocks,
    decompose_blocks,
    remove_block,
)
from normkit.geom import realize
from normkit.nsurf import AlmostNormalPiece, AlmostNormalSurface, NormalSurfaceVector

from corpus import block_surfaces, tri

CASES = list(block_surfaces())


def _decompose(n, s):
    return decompose_blocks(realize(s, tri(n)))


def _disk_types(s, a):
    base = s.base if isinstance(s, AlmostNormalSurface) else s
    return [base.coords[7 * a + c] for c in range(7)]


@pytest.mark.parametrize("n,label,s", CASES, ids=[f"{n}-{label}" for n, label, _ in CASES])
def test_block_counts_match_oracle(n, label, s):
    V, W = _decompose(n, s)
    T = tri(n)
    piece = s.exceptional if isinstance(s, AlmostNormalSurface) else None
    per_tet = [0] * T.tet_count
    products = [0] * T.tet_count
    for b in V.blocks + W.blocks:
        per_tet[b.tet] += 1
        products[b.tet] += b.is_product
    for a in range(T.tet_count):
        counts = _disk_types(s, a)
        disks = sum(counts) + (piece is not None and piece.tet == a)
        # n disjoint disks cut a ball into n + 1 pieces
        assert per_tet[a] == disks + 1
        # n parallel copies of one type bound n - 1 slabs between them
        assert products[a] == sum(max(c - 1, 0) for c in counts)


@pytest.mark.parametrize("n,label,s", CASES, ids=[f"{n}-{label}" for n, label, _ in CASES])
def test_block_bounds(n, label, s):
    V, W = _decompose(n, s)
    t = tri(n).tet_count
    for X in (V, W):
        assert count_core_blocks(X) <= core_block_bound(t) == 6 * t + 1
        for b in X.blocks:
            if b.is_product:
                assert b.rectangles in (3, 4)
            else:
                assert b.rectangles <= 8


def _shrunken_family(X, rng):
    Y = X.submanifold()
    yield Y
    yield from Y.components()
    yield X.submanifold([b.key for b in X.blocks if b.is_product])
    keys = list(X.keys)
    for _ in range(4):
        yield X.submanifold(rng.sample(keys, rng.randint(1, len(keys))))


@pytest.mark.parametrize("n,label,s", CASES, ids=[f"{n}-{label}" for n, label, _ in CASES])
def test_removal_delta(n, label, s):
    rng = random.Random(f"{n}{label}")
    V, W = _decompose(n, s)
    worst = None
    for X in (V, W):
        for Y in _shrunken_family(X, rng):
            for b in Y.blocks:
                after = ShrunkenSubmanifold(Y.complex, Y.keys - {b.key})
                delta = after.complexity - Y.complexity
                assert delta <= REMOVAL_BOUND
                worst = delta if worst is None else max(worst, delta)
                Y2, rep = remove_block(Y, b)
                assert rep.delta == delta and Y2.keys == after.keys
    assert worst is not None


@pytest.mark.parametrize("n,label,s", CASES[:12], ids=[f"{n}-{label}" for n, label, _ in CASES[:12]])
def test_complexity_additive_over_components(n, label, s):
    V, W = _decompose(n, s)
    for X in (V, W):
        Y = X.submanifold()
        comps = Y.components()
        assert sum(c.complexity for c in comps) == Y.complexity
        assert sum(c.euler_characteristic for c in comps) == Y.euler_characteristic
        assert all(c.component_count == 1 for c in comps)


def test_empty_submanifold():
    V, _ = _decompose("twotet.tri", CASES[1][2])
    Y = V.submanifold([])
    assert Y.complexity == 0 and Y.component_count == 0


def test_solid_tetrahedron_is_a_ball():
    # with the empty surface one side is the whole manifold
    V, W = decompose_blocks(realize(NormalSurfaceVector.zero(1), tri("unglued.tri")))
    X = V if V.keys else W
    Y = X.submanifold()
    assert Y.euler_characteristic == 1 and Y.vertical_boundary_count == 0


def test_remove_missing_block():
    V, W = _decompose("twotet.tri", CASES[1][2])
    Y = V.submanifold()
    with pytest.raises(BlockError):
        remove_block(Y, W.keys[0])


def test_tubes_rejected():
    s = AlmostNormalSurface(NormalSurfaceVector((1, 0, 0, 0, 0, 0, 0)), AlmostNormalPiece(0, "tube:t0+t0"))
    with pytest.raises(BlockError):
        decompose_blocks(realize(s, tri("unglued.tri")))


def test_submanifold_side_check():
    V, W = _decompose("onetet.tri", CASES[0][2])
    with pytest.raises(BlockError):
        V.submanifold([W.keys[0]])
