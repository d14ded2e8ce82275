import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from normkit.surf import (
    ANNULUS,
    DISK,
    TORUS,
    AbstractSurface,
    Decomposition,
    SurfaceSpecError,
    check_subsurface_monotonicity,
    is_large,
    random_decomposition,
    surface_complexity,
    sweep,
)


def test_named_surfaces():
    assert (DISK.euler_characteristic, DISK.complexity) == (1, 2)
    assert (ANNULUS.euler_characteristic, ANNULUS.complexity) == (0, 2)
    assert (TORUS.euler_characteristic, TORUS.complexity) == (0, 0)
    assert is_large(TORUS) and not is_large(ANNULUS)
    assert AbstractSurface(False, 1, 1).complexity == 1  # Moebius band
    assert surface_complexity([DISK, TORUS]) == DISK.complexity + TORUS.complexity


def test_largeness_needs_connected():
    with pytest.raises(SurfaceSpecError):
        is_large([TORUS, TORUS])


def test_from_euler():
    assert AbstractSurface.from_euler(-2, 2) == AbstractSurface(True, 1, 2)
    with pytest.raises(SurfaceSpecError):
        AbstractSurface.from_euler(-1, 0)


def test_pants_in_torus_with_hole():
    # a once-holed torus cut along a nonseparating curve and a boundary-parallel one
    F = AbstractSurface(True, 1, 1)
    G = AbstractSurface(True, 0, 3)
    dec = Decomposition(F, G, [AbstractSurface(True, 0, 2)], [(0, 0), (0, 1), (0, 1)])
    with pytest.raises(SurfaceSpecError):
        check_subsurface_monotonicity(dec)
    dec = Decomposition(F, AbstractSurface(True, 0, 2), [AbstractSurface(True, 0, 3)], [(0, 0), (0, 1)])
    cert = check_subsurface_monotonicity(dec)
    assert cert.holds and cert.c_F == 0 and cert.c_G == 2 and all(cert.steps.values())


def test_disk_in_sphere():
    S2 = AbstractSurface(True, 0, 0)
    cert = check_subsurface_monotonicity(Decomposition(S2, DISK, [DISK], [(0, 0)]))
    assert cert.holds and cert.slack == 0


def test_inconsistent_decompositions():
    with pytest.raises(SurfaceSpecError):
        check_subsurface_monotonicity(Decomposition(TORUS, DISK, [DISK], [(0, 0)]))
    with pytest.raises(SurfaceSpecError):
        check_subsurface_monotonicity(Decomposition(TORUS, ANNULUS, [DISK, DISK], [(0, 0), (0, 0)]))


def test_sweep_ten_thousand():
    start = time.perf_counter()
    res = sweep(10_000, seed=0)
    assert time.perf_counter() - start < 5
    assert res["failures"] == [] and res["min_slack"] >= 0


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_random_decomposition_properties(seed):
    dec = random_decomposition(random.Random(seed))
    cert = check_subsurface_monotonicity(dec)
    assert cert.holds and cert.c_F <= cert.c_G
    n, bG = cert.n, cert.boundary_G
    assert cert.c_G_prime <= 2 * n <= 2 * bG
    assert cert.boundary_G_prime == bG + dec.F.boundary_count
    assert dec.F.capped().boundary_count == 0
    assert surface_complexity(dec.F.capped()) == surface_complexity(dec.F)
    assert surface_complexity(dec.pieces) == sum(p.complexity for p in dec.pieces)


@given(o=st.booleans(), g=st.integers(0, 6), b=st.integers(0, 6))
def test_capping_keeps_complexity(o, g, b):
    if not o and g == 0:
        g = 1
    G = AbstractSurface(o, g, b)
    assert G.capped().complexity == G.complexity
    assert G.capped().boundary_count == 0
    assert G.complexity == (2 - (2 * g if o else g))
