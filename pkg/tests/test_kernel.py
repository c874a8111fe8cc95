"""Finite-model kernels: the numpy fallback and, when built, the
compiled backend must agree bit for bit, including first-failure
indices."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbicert import _kernel
from orbicert._kernel import _pykernel as pk

try:
    from orbicert._kernel import _cykernel as ck
except ImportError:  # pragma: no cover - compiled backend optional
    ck = None

BACKENDS = [pk] + ([ck] if ck is not None else [])


def random_setup(rng, dim, gens, mod):
    mats = rng.integers(0, mod, size=(gens, dim, dim), dtype=np.int64)
    vecs = rng.integers(0, mod, size=(gens, dim), dtype=np.int64)
    proj = rng.integers(0, mod, size=(rng.integers(1, dim + 1), dim), dtype=np.int64)
    return mats, vecs, proj


def test_backend_reported():
    assert _kernel.BACKEND in ("cython", "python")
    for name in (
        "apply_batch",
        "orbit_iterate",
        "invariance_scan_range",
        "invariance_scan_points",
    ):
        assert callable(getattr(_kernel, name))


@pytest.mark.parametrize("backend", BACKENDS)
def test_apply_batch_matches_naive(backend):
    rng = np.random.default_rng(11)
    for _ in range(25):
        dim = int(rng.integers(1, 5))
        mod = int(rng.integers(2, 97))
        mats, vecs, _ = random_setup(rng, dim, 1, mod)
        pts = rng.integers(0, mod, size=(int(rng.integers(1, 40)), dim), dtype=np.int64)
        got = backend.apply_batch(mats[0], vecs[0], pts, mod)
        for i in range(pts.shape[0]):
            expect = (mats[0] @ pts[i] + vecs[0]) % mod
            assert np.array_equal(got[i], expect)


@pytest.mark.parametrize("backend", BACKENDS)
def test_orbit_iterate_matches_apply(backend):
    rng = np.random.default_rng(12)
    mod, dim, steps = 13, 3, 9
    mats, vecs, _ = random_setup(rng, dim, 1, mod)
    x = rng.integers(0, mod, size=dim, dtype=np.int64)
    orbit = backend.orbit_iterate(mats[0], vecs[0], x, steps, mod)
    assert orbit.shape == (steps + 1, dim)
    assert np.array_equal(orbit[0], x % mod)
    for t in range(steps):
        expect = (mats[0] @ orbit[t] + vecs[0]) % mod
        assert np.array_equal(orbit[t + 1], expect)


@pytest.mark.parametrize("backend", BACKENDS)
def test_scan_range_enumerates_all_digit_points(backend):
    # a projection nothing passes: every point violates, so the scan
    # returns the start index; an all-pass setup returns -1
    mod, dim = 5, 3
    ident = np.eye(dim, dtype=np.int64)[None, :, :]
    zero_vec = np.zeros((1, dim), dtype=np.int64)
    proj = np.ones((1, dim), dtype=np.int64)
    assert backend.invariance_scan_range(
        ident, zero_vec, proj, 1, mod, 1, mod, 0, mod**dim
    ) == -1
    shift = np.array([[1, 0, 0]], dtype=np.int64)
    hit = backend.invariance_scan_range(
        ident, shift, proj, 1, mod, 1, mod, 0, mod**dim
    )
    assert hit == 0  # x -> x + e1 moves every projection value


def test_digit_points_cover_the_box():
    mod, dim = 3, 3
    pts = pk._digit_points(0, mod**dim, mod, dim)
    seen = {tuple(int(x) for x in row) for row in pts}
    assert len(seen) == mod**dim
    # little-endian: t = 5 = 2 + 1*3 -> digits (2, 1, 0)
    assert tuple(int(x) for x in pts[5]) == (2, 1, 0)


def test_digit_points_offset_window():
    pts = pk._digit_points(7, 4, 5, 2)
    expect = [(2, 1), (3, 1), (4, 1), (0, 2)]
    assert [tuple(int(x) for x in r) for r in pts] == expect


@pytest.mark.parametrize("backend", BACKENDS)
def test_first_failure_is_minimum_over_generators(backend):
    # generator 0 fixes points 0..3, generator 1 fixes points 0..1 only
    mod, dim = 7, 1
    mats = np.stack([np.eye(1, dtype=np.int64), np.eye(1, dtype=np.int64)])
    vecs = np.array([[0], [0]], dtype=np.int64)
    proj = np.eye(1, dtype=np.int64)
    pts = np.arange(6, dtype=np.int64).reshape(-1, 1)
    # tamper: generator 0 shifts by 3 (breaks every nonzero projection established
    # point), generator 1 is the identity (never breaks)
    vecs0 = np.array([[3], [0]], dtype=np.int64)
    hit = backend.invariance_scan_points(mats, vecs0, proj, 1, mod, pts)
    assert hit == 0
    # multiplier 7 == mod kills the projection entirely
    hit = backend.invariance_scan_points(mats, vecs0, proj, 7, mod, pts)
    assert hit == -1


@given(st.integers(min_value=0, max_value=10**6))
def test_backends_agree(seed):
    if ck is None:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 5))
    gens = int(rng.integers(1, 4))
    mod = int(rng.integers(2, 50))
    mats, vecs, proj = random_setup(rng, dim, gens, mod)
    mult = int(rng.integers(1, 6))
    scale = int(rng.integers(1, mod))
    base = int(rng.integers(2, mod + 1))
    count = int(rng.integers(1, 200))
    start = int(rng.integers(0, 50))
    a = pk.invariance_scan_range(mats, vecs, proj, mult, mod, scale, base, start, count)
    b = ck.invariance_scan_range(mats, vecs, proj, mult, mod, scale, base, start, count)
    assert a == b
    pts = rng.integers(0, mod, size=(int(rng.integers(1, 60)), dim), dtype=np.int64)
    a = pk.invariance_scan_points(mats, vecs, proj, mult, mod, pts)
    b = ck.invariance_scan_points(mats, vecs, proj, mult, mod, pts)
    assert a == b
    assert np.array_equal(
        pk.apply_batch(mats[0], vecs[0], pts, mod),
        ck.apply_batch(mats[0], vecs[0], pts, mod),
    )
    x = rng.integers(0, mod, size=dim, dtype=np.int64)
    assert np.array_equal(
        pk.orbit_iterate(mats[0], vecs[0], x, 8, mod),
        ck.orbit_iterate(mats[0], vecs[0], x, 8, mod),
    )


def test_pure_mode_flag():
    # the selector honors ORBICERT_PURE at import time
    import os
    import subprocess
    import sys

    env = dict(os.environ, ORBICERT_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from orbicert import _kernel; print(_kernel.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "python"
