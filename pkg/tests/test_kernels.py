"""Lane selection and bit-identity of the pure and compiled grid kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from juliaspec import julia, kernels


def _run_band(mod, fn_name, shape, p, max_iter):
    h, w = shape
    iters = np.empty((h, w), dtype=np.int32)
    band = getattr(mod, fn_name)
    band(iters, 0, -1.7, 3.4 / w, 1.6, 3.2 / h, p, max_iter, 16.0)
    return iters


@pytest.mark.skipif(len(kernels.lanes()) < 2, reason="compiled lane unavailable")
@pytest.mark.parametrize("fn_name", ["julia_band", "ep_band"])
def test_lanes_bit_identical(fn_name):
    lanes = kernels.lanes()
    a = _run_band(lanes["pure"], fn_name, (48, 64), 0.7, 200)
    b = _run_band(lanes["compiled"], fn_name, (48, 64), 0.7, 200)
    assert np.array_equal(a, b)
    assert (a == kernels.BOUNDED).any()
    assert (a >= 0).any()


@pytest.mark.parametrize("fn_name", ["julia_band", "ep_band"])
def test_band_offset_consistency(fn_name):
    # filling in two bands must equal one shot; the row offset is absolute
    lane = kernels.lanes()["pure"]
    whole = _run_band(lane, fn_name, (30, 40), 0.625, 120)
    split = np.empty((30, 40), dtype=np.int32)
    band = getattr(lane, fn_name)
    band(split[:12], 0, -1.7, 3.4 / 40, 1.6, 3.2 / 30, 0.625, 120, 16.0)
    band(split[12:], 12, -1.7, 3.4 / 40, 1.6, 3.2 / 30, 0.625, 120, 16.0)
    assert np.array_equal(whole, split)


def test_lane_name_matches_flag():
    assert kernels.lane_name() == ("compiled" if kernels.COMPILED else "pure")
    assert kernels.BOUNDED == -1


def test_pure_env_forces_fallback():
    code = (
        "import juliaspec.kernels as k; "
        "print(k.COMPILED, k.lane_name())"
    )
    env = dict(os.environ, JULIASPEC_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.split() == ["False", "pure"]


def test_thread_count_invariance():
    # raster content must not depend on the band partitioning
    g = julia.GridSpec(-1.5, 1.5, -1.5, 1.5, 40, 36)
    code_tmpl = (
        "import numpy, juliaspec.julia as jl; "
        "r = jl.filled_julia_grid(0.7, jl.GridSpec(-1.5, 1.5, -1.5, 1.5, 40, 36), max_iter=100); "
        "print(int(r.iterations.sum()), int(r.bounded_count))"
    )
    results = set()
    for threads in ("1", "3"):
        env = dict(os.environ, JULIASPEC_THREADS=threads)
        out = subprocess.run(
            [sys.executable, "-c", code_tmpl], env=env, capture_output=True, text=True, check=True
        )
        results.add(out.stdout.strip())
    assert len(results) == 1
    local = julia.filled_julia_grid(0.7, g, max_iter=100)
    expect = "%d %d" % (int(local.iterations.sum()), int(local.bounded_count))
    assert results == {expect}
