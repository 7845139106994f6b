"""Timing comparison of the two grid kernel lanes.

Run as `python -m juliaspec.benchmark`. Checks bit-identity of the lanes
on the benchmark grids first (a speedup that changes results would be
worthless), then reports wall times. The compiled lane is skipped when
the extension is unavailable.
"""

import argparse
import time

import numpy as np

from . import julia, kernels


def _time_lane(band_fn, grid, p, max_iter, rr):
    iters = np.empty((grid.height, grid.width), np.int32)
    t0 = time.perf_counter()
    band_fn(iters, 0, grid.re_min, grid.dre, grid.im_max, grid.dim, p, max_iter, rr)
    return time.perf_counter() - t0, iters


def run(res=384, max_iter=300, p=0.7):
    lanes = kernels.lanes()
    specs = [
        ("julia", "julia_band", julia.GridSpec(-1.5, 1.5, -1.5, 1.5, res, res)),
        ("ep", "ep_band", julia.GridSpec(-2.0, 2.0, -2.0, 2.0, res, res)),
    ]
    rows = []
    for name, attr, grid in specs:
        results = {}
        for lane_name, mod in lanes.items():
            dt, iters = _time_lane(getattr(mod, attr), grid, p, max_iter, 16.0)
            results[lane_name] = (dt, iters)
        if "compiled" in results:
            same = np.array_equal(results["pure"][1], results["compiled"][1])
            if not same:
                raise AssertionError("lane rasters differ on %s grid" % name)
        rows.append((name, {k: v[0] for k, v in results.items()}))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description="compare grid kernel lanes")
    ap.add_argument("--res", type=int, default=384)
    ap.add_argument("--iters", type=int, default=300)
    ap.add_argument("--p", type=float, default=0.7)
    args = ap.parse_args(argv)
    rows = run(args.res, args.iters, args.p)
    print("grid %dx%d, max_iter %d, p=%g" % (args.res, args.res, args.iters, args.p))
    for name, times in rows:
        parts = ["%s %.3fs" % (k, v) for k, v in sorted(times.items())]
        if "compiled" in times and "pure" in times:
            parts.append("speedup x%.1f" % (times["pure"] / times["compiled"]))
        print("%-6s %s" % (name, "  ".join(parts)))
        if "compiled" in times:
            print("%-6s lanes bit-identical" % "")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
