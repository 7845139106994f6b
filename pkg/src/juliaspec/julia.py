"""Escape-time machinery for the two bounded-orbit sets.

Base 2: the forward orbit of f(z) = ((z - (1-p))/p)**2 starting at a
candidate eigenvalue; the candidate belongs to the filled set when the
orbit never leaves the escape radius. With radius >= 4 leaving is final:
|z| > 4 gives |f(z)| >= ((|z| - 1)/1)**2 > 2 |z| for every p in (0,1),
so the iteration count at first crossing is well defined.

Fibonacci base: the two-term power recursion behind the q values, where
escape is declared only when two consecutive values are large at once (a
single large value can still be pulled back by a small partner) or when
one value passes the overflow cutoff, after which no return is possible.

Grids are filled through the kernels module in horizontal bands,
optionally in a thread pool (JULIASPEC_THREADS caps the pool; 0 or unset
picks a size from the cpu count). Band boundaries cannot affect pixel
values: each pixel's orbit is computed independently.
"""

import cmath
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels, qseq
from .chain import check_p

BOUNDED = kernels.BOUNDED

# a single orbit value past this cannot be pulled back; squared in kernels
OVERFLOW_CUTOFF = 1e150

_MAX_PIXELS = 100_000_000


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned sampling window; pixels are sampled at cell centers."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("window must have positive extent")
        if self.width < 1 or self.height < 1:
            raise ValueError("resolution must be >= 1")
        if self.width * self.height > _MAX_PIXELS:
            raise ValueError("grid exceeds %d pixels" % _MAX_PIXELS)

    @property
    def dre(self):
        return (self.re_max - self.re_min) / self.width

    @property
    def dim(self):
        return (self.im_max - self.im_min) / self.height

    def window(self):
        return [self.re_min, self.re_max, self.im_min, self.im_max]


def pixel_centers(grid):
    """(re, im) center coordinates; im runs top down, row 0 at im_max."""
    re = grid.re_min + (np.arange(grid.width, dtype=np.float64) + 0.5) * grid.dre
    im = grid.im_max - (np.arange(grid.height, dtype=np.float64) + 0.5) * grid.dim
    return re, im


@dataclass(frozen=True)
class EscapeRaster:
    """Per-pixel first escape iterations; BOUNDED marks survivors."""

    base: str
    p: float
    grid: GridSpec
    max_iter: int
    r_esc: float
    iterations: np.ndarray  # int32 (height, width), row 0 at im_max

    @property
    def bounded_count(self):
        return int((self.iterations == BOUNDED).sum())

    def bounded_mask(self):
        return self.iterations == BOUNDED


def _check_escape_args(max_iter, r_esc):
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if r_esc < 4.0:
        raise ValueError("escape radius below 4 loses escape permanence")


def escapes_f(lam, p, max_iter=300, r_esc=4.0):
    """First n >= 0 with |f^n(lam)| > r_esc, or BOUNDED through max_iter."""
    check_p(p)
    _check_escape_args(max_iter, r_esc)
    z = complex(lam)
    rr = r_esc * r_esc
    for n in range(max_iter + 1):
        if z.real * z.real + z.imag * z.imag > rr:
            return n
        u = ((z - 1.0) + p) / p
        z = u * u
    return BOUNDED


def ep_escape(lam, p, max_iter=300, r_esc=4.0):
    """Escape index of the power pair seeded by lam, or BOUNDED.

    The pair is (previous, current) = (q at F_{k-1}, q at F_k), seeded
    (lam, lam**2) and checked from k = 1 before each step.
    """
    check_p(p)
    _check_escape_args(max_iter, r_esc)
    a = complex(lam)
    b = a * a
    rr = r_esc * r_esc
    over = OVERFLOW_CUTOFF * OVERFLOW_CUTOFF
    for k in range(1, max_iter + 1):
        ma = a.real * a.real + a.imag * a.imag
        mb = b.real * b.real + b.imag * b.imag
        if mb > over:
            return k
        if ma > rr and mb > rr:
            return k
        nxt = 1.0 + (a * b - 1.0) / p
        a, b = b, nxt
    return BOUNDED


def g_orbit_escapes(xy, p, max_iter=100, r_esc=4.0):
    """Escape index of the pair map orbit, or BOUNDED.

    The initial state is not checked; iteration j is the state after j
    applications. Escape needs both coordinates outside the radius, or
    either past the overflow cutoff.
    """
    check_p(p)
    _check_escape_args(max_iter, r_esc)
    x = complex(xy[0])
    y = complex(xy[1])
    rr = r_esc * r_esc
    over = OVERFLOW_CUTOFF * OVERFLOW_CUTOFF
    for j in range(1, max_iter + 1):
        x, y = qseq.g_map((x, y), p)
        mx = x.real * x.real + x.imag * x.imag
        my = y.real * y.real + y.imag * y.imag
        if mx > over or my > over:
            return j
        if mx > rr and my > rr:
            return j
    return BOUNDED


def _thread_count():
    raw = os.environ.get("JULIASPEC_THREADS", "").strip()
    if raw in ("", "0"):
        return max(1, min(8, os.cpu_count() or 1))
    n = int(raw)
    if n < 0:
        raise ValueError("JULIASPEC_THREADS must be >= 0")
    return max(1, n)


def _fill_grid(band_fn, p, grid, max_iter, rr):
    iters = np.empty((grid.height, grid.width), np.int32)
    threads = _thread_count()
    # bands only partition work; every pixel orbit is independent
    nbands = min(grid.height, max(1, threads * 4))
    step = -(-grid.height // nbands)
    jobs = [(lo, min(lo + step, grid.height)) for lo in range(0, grid.height, step)]

    def run(job):
        lo, hi = job
        band_fn(
            iters[lo:hi],
            lo,
            grid.re_min,
            grid.dre,
            grid.im_max,
            grid.dim,
            p,
            max_iter,
            rr,
        )

    if threads == 1 or len(jobs) == 1:
        for job in jobs:
            run(job)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, jobs))
    return iters


def filled_julia_grid(p, grid, max_iter=300, r_esc=4.0):
    """Escape raster of the squared map over the grid window."""
    check_p(p)
    _check_escape_args(max_iter, r_esc)
    iters = _fill_grid(kernels.julia_band, p, grid, max_iter, r_esc * r_esc)
    return EscapeRaster("binary", float(p), grid, max_iter, float(r_esc), iters)


def ep_grid(p, grid, max_iter=300, r_esc=4.0):
    """Escape raster of the power-pair recursion over the grid window."""
    check_p(p)
    _check_escape_args(max_iter, r_esc)
    iters = _fill_grid(kernels.ep_band, p, grid, max_iter, r_esc * r_esc)
    return EscapeRaster("fib", float(p), grid, max_iter, float(r_esc), iters)


def preimages_of_one(p, depth):
    """All depth-fold preimages of 1 under the squared map.

    1 is its own image, so the depth-d set contains every shallower
    level. Points are deduplicated at 1e-12 and sorted by (re, im).
    Backward iteration contracts toward the boundary set, so the points
    are numerically stable even where forward orbits are not.
    """
    check_p(p)
    if not 0 <= depth <= 20:
        raise ValueError("depth must be in 0..20")
    pts = [1.0 + 0.0j]
    for _ in range(depth):
        cand = []
        for w in pts:
            s = cmath.sqrt(w)
            cand.append((1.0 - p) + p * s)
            cand.append((1.0 - p) - p * s)
        pts = _dedup_sorted(cand, 1e-12)
    return pts


def _dedup_sorted(points, tol):
    pts = sorted(points, key=lambda z: (z.real, z.imag))
    out = []
    for z in pts:
        dup = False
        j = len(out) - 1
        while j >= 0 and z.real - out[j].real <= tol:
            if abs(z - out[j]) <= tol:
                dup = True
                break
            j -= 1
        if not dup:
            out.append(z)
    return out


def ppm_bytes(raster):
    """P6 grayscale render: bounded pixels black, faster escapes lighter."""
    it = raster.iterations
    shade = np.zeros(it.shape, np.uint8)
    esc = it >= 0
    span = max(raster.max_iter, 1)
    vals = 255 - (it[esc].astype(np.int64) * 191) // span
    shade[esc] = vals.astype(np.uint8)
    g = raster.grid
    header = "P6\n# juliaspec %s p=%r window=[%r, %r, %r, %r] max_iter=%d r_esc=%r\n%d %d\n255\n" % (
        raster.base,
        raster.p,
        g.re_min,
        g.re_max,
        g.im_min,
        g.im_max,
        raster.max_iter,
        raster.r_esc,
        g.width,
        g.height,
    )
    rgb = np.repeat(shade[:, :, None], 3, axis=2)
    return header.encode("ascii") + rgb.tobytes()


def sidecar_json(raster, extra=None):
    """Machine-readable companion for a raster artifact."""
    from . import __version__

    doc = {
        "base": raster.base,
        "p": raster.p,
        "window": raster.grid.window(),
        "resolution": [raster.grid.width, raster.grid.height],
        "max_iter": raster.max_iter,
        "R_esc": raster.r_esc,
        "bounded_count": raster.bounded_count,
        "kernel_lane": kernels.lane_name(),
        "version": __version__,
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n"
