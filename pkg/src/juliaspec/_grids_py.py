"""numpy lane of the escape-grid kernels.

Mirrors the compiled lane operation for operation: the same IEEE float
ops per pixel in the same order, so rasters from the two lanes are
bit-identical. Keep every arithmetic expression in sync with
_grids_cy.pyx when editing either file. Escaped pixels here keep being
stepped and their values discarded through np.where, which cannot change
live pixels; overflow chatter from those dead lanes is silenced locally.
"""

import numpy as np

BOUNDED = -1
OVER2 = 1e300  # squared-modulus cutoff: |value| > 1e150 escapes on its own


def julia_band(iters, row0, re_min, dre, im_max, dim, p, max_iter, rr):
    """Fill a horizontal band of escape iterations for the squared map.

    iters is an int32 (h, w) slab covering grid rows row0..row0+h-1;
    rr is the squared escape radius.
    """
    h, w = iters.shape
    re = re_min + (np.arange(w, dtype=np.float64) + 0.5) * dre
    im = im_max - (np.arange(row0, row0 + h, dtype=np.float64) + 0.5) * dim
    zr = np.broadcast_to(re, (h, w)).copy()
    zi = np.broadcast_to(im[:, None], (h, w)).copy()
    out = np.full((h, w), BOUNDED, np.int32)
    alive = np.ones((h, w), np.bool_)
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(max_iter + 1):
            esc = alive & (zr * zr + zi * zi > rr)
            out[esc] = n
            alive &= ~esc
            if not alive.any():
                break
            ur = ((zr - 1.0) + p) / p
            ui = zi / p
            nzr = ur * ur - ui * ui
            nzi = 2.0 * (ur * ui)
            zr = np.where(alive, nzr, zr)
            zi = np.where(alive, nzi, zi)
    iters[...] = out


def ep_band(iters, row0, re_min, dre, im_max, dim, p, max_iter, rr):
    """Fill a band for the two-term power recursion.

    A pixel escapes at the first k >= 1 where the pair (previous, current)
    both exceed the radius, or where the current value alone passes the
    overflow cutoff.
    """
    h, w = iters.shape
    re = re_min + (np.arange(w, dtype=np.float64) + 0.5) * dre
    im = im_max - (np.arange(row0, row0 + h, dtype=np.float64) + 0.5) * dim
    ar = np.broadcast_to(re, (h, w)).copy()
    ai = np.broadcast_to(im[:, None], (h, w)).copy()
    br = ar * ar - ai * ai
    bi = 2.0 * (ar * ai)
    out = np.full((h, w), BOUNDED, np.int32)
    alive = np.ones((h, w), np.bool_)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, max_iter + 1):
            ma = ar * ar + ai * ai
            mb = br * br + bi * bi
            esc = alive & ((mb > OVER2) | ((ma > rr) & (mb > rr)))
            out[esc] = k
            alive &= ~esc
            if not alive.any():
                break
            pr = ar * br - ai * bi
            pi = ar * bi + ai * br
            nbr = 1.0 + (pr - 1.0) / p
            nbi = pi / p
            ar = np.where(alive, br, ar)
            ai = np.where(alive, bi, ai)
            br = np.where(alive, nbr, br)
            bi = np.where(alive, nbi, bi)
    iters[...] = out
