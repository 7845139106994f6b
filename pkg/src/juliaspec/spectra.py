"""Residual-decay evidence for spectral membership.

For a candidate eigenvalue lam the truncated forward-solve vector
w = (w_0, ..., w_k, 0, ...) satisfies the eigenvalue equation exactly on
every row below k, so ||(S - lam I) w|| / ||w|| measures how close lam is
to the spectrum at cutoff k. In the binary base w_j is the power-product
family at lam itself; in the Fibonacci base the family is seeded one
affine step upstream, so the cancelling coordinates are its values at
h(lam) (the two coincide at lam = 1). The point of this module is that
the numerator needs no truncation at all: the rows at and above k that
see w form short explicit families plus a geometric tail summed in closed
form, so the residuals are exact up to float roundoff. The dense routines
recompute the same quantity by brute force on a finite window and exist
to keep the closed forms honest.

Classification thresholds are package constants and are embedded in every
report so downstream readers see what the flags meant.
"""

import math

import numpy as np

from . import julia, operator
from .chain import check_p
from .numeration import fib
from .qseq import QOrbit, h_map, q_matrix_profile

# classification thresholds for candidate evidence
Q_BOUND = 1e3
INV_Q_BOUND = 1e-3
IDENTITY_TOL = 1e-6
HORIZON_BITS = 12  # q_n scanned for n up to 2**HORIZON_BITS


def _check_alpha(alpha):
    if not alpha >= 1.0:
        raise ValueError("norm exponent must be >= 1")
    return float(alpha)


# The alpha-power sums below run in log space: escaped orbits freeze near
# 1e300 and |q|**alpha would leave the float range, while the log of every
# term stays small. The enumeration itself is unchanged.


def _log_abs(z):
    m = abs(z)
    return math.log(m) if m else -math.inf


def _lse(logs):
    """log(sum(exp(l))) without leaving the float range."""
    top = max(logs)
    if top == -math.inf:
        return top
    return top + math.log(math.fsum(math.exp(l - top) for l in logs))


def _log1p_pow(log_x, a):
    # log(1 + exp(a log_x)), stable on both sides of 1
    s = a * log_x
    if s > 700.0:
        return s + math.log1p(math.exp(-s))
    return math.log1p(math.exp(s))


def residual_binary(lam, p, n, alpha=2.0):
    """Exact residual at cutoff k = 2^n for the base 2 machine.

    Rows below k cancel identically. The surviving rows are: the diagonal
    row k; the feeders 2^n + 2^m - 1 (m < n) whose carry dies right at
    column k; the row 2^{n+1} - 1 where the column k and column 0
    contributions collide and must be summed before taking the modulus;
    and the infinite family 2^m - 1 (m >= n + 2) that only reaches column
    0, summed as a geometric series.
    """
    check_p(p)
    a = _check_alpha(alpha)
    if n < 1:
        raise ValueError("cutoff exponent must be >= 1")
    orbit = QOrbit("binary", lam, p)
    lam = complex(lam)
    qk = orbit.pow_value(n)
    lq = _log_abs(qk)
    lp = math.log(p)
    lomp = math.log(1.0 - p)

    terms = [a * (_log_abs((1.0 - p) - lam) + lq)]
    for m in range(1, n):
        terms.append(a * (m * lp + lomp + lq))
    terms.append(a * _log_abs(p ** n * (1.0 - p) * qk + p ** (n + 1) * (1.0 - p)))
    terms.append(a * (lomp + (n + 2) * lp) - math.log1p(-p ** a))
    log_num = _lse(terms)

    log_norm = 0.0
    for t in range(n):
        log_norm += _log1p_pow(_log_abs(orbit.pow_value(t)), a)
    log_norm = _lse([log_norm, a * lq])
    return math.exp((log_num - log_norm) / a)


def _log_fib_tail(p, a, T):
    """log of the column-0 tail: sum over t >= T of (1-p)^a p^(floor(t/2) a).

    Consecutive exponents repeat in pairs, so the series splits by the
    parity of T.
    """
    b = T // 2
    lp = math.log(p)
    base = a * math.log(1.0 - p) - math.log1p(-p ** a)
    if T % 2 == 0:
        return base + math.log(2.0) + b * a * lp
    return base + b * a * lp + math.log(1.0 - p ** a + 2.0 * p ** a)


def residual_fib(lam, p, n, alpha=2.0):
    """Exact residual at cutoff k = F_n for the Fibonacci machine.

    Same shape as the binary case: diagonal row k, feeders F_n + F_t - 1
    (2 <= t <= n-2) with weight p**floor(t/2) (1-p), the collision row
    F_{n+1} - 1 mixing column k (absent when n = 2) with column 0, and
    the column 0 tail F_t - 1 (t >= n + 2) in closed form. No other row
    above k touches a nonzero coordinate: the candidate drops of a row
    F_t - 1 miss F_n for every t >= n + 2 by a parity argument, which the
    dense cross-check confirms.
    """
    check_p(p)
    a = _check_alpha(alpha)
    if n < 2:
        raise ValueError("cutoff index must be >= 2")
    # the coordinates that cancel the rows below F_n are the family values
    # at h(lam), not at lam; see the module docstring
    orbit = QOrbit("fib", h_map(lam, p), p)
    lam = complex(lam)
    qk = orbit.pow_value(n)
    lq = _log_abs(qk)
    lp = math.log(p)
    lomp = math.log(1.0 - p)
    omp = 1.0 - p

    terms = [a * (_log_abs((1.0 - p) - lam) + lq)]
    for t in range(2, n - 1):
        terms.append(a * ((t // 2) * lp + lomp + lq))
    coll = p ** ((n + 1) // 2) * omp + 0.0j
    if n >= 3:
        coll += p ** ((n - 1) // 2) * omp * qk
    terms.append(a * _log_abs(coll))
    terms.append(_log_fib_tail(p, a, n + 2))
    log_num = _lse(terms)

    # norm transfer: valid digit words on positions 0..m-1
    lprev2, lprev1 = 0.0, 0.0
    for m in range(1, n + 1):
        cur = _lse([lprev1, a * _log_abs(orbit.pow_value(m - 1)) + lprev2])
        lprev2, lprev1 = lprev1, cur
    log_norm = _lse([lprev1, a * lq])
    return math.exp((log_num - log_norm) / a)


def residual_binary_dense(lam, p, n, alpha=2.0, tiny=1e-30):
    """Brute-force residual at k = 2^n: forward-solved w, real matvec.

    w comes from the operator rows themselves (not the product formulas),
    the window holds every structured row, and the out-of-window column 0
    feeders are added term by term until they drop below tiny.
    """
    check_p(p)
    a = _check_alpha(alpha)
    if n < 1:
        raise ValueError("cutoff exponent must be >= 1")
    k = 2 ** n
    M = 2 ** (n + 1) + 2
    S = operator.build_truncated("binary", p, M)
    w = np.zeros(M, complex)
    w[: k + 1] = q_matrix_profile(k, lam, p, "binary")
    # escaped lam explodes the profile; report nan instead of warning
    with np.errstate(over="ignore", invalid="ignore"):
        r = operator.apply_right(S, w) - complex(lam) * w
        num = float(np.sum(np.abs(r) ** a))
        norm_a = float(np.sum(np.abs(w) ** a))
    m = 1
    while (1 << m) - 1 < M:
        m += 1
    while True:
        term = (p ** m * (1.0 - p)) ** a  # |w_0| = 1
        num += term
        if term < tiny:
            break
        m += 1
    return (num / norm_a) ** (1.0 / a)


def residual_fib_dense(lam, p, n, alpha=2.0, tiny=1e-30):
    """Brute-force residual at k = F_n, same design as the binary one."""
    check_p(p)
    a = _check_alpha(alpha)
    if n < 2:
        raise ValueError("cutoff index must be >= 2")
    k = fib(n)
    M = fib(n + 1) + 2
    S = operator.build_truncated("fib", p, M)
    w = np.zeros(M, complex)
    w[: k + 1] = q_matrix_profile(k, lam, p, "fib")
    with np.errstate(over="ignore", invalid="ignore"):
        r = operator.apply_right(S, w) - complex(lam) * w
        num = float(np.sum(np.abs(r) ** a))
        norm_a = float(np.sum(np.abs(w) ** a))
    t = n + 2
    while fib(t) - 1 < M:
        t += 1
    while True:
        term = (p ** (t // 2) * (1.0 - p)) ** a
        num += term
        if term < tiny:
            break
        t += 1
    return (num / norm_a) ** (1.0 / a)


def residual_identity(lam, p, terms):
    """Gap of the telescoping left-vector identity after `terms` terms.

    The identity rewrites q_1 as the weighted sum of reciprocals of the
    odd-block products q_{2^i - 1}. When a product modulus falls below
    1e-300 the sum stops meaning anything, and the gap is reported as nan
    (the identity is inapplicable at such lam, and nan compares False
    against any threshold).
    """
    check_p(p)
    if terms < 1:
        raise ValueError("need at least one term")
    orbit = QOrbit("binary", lam, p)
    q1 = orbit.pow_value(0)
    total = 0.0 + 0.0j
    prod = 1.0 + 0.0j
    for i in range(1, terms + 1):
        prod *= orbit.pow_value(i - 1)
        if abs(prod) < 1e-300:
            return float("nan")
        total += p ** (i - 1) * (1.0 - p) / prod
    return abs(q1 - total)


def _orbit_q_extremes(orbit, bits=HORIZON_BITS):
    """(max, min) of |q_n| over 1 <= n <= 2**bits.

    |q_n| is the product of the |q_{2^j}| picked by n's bits, so the
    extremes over all subsets of bits 0..bits-1 factor through
    max(1, m_j) and min(1, m_j); the single index 2**bits rides along.
    """
    mods = [abs(orbit.pow_value(j)) for j in range(bits + 1)]
    hi = 1.0
    lo = 1.0
    for m in mods[:bits]:
        hi *= max(1.0, m)
        lo *= min(1.0, m)
    return max(hi, mods[bits]), min(lo, mods[bits])


def candidate_evidence(lam, p, terms=30):
    """Classification evidence for one candidate eigenvalue.

    Returns a dict with the raw numbers and the three flags: the q family
    stays bounded, its reciprocals stay bounded, and the telescoping
    identity holds. All three hold on spectrum members; the flags are
    evidence, not a proof.
    """
    check_p(p)
    orbit = QOrbit("binary", lam, p)
    q_max, q_min = _orbit_q_extremes(orbit)
    gap = residual_identity(lam, p, terms)
    return {
        "point": complex(lam),
        "q_max": q_max,
        "q_min": q_min,
        "identity_gap": gap,
        "q_bounded": bool(q_max < Q_BOUND),
        "inv_q_bounded": bool(q_min > INV_Q_BOUND),
        "identity_holds": bool(gap < IDENTITY_TOL),
    }


def residual_candidates(p, depth=8, terms=30):
    """Evidence table for every preimage-of-1 candidate to the given depth."""
    pts = julia.preimages_of_one(p, depth)
    return [candidate_evidence(z, p, terms) for z in pts]


def left_vector_gap(lam, p, M=1024, tail_terms=80):
    """Sup-norm defect of the reciprocal left vector on a finite window.

    u_j = 1/q_j(lam) should satisfy u (S - lam I) = 0. Every column j in
    1..M-1 of the binary truncation receives all its feeders inside the
    window, but column 0 is fed by the states 2^m - 1 forever, so its
    coordinate is completed with the analytic tail before taking the sup
    over the first M - sqrt(M) coordinates.
    """
    check_p(p)
    if M < 4:
        raise ValueError("window too small")
    orbit = QOrbit("binary", lam, p)
    S = operator.build_truncated("binary", p, M)
    u = np.empty(M, complex)
    u[0] = 1.0
    for j in range(1, M):
        qj = orbit.value(j)
        if abs(qj) < 1e-300:
            raise ValueError("left vector undefined: q_%d vanished" % j)
        u[j] = 1.0 / qj
    g = operator.apply_left(u, S) - complex(lam) * u
    m = 1
    while (1 << m) - 1 < M:
        m += 1
    for _ in range(tail_terms):
        prod = orbit.value((1 << m) - 1)
        if abs(prod) < 1e-300:
            break
        term = p ** m * (1.0 - p) / prod
        g[0] += term
        if abs(term) < 1e-30:
            break
        m += 1
    cut = M - math.isqrt(M)
    return float(np.max(np.abs(g[:cut])))


def truncation_spectrum_report(base, p, M, grid=None, max_iter=300, r_esc=4.0, eps=0.1):
    """Eigenvalues of the patched truncation against the escape raster.

    Each eigenvalue gets its own escape iteration plus a membership flag:
    bounded itself, or within eps of a bounded raster pixel center. The
    report is observational (no pass/fail): it returns the rows, a CSV
    rendering, and a summary with the thresholds embedded.
    """
    from . import __version__

    check_p(p)
    if grid is None:
        lim = 1.5 if base == "binary" else 2.0
        grid = julia.GridSpec(-lim, lim, -lim, lim, 256, 256)
    S = operator.build_truncated(base, p, M)
    vals = operator.dense_eigenvalues(S, patch_last=True)
    if base == "binary":
        raster = julia.filled_julia_grid(p, grid, max_iter, r_esc)
        point_escape = julia.escapes_f
    else:
        raster = julia.ep_grid(p, grid, max_iter, r_esc)
        point_escape = julia.ep_escape
    mask = raster.bounded_mask()
    re, im = julia.pixel_centers(grid)
    rows_idx, cols_idx = np.nonzero(mask)
    bre = re[cols_idx]
    bim = im[rows_idx]

    rows = []
    dists = []
    members = 0
    for lam in vals:
        esc = point_escape(lam, p, max_iter, r_esc)
        if esc == julia.BOUNDED:
            dist = 0.0
        elif bre.size:
            dist = float(np.min(np.hypot(bre - lam.real, bim - lam.imag)))
        else:
            dist = float("inf")
        member = esc == julia.BOUNDED or dist <= eps
        members += member
        dists.append(dist)
        rows.append((float(lam.real), float(lam.imag), int(esc), bool(member)))

    csv_lines = ["re,im,escape_iter,member"]
    for lre, lim_, esc, member in rows:
        csv_lines.append("%.17g,%.17g,%d,%d" % (lre, lim_, esc, int(member)))
    summary = {
        "base": base,
        "p": p,
        "M": M,
        "max_iter": max_iter,
        "R_esc": r_esc,
        "eps": eps,
        "window": grid.window(),
        "resolution": [grid.width, grid.height],
        "eigenvalues": len(rows),
        "fraction_member": members / len(rows),
        "max_dist_proxy": max(dists),
        "bounded_pixels": raster.bounded_count,
        "version": __version__,
    }
    return {"rows": rows, "csv": "\n".join(csv_lines) + "\n", "summary": summary}
