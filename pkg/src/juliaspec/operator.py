"""Finite truncations of the transition operator.

A truncation keeps the first M states and simply drops entries whose
column falls outside, so row sums below 1 flag exactly the rows that
leak probability past the window. Rows are stored as sorted (col, value)
tuples; values are the closed-form row expressions untouched, which is
what makes entrywise float equality against reference rows meaningful.
"""

from dataclasses import dataclass

import numpy as np

from . import chain


@dataclass(frozen=True)
class SparseTransitionMatrix:
    base: str
    p: float
    size: int
    rows: tuple  # rows[i] is a tuple of (col, value), sorted by col
    complete_rows: int  # leading rows whose full support fit the window

    def row_dict(self, i):
        return dict(self.rows[i])


def build_truncated(base, p, M):
    """First M states of the transition operator in the given base."""
    chain.check_base(base)
    chain.check_p(p)
    if M < 1:
        raise ValueError("window size must be >= 1")
    rows = []
    complete = 0
    grew = True
    for i in range(M):
        entries = chain.row(base, i, p).entries
        kept = tuple(sorted((c, v) for c, v in entries.items() if c < M))
        # row i tops out at column i + 1, so completeness is a prefix property
        if grew and len(kept) == len(entries):
            complete += 1
        else:
            grew = False
        rows.append(kept)
    return SparseTransitionMatrix(base, float(p), M, tuple(rows), complete)


def apply_right(S, v):
    """Matrix-vector product S v over the stored rows."""
    v = np.asarray(v)
    if v.shape != (S.size,):
        raise ValueError("vector length %r does not match window %d" % (v.shape, S.size))
    out = np.zeros(S.size, dtype=np.promote_types(v.dtype, np.float64))
    for i, row in enumerate(S.rows):
        acc = 0.0
        for col, val in row:
            acc += val * v[col]
        out[i] = acc
    return out


def apply_left(u, S):
    """Row-vector product u S (plain transpose action, no conjugation)."""
    u = np.asarray(u)
    if u.shape != (S.size,):
        raise ValueError("vector length %r does not match window %d" % (u.shape, S.size))
    out = np.zeros(S.size, dtype=np.promote_types(u.dtype, np.float64))
    for i, row in enumerate(S.rows):
        ui = u[i]
        for col, val in row:
            out[col] += ui * val
    return out


def column_sums(S):
    """Sum of each stored column; tends to 1 as the window grows."""
    out = np.zeros(S.size)
    for row in S.rows:
        for col, val in row:
            out[col] += val
    return out


def to_dense(S):
    A = np.zeros((S.size, S.size))
    for i, row in enumerate(S.rows):
        for col, val in row:
            A[i, col] = val
    return A


def dense_eigenvalues(S, patch_last=False):
    """Eigenvalues of the dense truncation, largest modulus first.

    patch_last=True moves each truncated row's lost mass onto its
    diagonal, restoring exact row-stochasticity (and with it the
    eigenvalue 1).
    """
    A = to_dense(S)
    if patch_last:
        for i in range(S.complete_rows, S.size):
            A[i, i] += 1.0 - A[i].sum()
    vals = np.linalg.eigvals(A)
    order = np.lexsort((vals.imag, vals.real, -np.abs(vals)))
    return vals[order]


def export_text(S):
    """Line-oriented text dump: '# base p M' then 'row<TAB>col<TAB>value'."""
    lines = ["# %s %.17g %d" % (S.base, S.p, S.size)]
    for i, row in enumerate(S.rows):
        for col, val in row:
            lines.append("%d\t%d\t%.17g" % (i, col, val))
    return "\n".join(lines) + "\n"


def tilde_square_check(p, M, trials=20, seed=0):
    """Worst gap between the squared shifted operator and its interleave.

    With T = (S - (1-p) I)/p on the binary machine, T^2 acts on a vector
    as two independent copies of the full operator, one on the even and
    one on the odd coordinates. Output coordinates above M - 4 touch rows
    that lost entries to the truncation, so the comparison window is
    0..M-4. Returns the max abs deviation over seeded random complex
    vectors.
    """
    chain.check_p(p)
    if M < 8 or M % 2:
        raise ValueError("window must be even and >= 8")
    S = build_truncated("binary", p, M)
    half = build_truncated("binary", p, M // 2)
    rng = np.random.default_rng(seed)

    def tilde(v):
        return (apply_right(S, v) - (1.0 - p) * v) / p

    worst = 0.0
    for _ in range(trials):
        v = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        lhs = tilde(tilde(v))
        rhs = np.empty(M, complex)
        rhs[0::2] = apply_right(half, v[0::2])
        rhs[1::2] = apply_right(half, v[1::2])
        gap = np.max(np.abs((lhs - rhs)[: M - 3]))
        worst = max(worst, gap)
    return worst


def _scale_blocks_match(row_dicts, k):
    """Exact block repetition of the binary truncation at scale k.

    For every level n <= k the upper half-block of the leading 2^n window
    must replicate the lower one shifted by 2^(n-1), comparing only
    columns inside the respective half windows. Entries are compared with
    ==, not a tolerance: both come from identical closed-form
    expressions.
    """
    for n in range(1, k + 1):
        half = 1 << (n - 1)
        for i in range(half):
            lower = row_dicts[i]
            upper = row_dicts[i + half]
            for j in range(half):
                a = lower.get(j)
                b = upper.get(j + half)
                if a != b:
                    return False
    return True


def self_similarity_check(p, k):
    """True when the leading 2^k binary window repeats its own halves."""
    chain.check_p(p)
    if k < 1:
        raise ValueError("scale must be >= 1")
    S = build_truncated("binary", p, 1 << k)
    row_dicts = [dict(r) for r in S.rows]
    return _scale_blocks_match(row_dicts, k)
