"""Polynomial families attached to candidate eigenvalues.

Writing S v = lam v down the rows of the truncated operator forces every
coordinate of v once v_0 = 1 is fixed; v_n is a polynomial q_n(lam)
determined by the numeration base. The power values (q at 2^n or at F_n)
obey short recursions and the composite q_n is the product of the powers
picked out by n's digits. q_matrix_oracle recomputes the same values by
actually peeling the operator rows, which keeps the closed forms honest.

The recursion steps are written in incremental form, q -> 1 + (q*q - 1)/p
instead of q -> (q*q - (1-p))/p. The two are algebraically identical, but
only the first keeps the chain at the fixed value 1 exactly in floating
point for every p, and the residual identities downstream are sensitive
to that (1 is a repelling fixed value, so a one-ulp slip grows as
(2/p)^n).
"""

from . import chain, numeration, operator

# once a power value's modulus passes this, the recursion is frozen: the
# crossing value is the escape witness and every higher power returns it
ESCAPE_CUTOFF = 1e150


class QOrbit:
    """Cached power and composite values of the q family at one point.

    base "binary": q_1 = ((lam - 1) + p)/p, then q_{2^n} squares through
    the incremental step. base "fib": q_{F_0} = lam, q_{F_1} = lam**2,
    then each power multiplies the previous two through the same step.
    q_0 is 1 in both bases and composites multiply the powers selected by
    the digits of the index.
    """

    def __init__(self, base, lam, p):
        chain.check_base(base)
        self.p = chain.check_p(p)
        self.base = base
        self.lam = complex(lam)
        if base == "binary":
            self._pows = [((self.lam - 1.0) + self.p) / self.p]
        else:
            self._pows = [self.lam, self.lam * self.lam]
        self._frozen = None
        for i, v in enumerate(self._pows):
            if abs(v) > ESCAPE_CUTOFF:
                self._frozen = i
                break

    def pow_value(self, k):
        """q_{2^k} (binary) or q_{F_k} (fib)."""
        if k < 0:
            raise ValueError("power index must be >= 0")
        pows = self._pows
        if self._frozen is not None and k >= self._frozen:
            return pows[self._frozen]
        while len(pows) <= k:
            if self.base == "binary":
                q = pows[-1]
                nxt = 1.0 + (q * q - 1.0) / self.p
            else:
                nxt = 1.0 + (pows[-1] * pows[-2] - 1.0) / self.p
            pows.append(nxt)
            if abs(nxt) > ESCAPE_CUTOFF:
                self._frozen = len(pows) - 1
                return nxt
        return pows[k]

    def escaped(self, k):
        """True when the power chain crossed the cutoff at or before k."""
        self.pow_value(k)
        return self._frozen is not None and self._frozen <= k

    def _indices(self, n):
        if self.base == "binary":
            return [i for i, d in enumerate(numeration.binary_encode(n)) if d]
        return [i for i, d in enumerate(numeration.zeckendorf_encode(n)) if d]

    def value(self, n):
        """Composite q_n as the digit product; q_0 = 1."""
        if n < 0:
            raise ValueError("index must be >= 0")
        out = 1.0 + 0.0j
        for k in self._indices(n):
            out *= self.pow_value(k)
        return out


def q_pow2(n, lam, p):
    """q at index 2^n, base 2."""
    return QOrbit("binary", lam, p).pow_value(n)


def q_binary(n, lam, p):
    """q at index n, base 2."""
    return QOrbit("binary", lam, p).value(n)


def q_fib_pow(k, lam, p):
    """q at index F_k, Fibonacci base."""
    return QOrbit("fib", lam, p).pow_value(k)


def q_fib(n, lam, p):
    """q at index n, Fibonacci base."""
    return QOrbit("fib", lam, p).value(n)


def q_matrix_profile(n, lam, p, base="binary"):
    """[v_0, ..., v_n] solved straight off the truncated operator rows.

    Row k-1 of S v = lam v pins v_k through its superdiagonal entry.
    Independent of the product formulas by construction; values may
    overflow to inf for escaping lam, which callers treat as the escaped
    classification.
    """
    if n < 0:
        raise ValueError("index must be >= 0")
    lam = complex(lam)
    S = operator.build_truncated(base, p, n + 1)
    v = [0j] * (n + 1)
    v[0] = 1.0 + 0.0j
    for k in range(1, n + 1):
        acc = 0.0 + 0.0j
        top = None
        for col, val in S.rows[k - 1]:
            if col == k:
                top = val
            else:
                acc += val * v[col]
        # row k-1 always stores its climb entry at column k when M = n+1
        v[k] = (lam * v[k - 1] - acc) / top
    return v


def q_matrix_oracle(n, lam, p, base="binary"):
    """v_n from the forward solve; cross-check for the product routes."""
    return q_matrix_profile(n, lam, p, base)[n]


def f_map(z, p):
    """One step of the squared affine map ((z - (1-p))/p)**2.

    Evaluated as u = ((z - 1) + p)/p, then u*u: identical algebra, exact
    at the fixed point 1 for every float p.
    """
    chain.check_p(p)
    u = ((z - 1.0) + p) / p
    return u * u


def h_map(x, p):
    """The affine change of variable ((x - 1) + p)/p."""
    chain.check_p(p)
    return ((x - 1.0) + p) / p


def h_inv(y, p):
    """Inverse of h_map: 1 + p (y - 1)."""
    chain.check_p(p)
    return 1.0 + p * (y - 1.0)


def g_map(xy, p):
    """One step of the pair map behind the Fibonacci power recursion.

    (x, y) -> (h(x) h(y), x) with h as in h_map; the first coordinate is
    the incremental two-term step in disguise.
    """
    chain.check_p(p)
    x, y = xy
    hx = ((x - 1.0) + p) / p
    hy = ((y - 1.0) + p) / p
    return (hx * hy, x)
