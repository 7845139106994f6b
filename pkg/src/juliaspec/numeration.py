"""Digit words and exact increment algorithms in base 2 and Fibonacci base.

Words are little-endian lists of 0/1 ints: digits[i] carries weight 2**i
in base 2 and F_i in Fibonacci base, where F_0 = 1, F_1 = 2 and
F_k = F_{k-1} + F_{k-2}. Words are kept normalized (no most-significant
zeros), so the empty list is 0 and value equality is list equality.
Fibonacci-base words additionally never hold two adjacent ones.

Increments never fall back to integer addition. Base 2 walks the carry
chain digit by digit; the Fibonacci base replays a two-state transducer
that rewrites digit blocks from the least significant end. The block path
is exposed because the stochastic transition rows and samplers interrupt
it mid-walk.
"""

from collections import namedtuple

_FIBS = [1, 2]


def fib(k):
    """F_k with F_0 = 1, F_1 = 2. Exact for any k (Python ints)."""
    if k < 0:
        raise ValueError("fib index must be >= 0")
    while len(_FIBS) <= k:
        _FIBS.append(_FIBS[-1] + _FIBS[-2])
    return _FIBS[k]


def _check_digits(w):
    for i, d in enumerate(w):
        if d not in (0, 1):
            raise ValueError("digit %r at position %d is not 0/1" % (d, i))


def _check_zeck(w):
    _check_digits(w)
    for i in range(len(w) - 1):
        if w[i] and w[i + 1]:
            raise ValueError("adjacent ones at positions %d,%d" % (i, i + 1))


def binary_encode(n):
    """Little-endian bits of n; 0 encodes to the empty word."""
    if n < 0:
        raise ValueError("cannot encode a negative value")
    w = []
    while n:
        w.append(n & 1)
        n >>= 1
    return w


def binary_decode(w):
    """Value of a little-endian bit word."""
    _check_digits(w)
    value = 0
    for d in reversed(w):
        value = (value << 1) | d
    return value


def binary_increment(w):
    """Successor word via the carry chain, never via integer addition.

    The entering unit flips trailing ones to zeros until it lands in a
    zero digit or extends the word by one position.
    """
    _check_digits(w)
    out = list(w)
    i = 0
    while i < len(out) and out[i]:
        out[i] = 0
        i += 1
    if i == len(out):
        out.append(1)
    else:
        out[i] = 1
    return out


def zeckendorf_encode(n):
    """Greedy Fibonacci-base word: subtract the largest F_i that fits.

    Greedy subtraction can never take two adjacent indices, so the output
    is always a valid word.
    """
    if n < 0:
        raise ValueError("cannot encode a negative value")
    if n == 0:
        return []
    k = 0
    while fib(k + 1) <= n:
        k += 1
    w = [0] * (k + 1)
    rem = n
    for i in range(k, -1, -1):
        if fib(i) <= rem:
            w[i] = 1
            rem -= fib(i)
    return w


def zeckendorf_decode(w):
    """Value of a Fibonacci-base word; rejects adjacent ones."""
    _check_zeck(w)
    return sum(fib(i) for i, d in enumerate(w) if d)


def _digit(w, i):
    # digits above the stored word read as zeros
    return w[i] if i < len(w) else 0


def increment_blocks(w):
    """Block path of the increment transducer, least significant first.

    Each element is (inp, out, lo, hi): the transducer read digits
    lo..hi (most significant digit first in the labels) and rewrote them
    as out. Every block but the last propagates the pending carry one
    level up; the last block deposits it. A word starting with a one
    needs a three-digit first block because the doubled unit 2 F_0 equals
    F_1; afterwards two-digit blocks suffice.

    Assumes a valid word. Callers that accept external input validate
    first.
    """
    blocks = []
    if _digit(w, 0):
        if _digit(w, 2):
            blocks.append(("101", "000", 0, 2))
            t = 3
        else:
            return [("001", "010", 0, 2)]
    else:
        t = 0
    while True:
        # at owe level t the digit d_t is always 0, so only d_{t+1} branches
        if _digit(w, t + 1):
            blocks.append(("10", "00", t, t + 1))
            t += 2
        else:
            blocks.append(("00", "01", t, t + 1))
            return blocks


def carry_weight(block):
    """Digit weight a carry block zeroes out (the drop when it fails next)."""
    inp, out, lo, hi = block
    if len(inp) == 3:
        return fib(0) + fib(2)
    return fib(hi)


def zeckendorf_increment(w):
    """Successor word by replaying the transducer blocks."""
    _check_zeck(w)
    out = list(w)
    for inp, outl, lo, hi in increment_blocks(w):
        if hi >= len(out):
            out.extend([0] * (hi + 1 - len(out)))
        for off, ch in enumerate(reversed(outl)):
            out[lo + off] = 1 if ch == "1" else 0
    while out and out[-1] == 0:
        out.pop()
    return out


Edge = namedtuple("Edge", "src inp out dst")


def transductor_trace(w):
    """Edge path of the increment transducer for w, least significant first.

    Edges are (src, inp, out, dst) with states I (carry pending) and T
    (carry deposited). The terminal block hops to T and every stored
    digit above the rewritten span is copied there unchanged. Labels are
    most-significant-digit-first strings; format_trace renders the
    conventional top-down display.
    """
    _check_zeck(w)
    blocks = increment_blocks(w)
    edges = [Edge("I", inp, out, "I") for inp, out, lo, hi in blocks[:-1]]
    inp, out, lo, hi = blocks[-1]
    edges.append(Edge("I", inp, out, "T"))
    for i in range(hi + 1, len(w)):
        d = "1" if w[i] else "0"
        edges.append(Edge("T", d, d, "T"))
    return edges


def format_trace(edges):
    """Most-significant-first rendering, one (dst,inp/out,src) per hop."""
    return " ".join(
        "(%s,%s/%s,%s)" % (e.dst, e.inp, e.out, e.src) for e in reversed(edges)
    )
