"""One-step law of the stochastic adding machines.

At state n the machine attempts n -> n + 1 digit by digit and every carry
of the deterministic algorithm goes through independently with
probability p. Interrupting the walk after i carries leaves a state that
is explicit from the digits, so exact rows come out in closed form with
every probability a single p**a * (1 - p) expression. The samplers rerun
the same walk with live draws; they are kept separate from the rows so
histograms are a genuine cross-check and not a tautology.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numeration


def check_p(p):
    """Carry probabilities live strictly inside (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must satisfy 0 < p < 1, got %r" % (p,))
    return float(p)


def _check_state(n):
    if n < 0:
        raise ValueError("states are nonnegative integers, got %r" % (n,))


@dataclass(frozen=True)
class TransitionRow:
    """Sparse row of the transition operator: state -> probability."""

    source: int
    entries: dict = field(repr=False)

    def total(self):
        return sum(self.entries.values())


def binary_row(n, p):
    """Exact transition row from state n in base 2.

    With s trailing one digits the machine stays with 1 - p, reaches
    n + 1 with p**(s+1), and for 1 <= m <= s drops to n - 2**m + 1 with
    p**m * (1 - p) when the carry dies after m digit flips.
    """
    check_p(p)
    _check_state(n)
    entries = {n: 1.0 - p}
    s = 0
    while (n >> s) & 1:
        s += 1
    for m in range(1, s + 1):
        entries[n - (1 << m) + 1] = p ** m * (1.0 - p)
    entries[n + 1] = p ** (s + 1)
    return TransitionRow(n, entries)


def fib_row(n, p):
    """Exact transition row from state n in Fibonacci base.

    Replays the increment transducer blocks of the state's word: after i
    completed carry blocks the state has dropped by the digit weight they
    zeroed, and the terminal write reaches n + 1.
    """
    check_p(p)
    _check_state(n)
    word = numeration.zeckendorf_encode(n)
    blocks = numeration.increment_blocks(word)
    entries = {n: 1.0 - p}
    removed = 0
    i = 0
    for block in blocks[:-1]:
        i += 1
        removed += numeration.carry_weight(block)
        entries[n - removed] = p ** i * (1.0 - p)
    entries[n + 1] = p ** (i + 1)
    return TransitionRow(n, entries)


def binary_sample(n, p, rng):
    """One transition from n drawn by walking the carry chain with coins."""
    check_p(p)
    _check_state(n)
    i = 0
    while True:
        if not rng.bernoulli(p):
            # the carry dies; the i digits it already flipped stay zero
            return n - ((1 << i) - 1)
        if (n >> i) & 1 == 0:
            return n + 1
        i += 1


def fib_sample(n, p, rng):
    """One transition from n drawn by walking the transducer blocks."""
    check_p(p)
    _check_state(n)
    word = numeration.zeckendorf_encode(n)
    blocks = numeration.increment_blocks(word)
    removed = 0
    for block in blocks[:-1]:
        if not rng.bernoulli(p):
            return n - removed
        removed += numeration.carry_weight(block)
    if not rng.bernoulli(p):
        return n - removed
    return n + 1


_SAMPLERS = {"binary": binary_sample, "fib": fib_sample}
_ROWS = {"binary": binary_row, "fib": fib_row}


def check_base(base):
    if base not in _ROWS:
        raise ValueError("base must be 'binary' or 'fib', got %r" % (base,))
    return base


def row(base, n, p):
    """Row builder dispatch; see binary_row and fib_row."""
    return _ROWS[check_base(base)](n, p)


def trajectory(n0, steps, p, rng, base="binary"):
    """States visited by the machine: [n0, x_1, ..., x_steps]."""
    check_base(base)
    _check_state(n0)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    sampler = _SAMPLERS[base]
    out = [n0]
    x = n0
    for _ in range(steps):
        x = sampler(x, p, rng)
        out.append(x)
    return out


def histogram_check(n, p, samples, rng, base="binary"):
    """Max |empirical - exact| over the support of the row at n.

    Samples land inside the exact support by construction, so the
    empirical distribution is fully accounted for by the row's keys.
    """
    check_base(base)
    exact = _ROWS[base](n, p).entries
    sampler = _SAMPLERS[base]
    counts = dict.fromkeys(exact, 0)
    for _ in range(samples):
        counts[sampler(n, p, rng)] += 1
    return max(abs(counts[k] / samples - q) for k, q in exact.items())


_MASK64 = 0xFFFFFFFFFFFFFFFF


class RngStream:
    """Deterministic counter-based draw stream (Philox core).

    The same (seed, stream) pair replays the same draws on any platform.
    spawn(i) derives child streams with mixed keys so parallel consumers
    can partition one seed without coordination; a single stream must not
    be shared across threads.
    """

    def __init__(self, seed=0, stream=0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def random(self):
        """Uniform draw from [0, 1)."""
        return self._gen.random()

    def bernoulli(self, p):
        return self._gen.random() < p

    def integers(self, low, high):
        """Uniform integer from [low, high)."""
        return int(self._gen.integers(low, high))

    def spawn(self, i):
        """Child stream i; children of distinct (stream, i) never collide."""
        mix = (self.stream * 0x9E3779B97F4A7C15 + int(i) + 1) & _MASK64
        return RngStream(self.seed, mix)

    def __repr__(self):
        return "RngStream(seed=%d, stream=%d)" % (self.seed, self.stream)
