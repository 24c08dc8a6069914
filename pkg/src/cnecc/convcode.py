"""Rate-1/c convolutional encoders, their trellises, and code metrics.

The encoder is realized in controller canonical form with memory equal to
the maximum generator degree.  Output words are packed MSB-first: the bit
produced by the first generator polynomial is the most significant bit of
the word, which is also how words print in decimal.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

from .gf2poly import Gf2Poly, PolyMatrix, poly_gcd

MAX_MEMORY = 20


class DepthExceededError(RuntimeError):
    """Weight search failed to close back to the zero state within the step bound."""


@dataclass(frozen=True)
class Generator:
    """Generator row [g_1(z) ... g_c(z)] of a rate-1/c convolutional code."""

    polys: tuple[Gf2Poly, ...]

    def __post_init__(self):
        if len(self.polys) < 1:
            raise ValueError("a generator needs at least one polynomial")
        if not any(self.polys):
            raise ValueError("all-zero generator")
        if self.memory > MAX_MEMORY:
            raise ValueError(f"generator memory {self.memory} exceeds {MAX_MEMORY}")

    @classmethod
    def from_string(cls, text: str) -> "Generator":
        """Parse whitespace-separated ascending-power bit strings, e.g. "101 0011"."""
        parts = text.split()
        if not parts:
            raise ValueError("empty generator string")
        return cls(tuple(Gf2Poly.from_string(p) for p in parts))

    @property
    def width(self) -> int:
        """Output symbols per input bit (c)."""
        return len(self.polys)

    @property
    def memory(self) -> int:
        """Number of delay elements (maximum generator degree)."""
        return max(p.degree or 0 for p in self.polys)

    def row_matrix(self) -> PolyMatrix:
        return PolyMatrix(1, self.width, self.polys)

    def to_string(self) -> str:
        return " ".join(p.to_string() for p in self.polys)

    def __str__(self) -> str:
        return self.to_string()


class Trellis:
    """State machine of a rate-1/c encoder.

    The state packs the last ``memory`` input bits with the most recent bit
    in the most significant position, so freshly diverged paths sort after
    longer-settled ones ("increasing order of the internal state").
    """

    def __init__(self, generator: Generator):
        self.generator = generator
        m = generator.memory
        c = generator.width
        self.memory = m
        self.width = c
        self.state_count = 1 << m
        # Tap masks over the state bits: state bit (m - j) holds input u_{i-j}.
        taps = []
        for poly in generator.polys:
            mask = 0
            for j in range(1, m + 1):
                mask |= poly.coeff(j) << (m - j)
            taps.append(mask)
        const = [poly.coeff(0) for poly in generator.polys]
        next_state = []
        out_word = []
        for state in range(self.state_count):
            for bit in (0, 1):
                if m:
                    nxt = (state >> 1) | (bit << (m - 1))
                else:
                    nxt = 0
                word = 0
                for k in range(c):
                    comp = ((state & taps[k]).bit_count() + bit * const[k]) & 1
                    word |= comp << (c - 1 - k)
                next_state.append(nxt)
                out_word.append(word)
        self._next = next_state
        self._out = out_word

    def transition(self, state: int, bit: int) -> tuple[int, int]:
        """Next state and c-bit output word for one input bit."""
        idx = (state << 1) | bit
        return self._next[idx], self._out[idx]

    def output_tables(self) -> tuple[list[int], list[int]]:
        """Flat (state*2 + bit)-indexed next-state and output-word tables."""
        return list(self._next), list(self._out)


def encode(generator: Generator, bits: Sequence[int] | str, flush: bool = False) -> list[int]:
    """Encode an input bit sequence; one c-bit word (MSB-first int) per instant.

    Trailing zero input bits matter for windowed views, so the input is a
    sequence, not a polynomial.  With ``flush`` the encoder is driven back
    to the zero state by ``memory`` extra zero inputs, emitting the complete
    polynomial product.
    """
    if isinstance(bits, str):
        bits = parse_bits(bits)
    trellis = Trellis(generator)
    state = 0
    out = []
    stream: Iterable[int] = bits
    if flush:
        stream = list(bits) + [0] * generator.memory
    for b in stream:
        if b not in (0, 1):
            raise ValueError(f"input symbol {b!r} is not a bit")
        state, word = trellis.transition(state, b)
        out.append(word)
    return out


def parse_bits(text: str) -> list[int]:
    text = text.strip()
    if set(text) - {"0", "1"}:
        raise ValueError(f"not a bit string: {text!r}")
    return [int(ch) for ch in text]


def free_distance(generator: Generator, max_steps: int = 1 << 20) -> int:
    """Minimum Hamming weight over nonzero codewords.

    Least-weight-first search over the trellis from the first nonzero input
    back to the zero state, with a per-state best-weight memo.  For
    catastrophic generators this is the minimum over finite-support inputs.
    """
    trellis = Trellis(generator)
    start_state, start_word = trellis.transition(0, 1)
    start_weight = start_word.bit_count()
    if start_state == 0:
        return start_weight
    best: dict[int, int] = {start_state: start_weight}
    heap = [(start_weight, start_state)]
    steps = 0
    while heap:
        weight, state = heapq.heappop(heap)
        steps += 1
        if steps > max_steps:
            raise DepthExceededError("free-distance search exceeded its step bound")
        if weight > best.get(state, weight):
            continue
        for bit in (0, 1):
            nxt, word = trellis.transition(state, bit)
            cand = weight + word.bit_count()
            if nxt == 0:
                return cand
            if cand < best.get(nxt, cand + 1):
                best[nxt] = cand
                heapq.heappush(heap, (cand, nxt))
    raise DepthExceededError("free-distance search exhausted without closure")


def is_catastrophic(generator: Generator) -> bool:
    """True iff the gcd of the generator polynomials has degree >= 1."""
    g = generator.polys[0]
    for p in generator.polys[1:]:
        g = poly_gcd(g, p)
    return (g.degree or 0) >= 1


def t_dfree(generator: Generator) -> int:
    """Longest codeword prefix of weight below the free distance, plus one.

    The prefix starts at the zero state and must keep the state nonzero at
    every instant it covers, so prefixes of positive length start with an
    input 1.  Only defined for non-catastrophic generators.
    """
    if is_catastrophic(generator):
        raise ValueError("t_dfree is undefined for catastrophic generators")
    d = free_distance(generator)
    trellis = Trellis(generator)
    if generator.memory == 0:
        return 1

    memo: dict[tuple[int, int], int] = {}

    def longest(state: int, budget: int) -> int:
        key = (state, budget)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = 0
        for bit in (0, 1):
            nxt, word = trellis.transition(state, bit)
            cost = word.bit_count()
            if nxt != 0 and cost <= budget:
                ext = 1 + longest(nxt, budget - cost)
                if ext > best:
                    best = ext
        memo[key] = best
        return best

    first_state, first_word = trellis.transition(0, 1)
    first_cost = first_word.bit_count()
    max_j = 0
    if first_cost <= d - 1:
        max_j = 1 + longest(first_state, d - 1 - first_cost)
    return max_j + 1


def weight_profile(generator: Generator, l_max: int) -> list[int]:
    """W(l) for l = 0..l_max: minimum weight of the window [0, l] over all
    codewords that diverge from the zero state at instant 0 (first input 1).

    Only this divergence-anchored minimum grows to the free distance once l
    spans the longest sub-free-distance prefix; letting the input start
    late would pin the profile at the weight of the constant generator
    slice forever.
    """
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    trellis = Trellis(generator)
    state0, word0 = trellis.transition(0, 1)
    dist: dict[int, int] = {state0: word0.bit_count()}
    profile = [min(dist.values())]
    for _ in range(l_max):
        nxt: dict[int, int] = {}
        for state, w in dist.items():
            for bit in (0, 1):
                s2, word = trellis.transition(state, bit)
                cand = w + word.bit_count()
                if cand < nxt.get(s2, cand + 1):
                    nxt[s2] = cand
        dist = nxt
        profile.append(min(dist.values()))
    return profile


@dataclass(frozen=True)
class CodeMetrics:
    """Free distance, ambiguity span, and catastrophicity of a generator."""

    d_free: int
    t_dfree: int | None
    catastrophic: bool


def code_metrics(generator: Generator) -> CodeMetrics:
    cat = is_catastrophic(generator)
    return CodeMetrics(
        d_free=free_distance(generator),
        t_dfree=None if cat else t_dfree(generator),
        catastrophic=cat,
    )
