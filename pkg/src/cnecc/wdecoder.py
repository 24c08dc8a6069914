"""Sliding-window minimum-error-weight decoder.

The decoder tracks survivor paths over the output trellis.  Each survivor
carries a residual window (received words XOR hypothesized codeword words,
with already-committed corrections removed).  Per window:

* a residual whose leading word is zero is carried along unchanged;
* a residual found in the reference table commits: the table weight is
  charged, the window is zeroed, and the correction is pinned to the
  window's start instant;
* anything else is pruned.

Children that coincide in (trellis state, residual) merge, keeping the
smallest (weight, last commit instant, input history) - the commit-instant
preference implements error preposing, the history comparison makes runs
deterministic.  In distributed mode, whenever a single survivor remains,
every input bit up to the current window start is emitted immediately.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Sequence

from .convcode import Generator, Trellis
from .reftable import ReferenceTable, Window


class UndecodableError(RuntimeError):
    """No survivor can explain the received stream within the error model."""


class DecoderStateError(RuntimeError):
    """The streaming decoder was driven outside its expected word count."""


@dataclass
class Survivor:
    input_history: int  # hypothesized inputs, first bit most significant
    state: int
    residual: Window
    weight: int
    last_commit: int  # start instant of the newest committed correction, -1 if none

    def rank_key(self) -> tuple[int, int, int]:
        return (self.weight, self.last_commit, self.input_history)


@dataclass
class DecoderConfig:
    l: int
    mode: str = "global"  # "global" or "distributed"
    input_length: int | None = None
    trace_enabled: bool = False


@dataclass(frozen=True)
class Emission:
    window_start: int
    window_end: int
    bits: str


@dataclass
class DecodeResult:
    decoded_input: tuple[int, ...]
    total_weight: int
    emissions: list[Emission]
    trace: list[list[tuple[Window, int | None]]] | None

    def decoded_string(self) -> str:
        return "".join(str(b) for b in self.decoded_input)


def expected_rx_length(x_len: int, generator: Generator, l: int) -> int:
    """Received words needed to cover every footprint: |X| + max(deg G, l)."""
    return x_len + max(generator.memory, l)


class WindowDecoder:
    """Streaming decoder; feed omega-bit words, then finalize."""

    def __init__(self, generator: Generator, table: ReferenceTable, config: DecoderConfig):
        if config.l != table.l:
            raise ValueError(f"config l = {config.l} but the table was built at l = {table.l}")
        if generator.width != table.omega:
            raise ValueError("generator width and table omega differ")
        if config.mode not in ("global", "distributed"):
            raise ValueError(f"unknown mode {config.mode!r}")
        if config.input_length is None or config.input_length < 1:
            raise ValueError("input_length must be a positive int")
        self.generator = generator
        self.table = table
        self.config = config
        self.trellis = Trellis(generator)
        self.l = config.l
        self.x_len = config.input_length
        self.expected = expected_rx_length(self.x_len, generator, config.l)
        self._word_top = 1 << generator.width
        self._zero_window: Window = (0,) * (config.l + 1)
        self._received = 0
        self._pending: list[int] = []
        self._survivors: list[Survivor] = []
        self._hist_len = 0
        self._win_start = -1  # start instant of the last classified window
        self._emitted = 0
        self.emissions: list[Emission] = []
        self.trace: list[list[tuple[Window, int | None]]] | None = (
            [] if config.trace_enabled else None
        )

    # -- streaming interface -------------------------------------------------

    def feed(self, word: int) -> str:
        """Consume one received word; returns newly emitted input bits."""
        if self._received >= self.expected:
            raise DecoderStateError(f"already received all {self.expected} words")
        if not 0 <= word < self._word_top:
            raise ValueError(f"word {word!r} does not fit {self.generator.width} bits")
        self._received += 1
        self._pending.append(word)
        if self._received < self.l + 1:
            return ""
        if self._received == self.l + 1:
            self._open_first_window()
        else:
            self._slide(word)
        if self._received == self.expected:
            return ""  # the final window's emission belongs to finalize()
        return self._emit_if_unique()

    def finalize(self) -> DecodeResult:
        """Pick the minimum-weight fully-explained survivor and backtrack."""
        if self._received != self.expected:
            raise DecoderStateError(
                f"received {self._received} of {self.expected} expected words"
            )
        self._emit_if_unique()
        eligible = [s for s in self._survivors if s.residual == self._zero_window]
        if not eligible:
            raise UndecodableError("no survivor explains the full received stream")
        winner = min(eligible, key=Survivor.rank_key)
        if self.config.mode == "distributed" and self._emitted < self.x_len:
            self._emit_from(winner, self.x_len - 1)
        decoded = tuple(self._bits(winner, 0, self.x_len - 1))
        return DecodeResult(
            decoded_input=decoded,
            total_weight=winner.weight,
            emissions=self.emissions,
            trace=self.trace,
        )

    # -- window machinery ----------------------------------------------------

    def _open_first_window(self) -> None:
        l = self.l
        free = min(self.x_len, l + 1)
        survivors = []
        for head in itertools.product((0, 1), repeat=free):
            bits = head + (0,) * (l + 1 - free)
            state = 0
            hist = 0
            words = []
            for b, y in zip(bits, self._pending):
                state, out = self.trellis.transition(state, b)
                words.append(y ^ out)
                hist = (hist << 1) | b
            survivors.append(Survivor(hist, state, tuple(words), 0, -1))
        survivors.sort(key=lambda s: s.state)  # stable: keeps ascending histories
        self._survivors = survivors
        self._hist_len = l + 1
        self._win_start = 0
        self._classify()

    def _slide(self, word: int) -> None:
        next_idx = self._win_start + self.l + 1  # input instant entering the window
        bits = (0,) if next_idx >= self.x_len else (0, 1)
        children = []
        for s in self._survivors:
            base = s.residual[1:]  # the leading word is zero after classification
            for b in bits:
                state, out = self.trellis.transition(s.state, b)
                children.append(
                    Survivor(
                        input_history=(s.input_history << 1) | b,
                        state=state,
                        residual=base + (word ^ out,),
                        weight=s.weight,
                        last_commit=s.last_commit,
                    )
                )
        children.sort(key=lambda s: s.state)  # stable
        merged: list[Survivor] = []
        slot: dict[tuple[int, Window], int] = {}
        for child in children:
            key = (child.state, child.residual)
            at = slot.get(key)
            if at is None:
                slot[key] = len(merged)
                merged.append(child)
            elif child.rank_key() < merged[at].rank_key():
                merged[at] = child
        self._survivors = merged
        self._hist_len += 1
        self._win_start += 1
        self._classify()

    def _classify(self) -> None:
        live = []
        rows = []
        for s in self._survivors:
            shown = s.residual
            if shown[0] == 0:
                live.append(s)
                rows.append((shown, s.weight))
                continue
            table_weight = self.table.weight_of(shown)
            if table_weight is None:
                rows.append((shown, None))  # pruned
                continue
            s.weight += table_weight
            s.residual = self._zero_window
            s.last_commit = self._win_start
            live.append(s)
            rows.append((shown, s.weight))
        if self.trace is not None:
            self.trace.append(rows)
        if not live:
            raise UndecodableError(
                f"all survivors pruned in window [{self._win_start}, {self._win_start + self.l}]"
            )
        self._survivors = live

    # -- distributed emission ------------------------------------------------

    def _emit_if_unique(self) -> str:
        if self.config.mode != "distributed" or len(self._survivors) != 1:
            return ""
        return self._emit_from(self._survivors[0], self._win_start)

    def _emit_from(self, survivor: Survivor, upto: int) -> str:
        if upto < self._emitted:
            return ""
        bits = "".join(str(b) for b in self._bits(survivor, self._emitted, upto))
        self.emissions.append(Emission(self._win_start, self._win_start + self.l, bits))
        self._emitted = upto + 1
        return bits

    def _bits(self, survivor: Survivor, start: int, stop: int) -> list[int]:
        return [
            (survivor.input_history >> (self._hist_len - 1 - i)) & 1
            for i in range(start, stop + 1)
        ]


def decode(
    y_words: Sequence[int],
    generator: Generator,
    table: ReferenceTable,
    config: DecoderConfig,
) -> DecodeResult:
    """Decode a complete received sequence with Algorithm-style windowing."""
    cfg = config
    if cfg.input_length is None:
        x_len = len(y_words) - max(generator.memory, cfg.l)
        if x_len < 1:
            raise ValueError("received sequence is too short for any input")
        cfg = replace(cfg, input_length=x_len)
    expected = expected_rx_length(cfg.input_length, generator, cfg.l)
    if len(y_words) != expected:
        raise ValueError(f"expected {expected} received words, got {len(y_words)}")
    decoder = WindowDecoder(generator, table, cfg)
    for word in y_words:
        decoder.feed(word)
    return decoder.finalize()
