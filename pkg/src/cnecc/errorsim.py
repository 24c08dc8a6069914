"""Probabilistic error model and Monte-Carlo bit-error-rate experiments.

At every time instant, independently: no edge errs with probability q,
and exactly i of the |E| edges err with probability p^i, where
q + sum_{i=1..|E|} p^i = 1.  Which i edges err is drawn uniformly over
i-subsets, and an erroneous edge's symbol is flipped (everything is
binary).  Trials stream such errors through the sink transfers, decode
with the windowed decoder, and score bit mismatches; undecodable blocks
conservatively count every input bit as wrong.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .convcode import Generator
from .gf2poly import Gf2Poly, polymat_mul
from .kernels import DecodePlan, PlanUnsupportedError, make_plan
from .netmodel import SinkTransfer
from .reftable import ReferenceTable, build_reference_table
from .wdecoder import DecoderConfig, UndecodableError, decode

_CHUNK = 256


def derive_q(p: float, edge_count: int) -> float:
    """No-error probability q = 1 - sum_{i=1..|E|} p^i."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p = {p} is not a probability")
    if edge_count < 1:
        raise ValueError("edge_count must be positive")
    q = 1.0 - sum(p**i for i in range(1, edge_count + 1))
    if q < 0.0:
        raise ValueError(f"p = {p} is infeasible for {edge_count} edges (q = {q} < 0)")
    return q


@dataclass(frozen=True)
class ErrorModelConfig:
    """Single-edge error probability p over a fixed edge set."""

    p: float
    edge_count: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"p = {self.p} is outside [0, 0.5]")
        q = derive_q(self.p, self.edge_count)
        total = q + sum(self.p**i for i in range(1, self.edge_count + 1))
        assert abs(total - 1.0) <= 1e-12

    @cached_property
    def q(self) -> float:
        return derive_q(self.p, self.edge_count)

    @cached_property
    def _cumulative(self) -> np.ndarray:
        probs = [self.q] + [self.p**i for i in range(1, self.edge_count + 1)]
        return np.cumsum(probs)


def sample_error_counts(cfg: ErrorModelConfig, rng: np.random.Generator, size: int) -> np.ndarray:
    """Per-instant error-edge counts: 0 w.p. q, i w.p. p^i."""
    u = rng.random(size)
    return np.searchsorted(cfg._cumulative, u, side="right")


def sample_error_matrix(cfg: ErrorModelConfig, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Error vectors (edge bitmask ints) drawn i.i.d. for every cell of ``shape``.

    Given a count i, the erring i-subset of edges is uniform: every edge
    gets a random key and the i smallest keys are flipped.
    """
    m = int(np.prod(shape))
    e = cfg.edge_count
    counts = sample_error_counts(cfg, rng, m)
    keys = rng.random((m, e))
    rank = np.argsort(np.argsort(keys, axis=1), axis=1)
    selected = rank < counts[:, None]
    bits = (1 << np.arange(e, dtype=np.int64))
    masks = (selected * bits).sum(axis=1)
    return masks.reshape(shape)


def sample_error(cfg: ErrorModelConfig, rng: np.random.Generator) -> int:
    """One error vector as an edge bitmask (bit i = edge i)."""
    return int(sample_error_matrix(cfg, rng, (1,))[0])


@dataclass(frozen=True)
class SinkSetup:
    """Everything one sink needs for decoding trials."""

    name: str
    generator: Generator  # output generator at this sink
    transfer: SinkTransfer
    table: ReferenceTable


def sink_setup(name: str, input_generator: Generator, transfer: SinkTransfer, l: int) -> SinkSetup:
    """Derive the sink's output generator and reference table."""
    out_row = polymat_mul(input_generator.row_matrix(), transfer.m)
    generator = Generator(out_row.row(0))
    return SinkSetup(
        name=name,
        generator=generator,
        transfer=transfer,
        table=build_reference_table(transfer, l),
    )


@dataclass(frozen=True)
class BerCell:
    p: float
    sink: str
    trials: int
    total_bits: int
    bit_errors: int
    undecodable_blocks: int
    ber: float


@dataclass(frozen=True)
class BerReport:
    seed: int
    x_len: int
    l: int
    backend: str
    cells: tuple[BerCell, ...]
    skipped: tuple[tuple[float, str], ...]


def _generator_words(generator: Generator) -> list[int]:
    """Word emitted per generator coefficient slice (component 0 is the MSB)."""
    c = generator.width
    words = []
    for j in range(generator.memory + 1):
        word = 0
        for k, poly in enumerate(generator.polys):
            word |= poly.coeff(j) << (c - 1 - k)
        words.append(word)
    return words


def _footprint_tables(transfer: SinkTransfer) -> list[np.ndarray]:
    """Per-slice lookup: edge bitmask -> omega-bit footprint word."""
    e = transfer.edge_count
    omega = transfer.omega
    luts = []
    for bm in transfer.f.slices():
        singles = []
        for edge in range(e):
            col_bits = bm.vec_mul(1 << edge)
            word = 0
            for j in range(omega):
                word |= ((col_bits >> j) & 1) << (omega - 1 - j)
            singles.append(word)
        lut = np.zeros(1 << e, dtype=np.int32)
        for mask in range(1, 1 << e):
            low = mask & -mask
            lut[mask] = lut[mask ^ low] ^ singles[low.bit_length() - 1]
        luts.append(lut)
    return luts


def _received_batch(
    x_bits: np.ndarray,
    e_masks: np.ndarray,
    gen_words: Sequence[int],
    footprints: Sequence[np.ndarray],
    n_words: int,
) -> np.ndarray:
    """y = x G + e F for a whole chunk of trials, one row per trial."""
    chunk, x_len = x_bits.shape
    y = np.zeros((chunk, n_words), dtype=np.int32)
    x32 = x_bits.astype(np.int32)
    for j, word in enumerate(gen_words):
        if word:
            y[:, j : j + x_len] ^= x32 * word
    for k, lut in enumerate(footprints):
        y[:, k : k + x_len] ^= lut[e_masks]
    return y


def _slow_decode(setup: SinkSetup, y_row, x_len: int, l: int):
    try:
        result = decode(list(y_row), setup.generator, setup.table, DecoderConfig(l=l, input_length=x_len))
    except UndecodableError:
        return False, None
    return True, np.asarray(result.decoded_input, dtype=np.uint8)


def run_ber(
    setups: Sequence[SinkSetup],
    p_grid: Iterable[float],
    trials: int,
    x_len: int,
    l: int,
    seed: int,
    backend_name: str | None = None,
    progress: Callable[[str], None] | None = None,
) -> BerReport:
    """Monte-Carlo BER per (p, sink) over a fixed seed.

    Trials draw a fresh random input block and a fresh error vector per
    time instant (errors only at input instants); each sink decodes its own
    received stream.  Per-cell RNG streams are split deterministically from
    the seed, so results do not depend on evaluation order.
    """
    if trials < 1 or x_len < 1:
        raise ValueError("trials and x_len must be positive")
    setups = list(setups)
    if not setups:
        raise ValueError("at least one sink setup is required")
    for s in setups:
        if s.table.l != l:
            raise ValueError(f"table for sink {s.name!r} was built at l = {s.table.l}, not {l}")

    plans: dict[str, DecodePlan | None] = {}
    backend_used = None
    for s in setups:
        try:
            plan = make_plan(s.generator, s.table, x_len, backend_name)
            plans[s.name] = plan
            backend_used = plan.backend_name
        except PlanUnsupportedError:
            plans[s.name] = None  # per-trial featureful decoder instead
    gen_words = {s.name: _generator_words(s.generator) for s in setups}
    footprints = {s.name: _footprint_tables(s.transfer) for s in setups}

    cells: list[BerCell] = []
    skipped: list[tuple[float, str]] = []
    for p_idx, p in enumerate(p_grid):
        try:
            cfg = ErrorModelConfig(p=float(p), edge_count=setups[0].transfer.edge_count)
        except ValueError as exc:
            skipped.append((float(p), str(exc)))
            continue
        for sink_idx, setup in enumerate(setups):
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(p_idx, sink_idx)))
            )
            plan = plans[setup.name]
            n_words = x_len + max(setup.generator.memory, l)
            bit_errors = 0
            undecodable = 0
            done = 0
            while done < trials:
                chunk = min(_CHUNK, trials - done)
                x_bits = rng.integers(0, 2, size=(chunk, x_len), dtype=np.uint8)
                e_masks = sample_error_matrix(cfg, rng, (chunk, x_len))
                y = _received_batch(x_bits, e_masks, gen_words[setup.name], footprints[setup.name], n_words)
                for row in range(chunk):
                    if plan is not None:
                        ok, _, bits = plan.decode(y[row])
                    else:
                        ok, bits = _slow_decode(setup, y[row], x_len, l)
                    if not ok:
                        undecodable += 1
                        bit_errors += x_len
                    else:
                        bit_errors += int(np.count_nonzero(bits != x_bits[row]))
                done += chunk
            total_bits = trials * x_len
            cells.append(
                BerCell(
                    p=float(p),
                    sink=setup.name,
                    trials=trials,
                    total_bits=total_bits,
                    bit_errors=bit_errors,
                    undecodable_blocks=undecodable,
                    ber=bit_errors / total_bits,
                )
            )
            if progress is not None:
                progress(f"p={p:g} sink={setup.name} ber={cells[-1].ber:.6g}")
    return BerReport(
        seed=seed,
        x_len=x_len,
        l=l,
        backend=backend_used or "featureful-decoder",
        cells=tuple(cells),
        skipped=tuple(skipped),
    )


CSV_HEADER = "p,sink,trials,total_bits,bit_errors,undecodable_blocks,ber"


def to_csv(report: BerReport) -> str:
    """Fixed-format CSV; 12 significant digits for the real columns."""
    lines = [CSV_HEADER]
    for c in report.cells:
        lines.append(
            f"{c.p:.12g},{c.sink},{c.trials},{c.total_bits},{c.bit_errors},"
            f"{c.undecodable_blocks},{c.ber:.12g}"
        )
    return "\n".join(lines) + "\n"


def inject_errors(
    x_bits: Sequence[int],
    placements: Sequence[tuple[int, int]],
    generator: Generator,
    transfer: SinkTransfer,
    l: int,
) -> list[int]:
    """Received words for input x with error vectors at given instants.

    ``placements`` holds (instant, edge bitmask) pairs; instants must lie
    within the input block.  Useful for driving the decoder in the
    model-faithful regime (errors separated by at least l + 1 instants).
    """
    x_len = len(x_bits)
    n_words = x_len + max(generator.memory, l)
    gen_words = _generator_words(generator)
    y = [0] * n_words
    for i, b in enumerate(x_bits):
        if b:
            for j, word in enumerate(gen_words):
                y[i + j] ^= word
    luts = _footprint_tables(transfer)
    for instant, mask in placements:
        if not 0 <= instant < x_len:
            raise ValueError(f"error instant {instant} outside the input block")
        for k, lut in enumerate(luts):
            if instant + k < n_words:
                y[instant + k] ^= int(lut[mask])
    return y
