"""Combined error vectors, the reference table, and decodability checks.

A single-instant network error vector e leaves a footprint
(e F_0, e F_1, ..., e F_{l_t}) at a sink; windowed to l + 1 instants these
footprints span a GF(2)-linear subspace.  The reference table materializes
that subspace together with the minimum Hamming weight of any error vector
producing each element, which is the metric the windowed decoder charges
per correction.

Windows are tuples of omega-bit words (MSB-first ints), word 0 first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .convcode import Generator, Trellis, free_distance, is_catastrophic, weight_profile
from .netmodel import SinkTransfer

Window = tuple[int, ...]

ENUMERATION_CAP = 24


class WindowTooShortError(ValueError):
    """Requested window parameter l is below the transfer degree l_t."""


class TableTooLargeError(ValueError):
    """Edge count exceeds the weight-ordered enumeration cap."""


class PreconditionError(RuntimeError):
    """A decodability check was invoked with its precondition violated."""


class WindowSearchError(RuntimeError):
    """No window length up to the cap gives a trivial intersection."""

    def __init__(self, l_cap: int, collision_window: Window, collision_input: tuple[int, ...]):
        self.l_cap = l_cap
        self.collision_window = collision_window
        self.collision_input = collision_input
        super().__init__(
            f"no l <= {l_cap} separates message and error subspaces; "
            f"window {format_window(collision_window)} is reachable both ways"
        )


def format_window(window: Window) -> str:
    """Decimal rendering, word by word ("11 01 00" -> "3 1 0")."""
    return " ".join(str(w) for w in window)


def edge_mask_to_string(mask: int, edge_count: int) -> str:
    """Error vector as a bit string with edge 0 first ("(10000)" style)."""
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(edge_count))


def edge_string_to_mask(text: str) -> int:
    text = text.strip().strip("()")
    if set(text) - {"0", "1"}:
        raise ValueError(f"not an edge bit string: {text!r}")
    mask = 0
    for i, ch in enumerate(text):
        mask |= int(ch) << i
    return mask


def _word_from_colbits(col_bits: int, omega: int) -> int:
    """Repack a column-indexed bit mask into an MSB-first word."""
    word = 0
    for j in range(omega):
        word |= ((col_bits >> j) & 1) << (omega - 1 - j)
    return word


def single_edge_footprints(transfer: SinkTransfer, l: int) -> list[Window]:
    """Footprint of each single-edge error, windowed to l + 1 instants."""
    if l < transfer.l_t:
        raise WindowTooShortError(f"l = {l} is below the transfer degree l_t = {transfer.l_t}")
    omega = transfer.omega
    slices = transfer.f.slices()
    footprints = []
    for edge in range(transfer.edge_count):
        words = []
        for i in range(l + 1):
            if i < len(slices):
                words.append(_word_from_colbits(slices[i].vec_mul(1 << edge), omega))
            else:
                words.append(0)
        footprints.append(tuple(words))
    return footprints


def combined_error(e_mask: int, transfer: SinkTransfer, l: int) -> Window:
    """Windowed footprint (e F_0, ..., e F_{l_t}, 0, ..., 0) of error vector e."""
    if l < transfer.l_t:
        raise WindowTooShortError(f"l = {l} is below the transfer degree l_t = {transfer.l_t}")
    if e_mask < 0 or e_mask >= 1 << transfer.edge_count:
        raise ValueError("error vector does not fit the edge set")
    omega = transfer.omega
    slices = transfer.f.slices()
    words = []
    for i in range(l + 1):
        if i < len(slices):
            words.append(_word_from_colbits(slices[i].vec_mul(e_mask), omega))
        else:
            words.append(0)
    return tuple(words)


@dataclass(frozen=True)
class TableEntry:
    weight: int
    preimages: tuple[int, ...]  # edge masks, all minimum-weight explanations


@dataclass(frozen=True)
class ReferenceTable:
    """The combined-error subspace with minimum-weight preimages.

    ``entries`` maps every element of the span to its entry; the zero
    window is always present with weight 0.
    """

    l: int
    omega: int
    edge_count: int
    entries: dict[Window, TableEntry]

    def __contains__(self, window: Window) -> bool:
        return tuple(window) in self.entries

    def weight_of(self, window: Window) -> int | None:
        entry = self.entries.get(tuple(window))
        return entry.weight if entry else None

    def __len__(self) -> int:
        return len(self.entries)

    def nonzero_windows(self) -> list[Window]:
        zero = (0,) * (self.l + 1)
        return [w for w in self.entries if w != zero]

    def sorted_items(self) -> list[tuple[Window, TableEntry]]:
        """Entries ordered by weight, then by decimal words; deterministic export order."""
        return sorted(self.entries.items(), key=lambda kv: (kv[1].weight, kv[0]))


def _span_rank(footprints: Sequence[Window], omega: int) -> int:
    pivots: list[int] = []
    for fp in footprints:
        flat = 0
        for word in fp:
            flat = (flat << omega) | word
        for p in pivots:
            flat = min(flat, flat ^ p)
        if flat:
            pivots.append(flat)
    return len(pivots)


def build_reference_table(transfer: SinkTransfer, l: int, edge_cap: int = ENUMERATION_CAP) -> ReferenceTable:
    """Enumerate error vectors in nondecreasing weight until the span is full.

    The first error vector reaching a window fixes its weight; further
    vectors of the same weight reaching the same window are recorded as
    preimage ties.  A weight level is always finished before stopping so no
    tie is missed.
    """
    e = transfer.edge_count
    if e > edge_cap:
        raise TableTooLargeError(f"{e} edges exceeds the enumeration cap of {edge_cap}")
    footprints = single_edge_footprints(transfer, l)
    target = 1 << _span_rank(footprints, transfer.omega)
    zero = (0,) * (l + 1)
    entries: dict[Window, tuple[int, list[int]]] = {zero: (0, [0])}
    for weight in range(1, e + 1):
        if len(entries) == target:
            break
        for combo in itertools.combinations(range(e), weight):
            mask = 0
            window = zero
            for edge in combo:
                mask |= 1 << edge
                window = tuple(a ^ b for a, b in zip(window, footprints[edge]))
            known = entries.get(window)
            if known is None:
                entries[window] = (weight, [mask])
            elif known[0] == weight:
                known[1].append(mask)
    final = {w: TableEntry(weight, tuple(sorted(masks))) for w, (weight, masks) in entries.items()}
    return ReferenceTable(l=l, omega=transfer.omega, edge_count=e, entries=final)


@dataclass(frozen=True)
class WindowSpace:
    """All codeword windows X G over input prefixes of length l + 1."""

    l: int
    omega: int
    elements: dict[Window, tuple[int, ...]]  # window -> first input prefix reaching it

    def __contains__(self, window: Window) -> bool:
        return tuple(window) in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def v0_nonzero(self) -> set[Window]:
        return {w for w in self.elements if w[0] != 0}


def window_space(generator: Generator, l: int) -> WindowSpace:
    """Enumerate the 2^(l+1) output windows of all input prefixes on [0, l]."""
    if l < 0:
        raise ValueError("l must be >= 0")
    trellis = Trellis(generator)
    elements: dict[Window, tuple[int, ...]] = {}
    for prefix in itertools.product((0, 1), repeat=l + 1):
        state = 0
        words = []
        for bit in prefix:
            state, word = trellis.transition(state, bit)
            words.append(word)
        elements.setdefault(tuple(words), prefix)
    return WindowSpace(l=l, omega=generator.width, elements=elements)


def element_count_v0_nonzero(generator: Generator, l: int) -> int:
    """Number of codeword windows whose first word is nonzero."""
    return len(window_space(generator, l).v0_nonzero())


def _intersection_witness(space: WindowSpace, table: ReferenceTable) -> tuple[Window, tuple[int, ...]] | None:
    for window in table.nonzero_windows():
        hit = space.elements.get(window)
        if hit is not None:
            return window, hit
    return None


def min_window_length(generator: Generator, transfer: SinkTransfer, l_cap: int) -> int:
    """Smallest l <= l_cap with a trivial message/error-subspace intersection."""
    if generator.width != transfer.omega:
        raise ValueError("generator width and transfer omega differ")
    if l_cap < transfer.l_t:
        raise ValueError("l_cap is below the transfer degree l_t")
    witness = None
    for l in range(transfer.l_t, l_cap + 1):
        table = build_reference_table(transfer, l)
        space = window_space(generator, l)
        witness = _intersection_witness(space, table)
        if witness is None:
            return l
    assert witness is not None
    raise WindowSearchError(l_cap, witness[0], witness[1])


def _shifted(window: Window, delay: int) -> Window:
    """Delay a footprint by ``delay`` instants inside the same window."""
    n = len(window)
    return (0,) * delay + window[: n - delay]


def check_distributed(generator: Generator, transfer: SinkTransfer, l: int) -> bool:
    """Can corrections be pinned to unique instants inside every window?

    True iff no XOR of two nonzero table windows, one delayed by up to l
    instants, restricts to a codeword window whose first word is nonzero.
    Sums matching codeword windows with a zero first word are fine: the
    decoder resolves those by preferring the earlier instant (error
    preposing).  Requires the trivial-intersection precondition at this l.
    """
    table = build_reference_table(transfer, l)
    space = window_space(generator, l)
    clash = _intersection_witness(space, table)
    if clash is not None:
        raise PreconditionError(
            f"message/error intersection is nontrivial at l = {l}: "
            f"window {format_window(clash[0])}"
        )
    return find_ambiguity(table, space) is None


def find_ambiguity(table: ReferenceTable, space: WindowSpace) -> tuple[Window, Window, int] | None:
    """Witness (v_a, v_b, delay) whose sum is a codeword window with V_0 != 0."""
    hot = space.v0_nonzero()
    nonzero = table.nonzero_windows()
    l = table.l
    for va in nonzero:
        for vb in nonzero:
            for d in range(l + 1):
                summed = tuple(a ^ b for a, b in zip(va, _shifted(vb, d)))
                if summed in hot:
                    return va, vb, d
    return None


@dataclass(frozen=True)
class SufficiencyReport:
    """Window-free sufficient condition for distributed decodability.

    The output generator must be non-catastrophic with free distance at
    least 2 * omega * (l_t + 1) + 1 (enough to out-weigh any sum of two
    error footprints); ``gate_length`` is the first l whose minimum window
    weight reaches that bound.
    """

    catastrophic: bool
    d_free: int
    bound: int
    satisfied: bool
    gate_length: int | None


@dataclass(frozen=True)
class DecodabilityReport:
    l_min: int | None
    distributed: dict[int, bool]
    sufficiency: SufficiencyReport


def sufficiency_report(generator: Generator, transfer: SinkTransfer, l_cap: int = 64) -> SufficiencyReport:
    """Evaluate the free-distance sufficient condition at one sink."""
    cat = is_catastrophic(generator)
    d = free_distance(generator)
    bound = 2 * transfer.omega * (transfer.l_t + 1) + 1
    satisfied = (not cat) and d >= bound
    gate = None
    if satisfied:
        profile = weight_profile(generator, l_cap)
        for l, w in enumerate(profile):
            if w >= bound:
                gate = l
                break
    return SufficiencyReport(catastrophic=cat, d_free=d, bound=bound, satisfied=satisfied, gate_length=gate)


def analyze_sink(generator: Generator, transfer: SinkTransfer, l_cap: int = 8, distributed_span: int = 4) -> DecodabilityReport:
    """Bundle the window search, pairwise checks, and sufficient condition."""
    try:
        l_min = min_window_length(generator, transfer, l_cap)
    except WindowSearchError:
        l_min = None
    distributed: dict[int, bool] = {}
    if l_min is not None:
        for l in range(l_min, l_min + distributed_span + 1):
            distributed[l] = check_distributed(generator, transfer, l)
    return DecodabilityReport(
        l_min=l_min,
        distributed=distributed,
        sufficiency=sufficiency_report(generator, transfer),
    )
