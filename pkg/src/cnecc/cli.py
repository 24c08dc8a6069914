"""Command-line interface.

Subcommands: analyze, table, encode, decode, ber.  All commands are driven
by a JSON network file (see netmodel.load_network_json for the schema) and
are deterministic given their arguments and seed.

Exit codes: 0 success, 2 usage or configuration problem, 3 model or
precondition violation (rank deficiency, rational transfer, window too
short), 4 undecodable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .convcode import Generator, free_distance, is_catastrophic, t_dfree
from .errorsim import derive_q, inject_errors, run_ber, sink_setup, to_csv
from .gf2poly import NotInvertibleError, TruncationExceededError, polymat_mul
from .kernels import BACKEND
from .netmodel import (
    ConfigError,
    NetworkBundle,
    NotFullRankError,
    ValidationError,
    ZeroCapacityError,
    load_network_json,
)
from .reftable import (
    PreconditionError,
    TableTooLargeError,
    WindowSearchError,
    WindowTooShortError,
    build_reference_table,
    check_distributed,
    edge_mask_to_string,
    edge_string_to_mask,
    format_window,
    min_window_length,
    sufficiency_report,
)
from .wdecoder import DecoderConfig, UndecodableError, decode

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_UNDECODABLE = 4

_MODEL_ERRORS = (
    NotFullRankError,
    NotInvertibleError,
    TruncationExceededError,
    WindowTooShortError,
    TableTooLargeError,
    PreconditionError,
    WindowSearchError,
    ZeroCapacityError,
)


def _load_bundle(args) -> NetworkBundle:
    if not args.network:
        raise ConfigError("--network is required")
    return load_network_json(args.network)


def _input_generator(args, bundle: NetworkBundle) -> Generator:
    text = args.generator or bundle.generator_text
    if not text:
        raise ConfigError("no generator: pass --generator or add one to the network file")
    try:
        return Generator.from_string(text)
    except ValueError as exc:
        raise ConfigError(f"bad generator string: {exc}") from exc


def _output_generator(input_gen: Generator, bundle: NetworkBundle, sink: str) -> Generator:
    transfer = bundle.transfers[sink]
    row = polymat_mul(input_gen.row_matrix(), transfer.m)
    return Generator(row.row(0))


def _pick_sink(args, bundle: NetworkBundle) -> str:
    if not args.sink:
        raise ConfigError("--sink is required for this command")
    if args.sink not in bundle.transfers:
        raise ConfigError(f"unknown sink {args.sink!r}; have {sorted(bundle.transfers)}")
    return args.sink


def _write_out(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_bits_file(path: str) -> list[int]:
    text = Path(path).read_text().split()
    bits = "".join(text)
    if not bits or set(bits) - {"0", "1"}:
        raise ConfigError(f"{path}: expected a bit string")
    return [int(ch) for ch in bits]


def _read_words_file(path: str, omega: int) -> list[int]:
    words = []
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if len(line) != omega or set(line) - {"0", "1"}:
            raise ConfigError(f"{path}:{ln}: expected a {omega}-bit word per line")
        words.append(int(line, 2))
    if not words:
        raise ConfigError(f"{path}: no received words")
    return words


def _read_errors_file(path: str, edge_count: int) -> list[int]:
    masks = []
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            masks.append(0)
            continue
        if len(line) != edge_count or set(line) - {"0", "1"}:
            raise ConfigError(f"{path}:{ln}: expected an {edge_count}-bit error vector per line")
        masks.append(edge_string_to_mask(line))
    return masks


def cmd_analyze(args) -> int:
    bundle = _load_bundle(args)
    gi = _input_generator(args, bundle)
    lines = [f"input generator: {gi.to_string()}"]
    lines.append(f"  free distance: {free_distance(gi)}")
    lines.append(f"  catastrophic: {'yes' if is_catastrophic(gi) else 'no'}")
    if not is_catastrophic(gi):
        lines.append(f"  t_dfree: {t_dfree(gi)}")
    sinks = [args.sink] if args.sink else list(bundle.transfers)
    for sink in sinks:
        if sink not in bundle.transfers:
            raise ConfigError(f"unknown sink {sink!r}")
        transfer = bundle.transfers[sink]
        go = _output_generator(gi, bundle, sink)
        lines.append(f"sink {sink}:")
        lines.append(f"  output generator: {go.to_string()}")
        lines.append(f"  free distance: {free_distance(go)}")
        lines.append(f"  catastrophic: {'yes' if is_catastrophic(go) else 'no'}")
        lines.append(f"  l_t: {transfer.l_t}")
        l_cap = args.l if args.l is not None else transfer.l_t + 8
        try:
            l_min = min_window_length(go, transfer, l_cap)
        except WindowSearchError as exc:
            lines.append(f"  l_min: none up to {l_cap} ({exc})")
            continue
        lines.append(f"  l_min: {l_min}")
        suff = sufficiency_report(go, transfer)
        verdict = "satisfied" if suff.satisfied else "not satisfied"
        gate = f", gate length {suff.gate_length}" if suff.gate_length is not None else ""
        lines.append(
            f"  sufficient condition: free distance {suff.d_free} vs bound {suff.bound}"
            f" -> {verdict}{gate}"
        )
        for l in range(l_min, l_min + 5):
            ok = check_distributed(go, transfer, l)
            lines.append(f"  distributed at l={l}: {'yes' if ok else 'no'}")
    _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_table(args) -> int:
    bundle = _load_bundle(args)
    sink = _pick_sink(args, bundle)
    transfer = bundle.transfers[sink]
    l = args.l if args.l is not None else transfer.l_t
    table = build_reference_table(transfer, l)
    rows = []
    for window, entry in table.sorted_items():
        pre = ";".join(edge_mask_to_string(m, transfer.edge_count) for m in entry.preimages)
        rows.append(f"{format_window(window)}\t{entry.weight}\t{pre}")
    _write_out(args, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    bundle = _load_bundle(args)
    sink = _pick_sink(args, bundle)
    transfer = bundle.transfers[sink]
    gi = _input_generator(args, bundle)
    go = _output_generator(gi, bundle, sink)
    x_bits = _read_bits_file(args.input)
    l = args.l if args.l is not None else transfer.l_t
    placements = []
    if args.errors:
        masks = _read_errors_file(args.errors, transfer.edge_count)
        if len(masks) > len(x_bits):
            raise ConfigError("more error instants than input bits")
        placements = [(i, m) for i, m in enumerate(masks) if m]
    y = inject_errors(x_bits, placements, go, transfer, l)
    omega = transfer.omega
    _write_out(args, "\n".join(format(w, f"0{omega}b") for w in y) + "\n")
    return EXIT_OK


def cmd_decode(args) -> int:
    bundle = _load_bundle(args)
    sink = _pick_sink(args, bundle)
    transfer = bundle.transfers[sink]
    gi = _input_generator(args, bundle)
    go = _output_generator(gi, bundle, sink)
    if args.l is not None:
        l = args.l
    else:
        l = min_window_length(go, transfer, transfer.l_t + 8)
    table = build_reference_table(transfer, l)
    y = _read_words_file(args.input, transfer.omega)
    cfg = DecoderConfig(l=l, mode=args.mode, trace_enabled=args.trace is not None)
    result = decode(y, go, table, cfg)
    lines = [f"decoded: {result.decoded_string()}", f"weight: {result.total_weight}"]
    for em in result.emissions:
        lines.append(f"emission [{em.window_start},{em.window_end}]: {em.bits}")
    _write_out(args, "\n".join(lines) + "\n")
    if args.trace is not None:
        blocks = []
        for k, rows in enumerate(result.trace or []):
            blocks.append(f"window [{k},{k + l}]")
            for window, weight in rows:
                shown = "inf" if weight is None else str(weight)
                blocks.append(f"  {format_window(window)} ({shown})")
        Path(args.trace).write_text("\n".join(blocks) + "\n")
    return EXIT_OK


def _parse_grid(values: list[str]) -> list[float]:
    grid = []
    for chunk in values:
        for part in chunk.split(","):
            part = part.strip()
            if part:
                try:
                    grid.append(float(part))
                except ValueError as exc:
                    raise ConfigError(f"bad probability {part!r}") from exc
    if not grid:
        raise ConfigError("empty p grid")
    return grid


def cmd_ber(args) -> int:
    bundle = _load_bundle(args)
    gi = _input_generator(args, bundle)
    grid = _parse_grid(args.p)
    edge_count = next(iter(bundle.transfers.values())).edge_count
    for p in grid:
        try:
            derive_q(p, edge_count)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    sinks = [args.sink] if args.sink else list(bundle.transfers)
    if args.l is not None:
        l = args.l
    else:
        l = max(
            min_window_length(_output_generator(gi, bundle, s), bundle.transfers[s], bundle.transfers[s].l_t + 8)
            for s in sinks
        )
    setups = [sink_setup(s, gi, bundle.transfers[s], l) for s in sinks]
    report = run_ber(
        setups,
        grid,
        trials=args.trials,
        x_len=args.x_len,
        l=l,
        seed=args.seed,
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    _write_out(args, to_csv(report))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnecc",
        description="Convolutional network error correction: analysis, tables, codec, BER experiments"
        f" (decode kernel: {BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sink_help="sink node name"):
        p.add_argument("--network", required=True, help="network JSON file")
        p.add_argument("--generator", help="input generator, e.g. '101 111' (overrides the file)")
        p.add_argument("--sink", help=sink_help)
        p.add_argument("--l", type=int, help="window parameter l")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("analyze", help="code metrics and decodability per sink")
    common(p, "restrict the report to one sink")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("table", help="export a sink's reference table")
    common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("encode", help="encode an input block into received words")
    common(p)
    p.add_argument("input", help="file with the input bit string")
    p.add_argument("--errors", help="file with one edge-error bit string per instant")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a received word file")
    common(p)
    p.add_argument("input", help="file with one received word per line")
    p.add_argument("--mode", choices=("global", "distributed"), default="global")
    p.add_argument("--trace", help="write the per-window survivor table to this file")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("ber", help="Monte-Carlo bit-error-rate experiment")
    common(p, "restrict to one sink (default: all)")
    p.add_argument("--p", action="append", required=True, help="probability grid, repeatable or comma-separated")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--x-len", type=int, default=64, dest="x_len")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ber)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _MODEL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except UndecodableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDECODABLE
    except (ConfigError, ValidationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
