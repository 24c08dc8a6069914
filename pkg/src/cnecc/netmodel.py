"""Single-source multicast network model and per-sink transfer matrices.

A network code is the usual (A, K(z), B^t) triple: A maps the source
symbols onto source-outgoing edges, K(z) mixes edge symbols along the
topology (possibly with delay), and B^t selects what sink t observes.
The sink transfer matrix F_t(z) = (I - K)^{-1} B^t is computed as a
truncated power series and must come out exactly polynomial; rational
transfer behaviour is rejected because the windowed decoder needs a
finite error footprint.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .gf2poly import (
    BitMatrix,
    PolyMatrix,
    series_solve,
)


class ConfigError(ValueError):
    """Malformed network JSON configuration."""


class ValidationError(ValueError):
    """The network or code violates a structural constraint."""


class ZeroCapacityError(ValueError):
    """A sink is unreachable from the source."""


class NotFullRankError(ValueError):
    """The sink transfer matrix M_t(z) is rank deficient over GF(2)(z)."""


@dataclass(frozen=True)
class NetworkSpec:
    """Directed multigraph with one source and at least one sink.

    The edge order is global and fixed: edge i is the i-th component of
    every error vector.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    source: str
    sinks: tuple[str, ...]

    @classmethod
    def build(cls, nodes: Sequence[str], edges: Sequence[Sequence[str]], source: str, sinks: Sequence[str]) -> "NetworkSpec":
        return cls(tuple(nodes), tuple((str(u), str(v)) for u, v in edges), source, tuple(sinks))

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def validate_network(spec: NetworkSpec) -> None:
    """Check node references, source/sink degree constraints, and sink list."""
    known = set(spec.nodes)
    if len(known) != len(spec.nodes):
        raise ValidationError("duplicate node names")
    if spec.source not in known:
        raise ValidationError(f"unknown source node {spec.source!r}")
    if not spec.sinks:
        raise ValidationError("at least one sink is required")
    for t in spec.sinks:
        if t not in known:
            raise ValidationError(f"unknown sink node {t!r}")
        if t == spec.source:
            raise ValidationError(f"node {t!r} cannot be both source and sink")
    for idx, (u, v) in enumerate(spec.edges):
        if u not in known or v not in known:
            raise ValidationError(f"edge {idx} ({u!r} -> {v!r}) references an unknown node")
        if v == spec.source:
            raise ValidationError(f"edge {idx} enters the source node {u!r} -> {v!r}")
        if u in spec.sinks:
            raise ValidationError(f"edge {idx} leaves sink node {u!r}")


def _max_flow_unit(spec: NetworkSpec, sink: str) -> int:
    """Max flow from source to one sink, unit capacity per (parallel) edge."""
    index = {name: i for i, name in enumerate(spec.nodes)}
    n = len(spec.nodes)
    cap = [[0] * n for _ in range(n)]
    for u, v in spec.edges:
        cap[index[u]][index[v]] += 1
    s, t = index[spec.source], index[sink]
    flow = 0
    while True:
        parent = [-1] * n
        parent[s] = s
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in range(n):
                if parent[v] < 0 and cap[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if parent[t] < 0:
            return flow
        bottleneck = min(cap[parent[v]][v] for v in _path_nodes(parent, s, t))
        for v in _path_nodes(parent, s, t):
            u = parent[v]
            cap[u][v] -= bottleneck
            cap[v][u] += bottleneck
        flow += bottleneck


def _path_nodes(parent: list[int], s: int, t: int):
    v = t
    while v != s:
        yield v
        v = parent[v]


def multicast_capacity(spec: NetworkSpec) -> int:
    """Multicast capacity: the minimum over sinks of the source->sink max flow."""
    validate_network(spec)
    omega = None
    for t in spec.sinks:
        f = _max_flow_unit(spec, t)
        if f == 0:
            raise ZeroCapacityError(f"sink {t!r} is unreachable from the source")
        omega = f if omega is None else min(omega, f)
    return omega


@dataclass(frozen=True)
class NetworkCode:
    """An omega-dimensional network code (A, K(z), B^t per sink)."""

    a: BitMatrix
    k: PolyMatrix
    b: Mapping[str, BitMatrix]
    omega: int
    spec: NetworkSpec | None = field(default=None)

    @property
    def edge_count(self) -> int:
        return self.k.rows


def validate_code(code: NetworkCode) -> None:
    e = code.edge_count
    if code.k.cols != e:
        raise ValidationError("K(z) must be square over the edge set")
    if code.a.rows != code.omega or code.a.cols != e:
        raise ValidationError(f"A must be {code.omega} x {e}")
    if not code.b:
        raise ValidationError("at least one sink matrix B^t is required")
    for t, bt in code.b.items():
        if bt.rows != e or bt.cols != code.omega:
            raise ValidationError(f"B^{t} must be {e} x {code.omega}")
    if code.spec is not None:
        validate_network(code.spec)
        if code.spec.edge_count != e:
            raise ValidationError("edge count differs between spec and code matrices")
        for i, (_, head) in enumerate(code.spec.edges):
            for j, (tail, _) in enumerate(code.spec.edges):
                if code.k.entry(i, j) and head != tail:
                    raise ValidationError(
                        f"K(z) entry ({i}, {j}) is nonzero but edge {i} does not feed edge {j}"
                    )


@dataclass(frozen=True)
class SinkTransfer:
    """Error and message transfer seen by one sink.

    f is the |E| x omega polynomial matrix mapping edge errors to sink
    observations, m = a . f is the omega x omega message transfer, and l_t
    is deg f (0 for a zero f, so windows stay well defined).
    """

    f: PolyMatrix
    m: PolyMatrix
    l_t: int

    @property
    def omega(self) -> int:
        return self.m.cols

    @property
    def edge_count(self) -> int:
        return self.f.rows


def _make_transfer(f: PolyMatrix, a: BitMatrix, check_rank: bool = True) -> SinkTransfer:
    if a.cols != f.rows:
        raise ValidationError(f"A has {a.cols} columns but F has {f.rows} rows")
    m = PolyMatrix.from_bitmatrix(a) @ f
    if check_rank and not m.determinant():
        raise NotFullRankError("sink transfer matrix M_t(z) is rank deficient")
    deg = f.degree
    return SinkTransfer(f=f, m=m, l_t=deg if deg is not None else 0)


def sink_transfer(code: NetworkCode, sink: str, bound: int = 64) -> SinkTransfer:
    """Derive F_t = (I - K)^{-1} B^t and M_t = A F_t for one sink.

    F_t is found by solving (I - K) F = B^t slice by slice, which also
    covers cyclic networks whose full inverse is rational while F_t itself
    is polynomial.  Exactness is verified; rational F_t raises
    TruncationExceededError.
    """
    validate_code(code)
    if sink not in code.b:
        raise ValidationError(f"unknown sink {sink!r}")
    e = code.edge_count
    lhs = PolyMatrix.identity(e) + code.k  # I - K == I + K over GF(2)
    f = series_solve(lhs, PolyMatrix.from_bitmatrix(code.b[sink]), bound)
    return _make_transfer(f, code.a)


def load_transfer_direct(f: PolyMatrix, a: BitMatrix, check_rank: bool = True) -> SinkTransfer:
    """Build a SinkTransfer from explicitly supplied F_t and A matrices."""
    return _make_transfer(f, a, check_rank=check_rank)


@dataclass(frozen=True)
class NetworkBundle:
    """A loaded network configuration: one transfer per sink plus extras."""

    omega: int
    a: BitMatrix
    transfers: dict[str, SinkTransfer]
    spec: NetworkSpec | None
    generator_text: str | None


def _bit_matrix(raw, what: str) -> BitMatrix:
    try:
        return BitMatrix.from_rows(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what} matrix: {exc}") from exc


def _poly_matrix(raw, what: str) -> PolyMatrix:
    try:
        return PolyMatrix.from_rows(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what} matrix: {exc}") from exc


def load_network_json(source) -> NetworkBundle:
    """Load a network file.

    Two mutually exclusive forms describe the sink transfers:
    "K" + "B" derive F_t = (I - K)^{-1} B^t per sink, while "F" supplies
    the polynomial F_t matrices directly (rows are edges, columns the
    omega observed symbols, entries ascending-power bit strings).
    """
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read network file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise ConfigError("network configuration must be a JSON object")

    omega = data.get("omega")
    if not isinstance(omega, int) or omega < 1:
        raise ConfigError("'omega' must be a positive integer")
    if "A" not in data:
        raise ConfigError("'A' matrix is required")
    a = _bit_matrix(data["A"], "A")
    if a.rows != omega:
        raise ConfigError(f"A must have omega = {omega} rows")

    spec = None
    if "edges" in data or "nodes" in data:
        for key in ("nodes", "edges", "source", "sinks"):
            if key not in data:
                raise ConfigError(f"topology given but {key!r} is missing")
        spec = NetworkSpec.build(data["nodes"], data["edges"], data["source"], data["sinks"])
        validate_network(spec)
        if spec.edge_count != a.cols:
            raise ConfigError("edge list length differs from the A matrix width")

    has_kb = "K" in data or "B" in data
    has_f = "F" in data
    if has_kb == has_f:
        raise ConfigError("exactly one of 'K'+'B' or 'F' must be present")

    transfers: dict[str, SinkTransfer] = {}
    if has_f:
        raw_f = data["F"]
        if not isinstance(raw_f, dict) or not raw_f:
            raise ConfigError("'F' must map sink names to matrices")
        for sink, rows in raw_f.items():
            f = _poly_matrix(rows, f"F[{sink}]")
            if f.rows != a.cols or f.cols != omega:
                raise ConfigError(f"F[{sink}] must be {a.cols} x {omega}")
            transfers[sink] = load_transfer_direct(f, a)
    else:
        if "K" not in data or "B" not in data:
            raise ConfigError("'K' and 'B' must be given together")
        k = _poly_matrix(data["K"], "K")
        raw_b = data["B"]
        if not isinstance(raw_b, dict) or not raw_b:
            raise ConfigError("'B' must map sink names to matrices")
        b = {sink: _bit_matrix(rows, f"B[{sink}]") for sink, rows in raw_b.items()}
        code = NetworkCode(a=a, k=k, b=b, omega=omega, spec=spec)
        validate_code(code)
        bound = max(16, 4 * code.edge_count)
        for sink in b:
            transfers[sink] = sink_transfer(code, sink, bound=bound)

    generator_text = data.get("generator")
    if generator_text is not None and not isinstance(generator_text, str):
        raise ConfigError("'generator' must be a string")
    return NetworkBundle(omega=omega, a=a, transfers=transfers, spec=spec, generator_text=generator_text)
