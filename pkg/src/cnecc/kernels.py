"""Import-time kernel selection and the DecodePlan wrapper.

The hot path of the BER harness is the windowed decode.  A compiled
Cython kernel (cnecc._ckernel) is used when available; otherwise the
pure-Python twin (cnecc._kernel_py) takes over.  Set CNECC_PURE_PY=1 to
force the fallback, e.g. for benchmarking one against the other.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernel_py
from .convcode import Generator, Trellis
from .reftable import ReferenceTable

try:  # pragma: no cover - depends on the build environment
    from . import _ckernel
except ImportError:  # pragma: no cover
    _ckernel = None

if os.environ.get("CNECC_PURE_PY"):
    _active = _kernel_py
elif _ckernel is not None:
    _active = _ckernel
else:  # pragma: no cover
    _active = _kernel_py

BACKEND = _active.BACKEND_NAME

MAX_WINDOW_BITS = 20
MAX_KEY_SPACE = 1 << 18
MAX_WORDS_COMPILED = 128
_STAMP_LIMIT = (1 << 31) - (1 << 16)


class PlanUnsupportedError(ValueError):
    """The instance is too large for the flat-array kernels."""


class DecodePlan:
    """Packed trellis and table arrays, plus reusable kernel buffers.

    One plan serves any number of decode calls for a fixed
    (generator, table, input length); plans are not thread-safe because
    the buffers are shared across calls.
    """

    def __init__(self, generator: Generator, table: ReferenceTable, x_len: int, backend=None):
        if x_len < 1:
            raise ValueError("x_len must be positive")
        self.backend = backend if backend is not None else _active
        self.backend_name = self.backend.BACKEND_NAME
        self.generator = generator
        self.table = table
        self.x_len = x_len
        self.l = table.l
        self.omega = table.omega
        if generator.width != table.omega:
            raise ValueError("generator width and table omega differ")
        self.n_words = x_len + max(generator.memory, table.l)
        w_bits = self.omega * (table.l + 1)
        if w_bits > MAX_WINDOW_BITS:
            raise PlanUnsupportedError(f"window of {w_bits} bits exceeds {MAX_WINDOW_BITS}")
        trellis = Trellis(generator)
        nxt, out = trellis.output_tables()
        self._next_state = np.asarray(nxt, dtype=np.int32)
        self._out_word = np.asarray(out, dtype=np.int32)
        dense = np.full(1 << w_bits, -1, dtype=np.int32)
        for window, entry in table.entries.items():
            flat = 0
            for word in window:
                flat = (flat << self.omega) | word
            dense[flat] = entry.weight
        self._table_w = dense
        self._w_bits = w_bits

        if self.backend.BACKEND_NAME == "compiled":
            if self.n_words > MAX_WORDS_COMPILED:
                raise PlanUnsupportedError(
                    f"{self.n_words} received words exceed the compiled kernel's {MAX_WORDS_COMPILED}"
                )
            key_space = trellis.state_count << w_bits
            if key_space > MAX_KEY_SPACE:
                raise PlanUnsupportedError(f"key space {key_space} exceeds {MAX_KEY_SPACE}")
            cap = 2 * key_space
            self._buffers = (
                np.empty(cap, dtype=np.int32),
                np.empty(cap, dtype=np.int64),
                np.empty(cap, dtype=np.int64),
                np.empty(cap, dtype=np.int64),
                np.empty(cap, dtype=np.uint64),
                np.empty(cap, dtype=np.uint64),
                np.empty(cap, dtype=np.int32),
                np.empty(cap, dtype=np.int64),
                np.empty(cap, dtype=np.int64),
                np.empty(cap, dtype=np.int64),
                np.empty(cap, dtype=np.uint64),
                np.empty(cap, dtype=np.uint64),
                np.zeros(key_space, dtype=np.int32),
                np.zeros(key_space, dtype=np.int32),
                np.zeros(1, dtype=np.int32),
            )
            self._out_bits = np.empty(x_len, dtype=np.uint8)
        else:
            self._next_list = self._next_state.tolist()
            self._out_list = self._out_word.tolist()
            self._table_list = self._table_w.tolist()

    def decode(self, y_words) -> tuple[bool, int, np.ndarray]:
        """Decode one received sequence; (ok, weight, decoded bits)."""
        if len(y_words) != self.n_words:
            raise ValueError(f"expected {self.n_words} received words, got {len(y_words)}")
        if self.backend.BACKEND_NAME == "compiled":
            stamp_state = self._buffers[-1]
            if stamp_state[0] > _STAMP_LIMIT:
                self._buffers[-3][:] = 0
                self._buffers[-2][:] = 0
                stamp_state[0] = 0
            y = np.ascontiguousarray(y_words, dtype=np.int32)
            ok, weight = self.backend.decode_words(
                y,
                self.x_len,
                self.l,
                self.omega,
                self._next_state,
                self._out_word,
                self._table_w,
                *self._buffers,
                self._out_bits,
            )
            return bool(ok), int(weight), self._out_bits.copy()
        ok, weight, bits = self.backend.decode_words(
            [int(v) for v in y_words],
            self.x_len,
            self.l,
            self.omega,
            self._next_list,
            self._out_list,
            self._table_list,
        )
        return bool(ok), int(weight), np.asarray(bits, dtype=np.uint8)


def make_plan(generator: Generator, table: ReferenceTable, x_len: int, backend_name: str | None = None) -> DecodePlan:
    """Plan factory; backend_name in {None, "compiled", "pure-python"}."""
    if backend_name is None:
        return DecodePlan(generator, table, x_len)
    if backend_name == "compiled":
        if _ckernel is None:
            raise PlanUnsupportedError("compiled kernel is not available")
        return DecodePlan(generator, table, x_len, backend=_ckernel)
    if backend_name == "pure-python":
        return DecodePlan(generator, table, x_len, backend=_kernel_py)
    raise ValueError(f"unknown backend {backend_name!r}")


def available_backends() -> list[str]:
    names = ["pure-python"]
    if _ckernel is not None:
        names.insert(0, "compiled")
    return names
