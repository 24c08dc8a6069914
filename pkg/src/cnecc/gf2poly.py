"""Exact arithmetic for polynomials and polynomial matrices over GF(2)[z].

A polynomial is stored as a nonnegative int: bit i is the coefficient of
z^i, so the ascending-power bit string "1011" is 1 + z^2 + z^3.  The int
representation is canonical by construction (no trailing-zero coefficient
issue), equality is structural, and addition is XOR.

Two matrix flavours: BitMatrix for constant GF(2) matrices and PolyMatrix
for matrices with Gf2Poly entries.  Truncated power-series solving of
(I - K(z)) X = B, with an exactness check, lives here as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence


class NotInvertibleError(ValueError):
    """The constant slice of the matrix is singular over GF(2)."""


class TruncationExceededError(ArithmeticError):
    """No exact polynomial solution exists within the requested degree bound.

    Signals a cyclic dependency whose inverse is a genuine rational function.
    """


def _clmul(a: int, b: int) -> int:
    """Carry-less (GF(2)) product of two coefficient masks."""
    out = 0
    while a:
        if a & 1:
            out ^= b
        a >>= 1
        b <<= 1
    return out


def _divmod_mask(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


@dataclass(frozen=True)
class Gf2Poly:
    """Polynomial over GF(2); bit i of ``mask`` is the coefficient of z^i."""

    mask: int = 0

    def __post_init__(self):
        if not isinstance(self.mask, int) or self.mask < 0:
            raise ValueError("coefficient mask must be a nonnegative int")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> "Gf2Poly":
        mask = 0
        for i, c in enumerate(coeffs):
            if c not in (0, 1):
                raise ValueError(f"coefficient {c!r} is not a bit")
            mask |= c << i
        return cls(mask)

    @classmethod
    def from_string(cls, text: str) -> "Gf2Poly":
        """Parse an ascending-power bit string, e.g. "1011" = 1 + z^2 + z^3."""
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not an ascending-power bit string: {text!r}")
        return cls.from_coeffs(int(ch) for ch in text)

    @property
    def degree(self) -> int | None:
        """Degree of the polynomial, or None for the zero polynomial."""
        return self.mask.bit_length() - 1 if self.mask else None

    @property
    def coeffs(self) -> tuple[int, ...]:
        """Coefficients in ascending powers; () for the zero polynomial."""
        return tuple((self.mask >> i) & 1 for i in range(self.mask.bit_length()))

    def coeff(self, i: int) -> int:
        return (self.mask >> i) & 1 if i >= 0 else 0

    def shift(self, k: int) -> "Gf2Poly":
        """Multiply by z^k."""
        return Gf2Poly(self.mask << k)

    def exact_div(self, other: "Gf2Poly") -> "Gf2Poly":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{self} is not divisible by {other}")
        return q

    def __add__(self, other: "Gf2Poly") -> "Gf2Poly":
        return Gf2Poly(self.mask ^ other.mask)

    __sub__ = __add__
    __xor__ = __add__

    def __mul__(self, other: "Gf2Poly") -> "Gf2Poly":
        return Gf2Poly(_clmul(self.mask, other.mask))

    def __divmod__(self, other: "Gf2Poly") -> tuple["Gf2Poly", "Gf2Poly"]:
        q, r = _divmod_mask(self.mask, other.mask)
        return Gf2Poly(q), Gf2Poly(r)

    def __floordiv__(self, other: "Gf2Poly") -> "Gf2Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Gf2Poly") -> "Gf2Poly":
        return divmod(self, other)[1]

    def __bool__(self) -> bool:
        return self.mask != 0

    def to_string(self, width: int = 0) -> str:
        """Ascending-power bit string, zero-padded to at least ``width``."""
        n = max(self.mask.bit_length(), width, 1)
        return "".join(str((self.mask >> i) & 1) for i in range(n))

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Gf2Poly({self.to_string()!r})"


ZERO = Gf2Poly(0)
ONE = Gf2Poly(1)
Z = Gf2Poly(2)


def poly_mul(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly:
    """Product in GF(2)[z] (coefficient convolution reduced mod 2)."""
    return a * b


def poly_gcd(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly:
    """Greatest common divisor via Euclidean division.

    Every nonzero polynomial over GF(2) is monic, so the result is monic.
    """
    if not a and not b:
        raise ValueError("gcd(0, 0) is undefined")
    x, y = a.mask, b.mask
    while y:
        x, y = y, _divmod_mask(x, y)[1]
    return Gf2Poly(x)


def _as_poly(value) -> Gf2Poly:
    if isinstance(value, Gf2Poly):
        return value
    if isinstance(value, str):
        return Gf2Poly.from_string(value)
    if isinstance(value, int):
        if value in (0, 1):
            return Gf2Poly(value)
        raise ValueError(f"ambiguous polynomial literal {value!r}; use Gf2Poly or a bit string")
    raise TypeError(f"cannot interpret {value!r} as a GF(2)[z] polynomial")


@dataclass(frozen=True)
class BitMatrix:
    """Constant GF(2) matrix; bit j of ``row_masks[i]`` is entry (i, j)."""

    rows: int
    cols: int
    row_masks: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.row_masks) != self.rows:
            raise ValueError("row count mismatch")
        top = 1 << self.cols
        if any(m < 0 or m >= top for m in self.row_masks):
            raise ValueError("row mask exceeds column count")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        cols = len(rows[0])
        masks = []
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged rows")
            mask = 0
            for j, bit in enumerate(row):
                if bit not in (0, 1):
                    raise ValueError(f"entry {bit!r} is not a bit")
                mask |= bit << j
            masks.append(mask)
        return cls(len(rows), cols, tuple(masks))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    def get(self, i: int, j: int) -> int:
        return (self.row_masks[i] >> j) & 1

    def to_rows(self) -> list[list[int]]:
        return [[self.get(i, j) for j in range(self.cols)] for i in range(self.rows)]

    @cached_property
    def col_masks(self) -> tuple[int, ...]:
        cols = [0] * self.cols
        for i, mask in enumerate(self.row_masks):
            m = mask
            while m:
                j = (m & -m).bit_length() - 1
                cols[j] |= 1 << i
                m &= m - 1
        return tuple(cols)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, self.col_masks)

    def vec_mul(self, vec_mask: int) -> int:
        """Row vector (bit i = component i) times this matrix; bit j = column j."""
        out = 0
        m = vec_mask
        while m:
            i = (m & -m).bit_length() - 1
            out ^= self.row_masks[i]
            m &= m - 1
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.cols} vs {other.rows}")
        return BitMatrix(self.rows, other.cols, tuple(other.vec_mul(m) for m in self.row_masks))

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return BitMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.row_masks, other.row_masks)))

    def is_zero(self) -> bool:
        return not any(self.row_masks)

    def rank(self) -> int:
        rank = 0
        pivots = []
        for mask in self.row_masks:
            for p in pivots:
                mask = min(mask, mask ^ p)
            if mask:
                pivots.append(mask)
                rank += 1
        return rank

    def inverse(self) -> "BitMatrix":
        """Inverse over GF(2) by Gaussian elimination on augmented rows."""
        if self.rows != self.cols:
            raise NotInvertibleError("only square matrices are invertible")
        n = self.rows
        aug = [self.row_masks[i] | (1 << (n + i)) for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if (aug[r] >> col) & 1), None)
            if pivot is None:
                raise NotInvertibleError("matrix is singular over GF(2)")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            for r in range(n):
                if r != col and (aug[r] >> col) & 1:
                    aug[r] ^= aug[col]
        low = (1 << n) - 1
        return BitMatrix(n, n, tuple((row >> n) & low for row in aug))

    def __str__(self) -> str:
        return "\n".join(" ".join(str(self.get(i, j)) for j in range(self.cols)) for i in range(self.rows))


@dataclass(frozen=True)
class PolyMatrix:
    """Matrix over GF(2)[z], entries row-major."""

    rows: int
    cols: int
    entries: tuple[Gf2Poly, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count mismatch")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "PolyMatrix":
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        cols = len(rows[0])
        entries = []
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged rows")
            entries.extend(_as_poly(v) for v in row)
        return cls(len(rows), cols, tuple(entries))

    @classmethod
    def from_bitmatrix(cls, bm: BitMatrix) -> "PolyMatrix":
        return cls(bm.rows, bm.cols, tuple(Gf2Poly(bm.get(i, j)) for i in range(bm.rows) for j in range(bm.cols)))

    @classmethod
    def from_slices(cls, slices: Sequence[BitMatrix]) -> "PolyMatrix":
        if not slices:
            raise ValueError("at least one coefficient slice required")
        rows, cols = slices[0].rows, slices[0].cols
        if any((s.rows, s.cols) != (rows, cols) for s in slices):
            raise ValueError("slice dimensions differ")
        entries = []
        for i in range(rows):
            for j in range(cols):
                mask = 0
                for k, s in enumerate(slices):
                    mask |= s.get(i, j) << k
                entries.append(Gf2Poly(mask))
        return cls(rows, cols, tuple(entries))

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PolyMatrix":
        return cls(rows, cols, (ZERO,) * (rows * cols))

    def entry(self, i: int, j: int) -> Gf2Poly:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Gf2Poly, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    @property
    def degree(self) -> int | None:
        degs = [e.degree for e in self.entries if e]
        return max(degs) if degs else None

    def coefficient_slice(self, k: int) -> BitMatrix:
        masks = []
        for i in range(self.rows):
            mask = 0
            for j in range(self.cols):
                mask |= self.entry(i, j).coeff(k) << j
            masks.append(mask)
        return BitMatrix(self.rows, self.cols, tuple(masks))

    def slices(self) -> tuple[BitMatrix, ...]:
        """Coefficient slices 0..degree (a single zero slice for the zero matrix)."""
        top = self.degree
        return tuple(self.coefficient_slice(k) for k in range((top if top is not None else 0) + 1))

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.cols, self.rows, tuple(self.entry(i, j) for j in range(self.cols) for i in range(self.rows)))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return PolyMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.cols} vs {other.rows}")
        entries = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = 0
                for k in range(self.cols):
                    acc ^= _clmul(self.entry(i, k).mask, other.entry(k, j).mask)
                entries.append(Gf2Poly(acc))
        return PolyMatrix(self.rows, other.cols, tuple(entries))

    def determinant(self) -> Gf2Poly:
        """Determinant by fraction-free (Bareiss) elimination; exact over GF(2)[z]."""
        if self.rows != self.cols:
            raise ValueError("determinant requires a square matrix")
        n = self.rows
        a = [list(self.row(i)) for i in range(n)]
        prev = ONE
        for k in range(n - 1):
            if not a[k][k]:
                pivot = next((r for r in range(k + 1, n) if a[r][k]), None)
                if pivot is None:
                    return ZERO
                a[k], a[pivot] = a[pivot], a[k]  # sign flip is irrelevant mod 2
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] + a[i][k] * a[k][j]).exact_div(prev)
                a[i][k] = ZERO
            prev = a[k][k]
        return a[n - 1][n - 1]

    def to_strings(self) -> list[list[str]]:
        return [[str(self.entry(i, j)) for j in range(self.cols)] for i in range(self.rows)]

    def __str__(self) -> str:
        return "\n".join(" ".join(row) for row in self.to_strings())


def polymat_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Matrix product with entries in GF(2)[z]."""
    return a @ b


def series_solve(lhs: PolyMatrix, rhs: PolyMatrix, bound: int) -> PolyMatrix:
    """Solve lhs(z) X(z) = rhs(z) for a polynomial X of degree <= bound.

    Works slice by slice: with lhs = sum C_k z^k, the k-th slice of X is
    C_0^{-1} (rhs_k + sum_{i>=1} C_i X_{k-i}).  The assembled X is verified
    by a full polynomial multiplication; a mismatch means the true solution
    is rational (or of higher degree) and raises TruncationExceededError.
    """
    if lhs.rows != lhs.cols:
        raise ValueError("series_solve requires a square left-hand side")
    if lhs.cols != rhs.rows:
        raise ValueError("dimension mismatch between lhs and rhs")
    if bound < 1:
        raise ValueError("bound must be >= 1")
    c = lhs.slices()
    c0_inv = c[0].inverse()
    x_slices: list[BitMatrix] = []
    for k in range(bound + 1):
        acc = rhs.coefficient_slice(k)
        for i in range(1, min(k, len(c) - 1) + 1):
            acc = acc + (c[i] @ x_slices[k - i])
        x_slices.append(c0_inv @ acc)
    while len(x_slices) > 1 and x_slices[-1].is_zero():
        x_slices.pop()
    x = PolyMatrix.from_slices(x_slices)
    if (lhs @ x) != rhs:
        raise TruncationExceededError(
            f"no exact polynomial solution of degree <= {bound}; the inverse is rational"
        )
    return x


def series_inverse(m: PolyMatrix, bound: int) -> PolyMatrix:
    """Exact polynomial inverse of m(z), found as a truncated power series.

    Returns P with m P = I verified by full multiplication.  Raises
    NotInvertibleError when the constant slice is singular and
    TruncationExceededError when no polynomial inverse of degree <= bound
    exists.
    """
    if m.rows != m.cols:
        raise ValueError("series_inverse requires a square matrix")
    return series_solve(m, PolyMatrix.identity(m.rows), bound)
