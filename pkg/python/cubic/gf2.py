"""Bit-packed linear algebra over GF(2).

Rows are packed little-endian into ``uint64`` words: column ``c`` lives in
word ``c // 64`` at bit ``c % 64``. Elimination is column-by-column with
word-level XOR and always picks the lowest-index pivot row, so results are
reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError

WORD = 64
_ONE = np.uint64(1)


def n_words(n_cols: int) -> int:
    return (n_cols + WORD - 1) // WORD


def pack(bits: Sequence[int] | np.ndarray) -> np.ndarray:
    """Pack a 0/1 vector into uint64 words.

    Args:
        bits: Dense vector of zeros and ones

    Returns:
        1-D uint64 array of length ``n_words(len(bits))``
    """
    dense = np.asarray(bits, dtype=np.uint8).reshape(1, -1)
    return pack_rows(dense)[0]


def pack_rows(dense: np.ndarray) -> np.ndarray:
    dense = np.asarray(dense, dtype=np.uint8)
    rows, cols = dense.shape
    width = n_words(cols) * WORD
    padded = np.zeros((rows, width), dtype=np.uint8)
    padded[:, :cols] = dense & 1
    as_bytes = np.packbits(padded, axis=1, bitorder="little")
    return as_bytes.view("<u8").astype(np.uint64).reshape(rows, n_words(cols))


def unpack_rows(bits: np.ndarray, n_cols: int) -> np.ndarray:
    if bits.shape[0] == 0:
        return np.zeros((0, n_cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(bits.astype("<u8")).view(np.uint8)
    dense = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return dense[:, :n_cols]


def _bit(col: int) -> Tuple[int, np.uint64]:
    return col >> 6, _ONE << np.uint64(col & 63)


@dataclass(frozen=True)
class BitMatrix:
    """Row-major packed GF(2) matrix.

    Bits beyond ``n_cols`` in the last word are always zero. Instances are
    treated as immutable; every operation returns a new matrix.
    """

    n_rows: int
    n_cols: int
    bits: np.ndarray

    def __post_init__(self):
        expected = (self.n_rows, n_words(self.n_cols))
        if self.bits.shape != expected:
            raise DimensionError(f"packed shape {self.bits.shape} does not match {expected}")

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BitMatrix":
        return cls(n_rows, n_cols, np.zeros((n_rows, n_words(n_cols)), dtype=np.uint64))

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[int]], n_cols: Optional[int] = None) -> "BitMatrix":
        arr = np.asarray(dense, dtype=np.uint8)
        if arr.ndim != 2:
            cols = n_cols if n_cols is not None else arr.size
            rows = arr.size // cols if cols else 0
            arr = arr.reshape(rows, cols)
        return cls(arr.shape[0], arr.shape[1], pack_rows(arr))

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[int]], n_cols: int) -> "BitMatrix":
        """Build a matrix from per-row lists of set columns (repeated columns cancel)."""
        supports = [list(s) for s in supports]
        bits = np.zeros((len(supports), n_words(n_cols)), dtype=np.uint64)
        for i, cols in enumerate(supports):
            for c in cols:
                if not 0 <= c < n_cols:
                    raise DimensionError(f"column {c} out of range for {n_cols} columns")
                w, b = _bit(c)
                bits[i, w] ^= b
        return cls(len(supports), n_cols, bits)

    @classmethod
    def stack(cls, mats: Sequence["BitMatrix"], n_cols: int) -> "BitMatrix":
        for m in mats:
            if m.n_cols != n_cols:
                raise DimensionError(f"cannot stack {m.n_cols}-column matrix with {n_cols} columns")
        if not mats:
            return cls.zeros(0, n_cols)
        bits = np.concatenate([m.bits for m in mats], axis=0)
        return cls(bits.shape[0], n_cols, bits)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.bits, self.n_cols)

    def row(self, i: int) -> np.ndarray:
        return unpack_rows(self.bits[i : i + 1], self.n_cols)[0]

    def select_columns(self, cols: Sequence[int]) -> "BitMatrix":
        """Matrix restricted to ``cols`` (in the given order)."""
        dense = self.to_dense()[:, list(cols)]
        return BitMatrix.from_dense(dense.reshape(self.n_rows, len(cols)), n_cols=len(cols))

    def dump(self) -> str:
        """ASCII form: one row per line of '0'/'1' characters."""
        return "\n".join("".join(str(b) for b in row) for row in self.to_dense())

    def __len__(self) -> int:
        return self.n_rows


def _eliminate(bits: np.ndarray, columns: Iterable[int], full: bool, start_row: int = 0) -> Tuple[int, List[int]]:
    """In-place Gaussian elimination over the given column order.

    Returns the index one past the last pivot row and the pivot columns.
    Forward-only elimination touches rows below the pivot; full elimination
    clears the pivot column in every other row.
    """
    r = start_row
    pivots: List[int] = []
    n_rows = bits.shape[0]
    for col in columns:
        if r >= n_rows:
            break
        w, b = _bit(col)
        hits = np.flatnonzero(bits[r:, w] & b)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            bits[[r, p]] = bits[[p, r]]
        if full:
            targets = np.flatnonzero(bits[:, w] & b)
            targets = targets[targets != r]
        else:
            below = np.flatnonzero(bits[r + 1 :, w] & b)
            targets = below + r + 1
        if targets.size:
            bits[targets] ^= bits[r]
        pivots.append(col)
        r += 1
    return r, pivots


def rank(m: BitMatrix) -> int:
    """Dimension of the row space over GF(2).

    Args:
        m: Input matrix

    Returns:
        Rank, between 0 and min(n_rows, n_cols)
    """
    if m.n_rows == 0 or m.n_cols == 0:
        return 0
    work = m.bits.copy()
    r, _ = _eliminate(work, range(m.n_cols), full=False)
    return r


def row_reduce(m: BitMatrix) -> Tuple[BitMatrix, List[int]]:
    """Reduced row-echelon form with the same row space.

    Zero rows are kept at the bottom so the result has ``m.n_rows`` rows.

    Returns:
        Tuple of (rref matrix, strictly increasing pivot columns)
    """
    work = m.bits.copy()
    _, pivots = _eliminate(work, range(m.n_cols), full=True)
    return BitMatrix(m.n_rows, m.n_cols, work), pivots


def row_basis(m: BitMatrix) -> BitMatrix:
    """Nonzero rows of the reduced echelon form."""
    rref, pivots = row_reduce(m)
    return BitMatrix(len(pivots), m.n_cols, rref.bits[: len(pivots)].copy())


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis of {v : m v^T = 0}; one row per free column."""
    rref, pivots = row_reduce(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.n_cols) if c not in pivot_set]
    dense = np.zeros((len(free), m.n_cols), dtype=np.uint8)
    if free:
        dense[np.arange(len(free)), free] = 1
        if pivots:
            reduced = unpack_rows(rref.bits[: len(pivots)], m.n_cols)
            dense[:, pivots] = reduced[:, free].T
    return BitMatrix.from_dense(dense, n_cols=m.n_cols)


class Reducer:
    """Incrementally maintained echelon basis for span membership tests."""

    def __init__(self, n_cols: int):
        self.n_cols = n_cols
        self._pivots: List[int] = []
        self._rows: List[np.ndarray] = []

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = v.copy()
        for col, row in zip(self._pivots, self._rows):
            w, b = _bit(col)
            if v[w] & b:
                v ^= row
        return v

    def add(self, v: np.ndarray) -> bool:
        """Add a packed vector; returns False if it was already in the span."""
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        w = int(nz[0])
        word = int(v[w])
        col = w * WORD + ((word & -word).bit_length() - 1)
        self._pivots.append(col)
        self._rows.append(v)
        return True

    def contains(self, v: np.ndarray) -> bool:
        return not self.reduce(v).any()


def _check_length(m: BitMatrix, v: np.ndarray | Sequence[int], what: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.uint8)
    if v.shape != (m.n_cols,):
        raise DimensionError(f"{what} has length {v.shape[0] if v.ndim else 0}, expected {m.n_cols}")
    return v


def in_rowspace(m: BitMatrix, v: np.ndarray | Sequence[int]) -> bool:
    """True iff ``v`` is a GF(2) combination of rows of ``m``.

    Raises:
        DimensionError: if ``len(v) != m.n_cols``
    """
    v = _check_length(m, v, "vector")
    basis = row_basis(m)
    reducer = Reducer(m.n_cols)
    for row in basis.bits:
        reducer.add(row)
    return reducer.contains(pack(v))


def rowspace_restricted_to(m: BitMatrix, mask: np.ndarray | Sequence[int]) -> BitMatrix:
    """Basis of the row-space elements that vanish outside ``mask``.

    Outside columns are eliminated first; the rows left below the outside
    pivots are zero outside the mask and span the restricted subspace.
    """
    mask = _check_length(m, mask, "mask").astype(bool)
    outside = np.flatnonzero(~mask)
    work = m.bits.copy()
    r, _ = _eliminate(work, outside.tolist(), full=False)
    rest = BitMatrix(m.n_rows - r, m.n_cols, work[r:])
    return row_basis(rest)


def solve(m: BitMatrix, target: np.ndarray | Sequence[int]) -> Optional[np.ndarray]:
    """Find coefficients ``c`` with ``c @ m == target`` over GF(2).

    Returns:
        0/1 vector of length ``m.n_rows``, or None when ``target`` is not in the row space
    """
    target = _check_length(m, target, "target")
    # augment with the identity to track row combinations
    aug = np.concatenate([m.to_dense(), np.eye(m.n_rows, dtype=np.uint8)], axis=1)
    work = pack_rows(aug)
    total = m.n_cols + m.n_rows
    r, pivots = _eliminate(work, range(m.n_cols), full=True)
    t = pack(np.concatenate([target, np.zeros(m.n_rows, dtype=np.uint8)]))
    for i, col in enumerate(pivots):
        w, b = _bit(col)
        if t[w] & b:
            t ^= work[i]
    dense = unpack_rows(t.reshape(1, -1), total)[0]
    if dense[: m.n_cols].any():
        return None
    return dense[m.n_cols :].copy()


def parity_products(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix of pairwise inner products ``a_i . b_j`` mod 2."""
    if a.n_cols != b.n_cols:
        raise DimensionError(f"column mismatch {a.n_cols} vs {b.n_cols}")
    da = a.to_dense().astype(np.int64)
    db = b.to_dense().astype(np.int64)
    return BitMatrix.from_dense((da @ db.T) & 1, n_cols=b.n_rows)


__all__ = [
    "BitMatrix",
    "Reducer",
    "in_rowspace",
    "kernel_basis",
    "pack",
    "parity_products",
    "rank",
    "row_basis",
    "row_reduce",
    "rowspace_restricted_to",
    "solve",
    "unpack_rows",
]
