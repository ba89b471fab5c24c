"""Phaseless Pauli words with symplectic commutation.

A word on ``n`` qubits is a pair of 0/1 vectors ``(x, z)``; Y is ``x = z = 1``.
The symplectic vector used by the linear-algebra layer is ``[x | z]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Set

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True, eq=False)
class PauliWord:
    """Phaseless n-qubit Pauli operator."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.uint8) & 1
        z = np.asarray(self.z, dtype=np.uint8) & 1
        if x.shape != z.shape or x.ndim != 1:
            raise DimensionError(f"x and z parts differ in shape: {x.shape} vs {z.shape}")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @property
    def n_qubits(self) -> int:
        return int(self.x.shape[0])

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliWord":
        zero = np.zeros(n_qubits, dtype=np.uint8)
        return cls(zero, zero)

    @classmethod
    def from_qubits(cls, n_qubits: int, x_qubits: Iterable[int] = (), z_qubits: Iterable[int] = ()) -> "PauliWord":
        """Word with X on ``x_qubits`` and Z on ``z_qubits``; repeated qubits cancel."""
        x = np.zeros(n_qubits, dtype=np.uint8)
        z = np.zeros(n_qubits, dtype=np.uint8)
        for part, qubits in ((x, x_qubits), (z, z_qubits)):
            for q in qubits:
                if not 0 <= q < n_qubits:
                    raise DimensionError(f"qubit {q} out of range for {n_qubits} qubits")
                part[q] ^= 1
        return cls(x, z)

    @classmethod
    def from_symplectic(cls, v: Sequence[int] | np.ndarray) -> "PauliWord":
        v = np.asarray(v, dtype=np.uint8)
        if v.ndim != 1 or v.shape[0] % 2:
            raise DimensionError(f"symplectic vector must have even length, got {v.shape}")
        n = v.shape[0] // 2
        return cls(v[:n], v[n:])

    def to_symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    @property
    def is_x_type(self) -> bool:
        return not self.z.any()

    @property
    def is_z_type(self) -> bool:
        return not self.x.any()

    def _check(self, other: "PauliWord"):
        if other.n_qubits != self.n_qubits:
            raise DimensionError(f"word sizes differ: {self.n_qubits} vs {other.n_qubits}")

    def multiply(self, other: "PauliWord") -> "PauliWord":
        self._check(other)
        return PauliWord(self.x ^ other.x, self.z ^ other.z)

    __mul__ = multiply

    def commutes(self, other: "PauliWord") -> bool:
        self._check(other)
        form = int(np.count_nonzero(self.x & other.z)) + int(np.count_nonzero(self.z & other.x))
        return form % 2 == 0

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def support(self) -> Set[int]:
        return set(np.flatnonzero(self.x | self.z).tolist())

    def restrict(self, region: Iterable[int]) -> "PauliWord":
        """Zero every bit outside ``region``."""
        mask = np.zeros(self.n_qubits, dtype=np.uint8)
        for q in region:
            if not 0 <= q < self.n_qubits:
                raise DimensionError(f"region index {q} out of range for {self.n_qubits} qubits")
            mask[q] = 1
        return PauliWord(self.x & mask, self.z & mask)

    def letters(self) -> Dict[int, str]:
        """Map qubit -> 'X', 'Z' or 'Y' over the support."""
        out = {}
        for q in sorted(self.support()):
            out[q] = "Y" if self.x[q] and self.z[q] else ("X" if self.x[q] else "Z")
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliWord):
            return NotImplemented
        return self.n_qubits == other.n_qubits and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes()))

    def __repr__(self) -> str:
        body = " ".join(f"{p}{q}" for q, p in self.letters().items()) or "I"
        return f"PauliWord(n={self.n_qubits}: {body})"


def product(words: Iterable[PauliWord], n_qubits: int) -> PauliWord:
    x = np.zeros(n_qubits, dtype=np.uint8)
    z = np.zeros(n_qubits, dtype=np.uint8)
    for w in words:
        if w.n_qubits != n_qubits:
            raise DimensionError(f"word sizes differ: {w.n_qubits} vs {n_qubits}")
        x ^= w.x
        z ^= w.z
    return PauliWord(x, z)


def commutation_matrix(words: Sequence[PauliWord]) -> np.ndarray:
    """Pairwise symplectic form as a 0/1 matrix."""
    if not words:
        return np.zeros((0, 0), dtype=np.uint8)
    xs = np.stack([w.x for w in words]).astype(np.int64)
    zs = np.stack([w.z for w in words]).astype(np.int64)
    return ((xs @ zs.T + zs @ xs.T) & 1).astype(np.uint8)


__all__ = ["PauliWord", "commutation_matrix", "product"]
