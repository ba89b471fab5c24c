"""Symplectic analysis of CSS stabilizer sets.

All generators are pure X or pure Z, so the symplectic problems split into
an X half (X words against Z checks) and a Z half.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import gf2
from .errors import CommutationError, DimensionError, PreconditionError
from .lattice import EdgeDislocation, LatticeGeometry, Screw, StabilizerSet, Vacancy
from .pauli import PauliWord

BRUTE_FORCE_MAX_QUBITS = 14


@dataclass(frozen=True)
class LogicalBasis:
    """Symplectically paired logical representatives ``(X̄_i, Z̄_i)``."""

    pairs: Tuple[Tuple[PauliWord, PauliWord], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def gram(self) -> np.ndarray:
        """``M[i, j] = 1`` iff X̄_i anticommutes with Z̄_j."""
        k = len(self.pairs)
        out = np.zeros((k, k), dtype=np.uint8)
        for i, (xi, _) in enumerate(self.pairs):
            for j, (_, zj) in enumerate(self.pairs):
                out[i, j] = 0 if xi.commutes(zj) else 1
        return out


def _require_commuting(s: StabilizerSet):
    try:
        s.check_commutation()
    except CommutationError as e:
        raise PreconditionError(f"stabilizer set is not commuting: {e}") from e


def stabilizer_rank(s: StabilizerSet) -> int:
    """Number of independent generators."""
    return gf2.rank(s.matrix("X")) + gf2.rank(s.matrix("Z"))


def num_logical_qubits(s: StabilizerSet) -> int:
    """``k = n - rank`` of the generator matrix.

    Raises:
        PreconditionError: if the generators do not commute
    """
    _require_commuting(s)
    return s.n_qubits - stabilizer_rank(s)


def _logical_reps(checks: gf2.BitMatrix, same: gf2.BitMatrix) -> List[np.ndarray]:
    """Kernel rows of ``checks`` independent of ``same`` (dense 0/1 rows)."""
    reducer = gf2.Reducer(same.n_cols)
    for row in gf2.row_basis(same).bits:
        reducer.add(row)
    reps = []
    for row in gf2.kernel_basis(checks).to_dense():
        if reducer.add(gf2.pack(row)):
            reps.append(row)
    return reps


def _inverse(m: np.ndarray) -> np.ndarray:
    k = m.shape[0]
    aug = np.concatenate([m.astype(np.uint8) & 1, np.eye(k, dtype=np.uint8)], axis=1)
    for col in range(k):
        rows = np.flatnonzero(aug[col:, col])
        if rows.size == 0:
            raise PreconditionError("logical pairing matrix is singular")
        p = col + int(rows[0])
        aug[[col, p]] = aug[[p, col]]
        hits = np.flatnonzero(aug[:, col])
        for r in hits:
            if r != col:
                aug[r] ^= aug[col]
    return aug[:, k:]


def logical_basis(s: StabilizerSet) -> LogicalBasis:
    """k symplectic pairs of logical operators.

    X̄ candidates are kernel vectors of the Z checks outside the X row
    space (likewise for Z̄); the Z̄ list is then recombined so the pairing
    matrix becomes the identity.

    Raises:
        PreconditionError: if the generators do not commute
    """
    _require_commuting(s)
    hx, hz = s.matrix("X"), s.matrix("Z")
    lx = _logical_reps(hz, hx)
    lz = _logical_reps(hx, hz)
    if len(lx) != len(lz):
        raise PreconditionError(f"unbalanced logical counts: {len(lx)} X vs {len(lz)} Z")
    if not lx:
        return LogicalBasis(())
    lx_arr = np.array(lx, dtype=np.int64)
    lz_arr = np.array(lz, dtype=np.int64)
    pairing = (lz_arr @ lx_arr.T) & 1
    lz_arr = (_inverse(pairing).astype(np.int64) @ lz_arr) & 1
    n = s.n_qubits
    zero = np.zeros(n, dtype=np.uint8)
    pairs = tuple(
        (PauliWord(x.astype(np.uint8), zero), PauliWord(zero, z.astype(np.uint8))) for x, z in zip(lx_arr, lz_arr)
    )
    return LogicalBasis(pairs)


def _anticommutes_with_some(s: StabilizerSet, op: PauliWord) -> bool:
    hx, hz = s.matrix("X").to_dense().astype(np.int64), s.matrix("Z").to_dense().astype(np.int64)
    return bool(((hx @ op.z) & 1).any() or ((hz @ op.x) & 1).any())


def classify(s: StabilizerSet, op: PauliWord) -> str:
    """``'detectable-error'``, ``'stabilizer'`` or ``'logical'``.

    Raises:
        DimensionError: if ``op`` is not on the set's qubits
    """
    if op.n_qubits != s.n_qubits:
        raise DimensionError(f"operator has {op.n_qubits} qubits, stabilizer set {s.n_qubits}")
    if _anticommutes_with_some(s, op):
        return "detectable-error"
    if gf2.in_rowspace(s.matrix("X"), op.x) and gf2.in_rowspace(s.matrix("Z"), op.z):
        return "stabilizer"
    return "logical"


def _region_mask(n: int, region: Iterable[int]) -> np.ndarray:
    mask = np.zeros(n, dtype=np.uint8)
    for q in region:
        if not 0 <= q < n:
            raise DimensionError(f"region qubit {q} out of range for {n} qubits")
        mask[q] = 1
    return mask


def _free_in_region(checks: gf2.BitMatrix, cols: Sequence[int]) -> int:
    """Dimension of words on ``cols`` commuting with every check."""
    if not cols:
        return 0
    return len(cols) - gf2.rank(checks.select_columns(cols))


def count_logicals_in_region(s: StabilizerSet, region: Iterable[int]) -> int:
    """Independent nontrivial logical representatives supported inside ``region``.

    ``dim K_R - dim S_R`` summed over the X and Z halves, where ``K_R`` are
    region-supported words commuting with every generator and ``S_R`` the
    stabilizer-group elements supported in the region.
    """
    mask = _region_mask(s.n_qubits, region)
    cols = np.flatnonzero(mask).tolist()
    if not cols:
        return 0
    hx, hz = s.matrix("X"), s.matrix("Z")
    total = 0
    for checks, same in ((hz, hx), (hx, hz)):
        kernel_dim = _free_in_region(checks, cols)
        stab_dim = gf2.rowspace_restricted_to(same, mask).n_rows
        total += kernel_dim - stab_dim
    return total


def defect_center(geom: LatticeGeometry, axis: int) -> Optional[Fraction]:
    """Mean position of the defects along ``axis``.

    Edge dislocations count their inserted plane along the normal and the
    middle of their strip along the height; screws count their transverse
    position. Returns None when no defect is localized along ``axis``.
    """
    points: List[Fraction] = []
    for d in geom.defects:
        if isinstance(d, Vacancy):
            if d.size[axis] < geom.dims[axis]:
                points.append(d.origin[axis] + Fraction(d.size[axis] - 1, 2))
        elif isinstance(d, EdgeDislocation):
            if axis == d.normal_axis:
                points.append(Fraction(d.at))
            elif axis == d.height_axis:
                points.append(d.start + Fraction(d.height - 1, 2))
        elif isinstance(d, Screw) and axis != d.line_axis:
            points.append(Fraction(d.position[0] if axis == d.t1 else d.position[1]))
    if not points:
        return None
    return sum(points, Fraction(0)) / len(points)


def min_support_width(s: StabilizerSet, axis: int, center: Optional[float] = None) -> Optional[int]:
    """Narrowest slab along ``axis`` holding at least one logical representative.

    Slabs of width ``w`` are centred on ``center`` (default the lattice
    middle) and grown one layer at a time. Pass ``defect_center`` for
    defect pairs so the slab sits between them.

    Returns:
        The width, or None when no slab works (in particular when k = 0)
    """
    geom = s.geometry
    length = geom.dims[axis]
    if center is None:
        center = Fraction(length - 1, 2)
    if num_logical_qubits(s) == 0:
        return None
    for w in range(1, length + 1):
        lo = math.ceil(Fraction(center) - Fraction(w - 1, 2))
        region = geom.slab_qubits(axis, lo, lo + w)
        if count_logicals_in_region(s, region) >= 1:
            return w
    return None


def _region_kernel(checks: gf2.BitMatrix, cols: Sequence[int], n: int) -> gf2.BitMatrix:
    """Words supported on ``cols`` that commute with every check, in full width."""
    local = gf2.kernel_basis(checks.select_columns(cols)).to_dense()
    full = np.zeros((local.shape[0], n), dtype=np.uint8)
    if local.shape[0]:
        full[:, list(cols)] = local
    return gf2.BitMatrix.from_dense(full, n_cols=n)


def gauge_out(s: StabilizerSet, gauge_regions: Sequence[Iterable[int]]) -> int:
    """Logical qubits left after promoting region-supported logicals to gauge operators.

    The gauge group is the stabilizers plus every logical representative
    living inside one of ``gauge_regions``. For a CSS gauge group with X
    part ``G_X``, Z part ``G_Z`` and cross-commutation matrix ``M``,
    ``k_sub = n - rank G_X - rank G_Z + rank M``.
    """
    _require_commuting(s)
    n = s.n_qubits
    hx, hz = s.matrix("X"), s.matrix("Z")
    gx_parts, gz_parts = [hx], [hz]
    for region in gauge_regions:
        cols = np.flatnonzero(_region_mask(n, region)).tolist()
        if not cols:
            continue
        gx_parts.append(_region_kernel(hz, cols, n))
        gz_parts.append(_region_kernel(hx, cols, n))
    bx = gf2.row_basis(gf2.BitMatrix.stack(gx_parts, n))
    bz = gf2.row_basis(gf2.BitMatrix.stack(gz_parts, n))
    cross = gf2.parity_products(bz, bx)
    return n - bx.n_rows - bz.n_rows + gf2.rank(cross)


def brute_force_distance(s: StabilizerSet, max_qubits: int = BRUTE_FORCE_MAX_QUBITS) -> int:
    """Exact minimum weight of a logical operator by exhaustive search.

    Raises:
        PreconditionError: if k = 0 or the code has more than ``max_qubits`` qubits
    """
    n = s.n_qubits
    if n > max_qubits:
        raise PreconditionError(f"brute force is limited to {max_qubits} qubits (got {n})")
    if num_logical_qubits(s) == 0:
        raise PreconditionError("code encodes no logical qubits")
    hx = s.matrix("X").to_dense().astype(np.int64)
    hz = s.matrix("Z").to_dense().astype(np.int64)
    stab_x, stab_z = s.matrix("X"), s.matrix("Z")
    for weight in range(1, n + 1):
        for qubits in itertools.combinations(range(n), weight):
            for letters in itertools.product("XYZ", repeat=weight):
                x = np.zeros(n, dtype=np.uint8)
                z = np.zeros(n, dtype=np.uint8)
                for q, p in zip(qubits, letters):
                    x[q] = p in "XY"
                    z[q] = p in "ZY"
                if ((hx @ z) & 1).any() or ((hz @ x) & 1).any():
                    continue
                if gf2.in_rowspace(stab_x, x) and gf2.in_rowspace(stab_z, z):
                    continue
                return weight
    raise PreconditionError("no logical operator found")
