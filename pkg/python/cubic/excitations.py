"""Excitations and the operators that move them.

Single-qubit patterns, in cell anchors relative to the site ``p``:

    ZI  flips X cells  p - {0, (1,1,0), (0,1,1), (1,0,1)}
    IZ  flips X cells  p - {0, x, y, z}
    XI  flips Z cells  p - {(1,1,1), (0,1,1), (1,0,1), (1,1,0)}
    IX  flips Z cells  p - {(1,1,1), (0,0,1), (1,0,0), (0,1,0)}

A flipped X generator is an ``e`` excitation, a flipped Z generator an ``m``.
The m-world is the point inversion of the e-world with slots exchanged, which
is how the m variants of F and of the cascade are derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import gf2
from .errors import ClippedSupportError, DimensionError, PreconditionError
from .lattice import (
    Coord,
    EdgeDislocation,
    LatticeGeometry,
    StabilizerSet,
    abc_flavor,
    build_geometry,
    build_stabilizers,
    charge_color,
    layer_chart,
    parse_face,
    translate_operator,
    word_from_sites,
)
from .pauli import PauliWord, product

PLANES = ("xy", "xz", "yz")
# plane -> (in-plane axis a, cascade axis b)
CASCADE_AXES: Dict[str, Tuple[int, int]] = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}
VARIANTS = tuple(f"{species}:{plane}" for species in "em" for plane in PLANES)


@dataclass(frozen=True)
class Excitation:
    """A flipped generator."""

    generator_id: int
    kind: str
    anchor: Coord
    tag: str = ""

    def __str__(self) -> str:
        x, y, z = self.anchor
        return f"{self.kind} ({x},{y},{z}) {self.tag}"


@dataclass(frozen=True)
class EnergyProfile:
    """Excitation count after each single-qubit step."""

    energies: Tuple[int, ...]
    peak: int
    final: int


def _unit(axis: int, scale: int = 1) -> Coord:
    e = [0, 0, 0]
    e[axis] = scale
    return tuple(e)


def _add(p: Sequence[int], d: Sequence[int]) -> Coord:
    return (p[0] + d[0], p[1] + d[1], p[2] + d[2])


def _sub(p: Sequence[int], d: Sequence[int]) -> Coord:
    return (p[0] - d[0], p[1] - d[1], p[2] - d[2])


def _flipped_by(s: StabilizerSet, q: int, letter: str) -> List[int]:
    """Generators anticommuting with a single-qubit ``letter`` on ``q``."""
    out = []
    if letter in ("Z", "Y"):
        out.extend(s.generators_on["X"].get(q, ()))
    if letter in ("X", "Y"):
        out.extend(s.generators_on["Z"].get(q, ()))
    return out


def _excitations(s: StabilizerSet, ids: Iterable[int]) -> List[Excitation]:
    out = []
    for i in sorted(ids):
        g = s.generators[i]
        out.append(Excitation(i, "e" if g.pauli == "X" else "m", g.anchor, g.kind))
    return out


def _flip_set(s: StabilizerSet, op: PauliWord) -> Set[int]:
    flipped: Set[int] = set()
    for q, letter in op.letters().items():
        flipped.symmetric_difference_update(_flipped_by(s, q, letter))
    return flipped


def syndrome(s: StabilizerSet, op: PauliWord) -> List[Excitation]:
    """Generators anticommuting with ``op``, sorted by generator index.

    Raises:
        DimensionError: if ``op`` is not on the set's qubits
    """
    if op.n_qubits != s.n_qubits:
        raise DimensionError(f"operator has {op.n_qubits} qubits, stabilizer set {s.n_qubits}")
    return _excitations(s, _flip_set(s, op))


def _profile(s: StabilizerSet, steps: Iterable[Tuple[int, str]]) -> EnergyProfile:
    flipped: Set[int] = set()
    energies = []
    for q, letter in steps:
        flipped.symmetric_difference_update(_flipped_by(s, q, letter))
        energies.append(len(flipped))
    return EnergyProfile(tuple(energies), max(energies, default=0), len(flipped))


def energy_profile(s: StabilizerSet, op: PauliWord, order: Sequence[int]) -> EnergyProfile:
    """Energies after applying the factors of ``op`` one qubit at a time.

    Args:
        s: Stabilizer set
        op: Operator being built up
        order: Permutation of ``op``'s support

    Raises:
        PreconditionError: if ``order`` is not a permutation of the support
    """
    if op.n_qubits != s.n_qubits:
        raise DimensionError(f"operator has {op.n_qubits} qubits, stabilizer set {s.n_qubits}")
    letters = op.letters()
    if len(order) != len(letters) or set(order) != set(letters):
        raise PreconditionError("order must be a permutation of the operator's support")
    return _profile(s, ((q, letters[q]) for q in order))


# ---------------------------------------------------------------------------
# F, G and the cascade
# ---------------------------------------------------------------------------


def parse_variant(variant: str) -> Tuple[str, str]:
    """``"e:xy"`` -> ("e", "xy")."""
    species, _, plane = variant.partition(":")
    plane = "".join(sorted(plane))
    if species not in ("e", "m") or plane not in CASCADE_AXES:
        raise PreconditionError(f"unknown F variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    return species, plane


def _f_entries(species: str, plane: str, anchor: Sequence[int]) -> List[Tuple[Coord, int, str]]:
    a, b = CASCADE_AXES[plane]
    p = tuple(anchor)
    if species == "e":
        return [(p, 1, "Z"), (_sub(p, _unit(a)), 2, "Z"), (_sub(p, _unit(b)), 2, "Z")]
    return [(p, 2, "X"), (_add(p, _unit(a)), 1, "X"), (_add(p, _unit(b)), 1, "X")]


def build_F(geom: LatticeGeometry, species: str, plane: str, anchor: Sequence[int]) -> PauliWord:
    """The three-qubit F word of one species in one plane.

    ``F_e^{ab}`` is ZI at ``p`` with IZ at ``p - a`` and ``p - b``;
    ``F_m^{ab}`` is IX at ``p`` with XI at ``p + a`` and ``p + b``.

    Raises:
        ClippedSupportError: if a factor falls outside the lattice
    """
    species, plane = parse_variant(f"{species}:{plane}")
    return word_from_sites(geom, _f_entries(species, plane, anchor))


def _g_entries(species: str, anchor: Sequence[int], axis: int = 2) -> List[Tuple[Coord, int, str]]:
    p = tuple(anchor)
    if species == "e":
        return [(p, 1, "Z"), (_sub(p, _unit(axis)), 2, "Z")]
    return [(p, 2, "X"), (_add(p, _unit(axis)), 1, "X")]


def build_G(geom: LatticeGeometry, anchor: Sequence[int], axis: int = 2) -> PauliWord:
    """ZI at ``p`` and IZ at ``p - z``: two e on one diagonal of the top layer, one below each of the next two layers.

    ``axis`` picks the column direction; the default is z.
    """
    return word_from_sites(geom, _g_entries("e", anchor, axis))


@dataclass(frozen=True)
class CascadeResult:
    word: PauliWord
    weight: int
    profile: EnergyProfile
    applications: int


_PERIODIC = "ppp;ppp"


def cascade_geometry(variant: str, delta_max: int) -> Tuple[LatticeGeometry, StabilizerSet]:
    """Periodic host lattice wide enough for every cascade up to ``delta_max`` without wrapping.

    The fan of a depth-Δ cascade spans at most Δ+3 cells along both
    in-plane axes and two layers across; offsets from the anchor are read
    modulo the axis length, so each in-plane axis gets 2Δ+8 cells.
    """
    if delta_max < 0:
        raise PreconditionError(f"cascade depth must be non-negative (got {delta_max})")
    _, plane = parse_variant(variant)
    a, b = CASCADE_AXES[plane]
    dims = [3, 3, 3]
    dims[a] = dims[b] = 2 * delta_max + 8
    geom = build_geometry(tuple(dims), _PERIODIC)
    return geom, build_stabilizers(geom, complete=False)


def default_cascade_anchor(geom: LatticeGeometry, variant: str) -> Coord:
    """Anchor leaving room for the fan: it grows towards -a and +b for e, mirrored for m."""
    species, plane = parse_variant(variant)
    a, b = CASCADE_AXES[plane]
    c = 3 - a - b
    p = [0, 0, 0]
    if species == "e":
        p[a], p[b] = geom.dims[a] - 2, 2
    else:
        p[a], p[b] = 1, geom.dims[b] - 2
    p[c] = geom.dims[c] // 2
    return tuple(p)


def cascade(
    geom: LatticeGeometry,
    s: StabilizerSet,
    variant: str,
    anchor: Sequence[int],
    delta: int,
) -> CascadeResult:
    """Push an F word's tip charge ``delta`` rows along the cascade axis.

    Rows are processed one at a time away from the seed; every charge
    currently in the row gets an F placed two rows ahead of it, charges
    taken in increasing in-plane order (decreasing for m). The energy
    profile follows this constructive order factor by factor, so a qubit
    touched twice shows up twice.

    Raises:
        PreconditionError: if ``delta`` is negative
        ClippedSupportError: if an F word leaves the lattice
    """
    if delta < 0:
        raise PreconditionError(f"cascade depth must be non-negative (got {delta})")
    species, plane = parse_variant(variant)
    a, b = CASCADE_AXES[plane]
    anchor = geom.wrap(anchor)
    n = s.n_qubits
    x = np.zeros(n, dtype=np.uint8)
    z = np.zeros(n, dtype=np.uint8)
    steps: List[Tuple[int, str]] = []
    flipped: Set[int] = set()
    applications = 0

    def apply(p: Coord):
        nonlocal applications
        for q, letter in word_from_sites(geom, _f_entries(species, plane, p)).letters().items():
            part = x if letter == "X" else z
            part[q] ^= 1
            steps.append((q, letter))
            flipped.symmetric_difference_update(_flipped_by(s, q, letter))
        applications += 1

    def offset(c: Coord, axis: int) -> int:
        d = c[axis] - anchor[axis]
        if geom.periodic[axis]:
            half = geom.dims[axis] // 2
            d = (d + half) % geom.dims[axis] - half
        return d

    apply(anchor)
    if species == "e":
        rows = range(-1, delta - 1)
        shift = _unit(b, 2)
    else:
        rows = range(0, -delta, -1)
        shift = _sub((1, 1, 1), _unit(b, 2))
    for r in rows:
        in_row = [s.generators[i].anchor for i in flipped if offset(s.generators[i].anchor, b) == r]
        in_row.sort(key=lambda c: offset(c, a), reverse=species == "m")
        for c in in_row:
            apply(geom.wrap(_add(c, shift)))

    word = PauliWord(x, z)
    return CascadeResult(word, word.weight(), _profile(s, steps), applications)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


# ---------------------------------------------------------------------------
# Fractal doubling and the layer-cleaning words
# ---------------------------------------------------------------------------


def fractal_double(s: StabilizerSet, op: PauliWord, anchor: Optional[Sequence[int]] = None) -> PauliWord:
    """Product of ``op`` translated by ``e - anchor`` for each of its excitations ``e``.

    On a translation-invariant lattice the result's excitations sit at
    ``anchor + 2 (e - anchor)``.

    Args:
        s: Stabilizer set of a lattice where the translations are defined
        op: Pure X or pure Z word
        anchor: Scaling centre; defaults to the first excitation

    Raises:
        PreconditionError: if ``op`` is mixed or has fewer than two excitations
        ClippedSupportError: if a translate leaves the lattice
    """
    if not (op.is_x_type or op.is_z_type):
        raise PreconditionError("fractal doubling needs a pure X or pure Z word")
    excitations = syndrome(s, op)
    if len(excitations) < 2:
        raise PreconditionError(f"fractal doubling needs at least two excitations (got {len(excitations)})")
    if anchor is None:
        anchor = excitations[0].anchor
    geom = s.geometry
    return product((translate_operator(geom, op, _sub(e.anchor, anchor)) for e in excitations), s.n_qubits)


def scaled_pattern(geom: LatticeGeometry, anchors: Iterable[Sequence[int]], center: Sequence[int]) -> Set[Coord]:
    """``center + 2 (p - center)`` for every anchor, cancelling coincident points in pairs."""
    out: Set[Coord] = set()
    for p in anchors:
        out ^= {geom.wrap(_sub(_add(p, p), center))}
    return out


def _check_doubling_index(j: int) -> int:
    if j < 3 or j % 3 or (j // 3) & (j // 3 - 1):
        raise PreconditionError(f"j must be 3 * 2**z (got {j})")
    return int(math.log2(j // 3))


def build_O(s: StabilizerSet, j: int, anchor: Optional[Sequence[int]] = None) -> PauliWord:
    """Layer-cleaning word ``O_j`` on a lattice periodic in x and y.

    Three G words on consecutive diagonal sites form a seed whose top-layer
    charges sit ``j`` apart after ``log2(j/3)`` doublings about the seed's
    anchor; translating the seed by multiples of ``j (1,1,0)`` around the
    diagonal cancels the top layer.

    Raises:
        PreconditionError: on a bad ``j``, non-periodic x/y, unequal x/y sizes or ``j`` not dividing L
    """
    geom = s.geometry
    doublings = _check_doubling_index(j)
    if not (geom.periodic[0] and geom.periodic[1]):
        raise PreconditionError("O_j wraps the x and y axes, which must be periodic")
    L = geom.dims[0]
    if geom.dims[1] != L:
        raise PreconditionError(f"O_j needs Lx == Ly (got {geom.dims[0]}, {geom.dims[1]})")
    if L % 3:
        raise PreconditionError(f"O_j needs 3 | L (got L={L})")
    if L % j:
        raise PreconditionError(f"O_{j} needs {j} | L (got L={L})")
    if anchor is None:
        anchor = (0, 0, geom.dims[2] - 1)
    p = tuple(anchor)
    n = s.n_qubits
    seed = product((build_G(geom, _add(p, (t, t, 0))) for t in range(3)), n)
    for _ in range(doublings):
        seed = fractal_double(s, seed, p)
    return product((translate_operator(geom, seed, (i * j, i * j, 0)) for i in range(L // j)), n)


def cleaned_depth(s: StabilizerSet, op: PauliWord, top: int) -> Optional[int]:
    """Depth below layer ``top`` of the shallowest excitation of ``op``, None if it has none."""
    L = s.geometry.dims[2]
    depths = [(top - e.anchor[2]) % L for e in syndrome(s, op)]
    return min(depths, default=None)


def measure_zmax(L: int) -> int:
    """Deepest first-excited layer over every valid ``O_j`` on a periodic L×L×L lattice.

    Raises:
        PreconditionError: if 3 does not divide L
    """
    if L % 3:
        raise PreconditionError(f"z_max is measured for 3 | L (got L={L})")
    geom = build_geometry((L, L, L), _PERIODIC)
    s = build_stabilizers(geom, complete=False)
    top = L - 1
    best = 0
    j = 3
    while L % j == 0:
        depth = cleaned_depth(s, build_O(s, j, (0, 0, top)), top)
        if depth is not None:
            best = max(best, depth)
        j *= 2
    return best


# ---------------------------------------------------------------------------
# Cages, boundary hops and the colour-code map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CageExtents:
    """Inner rectangle ``[lo, hi)`` in the plane, shell ``thickness`` and normal range ``[normal_lo, normal_hi)``."""

    lo: Tuple[int, int]
    hi: Tuple[int, int]
    normal: Tuple[int, int]
    thickness: int = 1

    @classmethod
    def cylinder(cls, lo: Tuple[int, int], hi: Tuple[int, int], normal_center: int, thickness: int = 1) -> "CageExtents":
        """Shell whose height grows with its radius: ``2r + 1`` layers centred on ``normal_center``."""
        radius = max(hi[0] - lo[0], hi[1] - lo[1]) // 2 + thickness
        return cls(tuple(lo), tuple(hi), (normal_center - radius, normal_center + radius + 1), thickness)


# A Z cell at anchor 0 is the product of G at these offsets and F at these,
# in the cage frame (a, b, normal) with F spanning (b, normal).
_CELL_G_OFFSETS: Tuple[Coord, ...] = ((1, 1, 1), (1, 0, 1), (1, 1, 0), (1, 2, 1), (1, 2, 0), (1, 2, -1))
_CELL_F_OFFSETS: Tuple[Coord, ...] = ((1, 2, 1), (0, 1, 1), (1, 2, 0), (1, 2, -1))

# loop order, starting on the low-b side
CAGE_SEGMENTS = ("south", "south-east", "east", "north-east", "north", "north-west", "west", "south-west")


def _plane_axes(plane: str) -> Tuple[int, int, int]:
    plane = "".join(sorted(plane))
    if plane not in CASCADE_AXES:
        raise PreconditionError(f"plane must be one of {', '.join(PLANES)} (got {plane!r})")
    a, b = CASCADE_AXES[plane]
    return a, b, 3 - a - b


def _cage_frame(geom: LatticeGeometry, species: str, plane: str, ext: CageExtents) -> Tuple[Tuple[int, int, int], List[Tuple[int, int]]]:
    """Cell ranges of the cage in the e frame ``(a, b, normal)``.

    The m cage is built as the e cage of the inverted region.
    """
    if species not in ("e", "m"):
        raise PreconditionError(f"species must be 'e' or 'm' (got {species!r})")
    axes = _plane_axes(plane)
    c = axes[2]
    w = ext.thickness
    ranges = [(ext.lo[0] - w, ext.hi[0] + w - 1), (ext.lo[1] - w, ext.hi[1] + w - 1)]
    n0, n1 = ext.normal
    if geom.periodic[c] and n1 - n0 >= geom.dims[c]:
        # wraps around: the column products close on themselves, no caps
        ranges.append((n0, n0 + geom.dims[c]))
    else:
        ranges.append((n0, n1 - 1))
    if any(lo >= hi for lo, hi in ranges):
        raise PreconditionError(f"cage extents enclose no cells: {ext}")
    if species == "m":
        ranges = [(-hi, -lo) for lo, hi in ranges]
    return axes, ranges


def _to_lattice(axes: Tuple[int, int, int], frame: Sequence[int], species: str) -> Coord:
    p = [0, 0, 0]
    for axis, t in zip(axes, frame):
        p[axis] = -t if species == "m" else t
    return tuple(p)


def _fold(geom: LatticeGeometry, p: Coord) -> Coord:
    """Move a site of a removed strip onto its glued partner one step along the normal."""
    for d in geom.defects:
        if isinstance(d, EdgeDislocation) and p[d.normal_axis] == d.at and 0 <= p[d.height_axis] - d.start < d.height:
            return geom.wrap(_add(p, _unit(d.normal_axis)))
    return p


def _octant(du: float, dv: float) -> str:
    names = ("east", "north-east", "north", "north-west", "west", "south-west", "south", "south-east")
    return names[round(math.atan2(dv, du) / (math.pi / 4)) % 8]


@dataclass(frozen=True)
class CageSegment:
    """F and G words along one stretch of the loop.

    ``placements`` holds ``(kind, anchor)`` pairs in lattice coordinates with
    kind ``"F"`` (in the plane spanned by the second cage axis and the normal)
    or ``"G"`` (a column along the normal).
    """

    name: str
    species: str
    f_plane: str
    normal_axis: int
    placements: Tuple[Tuple[str, Coord], ...]

    def entries(self) -> List[Tuple[Coord, int, str]]:
        out = []
        for kind, anchor in self.placements:
            if kind == "F":
                out.extend(_f_entries(self.species, self.f_plane, anchor))
            else:
                out.extend(_g_entries(self.species, anchor, self.normal_axis))
        return out

    def word(self, geom: LatticeGeometry) -> PauliWord:
        return word_from_sites(geom, [(_fold(geom, geom.wrap(p)), slot, letter) for p, slot, letter in self.entries()])


def cage_segments(geom: LatticeGeometry, species: str, plane: str, extents: CageExtents) -> List[CageSegment]:
    """The cage as eight F/G loop segments, ordered south, south-east, ..., south-west.

    A cell word of the species is a fixed product of G and F words, so the
    product of every cell in the enclosed region cancels to the placements
    on its rim. Those are grouped by their direction from the centre of the
    inner rectangle. With a wrapping normal the column products close and the
    shell has no caps; otherwise the top and bottom layers keep theirs.
    Sites on a removed dislocation strip are carried across to the glued
    side, so a loop can pass over an edge dislocation.
    """
    axes, ranges = _cage_frame(geom, species, plane, extents)
    a, b, c = axes
    parity: Dict[Tuple[str, int, int, int], int] = {}
    for u in range(*ranges[0]):
        for v in range(*ranges[1]):
            for h in range(*ranges[2]):
                for kind, offsets in (("G", _CELL_G_OFFSETS), ("F", _CELL_F_OFFSETS)):
                    for du, dv, dh in offsets:
                        nh = h + dh
                        if geom.periodic[c]:
                            nh %= geom.dims[c]
                        key = (kind, u + du, v + dv, nh)
                        parity[key] = parity.get(key, 0) ^ 1
    center = ((extents.lo[0] + extents.hi[0] - 1) / 2, (extents.lo[1] + extents.hi[1] - 1) / 2)
    grouped: Dict[str, List[Tuple[str, Coord]]] = {name: [] for name in CAGE_SEGMENTS}
    for (kind, u, v, h), on in sorted(parity.items()):
        if not on:
            continue
        anchor = _to_lattice(axes, (u, v, h), species)
        grouped[_octant(anchor[a] - center[0], anchor[b] - center[1])].append((kind, anchor))
    f_plane = "".join(sorted("xyz"[b] + "xyz"[c]))
    return [CageSegment(name, species, f_plane, c, tuple(grouped[name])) for name in CAGE_SEGMENTS]


def cage_qubits(geom: LatticeGeometry, species: str, plane: str, extents: CageExtents) -> List[int]:
    """Qubits of the box the cage word can occupy.

    Raises:
        ClippedSupportError: if the box leaves the lattice
    """
    axes, ranges = _cage_frame(geom, species, plane, extents)
    c = axes[2]
    (u0, u1), (v0, v1), (h0, h1) = ranges
    box = [range(u0, u1 + 1), range(v0, v1 + 2)]
    if geom.periodic[c] and h1 - h0 >= geom.dims[c]:
        box.append(range(geom.dims[c]))
    else:
        box.append(range(h0 - 2, h1 + 1))
    out: Set[int] = set()
    clipped = []
    for u in box[0]:
        for v in box[1]:
            for h in box[2]:
                p = geom.wrap(_to_lattice(axes, (u, v, h), species))
                if any(not geom.periodic[i] and not 0 <= p[i] < geom.dims[i] for i in range(3)):
                    clipped.append(p)
                    continue
                r = geom.resolve(p)
                if r.site is not None:
                    out.update((2 * r.site, 2 * r.site + 1))
    if clipped:
        raise ClippedSupportError(f"cage shell leaves the lattice at {len(clipped)} sites", clipped)
    return sorted(out)


def build_cage(geom: LatticeGeometry, s: StabilizerSet, species: str, plane: str, extents: CageExtents) -> PauliWord:
    """Closed word of ``species`` on the shell around ``extents``.

    The product of the eight :func:`cage_segments`. Around an enclosed
    defect it can be a logical; around nothing it is a stabilizer.

    Raises:
        ClippedSupportError: if the shell leaves the lattice
        PreconditionError: for an unknown species or plane, empty extents,
            or a loop left open by a twist inside it
    """
    cage_qubits(geom, species, plane, extents)
    segments = cage_segments(geom, species, plane, extents)
    word = word_from_sites(geom, [(_fold(geom, geom.wrap(p)), slot, letter) for seg in segments for p, slot, letter in seg.entries()])
    open_ends = syndrome(s, word)
    if open_ends:
        raise PreconditionError(f"cage does not close: {len(open_ends)} excitations, first at {open_ends[0].anchor}")
    return word


def cage_cross_check(s: StabilizerSet, word: PauliWord, species: str, plane: str, extents: CageExtents) -> bool:
    """True iff ``word`` is in the span of the closed words a kernel search finds on the cage box."""
    cols = cage_qubits(s.geometry, species, plane, extents)
    bits = word.z if species == "e" else word.x
    if set(np.flatnonzero(word.x | word.z).tolist()) - set(cols):
        return False
    checks = s.matrix("X" if species == "e" else "Z").select_columns(cols)
    local = gf2.kernel_basis(checks)
    if len(local) == 0:
        return False
    return gf2.in_rowspace(local, bits[cols])


def surface_qubits(geom: LatticeGeometry, face: str, layers: int = 2) -> List[int]:
    """Qubits on the ``layers`` site layers next to ``face``."""
    axis, sign = parse_face(face)
    L = geom.dims[axis]
    lo, hi = (L - layers, L) if sign > 0 else (0, layers)
    return geom.slab_qubits(axis, lo, hi)


def _generator_at(s: StabilizerSet, pauli: str, anchor: Sequence[int]) -> int:
    target = s.geometry.wrap(anchor)
    hits = [i for i, g in enumerate(s.generators) if g.pauli == pauli and g.anchor == target]
    if not hits:
        raise PreconditionError(f"no {pauli} generator anchored at {tuple(anchor)}")
    return hits[0]


def excitation_color(geom: LatticeGeometry, face: str, excitation: Excitation) -> str:
    """A/B/C subtype of an excitation on an ABC face."""
    return charge_color(geom, face, layer_chart(face, excitation.anchor))


def boundary_hop(
    geom: LatticeGeometry,
    s: StabilizerSet,
    face: str,
    color: str,
    start: Sequence[int],
    end: Sequence[int],
) -> PauliWord:
    """Word on the two surface layers with exactly one excitation at ``start`` and one at ``end``.

    Args:
        geom: Geometry of ``s``
        s: Stabilizer set
        face: ABC face such as ``"+z"``
        color: Subtype of the charge at ``start``
        start: Cell anchor of the first charge
        end: Cell anchor of the second charge

    Raises:
        PreconditionError: on condensing faces, a colour mismatch or when no such word exists
    """
    flavor = abc_flavor(geom.boundary, face)
    if charge_color(geom, face, layer_chart(face, start)) != color:
        raise PreconditionError(f"charge at {tuple(start)} is not of colour {color}")
    flipped, letter = ("X", "Z") if flavor == "e" else ("Z", "X")
    region = surface_qubits(geom, face)
    gens = sorted({i for q in region for i in s.generators_on[flipped].get(q, ())})
    col = {i: c for c, i in enumerate(gens)}
    targets = [_generator_at(s, flipped, start), _generator_at(s, flipped, end)]
    rhs = np.zeros(len(gens), dtype=np.uint8)
    for t in targets:
        if t not in col:
            raise PreconditionError(f"generator at {s.generators[t].anchor} is not reachable from the surface")
        rhs[col[t]] ^= 1
    rows = [[col[i] for i in s.generators_on[flipped].get(q, ())] for q in region]
    m = gf2.BitMatrix.from_supports(rows, len(gens))
    coeffs = gf2.solve(m, rhs)
    if coeffs is None:
        raise PreconditionError(f"no surface word moves a charge from {tuple(start)} to {tuple(end)}")
    qubits = [region[r] for r in np.flatnonzero(coeffs)]
    if letter == "X":
        return PauliWord.from_qubits(s.n_qubits, x_qubits=qubits)
    return PauliWord.from_qubits(s.n_qubits, z_qubits=qubits)


def boundary_string(geom: LatticeGeometry, face: str, start: Sequence[int], length: int) -> PauliWord:
    """Diagonal string of surface factors ``start + t (1,1,0)``, ``t < length``, on a +z or -z ABC face.

    IX on an m face and ZI on an e face, i.e. the single-step hop of that
    face's ABC charge. Periodic axes wrap.
    """
    axis, sign = parse_face(face)
    flavor = abc_flavor(geom.boundary, face)
    if axis != 2:
        raise PreconditionError("boundary strings run along the (1,1,0) diagonal of a z face")
    layer = geom.dims[2] - 1 if sign > 0 else 0
    slot, letter = (2, "X") if flavor == "m" else (1, "Z")
    entries = [((start[0] + t, start[1] + t, layer), slot, letter) for t in range(length)]
    return word_from_sites(geom, entries)


def _pair_map_site(x1: int, x2: int, z1: int, z2: int) -> Tuple[int, int, int, int]:
    # CNOT controlled on slot 2: XI->XI, IX->XX, ZI->ZZ, IZ->IZ
    return x1 ^ x2, x2, z1, z2 ^ z1


def pair_map_to_color_code(geom: LatticeGeometry, face: str, ops: Sequence[PauliWord]) -> List[PauliWord]:
    """Apply the per-site two-qubit Clifford that turns surface terms into colour-code terms.

    Raises:
        PreconditionError: if an operator leaves the two layers next to ``face``
    """
    region = set(surface_qubits(geom, face))
    out = []
    for op in ops:
        if op.n_qubits != geom.n_qubits:
            raise DimensionError(f"operator has {op.n_qubits} qubits, lattice {geom.n_qubits}")
        outside = op.support() - region
        if outside:
            raise PreconditionError(f"operator acts on {len(outside)} qubits outside the two layers next to {face}")
        x = op.x.copy()
        z = op.z.copy()
        for site in {q // 2 for q in op.support()}:
            q1, q2 = 2 * site, 2 * site + 1
            x[q1], x[q2], z[q1], z[q2] = _pair_map_site(x[q1], x[q2], z[q1], z[q2])
        out.append(PauliWord(x, z))
    return out
