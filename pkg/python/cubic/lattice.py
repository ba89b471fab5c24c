"""Lattice geometry and stabilizer construction for the cubic code.

Every site carries two qubits: slot 1 has index ``2*site`` and slot 2 has
index ``2*site + 1``. A cube cell is addressed by its lowest corner (its
anchor); on an open axis anchors run from -1 to L-1 so that cells poking
out of the faces yield the truncated boundary terms.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from . import gf2
from .errors import BuildError, ClippedSupportError, CommutationError, ConfigError, PreconditionError
from .pauli import PauliWord

Coord = Tuple[int, int, int]

AXES = "xyz"
FACE_LETTERS = "pem"
CORNERS: Tuple[Coord, ...] = tuple(itertools.product((0, 1), repeat=3))

# corner -> (slot 1, slot 2) occupation
CX_TEMPLATE: Dict[Coord, Tuple[int, int]] = {
    (0, 0, 0): (1, 1),
    (1, 0, 0): (0, 1),
    (0, 1, 0): (0, 1),
    (0, 0, 1): (0, 1),
    (1, 1, 0): (1, 0),
    (0, 1, 1): (1, 0),
    (1, 0, 1): (1, 0),
}
CZ_TEMPLATE: Dict[Coord, Tuple[int, int]] = {
    (1, 1, 1): (1, 1),
    (0, 0, 1): (0, 1),
    (1, 0, 0): (0, 1),
    (0, 1, 0): (0, 1),
    (0, 1, 1): (1, 0),
    (1, 0, 1): (1, 0),
    (1, 1, 0): (1, 0),
}

GENERATOR_KINDS = ("bulk", "plaquette", "edge", "vertex", "twist", "line", "slanted")


def _add(p: Sequence[int], d: Sequence[int]) -> Coord:
    return (p[0] + d[0], p[1] + d[1], p[2] + d[2])


# ---------------------------------------------------------------------------
# Boundary and defect specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundarySpec:
    """Face labels ``(x, y, z; x̄, ȳ, z̄)`` with letters p (periodic), e, m."""

    positive: Tuple[str, str, str]
    negative: Tuple[str, str, str]

    @classmethod
    def parse(cls, text: str) -> "BoundarySpec":
        """Parse the ``abc;def`` notation.

        Raises:
            ConfigError: on malformed strings or unpaired periodic faces
        """
        if not isinstance(text, str):
            raise ConfigError(f"faces must be a string, got {type(text).__name__}")
        parts = text.strip().strip("()").lower().split(";")
        if len(parts) != 2 or any(len(p) != 3 for p in parts):
            raise ConfigError(f"faces string {text!r} is not of the form 'abc;def'")
        bad = sorted({c for c in "".join(parts) if c not in FACE_LETTERS})
        if bad:
            raise ConfigError(f"faces string {text!r} has unknown letters {bad}; expected p, e or m")
        spec = cls(tuple(parts[0]), tuple(parts[1]))
        for i in range(3):
            if (spec.positive[i] == "p") != (spec.negative[i] == "p"):
                raise ConfigError(f"faces string {text!r}: axis {AXES[i]} is periodic on one side only")
        return spec

    def __str__(self) -> str:
        return "".join(self.positive) + ";" + "".join(self.negative)

    def is_periodic(self, axis: int) -> bool:
        return self.positive[axis] == "p"

    def face(self, axis: int, sign: int) -> str:
        return self.positive[axis] if sign > 0 else self.negative[axis]

    def rotated(self) -> "BoundarySpec":
        """``(abc;def) -> (cab;fde)``."""
        p, n = self.positive, self.negative
        return BoundarySpec((p[2], p[0], p[1]), (n[2], n[0], n[1]))

    def transposed(self) -> "BoundarySpec":
        """``(abc;def) -> (bac;edf)``."""
        p, n = self.positive, self.negative
        return BoundarySpec((p[1], p[0], p[2]), (n[1], n[0], n[2]))

    def dual(self) -> "BoundarySpec":
        """``(abc;def) -> (def;abc)`` with e and m exchanged."""
        swap = {"e": "m", "m": "e", "p": "p"}
        return BoundarySpec(tuple(swap[c] for c in self.negative), tuple(swap[c] for c in self.positive))


@dataclass(frozen=True)
class Vacancy:
    """Box of removed sites whose surface condenses ``flavor`` charges."""

    flavor: str
    origin: Coord
    size: Coord


@dataclass(frozen=True)
class EdgeDislocation:
    """Half-plane of sites removed at ``normal = at`` for ``start <= height coord < start + height``.

    The height axis is the one that is neither the line axis nor the normal.
    ``flavors`` gives the twist type on the (negative, positive) end of the
    removed strip: ``m`` installs T_X words, ``e`` installs T_Z words.
    """

    line_axis: int
    normal_axis: int
    position: Tuple[int, int]
    height: int
    flavors: str = "mm"

    @property
    def height_axis(self) -> int:
        return 3 - self.line_axis - self.normal_axis

    @property
    def at(self) -> int:
        return self.position[0]

    @property
    def start(self) -> int:
        return self.position[1]


@dataclass(frozen=True)
class Screw:
    """Screw dislocation along ``line_axis`` through transverse ``position``.

    The cut is the half-plane ``t2 = position[1]`` with ``t1 > position[0]``,
    where ``(t1, t2)`` are the two axes following the line axis cyclically.
    Cells straddling the cut reach sites shifted by +1 (R) or -1 (L) along
    the line.
    """

    line_axis: int
    position: Tuple[int, int]
    handedness: str = "R"

    @property
    def t1(self) -> int:
        return (self.line_axis + 1) % 3

    @property
    def t2(self) -> int:
        return (self.line_axis + 2) % 3

    @property
    def shift(self) -> int:
        return 1 if self.handedness == "R" else -1


DefectSpec = Union[Vacancy, EdgeDislocation, Screw]


def _axis(value, what: str) -> int:
    if isinstance(value, str) and value.lower() in AXES:
        return AXES.index(value.lower())
    if isinstance(value, int) and 0 <= value < 3:
        return value
    raise ConfigError(f"{what} must be one of x, y, z (got {value!r})")


def _triple(value, what: str) -> Coord:
    if not isinstance(value, (list, tuple)) or len(value) != 3 or not all(isinstance(v, int) for v in value):
        raise ConfigError(f"{what} must be a list of three integers (got {value!r})")
    return tuple(value)


def _pair(value, what: str) -> Tuple[int, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 2 or not all(isinstance(v, int) for v in value):
        raise ConfigError(f"{what} must be a list of two integers (got {value!r})")
    return tuple(value)


def _flavor(value, what: str) -> str:
    text = str(value).strip("<>⟨⟩").lower()
    if text not in ("e", "m"):
        raise ConfigError(f"{what} must be 'e' or 'm' (got {value!r})")
    return text


_DEFECT_KEYS = {
    "vacancy": {"kind", "flavor", "origin", "size"},
    "edge_dislocation": {"kind", "line_axis", "normal_axis", "position", "height", "twist_flavors"},
    "screw": {"kind", "line_axis", "position", "handedness"},
}


def parse_defect(record: Dict) -> DefectSpec:
    """Turn one config ``defects`` record into a DefectSpec.

    Raises:
        ConfigError: on unknown kinds, unknown keys or ill-typed fields
    """
    if not isinstance(record, dict):
        raise ConfigError(f"defect record must be an object (got {record!r})")
    kind = record.get("kind")
    if kind not in _DEFECT_KEYS:
        raise ConfigError(f"unknown defect kind {kind!r}; expected one of {sorted(_DEFECT_KEYS)}")
    unknown = set(record) - _DEFECT_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown keys for {kind}: {sorted(unknown)}")
    try:
        if kind == "vacancy":
            return Vacancy(_flavor(record["flavor"], "vacancy flavor"), _triple(record["origin"], "vacancy origin"),
                           _triple(record["size"], "vacancy size"))
        if kind == "edge_dislocation":
            flavors = record.get("twist_flavors", "mm")
            if isinstance(flavors, str):
                flavors = list(flavors.strip("<>⟨⟩"))
            if len(flavors) != 2:
                raise ConfigError(f"twist_flavors must name two flavors (got {record.get('twist_flavors')!r})")
            flavors = "".join(_flavor(f, "twist flavor") for f in flavors)
            return EdgeDislocation(_axis(record["line_axis"], "line_axis"), _axis(record["normal_axis"], "normal_axis"),
                                   _pair(record["position"], "position"), int(record["height"]), flavors)
        handedness = str(record.get("handedness", "R")).upper()
        if handedness not in ("L", "R"):
            raise ConfigError(f"handedness must be L or R (got {record.get('handedness')!r})")
        return Screw(_axis(record["line_axis"], "line_axis"), _pair(record["position"], "position"), handedness)
    except KeyError as e:
        raise ConfigError(f"{kind} record is missing {e.args[0]!r}") from e


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Resolution:
    """Where a (possibly out-of-lattice) corner lands.

    Exactly one of: ``site`` index, ``reasons`` (face/vacancy letters the
    corner fell through), or ``removed`` (a dislocation strip site).
    """

    site: Optional[int] = None
    reasons: Tuple[str, ...] = ()
    removed: bool = False


FaceTyping = Callable[[int, int, int, int], str]


def triangular_typing(dims: Coord) -> Dict[Tuple[int, int], Callable[[int, int], str]]:
    """Per-face diagonal split of the triangular preset.

    On the negative face of axis i a cell is X-type iff ``u+v < L-1``, on
    the positive face iff ``u+v < L-2``; (u, v) are the anchor's other two
    coordinates in cyclic order.
    """
    rules = {}
    for i in range(3):
        L = dims[i]
        rules[(i, -1)] = lambda u, v, L=L: "m" if u + v - (L - 2) - 1 < 0 else "e"
        rules[(i, +1)] = lambda u, v, L=L: "m" if u + v - (L - 2) < 0 else "e"
    return rules


@dataclass
class LatticeGeometry:
    """Site chart, glue maps and qubit indexing of one lattice."""

    dims: Coord
    boundary: BoundarySpec
    defects: Tuple[DefectSpec, ...]
    preset: Optional[str] = None
    sites: Dict[Coord, int] = field(default_factory=dict)
    coords: List[Coord] = field(default_factory=list)
    face_rules: Optional[Dict[Tuple[int, int], Callable[[int, int], str]]] = None

    @cached_property
    def periodic(self) -> Tuple[bool, bool, bool]:
        return tuple(self.boundary.is_periodic(i) for i in range(3))

    @property
    def n_qubits(self) -> int:
        return 2 * len(self.coords)

    def qubit(self, site: Coord, slot: int) -> int:
        """Qubit index of ``slot`` (1 or 2) at an alive ``site``."""
        return 2 * self.sites[self.wrap(site)] + (slot - 1)

    def site_of(self, qubit: int) -> Tuple[Coord, int]:
        return self.coords[qubit // 2], qubit % 2 + 1

    def wrap(self, p: Sequence[int]) -> Coord:
        return tuple(p[i] % self.dims[i] if self.periodic[i] else p[i] for i in range(3))

    def anchor_range(self, axis: int) -> range:
        lo = 0 if self.periodic[axis] else -1
        return range(lo, self.dims[axis])

    def anchors(self) -> Iterator[Coord]:
        return itertools.product(*(self.anchor_range(i) for i in range(3)))

    def vacancy_flavor(self, p: Sequence[int]) -> Optional[str]:
        for d in self.defects:
            if not isinstance(d, Vacancy):
                continue
            inside = True
            for i in range(3):
                t = p[i] - d.origin[i]
                if self.periodic[i]:
                    t %= self.dims[i]
                if t < 0 or t >= d.size[i]:
                    inside = False
                    break
            if inside:
                return d.flavor
        return None

    def is_removed(self, p: Sequence[int]) -> bool:
        for d in self.defects:
            if isinstance(d, EdgeDislocation) and p[d.normal_axis] == d.at:
                t = p[d.height_axis] - d.start
                if 0 <= t < d.height:
                    return True
        return False

    def _on_cut(self, a: Sequence[int], d: Screw) -> bool:
        if self.periodic[d.t2]:
            return (a[d.t2] - d.position[1]) % self.dims[d.t2] == 0
        return a[d.t2] == d.position[1]

    def corner(self, anchor: Coord, delta: Coord) -> Tuple[Coord, bool]:
        """Site referenced by corner ``delta`` of cell ``anchor`` after glue maps.

        Returns:
            Tuple of (wrapped coordinate, whether a glue map was applied)
        """
        p = list(_add(anchor, delta))
        glued = False
        for d in self.defects:
            if isinstance(d, Screw):
                if self._on_cut(anchor, d) and delta[d.t2] == 1 and p[d.t1] > d.position[0]:
                    p[d.line_axis] += d.shift
                    glued = True
            elif isinstance(d, EdgeDislocation):
                n = d.normal_axis
                if anchor[n] == d.at - 1 and delta[n] == 1:
                    t = p[d.height_axis] - d.start
                    if 0 <= t < d.height:
                        p[n] += 1
                        glued = True
        return self.wrap(p), glued

    def resolve(self, p: Coord) -> Resolution:
        reasons = []
        for i in range(3):
            if self.periodic[i]:
                continue
            if p[i] < 0:
                reasons.append(self.boundary.negative[i])
            elif p[i] >= self.dims[i]:
                reasons.append(self.boundary.positive[i])
        if reasons:
            return Resolution(reasons=tuple(reasons))
        flavor = self.vacancy_flavor(p)
        if flavor:
            return Resolution(reasons=(flavor,))
        if self.is_removed(p):
            return Resolution(removed=True)
        return Resolution(site=self.sites[p])

    def cell_dropped(self, a: Coord) -> bool:
        """Cells with no generators.

        Along a twist line only the mixed cell, half glued and half not, is
        dropped. Screws drop their line column on the cut.
        """
        for d in self.defects:
            if isinstance(d, EdgeDislocation):
                if a[d.normal_axis] == d.at - 1 and a[d.height_axis] in (d.start - 1, d.start + d.height - 1):
                    return True
            elif isinstance(d, Screw):
                if a[d.t1] == d.position[0] and self._on_cut(a, d):
                    return True
        return False

    def face_depth(self, a: Coord) -> int:
        """Number of open faces cell ``a`` pokes through."""
        return sum(
            1 for i in range(3) if not self.periodic[i] and (a[i] == -1 or a[i] == self.dims[i] - 1)
        )

    def window_qubits(self, cells: Iterable[Sequence[int]]) -> List[int]:
        """Both qubits of every alive site among ``cells`` (first-seen order)."""
        seen: Dict[int, None] = {}
        for p in cells:
            r = self.resolve(self.wrap(p))
            if r.site is not None:
                seen.setdefault(2 * r.site, None)
                seen.setdefault(2 * r.site + 1, None)
        return list(seen)

    def box_qubits(self, lo: Sequence[int], hi: Sequence[int]) -> List[int]:
        """Qubits of alive sites with ``lo <= coord < hi`` componentwise."""
        out = []
        for q in range(self.n_qubits):
            p = self.coords[q // 2]
            if all(lo[i] <= p[i] < hi[i] for i in range(3)):
                out.append(q)
        return out

    def slab_qubits(self, axis: int, lo: int, hi: int) -> List[int]:
        return [q for q in range(self.n_qubits) if lo <= self.coords[q // 2][axis] < hi]


def _check_defects(dims: Coord, boundary: BoundarySpec, defects: Sequence[DefectSpec]):
    periodic = [boundary.is_periodic(i) for i in range(3)]
    for d in defects:
        if isinstance(d, Vacancy):
            for i in range(3):
                if d.size[i] < 1:
                    raise BuildError(f"vacancy size {d.size} must be positive")
                if periodic[i]:
                    if d.size[i] > dims[i]:
                        raise BuildError(f"vacancy {d.size} is wider than periodic axis {AXES[i]}")
                elif d.origin[i] < 1 or d.origin[i] + d.size[i] > dims[i] - 1:
                    raise BuildError(
                        f"vacancy at {d.origin} size {d.size} touches the open {AXES[i]} faces or wraps a non-periodic axis"
                    )
        elif isinstance(d, EdgeDislocation):
            if d.line_axis == d.normal_axis:
                raise BuildError("edge dislocation line and normal axes must differ")
            if d.height < 1:
                raise BuildError(f"edge dislocation height must be positive (got {d.height})")
            n, h = d.normal_axis, d.height_axis
            if not periodic[n] and not 2 <= d.at <= dims[n] - 3:
                raise BuildError(f"edge dislocation plane {AXES[n]}={d.at} too close to an open face")
            if not periodic[h] and (d.start < 2 or d.start + d.height > dims[h] - 2):
                raise BuildError(f"edge dislocation strip {d.start}..{d.start + d.height - 1} too close to an open face")
        elif isinstance(d, Screw):
            if not periodic[d.line_axis]:
                raise BuildError(f"screw line along {AXES[d.line_axis]} must wrap a periodic axis")
            for axis, coord in ((d.t1, d.position[0]), (d.t2, d.position[1])):
                if not periodic[axis] and not 1 <= coord <= dims[axis] - 2:
                    raise BuildError(f"screw line at {AXES[axis]}={coord} touches an open face")


def build_geometry(
    dims: Sequence[int],
    boundary: BoundarySpec | str,
    defects: Sequence[DefectSpec] = (),
    preset: Optional[str] = None,
) -> LatticeGeometry:
    """Build the alive-site chart for a lattice.

    Args:
        dims: (Lx, Ly, Lz), each at least 2
        boundary: BoundarySpec or its ``abc;def`` string
        defects: Vacancies, edge dislocations and screws
        preset: ``"triangular"`` for the diagonal face split, else None

    Returns:
        LatticeGeometry with sites enumerated x-major

    Raises:
        ConfigError: on bad dims or preset
        BuildError: on overlapping or misplaced defects
    """
    dims = tuple(int(v) for v in dims)
    if len(dims) != 3 or any(v < 2 for v in dims):
        raise ConfigError(f"lattice dims must be three integers >= 2 (got {dims})")
    if isinstance(boundary, str):
        boundary = BoundarySpec.parse(boundary)
    if preset not in (None, "triangular"):
        raise ConfigError(f"unknown preset {preset!r}")
    if preset == "triangular" and any(c != "e" for c in boundary.positive + boundary.negative):
        raise ConfigError("the triangular preset is defined on 'eee;eee' faces")
    defects = tuple(defects)
    _check_defects(dims, boundary, defects)

    geom = LatticeGeometry(dims, boundary, defects, preset)
    if preset == "triangular":
        geom.face_rules = triangular_typing(dims)
    owner: Dict[Coord, int] = {}
    for p in itertools.product(*(range(v) for v in dims)):
        hits = [i for i, d in enumerate(defects) if _defect_covers(geom, d, p)]
        if len(hits) > 1:
            raise BuildError(f"defects {hits[0]} and {hits[1]} overlap at site {p}")
        if hits:
            owner[p] = hits[0]
            continue
        geom.sites[p] = len(geom.coords)
        geom.coords.append(p)
    return geom


def _defect_covers(geom: LatticeGeometry, d: DefectSpec, p: Coord) -> bool:
    if isinstance(d, Vacancy):
        return LatticeGeometry(geom.dims, geom.boundary, (d,)).vacancy_flavor(p) is not None
    if isinstance(d, EdgeDislocation):
        return LatticeGeometry(geom.dims, geom.boundary, (d,)).is_removed(p)
    return False


# ---------------------------------------------------------------------------
# Stabilizer sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """One stabilizer generator: pure X or pure Z on ``qubits``."""

    pauli: str
    qubits: Tuple[int, ...]
    kind: str
    anchor: Coord
    completed: bool = False

    @property
    def tag(self) -> str:
        return f"{self.kind}{self.pauli}"

    def word(self, n_qubits: int) -> PauliWord:
        if self.pauli == "X":
            return PauliWord.from_qubits(n_qubits, x_qubits=self.qubits)
        return PauliWord.from_qubits(n_qubits, z_qubits=self.qubits)


@dataclass
class StabilizerSet:
    """Tagged CSS generator list over a geometry."""

    geometry: LatticeGeometry
    generators: List[Generator] = field(default_factory=list)
    irregular: FrozenSet[Coord] = frozenset()

    @property
    def n_qubits(self) -> int:
        return self.geometry.n_qubits

    def of_type(self, pauli: str) -> List[Generator]:
        return [g for g in self.generators if g.pauli == pauli]

    def matrix(self, pauli: str) -> gf2.BitMatrix:
        return gf2.BitMatrix.from_supports((g.qubits for g in self.of_type(pauli)), self.n_qubits)

    def words(self) -> List[PauliWord]:
        return [g.word(self.n_qubits) for g in self.generators]

    def symplectic_matrix(self) -> gf2.BitMatrix:
        n = self.n_qubits
        supports = [g.qubits if g.pauli == "X" else tuple(q + n for q in g.qubits) for g in self.generators]
        return gf2.BitMatrix.from_supports(supports, 2 * n)

    def counts_by_tag(self) -> Dict[str, int]:
        counts: Dict[str, int] = defaultdict(int)
        for g in self.generators:
            counts[g.tag] += 1
        return dict(sorted(counts.items()))

    def without(self, predicate: Callable[[Generator], bool]) -> "StabilizerSet":
        return StabilizerSet(self.geometry, [g for g in self.generators if not predicate(g)], self.irregular)

    def with_generators(self, extra: Iterable[Generator]) -> "StabilizerSet":
        return StabilizerSet(self.geometry, self.generators + list(extra), self.irregular)

    @cached_property
    def generators_on(self) -> Dict[str, Dict[int, List[int]]]:
        """Per type, qubit -> indices of the generators acting on it."""
        on: Dict[str, Dict[int, List[int]]] = {"X": defaultdict(list), "Z": defaultdict(list)}
        for j, g in enumerate(self.generators):
            for q in g.qubits:
                on[g.pauli][q].append(j)
        return on

    def anticommuting_pairs(self) -> List[Tuple[int, int]]:
        """Index pairs (X generator, Z generator) with odd overlap."""
        z_on = self.generators_on["Z"]
        bad = []
        for i, g in enumerate(self.generators):
            if g.pauli != "X":
                continue
            parity: Dict[int, int] = defaultdict(int)
            for q in g.qubits:
                for j in z_on.get(q, ()):
                    parity[j] ^= 1
            bad.extend((i, j) for j, v in sorted(parity.items()) if v)
        return bad

    def check_commutation(self):
        """Raise CommutationError naming the first anticommuting pair."""
        bad = self.anticommuting_pairs()
        if bad:
            i, j = bad[0]
            gi, gj = self.generators[i], self.generators[j]
            raise CommutationError(
                f"{len(bad)} anticommuting pairs; first: {gi.tag}@{gi.anchor} with {gj.tag}@{gj.anchor}",
                pair=(i, j),
                anchors=(gi.anchor, gj.anchor),
            )


def _cell_words(geom: LatticeGeometry, a: Coord):
    """Truncated X and Z supports of cell ``a`` plus keep/regularity flags."""
    ok_x = ok_z = True
    regular = True
    sx: Dict[int, int] = defaultdict(int)
    sz: Dict[int, int] = defaultdict(int)
    types = None
    if geom.face_rules is not None:
        types = []
        for i in range(3):
            u, v = a[(i + 1) % 3], a[(i + 2) % 3]
            if a[i] == -1:
                types.append(geom.face_rules[(i, -1)](u, v))
            if a[i] == geom.dims[i] - 1:
                types.append(geom.face_rules[(i, +1)](u, v))
    glued_any = False
    for d in CORNERS:
        cx, cz = CX_TEMPLATE.get(d), CZ_TEMPLATE.get(d)
        p, glued = geom.corner(a, d)
        if glued:
            regular = False
            glued_any = True
        r = geom.resolve(p)
        if r.removed:
            return None
        if r.reasons:
            regular = False
            if types is None:
                if cx and any(t != "m" for t in r.reasons):
                    ok_x = False
                if cz and any(t != "e" for t in r.reasons):
                    ok_z = False
            continue
        for template, acc in ((cx, sx), (cz, sz)):
            if template:
                for slot, on in enumerate(template):
                    if on:
                        acc[2 * r.site + slot] ^= 1
    if types is not None:
        ok_x = all(t == "m" for t in types)
        ok_z = all(t == "e" for t in types)
    xs = tuple(sorted(q for q, v in sx.items() if v))
    zs = tuple(sorted(q for q, v in sz.items() if v))
    regular = regular and ok_x and ok_z and len(xs) == 8 and len(zs) == 8
    return xs if ok_x else (), zs if ok_z else (), regular, glued_any


def _kind_for(geom: LatticeGeometry, a: Coord, glued: bool, full: bool) -> str:
    if glued:
        return "slanted"
    depth = geom.face_depth(a)
    if depth:
        return ("plaquette", "edge", "vertex")[depth - 1]
    return "bulk" if full else "plaquette"


class _Builder:
    """Mutable generator list with a qubit -> generator index."""

    def __init__(self, geom: LatticeGeometry, generators: Iterable[Generator] = ()):
        self.geom = geom
        self.generators: List[Generator] = []
        self.on_qubit: Dict[str, Dict[int, List[int]]] = {"X": defaultdict(list), "Z": defaultdict(list)}
        for g in generators:
            self.add(g)

    def add(self, g: Generator):
        idx = len(self.generators)
        self.generators.append(g)
        for q in g.qubits:
            self.on_qubit[g.pauli][q].append(idx)

    def touching(self, pauli: str, qubits: Iterable[int]) -> List[Generator]:
        seen: Dict[int, None] = {}
        for q in qubits:
            for i in self.on_qubit[pauli].get(q, ()):
                seen.setdefault(i, None)
        return [self.generators[i] for i in sorted(seen)]

    def local_candidates(self, window: Sequence[int], pauli: str) -> List[Tuple[int, ...]]:
        """New ``pauli``-type words supported on ``window``.

        Kernel of the opposite-type generators restricted to the window,
        minus the span of same-type group elements supported there.
        """
        local = {q: i for i, q in enumerate(window)}
        m = len(window)
        opposite = "Z" if pauli == "X" else "X"
        rows = []
        for g in self.touching(opposite, window):
            cols = [local[q] for q in g.qubits if q in local]
            if cols:
                rows.append(cols)
        kernel = gf2.kernel_basis(gf2.BitMatrix.from_supports(rows, m))
        if kernel.n_rows == 0:
            return []

        same = self.touching(pauli, window)
        outside: Dict[int, int] = {}
        for g in same:
            for q in g.qubits:
                if q not in local and q not in outside:
                    outside[q] = m + len(outside)
        width = m + len(outside)
        span = gf2.BitMatrix.from_supports(
            ([local[q] if q in local else outside[q] for q in g.qubits] for g in same), width
        )
        mask = np.zeros(width, dtype=np.uint8)
        mask[:m] = 1
        reducer = gf2.Reducer(m)
        restricted = gf2.rowspace_restricted_to(span, mask)
        for row in restricted.to_dense():
            reducer.add(gf2.pack(row[:m]))
        found = []
        for row in kernel.to_dense():
            if reducer.add(gf2.pack(row)):
                found.append(tuple(sorted(window[i] for i in np.flatnonzero(row))))
        return found


def derive_local_stabilizers(
    geom: LatticeGeometry,
    partial: StabilizerSet,
    window: Iterable[Sequence[int]],
    paulis: str = "XZ",
) -> List[PauliWord]:
    """Pure-X and pure-Z words on ``window`` commuting with ``partial``, modulo its local group.

    Args:
        geom: Geometry of ``partial``
        partial: Generators the candidates must commute with
        window: Cells (site coordinates) making up the region
        paulis: Which types to search for; each is computed against ``partial`` alone

    Returns:
        X candidates followed by Z candidates
    """
    builder = _Builder(geom, partial.generators)
    qubits = geom.window_qubits(window)
    words = []
    for pauli in paulis:
        for support in builder.local_candidates(qubits, pauli):
            if pauli == "X":
                words.append(PauliWord.from_qubits(geom.n_qubits, x_qubits=support))
            else:
                words.append(PauliWord.from_qubits(geom.n_qubits, z_qubits=support))
    return words


def _install_twists(geom: LatticeGeometry, builder: _Builder):
    for d in geom.defects:
        if not isinstance(d, EdgeDislocation):
            continue
        line, n, h = d.line_axis, d.normal_axis, d.height_axis
        for row, flavor in ((d.start - 1, d.flavors[0]), (d.start + d.height - 1, d.flavors[1])):
            pauli = "X" if flavor == "m" else "Z"
            for x0 in range(geom.dims[line]):
                cells = []
                for x, y, z in itertools.product(range(x0, x0 + 2), range(d.at - 1, d.at + 2), range(row, row + 2)):
                    p = [0, 0, 0]
                    p[line], p[n], p[h] = x, y, z
                    cells.append(p)
                window = geom.window_qubits(cells)
                if not window:
                    continue
                anchor = [0, 0, 0]
                anchor[line], anchor[n], anchor[h] = x0, d.at, row
                for support in builder.local_candidates(window, pauli):
                    builder.add(Generator(pauli, support, "twist", tuple(anchor)))


def screw_line_word(geom: LatticeGeometry, d: Screw) -> Tuple[int, ...]:
    """X product of the glued templates over the dropped line column of ``d``.

    Each cell of the column is cut open by the shift on its own; the
    product around the periodic line closes up again.
    """
    acc: Dict[int, int] = defaultdict(int)
    for z in range(geom.dims[d.line_axis]):
        a = [0, 0, 0]
        a[d.t1], a[d.t2], a[d.line_axis] = d.position[0], d.position[1], z
        for delta in CORNERS:
            template = CX_TEMPLATE.get(delta)
            if not template:
                continue
            r = geom.resolve(geom.corner(tuple(a), delta)[0])
            if r.site is None:
                continue
            for slot, on in enumerate(template):
                if on:
                    acc[2 * r.site + slot] ^= 1
    return tuple(sorted(q for q, v in acc.items() if v))


def _install_screw_lines(geom: LatticeGeometry, builder: _Builder):
    for d in geom.defects:
        if not isinstance(d, Screw) or not geom.periodic[d.line_axis]:
            continue
        support = screw_line_word(geom, d)
        if support:
            anchor = [0, 0, 0]
            anchor[d.t1], anchor[d.t2] = d.position
            builder.add(Generator("X", support, "line", tuple(anchor)))


def _complete(geom: LatticeGeometry, builder: _Builder, irregular: Set[Coord]) -> int:
    def is_irregular(a: Coord) -> bool:
        for i in range(3):
            if not geom.periodic[i] and not -1 <= a[i] <= geom.dims[i] - 1:
                return True
        return geom.wrap(a) in irregular

    added = 0
    for a in geom.anchors():
        near = any(is_irregular(_add(a, d)) for d in itertools.product((-1, 0, 1), repeat=3))
        if not near:
            continue
        window = geom.window_qubits(_add(a, d) for d in CORNERS)
        if not window:
            continue
        for pauli in "XZ":
            for support in builder.local_candidates(window, pauli):
                builder.add(Generator(pauli, support, _kind_for(geom, a, False, False), a, completed=True))
                added += 1
    return added


def build_stabilizers(
    geom: LatticeGeometry,
    install_twists: bool = True,
    complete: bool = True,
    check: bool = True,
) -> StabilizerSet:
    """Emit the stabilizer generators of a geometry.

    Cells are visited x-major. An open-face or vacancy corner keeps the X
    part only if every face it crosses condenses m, and the Z part only if
    every face condenses e. Edge dislocations then get their twist lines,
    each screw an X word along its dropped column, and every window next
    to an irregular cell is completed with any local word the neighbouring
    generators leave free.

    Args:
        geom: Output of build_geometry
        install_twists: Add twist words along edge-dislocation lines and the screw line words
        complete: Run the local completion pass
        check: Assert pairwise commutation

    Returns:
        StabilizerSet with tagged generators

    Raises:
        CommutationError: if any X and Z generator anticommute
    """
    builder = _Builder(geom)
    irregular: Set[Coord] = set()
    for a in geom.anchors():
        if geom.cell_dropped(a):
            irregular.add(a)
            continue
        words = _cell_words(geom, a)
        if words is None:
            irregular.add(a)
            continue
        xs, zs, regular, glued = words
        if not regular:
            irregular.add(a)
        kind = _kind_for(geom, a, glued, len(xs) == 8 and len(zs) == 8)
        if xs:
            builder.add(Generator("X", xs, kind, a))
        if zs:
            builder.add(Generator("Z", zs, kind, a))
    if install_twists:
        _install_twists(geom, builder)
        _install_screw_lines(geom, builder)
    if complete:
        _complete(geom, builder, irregular)
    stabilizers = StabilizerSet(geom, builder.generators, frozenset(irregular))
    if check:
        stabilizers.check_commutation()
    return stabilizers


# ---------------------------------------------------------------------------
# Charts and translations
# ---------------------------------------------------------------------------


def parse_face(face: str) -> Tuple[int, int]:
    """``"+z"`` -> (2, +1); ``"-x"`` -> (0, -1)."""
    face = face.strip().lower()
    if len(face) != 2 or face[0] not in "+-" or face[1] not in AXES:
        raise ConfigError(f"face must look like '+z' or '-x' (got {face!r})")
    return AXES.index(face[1]), 1 if face[0] == "+" else -1


def layer_chart(face: str, p: Sequence[int]) -> Tuple[int, int]:
    """In-layer coordinates (u, v) of ``p`` on planes parallel to ``face``."""
    axis, _ = parse_face(face)
    return p[(axis + 1) % 3], -p[(axis + 2) % 3]


def abc_flavor(boundary: BoundarySpec, face: str) -> str:
    """Charge species with A/B/C subtypes on ``face``.

    Raises:
        PreconditionError: on periodic faces and faces that condense their charge
    """
    axis, sign = parse_face(face)
    letter = boundary.face(axis, sign)
    if sign > 0 and letter == "m":
        return "m"
    if sign < 0 and letter == "e":
        return "e"
    raise PreconditionError(f"face {face} labelled {letter!r} has no ABC charges")


def charge_color(geom: LatticeGeometry, face: str, layer_coords: Tuple[int, int]) -> str:
    """A, B or C from ``(u + v) mod 3`` on an ABC face."""
    abc_flavor(geom.boundary, face)
    u, v = layer_coords
    return "ABC"[(u + v) % 3]


def translate_operator(geom: LatticeGeometry, op: PauliWord, delta: Sequence[int]) -> PauliWord:
    """Move every single-qubit factor of ``op`` by ``delta`` in the chart.

    Periodic axes wrap; slots are preserved.

    Raises:
        ClippedSupportError: when a factor lands outside the lattice or on a removed site
    """
    x = np.zeros(geom.n_qubits, dtype=np.uint8)
    z = np.zeros(geom.n_qubits, dtype=np.uint8)
    clipped = []
    for q in sorted(op.support()):
        site, slot = geom.site_of(q)
        target = geom.wrap(_add(site, delta))
        r = geom.resolve(target)
        if r.site is None:
            clipped.append(target)
            continue
        t = 2 * r.site + slot - 1
        x[t] ^= op.x[q]
        z[t] ^= op.z[q]
    if clipped:
        raise ClippedSupportError(f"translation by {tuple(delta)} clips {len(clipped)} sites", clipped)
    return PauliWord(x, z)


def word_from_sites(geom: LatticeGeometry, entries: Iterable[Tuple[Sequence[int], int, str]]) -> PauliWord:
    """Word from ``(site, slot, letter)`` triples; letters X, Z or Y multiply.

    Raises:
        ClippedSupportError: if a site is not alive
    """
    x = np.zeros(geom.n_qubits, dtype=np.uint8)
    z = np.zeros(geom.n_qubits, dtype=np.uint8)
    clipped = []
    for site, slot, letter in entries:
        r = geom.resolve(geom.wrap(site))
        if r.site is None:
            clipped.append(tuple(site))
            continue
        q = 2 * r.site + slot - 1
        if letter in ("X", "Y"):
            x[q] ^= 1
        if letter in ("Z", "Y"):
            z[q] ^= 1
    if clipped:
        raise ClippedSupportError(f"{len(clipped)} sites fall outside the lattice", clipped)
    return PauliWord(x, z)


def format_word(geom: LatticeGeometry, op: PauliWord) -> str:
    """Text form: one ``(x,y,z,slot,P)`` entry per non-identity factor."""
    entries = []
    for q, letter in op.letters().items():
        (x, y, z), slot = geom.site_of(q)
        entries.append(f"({x},{y},{z},{slot},{letter})")
    return " ".join(entries)
