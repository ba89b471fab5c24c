"""Named lattice families shared by ``scan-k`` and ``validate``.

Each family turns a parameter dict into a concrete lattice (dims, faces,
defects, preset, gauge regions) and into the parameters of its closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .analysis import gauge_out, num_logical_qubits, stabilizer_rank
from .closed_forms import ConfigKey, FormulaValue, k_formula
from .errors import ConfigError
from .lattice import (
    Coord,
    DefectSpec,
    EdgeDislocation,
    LatticeGeometry,
    Screw,
    StabilizerSet,
    Vacancy,
    build_geometry,
    build_stabilizers,
)

Box = Tuple[Coord, Coord]


@dataclass(frozen=True)
class FamilyPoint:
    """One lattice of a family, ready to build."""

    family: str
    dims: Coord
    faces: str
    defects: Tuple[DefectSpec, ...] = ()
    preset: Optional[str] = None
    gauge_regions: Tuple[Box, ...] = ()
    oracle_params: Mapping[str, Any] = field(default_factory=dict)

    def geometry(self) -> LatticeGeometry:
        return build_geometry(self.dims, self.faces, self.defects, self.preset)

    def oracle(self) -> FormulaValue:
        return k_formula(ConfigKey(self.family, dict(self.oracle_params)))


@dataclass(frozen=True)
class Family:
    name: str
    scan_param: str
    build: Callable[..., FamilyPoint]
    defaults: Mapping[str, int] = field(default_factory=dict)
    description: str = ""

    def make(self, **params) -> FamilyPoint:
        try:
            return self.build(**{**self.defaults, **params})
        except TypeError as e:
            raise ConfigError(f"bad parameters for family {self.name}: {e}") from e

    def point(self, value: int, **overrides) -> FamilyPoint:
        return self.make(**{**overrides, self.scan_param: value})


def _cube(family: str, faces: str, **extra) -> Callable[..., FamilyPoint]:
    def build(L: int) -> FamilyPoint:
        params = {"L": L, "Lx": L, "Ly": L, "Lz": L, **extra}
        return FamilyPoint(family, (L, L, L), faces, oracle_params=params)

    return build


def _slab(family: str, faces: str) -> Callable[..., FamilyPoint]:
    def build(Lz: int, Lx: int, Ly: int) -> FamilyPoint:
        return FamilyPoint(family, (Lx, Ly, Lz), faces, oracle_params={"Lx": Lx, "Ly": Ly, "Lz": Lz})

    return build


def _triangular(L: int) -> FamilyPoint:
    return FamilyPoint("triangular", (L, L, L), "eee;eee", preset="triangular", oracle_params={"L": L})


def _subsystem_tennis1(Lz: int, Lx: int, Ly: int) -> FamilyPoint:
    top = ((0, 0, math.ceil(2 * Lz / 3)), (Lx, Ly, Lz))
    bottom = ((0, 0, 0), (Lx, Ly, Lz // 3))
    return FamilyPoint(
        "subsystem_tennis1", (Lx, Ly, Lz), "mem;mee", gauge_regions=(top, bottom), oracle_params={"Lz": Lz}
    )


def _vacancy_periodic(Lz: int, L: int, faces: str = "eep;eep", family: str = "vacancy_periodic") -> FamilyPoint:
    vacancy = Vacancy("m", (L // 2 - 1, L // 2 - 1, 0), (2, 2, Lz))
    params = {"Lz": Lz, "v": 1}
    return FamilyPoint(family, (L, L, Lz), faces, (vacancy,), oracle_params=params)


def _vacancies_periodic_v(Lz: int, L: int) -> FamilyPoint:
    vacancies = (Vacancy("m", (2, 2, 0), (2, 2, Lz)), Vacancy("m", (L - 4, L - 4, 0), (2, 2, Lz)))
    return FamilyPoint("vacancies_periodic_v", (L, L, Lz), "eep;eep", vacancies, oracle_params={"Lz": Lz, "v": 2})


def _vacancies_mmp(Lz: int, L: int) -> FamilyPoint:
    return _vacancy_periodic(Lz, L, faces="mmp;mmp", family="vacancies_mmp")


def _two_vacancies_bulk(w1x: int, delta: int, pad: int = 4) -> FamilyPoint:
    # wide vacancy on -z, unit vacancy delta layers above its -x end
    dims = (w1x + 2 * pad, 2 * pad + 1, delta + 2 * pad)
    vacancies = (
        Vacancy("m", (pad, pad, pad), (w1x, 1, 1)),
        Vacancy("m", (pad, pad, pad + delta), (1, 1, 1)),
    )
    return FamilyPoint(
        "two_vacancies_bulk", dims, "eee;eee", vacancies, oracle_params={"w1x": w1x, "w1y": 1, "delta": delta}
    )


def _edge_pair_bulk(Lx: int, L: int, height: int, delta: int) -> FamilyPoint:
    at = L // 2 - delta // 2
    start = L // 2 - height // 2
    pair = tuple(EdgeDislocation(0, 1, (y, start), height, "mm") for y in (at, at + delta))
    return FamilyPoint("edge_pair_bulk", (Lx, L, L), "pee;pee", pair, oracle_params={"Lx": Lx})


def _edge_periodic(Lx: int, L: int) -> FamilyPoint:
    edge = EdgeDislocation(0, 1, (L // 2, 3), 3, "ee")
    return FamilyPoint("edge_periodic", (Lx, L, L), "pee;pee", (edge,), oracle_params={"Lx": Lx, "L": L})


def _screws(family: str, handedness: Sequence[str]) -> Callable[..., FamilyPoint]:
    def build(Lz: int, L: int, delta: int = 0) -> FamilyPoint:
        # lines share the cut row and sit delta apart along it, so the cut joins them
        screws = tuple(Screw(2, (3 + i * delta, L // 2), h) for i, h in enumerate(handedness))
        dims = (L + delta * (len(handedness) - 1), L, Lz)
        return FamilyPoint(family, dims, "eep;eep", screws, oracle_params={"Lz": Lz, "delta": delta})

    return build


FAMILIES: Dict[str, Family] = {
    f.name: f
    for f in (
        Family("ppp", "L", _cube("ppp", "ppp;ppp"), description="periodic 3-torus"),
        Family("only_e", "L", _cube("only_e", "eee;eee")),
        Family("one_m", "L", _cube("one_m", "eee;mee")),
        Family("one_m_abc", "L", _cube("one_m_abc", "mee;eee")),
        Family("two_m_faces", "L", _cube("two_m_faces", "eee;mem")),
        Family("two_m_abc", "L", _cube("two_m_abc", "mem;eee")),
        Family("m_and_m_abc", "L", _cube("m_and_m_abc", "mee;eme")),
        Family("tennis1", "Lz", _slab("tennis1", "mem;mee"), {"Lx": 11, "Ly": 11}),
        Family("tennis2", "Lz", _slab("tennis2", "mee;mem"), {"Lx": 7, "Ly": 7}),
        Family("tube", "L", _cube("tube", "mee;mee")),
        Family("half_half_1", "L", _cube("half_half_1", "mmm;eee")),
        Family("half_half_2", "L", _cube("half_half_2", "eee;mmm")),
        Family("triangular", "L", _triangular),
        Family("ppe_ppe", "L", _cube("ppe_ppe", "ppe;ppe")),
        Family("ppm_ppe", "L", _cube("ppm_ppe", "ppm;ppe")),
        Family("ppe_ppm", "L", _cube("ppe_ppm", "ppe;ppm")),
        Family("pmm_pem", "L", _cube("pmm_pem", "pmm;pem")),
        Family("pem_pem", "L", _cube("pem_pem", "pem;pem")),
        Family("pem_pme", "L", _cube("pem_pme", "pem;pme")),
        Family("pem_pmm", "L", _cube("pem_pmm", "pem;pmm")),
        Family("pmm_pmm", "L", _cube("pmm_pmm", "pmm;pmm")),
        Family("pmm_pee", "L", _cube("pmm_pee", "pmm;pee")),
        Family("pee_pmm", "L", _cube("pee_pmm", "pee;pmm")),
        Family("subsystem_tennis1", "Lz", _subsystem_tennis1, {"Lx": 11, "Ly": 11}),
        Family("vacancy_periodic", "Lz", _vacancy_periodic, {"L": 8}),
        Family("vacancies_periodic_v", "Lz", _vacancies_periodic_v, {"L": 10}),
        Family("vacancies_mmp", "Lz", _vacancies_mmp, {"L": 8}),
        Family("two_vacancies_bulk", "w1x", _two_vacancies_bulk, {"delta": 4}),
        Family("edge_pair_bulk", "Lx", _edge_pair_bulk, {"L": 12, "height": 2, "delta": 4}),
        Family("edge_periodic", "Lx", _edge_periodic, {"L": 8}),
        Family("screw_single", "Lz", _screws("screw_single", "R"), {"L": 8}),
        Family("screw_LR", "Lz", _screws("screw_LR", "LR"), {"L": 8, "delta": 2}),
        Family("screw_same", "Lz", _screws("screw_same", "RR"), {"L": 8, "delta": 2}),
    )
}


def get_family(name: str) -> Family:
    """Raises ConfigError for unknown names."""
    try:
        return FAMILIES[name]
    except KeyError:
        raise ConfigError(f"unknown family {name!r}; known: {', '.join(sorted(FAMILIES))}") from None


@dataclass(frozen=True)
class PointResult:
    point: FamilyPoint
    n: int
    s: int
    k: int
    oracle: Optional[FormulaValue]

    @property
    def match(self) -> Optional[bool]:
        if self.oracle is None or not self.oracle.defined:
            return None
        return self.k == self.oracle.value


def region_qubits(geom: LatticeGeometry, box: Box) -> List[int]:
    return geom.box_qubits(box[0], box[1])


def engine_k(point: FamilyPoint, stabilizers: Optional[StabilizerSet] = None) -> Tuple[StabilizerSet, int]:
    """Build a point and count its logical qubits (gauge-reduced when the family has gauge regions)."""
    s = stabilizers or build_stabilizers(point.geometry())
    if point.gauge_regions:
        regions = [region_qubits(s.geometry, box) for box in point.gauge_regions]
        return s, gauge_out(s, regions)
    return s, num_logical_qubits(s)


def evaluate_point(point: FamilyPoint) -> PointResult:
    s, k = engine_k(point)
    return PointResult(point, s.n_qubits, stabilizer_rank(s), k, point.oracle())
