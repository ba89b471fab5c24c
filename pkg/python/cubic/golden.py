"""Golden checks run by ``run_cubic.py validate``.

Every family point carries the published k, which is also what its closed
form gives. A point whose engine value differs from it fails; there is no
tolerated-deviation status.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .analysis import classify, count_logicals_in_region
from .excitations import (
    VARIANTS,
    cascade,
    cascade_geometry,
    default_cascade_anchor,
    fractal_double,
    loglog_slope,
    measure_zmax,
    scaled_pattern,
    syndrome,
)
from .lattice import build_geometry, build_stabilizers, word_from_sites
from .pauli import product
from .presets import evaluate_point, get_family, region_qubits

# (family, scanned value, published k)
K_POINTS: Tuple[Tuple[str, int, int], ...] = (
    *(("ppp", L, k) for L, k in zip(range(2, 9), (6, 2, 14, 2, 6, 2, 30))),
    *(("tennis1", Lz, 2 * Lz) for Lz in (3, 4, 5)),
    *(("tennis2", Lz, 2 * Lz - 6) for Lz in (5, 6, 7)),
    *(("tube", L, 2 * L - 3) for L in (4, 5, 6)),
    *(("two_m_faces", L, 2 * L - 6) for L in (5, 6)),
    *(("half_half_2", L, 4 * L - 12) for L in (5, 6)),
    *(("triangular", L, 4 * L - 4) for L in (4, 5, 6)),
    *((f, 5, 0) for f in ("only_e", "one_m", "one_m_abc", "two_m_abc", "m_and_m_abc", "half_half_1")),
    *(("ppe_ppe", L, k) for L, k in ((4, 7), (6, 7), (9, 3), (12, 15))),
    *(("ppm_ppe", L, k) for L, k in ((4, 0), (6, 8), (9, 4), (12, 16))),
    *(("pmm_pem", L, k) for L, k in ((4, 0), (6, 4), (9, 2), (12, 8))),
    *(("pem_pem", L, 2 * L) for L in (4, 6, 9, 12)),
    *((f, L, 0) for f in ("ppe_ppm", "pem_pme", "pem_pmm", "pmm_pmm", "pmm_pee", "pee_pmm") for L in (4, 6, 9, 12)),
    *(("subsystem_tennis1", Lz, k) for Lz, k in ((6, 4), (7, 6), (9, 6))),
    *(("vacancy_periodic", Lz, k) for Lz, k in ((5, 0), (6, 8))),
    *(("vacancies_periodic_v", Lz, k) for Lz, k in ((4, 8), (5, 10), (6, 20))),
    *(("vacancies_mmp", Lz, k) for Lz, k in ((5, 10), (6, 20))),
    *(("two_vacancies_bulk", w, k) for w, k in zip(range(2, 7), (0, 0, 2, 4, 6))),
    *(("edge_periodic", Lx, k) for Lx, k in ((4, 2), (5, 1), (6, 18))),
    *(("screw_single", Lz, k) for Lz, k in ((4, 0), (5, 0), (6, 8), (9, 4))),
)

# (family, Lz, delta, published k); the pair formulas differ by 4*floor((Lz - 1) / 2)
SCREW_PAIR_POINTS: Tuple[Tuple[str, int, int, int], ...] = (
    *(("screw_LR", 6, delta, k) for delta, k in ((2, 10), (3, 8))),
    *(("screw_same", 6, delta, k) for delta, k in ((2, 18), (3, 16))),
)

EDGE_PAIR_WIDTHS = (4, 5, 6)

ZMAX_POINTS = ((3, 1), (6, 2), (9, 1), (12, 4))
CASCADE_WEIGHTS = ((2, 8), (4, 25), (8, 59), (16, 179), (32, 559))


@dataclass(frozen=True)
class GoldenCheck:
    name: str
    measured: object
    expected: object
    oracle: Optional[object] = None
    status: str = "match"

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def _k_check(family: str, value: int, expected: int, **overrides) -> GoldenCheck:
    result = evaluate_point(get_family(family).point(value, **overrides))
    oracle = result.oracle.value if result.oracle is not None else None
    status = "match" if result.k == expected else "fail"
    label = "".join(f" {k}={v}" for k, v in sorted(overrides.items()))
    return GoldenCheck(f"k {family} {result.point.dims}{label}", result.k, expected, oracle, status)


def _edge_pair_offset_check(widths: Sequence[int] = EDGE_PAIR_WIDTHS) -> GoldenCheck:
    """The pair is known up to a constant: k - 4*Lx must not depend on Lx."""
    offsets = []
    for Lx in widths:
        result = evaluate_point(get_family("edge_pair_bulk").point(Lx))
        offsets.append(result.k - result.oracle.reference)
    status = "match" if len(set(offsets)) == 1 else "fail"
    return GoldenCheck(f"edge_pair_bulk k - 4Lx over Lx={list(widths)}", offsets, "constant", status=status)


def _zmax_check(L: int, expected: int) -> GoldenCheck:
    measured = measure_zmax(L)
    return GoldenCheck(f"z_max L={L}", measured, expected, expected, "match" if measured == expected else "fail")


def _tetrahedra_check() -> GoldenCheck:
    geom = build_geometry((5, 5, 5), "ppp;ppp")
    s = build_stabilizers(geom, complete=False)
    sizes = []
    for slot in (1, 2):
        for letter in "XZ":
            excitations = syndrome(s, word_from_sites(geom, [((2, 2, 2), slot, letter)]))
            kinds = {e.kind for e in excitations}
            sizes.append(len(excitations) if len(kinds) == 1 else -1)
    return GoldenCheck("single-qubit syndromes", sizes, [4, 4, 4, 4], status="match" if sizes == [4] * 4 else "fail")


def _cleaning_check() -> GoldenCheck:
    geom = build_geometry((11, 11, 5), "mem;mee")
    s = build_stabilizers(geom)
    count = count_logicals_in_region(s, region_qubits(geom, ((0, 0, 2), (11, 11, 3))))
    return GoldenCheck("tennis1 mid-plane logicals", count, 4, status="match" if count == 4 else "fail")


def _random_products_check(seed: int, trials: int = 20) -> GoldenCheck:
    """Random generator products are stabilizers; one extra Y makes them detectable."""
    geom = build_geometry((4, 4, 4), "ppp;ppp")
    s = build_stabilizers(geom)
    words = [g.word(s.n_qubits) for g in s.generators]
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        picked = product((w for w, keep in zip(words, rng.integers(0, 2, len(words))) if keep), s.n_qubits)
        site = tuple(int(v) for v in rng.integers(0, 4, 3))
        dressed = product([picked, word_from_sites(geom, [(site, int(rng.integers(1, 3)), "Y")])], s.n_qubits)
        if classify(s, picked) != "stabilizer" or classify(s, dressed) != "detectable-error":
            bad += 1
    return GoldenCheck(f"random stabilizer products (seed {seed})", bad, 0, status="match" if bad == 0 else "fail")


def _doubling_check(seed: int, trials: int = 20) -> GoldenCheck:
    """Doubling about any centre scales random charge patterns by two."""
    geom = build_geometry((8, 8, 8), "ppp;ppp")
    s = build_stabilizers(geom, complete=False)
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        letter = "XZ"[int(rng.integers(0, 2))]
        picks = {(tuple(int(v) for v in rng.integers(0, 8, 3)), int(rng.integers(1, 3))) for _ in range(int(rng.integers(1, 4)))}
        op = word_from_sites(geom, [(p, slot, letter) for p, slot in picks])
        anchors = [e.anchor for e in syndrome(s, op)]
        for center in anchors:
            doubled = {e.anchor for e in syndrome(s, fractal_double(s, op, center))}
            bad += doubled != scaled_pattern(geom, anchors, center)
    return GoldenCheck(f"fractal doubling (seed {seed})", bad, 0, status="match" if bad == 0 else "fail")


def _cascade_checks() -> List[GoldenCheck]:
    variant = VARIANTS[0]
    geom, s = cascade_geometry(variant, max(d for d, _ in CASCADE_WEIGHTS))
    anchor = default_cascade_anchor(geom, variant)
    runs = [(d, cascade(geom, s, variant, anchor, d)) for d, _ in CASCADE_WEIGHTS]
    weights = [r.weight for _, r in runs]
    expected = [w for _, w in CASCADE_WEIGHTS]
    deltas = [d for d, _ in runs]
    weight_slope = loglog_slope(deltas, weights)
    peak_slope = loglog_slope(deltas, [r.profile.peak for _, r in runs])
    return [
        GoldenCheck("cascade weights", weights, expected, status="match" if weights == expected else "fail"),
        GoldenCheck("cascade weight slope > 1.05", round(weight_slope, 3), 1.05,
                    status="match" if weight_slope > 1.05 else "fail"),
        GoldenCheck("cascade peak slope <= 1.3", round(peak_slope, 3), 1.3,
                    status="match" if peak_slope <= 1.3 else "fail"),
    ]


def suite(seed: int = 0) -> List[Tuple[str, Callable[[], Iterable[GoldenCheck]]]]:
    """Named check thunks in run order."""
    items: List[Tuple[str, Callable[[], Iterable[GoldenCheck]]]] = [
        (f"{f}:{v}", lambda f=f, v=v, k=k: [_k_check(f, v, k)]) for f, v, k in K_POINTS
    ]
    items += [
        (f"{f}:{Lz}:delta={d}", lambda f=f, Lz=Lz, d=d, k=k: [_k_check(f, Lz, k, delta=d)])
        for f, Lz, d, k in SCREW_PAIR_POINTS
    ]
    items.append(("edge_pair_offset", lambda: [_edge_pair_offset_check()]))
    items += [(f"zmax:{L}", lambda L=L, z=z: [_zmax_check(L, z)]) for L, z in ZMAX_POINTS]
    items += [
        ("tetrahedra", lambda: [_tetrahedra_check()]),
        ("cleaning", lambda: [_cleaning_check()]),
        ("random-products", lambda: [_random_products_check(seed)]),
        ("doubling", lambda: [_doubling_check(seed)]),
        ("cascade", _cascade_checks),
    ]
    return items


def run_suite(seed: int = 0, progress: bool = True, report: Callable[[str], None] = lambda _: None) -> List[GoldenCheck]:
    """Run every golden check.

    Args:
        seed: Seed for the randomized checks
        progress: Show a tqdm bar
        report: Called with one line per finished check

    Returns:
        All checks, failures included
    """
    results: List[GoldenCheck] = []
    for _, thunk in tqdm(suite(seed), desc="validate", disable=not progress):
        for check in thunk():
            results.append(check)
            oracle = f" (closed form {check.oracle})" if check.oracle is not None else ""
            report(f"{check.status:9s} {check.name}: {check.measured}{oracle}")
    return results
