import time
from fractions import Fraction

import numpy as np
import pytest

from cubic.analysis import (
    brute_force_distance,
    classify,
    count_logicals_in_region,
    defect_center,
    gauge_out,
    logical_basis,
    min_support_width,
    num_logical_qubits,
    stabilizer_rank,
)
from cubic.closed_forms import k_ppp
from cubic.errors import DimensionError, PreconditionError
from cubic.lattice import (
    BoundarySpec,
    Generator,
    LatticeGeometry,
    StabilizerSet,
    build_geometry,
    build_stabilizers,
    word_from_sites,
)
from cubic.pauli import PauliWord
from cubic.presets import engine_k, get_family, region_qubits


@pytest.fixture(scope="module")
def four_two_two():
    """XXXX / ZZZZ on a hand-made two-site geometry."""
    geom = LatticeGeometry((2, 2, 2), BoundarySpec.parse("eee;eee"), ())
    for p in ((0, 0, 0), (1, 0, 0)):
        geom.sites[p] = len(geom.coords)
        geom.coords.append(p)
    return StabilizerSet(
        geom,
        [Generator("X", (0, 1, 2, 3), "bulk", (0, 0, 0)), Generator("Z", (0, 1, 2, 3), "bulk", (0, 0, 0))],
    )


@pytest.fixture(scope="module")
def tennis1_lz5():
    geom = build_geometry((11, 11, 5), "mem;mee")
    return geom, build_stabilizers(geom)


@pytest.mark.parametrize("L, k", [(2, 6), (3, 2), (4, 14), (5, 2), (6, 6)])
def test_periodic_logical_counts(L, k):
    s = build_stabilizers(build_geometry((L, L, L), "ppp;ppp"))
    assert num_logical_qubits(s) == k
    assert stabilizer_rank(s) == s.n_qubits - k


def test_logical_basis_is_symplectic():
    s = build_stabilizers(build_geometry((4, 4, 4), "ppp;ppp"))
    basis = logical_basis(s)
    assert len(basis) == 14
    assert np.array_equal(basis.gram(), np.eye(14, dtype=np.uint8))
    for x_bar, z_bar in basis.pairs:
        assert classify(s, x_bar) == "logical"
        assert classify(s, z_bar) == "logical"


def test_four_two_two(four_two_two):
    s = four_two_two
    assert num_logical_qubits(s) == 2
    assert len(logical_basis(s)) == 2
    assert classify(s, PauliWord.from_qubits(4, x_qubits=[0, 1, 2, 3])) == "stabilizer"
    assert classify(s, PauliWord.from_qubits(4, x_qubits=[0, 1])) == "logical"
    assert classify(s, PauliWord.from_qubits(4, z_qubits=[2])) == "detectable-error"
    assert brute_force_distance(s) == 2


def test_brute_force_limits(four_two_two, ppp4):
    _, s = ppp4
    with pytest.raises(PreconditionError):
        brute_force_distance(s)
    with pytest.raises(PreconditionError):
        brute_force_distance(four_two_two, max_qubits=3)


def test_classify_on_lattice(ppp4):
    geom, s = ppp4
    assert classify(s, s.generators[0].word(s.n_qubits)) == "stabilizer"
    assert classify(s, word_from_sites(geom, [((1, 1, 1), 1, "Z")])) == "detectable-error"
    with pytest.raises(DimensionError):
        classify(s, PauliWord.identity(3))


def test_noncommuting_set_is_rejected():
    geom = build_geometry((2, 2, 2), "ppp;ppp")
    s = StabilizerSet(geom, [Generator("X", (0,), "bulk", (0, 0, 0)), Generator("Z", (0,), "bulk", (0, 0, 0))])
    with pytest.raises(PreconditionError):
        num_logical_qubits(s)
    with pytest.raises(PreconditionError):
        logical_basis(s)


def test_whole_lattice_holds_every_logical(ppp4):
    _, s = ppp4
    assert count_logicals_in_region(s, range(s.n_qubits)) == 2 * 14
    assert count_logicals_in_region(s, []) == 0


def test_mid_plane_of_tennis1_holds_four_logicals(tennis1_lz5):
    geom, s = tennis1_lz5
    assert count_logicals_in_region(s, region_qubits(geom, ((0, 0, 2), (11, 11, 3)))) == 4


def test_count_rejects_out_of_range_region(ppp4):
    _, s = ppp4
    with pytest.raises(DimensionError):
        count_logicals_in_region(s, [s.n_qubits])


def test_min_support_width(tennis1_lz5):
    _, s = tennis1_lz5
    assert min_support_width(s, 2) == 1


def test_min_support_width_without_logicals():
    s = build_stabilizers(build_geometry((5, 5, 5), "eee;eee"))
    assert min_support_width(s, 0) is None


def test_gauge_out_without_regions_is_k(ppp4):
    _, s = ppp4
    assert gauge_out(s, []) == 14


def test_subsystem_tennis1():
    point = get_family("subsystem_tennis1").point(6)
    _, k = engine_k(point)
    assert k == 4


@pytest.mark.parametrize("L, k", [(9, 2), (10, 6), (11, 2), (12, 14), (13, 2), (14, 6), (15, 50), (16, 62)])
def test_periodic_logical_counts_up_to_sixteen(L, k, record_property):
    started = time.perf_counter()
    s = build_stabilizers(build_geometry((L, L, L), "ppp;ppp"), complete=False)
    assert num_logical_qubits(s) == k == k_ppp(L)
    record_property("seconds", round(time.perf_counter() - started, 3))


def test_defect_center():
    pair = get_family("edge_pair_bulk").make(Lx=3, delta=4, height=2).geometry()
    assert defect_center(pair, 1) == 6
    assert defect_center(pair, 2) == Fraction(11, 2)
    assert defect_center(pair, 0) is None
    screw = get_family("screw_single").point(4).geometry()
    assert (defect_center(screw, 0), defect_center(screw, 1), defect_center(screw, 2)) == (3, 4, None)
    assert defect_center(get_family("vacancy_periodic").point(5).geometry(), 2) is None


def test_width_between_an_edge_pair():
    point = get_family("edge_pair_bulk").make(Lx=6, delta=2, height=2, L=16)
    s, _ = engine_k(point)
    width = min_support_width(s, 1, defect_center(s.geometry, 1))
    assert width is not None and width >= 1
