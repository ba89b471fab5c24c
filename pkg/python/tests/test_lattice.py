import pytest

from cubic import lattice
from cubic.analysis import num_logical_qubits
from cubic.errors import BuildError, ClippedSupportError, CommutationError, ConfigError, PreconditionError
from cubic.lattice import (
    BoundarySpec,
    EdgeDislocation,
    Generator,
    Screw,
    StabilizerSet,
    Vacancy,
    abc_flavor,
    build_geometry,
    build_stabilizers,
    CORNERS,
    charge_color,
    derive_local_stabilizers,
    format_word,
    parse_defect,
    parse_face,
    screw_line_word,
    translate_operator,
    word_from_sites,
)


class TestBoundarySpec:
    def test_parse_and_str(self):
        spec = BoundarySpec.parse("(PEM;PEE)")
        assert spec.positive == ("p", "e", "m")
        assert spec.negative == ("p", "e", "e")
        assert str(BoundarySpec.parse("ppm;ppe")) == "ppm;ppe"

    @pytest.mark.parametrize("text", ["mex;mee", "ppp", "pp;ppp", "pee;eee", "epe;eee"])
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            BoundarySpec.parse(text)

    def test_symmetries(self):
        spec = BoundarySpec.parse("pem;pem")
        assert str(spec.rotated()) == "mpe;mpe"
        assert str(spec.transposed()) == "epm;epm"
        assert str(spec.dual()) == "pme;pme"
        assert spec.dual().dual() == spec

    @pytest.mark.parametrize("faces", ["mee;mee", "mem;mee", "pem;pem", "ppm;ppe", "eee;mem", "pmm;pem"])
    def test_k_invariant_under_symmetries(self, faces):
        spec = BoundarySpec.parse(faces)
        k = num_logical_qubits(build_stabilizers(build_geometry((4, 4, 4), spec)))
        for image in (spec.rotated(), spec.transposed(), spec.dual()):
            assert num_logical_qubits(build_stabilizers(build_geometry((4, 4, 4), image))) == k


def test_periodic_lattice_has_one_generator_pair_per_cell(ppp4):
    geom, s = ppp4
    assert geom.n_qubits == 128
    assert s.counts_by_tag() == {"bulkX": 64, "bulkZ": 64}
    assert all(len(g.qubits) == 8 for g in s.generators)
    assert s.anticommuting_pairs() == []


def test_open_faces_truncate_generators():
    geom = build_geometry((4, 4, 4), "eee;eee")
    s = build_stabilizers(geom)
    counts = s.counts_by_tag()
    assert counts["bulkX"] == 27
    assert counts["bulkZ"] == 27
    # e faces keep no truncated X terms
    assert not any(g.pauli == "X" and g.kind != "bulk" and not g.completed for g in s.generators)
    assert any(g.pauli == "Z" and g.kind == "plaquette" for g in s.generators)


def test_derive_local_stabilizers_matches_completion():
    geom = build_geometry((4, 4, 4), "eee;eee")
    partial = build_stabilizers(geom, complete=False)
    full = build_stabilizers(geom)
    corner = (-1, -1, -1)
    window = [tuple(a + d for a, d in zip(corner, offset)) for offset in CORNERS]
    derived = derive_local_stabilizers(geom, partial, window, paulis="X")
    completed = [g for g in full.generators if g.completed and g.pauli == "X" and g.anchor == corner]
    assert {frozenset(w.support()) for w in derived} == {frozenset(g.qubits) for g in completed}
    assert all(w.is_x_type for w in derived)
    assert derive_local_stabilizers(geom, full, window) == []


def test_bad_dims_and_preset():
    with pytest.raises(ConfigError):
        build_geometry((1, 4, 4), "ppp;ppp")
    with pytest.raises(ConfigError):
        build_geometry((4, 4, 4), "ppp;ppp", preset="hexagonal")
    with pytest.raises(ConfigError):
        build_geometry((4, 4, 4), "eem;eee", preset="triangular")


def test_vacancy_removes_sites():
    geom = build_geometry((8, 8, 5), "eep;eep", [Vacancy("m", (3, 3, 0), (2, 2, 5))])
    assert len(geom.coords) == 8 * 8 * 5 - 20
    assert geom.resolve((3, 3, 2)).reasons == ("m",)


def test_edge_dislocation_removes_strip():
    edge = EdgeDislocation(0, 1, (4, 3), 3, "mm")
    geom = build_geometry((4, 8, 8), "pmm;pmm", [edge])
    assert len(geom.coords) == 4 * 8 * 8 - 12
    assert geom.resolve((0, 4, 4)).removed
    assert geom.resolve((0, 4, 6)).site is not None


@pytest.mark.parametrize(
    "defects",
    [
        [Vacancy("m", (0, 2, 2), (2, 2, 2))],
        [Vacancy("m", (1, 1, 1), (2, 2, 2)), Vacancy("e", (2, 2, 2), (2, 2, 2))],
        [Screw(0, (3, 3), "R")],
        [EdgeDislocation(0, 1, (1, 3), 2, "mm")],
    ],
)
def test_misplaced_defects(defects):
    with pytest.raises(BuildError):
        build_geometry((6, 6, 6), "eee;eee" if len(defects) == 1 else "ppp;ppp", defects)


def test_screw_cells_are_slanted():
    geom = build_geometry((8, 8, 4), "eep;eep", [Screw(2, (3, 3), "R")])
    s = build_stabilizers(geom)
    assert s.counts_by_tag().get("slantedX", 0) > 0


def test_check_commutation_names_the_pair():
    geom = build_geometry((2, 2, 2), "ppp;ppp")
    s = StabilizerSet(geom, [Generator("X", (0,), "bulk", (0, 0, 0)), Generator("Z", (0,), "bulk", (1, 0, 0))])
    assert s.anticommuting_pairs() == [(0, 1)]
    with pytest.raises(CommutationError) as info:
        s.check_commutation()
    assert info.value.pair == (0, 1)
    assert info.value.anchors == ((0, 0, 0), (1, 0, 0))
    assert info.value.exit_code == 3


class TestParseDefect:
    def test_vacancy(self):
        d = parse_defect({"kind": "vacancy", "flavor": "⟨m⟩", "origin": [3, 3, 0], "size": [2, 2, 6]})
        assert d == Vacancy("m", (3, 3, 0), (2, 2, 6))

    def test_edge(self):
        d = parse_defect(
            {"kind": "edge_dislocation", "line_axis": "x", "normal_axis": "y", "position": [4, 3], "height": 3,
             "twist_flavors": "<mm>"}
        )
        assert d == EdgeDislocation(0, 1, (4, 3), 3, "mm")

    def test_screw_defaults_to_right_handed(self):
        assert parse_defect({"kind": "screw", "line_axis": "z", "position": [3, 3]}) == Screw(2, (3, 3), "R")

    @pytest.mark.parametrize(
        "record",
        [
            {"kind": "crack"},
            {"kind": "vacancy", "flavor": "m", "origin": [1, 1, 1]},
            {"kind": "vacancy", "flavor": "q", "origin": [1, 1, 1], "size": [1, 1, 1]},
            {"kind": "vacancy", "flavor": "m", "origin": [1, 1], "size": [1, 1, 1]},
            {"kind": "screw", "line_axis": "w", "position": [3, 3]},
            {"kind": "screw", "line_axis": "z", "position": [3, 3], "handedness": "up"},
            {"kind": "screw", "line_axis": "z", "position": [3, 3], "color": "red"},
            "vacancy",
        ],
    )
    def test_rejects(self, record):
        with pytest.raises(ConfigError):
            parse_defect(record)


def test_faces_and_colors(ppm_ppe6):
    geom, _ = ppm_ppe6
    assert parse_face("+z") == (2, 1)
    assert parse_face("-x") == (0, -1)
    with pytest.raises(ConfigError):
        parse_face("z")
    assert abc_flavor(geom.boundary, "+z") == "m"
    assert abc_flavor(geom.boundary, "-z") == "e"
    with pytest.raises(PreconditionError):
        abc_flavor(geom.boundary, "+x")
    assert [charge_color(geom, "+z", (u, 0)) for u in range(4)] == ["A", "B", "C", "A"]


def test_word_from_sites_and_format():
    geom = build_geometry((4, 4, 4), "eee;eee")
    op = word_from_sites(geom, [((1, 2, 3), 2, "X"), ((1, 2, 3), 2, "Z"), ((0, 0, 0), 1, "Z")])
    assert op.weight() == 2
    assert format_word(geom, op) == "(0,0,0,1,Z) (1,2,3,2,Y)"
    with pytest.raises(ClippedSupportError) as info:
        word_from_sites(geom, [((4, 0, 0), 1, "X")])
    assert info.value.sites == [(4, 0, 0)]


def test_translate_operator_wraps_periodic_axes(ppp4):
    geom, _ = ppp4
    op = word_from_sites(geom, [((3, 0, 0), 1, "Z")])
    moved = translate_operator(geom, op, (1, 2, 0))
    assert format_word(geom, moved) == "(0,2,0,1,Z)"


def test_translate_operator_clips_open_axes():
    geom = build_geometry((4, 4, 4), "eee;eee")
    op = word_from_sites(geom, [((3, 0, 0), 1, "Z")])
    with pytest.raises(ClippedSupportError):
        translate_operator(geom, op, (1, 0, 0))


@pytest.mark.parametrize("template", ["CX", "CZ"])
@pytest.mark.parametrize("corner", CORNERS)
@pytest.mark.parametrize("slot", [0, 1])
def test_single_bit_template_corruption_is_caught(monkeypatch, template, corner, slot):
    table = lattice.CX_TEMPLATE if template == "CX" else lattice.CZ_TEMPLATE
    bits = list(table.get(corner, (0, 0)))
    bits[slot] ^= 1
    monkeypatch.setitem(table, corner, tuple(bits))
    geom = build_geometry((5, 5, 5), "ppp;ppp")
    with pytest.raises(CommutationError):
        build_stabilizers(geom, complete=False)


class TestTwistWindows:
    @pytest.fixture(scope="class")
    def bare_twist(self):
        geom = build_geometry((6, 12, 12), "pee;pee", [EdgeDislocation(0, 1, (6, 5), 2, "mm")])
        return geom, build_stabilizers(geom, install_twists=False, complete=False, check=False)

    @staticmethod
    def prism(x0, row):
        return [(x, y, z) for x in (x0, x0 + 1) for y in (5, 6, 7) for z in (row, row + 1)]

    def test_each_prism_holds_one_X_and_one_Z_word(self, bare_twist):
        geom, partial = bare_twist
        for x0 in range(6):
            words = derive_local_stabilizers(geom, partial, self.prism(x0, 4))
            assert [w.is_x_type for w in words] == [True, False]
            assert [w.weight() for w in words] == [11, 11]
        assert len(derive_local_stabilizers(geom, partial, self.prism(2, 6))) == 2

    def test_adjacent_T_X_and_T_Z_anticommute(self, bare_twist):
        geom, partial = bare_twist
        t_x = derive_local_stabilizers(geom, partial, self.prism(2, 4), paulis="X")[0]
        t_z = [derive_local_stabilizers(geom, partial, self.prism(x0, 4), paulis="Z")[0] for x0 in range(5)]
        assert [t_x.commutes(w) for w in t_z] == [True, False, True, False, True]

    def test_installed_twists_commute(self):
        geom = build_geometry((6, 12, 12), "pee;pee", [EdgeDislocation(0, 1, (6, 5), 2, "mm")])
        s = build_stabilizers(geom)
        assert s.counts_by_tag().get("twistX", 0) > 0
        assert s.anticommuting_pairs() == []


class TestScrewLine:
    @pytest.mark.parametrize("Lz", [4, 5, 6])
    def test_no_local_words_along_the_line(self, Lz):
        geom = build_geometry((8, 8, Lz), "eep;eep", [Screw(2, (3, 4), "R")])
        s = build_stabilizers(geom)
        for height in (2, 3):
            window = [(x, y, z) for x in range(2, 5) for y in range(3, 6) for z in range(height)]
            assert derive_local_stabilizers(geom, s, window) == []

    def test_full_column_carries_the_line_logicals(self):
        geom = build_geometry((8, 8, 6), "eep;eep", [Screw(2, (3, 4), "R")])
        s = build_stabilizers(geom)
        column = [(x, y, z) for x in range(2, 5) for y in range(3, 6) for z in range(6)]
        assert derive_local_stabilizers(geom, s, column)

    def test_line_word_is_installed_once_per_screw(self):
        geom = build_geometry((8, 8, 6), "eep;eep", [Screw(2, (3, 4), "R")])
        s = build_stabilizers(geom)
        assert s.counts_by_tag()["lineX"] == 1
        line = next(g for g in s.generators if g.kind == "line")
        assert line.qubits == screw_line_word(geom, geom.defects[0])
        assert line.anchor == (3, 4, 0)

    def test_dropped_column_sits_on_the_cut(self):
        geom = build_geometry((8, 8, 6), "eep;eep", [Screw(2, (3, 4), "R")])
        assert all(geom.cell_dropped((3, 4, z)) for z in range(6))
        assert not geom.cell_dropped((4, 4, 0))
        assert not geom.cell_dropped((3, 5, 0))

    def test_handedness_changes_the_generators(self):
        def supports(hands):
            screws = [Screw(2, (3 + 3 * i, 4), h) for i, h in enumerate(hands)]
            geom = build_geometry((11, 8, 6), "eep;eep", screws)
            return {frozenset(g.qubits) for g in build_stabilizers(geom).generators}

        assert supports("LR") != supports("RR")
