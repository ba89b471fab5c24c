import json

import pytest

import run_cubic
from cubic.golden import GoldenCheck
from run_cubic import main, read_operator
from cubic.errors import ConfigError


@pytest.fixture(autouse=True)
def quiet(monkeypatch):
    monkeypatch.setenv("CUBIC_PROGRESS", "0")
    monkeypatch.delenv("CUBIC_JOBS", raising=False)


@pytest.fixture
def config_file(tmp_path):
    def write(data, name="lattice.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


def test_analyze(config_file, capsys):
    path = config_file({"lattice": [3, 3, 3], "faces": "ppp;ppp"})
    assert main(["analyze", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "[run_cubic] n = 54" in out
    assert "[run_cubic] s = 52" in out
    assert "[run_cubic] k = 2" in out
    assert "bulkX: 27" in out


def test_analyze_reports_region_counts(config_file, capsys):
    path = config_file(
        {"lattice": [11, 11, 5], "faces": "mem;mee", "regions": [{"lo": [0, 0, 2], "hi": [11, 11, 3]}]}
    )
    assert main(["analyze", "--config", path]) == 0
    assert "region (0, 0, 2)..(11, 11, 3): 4 logical operators" in capsys.readouterr().out


def test_analyze_malformed_faces(config_file, capsys):
    path = config_file({"lattice": [3, 3, 3], "faces": "mex;mee"})
    assert main(["analyze", "--config", path]) == 2
    assert capsys.readouterr().err.startswith("Error: ")


def test_analyze_build_error(config_file):
    path = config_file(
        {
            "lattice": [6, 6, 6],
            "faces": "eee;eee",
            "defects": [{"kind": "vacancy", "flavor": "m", "origin": [0, 2, 2], "size": [2, 2, 2]}],
        }
    )
    assert main(["analyze", "--config", path]) == 3


def test_missing_config_file(tmp_path):
    assert main(["analyze", "--config", str(tmp_path / "nope.json")]) == 2


def test_scan_k_csv(tmp_path):
    out = tmp_path / "ppp.csv"
    assert main(["scan-k", "--family", "ppp", "--range", "2..4", "--out", str(out)]) == 0
    assert out.read_text() == (
        "Lx,Ly,Lz,n,s,k,k_oracle,match\n"
        "2,2,2,16,10,6,6,true\n"
        "3,3,3,54,52,2,2,true\n"
        "4,4,4,128,114,14,14,true\n"
    )


def test_scan_k_parallel_matches_serial(tmp_path):
    serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"
    assert main(["scan-k", "--family", "ppp", "--range", "2..4", "--out", str(serial)]) == 0
    assert main(["scan-k", "--family", "ppp", "--range", "2..4", "--jobs", "2", "--out", str(parallel)]) == 0
    assert serial.read_text() == parallel.read_text()


def test_scan_k_to_stdout_with_fixed_params(capsys):
    assert main(["scan-k", "--family", "tennis1", "--range", "3", "--param", "Lx=5", "--param", "Ly=5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "Lx,Ly,Lz,n,s,k,k_oracle,match"
    assert lines[-1].startswith("5,5,3,150,")


def test_scan_k_unknown_family():
    assert main(["scan-k", "--family", "klein", "--range", "2..3"]) == 2


def test_cascade_scan(capsys):
    assert main(["cascade-scan", "--variant", "e:xy", "--range", "1..4"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "delta,weight,peak_energy"
    assert [line.split(",")[1] for line in lines[1:]] == ["7", "8", "18", "25"]
    assert lines[2] == "2,8,10"
    assert lines[4] == "4,25,14"


def test_support_scan_single_config(config_file, capsys):
    path = config_file({"lattice": [11, 11, 5], "faces": "mem;mee"})
    assert main(["support-scan", "--config", path, "--axis", "z"]) == 0
    assert capsys.readouterr().out == "delta_or_h,min_width\n,1\n"


def test_support_scan_needs_a_source():
    assert main(["support-scan", "--axis", "z"]) == 2


def test_syndrome(config_file, tmp_path, capsys):
    path = config_file({"lattice": [4, 4, 4], "faces": "ppp;ppp"})
    op = tmp_path / "op.txt"
    op.write_text("# single ZI\n1 1 1 1 Z\n")
    assert main(["syndrome", "--config", path, "--operator", str(op)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert sorted(lines) == ["e (0,0,1) bulk", "e (0,1,0) bulk", "e (1,0,0) bulk", "e (1,1,1) bulk"]


def test_syndrome_clipped_operator(config_file, tmp_path):
    path = config_file({"lattice": [4, 4, 4], "faces": "eee;eee"})
    op = tmp_path / "op.txt"
    op.write_text("(9,0,0,1,X)\n")
    assert main(["syndrome", "--config", path, "--operator", str(op)]) == 3


def test_read_operator(tmp_path):
    op = tmp_path / "op.txt"
    op.write_text("(1,2,3,1,X) (0,0,0,2,Y)  # two entries\n\n4 5 6 2 Z\n")
    assert read_operator(op) == [((1, 2, 3), 1, "X"), ((0, 0, 0), 2, "Y"), ((4, 5, 6), 2, "Z")]
    op.write_text("(1,2,3,3,X)\n")
    with pytest.raises(ConfigError):
        read_operator(op)
    op.write_text("(1,2,3,1,X) junk\n")
    with pytest.raises(ConfigError):
        read_operator(op)


def test_oracle(capsys):
    assert main(["oracle", "--family", "tennis1", "--param", "Lz=5"]) == 0
    assert capsys.readouterr().out == "tennis1 {'Lz': 5}: k = 10\n"
    assert main(["oracle", "--family", "tennis2", "--param", "Lz=2"]) == 0
    assert capsys.readouterr().out == "tennis2 {'Lz': 2}: k = 0 (clamped at 0)\n"
    assert main(["oracle", "--family", "edge_pair_bulk", "--param", "Lx=5"]) == 0
    assert capsys.readouterr().out == "edge_pair_bulk {'Lx': 5}: k = 20 + O(1)\n"


def test_oracle_unknown_family():
    assert main(["oracle", "--family", "klein", "--param", "L=3"]) == 4


def test_bare_out_name_goes_to_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CUBIC_OUTPUT_DIR", str(tmp_path / "results"))
    assert main(["cascade-scan", "--range", "2", "--out", "cascade.csv"]) == 0
    assert (tmp_path / "results" / "cascade.csv").read_text() == "delta,weight,peak_energy\n2,8,10\n"


def test_analyze_logicals_feed_back_into_syndrome(config_file, tmp_path, capsys):
    path = config_file({"lattice": [3, 3, 3], "faces": "ppp;ppp"})
    assert main(["analyze", "--config", path, "--logicals"]) == 0
    lines = capsys.readouterr().out.splitlines()
    headers = [line for line in lines if line.startswith("# logical")]
    assert headers == ["# logical 0 X", "# logical 0 Z", "# logical 1 X", "# logical 1 Z"]
    for header in headers:
        op = tmp_path / "logical.txt"
        op.write_text(header + "\n" + lines[lines.index(header) + 1] + "\n")
        assert main(["syndrome", "--config", path, "--operator", str(op)]) == 0
        assert capsys.readouterr().out == ""


def test_validate_exits_1_on_a_mismatch(monkeypatch, capsys):
    checks = [GoldenCheck("k ppp (3, 3, 3)", 2, 2), GoldenCheck("k screw_single (8, 8, 4)", 0, 1, 0, "fail")]
    monkeypatch.setattr(run_cubic, "run_suite", lambda **_: checks)
    with pytest.raises(SystemExit) as info:
        main(["validate"])
    assert info.value.code == 1
    out = capsys.readouterr().out
    assert "2 checks: 1 match, 1 failed" in out
    assert "FAILED k screw_single (8, 8, 4): got 0, expected 1" in out
