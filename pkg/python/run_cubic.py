#!/usr/bin/env python3
"""Command-line front end for the cubic-code toolkit.

This script:
1. Builds stabilizer sets from a lattice config or a named family
2. Counts logical qubits and compares them with the closed forms
3. Runs the support-width, cascade and syndrome analyses
4. Writes CSV results (one row per sweep point, ordered by parameter)

Usage:
    uv run python python/run_cubic.py analyze --config configs/ppp_L4.json
    uv run python python/run_cubic.py analyze --config configs/screw_eep.json --logicals
    uv run python python/run_cubic.py scan-k --family ppp --range 2..10 --out output/ppp.csv
    uv run python python/run_cubic.py support-scan --family edge_pair_bulk --scan delta --link height --range 2..5 --axis z
    uv run python python/run_cubic.py cascade-scan --variant e:xy --range 1..32
    uv run python python/run_cubic.py syndrome --config configs/ppp_L4.json --operator configs/single_zi.txt
    uv run python python/run_cubic.py oracle --family tennis1 --param Lz=5
    uv run python python/run_cubic.py validate
"""

import argparse
import re
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

from _utils import (
    load_lattice_config,
    log,
    parse_params,
    parse_range,
    setup_environment,
    validate_config,
    write_csv,
)
from cubic.analysis import (
    count_logicals_in_region,
    defect_center,
    logical_basis,
    min_support_width,
    num_logical_qubits,
    stabilizer_rank,
)
from cubic.closed_forms import ConfigKey, k_formula
from cubic.errors import ConfigError, CubicError
from cubic.excitations import VARIANTS, cascade, cascade_geometry, default_cascade_anchor, syndrome
from cubic.golden import run_suite
from cubic.lattice import AXES, build_stabilizers, format_word, word_from_sites
from cubic.presets import evaluate_point, get_family

SCRIPT_NAME = "run_cubic"
SCAN_COLUMNS = ["Lx", "Ly", "Lz", "n", "s", "k", "k_oracle", "match"]
SUPPORT_COLUMNS = ["delta_or_h", "min_width"]
CASCADE_COLUMNS = ["delta", "weight", "peak_energy"]

_ENTRY = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*([12])\s*,\s*([XYZ])\s*\)")
_PLAIN = re.compile(r"^(-?\d+)\s+(-?\d+)\s+(-?\d+)\s+([12])\s+([XYZ])$")


def _flag(value: Optional[bool]) -> str:
    return "" if value is None else str(value).lower()


def _run_points(fn: Callable[[Any], Dict[str, Any]], values: Sequence[Any], jobs: int, progress: bool) -> List[Dict[str, Any]]:
    """Evaluate ``fn`` on every value, in parallel when ``jobs > 1``; rows come back in input order."""
    if jobs <= 1:
        return [fn(v) for v in tqdm(values, desc=SCRIPT_NAME, disable=not progress)]
    results: Dict[int, Dict[str, Any]] = {}
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = {executor.submit(fn, v): i for i, v in enumerate(values)}
        for future in tqdm(as_completed(futures), total=len(futures), desc=SCRIPT_NAME, disable=not progress):
            results[futures[future]] = future.result()
    return [results[i] for i in range(len(values))]


def _scan_row(spec) -> Dict[str, Any]:
    family, params = spec
    result = evaluate_point(get_family(family).make(**params))
    oracle = result.oracle.value if result.oracle is not None else None
    Lx, Ly, Lz = result.point.dims
    return {
        "Lx": Lx,
        "Ly": Ly,
        "Lz": Lz,
        "n": result.n,
        "s": result.s,
        "k": result.k,
        "k_oracle": "" if oracle is None else oracle,
        "match": _flag(result.match),
    }


def _support_row(spec) -> Dict[str, Any]:
    family, params, value, axis = spec
    s = build_stabilizers(get_family(family).make(**params).geometry())
    width = min_support_width(s, axis, defect_center(s.geometry, axis))
    return {"delta_or_h": value, "min_width": "" if width is None else width}


def _scan_specs(args, scan_param: str) -> List[Any]:
    base = parse_params(args.param)
    specs = []
    for value in parse_range(args.range):
        params = dict(base)
        for name in [scan_param, *args.link]:
            params[name] = value
        specs.append((value, params))
    return specs


def _output_path(out: Optional[str], config: Dict[str, Any]) -> Optional[Path]:
    """Bare file names go under the configured output directory."""
    if not out:
        return None
    path = Path(out)
    return path if path.parent != Path(".") else Path(config["output_dir"]) / path


def _emit(rows: List[Dict[str, Any]], columns: List[str], out: Optional[str], config: Dict[str, Any]):
    path = _output_path(out, config)
    text = write_csv(rows, columns, path)
    if path:
        log(SCRIPT_NAME, f"Saved {len(rows)} rows to {path}")
    else:
        sys.stdout.write(text)


def cmd_analyze(args, config: Dict[str, Any]):
    lattice = load_lattice_config(Path(args.config))
    geom = lattice.geometry()
    log(SCRIPT_NAME, f"Building {lattice.faces} on {geom.dims} ({geom.n_qubits} qubits)...")
    s = build_stabilizers(geom)
    log(SCRIPT_NAME, f"n = {s.n_qubits}")
    log(SCRIPT_NAME, f"s = {stabilizer_rank(s)}")
    log(SCRIPT_NAME, f"k = {num_logical_qubits(s)}")
    for tag, count in s.counts_by_tag().items():
        log(SCRIPT_NAME, f"  {tag}: {count}")
    for lo, hi in lattice.regions:
        count = count_logicals_in_region(s, geom.box_qubits(lo, hi))
        log(SCRIPT_NAME, f"region {lo}..{hi}: {count} logical operators")
    if args.logicals:
        # operator-file syntax, so each line can be fed back to `syndrome`
        for i, (x_bar, z_bar) in enumerate(logical_basis(s).pairs):
            print(f"# logical {i} X")
            print(format_word(geom, x_bar))
            print(f"# logical {i} Z")
            print(format_word(geom, z_bar))


def cmd_scan_k(args, config: Dict[str, Any]):
    family = get_family(args.family)
    specs = [(args.family, params) for _, params in _scan_specs(args, args.scan or family.scan_param)]
    log(SCRIPT_NAME, f"Scanning {args.family} over {len(specs)} points...")
    rows = _run_points(_scan_row, specs, args.jobs or config["jobs"], config["progress"])
    _emit(rows, SCAN_COLUMNS, args.out, config)
    mismatches = sum(1 for r in rows if r["match"] == "false")
    if mismatches:
        log(SCRIPT_NAME, f"{mismatches} points differ from the closed form")


def cmd_support_scan(args, config: Dict[str, Any]):
    axis = AXES.index(args.axis)
    if args.config:
        s = build_stabilizers(load_lattice_config(Path(args.config)).geometry())
        width = min_support_width(s, axis, defect_center(s.geometry, axis))
        _emit([{"delta_or_h": "", "min_width": "" if width is None else width}], SUPPORT_COLUMNS, args.out, config)
        return
    if not (args.family and args.range):
        raise ConfigError("support-scan needs --config or --family with --range")
    family = get_family(args.family)
    specs = [(args.family, params, value, axis) for value, params in _scan_specs(args, args.scan or family.scan_param)]
    rows = _run_points(_support_row, specs, args.jobs or config["jobs"], config["progress"])
    _emit(rows, SUPPORT_COLUMNS, args.out, config)


def cmd_cascade_scan(args, config: Dict[str, Any]):
    deltas = parse_range(args.range)
    if not deltas:
        raise ConfigError("empty cascade range")
    geom, s = cascade_geometry(args.variant, max(deltas))
    anchor = default_cascade_anchor(geom, args.variant)
    log(SCRIPT_NAME, f"Cascading {args.variant} on {geom.dims} from {anchor}...")
    rows = []
    for delta in tqdm(deltas, desc=SCRIPT_NAME, disable=not config["progress"]):
        result = cascade(geom, s, args.variant, anchor, delta)
        rows.append({"delta": delta, "weight": result.weight, "peak_energy": result.profile.peak})
    _emit(rows, CASCADE_COLUMNS, args.out, config)


def read_operator(path: Path) -> List[tuple]:
    """Parse an operator file.

    Each line holds either ``x y z slot P`` or any number of ``(x,y,z,slot,P)``
    entries; ``#`` starts a comment.

    Raises:
        ConfigError: if the file is missing or a line does not parse
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"operator file not found: {path}")
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        plain = _PLAIN.match(body)
        found = [plain.groups()] if plain else _ENTRY.findall(body)
        if not found or (not plain and _ENTRY.sub("", body).strip()):
            raise ConfigError(f"{path}:{lineno}: expected entries like (x,y,z,slot,P)")
        entries.extend(((int(x), int(y), int(z)), int(slot), letter) for x, y, z, slot, letter in found)
    return entries


def cmd_syndrome(args, config: Dict[str, Any]):
    geom = load_lattice_config(Path(args.config)).geometry()
    s = build_stabilizers(geom)
    op = word_from_sites(geom, read_operator(Path(args.operator)))
    for excitation in syndrome(s, op):
        print(excitation)


def cmd_oracle(args, config: Dict[str, Any]):
    params = parse_params(args.param)
    value = k_formula(ConfigKey(args.family, params))
    note = " (clamped at 0)" if value.clamped else ""
    if value.defined:
        print(f"{args.family} {params}: k = {value.value}{note}")
    else:
        print(f"{args.family} {params}: k = {value.reference} + O(1)")


def cmd_validate(args, config: Dict[str, Any]):
    checks = run_suite(seed=config["seed"], progress=config["progress"], report=lambda line: log(SCRIPT_NAME, line))
    failed = [c for c in checks if not c.ok]
    log(SCRIPT_NAME, f"{len(checks)} checks: {len(checks) - len(failed)} match, {len(failed)} failed")
    for check in failed:
        log(SCRIPT_NAME, f"FAILED {check.name}: got {check.measured}, expected {check.expected}")
    if failed:
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Cubic-code stabilizer analysis")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomized checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="Print n, s, k and generator counts for one config")
    p.add_argument("--config", required=True)
    p.add_argument("--logicals", action="store_true", help="Also print a paired logical basis")
    p.set_defaults(func=cmd_analyze)

    def add_sweep(p, required=True):
        p.add_argument("--family", required=required)
        p.add_argument("--range", required=required, help="e.g. 2..10, 3..48:3 or 3,6,9")
        p.add_argument("--scan", default=None, help="Parameter to sweep (default: the family's own)")
        p.add_argument("--link", action="append", default=[], help="Other parameters set to the swept value")
        p.add_argument("--param", action="append", default=[], help="Fixed parameter NAME=INT")
        p.add_argument("--out", default=None)
        p.add_argument("--jobs", type=int, default=None, help="Worker processes (default: CUBIC_JOBS or 1)")

    p = sub.add_parser("scan-k", help="k against the closed form over a family")
    add_sweep(p)
    p.set_defaults(func=cmd_scan_k)

    p = sub.add_parser("support-scan", help="Minimum logical support width over a family or one config")
    add_sweep(p, required=False)
    p.add_argument("--config", default=None)
    p.add_argument("--axis", choices=list(AXES), default="x")
    p.set_defaults(func=cmd_support_scan)

    p = sub.add_parser("cascade-scan", help="Cascade weight and peak energy against depth")
    p.add_argument("--variant", choices=VARIANTS, default=VARIANTS[0])
    p.add_argument("--range", default="1..32")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cascade_scan)

    p = sub.add_parser("syndrome", help="List the excitations of an operator")
    p.add_argument("--config", required=True)
    p.add_argument("--operator", required=True)
    p.set_defaults(func=cmd_syndrome)

    p = sub.add_parser("oracle", help="Evaluate a closed form")
    p.add_argument("--family", required=True)
    p.add_argument("--param", action="append", default=[])
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", help="Run the golden suite")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main execution function."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = setup_environment()
        if args.seed is not None:
            config["seed"] = args.seed
        validate_config(config, ["project_root", "jobs", "seed"])
        args.func(args, config)
    except CubicError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
