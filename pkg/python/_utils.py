"""Shared utilities for the cubic-code scripts.

This module provides environment setup, logging and config parsing used by
run_cubic.py and the tests.
"""

import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from dotenv import load_dotenv

from cubic.errors import ConfigError
from cubic.lattice import DefectSpec, LatticeGeometry, build_geometry, parse_defect

CONFIG_KEYS = {"lattice", "faces", "defects", "preset", "regions"}
REGION_KEYS = {"lo", "hi"}


def setup_environment() -> Dict[str, Any]:
    """Load environment configuration from .env.local or .env file.

    Returns:
        Dict containing all configuration values
    """
    script_dir = Path(__file__).resolve().parent
    project_root = script_dir.parent

    # Try .env.local first, fall back to .env
    dotenv_path = project_root / ".env.local"
    if dotenv_path.exists():
        load_dotenv(dotenv_path, override=False)
    else:
        load_dotenv(project_root / ".env", override=False)

    return {
        "project_root": project_root,
        "output_dir": Path(os.getenv("CUBIC_OUTPUT_DIR") or project_root / "output"),
        "jobs": _env_int("CUBIC_JOBS", 1),
        "seed": _env_int("CUBIC_SEED", 0),
        "progress": os.getenv("CUBIC_PROGRESS", "1").strip().lower() not in ("0", "false", "no", "off"),
    }


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"environment variable {name} must be an integer (got {raw!r})") from None


def validate_config(config: Dict[str, Any], required_keys: List[str]):
    """Validate that required configuration keys are present.

    Args:
        config: Configuration dictionary
        required_keys: List of required key names to check

    Raises:
        SystemExit if any required keys are missing
    """
    missing = [key for key in required_keys if config.get(key) is None]
    if missing:
        print(f"Error: Missing required configuration values: {', '.join(missing)}", file=sys.stderr)
        sys.exit(ConfigError.exit_code)


def log(script_name: str, *args):
    """Print formatted log message with script name prefix.

    Args:
        script_name: Name of the script (e.g., "run_cubic")
        *args: Arguments to print
    """
    print(f"[{script_name}]", *args)


@dataclass
class LatticeConfig:
    """Parsed contents of a lattice JSON config."""

    dims: Tuple[int, int, int]
    faces: str
    defects: Tuple[DefectSpec, ...] = ()
    preset: Optional[str] = None
    regions: List[Tuple[Tuple[int, int, int], Tuple[int, int, int]]] = field(default_factory=list)

    def geometry(self) -> LatticeGeometry:
        return build_geometry(self.dims, self.faces, self.defects, self.preset)


def _dims(value: Any) -> Tuple[int, int, int]:
    if isinstance(value, dict):
        unknown = set(value) - {"Lx", "Ly", "Lz"}
        if unknown:
            raise ConfigError(f"unknown lattice keys: {sorted(unknown)}")
        try:
            value = [value["Lx"], value["Ly"], value["Lz"]]
        except KeyError as e:
            raise ConfigError(f"lattice is missing {e.args[0]!r}") from e
    if not isinstance(value, (list, tuple)) or len(value) != 3 or not all(isinstance(v, int) for v in value):
        raise ConfigError(f"lattice must be {{Lx, Ly, Lz}} or a list of three integers (got {value!r})")
    return tuple(value)


def _region(record: Any) -> Tuple[Tuple[int, int, int], Tuple[int, int, int]]:
    if not isinstance(record, dict):
        raise ConfigError(f"region must be an object with lo and hi (got {record!r})")
    unknown = set(record) - REGION_KEYS
    if unknown:
        raise ConfigError(f"unknown region keys: {sorted(unknown)}")
    try:
        lo, hi = record["lo"], record["hi"]
    except KeyError as e:
        raise ConfigError(f"region is missing {e.args[0]!r}") from e
    for corner in (lo, hi):
        if not isinstance(corner, list) or len(corner) != 3 or not all(isinstance(v, int) for v in corner):
            raise ConfigError(f"region corners must be lists of three integers (got {corner!r})")
    return tuple(lo), tuple(hi)


def parse_lattice_config(data: Any) -> LatticeConfig:
    """Validate a decoded config object.

    Raises:
        ConfigError: on unknown keys, missing keys or ill-typed values
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("lattice", "faces"):
        if key not in data:
            raise ConfigError(f"config is missing {key!r}")
    if not isinstance(data["faces"], str):
        raise ConfigError(f"faces must be a string like 'ppp;ppp' (got {data['faces']!r})")
    defects = data.get("defects", [])
    if not isinstance(defects, list):
        raise ConfigError("defects must be a list")
    regions = data.get("regions", [])
    if not isinstance(regions, list):
        raise ConfigError("regions must be a list")
    return LatticeConfig(
        dims=_dims(data["lattice"]),
        faces=data["faces"],
        defects=tuple(parse_defect(d) for d in defects),
        preset=data.get("preset"),
        regions=[_region(r) for r in regions],
    )


def load_lattice_config(path: Path) -> LatticeConfig:
    """Read and validate a lattice JSON config file.

    Raises:
        ConfigError: if the file is missing, not JSON, or fails validation
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    return parse_lattice_config(data)


def parse_range(text: str) -> List[int]:
    """Parse ``"2..10"``, ``"3,6,9"`` or ``"3..48:3"`` into a list of ints.

    Raises:
        ConfigError: on malformed input
    """
    try:
        if ".." in text:
            span, _, step = text.partition(":")
            lo, hi = (int(v) for v in span.split(".."))
            return list(range(lo, hi + 1, int(step) if step else 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"range must look like '2..10', '3..48:3' or '3,6,9' (got {text!r})") from None


def parse_params(items: Sequence[str]) -> Dict[str, int]:
    """Parse ``["Lx=11", "Ly=11"]`` into a dict.

    Raises:
        ConfigError: on malformed items
    """
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"parameter must look like NAME=INT (got {item!r})")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise ConfigError(f"parameter {key} must be an integer (got {value!r})") from None
    return params


def write_csv(rows: List[Dict[str, Any]], columns: List[str], output: Optional[Path]) -> str:
    """Write rows as CSV to ``output`` (or return the text when None).

    Args:
        rows: Records keyed by column name
        columns: Column order; also the header line
        output: Target file, or None

    Returns:
        The CSV text
    """
    df = pd.DataFrame(rows, columns=columns)
    text = df.to_csv(index=False, lineterminator="\n")
    if output is not None:
        output = Path(output)
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")
    return text
