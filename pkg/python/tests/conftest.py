import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from cubic.lattice import build_geometry, build_stabilizers  # noqa: E402


@pytest.fixture
def seed() -> int:
    return int(os.getenv("CUBIC_SEED") or 0)


@pytest.fixture(scope="session")
def ppp4():
    geom = build_geometry((4, 4, 4), "ppp;ppp")
    return geom, build_stabilizers(geom)


@pytest.fixture(scope="session")
def ppm_ppe6():
    geom = build_geometry((6, 6, 6), "ppm;ppe")
    return geom, build_stabilizers(geom)
