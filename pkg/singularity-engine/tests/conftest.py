import os
import sys

# --------------------------------------
# ADD PROJECT ROOT TO PYTHON PATH
# --------------------------------------
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.abspath(os.path.join(BASE_DIR, ".."))

if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

os.environ.setdefault("LAB_QUIET", "1")

import pytest

from geometry.domain import Domain


@pytest.fixture
def ball():
    return Domain.ball(2, 1.0)


@pytest.fixture
def half_disk():
    return Domain.half_disk(2, 1.0)


@pytest.fixture
def out_dir(tmp_path):
    return str(tmp_path / "results")
