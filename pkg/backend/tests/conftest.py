"""Shared fixtures."""

import json
import sys
from pathlib import Path

import pytest

BACKEND_DIR = Path(__file__).resolve().parents[1]
if str(BACKEND_DIR) not in sys.path:
    sys.path.insert(0, str(BACKEND_DIR))

from syncsmith.core.zoo import make_constant, make_flood_max, make_mod_p_max  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def modmax2():
    return make_mod_p_max(2)


@pytest.fixture
def modmax3():
    return make_mod_p_max(3)


@pytest.fixture
def constant2():
    return make_constant(2)


@pytest.fixture
def floodmax():
    return make_flood_max()


@pytest.fixture
def fsm_path():
    return FIXTURES / "modmax2_set.json"


@pytest.fixture
def fsm_document(fsm_path):
    return json.loads(fsm_path.read_text(encoding="utf-8"))
