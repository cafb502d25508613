from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from strata.graph import parse_graph

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def load(path) -> "object":
    return parse_graph(Path(path).read_text())


@pytest.fixture(scope="session")
def excluded_fixtures():
    return {p.stem: load(p) for p in sorted((FIXTURES / "excluded").glob("*.graph"))}


@pytest.fixture(scope="session")
def family_fixtures():
    return {int(p.stem.split("_")[1]): load(p) for p in sorted((FIXTURES / "families").glob("*.graph"))}
