from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from toroidal_k.fan import Cone, Fan
from toroidal_k.weyl import build_root_datum

settings.register_profile(
    "repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

GALLERY = Path(__file__).resolve().parents[1] / "gallery" / "problems"

ACCEPTANCE_LINES: list[str] = []


def fan(*cones, rank=None) -> Fan:
    n = rank if rank is not None else len(cones[0][0])
    return Fan(n, [Cone([tuple(r) for r in c], n) for c in cones])


def gallery_problem(name: str) -> dict:
    return json.loads((GALLERY / f"{name}.json").read_text())


@pytest.fixture(scope="session")
def a1():
    return build_root_datum("A1")


@pytest.fixture(scope="session")
def a2():
    return build_root_datum("A2")


@pytest.fixture(scope="session")
def b2():
    return build_root_datum("B2")


@pytest.fixture(scope="session")
def a1a1():
    return build_root_datum("A1xA1")


@pytest.fixture(scope="session")
def a1_chamber():
    return fan([(1,)])


@pytest.fixture(scope="session")
def a2_chamber():
    return fan([(2, 1), (1, 2)])


@pytest.fixture(scope="session")
def a1a1_split():
    return fan([(1, 0), (1, 1)], [(1, 1), (0, 1)])


@pytest.fixture(scope="session")
def a2_split():
    return fan([(2, 1), (1, 1)], [(1, 1), (1, 2)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
