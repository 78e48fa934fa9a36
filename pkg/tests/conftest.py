from pathlib import Path

import pytest

from honeycar import ingest
from honeycar.data import case_study_csv
from honeycar.model import GameVulnerability, HoneypotProfile
from honeycar.solver import GameParams, make_instance
from honeycar.model import PenaltyMode, Variant

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def worked_csv_path():
    return FIXTURES / "worked_example.csv"


@pytest.fixture
def case_study_catalog():
    return ingest.parse_catalog_csv(case_study_csv(), name="case_study.csv")


@pytest.fixture
def worked_offered():
    text = (FIXTURES / "worked_example.csv").read_text()
    return ingest.game_vulnerabilities(ingest.parse_catalog_csv(text).records)


def instance_from_times(times, variant=Variant.A, mode=PenaltyMode.LITERAL, beta=0.5, T=4.0):
    offered = [GameVulnerability(f"V{i}", float(t), t / 2.0, t / 2.0) for i, t in enumerate(times)]
    return make_instance(offered, GameParams(T, beta, variant, mode))


@pytest.fixture
def lih():
    return HoneypotProfile.lih()


@pytest.fixture
def hih():
    return HoneypotProfile.hih()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
