"""Bundled catalogs."""
from importlib import resources


def case_study_csv() -> str:
    """Seven vehicular vulnerabilities with their CVSS v2 base metrics."""
    return resources.files(__name__).joinpath("case_study.csv").read_text(encoding="utf-8")


def case_study_path():
    return resources.files(__name__).joinpath("case_study.csv")
