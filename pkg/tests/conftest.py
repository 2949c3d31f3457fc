import pytest

from eabss.service import load_builtin_script


@pytest.fixture(scope="session")
def museum_doc():
    return load_builtin_script()


@pytest.fixture(scope="session")
def museum_source():
    from importlib import resources

    return resources.files("eabss.data").joinpath(
        "adaptive_architecture.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def museum_fixture_path():
    from importlib import resources

    return str(resources.files("eabss.data") / "museum_run.jsonl")
