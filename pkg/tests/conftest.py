import pytest

from proserve.cli import preset_scenario


@pytest.fixture(scope="session")
def setting_a():
    return preset_scenario("paper-setting-A")


@pytest.fixture(scope="session")
def setting_b():
    return preset_scenario("paper-setting-B")
