import pytest

from comblink.link import LinkConfig


@pytest.fixture
def defaults():
    return LinkConfig()
