import pytest
from hypothesis import settings

from vbdss.kb import load_kb

settings.register_profile("ci", deadline=None, max_examples=60)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def kb():
    return load_kb()
