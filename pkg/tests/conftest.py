import json
from importlib import resources

import pytest
from hypothesis import settings

settings.register_profile("ensvol", max_examples=60, deadline=None)
settings.load_profile("ensvol")

FIXTURES = resources.files("ensvol.data").joinpath("fixtures")


@pytest.fixture(scope="session")
def anchors():
    """Closed-form values frozen by tools/make_anchors.py (mpmath, 30 digits)."""
    return json.loads(FIXTURES.joinpath("anchors.json").read_text())


@pytest.fixture(scope="session")
def fixture_path():
    def get(name):
        return str(FIXTURES.joinpath(name))
    return get
