from importlib import resources

import pytest
from hypothesis import settings

from idiolect.actions import load_default_catalog
from idiolect.grammar import parse_grammar

# reproducible property tests: no wall-clock deadlines, no run-to-run variation
settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def default_grammar():
    text = resources.files("idiolect.data").joinpath("default.grammar").read_text("utf-8")
    doc = parse_grammar(text, source="default")
    assert not doc.errors
    return doc


@pytest.fixture()
def catalog():
    return load_default_catalog()
