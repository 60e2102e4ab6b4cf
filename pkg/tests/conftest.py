from __future__ import annotations

import pytest


def pytest_addoption(parser):
    parser.addoption("--nightly", action="store_true", default=False, help="run the slow oracle suites")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--nightly"):
        return
    skip = pytest.mark.skip(reason="slow oracle suite; pass --nightly")
    for item in items:
        if "nightly" in item.keywords:
            item.add_marker(skip)
