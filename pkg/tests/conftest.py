import os

import pytest


def pytest_addoption(parser):
    parser.addoption("--skip-dim6", action="store_true", default=False,
                     help="skip the dimension 6 product check (about a minute)")


@pytest.fixture(scope="session")
def skip_dim6(request):
    return request.config.getoption("--skip-dim6") or os.environ.get("CRYSTNORM_SKIP_DIM6") == "1"
