import pytest

from wellpoised.numctx import make_context


@pytest.fixture(scope="session")
def ctx():
    return make_context(128, 1e-20)
