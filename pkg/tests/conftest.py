import pytest

from qpfix import PreorderCtx, catalog


@pytest.fixture
def unit_space():
    return catalog.get_space("upper_interval", lo=0.0, hi=1.0)


@pytest.fixture
def unit_ctx(unit_space):
    return PreorderCtx(unit_space, catalog.get_phi("identity", bound=1.0))
