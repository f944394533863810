import pytest

from helpers import fig1_hierarchy, fig1_signature


@pytest.fixture
def fig1():
    return fig1_hierarchy()


@pytest.fixture
def sig(fig1):
    return fig1_signature()
