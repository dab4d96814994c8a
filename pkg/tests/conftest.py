import pytest

from chaincat import ChainRing, FModule, chain_object_new, split_chain, submodule_from_generators


def chain(ring, exps, *levels):
    m = FModule(ring, exps)
    return chain_object_new(m, [submodule_from_generators(m, g) for g in levels])


@pytest.fixture
def r4():
    return ChainRing(2, 2)


@pytest.fixture
def z4_chain(r4):
    """Z/4 with 0 < <2> < Z/4."""
    return chain(r4, [2], [[2]])


@pytest.fixture
def v4_chain(r4):
    """Z/2 + Z/2 with 0 < <(1,0)> < everything."""
    return chain(r4, [1, 1], [[1, 0]])


@pytest.fixture
def mixed_pair(r4):
    return split_chain([FModule(r4, [1]), FModule(r4, [2])]), split_chain([FModule(r4, [2]), FModule(r4, [1])])
