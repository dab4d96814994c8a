import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincat.arith import ChainRing
from chaincat.chains import (
    chain_object_new,
    direct_sum_objects,
    is_in_U_n,
    random_object,
    reembed,
    s_n,
    s_padding,
    split_chain,
    zero_object,
)
from chaincat.errors import NotIncreasing, RingMismatch
from chaincat.fmodule import FModule, submodule_from_generators

from conftest import chain

R4 = ChainRing(2, 2)


def test_chain_profiles(z4_chain, v4_chain):
    assert z4_chain.profile == (1, 1)
    assert v4_chain.profile == (1, 1)
    top = chain(R4, [1], [[1]])
    assert top.profile == (1, 0)
    assert [is_in_U_n(o) for o in (z4_chain, v4_chain, top)] == [True, True, False]


def test_decreasing_chain_reports_index():
    m = FModule(R4, [2])
    with pytest.raises(NotIncreasing) as exc:
        chain_object_new(m, [submodule_from_generators(m, [[1]]), submodule_from_generators(m, [[2]])])
    assert exc.value.index == 2


def test_split_chain():
    z2, z4 = FModule(R4, [1]), FModule(R4, [2])
    assert split_chain([z2, z4]).profile == (1, 2)
    assert split_chain([FModule(R4, []), z2]).profile == (0, 1)
    one = split_chain([z4])
    assert one.n == 1 and one.module == z4
    with pytest.raises(RingMismatch):
        split_chain([z2, FModule(ChainRing(3, 1), [1])])


def test_padding_examples(z4_chain):
    assert s_padding(z4_chain).is_zero()
    top = chain(R4, [1], [[1]])
    s = s_padding(top)
    assert s.profile == (0, 1)
    assert s.level(1).is_zero()
    assert s_padding(zero_object(R4, 2)).profile == s_n(R4, 2).profile == (1, 1)


def test_s_n():
    assert s_n(R4, 1).module.exponents == (1,)
    assert s_n(ChainRing(3, 2), 3).order == 27


def test_direct_sum_objects(z4_chain, v4_chain):
    s = direct_sum_objects(z4_chain, zero_object(R4, 2))
    assert s.profile == z4_chain.profile and s.order == z4_chain.order
    t = direct_sum_objects(z4_chain, v4_chain)
    assert t.order == 16
    assert [t.factor(i).exponents for i in (1, 2)] == [(1, 1), (1, 1)]


def test_random_object_deterministic():
    a = random_object(R4, 2, 2**6, 17)
    b = random_object(R4, 2, 2**6, 17)
    assert a == b


objects = st.builds(
    lambda ring, n, seed, force: random_object(ring, n, ring.p ** 5, seed, force_U_n=force),
    st.sampled_from([ChainRing(2, 2), ChainRing(3, 2), ChainRing(2, 3)]),
    st.integers(1, 3),
    st.integers(0, 2**30),
    st.booleans(),
)


@settings(max_examples=60, deadline=None)
@given(objects)
def test_random_objects_validate(x):
    assert x.is_uniserial_or_zero()
    total = 1
    for i in range(1, x.n + 1):
        total *= x.factor(i).order
    assert total == x.order <= x.ring.p**5
    s = s_padding(x)
    assert set(s.zero_indices()) == set(range(1, x.n + 1)) - set(x.zero_indices())
    assert is_in_U_n(direct_sum_objects(x, s))


@settings(max_examples=40, deadline=None)
@given(objects, st.integers(0, 1000))
def test_reembed_keeps_profile(x, seed):
    y = reembed(x, random.Random(seed))
    assert y.profile == x.profile
    assert [y.level(i).order for i in range(x.n + 1)] == [x.level(i).order for i in range(x.n + 1)]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=3))
def test_split_chain_factors(exps):
    mods = [FModule(R4, [a] if a else []) for a in exps]
    x = split_chain(mods)
    assert [x.factor(i).exponents for i in range(1, x.n + 1)] == [m.exponents for m in mods]
