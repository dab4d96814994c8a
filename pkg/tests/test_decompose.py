import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincat.arith import ChainRing
from chaincat.chains import direct_sum_objects, random_object, reembed, s_padding
from chaincat.decompose import (
    decide_iso,
    decide_iso_general,
    extract_digraph,
    inverse,
    oracle_iso,
    swap_search,
    verify_iso,
)
from chaincat.errors import CapExceeded, NotInUn, ZeroObjectInInput
from chaincat.homs import CLASS_KINDS, HomElement, same_class
from chaincat.sweep import gen_decide_instance, item_rng

from conftest import chain

R4 = ChainRing(2, 2)


def test_decide_examples(z4_chain, v4_chain, mixed_pair):
    a, b = mixed_pair
    rep = decide_iso([a, b], [b, a])
    assert rep.iso
    for phi in rep.bijections.values():
        assert sorted(phi) == [1, 2] and sorted(phi.values()) == [1, 2]
    rep = decide_iso([z4_chain], [v4_chain])
    assert not rep.iso
    assert (rep.failure_witness["i"], rep.failure_witness["a"]) == (1, "m")
    same = decide_iso([z4_chain], [z4_chain])
    assert same.iso and all(phi == {1: 1} for phi in same.bijections.values())


def test_decide_rejects_zero_factors():
    top = chain(R4, [1], [[1]])
    with pytest.raises(NotInUn):
        decide_iso([top], [top])
    with pytest.raises(ZeroObjectInInput):
        decide_iso_general([chain(R4, [], [])], [top])


def test_general_padding_example():
    m = chain(R4, [1], [[1]])
    s = s_padding(m)
    rep = decide_iso_general([direct_sum_objects(m, s)], [m, s])
    assert rep.iso and (rep.r, rep.s) == (1, 2)
    assert rep.index_sets[1] == ([1], [1])
    assert rep.index_sets[2] == ([1], [2])
    assert oracle_iso([direct_sum_objects(m, s)], [m, s]) is not None
    assert decide_iso_general([m], [m]).iso


def test_general_zero_pattern_mismatch():
    top = chain(R4, [1], [[1]])
    bottom = chain(R4, [1], [[0]])
    assert top.profile == (1, 0) and bottom.profile == (0, 1)
    rep = decide_iso_general([top], [bottom])
    assert not rep.iso
    assert oracle_iso([top], [bottom]) is None


def test_oracle_examples(z4_chain, v4_chain, mixed_pair):
    w = oracle_iso([z4_chain], [z4_chain])
    assert w is not None and verify_iso(w)
    assert oracle_iso([z4_chain], [v4_chain]) is None
    a, b = mixed_pair
    f = oracle_iso([a, b], [b, a])
    assert f is not None and verify_iso(f)
    g = inverse(f)
    assert np.array_equal(f.then(g).matrix % f.source.module.moduli, np.eye(f.source.module.rank, dtype=np.int64))


def test_oracle_methods_agree(mixed_pair):
    a, b = mixed_pair
    assert oracle_iso([a, b], [b, a], method="full") is not None
    assert oracle_iso([a, a], [b, b], method="full") is None
    assert oracle_iso([a, a], [b, b]) is None


def test_oracle_cap(mixed_pair):
    a, b = mixed_pair
    with pytest.raises(CapExceeded):
        oracle_iso([a, b], [b, a], cap=4)


def test_verify_iso(v4_chain):
    assert verify_iso(HomElement.identity(v4_chain))
    assert not verify_iso(HomElement.zero(v4_chain, v4_chain))


def test_digraph_identity_and_swap(mixed_pair, z4_chain):
    a, b = mixed_pair
    f = HomElement.identity(direct_sum_objects(a, b))
    for i in (1, 2):
        for k in CLASS_KINDS:
            dg = extract_digraph(f, [a, b], [a, b], i, k)
            assert dg.hall_ok and dg.permutation == {1: 1, 2: 2}
    aa = direct_sum_objects(z4_chain, z4_chain)
    swap = HomElement(aa, aa, np.array([[0, 1], [1, 0]]))
    dg = extract_digraph(swap, [z4_chain, z4_chain], [z4_chain, z4_chain], 1, "m")
    assert dg.permutation == {1: 2, 2: 1}


def test_swap_search_reports_exchanges():
    found = swap_search(R4, 2, 6, seed=0)
    assert found
    for fd in found:
        a, b, c, d = fd.objects
        assert fd.decide_iso and fd.pairwise_non_iso
        assert fd.oracle_iso in (True, None)
        assert decide_iso([a, b], [c, d]).iso


def _instance(seed, family=None):
    rng = item_rng(seed, 0)
    ring = rng.choice([ChainRing(2, 2), ChainRing(2, 3), ChainRing(3, 1), ChainRing(3, 2)])
    n = rng.choice([2, 3])
    return gen_decide_instance(rng, ring, n, 6 if ring.p == 2 else 4, family)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_decide_agrees_with_oracle(seed):
    ms, ns, _ = _instance(seed)
    try:
        w = oracle_iso(ms, ns, cap=1 << 16)
    except CapExceeded:
        return
    assert decide_iso(ms, ns).iso == (w is not None)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_permutation_invariance(seed, rnd):
    ms, _, _ = _instance(seed)
    perm = list(ms)
    rnd.shuffle(perm)
    rep = decide_iso(ms, perm)
    assert rep.iso
    for (i, a), phi in rep.bijections.items():
        for k, v in phi.items():
            assert same_class(ms[k - 1], perm[v - 1], i, a)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_single_object_classes(seed):
    rng = random.Random(seed)
    ring = rng.choice([ChainRing(2, 2), ChainRing(3, 2)])
    x = random_object(ring, 2, ring.p**4, rng.randrange(1 << 30), force_U_n=True)
    y = reembed(x, rng) if rng.random() < 0.5 else random_object(ring, 2, ring.p**4, rng.randrange(1 << 30), force_U_n=True)
    classes = all(same_class(x, y, i, a) for i in (1, 2) for a in CLASS_KINDS)
    assert decide_iso([x], [y]).iso == classes


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_digraph_on_planted(seed):
    ms, ns, _ = _instance(seed, family=random.Random(seed).choice(["planted", "exchange"]))
    if len(ms) != len(ns):
        return
    try:
        f = oracle_iso(ms, ns, cap=1 << 16)
    except CapExceeded:
        return
    assert f is not None
    for i in range(1, ms[0].n + 1):
        for a in CLASS_KINDS:
            dg = extract_digraph(f, ms, ns, i, a)
            assert dg.hall_ok is not False
            assert sorted(dg.permutation.values()) == list(range(1, len(ms) + 1))
