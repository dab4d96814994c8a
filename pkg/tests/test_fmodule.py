import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincat.arith import ChainRing
from chaincat.errors import ParentMismatch, RingMismatch
from chaincat.fmodule import (
    FModule,
    direct_sum,
    quotient,
    submodule_from_generators,
    submodule_intersect,
    submodule_leq,
    submodule_sum,
)

R4 = ChainRing(2, 2)


def elems(s):
    return {tuple(int(v) for v in x) for x in s.elements()}


def test_module_basics():
    assert FModule(R4, []).order == 1
    assert FModule(R4, [2]).order == 4
    m = FModule(R4, [2, 1])
    assert (m.element([1, 1]) + m.element([3, 1])).coords == (0, 0)


def test_submodule_examples():
    z4 = FModule(R4, [2])
    assert submodule_from_generators(z4, []).is_zero()
    assert elems(submodule_from_generators(z4, [[2]])) == {(0,), (2,)}
    m = FModule(R4, [2, 1])
    assert submodule_from_generators(m, [[2, 1], [2, 0]]) == submodule_from_generators(m, [[0, 1], [2, 0]])


def test_lattice_examples():
    z4 = FModule(R4, [2])
    s = submodule_from_generators(z4, [[2]])
    assert submodule_leq(s, s)
    assert submodule_sum(s, s) == s
    v = FModule(R4, [1, 1])
    a = submodule_from_generators(v, [[1, 0]])
    b = submodule_from_generators(v, [[1, 1]])
    assert submodule_intersect(a, b).is_zero()
    with pytest.raises(ParentMismatch):
        submodule_sum(s, a)


def test_quotient_examples():
    z4 = FModule(R4, [2])
    assert quotient(z4, z4.full()).is_zero()
    assert quotient(z4, submodule_from_generators(z4, [[2]])).exponents == (1,)
    m = FModule(R4, [2, 1])
    assert quotient(m, submodule_from_generators(m, [[1, 0]])).exponents == (1,)


def test_direct_sum_examples():
    z4, z2 = FModule(R4, [2]), FModule(R4, [1])
    assert direct_sum(z4, FModule(R4, [])) == z4
    assert direct_sum(z4, z2).exponents == (2, 1)
    with pytest.raises(RingMismatch):
        direct_sum(z4, FModule(ChainRing(3, 1), [1]))


modules = st.builds(
    lambda ring, exps: FModule(ring, [min(a, ring.e) for a in exps]),
    st.sampled_from([ChainRing(2, 2), ChainRing(3, 1), ChainRing(2, 3)]),
    st.lists(st.integers(1, 3), min_size=1, max_size=3),
).filter(lambda m: m.order <= 64)


@st.composite
def module_and_gens(draw, count=2):
    m = draw(modules)
    gens = [
        draw(st.lists(st.lists(st.integers(0, 63), min_size=m.rank, max_size=m.rank), max_size=count))
        for _ in range(3)
    ]
    gens = [[[c % int(q) for c, q in zip(g, m.moduli)] for g in gs] for gs in gens]
    return m, gens


@settings(max_examples=80, deadline=None)
@given(module_and_gens(), st.randoms(use_true_random=False))
def test_canonical_under_regeneration(mg, rnd):
    m, (gens, _, _) = mg
    s = submodule_from_generators(m, gens)
    # random combinations of the generators span the same set once the originals are added back
    mix = []
    for _ in range(2):
        coeffs = [rnd.randrange(8) for _ in gens]
        mix.append([sum(c * g[k] for c, g in zip(coeffs, gens)) % int(m.moduli[k]) for k in range(m.rank)])
    assert submodule_from_generators(m, mix + gens[::-1]) == s
    # the element set is exactly the span
    span = set()
    for coeffs in itertools.product(range(m.ring.modulus), repeat=len(gens)):
        v = np.zeros(m.rank, dtype=np.int64)
        for c, g in zip(coeffs, gens):
            v = v + c * np.asarray(g, dtype=np.int64)
        span.add(tuple(int(x) for x in v % m.moduli))
    assert elems(s) == (span or {tuple([0] * m.rank)})
    assert s.order == len(elems(s))


@settings(max_examples=80, deadline=None)
@given(module_and_gens())
def test_lattice_laws(mg):
    m, (g1, g2, g3) = mg
    s, t, u = (submodule_from_generators(m, g) for g in (g1, g2, g3))
    assert elems(s + t) >= elems(s) | elems(t)
    assert elems(s.intersect(t)) == elems(s) & elems(t)
    lhs = s.intersect(t + u)
    rhs = s.intersect(t) + s.intersect(u)
    assert rhs.leq(lhs)
    # modular law
    su = s + u
    assert su.intersect(t + u) == su.intersect(t) + u


@settings(max_examples=60, deadline=None)
@given(module_and_gens())
def test_quotient_order_and_projection(mg):
    m, (g1, g2, _) = mg
    s = submodule_from_generators(m, g1)
    big = s + submodule_from_generators(m, g2)
    q = quotient(big, s)
    assert q.order * s.order == big.order
    # projection is additive and kills the denominator
    ys = big.elements_embedded()
    img = q.project(ys)
    assert not np.any(q.project(s.elements_embedded()))
    assert len({tuple(r) for r in img.tolist()}) == q.order
