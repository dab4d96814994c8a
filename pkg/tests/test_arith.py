import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincat.arith import (
    ChainRing,
    ResidueMatrix,
    howell_form,
    matmul_mod,
    solve_kernel,
    solve_particular,
    span_order,
    unit_inverse,
    valuation,
)
from chaincat.errors import NotAUnit


def rm(ring, rows, cols=None):
    return ResidueMatrix.from_rows(ring, rows, cols)


def span(ring, rows, width):
    if width == 0:
        return {()}
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, width)
    out = {tuple([0] * width)}
    for c in itertools.product(range(ring.modulus), repeat=rows.shape[0]):
        out.add(tuple(int(v) for v in np.asarray(c, dtype=np.int64) @ rows % ring.modulus))
    return out


R8 = ChainRing(2, 3)
R4 = ChainRing(2, 2)


@pytest.mark.parametrize("x,want", [(0, 3), (4, 2), (6, 1), (1, 0)])
def test_valuation(x, want):
    assert valuation(x, R8) == want


def test_unit_inverse():
    assert unit_inverse(1, R8) == 1
    assert unit_inverse(3, R8) == 3
    with pytest.raises(NotAUnit):
        unit_inverse(2, R8)


@pytest.mark.parametrize(
    "rows,want",
    [
        ([[2, 0], [0, 1]], [[2, 0], [0, 1]]),
        ([[1, 3], [0, 2]], [[1, 1], [0, 2]]),
        ([[2, 2]], [[2, 2]]),
    ],
)
def test_howell_examples(rows, want):
    assert howell_form(rm(R4, rows)).tolist() == want


def test_howell_closure_row():
    # 2*(2,1) = (0,2) starts further right, so it must appear as its own row
    h = howell_form(rm(R4, [[2, 1]])).tolist()
    assert h == [[2, 1], [0, 2]]
    assert span(R4, h, 2) == span(R4, [[2, 1]], 2)


def test_kernel_examples():
    assert solve_kernel(ResidueMatrix.identity(R4, 2)).rows == 0
    assert solve_kernel(rm(R4, [[2]])).tolist() == [[2]]
    assert solve_kernel(rm(R4, [[2, 0], [0, 1]])).tolist() == [[2, 0]]


def test_solve_examples():
    assert solve_particular(ResidueMatrix.identity(R4, 2), [3, 1]).tolist() == [3, 1]
    assert solve_particular(rm(R4, [[2]]), [1]) is None
    assert solve_particular(rm(R4, [[2]]), [2]).tolist() in ([1], [3])


rings = st.sampled_from([ChainRing(2, 2), ChainRing(3, 2), ChainRing(2, 3), ChainRing(3, 1)])


@st.composite
def matrices(draw, max_rows=3, max_cols=3):
    ring = draw(rings)
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(1, max_cols))
    data = draw(st.lists(st.lists(st.integers(0, ring.modulus - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    return rm(ring, data, c)


def _small(m):
    return m.ring.modulus ** m.rows <= 729


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_howell_same_span(m):
    if not _small(m):
        return
    h = howell_form(m)
    assert span(m.ring, h.data, m.cols) == span(m.ring, m.data, m.cols)
    assert span_order(m) == len(span(m.ring, m.data, m.cols))


@settings(max_examples=60, deadline=None)
@given(matrices(), st.randoms(use_true_random=False))
def test_howell_canonical(m, rnd):
    # random invertible row operations followed by extra redundant rows
    q = m.ring.modulus
    rows = [list(r) for r in m.data]
    for _ in range(5):
        if len(rows) < 2:
            break
        i, j = rnd.sample(range(len(rows)), 2)
        c = rnd.randrange(q)
        rows[i] = [(a + c * b) % q for a, b in zip(rows[i], rows[j])]
    if rows:
        rows.append([(3 * a) % q for a in rows[0]])
    other = rm(m.ring, rows, m.cols)
    assert howell_form(other) == howell_form(m)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_exact(m):
    if m.ring.modulus ** m.rows > 729:
        return
    k = solve_kernel(m)
    q = m.ring.modulus
    want = {x for x in itertools.product(range(q), repeat=m.rows)
            if not np.any(np.asarray(x, dtype=np.int64).reshape(1, -1) @ m.data % q)}
    assert span(m.ring, k.data, m.rows) == want


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_round_trip(m, data):
    if m.rows == 0:
        return
    x = np.array(data.draw(st.lists(st.integers(0, m.ring.modulus - 1), min_size=m.rows, max_size=m.rows)))
    b = matmul_mod(x[None], m.data, m.ring.modulus)[0]
    y = solve_particular(m, b)
    assert y is not None
    assert np.array_equal(matmul_mod(y[None], m.data, m.ring.modulus)[0], b)
