"""Exhaustive reference implementations used as test oracles.

Nothing here shares code paths with the linear-algebra deciders beyond the
module primitives themselves: ambient homs are listed parameter by
parameter, chain preservation is checked on every element of every level,
and injectivity or surjectivity of induced maps is checked on element sets.
"""

from __future__ import annotations

import itertools

import numpy as np

from .chains import ChainObject, map_embedded
from .errors import CapExceeded

DEFAULT_CAP = 1 << 14


def ambient_hom_count(m: ChainObject, n: ChainObject) -> int:
    p = m.ring.p
    total = 1
    for a in m.module.exponents:
        for b in n.module.exponents:
            total *= p ** min(a, b)
    return total


def ambient_homs(m: ChainObject, n: ChainObject, cap: int = DEFAULT_CAP):
    """Every R-linear map ``M -> N`` as an image matrix."""
    size = ambient_hom_count(m, n)
    if size > cap:
        raise CapExceeded("ambient hom enumeration", size, cap)
    p = m.ring.p
    rm, rn = m.module.rank, n.module.rank
    choices = []
    for a in m.module.exponents:
        for b in n.module.exponents:
            step = p ** max(0, b - a)
            choices.append([c * step for c in range(p ** min(a, b))])
    for vals in itertools.product(*choices):
        yield np.array(vals, dtype=np.int64).reshape(rm, rn)


def _preserves(m: ChainObject, n: ChainObject, f: np.ndarray, level_elems) -> bool:
    for i in range(1, m.n):
        elems = level_elems[i]
        if elems.shape[0] == 0:
            continue
        img = map_embedded(m.module, n.module, f, elems)
        if not np.all(n.level(i).contains_embedded(img)):
            return False
    return True


def brute_hom_chain(m: ChainObject, n: ChainObject, cap: int = DEFAULT_CAP) -> list[np.ndarray]:
    """All chain-preserving maps, found by filtering the ambient homs."""
    level_elems = [s.elements_embedded() for s in m.chain]
    return [f for f in ambient_homs(m, n, cap) if _preserves(m, n, f, level_elems)]


def _factor_image_count(m: ChainObject, n: ChainObject, f: np.ndarray, i: int) -> tuple[int, int, int]:
    """(|U_i|, |f_i(U_i)|, |V_i|) computed on cosets."""
    lo_m, hi_m = m.level(i - 1), m.level(i)
    lo_n = n.level(i - 1)
    elems = hi_m.elements_embedded()
    cosets_u = {tuple(r) for r in lo_m.normal_form(elems)}
    img = map_embedded(m.module, n.module, f, elems)
    cosets_img = {tuple(r) for r in lo_n.normal_form(img)} if img.shape[0] else {()}
    size_v = n.level(i).order // lo_n.order
    return len(cosets_u), len(cosets_img), size_v


def brute_exists_induced(m: ChainObject, n: ChainObject, i: int, kind: str, cap: int = DEFAULT_CAP) -> bool:
    """Search Hom(M, N) for f whose i-th induced map is injective ('m') or surjective ('e')."""
    for f in brute_hom_chain(m, n, cap):
        size_u, size_img, size_v = _factor_image_count(m, n, f, i)
        # f_i injective iff |image| = |U_i|, surjective iff |image| = |V_i|
        if kind == "m" and size_img == size_u:
            return True
        if kind == "e" and size_img == size_v:
            return True
    return False


def brute_same_class(m: ChainObject, n: ChainObject, i: int, kind: str, cap: int = DEFAULT_CAP) -> bool:
    return brute_exists_induced(m, n, i, kind, cap) and brute_exists_induced(n, m, i, kind, cap)
