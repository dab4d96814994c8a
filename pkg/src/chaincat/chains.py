"""Objects of the chain category: a finite module with a fixed chain of submodules.

Chain levels are 1-indexed to match the usual notation: ``obj.level(0)`` is
the zero submodule, ``obj.level(n)`` the whole module, and ``obj.factor(i)``
the quotient ``level(i) / level(i-1)`` for ``1 <= i <= n``.
"""

from __future__ import annotations

import math
import random

import numpy as np

from .arith import ChainRing, matmul_mod
from .errors import InputError, NonUniserialFactor, NotIncreasing, ParentMismatch, RingMismatch
from .fmodule import (
    FModule,
    QuotientModule,
    Submodule,
    direct_sum,
    embed_block_rows,
    summand_slices,
)


class ChainObject:
    """A module ``M`` with a chain ``0 = M(0) <= M(1) <= ... <= M(n) = M``.

    Equality is structural: same module exponents and bit-identical chain
    bases.  Isomorphism is a different question, answered in
    :mod:`chaincat.decompose`.
    """

    def __init__(self, module: FModule, chain, n: int):
        self.n = n
        self.module = module
        self.chain: tuple[Submodule, ...] = tuple(chain)
        self.factors: tuple[QuotientModule, ...] = tuple(
            QuotientModule(self.chain[i], self.chain[i - 1]) for i in range(1, n + 1)
        )
        self._key = (module, tuple(s.basis.tobytes() for s in self.chain))

    @property
    def ring(self) -> ChainRing:
        return self.module.ring

    def level(self, i: int) -> Submodule:
        return self.chain[i]

    def factor(self, i: int) -> QuotientModule:
        return self.factors[i - 1]

    @property
    def profile(self) -> tuple[int | None, ...]:
        """Per factor: 0 if zero, ``a`` if cyclic of order p^a, ``None`` otherwise."""
        out = []
        for f in self.factors:
            if f.is_zero():
                out.append(0)
            elif f.is_cyclic():
                out.append(f.exponents[0])
            else:
                out.append(None)
        return tuple(out)

    def zero_indices(self) -> list[int]:
        return [i + 1 for i, a in enumerate(self.profile) if a == 0]

    def is_uniserial_or_zero(self) -> bool:
        return all(a is not None for a in self.profile)

    def require_uniserial(self):
        for i, f in enumerate(self.factors, start=1):
            if not f.is_cyclic():
                raise NonUniserialFactor(i, f.exponents)

    def is_zero(self) -> bool:
        return self.module.rank == 0

    @property
    def order(self) -> int:
        return self.module.order

    def __eq__(self, other):
        return isinstance(other, ChainObject) and self.n == other.n and self._key == other._key

    def __hash__(self):
        return hash((self.n, self._key))

    def __repr__(self):
        levels = [s.generators().tolist() for s in self.chain[1:-1]]
        return f"ChainObject(n={self.n}, {self.module!r}, inner={levels}, profile={self.profile})"


def chain_object_new(module: FModule, inner, n: int | None = None) -> ChainObject:
    """Validate ``inner`` (the levels 1..n-1) and build the object."""
    inner = list(inner)
    if n is None:
        n = len(inner) + 1
    if n < 1:
        raise InputError("chain length n must be at least 1")
    if len(inner) != n - 1:
        raise InputError(f"expected {n - 1} inner submodules, got {len(inner)}")
    for s in inner:
        if s.parent != module:
            raise ParentMismatch("chain level is a submodule of a different module")
    chain = [module.zero_submodule(), *inner, module.full()]
    for i in range(1, n + 1):
        if not chain[i - 1].leq(chain[i]):
            raise NotIncreasing(i, f"level {i - 1} is not contained in level {i}")
    return ChainObject(module, chain, n)


def is_in_U_n(obj: ChainObject) -> bool:
    return all(a is not None and a > 0 for a in obj.profile)


def zero_object(ring: ChainRing, n: int) -> ChainObject:
    m = FModule(ring, ())
    return ChainObject(m, [m.zero_submodule()] * (n + 1), n)


def split_chain(modules) -> ChainObject:
    """``0 < M1 < M1+M2 < ... < M1+...+Mn`` inside the direct sum."""
    modules = list(modules)
    total = direct_sum(*modules)
    blocks = summand_slices(modules)
    chain = [total.zero_submodule()]
    rows = np.zeros((0, total.rank), dtype=np.int64)
    for m, blk in zip(modules, blocks):
        rows = np.vstack([rows, embed_block_rows(m.full().basis, total.rank, blk)])
        chain.append(Submodule._from_embedded(total, rows))
    return ChainObject(total, chain, len(modules))


def s_n(ring: ChainRing, n: int) -> ChainObject:
    """The object ``0 < S < S+S < ... < S^n`` with S = Z/p."""
    return split_chain([FModule(ring, (1,))] * n)


def s_padding(obj: ChainObject) -> ChainObject:
    """The object S(M): a copy of Z/p added at each index where M's factor vanishes."""
    obj.require_uniserial()
    zeros = set(obj.zero_indices())
    m = FModule(obj.ring, (1,) * len(zeros))
    eye = np.diag(m.scale) if m.rank else np.zeros((0, 0), dtype=np.int64)
    chain = [m.zero_submodule()]
    count = 0
    for i in range(1, obj.n + 1):
        if i in zeros:
            count += 1
        chain.append(Submodule._from_embedded(m, eye[:count]))
    return ChainObject(m, chain, obj.n)


def direct_sum_objects(*objs: ChainObject) -> ChainObject:
    if not objs:
        raise InputError("need at least one object")
    n, ring = objs[0].n, objs[0].ring
    for o in objs[1:]:
        if o.ring != ring:
            raise RingMismatch("objects over different rings")
        if o.n != n:
            raise InputError("objects with different chain lengths")
    if len(objs) == 1:
        return objs[0]
    total = direct_sum(*(o.module for o in objs))
    blocks = summand_slices([o.module for o in objs])
    chain = []
    for i in range(n + 1):
        rows = [embed_block_rows(o.chain[i].basis, total.rank, b) for o, b in zip(objs, blocks)]
        chain.append(Submodule._from_embedded(total, np.vstack(rows)))
    return ChainObject(total, chain, n)


# ---------------------------------------------------------------------------
# transport along module maps


def map_embedded(src: FModule, tgt: FModule, matrix: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Images of embedded elements of ``src`` under the map with image matrix ``matrix``."""
    x = src.unembed(y)
    img = matmul_mod(x, matrix, src.ring.modulus) % tgt.moduli if tgt.rank else \
        np.zeros((x.shape[0], 0), dtype=np.int64)
    return tgt.embed(img)


def transport(obj: ChainObject, matrix: np.ndarray) -> ChainObject:
    """Push the chain of ``obj`` forward along a module automorphism."""
    m = obj.module
    chain = [Submodule._from_embedded(m, map_embedded(m, m, matrix, s.basis)) for s in obj.chain]
    return ChainObject(m, chain, obj.n)


def random_module_map(src: FModule, tgt: FModule, rng: random.Random) -> np.ndarray:
    """A uniformly random R-linear map ``src -> tgt`` as an image matrix."""
    p = src.ring.p
    out = np.zeros((src.rank, tgt.rank), dtype=np.int64)
    for j, a in enumerate(src.exponents):
        for k, b in enumerate(tgt.exponents):
            step = p ** max(0, b - a)
            out[j, k] = rng.randrange(p ** min(a, b)) * step
    return out


def random_automorphism(m: FModule, rng: random.Random, tries: int = 200) -> np.ndarray:
    if m.rank == 0:
        return np.zeros((0, 0), dtype=np.int64)
    elems = m.embed(m.elements())
    for _ in range(tries):
        f = random_module_map(m, m, rng)
        img = map_embedded(m, m, f, elems)
        if np.unique(img, axis=0).shape[0] == elems.shape[0]:
            return f
    return np.eye(m.rank, dtype=np.int64)


def reembed(obj: ChainObject, rng: random.Random) -> ChainObject:
    """An isomorphic copy of ``obj`` whose chain is moved by a random automorphism."""
    return transport(obj, random_automorphism(obj.module, rng))


# ---------------------------------------------------------------------------
# random generation


def _composition_series(m: FModule, rng: random.Random) -> list[Submodule]:
    elems = m.embed(m.elements())
    q = m.ring.modulus
    series = [m.zero_submodule()]
    for _ in range(m.length):
        cur = series[-1]
        ok = cur.contains_embedded((elems * m.ring.p) % q) & ~cur.contains_embedded(elems)
        idx = np.flatnonzero(ok)
        pick = elems[idx[rng.randrange(idx.size)]]
        series.append(Submodule._from_embedded(m, np.vstack([cur.basis, pick[None, :]])))
    return series


def random_object(
    ring: ChainRing,
    n: int,
    budget: int,
    seed,
    force_U_n: bool = False,
    require_zero: bool = False,
    max_tries: int = 400,
) -> ChainObject:
    """A seeded random object of module order at most ``budget``.

    Procedure: draw a module length L (``n <= L`` when ``force_U_n``), split
    it into random cyclic exponents <= e, draw a random composition series by
    repeatedly adjoining an element whose p-multiple already lies in the
    current term, then keep ``n - 1`` cut points of that series as the chain.
    Draws whose factors are not all cyclic-or-zero are rejected and redrawn.
    ``require_zero`` asks for at least one zero factor.
    """
    if force_U_n and require_zero:
        raise InputError("force_U_n and require_zero are incompatible")
    rng = random.Random(seed) if not isinstance(seed, random.Random) else seed
    lmax = int(math.floor(math.log(budget, ring.p) + 1e-9)) if budget >= 1 else 0
    lo = n if force_U_n else 1
    if lmax < lo:
        raise InputError(f"budget {budget} too small for the requested object")
    for _ in range(max_tries):
        length = rng.randint(lo, lmax)
        parts = []
        rem = length
        while rem:
            a = rng.randint(1, min(ring.e, rem))
            parts.append(a)
            rem -= a
        m = FModule(ring, parts)
        series = _composition_series(m, rng)
        for _ in range(8):
            if force_U_n:
                cuts = sorted(rng.sample(range(1, length), n - 1))
            else:
                cuts = sorted(rng.randint(0, length) for _ in range(n - 1))
            obj = ChainObject(m, [series[0], *(series[c] for c in cuts), series[-1]], n)
            prof = obj.profile
            if any(a is None for a in prof):
                continue
            if force_U_n and 0 in prof:
                continue
            if require_zero and 0 not in prof:
                continue
            return obj
    raise InputError("could not draw an object with cyclic-or-zero factors")
