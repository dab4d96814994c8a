"""Chain-preserving morphisms, their induced factor maps, and the i-th classes.

A morphism ``f: M -> N`` of the underlying modules is stored as its *image
matrix* ``F`` (shape ``rank(M) x rank(N)``): row ``j`` holds the actual
coordinates of ``f(g_j)`` for the j-th cyclic generator of ``M``.  Elements
act as row vectors, ``f(x) = x @ F`` reduced per target coordinate, and
composition ``g o f`` has image matrix ``F @ G``.

For linear algebra the same data is flattened into "z-coordinates"
``z[j, k] = F[j, k] * p^(e - b_k)``, which turns Hom_R(M, N) into a
submodule of (Z/p^e)^(rank(M) * rank(N)).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .arith import ChainRing, _coefficients, as_rows, _howell, _kernel, _pivot_cols, _span_order_exponent, matmul_mod, valuations
from .chains import ChainObject
from .errors import InputError, NonUniserialFactor, RingMismatch

CLASS_KINDS = ("m", "e")


def _check_pair(m: ChainObject, n: ChainObject):
    if m.ring != n.ring:
        raise RingMismatch("objects over different rings")
    if m.n != n.n:
        raise InputError(f"chain lengths differ ({m.n} vs {n.n})")


def _zscale(m: ChainObject, n: ChainObject) -> np.ndarray:
    ring = m.ring
    b = np.array(n.module.exponents, dtype=np.int64)
    return np.broadcast_to(ring.p ** (ring.e - b), (m.module.rank, n.module.rank)).astype(np.int64)


def compose_batch(fs: np.ndarray, gs: np.ndarray, target_moduli: np.ndarray, q: int) -> np.ndarray:
    """Image matrices of ``g o f`` for stacked ``f`` (first) and ``g`` (second)."""
    if fs.shape[-1] == 0 or gs.shape[-1] == 0:
        shape = np.broadcast_shapes(fs.shape[:-2], gs.shape[:-2]) + (fs.shape[-2], gs.shape[-1])
        return np.zeros(shape, dtype=np.int64)
    return matmul_mod(fs, gs, q) % target_moduli


class HomElement:
    """One morphism of the chain category."""

    def __init__(self, source: ChainObject, target: ChainObject, matrix):
        mat = np.array(matrix, dtype=np.int64).reshape(source.module.rank, target.module.rank)
        if target.module.rank:
            mat %= target.module.moduli
        mat.setflags(write=False)
        self.source = source
        self.target = target
        self.matrix = mat

    @classmethod
    def identity(cls, obj: ChainObject) -> "HomElement":
        return cls(obj, obj, np.eye(obj.module.rank, dtype=np.int64))

    @classmethod
    def zero(cls, m: ChainObject, n: ChainObject) -> "HomElement":
        return cls(m, n, np.zeros((m.module.rank, n.module.rank), dtype=np.int64))

    @property
    def params(self) -> np.ndarray:
        """Entries as elements of Z/p^min(a_j, b_k)."""
        p = self.source.ring.p
        a = np.array(self.source.module.exponents, dtype=np.int64)[:, None]
        b = np.array(self.target.module.exponents, dtype=np.int64)[None, :]
        return self.matrix // p ** np.maximum(0, b - a)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if self.target.module.rank == 0:
            return np.zeros(x.shape[:-1] + (0,), dtype=np.int64)
        return matmul_mod(x, self.matrix, self.source.ring.modulus) % self.target.module.moduli

    def apply_embedded(self, y) -> np.ndarray:
        x = self.source.module.unembed(y)
        return self.target.module.embed(self.apply(x))

    def then(self, g: "HomElement") -> "HomElement":
        """``g o self``."""
        if g.source != self.target:
            raise InputError("morphisms are not composable")
        mat = compose_batch(self.matrix, g.matrix, g.target.module.moduli, self.source.ring.modulus)
        return HomElement(self.source, g.target, mat)

    def is_chain_preserving(self) -> bool:
        for i in range(1, self.source.n):
            img = self.apply_embedded(self.source.level(i).basis)
            if img.shape[0] and not np.all(self.target.level(i).contains_embedded(img)):
                return False
        return True

    def induced(self, i: int) -> np.ndarray:
        """Matrix of the induced map on the i-th factors, in quotient coordinates."""
        return induced_batch(self.source, self.target, self.matrix[None], i)[0]

    def __eq__(self, other):
        return (
            isinstance(other, HomElement)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.matrix.tobytes()))

    def __repr__(self):
        return f"HomElement({self.matrix.tolist()})"


@functools.lru_cache(maxsize=8)
def _inverse_table(p: int) -> np.ndarray:
    if p > 1 << 20:
        raise InputError(f"prime {p} too large for batched rank")
    table = np.zeros(p, dtype=np.int64)
    for v in range(1, p):
        table[v] = pow(v, -1, p)
    return table


def _rank_mod_p_batch(a: np.ndarray, p: int) -> np.ndarray:
    """Ranks over F_p of a stack of matrices (Gauss-Jordan without row swaps)."""
    dtype = np.int32 if p < 1 << 15 else np.int64
    a = (np.asarray(a, dtype=np.int64) % p).astype(dtype)
    bsz, rows, cols = a.shape
    used = np.zeros((bsz, rows), dtype=bool)
    ar = np.arange(bsz)
    inv_table = _inverse_table(p).astype(dtype)
    for col in range(cols):
        column = a[:, :, col]
        cand = (column != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        prow = a[ar, piv]
        prow = prow * inv_table[prow[:, col]][:, None] % p
        factors = np.where(has[:, None], column, 0)
        factors[ar, piv] = 0
        a -= factors[:, :, None] * prow[:, None, :]
        a %= p
        used[ar[has], piv[has]] = True
    return used.sum(axis=1)


def injective_batch(src, tgt, fs: np.ndarray) -> np.ndarray:
    """Which module maps ``src -> tgt`` (image matrices) are injective.

    A map of finite p-groups is injective iff it is injective on the socle,
    so this is an F_p rank test on the socle restriction.
    """
    fs = np.asarray(fs, dtype=np.int64)
    if src.rank == 0:
        return np.ones(fs.shape[0], dtype=bool)
    if tgt.rank == 0:
        return np.zeros(fs.shape[0], dtype=bool)
    return _rank_mod_p_batch(socle_matrices(src, tgt, fs), src.ring.p) == src.rank


def socle_matrices(src, tgt, fs: np.ndarray) -> np.ndarray:
    """Matrices over F_p of the restrictions of module maps to the socles.

    The map ``f -> socle matrix`` is additive, and ``f`` is injective iff its
    socle matrix has full row rank.
    """
    fs = np.asarray(fs, dtype=np.int64)
    p = src.ring.p
    a = np.array(src.exponents, dtype=np.int64)[:, None]
    b = np.array(tgt.exponents, dtype=np.int64)[None, :]
    return (fs * p ** (a - 1)) % p**b // p ** (b - 1)


def compose(g: HomElement, f: HomElement) -> HomElement:
    return f.then(g)


def induced_batch(m: ChainObject, n: ChainObject, fs: np.ndarray, i: int) -> np.ndarray:
    """Induced factor maps for a stack of image matrices, shape (B, t_U, t_V)."""
    u, v = m.factor(i), n.factor(i)
    bsz = fs.shape[0]
    tu, tv = u.module.rank, v.module.rank
    if tu == 0 or tv == 0:
        return np.zeros((bsz, tu, tv), dtype=np.int64)
    x = m.module.unembed(u.lifts)
    imgs = matmul_mod(x[None], fs, m.ring.modulus) % n.module.moduli
    emb = n.module.embed(as_rows(imgs.reshape(-1, n.module.rank), n.module.rank))
    return v.project(emb).reshape(bsz, tu, tv)


def _cyclic_exponents(m: ChainObject, n: ChainObject, i: int) -> tuple[int, int]:
    a, b = m.profile[i - 1], n.profile[i - 1]
    if a is None:
        raise NonUniserialFactor(i, m.factor(i).exponents)
    if b is None:
        raise NonUniserialFactor(i, n.factor(i).exponents)
    return a, b


def induced_param_valuations(m: ChainObject, n: ChainObject, fs: np.ndarray, i: int) -> np.ndarray:
    """For cyclic factors Z/p^a -> Z/p^b: valuation of each induced map as an
    element of Hom(Z/p^a, Z/p^b) = Z/p^min(a, b) (zero maps get min(a, b))."""
    a, b = _cyclic_exponents(m, n, i)
    if a == 0 or b == 0:
        return np.zeros(fs.shape[0], dtype=np.int64)
    c = induced_batch(m, n, fs, i)[:, 0, 0]
    shift = max(0, b - a)
    vals = valuations(c, m.ring, cap=b)
    vals = np.minimum(vals, b)
    return np.minimum(vals - shift, min(a, b))


class HomGroup:
    """Hom(M, N) in the chain category as a subgroup of the ambient module maps."""

    def __init__(self, source: ChainObject, target: ChainObject, basis: np.ndarray):
        self.source = source
        self.target = target
        basis = as_rows(basis, source.module.rank * target.module.rank).copy()
        basis.setflags(write=False)
        self.basis = basis
        ring = source.ring
        self._ranges = (
            [ring.modulus // int(v) for v in basis[np.arange(basis.shape[0]), _pivot_cols(basis)]]
            if basis.shape[0]
            else []
        )
        self._zscale = _zscale(source, target).reshape(-1)

    @property
    def ring(self) -> ChainRing:
        return self.source.ring

    @property
    def order(self) -> int:
        return self.ring.p ** _span_order_exponent(self.basis, self.ring)

    def _to_matrices(self, z: np.ndarray) -> np.ndarray:
        rm, rn = self.source.module.rank, self.target.module.rank
        return (z // self._zscale).reshape(-1, rm, rn) if self._zscale.size else \
            np.zeros((z.shape[0], rm, rn), dtype=np.int64)

    def to_z(self, fs: np.ndarray) -> np.ndarray:
        fs = np.asarray(fs, dtype=np.int64)
        return (fs.reshape(fs.shape[0], self._zscale.size) * self._zscale) % self.ring.modulus

    def generator_matrices(self) -> np.ndarray:
        return self._to_matrices(self.basis)

    def generators(self) -> list[HomElement]:
        return [HomElement(self.source, self.target, f) for f in self.generator_matrices()]

    def coefficient_ranges(self) -> list[int]:
        return list(self._ranges)

    def element_matrices(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Image matrices of elements ``start..stop-1`` in enumeration order.

        Element ``idx`` is ``sum_t c_t * basis_t`` where ``c`` is the
        mixed-radix expansion of ``idx`` (last basis row varies fastest).
        """
        total = self.order
        stop = total if stop is None else min(stop, total)
        idx = np.arange(start, stop, dtype=np.int64)
        if not self._ranges:
            return self._to_matrices(np.zeros((idx.size, self.basis.shape[1]), dtype=np.int64))
        coeffs = np.empty((idx.size, len(self._ranges)), dtype=np.int64)
        rest = idx.copy()
        for t in range(len(self._ranges) - 1, -1, -1):
            coeffs[:, t] = rest % self._ranges[t]
            rest //= self._ranges[t]
        z = matmul_mod(coeffs, self.basis, self.ring.modulus)
        return self._to_matrices(z)

    def iter_chunks(self, chunk: int = 1 << 15) -> Iterator[tuple[int, np.ndarray]]:
        total = self.order
        for start in range(0, total, chunk):
            yield start, self.element_matrices(start, start + chunk)

    def elements(self) -> list[HomElement]:
        return [HomElement(self.source, self.target, f) for f in self.element_matrices()]

    def index_of(self, fs: np.ndarray) -> np.ndarray:
        """Enumeration indices of a stack of image matrices (-1 for non-members)."""
        fs = np.asarray(fs, dtype=np.int64)
        z = self.to_z(fs)
        if not self._ranges:
            return np.where(np.any(z, axis=1), -1, 0)
        c, resid = _coefficients(z, self.basis, self.ring)
        idx = np.zeros(z.shape[0], dtype=np.int64)
        for t, r in enumerate(self._ranges):
            idx = idx * r + c[:, t]
        return np.where(np.any(resid, axis=1), -1, idx)

    def contains(self, f: HomElement | np.ndarray) -> bool:
        mat = f.matrix if isinstance(f, HomElement) else np.asarray(f)
        return bool(self.index_of(mat[None])[0] >= 0)


def hom_chain(m: ChainObject, n: ChainObject) -> HomGroup:
    """All module maps ``f: M -> N`` with ``f(M(i)) <= N(i)`` for every i.

    Unknowns are free parameters ``u`` with ``z = u * p^(e - min(a_j, b_k))``;
    each basis row ``v`` of ``M(i)`` contributes the linear condition
    ``f(v) = d_v @ basis(N(i))`` for auxiliary coefficients ``d_v``.  The
    kernel of the stacked system, projected to ``u``, is the hom group.
    """
    _check_pair(m, n)
    ring = m.ring
    q, p, e = ring.modulus, ring.p, ring.e
    rm, rn = m.module.rank, n.module.rank
    nparam = rm * rn
    if nparam == 0:
        return HomGroup(m, n, np.zeros((0, nparam), dtype=np.int64))
    a = np.array(m.module.exponents)[:, None]
    b = np.array(n.module.exponents)[None, :]
    uscale = (p ** (e - np.minimum(a, b))).astype(np.int64).reshape(-1)
    col_blocks = []
    aux_blocks = []
    for i in range(1, m.n):
        src = m.level(i)
        if src.is_zero():
            continue
        tgt_basis = n.level(i).basis
        for v in src.generators():
            # coefficient of u[j, k] in coordinate k of f(v) is v_j * p^(e - min(a_j, b_k))
            blk = np.zeros((nparam, rn), dtype=np.int64)
            for j in range(rm):
                for k in range(rn):
                    blk[j * rn + k, k] = (int(v[j]) * int(uscale[j * rn + k])) % q
            col_blocks.append(blk)
            aux_blocks.append(tgt_basis)
    if not col_blocks:
        z = np.diag(uscale)
        return HomGroup(m, n, _howell(z, ring))
    naux = sum(bb.shape[0] for bb in aux_blocks)
    ncols = rn * len(col_blocks)
    system = np.zeros((nparam + naux, ncols), dtype=np.int64)
    system[:nparam] = np.hstack(col_blocks)
    row = nparam
    for t, bb in enumerate(aux_blocks):
        system[row : row + bb.shape[0], t * rn : (t + 1) * rn] = bb
        row += bb.shape[0]
    kern = _kernel(system, ring)
    u = kern[:, :nparam] if kern.shape[0] else np.zeros((0, nparam), dtype=np.int64)
    z = (u * uscale[None, :]) % q
    return HomGroup(m, n, _howell(z, ring))


def induced_map(f: HomElement, i: int) -> np.ndarray:
    return f.induced(i)


@dataclass(frozen=True)
class InducedImage:
    """Image of Hom(M, N) -> Hom(U_i, V_i) for cyclic-or-zero factors.

    ``ambient_exponent`` is min(a, b) (0 when a factor vanishes); the image is
    ``p^image_valuation`` times the ambient cyclic group.
    """

    index: int
    ambient_exponent: int
    image_valuation: int

    @property
    def full(self) -> bool:
        return self.image_valuation == 0


def induced_image(h: HomGroup, i: int) -> InducedImage:
    a, b = _cyclic_exponents(h.source, h.target, i)
    if a == 0 or b == 0:
        return InducedImage(i, 0, 0)
    amb = min(a, b)
    gens = h.generator_matrices()
    if gens.shape[0] == 0:
        return InducedImage(i, amb, amb)
    vals = induced_param_valuations(h.source, h.target, gens, i)
    return InducedImage(i, amb, int(vals.min()))


def _injective_from_image(a: int, b: int, img: InducedImage) -> bool:
    if a == 0:
        return True
    if b == 0:
        return False
    return a <= b and img.full


def _surjective_from_image(a: int, b: int, img: InducedImage) -> bool:
    if b == 0:
        return True
    if a == 0:
        return False
    return a >= b and img.full


def exists_injective_induced(m: ChainObject, n: ChainObject, i: int, hom: HomGroup | None = None,
                             method: str = "closed") -> bool:
    """Is there a chain morphism M -> N whose i-th induced map is injective?"""
    if method == "brute":
        from .brute import brute_exists_induced

        return brute_exists_induced(m, n, i, "m")
    a, b = _cyclic_exponents(m, n, i)
    if a == 0 or b == 0:
        return _injective_from_image(a, b, InducedImage(i, 0, 0))
    hom = hom_chain(m, n) if hom is None else hom
    return _injective_from_image(a, b, induced_image(hom, i))


def exists_surjective_induced(m: ChainObject, n: ChainObject, i: int, hom: HomGroup | None = None,
                              method: str = "closed") -> bool:
    if method == "brute":
        from .brute import brute_exists_induced

        return brute_exists_induced(m, n, i, "e")
    a, b = _cyclic_exponents(m, n, i)
    if a == 0 or b == 0:
        return _surjective_from_image(a, b, InducedImage(i, 0, 0))
    hom = hom_chain(m, n) if hom is None else hom
    return _surjective_from_image(a, b, induced_image(hom, i))


def _check_kind(a: str):
    if a not in CLASS_KINDS:
        raise InputError(f"class kind must be 'm' or 'e', got {a!r}")


def same_class(m: ChainObject, n: ChainObject, i: int, a: str, method: str = "closed") -> bool:
    """``[M]_{i,a} == [N]_{i,a}``: kind 'm' (monogeny) or 'e' (epigeny)."""
    _check_kind(a)
    _check_pair(m, n)
    test = exists_injective_induced if a == "m" else exists_surjective_induced
    return test(m, n, i, method=method) and test(n, m, i, method=method)


class ClassTable:
    """Pairwise class relations among a list of objects, each hom group computed once."""

    def __init__(self, objs):
        self.objs = list(objs)
        if not self.objs:
            self.n = 0
            self._rel = np.zeros((0, 2, 0, 0), dtype=bool)
            return
        self.n = self.objs[0].n
        for o in self.objs:
            o.require_uniserial()
            _check_pair(self.objs[0], o)
        cnt = len(self.objs)
        inj = np.zeros((self.n, cnt, cnt), dtype=bool)
        srj = np.zeros((self.n, cnt, cnt), dtype=bool)
        for x in range(cnt):
            for y in range(cnt):
                mx, my = self.objs[x], self.objs[y]
                hom = None
                for i in range(1, self.n + 1):
                    a, b = mx.profile[i - 1], my.profile[i - 1]
                    if a and b:
                        if hom is None:
                            hom = hom_chain(mx, my) if x != y else None
                        img = induced_image(hom, i) if hom is not None else InducedImage(i, min(a, b), 0)
                    else:
                        img = InducedImage(i, 0, 0)
                    inj[i - 1, x, y] = _injective_from_image(a, b, img)
                    srj[i - 1, x, y] = _surjective_from_image(a, b, img)
        rel = np.zeros((self.n, 2, cnt, cnt), dtype=bool)
        rel[:, 0] = inj & np.transpose(inj, (0, 2, 1))
        rel[:, 1] = srj & np.transpose(srj, (0, 2, 1))
        self._rel = rel

    def same(self, x: int, y: int, i: int, a: str) -> bool:
        return bool(self._rel[i - 1, CLASS_KINDS.index(a), x, y])

    def partition(self, i: int, a: str, subset=None) -> list[list[int]]:
        idx = list(range(len(self.objs))) if subset is None else sorted(subset)
        return _partition(idx, lambda x, y: self.same(x, y, i, a))


def _partition(indices, same) -> list[list[int]]:
    parent = {x: x for x in indices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for pos, x in enumerate(indices):
        for y in indices[pos + 1 :]:
            rx, ry = find(x), find(y)
            if rx != ry and same(x, y):
                parent[max(rx, ry)] = min(rx, ry)
    groups: dict[int, list[int]] = {}
    for x in indices:
        groups.setdefault(find(x), []).append(x)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def class_partition(objs, i: int, a: str) -> list[list[int]]:
    """Partition of the indices of ``objs`` into ``[.]_{i,a}`` classes."""
    _check_kind(a)
    return ClassTable(objs).partition(i, a)
