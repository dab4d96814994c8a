"""Finite modules over Z/p^e written as sums of cyclic modules.

A module with exponents ``(a_1, ..., a_r)`` is Z/p^a_1 + ... + Z/p^a_r.  Its
elements are stored in *actual* coordinates (coordinate j reduced modulo
p^a_j).  For linear algebra every element is embedded into (Z/p^e)^r by
multiplying coordinate j by p^(e - a_j); that map is an injective group
homomorphism, so a single Howell engine over Z/p^e handles every submodule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .arith import (
    ChainRing,
    _coefficients,
    _howell,
    _kernel,
    _normal_form,
    _smith,
    _span_order_exponent,
    as_rows,
    matmul_mod,
)
from .errors import ExponentOutOfRange, InputError, ParentMismatch, RingMismatch


class FModule:
    """The module Z/p^a_1 + ... + Z/p^a_r over a chain ring."""

    def __init__(self, ring: ChainRing, exponents=()):
        exps = tuple(int(a) for a in exponents)
        for a in exps:
            if not 1 <= a <= ring.e:
                raise ExponentOutOfRange(f"exponent {a} outside [1, {ring.e}]")
        self.ring = ring
        self.exponents = exps

    def __eq__(self, other):
        return (
            isinstance(other, FModule)
            and self.ring == other.ring
            and self.exponents == other.exponents
        )

    def __hash__(self):
        return hash((self.ring, self.exponents))

    def __repr__(self):
        if not self.exponents:
            return "FModule(0)"
        parts = " + ".join(f"Z/{self.ring.p}^{a}" for a in self.exponents)
        return f"FModule({parts})"

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def length(self) -> int:
        return sum(self.exponents)

    @property
    def order(self) -> int:
        return self.ring.p**self.length

    @cached_property
    def moduli(self) -> np.ndarray:
        return np.array([self.ring.p**a for a in self.exponents], dtype=np.int64)

    @cached_property
    def scale(self) -> np.ndarray:
        return np.array([self.ring.p ** (self.ring.e - a) for a in self.exponents], dtype=np.int64)

    def embed(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        return (x % self.moduli) * self.scale % self.ring.modulus

    def unembed(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64) % self.ring.modulus
        return y // self.scale

    def check_coords(self, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=np.int64)
        if x.shape != (self.rank,):
            raise InputError(f"expected {self.rank} coordinates, got {list(np.ravel(x))}")
        if np.any(x < 0) or np.any(x >= self.moduli):
            raise InputError(f"coordinates {x.tolist()} not reduced for {self!r}")
        return x

    def element(self, coords) -> "Element":
        return Element(self, tuple(int(v) for v in self.check_coords(coords)))

    def zero(self) -> "Element":
        return Element(self, (0,) * self.rank)

    def elements(self) -> np.ndarray:
        """All elements in actual coordinates, lexicographic order."""
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(tuple(int(m) for m in self.moduli)).reshape(self.rank, -1).T
        return grids.astype(np.int64)

    def full(self) -> "Submodule":
        return Submodule._from_embedded(self, np.diag(self.scale))

    def zero_submodule(self) -> "Submodule":
        return Submodule._from_embedded(self, np.zeros((0, self.rank), dtype=np.int64))


def module_new(ring: ChainRing, exponents=()) -> FModule:
    return FModule(ring, exponents)


@dataclass(frozen=True)
class Element:
    parent: FModule
    coords: tuple[int, ...]

    def _check(self, other: "Element"):
        if other.parent != self.parent:
            raise ParentMismatch("elements live in different modules")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        x = (np.array(self.coords) + np.array(other.coords)) % self.parent.moduli
        return Element(self.parent, tuple(int(v) for v in x))

    def __neg__(self) -> "Element":
        x = (-np.array(self.coords, dtype=np.int64)) % self.parent.moduli
        return Element(self.parent, tuple(int(v) for v in x))

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c: int) -> "Element":
        x = (int(c) * np.array(self.coords, dtype=np.int64)) % self.parent.moduli
        return Element(self.parent, tuple(int(v) for v in x))

    __rmul__ = scale


class Submodule:
    """A submodule stored as the Howell basis of its embedded generators.

    Two submodules of the same parent are equal exactly when their bases are
    bit-identical.
    """

    __slots__ = ("parent", "basis", "_hash")

    def __init__(self, parent: FModule, basis: np.ndarray):
        basis = as_rows(basis, parent.rank).copy()
        basis.setflags(write=False)
        self.parent = parent
        self.basis = basis
        self._hash = hash((parent, basis.shape, basis.tobytes()))

    @classmethod
    def _from_embedded(cls, parent: FModule, rows) -> "Submodule":
        rows = as_rows(rows, parent.rank)
        return cls(parent, as_rows(_howell(rows, parent.ring), parent.rank))

    def __eq__(self, other):
        return (
            isinstance(other, Submodule)
            and self.parent == other.parent
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        gens = self.generators().tolist()
        return f"Submodule({self.parent!r}, gens={gens})"

    @property
    def ring(self) -> ChainRing:
        return self.parent.ring

    @property
    def order(self) -> int:
        return self.ring.p ** _span_order_exponent(self.basis, self.ring)

    def is_zero(self) -> bool:
        return self.basis.shape[0] == 0

    def generators(self) -> np.ndarray:
        """Basis rows in actual coordinates."""
        return self.parent.unembed(self.basis)

    def _same_parent(self, other: "Submodule"):
        if other.parent != self.parent:
            raise ParentMismatch("submodules of different modules")

    def contains_embedded(self, y) -> np.ndarray:
        _, resid = _coefficients(np.atleast_2d(y), self.basis, self.ring)
        return ~np.any(resid, axis=1)

    def contains(self, x) -> bool:
        if isinstance(x, Element):
            if x.parent != self.parent:
                raise ParentMismatch("element of a different module")
            x = x.coords
        y = self.parent.embed(self.parent.check_coords(x))
        return bool(self.contains_embedded(y)[0])

    def leq(self, other: "Submodule") -> bool:
        self._same_parent(other)
        if self.is_zero():
            return True
        return bool(np.all(other.contains_embedded(self.basis)))

    def __le__(self, other):
        return self.leq(other)

    def __add__(self, other: "Submodule") -> "Submodule":
        self._same_parent(other)
        return Submodule._from_embedded(self.parent, np.vstack([self.basis, other.basis]))

    def intersect(self, other: "Submodule") -> "Submodule":
        self._same_parent(other)
        if self.is_zero() or other.is_zero():
            return self.parent.zero_submodule()
        stacked = np.vstack([self.basis, other.basis])
        kern = _kernel(stacked, self.ring)
        coeff = kern[:, : self.basis.shape[0]]
        rows = matmul_mod(coeff, self.basis, self.ring.modulus)
        return Submodule._from_embedded(self.parent, rows)

    __and__ = intersect

    def normal_form(self, y) -> np.ndarray:
        """Canonical representative of embedded vectors modulo this submodule."""
        return _normal_form(y, self.basis, self.ring)

    def elements_embedded(self) -> np.ndarray:
        ring = self.ring
        h = self.basis
        if h.shape[0] == 0:
            return np.zeros((1, self.parent.rank), dtype=np.int64)
        piv = h[np.arange(h.shape[0]), np.argmax(h != 0, axis=1)]
        ranges = [ring.modulus // int(v) for v in piv]
        coeffs = np.indices(ranges).reshape(len(ranges), -1).T
        return matmul_mod(coeffs, h, ring.modulus)

    def elements(self) -> np.ndarray:
        """Every element, actual coordinates."""
        return self.parent.unembed(self.elements_embedded())


def submodule_from_generators(m: FModule, gens) -> Submodule:
    rows = []
    for g in gens:
        if isinstance(g, Element):
            if g.parent != m:
                raise ParentMismatch("generator from a different module")
            g = g.coords
        rows.append(m.embed(m.check_coords(g)))
    if not rows:
        return m.zero_submodule()
    return Submodule._from_embedded(m, np.array(rows, dtype=np.int64))


def submodule_leq(s: Submodule, t: Submodule) -> bool:
    return s.leq(t)


def submodule_sum(s: Submodule, t: Submodule) -> Submodule:
    return s + t


def submodule_intersect(s: Submodule, t: Submodule) -> Submodule:
    return s.intersect(t)


def contains(s: Submodule, x) -> bool:
    return s.contains(x)


class QuotientModule:
    """``numerator / denominator`` with a fixed cyclic decomposition.

    ``module`` is the quotient as an :class:`FModule`; ``lifts`` holds one
    embedded preimage per cyclic generator, and :meth:`project` maps embedded
    elements of the numerator to quotient coordinates.  The generator choice
    is made once here, so induced maps on quotients are concrete matrices.
    """

    def __init__(self, numerator: Submodule, denominator: Submodule):
        if numerator.parent != denominator.parent:
            raise ParentMismatch("quotient of submodules of different modules")
        if not denominator.leq(numerator):
            raise InputError("denominator is not contained in numerator")
        self.numerator = numerator
        self.denominator = denominator
        ring = numerator.ring
        g = numerator.basis
        ng = g.shape[0]
        if ng == 0:
            exps, qsel, lifts = [], np.zeros((0, 0), dtype=np.int64), np.zeros(
                (0, numerator.parent.rank), dtype=np.int64
            )
        else:
            kern = _kernel(np.vstack([g, denominator.basis]), ring)
            relations = kern[:, :ng]
            all_exps, Q, Qinv = _smith(relations, ring, ng)
            keep = [i for i, d in enumerate(all_exps) if d > 0]
            exps = [all_exps[i] for i in keep]
            qsel = Q[:, keep]
            lifts = matmul_mod(Qinv[keep], g, ring.modulus)
        self.module = FModule(ring, exps)
        qsel.setflags(write=False)
        lifts.setflags(write=False)
        self._qsel = qsel
        self.lifts = lifts

    @property
    def exponents(self) -> tuple[int, ...]:
        return self.module.exponents

    @property
    def order(self) -> int:
        return self.module.order

    def is_zero(self) -> bool:
        return self.module.rank == 0

    def is_cyclic(self) -> bool:
        return self.module.rank <= 1

    def project(self, y) -> np.ndarray:
        """Quotient coordinates of embedded numerator elements (batched)."""
        y = np.atleast_2d(np.asarray(y, dtype=np.int64))
        ring = self.numerator.ring
        c, resid = _coefficients(y, self.numerator.basis, ring)
        if np.any(resid):
            raise InputError("element does not lie in the numerator")
        coords = matmul_mod(c, self._qsel, ring.modulus)
        return coords % self.module.moduli

    def __repr__(self):
        return f"QuotientModule(exponents={list(self.exponents)})"


def quotient(m, s: Submodule) -> QuotientModule:
    """``m / s`` where ``m`` is a module or a submodule containing ``s``."""
    num = m.full() if isinstance(m, FModule) else m
    if isinstance(m, FModule) and s.parent != m:
        raise ParentMismatch("submodule of a different module")
    return QuotientModule(num, s)


def direct_sum(*modules: FModule) -> FModule:
    if not modules:
        raise InputError("direct_sum needs at least one module")
    ring = modules[0].ring
    for m in modules[1:]:
        if m.ring != ring:
            raise RingMismatch("direct sum over different rings")
    return FModule(ring, tuple(itertools.chain.from_iterable(m.exponents for m in modules)))


def summand_slices(modules) -> list[slice]:
    """Coordinate blocks of each summand inside ``direct_sum(*modules)``."""
    out, start = [], 0
    for m in modules:
        out.append(slice(start, start + m.rank))
        start += m.rank
    return out


def embed_block_rows(rows: np.ndarray, total_rank: int, block: slice) -> np.ndarray:
    """Pad rows of one summand's coordinates with zeros elsewhere."""
    out = np.zeros((rows.shape[0], total_rank), dtype=np.int64)
    out[:, block] = rows
    return out
