"""The endomorphism ring of an object as an explicit finite ring.

Elements are indexed by their position in the enumeration of the hom group
(see :meth:`HomGroup.element_matrices`), so ideals are boolean masks over
``range(order)``.  Ring multiplication is composition: ``mul(x, y)`` is
``x o y`` (apply ``y`` first).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .arith import _howell, _normal_form, _span_order_exponent, valuations
from .chains import ChainObject, direct_sum_objects, is_in_U_n
from .errors import (
    CapExceeded,
    InputError,
    NonCommutativeQuotient,
    NonUniserialFactor,
    NotInUn,
    NotMaximal,
    NotProper,
    TheoremViolation,
)
from .homs import CLASS_KINDS, HomGroup, compose_batch, hom_chain, induced_batch, injective_batch, same_class

DEFAULT_ORDER_CAP = 1 << 16
DEFAULT_PAIR_CAP = 1 << 26
CHUNK = 1 << 14


class EmptyIdealWarning(UserWarning):
    """Raised as a warning when an ideal is requested at a zero factor."""


class EndoRing:
    """End(M) in the chain category, fully materialized."""

    def __init__(self, obj: ChainObject, cap: int = DEFAULT_ORDER_CAP, hom: HomGroup | None = None):
        self.object = obj
        self.hom = hom_chain(obj, obj) if hom is None else hom
        self.order = self.hom.order
        if self.order > cap:
            raise CapExceeded("endomorphism ring", self.order, cap)
        self.mats = self.hom.element_matrices()
        self.mats.setflags(write=False)
        self._moduli = obj.module.moduli
        eye = np.eye(obj.module.rank, dtype=np.int64)
        self.one = int(self.hom.index_of(eye[None])[0])
        self.zero = 0
        self._units = None
        self._radical = None
        self._report = None

    @property
    def ring(self):
        return self.object.ring

    def __len__(self):
        return self.order

    # -- arithmetic on indices -------------------------------------------------

    def _lookup_tables(self):
        # exact lookup: integer hash, binary search, then full comparison
        z = self.hom.to_z(self.mats)
        w = np.random.default_rng(0x5EED).integers(1, 1 << 20, size=z.shape[1], dtype=np.int64)
        h = z @ w if z.shape[1] else np.zeros(self.order, dtype=np.int64)
        order = np.argsort(h, kind="stable")
        self._z, self._w, self._h_sorted, self._h_order = z, w, h[order], order

    def index_of(self, mats: np.ndarray) -> np.ndarray:
        if not hasattr(self, "_z"):
            self._lookup_tables()
        mats = np.asarray(mats, dtype=np.int64)
        z = self.hom.to_z(mats)
        h = z @ self._w if z.shape[1] else np.zeros(z.shape[0], dtype=np.int64)
        pos = np.minimum(np.searchsorted(self._h_sorted, h), self.order - 1)
        idx = self._h_order[pos]
        miss = np.flatnonzero(np.any(self._z[idx] != z, axis=1))
        if miss.size:
            idx[miss] = self.hom.index_of(mats[miss])
        if np.any(idx < 0):
            raise TheoremViolation("product left the endomorphism ring")
        return idx

    def compose_mats(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Image matrices of ``x o y`` (broadcast over leading axes)."""
        return compose_batch(ys, xs, self._moduli, self.ring.modulus)

    def mul(self, x: int, y: int) -> int:
        return int(self.index_of(self.compose_mats(self.mats[x][None], self.mats[y][None]))[0])

    def add(self, x: int, y: int) -> int:
        s = (self.mats[x] + self.mats[y]) % self._moduli if self._moduli.size else self.mats[x]
        return int(self.index_of(s[None])[0])

    def neg(self, x: int) -> int:
        s = (-self.mats[x]) % self._moduli if self._moduli.size else self.mats[x]
        return int(self.index_of(s[None])[0])

    def left_mul_all(self, x: int, ys=None) -> np.ndarray:
        """Indices of ``x o y`` for every ``y`` (or the given ones)."""
        ys = np.arange(self.order) if ys is None else np.asarray(ys)
        out = np.empty(ys.size, dtype=np.int64)
        for s in range(0, ys.size, CHUNK):
            blk = self.mats[ys[s : s + CHUNK]]
            out[s : s + CHUNK] = self.index_of(self.compose_mats(self.mats[x][None], blk))
        return out

    def right_mul_all(self, x: int, ys=None) -> np.ndarray:
        """Indices of ``y o x`` for every ``y`` (or the given ones)."""
        ys = np.arange(self.order) if ys is None else np.asarray(ys)
        out = np.empty(ys.size, dtype=np.int64)
        for s in range(0, ys.size, CHUNK):
            blk = self.mats[ys[s : s + CHUNK]]
            out[s : s + CHUNK] = self.index_of(self.compose_mats(blk, self.mats[x][None]))
        return out

    def table(self, cap: int = 1 << 22) -> np.ndarray:
        if self.order**2 > cap:
            raise CapExceeded("multiplication table", self.order**2, cap)
        return np.stack([self.left_mul_all(x) for x in range(self.order)]) if self.order else \
            np.zeros((0, 0), dtype=np.int64)

    def units(self) -> np.ndarray:
        """Mask of invertible elements.

        For a finite module an injective endomorphism is bijective, and it
        maps each chain level injectively into itself, hence onto it, so its
        inverse also preserves the chain.
        """
        if self._units is None:
            m = self.object.module
            self._units = injective_batch(m, m, self.mats)
        return self._units

    def nilpotent_mask(self, mats: np.ndarray | None = None) -> np.ndarray:
        """Nilpotency of a stack of endomorphisms (x^L = 0 with L the module length)."""
        mats = self.mats if mats is None else mats
        cur = mats
        for _ in range(max(1, self.object.module.length) - 1):
            cur = self.compose_mats(cur, mats)
        return ~np.any(cur.reshape(cur.shape[0], -1), axis=1)

    def z_vectors(self, idx=None) -> np.ndarray:
        mats = self.mats if idx is None else self.mats[np.asarray(idx)]
        return self.hom.to_z(mats)

    def __repr__(self):
        return f"EndoRing(order={self.order}, object={self.object!r})"


def endo_ring(m: ChainObject, cap: int = DEFAULT_ORDER_CAP) -> EndoRing:
    return EndoRing(m, cap)


@dataclass(eq=False)
class IdealHandle:
    parent: EndoRing
    members: np.ndarray
    tag: tuple = ()

    def __post_init__(self):
        self.members = np.asarray(self.members, dtype=bool)
        self.members.setflags(write=False)

    @property
    def order(self) -> int:
        return int(self.members.sum())

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.members)

    def contains(self, x: int) -> bool:
        return bool(self.members[x])

    def is_empty(self) -> bool:
        return not self.members.any()

    def is_proper(self) -> bool:
        return not self.members[self.parent.one]

    def is_whole(self) -> bool:
        return bool(self.members.all())

    def same_members(self, other: "IdealHandle") -> bool:
        return self.parent is other.parent and np.array_equal(self.members, other.members)

    def leq(self, other: "IdealHandle") -> bool:
        return bool(np.all(other.members[self.members]))

    def additive_basis(self) -> np.ndarray:
        z = self.parent.z_vectors(self.indices())
        return _howell(z, self.parent.ring) if z.shape[0] else z

    def is_additive_subgroup(self) -> bool:
        if self.is_empty():
            return False
        basis = self.additive_basis()
        return self.parent.ring.p ** _span_order_exponent(basis, self.parent.ring) == self.order

    def is_two_sided(self) -> bool:
        """Closure under multiplication by ring elements on both sides.

        Additive generators suffice on both sides once the set is a subgroup.
        """
        if not self.is_additive_subgroup():
            return False
        e = self.parent
        ring_gens = e.index_of(e.hom.generator_matrices())
        z = self.additive_basis()
        own = e.index_of(e.hom._to_matrices(z))
        for x in ring_gens:
            if not (np.all(self.members[e.left_mul_all(int(x), own)])
                    and np.all(self.members[e.right_mul_all(int(x), own)])):
                return False
        return True

    def __repr__(self):
        return f"IdealHandle(order={self.order}, tag={self.tag})"


def _check_label(i: int, a: str, n: int):
    if a not in CLASS_KINDS:
        raise InputError(f"class kind must be 'm' or 'e', got {a!r}")
    if not 1 <= i <= n:
        raise InputError(f"index {i} outside 1..{n}")


def induced_defect_mask(e: EndoRing, i: int, a: str) -> np.ndarray:
    """Mask of endomorphisms whose i-th induced map is not injective ('m') or not surjective ('e')."""
    obj = e.object
    prof = obj.profile[i - 1]
    if prof is None:
        raise NonUniserialFactor(i, obj.factor(i).exponents)
    if prof == 0:
        return np.zeros(e.order, dtype=bool)
    c = induced_batch(obj, obj, e.mats, i)[:, 0, 0]
    v = np.minimum(valuations(c, e.ring, cap=prof), prof)
    if a == "m":
        # c * p^(prof-1) must survive in Z/p^prof
        return v + prof - 1 >= prof
    return v > 0


def ideal_I(e: EndoRing, i: int, a: str) -> IdealHandle:
    _check_label(i, a, e.object.n)
    mask = induced_defect_mask(e, i, a)
    if e.object.profile[i - 1] == 0:
        warnings.warn(f"factor {i} is zero; the ideal ({i},{a}) is empty", EmptyIdealWarning, stacklevel=2)
    return IdealHandle(e, mask, ("I", i, a))


def all_ideals_I(e: EndoRing) -> dict[tuple[int, str], IdealHandle]:
    """The ideals at every non-zero factor, keyed by label."""
    out = {}
    for i in range(1, e.object.n + 1):
        if e.object.profile[i - 1] == 0:
            continue
        for a in CLASS_KINDS:
            out[(i, a)] = ideal_I(e, i, a)
    return out


def is_completely_prime(e: EndoRing, ideal: IdealHandle, cap: int = DEFAULT_PAIR_CAP) -> bool:
    if not ideal.is_proper():
        raise NotProper("completely prime test needs a proper ideal")
    outside = np.flatnonzero(~ideal.members)
    if outside.size**2 > cap:
        raise CapExceeded("complete primeness pairs", outside.size**2, cap)
    mats_out = e.mats[outside]
    step = max(1, CHUNK * 4 // max(1, outside.size))
    for s in range(0, outside.size, step):
        prods = e.compose_mats(mats_out[s : s + step, None], mats_out[None, :])
        idx = e.index_of(prods.reshape((-1,) + prods.shape[2:]))
        if np.any(ideal.members[idx]):
            return False
    return True


def jacobson_radical(e: EndoRing) -> IdealHandle:
    """``{x : 1 - a x is a unit for all a}``.

    The radical of a finite ring is a nilpotent ideal, so a member ``x`` is
    a non-unit and ``g x``, ``x g`` are nilpotent for every additive
    generator ``g``.  Only elements passing that filter are tested against
    the full quasi-regularity condition.
    """
    if e._radical is not None:
        return e._radical
    units = e.units()
    cand = np.flatnonzero(e.nilpotent_mask() & ~units) if e.order > 1 else np.array([0])
    for g in e.hom.generator_matrices():
        if cand.size == 0:
            break
        keep = e.nilpotent_mask(e.compose_mats(g[None], e.mats[cand]))
        keep &= e.nilpotent_mask(e.compose_mats(e.mats[cand], g[None]))
        cand = cand[keep]
    mask = np.zeros(e.order, dtype=bool)
    eye = np.eye(e.object.module.rank, dtype=np.int64)
    mod = e._moduli
    m = e.object.module
    for x in cand:
        ok = True
        for s in range(0, e.order, CHUNK):
            ax = e.compose_mats(e.mats[s : s + CHUNK], e.mats[x][None])
            diff = (eye[None] - ax) % mod if mod.size else ax
            if not np.all(injective_batch(m, m, diff)):
                ok = False
                break
        mask[x] = ok
    e._radical = IdealHandle(e, mask, ("radical",))
    return e._radical


@dataclass
class SemisimpleReport:
    radical: IdealHandle
    k: int
    factor_orders: list[int]
    max_ideals: list[IdealHandle]
    matching: list[list[tuple[int, str]]]
    quotient_order: int
    commutative: bool = True
    checks: dict = field(default_factory=dict)

    @property
    def codim(self) -> int:
        return self.k

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def summary(self) -> dict:
        return {
            "radical_order": self.radical.order,
            "quotient_order": self.quotient_order,
            "k": self.k,
            "codim": self.codim,
            "factor_orders": list(self.factor_orders),
            "max_ideal_orders": [mi.order for mi in self.max_ideals],
            "matching": [[f"{i}{a}" for i, a in lab] for lab in self.matching],
            "checks": dict(self.checks),
        }


def _quotient_classes(e: EndoRing, rad: IdealHandle) -> tuple[np.ndarray, np.ndarray]:
    """Class id of each element modulo the radical, and one representative per class."""
    basis = rad.additive_basis()
    z = e.z_vectors()
    nf = _normal_form(z, basis, e.ring) if basis.shape[0] else z
    _, first, cls = np.unique(nf, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.size)
    return relabel[cls.reshape(-1)], first[order]


def _add_all(e: EndoRing, x: int, ys: np.ndarray) -> np.ndarray:
    s = e.mats[x][None] + e.mats[ys]
    if e._moduli.size:
        s %= e._moduli
    return e.index_of(s)


def semisimple_report(e: EndoRing, n: int | None = None, strict: bool = True) -> SemisimpleReport:
    """Structure of End(M)/J.

    The maximal two-sided ideals are read off the primitive central
    idempotents of the quotient.  For a single object the quotient must be a
    commutative product of fields; ``strict`` turns a non-commutative
    quotient into :class:`NonCommutativeQuotient`.  Sums of objects legitimately
    have matrix-ring blocks, so callers pass ``strict=False`` there.
    """
    if e._report is None:
        e._report = _semisimple(e, e.object.n if n is None else n)
    if strict and not e._report.commutative:
        raise NonCommutativeQuotient("End(M)/J is not commutative")
    return e._report


def _semisimple(e: EndoRing, n: int) -> SemisimpleReport:
    rad = jacobson_radical(e)
    if not rad.is_two_sided():
        raise TheoremViolation("radical is not a two-sided ideal")
    cls, reps = _quotient_classes(e, rad)
    nq = reps.size
    qmul = np.stack([cls[e.left_mul_all(int(r), reps)] for r in reps])
    qadd = np.stack([cls[_add_all(e, int(r), reps)] for r in reps])
    commutative = bool(np.array_equal(qmul, qmul.T))
    qzero, qone = cls[e.zero], cls[e.one]
    central = [c for c in range(nq) if np.array_equal(qmul[c], qmul[:, c])]
    idem = [c for c in central if qmul[c, c] == c and c != qzero]
    primitive = [c for c in idem if all(f == c or qmul[f, c] != f for f in idem)]
    factor_orders, max_ideals, matching = [], [], []
    is_field = True
    labels = all_ideals_I(e) if e.object.is_uniserial_or_zero() else {}
    total = qzero
    for c in primitive:
        total = qadd[total, c]
        block = np.unique(qmul[c])
        factor_orders.append(int(block.size))
        sub = qmul[np.ix_(block, block)]
        if not np.array_equal(sub, sub.T):
            is_field = False
        for x in block:
            if x != qzero and not np.any(qmul[x, block] == c):
                is_field = False
        kernel_q = qmul[:, c] == qzero
        mi = IdealHandle(e, kernel_q[cls], ("max",))
        max_ideals.append(mi)
        matching.append([lab for lab, ideal in labels.items() if ideal.same_members(mi)])
    k = len(primitive)
    nz = sum(1 for a in e.object.profile if a != 0)
    checks = {
        "idempotents_sum_to_one": bool(total == qone) if nq > 1 else True,
        "factors_are_fields": is_field,
        "order_product": int(np.prod(factor_orders, dtype=object)) == nq if k else nq == 1,
        "k_le_2n": k <= 2 * n,
        "k_le_n": k <= n,
        "k_le_nonzero_factors": k <= nz,
        "every_max_ideal_matched": all(matching) if e.object.is_uniserial_or_zero() else True,
    }
    return SemisimpleReport(rad, k, factor_orders, max_ideals, matching, nq, commutative, checks)


def is_maximal(e: EndoRing, ideal: IdealHandle) -> bool:
    return any(ideal.same_members(mi) for mi in semisimple_report(e, strict=False).max_ideals)


def ideal_checklist(e: EndoRing) -> dict[str, bool]:
    """Clause-by-clause check of the ideal-structure statement on one object.

    Objects with zero factors are treated through their non-zero factors only.
    """
    obj = e.object
    obj_ok = obj.is_uniserial_or_zero()
    if not obj_ok:
        raise InputError("object has a factor that is neither zero nor cyclic")
    ideals = all_ideals_I(e)
    rep = semisimple_report(e)
    out = {}
    proper = all(I.is_proper() for I in ideals.values())
    out["ideals_proper"] = proper
    out["ideals_two_sided"] = all(I.is_two_sided() for I in ideals.values())
    distinct = {I.members.tobytes(): I for I in ideals.values()}
    out["ideals_completely_prime"] = proper and all(is_completely_prime(e, I) for I in distinct.values())
    out["max_ideals_among_I"] = all(rep.matching)
    out["quotient_product_of_fields"] = rep.checks["factors_are_fields"] and rep.checks["order_product"]
    out["k_le_2n"] = rep.k <= 2 * obj.n
    union = np.zeros(e.order, dtype=bool)
    for I in ideals.values():
        union |= I.members
    out["non_units_are_union"] = bool(np.array_equal(~e.units(), union))
    out["semilocal_k_le_n"] = rep.k <= obj.n
    return out


def _hom_generators(src: ChainObject, tgt: ChainObject) -> np.ndarray:
    return hom_chain(src, tgt).generator_matrices()


def associated_component(m: ChainObject, i: int, a: str, n_obj: ChainObject,
                         em: EndoRing | None = None, en: EndoRing | None = None,
                         cap: int = DEFAULT_ORDER_CAP) -> IdealHandle:
    """``{phi in E_N : g phi f in I_{M,i,a} for all f: M -> N, g: N -> M}``."""
    em = EndoRing(m, cap) if em is None else em
    en = EndoRing(n_obj, cap) if en is None else en
    _check_label(i, a, m.n)
    ideal = ideal_I(em, i, a)
    if not is_maximal(em, ideal):
        raise NotMaximal(f"ideal ({i},{a}) is not maximal in End(M)")
    fs = _hom_generators(m, n_obj)
    gs = _hom_generators(n_obj, m)
    mask = np.ones(en.order, dtype=bool)
    mod_n, mod_m, q = n_obj.module.moduli, m.module.moduli, m.ring.modulus
    for f in fs:
        phif = compose_batch(f[None], en.mats, mod_n, q)
        for g in gs:
            comp = compose_batch(phif, g[None], mod_m, q)
            mask &= ideal.members[em.index_of(comp)]
    return IdealHandle(en, mask, ("assoc", i, a))


@dataclass
class ComparisonReport:
    i: int
    a: str
    same_class: bool
    clauses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v for v in self.clauses.values() if v is not None)


def verify_ideal_comparison(m: ChainObject, n_obj: ChainObject, i: int, a: str,
                    em: EndoRing | None = None, en: EndoRing | None = None) -> ComparisonReport:
    """Evaluate the comparison statements between the ideals of two objects.

    Clauses that do not apply to the pair (for instance, those assuming the
    two classes agree) are reported as ``None``.
    """
    for o in (m, n_obj):
        if not is_in_U_n(o):
            raise NotInUn("both objects need every factor non-zero and cyclic")
    em = EndoRing(m) if em is None else em
    en = EndoRing(n_obj) if en is None else en
    _check_label(i, a, m.n)
    same = same_class(m, n_obj, i, a)
    rep = ComparisonReport(i, a, same)
    im, in_ = all_ideals_I(em), all_ideals_I(en)
    labels = list(im)
    target_m, target_n = im[(i, a)], in_[(i, a)]
    m_max = is_maximal(em, target_m)
    n_max = is_maximal(en, target_n)

    if m_max:
        comp = associated_component(m, i, a, n_obj, em, en)
        if same:
            rep.clauses["component_is_I_N"] = comp.same_members(target_n)
        else:
            rep.clauses["component_is_E_N"] = comp.is_whole()
        rep.clauses["component_whole_iff_classes_differ"] = comp.is_whole() == (not same)
    else:
        rep.clauses["component_is_I_N"] = None

    if same:
        rep.clauses["inclusions_transfer"] = all(
            im[lab].leq(target_m) == in_[lab].leq(target_n) for lab in labels
        )
        rep.clauses["inclusion_implies_same_class"] = all(
            same_class(m, n_obj, j, b) for (j, b) in labels if im[(j, b)].leq(target_m)
        )
        rep.clauses["maximality_transfers"] = m_max == n_max
        if m_max:
            rep.clauses["equalities_transfer"] = all(
                im[lab].same_members(target_m) == in_[lab].same_members(target_n) for lab in labels
            )
    all_same = all(same_class(m, n_obj, j, b) for (j, b) in labels)
    if all_same:
        rep.clauses["poset_isomorphism"] = all(
            im[x].leq(im[y]) == in_[x].leq(in_[y]) for x in labels for y in labels
        )
    return rep


@dataclass
class SumIdealReport:
    max_ideal_count: int
    components: list[tuple[tuple[int, int, str], IdealHandle]]
    bijection: list[list[tuple[int, int, str]]]
    equal: bool

    def summary(self) -> dict:
        return {
            "max_ideal_count": self.max_ideal_count,
            "distinct_components": len({c.members.tobytes() for _, c in self.components}),
            "bijection": [[f"{h}:{i}{a}" for h, i, a in labs] for labs in self.bijection],
            "equal": self.equal,
        }


def max_ideals_of_sum(objs, cap: int = DEFAULT_ORDER_CAP) -> SumIdealReport:
    """Maximal two-sided ideals of End(sum) against the components of the summands' ideals."""
    objs = list(objs)
    total = direct_sum_objects(*objs)
    es = EndoRing(total, cap)
    rep = semisimple_report(es, strict=False)
    comps = []
    for h, o in enumerate(objs):
        eo = EndoRing(o, cap)
        for (i, a), ideal in all_ideals_I(eo).items():
            if is_maximal(eo, ideal):
                comps.append(((h, i, a), associated_component(o, i, a, total, eo, es)))
    bijection = []
    for mi in rep.max_ideals:
        bijection.append([lab for lab, c in comps if c.same_members(mi)])
    comp_sets = {c.members.tobytes() for _, c in comps}
    max_sets = {mi.members.tobytes() for mi in rep.max_ideals}
    return SumIdealReport(len(rep.max_ideals), comps, bijection, comp_sets == max_sets)
