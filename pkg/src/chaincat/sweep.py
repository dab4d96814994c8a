"""Randomized property sweep and the instance generators it shares with the tests.

Instance distribution: every item ``t`` of a sweep with seed ``s`` draws
from ``random.Random(f"{s}:{t}")``.  Objects come from
:func:`chaincat.chains.random_object` with module order at most
``p**max_length`` (default ``p**6``).  Lists for the decision checks hold
1-3 objects per side (fewer when ``k * n > max_length``), each of order at
most ``p**(max_length // k)`` for a list of length ``k``, so a side has
order at most ``p**max_length``.  The right-hand list is one of

* ``planted``: the left list permuted, each object moved by a random automorphism;
* ``exchange``: split chains whose pieces are exchanged at some indices;
* ``near``: the left list with one object replaced by a chain on the same
  module with the same factor orders;
* ``random``: an independent list.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import homs
from .arith import ChainRing
from .brute import brute_hom_chain, brute_same_class
from .chains import (
    ChainObject,
    _composition_series,
    direct_sum_objects,
    is_in_U_n,
    random_object,
    reembed,
    s_n,
    s_padding,
    split_chain,
    zero_object,
)
from .decompose import decide_iso, decide_iso_general, extract_digraph, oracle_iso
from .endo import (
    EndoRing,
    all_ideals_I,
    ideal_checklist,
    max_ideals_of_sum,
    semisimple_report,
    verify_ideal_comparison,
)
from .errors import CapExceeded, ChainCatError, InputError
from .fmodule import FModule

CHECKS = (
    "hom_vs_brute",
    "classes_vs_brute",
    "functoriality",
    "class_transitivity",
    "composite_pairs",
    "endo_ideals",
    "ideal_comparison",
    "sum_ideals",
    "oracle_equivalence",
    "digraph",
    "padding",
)


@dataclass
class SweepConfig:
    p: int = 2
    e: int = 2
    n: int = 2
    count: int = 50
    seed: int = 0
    max_length: int = 6
    endo_cap: int = 1 << 16
    ideal_cap: int = 1 << 12
    oracle_cap: int = 1 << 20
    brute_cap: int = 1 << 12
    hall_max_r: int = 10
    mutant: bool = False


@dataclass
class SweepReport:
    config: SweepConfig
    passed: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)
    timing: float = 0.0

    def to_dict(self) -> dict:
        cfg = dict(vars(self.config))
        return {
            "config": cfg,
            "passed": dict(sorted(self.passed.items())),
            "skipped": dict(sorted(self.skipped.items())),
            "findings": self.findings,
        }


# ---------------------------------------------------------------------------
# generators


def item_rng(seed, item: int) -> random.Random:
    return random.Random(f"{seed}:{item}")


def gen_object(rng: random.Random, ring: ChainRing, n: int, max_length: int, **kw) -> ChainObject:
    budget = ring.p**max_length
    return random_object(ring, n, budget, rng.randrange(1 << 30), **kw)


def same_shape_chain(obj: ChainObject, rng: random.Random, tries: int = 40) -> ChainObject:
    """Another chain on the same module with the same factor orders (falls back to a re-embedding)."""
    m = obj.module
    p = obj.ring.p
    cuts, acc = [], 0
    for i in range(1, obj.n):
        acc += round(np.log(obj.factor(i).order) / np.log(p))
        cuts.append(acc)
    for _ in range(tries):
        series = _composition_series(m, rng)
        cand = ChainObject(m, [series[0], *(series[c] for c in cuts), series[-1]], obj.n)
        if cand.is_uniserial_or_zero() and is_in_U_n(cand) == is_in_U_n(obj):
            return cand
    return reembed(obj, rng)


def gen_list(rng, ring, n, k, max_length, force_U_n=True):
    # objects in U_n have length at least n, so long lists are shortened
    if force_U_n:
        k = max(1, min(k, max_length // n))
    per = max(n if force_U_n else 1, max_length // k)
    return [gen_object(rng, ring, n, per, force_U_n=force_U_n) for _ in range(k)]


def gen_decide_instance(rng: random.Random, ring: ChainRing, n: int, max_length: int = 10,
                        family: str | None = None):
    """A pair of lists of objects with every factor non-zero, plus the family name."""
    family = family or rng.choice(["planted", "planted", "exchange", "near", "random"])
    k = rng.randint(1, 3)
    if family == "exchange":
        k = max(1, min(max(k, 2), max_length // n))
        top = max(1, min(ring.e, max_length // (k * n)))
        pieces = [[FModule(ring, (rng.randint(1, top),)) for _ in range(n)] for _ in range(k)]
        # a random permutation of the pieces at each index
        cols = [rng.sample(range(k), k) for _ in range(n)]
        other = [[pieces[cols[i][h]][i] for i in range(n)] for h in range(k)]
        return [split_chain(pc) for pc in pieces], [split_chain(pc) for pc in other], family
    ms = gen_list(rng, ring, n, k, max_length)
    if family == "planted":
        ns = [reembed(o, rng) for o in ms]
        rng.shuffle(ns)
    elif family == "near":
        ns = list(ms)
        j = rng.randrange(len(ms))
        ns[j] = same_shape_chain(ms[j], rng)
        ns = [reembed(o, rng) for o in ns]
        rng.shuffle(ns)
    else:
        ns = gen_list(rng, ring, n, rng.randint(1, 3), max_length)
    return ms, ns, family


def gen_zero_factor_object(rng, ring, n, max_length) -> ChainObject:
    return gen_object(rng, ring, n, max_length, require_zero=True)


# ---------------------------------------------------------------------------
# checks; each returns (ok, detail) or raises CapExceeded to mark a skip


def _hom_pair(rng, cfg, ring):
    x = gen_object(rng, ring, cfg.n, min(cfg.max_length, 4))
    y = gen_object(rng, ring, cfg.n, min(cfg.max_length, 4))
    return x, y


def check_hom_vs_brute(rng, cfg, ring):
    x, y = _hom_pair(rng, cfg, ring)
    brute = brute_hom_chain(x, y, cfg.brute_cap)
    h = homs.hom_chain(x, y)
    got = {m.tobytes() for m in h.element_matrices()}
    want = {m.tobytes() for m in brute}
    return got == want, {"order": h.order, "brute": len(brute)}


def check_classes_vs_brute(rng, cfg, ring):
    x, y = _hom_pair(rng, cfg, ring)
    bad = []
    for i in range(1, cfg.n + 1):
        for a in homs.CLASS_KINDS:
            closed = homs.same_class(x, y, i, a)
            if cfg.mutant:
                closed = not closed
            if closed != brute_same_class(x, y, i, a, cfg.brute_cap):
                bad.append(f"{i}{a}")
    return not bad, {"mismatch": bad}


def _random_hom(h: homs.HomGroup, rng) -> np.ndarray:
    return h.element_matrices(rng.randrange(h.order), None)[0]


def check_functoriality(rng, cfg, ring):
    x, y = _hom_pair(rng, cfg, ring)
    z = gen_object(rng, ring, cfg.n, min(cfg.max_length, 4))
    f = homs.HomElement(x, y, _random_hom(homs.hom_chain(x, y), rng))
    g = homs.HomElement(y, z, _random_hom(homs.hom_chain(y, z), rng))
    gf = f.then(g)
    bad = []
    for i in range(1, cfg.n + 1):
        lhs = gf.induced(i)
        fi, gi = f.induced(i), g.induced(i)
        v = z.factor(i).module
        rhs = homs.compose_batch(fi, gi, v.moduli, ring.modulus) if v.rank else lhs * 0
        if not np.array_equal(lhs, rhs):
            bad.append(i)
    return not bad, {"indices": bad}


def check_class_transitivity(rng, cfg, ring):
    objs = [gen_object(rng, ring, cfg.n, min(cfg.max_length, 4)) for _ in range(3)]
    table = homs.ClassTable(objs)
    for i in range(1, cfg.n + 1):
        for a in homs.CLASS_KINDS:
            s = [[table.same(u, v, i, a) for v in range(3)] for u in range(3)]
            for u, v, w in itertools.product(range(3), repeat=3):
                if not s[u][u] or s[u][v] != s[v][u] or (s[u][v] and s[v][w] and not s[u][w]):
                    return False, {"label": f"{i}{a}"}
    return True, {}


def check_composite_pairs(rng, cfg, ring):
    """Class equality against the existence of f, g with g f outside the ideal."""
    x = gen_object(rng, ring, cfg.n, min(cfg.max_length, 3), force_U_n=True)
    y = gen_object(rng, ring, cfg.n, min(cfg.max_length, 3), force_U_n=True)
    ex = EndoRing(x, cfg.ideal_cap)
    fs = homs.hom_chain(x, y).element_matrices()
    gs = homs.hom_chain(y, x).element_matrices()
    if fs.shape[0] * gs.shape[0] > cfg.brute_cap * 16:
        raise CapExceeded("pair enumeration", fs.shape[0] * gs.shape[0], cfg.brute_cap * 16)
    comps = homs.compose_batch(fs[:, None], gs[None, :], x.module.moduli, ring.modulus)
    idx = ex.index_of(comps.reshape(-1, x.module.rank, x.module.rank))
    bad = []
    for (i, a), ideal in all_ideals_I(ex).items():
        exists = bool(np.any(~ideal.members[idx]))
        if exists != homs.same_class(x, y, i, a):
            bad.append(f"{i}{a}")
    return not bad, {"mismatch": bad}


def check_endo_ideals(rng, cfg, ring):
    x = gen_object(rng, ring, cfg.n, min(cfg.max_length, 5), force_U_n=True)
    e = EndoRing(x, cfg.ideal_cap)
    clauses = ideal_checklist(e)
    rep = semisimple_report(e)
    clauses["report_checks"] = rep.ok
    return all(clauses.values()), {k: v for k, v in clauses.items() if not v}


def class_equal_pair(rng, cfg, ring, max_length=4):
    """A pair of objects sharing at least one class, with a label where they agree."""
    x = gen_object(rng, ring, cfg.n, max_length, force_U_n=True)
    for _ in range(20):
        if rng.random() < 0.3:
            y = reembed(x, rng)
        else:
            y = gen_object(rng, ring, cfg.n, max_length, force_U_n=True)
        labels = [(i, a) for i in range(1, cfg.n + 1) for a in homs.CLASS_KINDS if homs.same_class(x, y, i, a)]
        if labels:
            return x, y, labels[rng.randrange(len(labels))]
    return x, x, (1, "m")


def check_ideal_comparison(rng, cfg, ring):
    x, y, (i, a) = class_equal_pair(rng, cfg, ring)
    em, en = EndoRing(x, cfg.ideal_cap), EndoRing(y, cfg.ideal_cap)
    rep = verify_ideal_comparison(x, y, i, a, em, en)
    # also one label where the classes may differ
    j = rng.randint(1, cfg.n)
    b = rng.choice(homs.CLASS_KINDS)
    rep2 = verify_ideal_comparison(x, y, j, b, em, en)
    bad = {k: v for k, v in {**rep.clauses, **{f"{k}@{j}{b}": v for k, v in rep2.clauses.items()}}.items()
           if v is False}
    return rep.ok and rep2.ok, {"failed": sorted(bad)}


def check_sum_ideals(rng, cfg, ring):
    x = gen_object(rng, ring, cfg.n, min(cfg.max_length, 3), force_U_n=True)
    y = gen_object(rng, ring, cfg.n, min(cfg.max_length, 3), force_U_n=True)
    rep = max_ideals_of_sum([x, y], cap=cfg.ideal_cap)
    return rep.equal and all(rep.bijection), rep.summary()


def check_oracle_equivalence(rng, cfg, ring):
    ms, ns, fam = gen_decide_instance(rng, ring, cfg.n, min(cfg.max_length, 8))
    verdict = decide_iso(ms, ns).iso
    oracle = oracle_iso(ms, ns, cfg.oracle_cap) is not None
    return verdict == oracle, {"family": fam, "decide": verdict, "oracle": oracle}


def check_digraph(rng, cfg, ring):
    ms, ns, fam = gen_decide_instance(rng, ring, cfg.n, min(cfg.max_length, 8),
                                      family=rng.choice(["planted", "exchange"]))
    if len(ms) != len(ns):
        raise CapExceeded("unequal list lengths", 0, 0)
    f = oracle_iso(ms, ns, cfg.oracle_cap)
    if f is None:
        return False, {"family": fam, "reason": "planted pair not isomorphic"}
    methods = {}
    for i in range(1, cfg.n + 1):
        for a in homs.CLASS_KINDS:
            dg = extract_digraph(f, ms, ns, i, a, cfg.hall_max_r)
            methods[f"{i}{a}"] = dg.method
    return True, {"family": fam, "methods": methods}


def padding_identities(m: ChainObject) -> dict[str, bool]:
    """The class identities relating M, S(M), M + S(M) and S^n."""
    ring, n = m.ring, m.n
    s = s_padding(m)
    ms = direct_sum_objects(m, s)
    zero = zero_object(ring, n)
    sn = s_n(ring, n)
    zeros = set(m.zero_indices())
    out = {"sum_in_U_n": is_in_U_n(ms)}
    ok_zero = ok_factor = ok_off = ok_on = True
    for i in range(1, n + 1):
        fac = ms.factor(i).exponents
        if i in zeros:
            ok_factor &= fac == (1,)
        else:
            ok_factor &= fac == m.factor(i).exponents
        for a in homs.CLASS_KINDS:
            if i in zeros:
                ok_zero &= homs.same_class(m, zero, i, a)
                ok_on &= homs.same_class(ms, s, i, a) and homs.same_class(s, sn, i, a)
            else:
                ok_off &= homs.same_class(ms, m, i, a)
    out.update({
        "zero_factor_class_is_zero": ok_zero,
        "sum_factors": ok_factor,
        "class_of_sum_off_A": ok_off,
        "class_of_sum_on_A": ok_on,
    })
    gen = decide_iso_general([ms], [m, s])
    out["general_decision_iso"] = gen.iso and gen.r == 1 and gen.s == 2
    out["general_self"] = decide_iso_general([m], [m]).iso
    return out


def check_padding(rng, cfg, ring):
    m = gen_zero_factor_object(rng, ring, cfg.n, min(cfg.max_length, 5))
    res = padding_identities(m)
    return all(res.values()), {k: v for k, v in res.items() if not v}


CHECK_FUNCS = {
    "hom_vs_brute": check_hom_vs_brute,
    "classes_vs_brute": check_classes_vs_brute,
    "functoriality": check_functoriality,
    "class_transitivity": check_class_transitivity,
    "composite_pairs": check_composite_pairs,
    "endo_ideals": check_endo_ideals,
    "ideal_comparison": check_ideal_comparison,
    "sum_ideals": check_sum_ideals,
    "oracle_equivalence": check_oracle_equivalence,
    "digraph": check_digraph,
    "padding": check_padding,
}


def run_sweep(cfg: SweepConfig, checks=CHECKS) -> SweepReport:
    ring = ChainRing(cfg.p, cfg.e)
    rep = SweepReport(cfg)
    t0 = time.perf_counter()
    for name in checks:
        rep.passed[name] = 0
        rep.skipped[name] = 0
    for item in range(cfg.count):
        for name in checks:
            rng = item_rng(cfg.seed, f"{item}:{name}")
            try:
                ok, detail = CHECK_FUNCS[name](rng, cfg, ring)
            except CapExceeded:
                rep.skipped[name] += 1
                continue
            except InputError as exc:
                # the generator could not produce an instance of this shape
                rep.skipped[name] += 1
                del exc
                continue
            except ChainCatError as exc:
                ok, detail = False, {"error": type(exc).__name__, "message": str(exc)}
            if ok:
                rep.passed[name] += 1
            else:
                rep.findings.append({
                    "check": name,
                    "item": item,
                    "replay_seed": f"{cfg.seed}:{item}:{name}",
                    "detail": detail,
                })
    rep.timing = time.perf_counter() - t0
    return rep
