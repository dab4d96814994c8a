"""Acceptance criteria 1-7.  Each test prints one PASS/FAIL line."""

import functools
import time

from chaincat.arith import ChainRing
from chaincat.decompose import decide_iso, extract_digraph, oracle_iso
from chaincat.endo import (
    EndoRing,
    associated_component,
    ideal_checklist,
    max_ideals_of_sum,
    semisimple_report,
    verify_ideal_comparison,
)
from chaincat.errors import CapExceeded
from chaincat.homs import CLASS_KINDS, same_class
from chaincat.sweep import (
    SweepConfig,
    class_equal_pair,
    gen_decide_instance,
    gen_object,
    gen_zero_factor_object,
    item_rng,
    padding_identities,
    run_sweep,
)

ORACLE_CAP = 1 << 20
IDEAL_CAP = 1 << 12
MAX_ITEMS = 2000


def announce(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


def draw_ring(rng):
    p = rng.choice([2, 3])
    return ChainRing(p, rng.randint(1, 3))


def test_criterion_1_oracle_equivalence(capsys):
    done, capped, worst, decide_worst, disagree, fams = 0, 0, 0.0, 0.0, [], {}
    item = 0
    while done < 200 and item < MAX_ITEMS:
        rng = item_rng("criterion-1", item)
        item += 1
        ring = draw_ring(rng)
        n = rng.choice([2, 3])
        # per-side order at most 2^10: p^10 for p = 2, 3^6 = 729 for p = 3
        ms, ns, fam = gen_decide_instance(rng, ring, n, 10 if ring.p == 2 else 6)
        for side in (ms, ns):
            assert 1 <= len(side) <= 3
            assert functools.reduce(lambda acc, o: acc * o.order, side, 1) <= 1 << 10
        t0 = time.perf_counter()
        verdict = decide_iso(ms, ns).iso
        decide_worst = max(decide_worst, time.perf_counter() - t0)
        try:
            witness = oracle_iso(ms, ns, cap=ORACLE_CAP)
        except CapExceeded:
            capped += 1
            continue
        worst = max(worst, time.perf_counter() - t0)
        done += 1
        key = f"{fam}/{'iso' if verdict else 'not'}"
        fams[key] = fams.get(key, 0) + 1
        if verdict != (witness is not None):
            disagree.append(item - 1)
    ok = done >= 200 and not disagree and worst < 5.0 and decide_worst < 5.0
    announce(capsys, 1, ok, f"{done} in-cap instances ({capped} over cap), {len(disagree)} disagreements, "
             f"worst {worst:.2f}s with oracle, decide alone {decide_worst:.2f}s, families {dict(sorted(fams.items()))}")
    assert ok, disagree


@functools.lru_cache(maxsize=None)
def ideal_suite():
    rows, skipped, item = [], 0, 0
    while len(rows) < 100 and item < MAX_ITEMS:
        rng = item_rng("criterion-2", item)
        item += 1
        ring = draw_ring(rng)
        n = rng.choice([1, 2, 3])
        x = gen_object(rng, ring, n, 7 if ring.p == 2 else 5, force_U_n=True)
        try:
            e = EndoRing(x, IDEAL_CAP)
        except CapExceeded:
            skipped += 1
            continue
        clauses = ideal_checklist(e)
        rep = semisimple_report(e)
        rows.append((item - 1, n, clauses, rep.checks, rep.k))
    return rows, skipped


def test_criterion_2_endo_ideals(capsys):
    rows, skipped = ideal_suite()
    bad = [(item, {k: v for k, v in {**c, **chk}.items() if not v}) for item, _, c, chk, _ in rows
           if not (all(c.values()) and all(chk.values()))]
    ok = len(rows) >= 100 and not bad
    announce(capsys, 2, ok, f"{len(rows)} objects with |E| <= 2^12 ({skipped} over cap), {len(bad)} violations")
    assert ok, bad


def test_criterion_3_semilocal_bound(capsys):
    rows, _ = ideal_suite()
    bad = [(item, k, n) for item, n, _, _, k in rows if k > n]
    ok = len(rows) >= 100 and not bad
    top = max((k, n) for _, n, _, _, k in rows)
    announce(capsys, 3, ok, f"k <= n on {len(rows)} objects, {len(bad)} violations (largest k={top[0]} at n={top[1]})")
    assert ok, bad


def test_criterion_4_comparison_suite(capsys):
    cfg = SweepConfig()
    pairs, bad, item = 0, [], 0
    while pairs < 50 and item < MAX_ITEMS:
        rng = item_rng("criterion-4", item)
        item += 1
        ring = draw_ring(rng)
        cfg.n = rng.choice([1, 2, 3])
        x, y, label = class_equal_pair(rng, cfg, ring, 4 if ring.p == 2 else 3)
        try:
            em, en = EndoRing(x, IDEAL_CAP), EndoRing(y, IDEAL_CAP)
        except CapExceeded:
            continue
        assert same_class(x, y, *label)
        pairs += 1
        for i in range(1, cfg.n + 1):
            for a in CLASS_KINDS:
                rep = verify_ideal_comparison(x, y, i, a, em, en)
                comp = associated_component(x, i, a, y, em, en)
                if not rep.ok or comp.is_whole() == same_class(x, y, i, a):
                    bad.append((item - 1, i, a, sorted(k for k, v in rep.clauses.items() if v is False)))
    sums, item = 0, 0
    while sums < 20 and item < MAX_ITEMS:
        rng = item_rng("criterion-4-sums", item)
        item += 1
        ring = draw_ring(rng)
        n = rng.choice([1, 2])
        x = gen_object(rng, ring, n, 3 if ring.p == 2 else 2, force_U_n=True)
        y = gen_object(rng, ring, n, 3 if ring.p == 2 else 2, force_U_n=True)
        try:
            rep = max_ideals_of_sum([x, y], cap=IDEAL_CAP)
        except CapExceeded:
            continue
        sums += 1
        if not (rep.equal and all(rep.bijection)):
            bad.append((f"sum {item - 1}", rep.summary()))
    ok = pairs >= 50 and sums >= 20 and not bad
    announce(capsys, 4, ok, f"{pairs} class-equal pairs and {sums} two-object sums, {len(bad)} violations")
    assert ok, bad


def test_criterion_5_digraph(capsys):
    isos, bad, methods, item = 0, [], {}, 0
    while isos < 50 and item < MAX_ITEMS:
        rng = item_rng("criterion-5", item)
        item += 1
        ring = draw_ring(rng)
        n = rng.choice([2, 3])
        ms, ns, _ = gen_decide_instance(rng, ring, n, 8 if ring.p == 2 else 5,
                                        family=rng.choice(["planted", "exchange"]))
        try:
            f = oracle_iso(ms, ns, cap=ORACLE_CAP)
        except CapExceeded:
            continue
        if f is None:
            bad.append((item - 1, "planted pair without an isomorphism"))
            continue
        isos += 1
        for i in range(1, n + 1):
            for a in CLASS_KINDS:
                try:
                    dg = extract_digraph(f, ms, ns, i, a, hall_limit=10)
                except CapExceeded:
                    bad.append((item - 1, i, a, "hall audit skipped"))
                    continue
                methods[dg.method] = methods.get(dg.method, 0) + 1
                sigma = dg.permutation
                verified = sorted(sigma.values()) == list(range(1, len(ms) + 1)) and all(
                    same_class(ms[k - 1], ns[v - 1], i, a) for k, v in sigma.items())
                if dg.hall_ok is not True or not verified:
                    bad.append((item - 1, i, a))
    ok = isos >= 50 and not bad
    announce(capsys, 5, ok, f"{isos} oracle isomorphisms, {len(bad)} Hall/permutation findings, methods {methods}")
    assert ok, bad


def test_criterion_6_padding(capsys):
    objs, bad = 0, []
    for item in range(60):
        rng = item_rng("criterion-6", item)
        ring = draw_ring(rng)
        n = rng.choice([2, 3])
        m = gen_zero_factor_object(rng, ring, n, 4 if ring.p == 2 else 3)
        assert m.zero_indices()
        objs += 1
        res = padding_identities(m)
        if not all(res.values()):
            bad.append((item, [k for k, v in res.items() if not v]))
    ok = objs >= 50 and not bad
    announce(capsys, 6, ok, f"{objs} objects with a zero factor, {len(bad)} violations")
    assert ok, bad


def test_criterion_7_replay(capsys):
    configs = [
        SweepConfig(count=6, seed=11),
        SweepConfig(p=3, e=2, n=3, count=3, seed=12, max_length=4, oracle_cap=1 << 16),
        SweepConfig(count=6, seed=13, mutant=True),
    ]
    same = []
    for cfg in configs:
        a = run_sweep(cfg).to_dict()
        b = run_sweep(cfg).to_dict()
        same.append(a["findings"] == b["findings"] and a == b)
    mutant_seen = bool(run_sweep(configs[2]).findings)
    ok = all(same) and mutant_seen
    announce(capsys, 7, ok, f"{sum(same)}/{len(same)} sweeps replayed identically (mutant findings reproduced: {mutant_seen})")
    assert ok
