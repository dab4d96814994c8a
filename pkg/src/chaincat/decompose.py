"""Isomorphism of finite direct sums.

Summand positions in reports are 1-based, like chain indices.  ``X[i]`` and
``Y[i]`` list the summands on each side whose i-th factor is non-zero;
``bijections[(i, a)]`` maps each ``k`` in ``X[i]`` to its partner in ``Y[i]``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .arith import ChainRing, _howell, _solve, matmul_mod, valuations
from .chains import (
    ChainObject,
    direct_sum_objects,
    is_in_U_n,
    map_embedded,
    random_object,
    split_chain,
)
from .errors import (
    CapExceeded,
    HallViolation,
    InputError,
    NoPermutation,
    NotInUn,
    RingMismatch,
    TheoremViolation,
    ZeroObjectInInput,
)
from .fmodule import FModule, Submodule, summand_slices
from .homs import (
    CLASS_KINDS,
    ClassTable,
    HomElement,
    _rank_mod_p_batch,
    hom_chain,
    induced_batch,
    injective_batch,
    same_class,
    socle_matrices,
)

ORACLE_CAP = 1 << 20


def _labels(n: int):
    return [(i, a) for i in range(1, n + 1) for a in CLASS_KINDS]


@dataclass
class DecisionReport:
    verdict: str
    r: int
    s: int
    n: int
    index_sets: dict = field(default_factory=dict)
    bijections: dict = field(default_factory=dict)
    partitions: dict = field(default_factory=dict)
    failure_witness: dict | None = None

    @property
    def iso(self) -> bool:
        return self.verdict == "iso"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "r": self.r,
            "s": self.s,
            "n": self.n,
            "X": {str(i): x for i, (x, _) in self.index_sets.items()},
            "Y": {str(i): y for i, (_, y) in self.index_sets.items()},
            "bijections": {f"{i}{a}": {str(k): v for k, v in phi.items()} for (i, a), phi in self.bijections.items()},
            "partitions": {f"{i}{a}": parts for (i, a), parts in self.partitions.items()},
            "failure_witness": self.failure_witness,
        }


def _check_inputs(ms, ns):
    objs = list(ms) + list(ns)
    if not objs:
        return None, None
    ring, n = objs[0].ring, objs[0].n
    for o in objs:
        if o.ring != ring:
            raise RingMismatch("objects over different rings")
        if o.n != n:
            raise InputError("objects with different chain lengths")
    return ring, n


def _label_of(pos: int, r: int) -> tuple[str, int]:
    return ("M", pos + 1) if pos < r else ("N", pos - r + 1)


def _match_classes(table: ClassTable, r: int, i: int, a: str, xs, ys):
    """Pair 0-based positions ``xs`` (left) with ``ys`` (right, offset by r) inside classes."""
    parts = table.partition(i, a, list(xs) + [r + y for y in ys])
    phi = {}
    for part in parts:
        left = [x for x in part if x < r]
        right = [y - r for y in part if y >= r]
        if len(left) != len(right):
            witness = {
                "i": i,
                "a": a,
                "class": [f"{s}{k}" for s, k in (_label_of(x, r) for x in part)],
                "left_count": len(left),
                "right_count": len(right),
            }
            return None, parts, witness
        for x, y in zip(left, right):
            phi[x + 1] = y + 1
    return phi, parts, None


def _reverify(ms, ns, phi, i, a):
    for k, l in phi.items():
        if not same_class(ms[k - 1], ns[l - 1], i, a):
            raise TheoremViolation(f"bijection pairs summands in different classes at ({i},{a})")


def _pretty_parts(parts, r):
    return [[f"{s}{k}" for s, k in (_label_of(x, r) for x in part)] for part in parts]


def decide_iso(ms, ns) -> DecisionReport:
    """Decide whether two sums of objects with every factor non-zero and cyclic are isomorphic."""
    ms, ns = list(ms), list(ns)
    _, n = _check_inputs(ms, ns)
    n = n or 0
    for o in ms + ns:
        if not is_in_U_n(o):
            raise NotInUn("decide_iso needs every factor non-zero and cyclic")
    r, s = len(ms), len(ns)
    rep = DecisionReport("iso", r, s, n)
    everyone = list(range(r))
    for i in range(1, n + 1):
        rep.index_sets[i] = (list(range(1, r + 1)), list(range(1, s + 1)))
    if r != s:
        rep.verdict = "not-iso"
        rep.failure_witness = {"reason": "summand counts differ", "r": r, "s": s}
        return rep
    table = ClassTable(ms + ns)
    for i, a in _labels(n):
        phi, parts, witness = _match_classes(table, r, i, a, everyone, everyone)
        rep.partitions[(i, a)] = _pretty_parts(parts, r)
        if phi is None:
            rep.verdict = "not-iso"
            rep.failure_witness = witness
            rep.bijections = {}
            return rep
        rep.bijections[(i, a)] = phi
    for (i, a), phi in rep.bijections.items():
        _reverify(ms, ns, phi, i, a)
    return rep


def decide_iso_general(ms, ns) -> DecisionReport:
    """Decision for sums whose summands may have zero factors (r and s may differ)."""
    ms, ns = list(ms), list(ns)
    _, n = _check_inputs(ms, ns)
    n = n or 0
    for o in ms + ns:
        if o.is_zero():
            raise ZeroObjectInInput("summands must be non-zero")
        o.require_uniserial()
    r, s = len(ms), len(ns)
    rep = DecisionReport("iso", r, s, n)
    for i in range(1, n + 1):
        xs = [k for k in range(r) if ms[k].profile[i - 1] != 0]
        ys = [k for k in range(s) if ns[k].profile[i - 1] != 0]
        rep.index_sets[i] = ([k + 1 for k in xs], [k + 1 for k in ys])
        if len(xs) != len(ys):
            rep.verdict = "not-iso"
            rep.failure_witness = {"reason": "index set sizes differ", "i": i, "X": len(xs), "Y": len(ys)}
            return rep
    table = ClassTable(ms + ns)
    for i, a in _labels(n):
        xs = [k - 1 for k in rep.index_sets[i][0]]
        ys = [k - 1 for k in rep.index_sets[i][1]]
        phi, parts, witness = _match_classes(table, r, i, a, xs, ys)
        rep.partitions[(i, a)] = _pretty_parts(parts, r)
        if phi is None:
            rep.verdict = "not-iso"
            rep.failure_witness = witness
            rep.bijections = {}
            return rep
        rep.bijections[(i, a)] = phi
    for (i, a), phi in rep.bijections.items():
        _reverify(ms, ns, phi, i, a)
    return rep


# ---------------------------------------------------------------------------
# oracle


def _sum_or_single(objs) -> ChainObject:
    objs = list(objs)
    if not objs:
        raise InputError("empty list of summands")
    return direct_sum_objects(*objs)


def verify_iso(f: HomElement) -> bool:
    """Bijective on the underlying sets and ``f(M(i)) = N(i)`` for every i."""
    m, n = f.source, f.target
    if m.order != n.order:
        return False
    elems = m.module.embed(m.module.elements())
    img = map_embedded(m.module, n.module, f.matrix, elems)
    if np.unique(img, axis=0).shape[0] != elems.shape[0]:
        return False
    for i in range(m.n + 1):
        image = Submodule._from_embedded(n.module, f.apply_embedded(m.level(i).basis))
        if image != n.level(i):
            return False
    return True


def oracle_iso(ms, ns, cap: int = ORACLE_CAP, chunk: int = 1 << 14, method: str = "socle") -> HomElement | None:
    """An isomorphism ``sum ms -> sum ns`` found by exhaustive search, or None.

    Once the level orders match, a chain map is an isomorphism exactly when
    it is injective, i.e. when its socle matrix has full row rank.  With
    ``method="full"`` every element of the hom group is tested.  With the
    default ``method="socle"`` the search runs over the F_p-span of the
    generators' socle matrices instead, which visits one representative of
    every class of maps with the same socle matrix; a full-rank hit is lifted
    back to an actual morphism.  Both scan in a fixed order, so the witness
    is deterministic.  ``cap`` bounds the order of the hom group either way.
    """
    src, tgt = _sum_or_single(ms), _sum_or_single(ns)
    if src.n != tgt.n:
        raise InputError("objects with different chain lengths")
    if any(src.level(i).order != tgt.level(i).order for i in range(src.n + 1)):
        return None
    hom = hom_chain(src, tgt)
    if hom.order > cap:
        raise CapExceeded("oracle hom enumeration", hom.order, cap)
    if method == "full":
        f = _scan_full(hom, src, tgt, chunk)
    elif method == "socle":
        f = _scan_socle(hom, src, tgt, chunk)
    else:
        raise InputError(f"unknown oracle method {method!r}")
    if f is not None and not verify_iso(f):
        raise TheoremViolation("injective chain map with matching level orders is not an isomorphism")
    return f


def _scan_full(hom, src, tgt, chunk):
    for _, mats in hom.iter_chunks(chunk):
        ok = np.flatnonzero(injective_batch(src.module, tgt.module, mats))
        if ok.size:
            return HomElement(src, tgt, mats[ok[0]])
    return None


def _scan_socle(hom, src, tgt, chunk):
    if src.module.rank == 0:
        return HomElement(src, tgt, np.zeros((0, tgt.module.rank), dtype=np.int64))
    p = src.ring.p
    gens = hom.generator_matrices()
    if gens.shape[0] == 0:
        return None
    soc = socle_matrices(src.module, tgt.module, gens).reshape(gens.shape[0], -1) % p
    t = gens.shape[0]
    # row-reduce [soc | I] over F_p to get a basis of the span and how to reach it
    red = _howell(np.hstack([soc, np.eye(t, dtype=np.int64)]), ChainRing(p, 1))
    width = soc.shape[1]
    keep = np.any(red[:, :width] != 0, axis=1)
    basis, combos = red[keep, :width], red[keep, width:]
    d = basis.shape[0]
    shape = (src.module.rank, tgt.module.rank)
    for start in range(0, p**d, chunk):
        idx = np.arange(start, min(start + chunk, p**d), dtype=np.int64)
        coeffs = np.stack([(idx // p**k) % p for k in range(d - 1, -1, -1)], axis=1) if d else \
            np.zeros((idx.size, 0), dtype=np.int64)
        mats = (coeffs @ basis % p).reshape((-1,) + shape)
        ok = np.flatnonzero(_rank_mod_p_batch(mats, p) == src.module.rank)
        if ok.size:
            lift = coeffs[ok[0]] @ combos % p
            f = matmul_mod(lift[None], gens.reshape(t, -1), src.ring.modulus).reshape(shape)
            return HomElement(src, tgt, f)
    return None


def inverse(f: HomElement) -> HomElement:
    """Inverse of a verified isomorphism, solved coordinate by coordinate."""
    m, n = f.source, f.target
    ring = m.ring
    t = np.diag(m.module.scale).astype(np.int64).reshape(m.module.rank, m.module.rank)
    images = f.apply_embedded(t)
    rows = []
    for k in range(n.module.rank):
        rhs = np.zeros(n.module.rank, dtype=np.int64)
        rhs[k] = n.module.scale[k]
        y = _solve(images, rhs, ring)
        if y is None:
            raise InputError("map is not surjective")
        rows.append(m.module.unembed(((y @ t) % ring.modulus)[None])[0])
    g = HomElement(n, m, np.array(rows, dtype=np.int64).reshape(n.module.rank, m.module.rank))
    if not np.array_equal(f.then(g).matrix, np.eye(m.module.rank, dtype=np.int64)):
        raise InputError("map is not invertible")
    return g


# ---------------------------------------------------------------------------
# digraph of an explicit isomorphism


@dataclass
class ClassDigraph:
    i: int
    a: str
    r: int
    graph: nx.DiGraph
    hall_ok: bool | None
    hall_failures: list = field(default_factory=list)
    permutation: dict = field(default_factory=dict)
    method: str = ""

    def edges(self) -> list[tuple[str, str]]:
        return sorted(self.graph.edges())

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "a": self.a,
            "edges": [list(e) for e in self.edges()],
            "hall_ok": self.hall_ok,
            "permutation": {str(k): v for k, v in self.permutation.items()},
            "method": self.method,
        }


def _component_ok(src: ChainObject, tgt: ChainObject, mat: np.ndarray, i: int, a: str) -> bool:
    """Is the i-th induced map of ``mat`` injective ('m') or surjective ('e')?"""
    u, v = src.profile[i - 1], tgt.profile[i - 1]
    if a == "m" and u == 0:
        return True
    if a == "e" and v == 0:
        return True
    if u == 0 or v == 0:
        return False
    c = induced_batch(src, tgt, mat[None], i)[0, 0, 0]
    val = int(valuations(np.array([c]), src.ring, cap=v)[0])
    if a == "m":
        return val + u - 1 < v
    return val == 0


def _blocks(objs):
    return summand_slices([o.module for o in objs])


def extract_digraph(f: HomElement, ms, ns, i: int, a: str, hall_limit: int = 10) -> ClassDigraph:
    """Digraph of induced components of an isomorphism and a class-respecting permutation.

    Edge ``M_h -> N_j`` when the i-th induced map of the (h, j) component of
    ``f`` is injective (a='m') or surjective (a='e'); edge ``N_j -> M_h`` for
    the components of ``f^-1``.
    """
    ms, ns = list(ms), list(ns)
    r = len(ms)
    if len(ns) != r:
        raise InputError("digraph extraction needs the same number of summands on both sides")
    if not verify_iso(f):
        raise InputError("map is not an isomorphism")
    g = inverse(f)
    bm, bn = _blocks(ms), _blocks(ns)
    graph = nx.DiGraph()
    graph.add_nodes_from([f"M{h + 1}" for h in range(r)] + [f"N{j + 1}" for j in range(r)])
    for h in range(r):
        for j in range(r):
            if _component_ok(ms[h], ns[j], f.matrix[bm[h], bn[j]], i, a):
                graph.add_edge(f"M{h + 1}", f"N{j + 1}")
            if _component_ok(ns[j], ms[h], g.matrix[bn[j], bm[h]], i, a):
                graph.add_edge(f"N{j + 1}", f"M{h + 1}")
    hall_ok, failures = None, []
    if r <= hall_limit:
        hall_ok = True
        for side in ("M", "N"):
            for size in range(1, r + 1):
                for t in itertools.combinations(range(1, r + 1), size):
                    out = set()
                    for v in t:
                        out.update(graph.successors(f"{side}{v}"))
                    if len(out) < size:
                        hall_ok = False
                        failures.append([f"{side}{v}" for v in t])
    dg = ClassDigraph(i, a, r, graph, hall_ok, failures)
    if hall_ok is False:
        raise HallViolation(f"out-neighbourhood condition fails at ({i},{a}): {failures[:3]}")
    mutual = [(f"M{h}", f"N{j}") for h in range(1, r + 1) for j in range(1, r + 1)
              if graph.has_edge(f"M{h}", f"N{j}") and graph.has_edge(f"N{j}", f"M{h}")]
    perm = _perfect_matching(r, mutual)
    dg.method = "mutual"
    if perm is None:
        comp = {}
        for idx, scc in enumerate(nx.strongly_connected_components(graph)):
            for v in scc:
                comp[v] = idx
        pairs = [(f"M{h}", f"N{j}") for h in range(1, r + 1) for j in range(1, r + 1)
                 if comp[f"M{h}"] == comp[f"N{j}"]]
        perm = _perfect_matching(r, pairs)
        dg.method = "scc"
    if perm is None:
        raise NoPermutation(f"no class-respecting permutation in the digraph at ({i},{a})")
    dg.permutation = perm
    _reverify(ms, ns, perm, i, a)
    return dg


def _perfect_matching(r: int, pairs) -> dict | None:
    if r == 0:
        return {}
    bg = nx.Graph()
    left = [f"M{h}" for h in range(1, r + 1)]
    bg.add_nodes_from(left, bipartite=0)
    bg.add_nodes_from([f"N{j}" for j in range(1, r + 1)], bipartite=1)
    bg.add_edges_from(pairs)
    match = nx.bipartite.hopcroft_karp_matching(bg, top_nodes=left)
    if sum(1 for v in left if v in match) != r:
        return None
    return {int(v[1:]): int(match[v][1:]) for v in left}


# ---------------------------------------------------------------------------
# search for exchanges of summands


@dataclass
class SwapFinding:
    objects: tuple
    trial: int
    kind: str
    decide_iso: bool
    oracle_iso: bool | None
    pairwise_non_iso: bool


def _random_cyclic_modules(ring, n, rng):
    return [FModule(ring, (rng.randint(1, ring.e),)) for _ in range(n)]


def _other_cyclic(ring, m: FModule, rng) -> FModule:
    """A cyclic module of different length when the ring allows one."""
    choices = [a for a in range(1, ring.e + 1) if (a,) != m.exponents]
    return FModule(ring, (rng.choice(choices),)) if choices else m


def swap_search(ring, n: int, budget: int, seed, oracle_cap: int = 1 << 16) -> list[SwapFinding]:
    """Look for ``A + B = C + D`` with A, B, C, D pairwise non-isomorphic.

    Each trial either draws four random objects or builds C and D from the
    split-chain pieces of random split objects A and B by exchanging the
    pieces at a random subset of indices.  Findings are replayed through the
    decision procedure and, when within ``oracle_cap``, the oracle.
    """
    rng = random.Random(seed)
    findings = []
    for trial in range(budget):
        if trial % 2 == 0:
            pa = _random_cyclic_modules(ring, n, rng)
            pb = [_other_cyclic(ring, m, rng) for m in pa]
            swap = [rng.random() < 0.5 for _ in range(n)]
            if n > 1 and len(set(swap)) == 1:
                swap[rng.randrange(n)] ^= True
            pc = [b if s else a for a, b, s in zip(pa, pb, swap)]
            pd = [a if s else b for a, b, s in zip(pa, pb, swap)]
            quad = tuple(split_chain(x) for x in (pa, pb, pc, pd))
            kind = "split-exchange"
        else:
            budget_obj = ring.p ** min(3, ring.e * 2)
            try:
                quad = tuple(
                    random_object(ring, n, budget_obj, rng.randrange(1 << 30), force_U_n=True) for _ in range(4)
                )
            except InputError:
                continue
            kind = "random"
        a, b, c, d = quad
        pairwise = all(not decide_iso([x], [y]).iso for x, y in itertools.combinations(quad, 2))
        if not pairwise:
            continue
        verdict = decide_iso([a, b], [c, d]).iso
        if not verdict:
            continue
        try:
            oracle = oracle_iso([a, b], [c, d], cap=oracle_cap) is not None
        except CapExceeded:
            oracle = None
        findings.append(SwapFinding(quad, trial, kind, verdict, oracle, pairwise))
    return findings
