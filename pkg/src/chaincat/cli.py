"""Command-line front end.

Every command prints one JSON report on standard output.  Exit codes:
0 success, 1 a checked statement failed, 2 bad input, 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path

from . import io
from .arith import ChainRing
from .chains import is_in_U_n
from .decompose import decide_iso, decide_iso_general, oracle_iso, swap_search, verify_iso
from .endo import (
    EndoRing,
    EmptyIdealWarning,
    ideal_checklist,
    ideal_I,
    semisimple_report,
)
from .errors import CapExceeded, InputError, NotIncreasing, TheoremViolation
from .homs import CLASS_KINDS, same_class
from .sweep import SweepConfig, run_sweep

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class Outcome(Exception):
    """Carries a finished report and exit code out of a command."""

    def __init__(self, result, findings=(), code=None):
        self.result = result
        self.findings = list(findings)
        self.code = code


def _load(path: str) -> io.Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return io.parse_instance(io.load_json(text))


def cmd_validate(args):
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
    ring, n, parsed = io.parse_objects_leniently(io.load_json(text))
    objects, bad = {}, False
    for name, obj in parsed.items():
        if isinstance(obj, Exception):
            bad = True
            entry = {"valid": False, "error": str(obj), "error_type": type(obj).__name__}
            if isinstance(obj, NotIncreasing):
                entry["index"] = obj.index
            objects[name] = entry
            continue
        objects[name] = {
            "valid": True,
            "profile": list(obj.profile),
            "in_U_n": is_in_U_n(obj),
            "uniserial_or_zero": obj.is_uniserial_or_zero(),
            "order": obj.order,
        }
    result = {"ring": {"p": ring.p, "e": ring.e}, "n": n, "objects": objects}
    return Outcome(result, code=EXIT_INPUT if bad else None)


def cmd_classes(args):
    inst = _load(args.file)
    a, b = inst.get(args.a), inst.get(args.b)
    grid = {f"{i}{k}": same_class(a, b, i, k) for i in range(1, inst.n + 1) for k in CLASS_KINDS}
    return Outcome({"a": args.a, "b": args.b, "grid": grid})


def cmd_endo(args):
    inst = _load(args.file)
    obj = inst.get(args.obj)
    e = EndoRing(obj, cap=args.endo_cap)
    result = {"object": args.obj, "order": e.order, "units": int(e.units().sum())}
    findings = []
    if obj.is_uniserial_or_zero():
        ideals = {}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EmptyIdealWarning)
            for i in range(1, obj.n + 1):
                for k in CLASS_KINDS:
                    ideal = ideal_I(e, i, k)
                    ideals[f"{i}{k}"] = {"order": ideal.order, "empty": ideal.is_empty()}
        result["ideals"] = ideals
        try:
            rep = semisimple_report(e)
            result["semisimple"] = rep.summary()
            checklist = ideal_checklist(e)
            result["checklist"] = checklist
            findings += [{"clause": k} for k, v in checklist.items() if not v]
            findings += [{"clause": k} for k, v in rep.checks.items() if not v]
        except TheoremViolation as exc:
            findings.append({"violation": type(exc).__name__, "message": str(exc)})
    else:
        rep = semisimple_report(e, strict=False)
        result["semisimple"] = rep.summary()
    result["radical_order"] = result["semisimple"]["radical_order"] if "semisimple" in result else None
    return Outcome(result, findings)


def _lists(inst, args):
    return [inst.get(x) for x in args.lhs], [inst.get(x) for x in args.rhs]


def cmd_decide(args):
    inst = _load(args.file)
    ms, ns = _lists(inst, args)
    rep = (decide_iso_general if args.general else decide_iso)(ms, ns)
    result = {"decision": rep.to_dict()}
    verdict = rep.iso
    if args.inject_mutant:
        verdict = not verdict
        result["mutant"] = True
    findings = []
    if args.cross_check:
        witness = oracle_iso(ms, ns, cap=args.oracle_cap)
        oracle = witness is not None
        result["oracle"] = {"iso": oracle}
        if oracle != verdict:
            findings.append({"violation": "oracle disagreement", "decide": verdict, "oracle": oracle})
    return Outcome(result, findings)


def cmd_oracle(args):
    inst = _load(args.file)
    ms, ns = _lists(inst, args)
    f = oracle_iso(ms, ns, cap=args.oracle_cap)
    result = {"iso": f is not None, "witness": None if f is None else f.matrix.tolist()}
    findings = []
    if f is not None:
        result["verified"] = verify_iso(f)
        if not result["verified"]:
            findings.append({"violation": "witness failed verification"})
    return Outcome(result, findings)


def cmd_sweep(args):
    cfg = SweepConfig(
        p=args.p, e=args.e, n=args.n, count=args.count, seed=args.seed,
        max_length=args.max_length, endo_cap=args.endo_cap, oracle_cap=args.oracle_cap,
        hall_max_r=args.hall_max_r, mutant=args.inject_mutant,
    )
    rep = run_sweep(cfg)
    out = rep.to_dict()
    findings = out.pop("findings")
    return Outcome(out, findings)


def cmd_swap_search(args):
    ring = ChainRing(args.p, args.e)
    found = swap_search(ring, args.n, args.budget, args.seed, oracle_cap=min(args.oracle_cap, 1 << 16))
    items, findings = [], []
    for fd in found:
        items.append({
            "trial": fd.trial,
            "kind": fd.kind,
            "objects": [io.object_to_dict(o) for o in fd.objects],
            "decide_iso": fd.decide_iso,
            "oracle_iso": fd.oracle_iso,
            "pairwise_non_iso": fd.pairwise_non_iso,
        })
        if fd.oracle_iso is False:
            findings.append({"violation": "oracle rejects a reported exchange", "trial": fd.trial})
    result = {"found": items, "summary": f"{len(items)} found" if items else "none within budget"}
    return Outcome(result, findings)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--endo-cap", type=int, default=1 << 16)
    p.add_argument("--oracle-cap", type=int, default=1 << 20)
    p.add_argument("--hall-max-r", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaincat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check chains and report factor profiles")
    p.add_argument("file")
    _common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classes", help="grid of class comparisons between two objects")
    p.add_argument("file")
    p.add_argument("a")
    p.add_argument("b")
    _common(p)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("endo", help="endomorphism ring report")
    p.add_argument("file")
    p.add_argument("obj")
    _common(p)
    p.set_defaults(func=cmd_endo)

    for name, func in (("decide", cmd_decide), ("oracle", cmd_oracle)):
        p = sub.add_parser(name, help="isomorphism of two sums of named objects")
        p.add_argument("file")
        p.add_argument("--lhs", nargs="+", required=True)
        p.add_argument("--rhs", nargs="+", required=True)
        if name == "decide":
            p.add_argument("--general", action="store_true", help="allow zero factors")
            p.add_argument("--cross-check", action="store_true", help="compare with the oracle")
            p.add_argument("--inject-mutant", action="store_true", help=argparse.SUPPRESS)
        _common(p)
        p.set_defaults(func=func)

    for name, func in (("sweep", cmd_sweep), ("swap-search", cmd_swap_search)):
        p = sub.add_parser(name, help="randomized property sweep" if name == "sweep" else "search for summand exchanges")
        p.add_argument("--p", type=int, default=2)
        p.add_argument("--e", type=int, default=2)
        p.add_argument("--n", type=int, default=2)
        if name == "sweep":
            p.add_argument("--max-length", type=int, default=6)
            p.add_argument("--inject-mutant", action="store_true", help=argparse.SUPPRESS)
        else:
            p.add_argument("--budget", type=int, default=20)
        _common(p)
        p.set_defaults(func=func)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    report = {"command": args.command, "config": _config(args), "findings": [], "result": None}
    try:
        out = args.func(args)
        report["result"] = out.result
        report["findings"] = out.findings
        code = out.code if out.code is not None else (EXIT_VIOLATION if out.findings else EXIT_OK)
    except CapExceeded as exc:
        report["error"] = {"type": "CapExceeded", "message": str(exc), "size": exc.size, "cap": exc.cap}
        code = EXIT_CAP
    except TheoremViolation as exc:
        report["findings"] = [{"violation": type(exc).__name__, "message": str(exc)}]
        code = EXIT_VIOLATION
    except InputError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, NotIncreasing):
            report["error"]["index"] = exc.index
        print(f"chaincat: {exc}", file=sys.stderr)
        code = EXIT_INPUT
    report["exit_code"] = code
    report["timing"] = round(time.perf_counter() - t0, 6)
    print(io.dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
