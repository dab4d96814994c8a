import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincat import io
from chaincat.arith import ChainRing
from chaincat.chains import random_object
from chaincat.cli import main
from chaincat.errors import InputError

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    report = json.loads(out)
    assert report["exit_code"] == code
    return code, report


def test_validate(capsys):
    code, rep = run(capsys, "validate", DATA / "pair.json")
    assert code == 0 and all(o["in_U_n"] for o in rep["result"]["objects"].values())


def test_validate_decreasing_chain(capsys):
    code, rep = run(capsys, "validate", DATA / "bad.json")
    assert code == 2
    objs = rep["result"]["objects"]
    assert objs["dec"]["valid"] is False and objs["dec"]["index"] == 2
    assert objs["ok"]["valid"] and objs["ok"]["profile"] == [1, 1, 0] and not objs["ok"]["in_U_n"]


def test_classes_grid(capsys):
    code, rep = run(capsys, "classes", DATA / "pair.json", "A", "A")
    assert code == 0 and all(rep["result"]["grid"].values())
    code, rep = run(capsys, "classes", DATA / "pair.json", "A", "B")
    assert rep["result"]["grid"]["1m"] is False


def test_classes_padding_pattern(capsys):
    # Z has a zero top factor; P is Z + S(Z)
    code, rep = run(capsys, "classes", DATA / "zero.json", "P", "Z")
    grid = rep["result"]["grid"]
    assert grid["1m"] and grid["1e"] and not grid["2m"] and not grid["2e"]


def test_endo(capsys):
    code, rep = run(capsys, "endo", DATA / "pair.json", "B")
    assert code == 0
    assert rep["result"]["order"] == 8 and rep["result"]["semisimple"]["k"] == 2
    assert all(rep["result"]["checklist"].values())
    code, rep = run(capsys, "endo", DATA / "pair.json", "X", "--endo-cap", 4)
    assert code == 3 and rep["error"]["type"] == "CapExceeded"


def test_decide_and_oracle(capsys):
    code, rep = run(capsys, "decide", DATA / "pair.json", "--lhs", "X", "Y", "--rhs", "Y", "X", "--cross-check")
    assert code == 0 and rep["result"]["decision"]["verdict"] == "iso" and rep["result"]["oracle"]["iso"]
    code, rep = run(capsys, "decide", DATA / "pair.json", "--lhs", "A", "--rhs", "B")
    assert code == 0 and rep["result"]["decision"]["failure_witness"]["i"] == 1
    code, rep = run(capsys, "oracle", DATA / "pair.json", "--lhs", "X", "Y", "--rhs", "Y", "X")
    assert code == 0 and rep["result"]["verified"]


def test_decide_general(capsys):
    code, rep = run(capsys, "decide", DATA / "zero.json", "--general", "--lhs", "P", "--rhs", "Z", "S", "--cross-check")
    assert code == 0
    d = rep["result"]["decision"]
    assert d["verdict"] == "iso" and (d["r"], d["s"]) == (1, 2)


def test_decide_mutant_is_caught(capsys):
    code, rep = run(capsys, "decide", DATA / "pair.json", "--lhs", "A", "--rhs", "B", "--cross-check", "--inject-mutant")
    assert code == 1 and rep["findings"]


def test_input_errors(capsys):
    code, _ = run(capsys, "decide", DATA / "zero.json", "--lhs", "Z", "--rhs", "Z")
    assert code == 2
    code, _ = run(capsys, "decide", DATA / "pair.json", "--lhs", "A", "--rhs", "nope")
    assert code == 2
    code, _ = run(capsys, "validate", DATA / "missing.json")
    assert code == 2


def _strip(text):
    rep = json.loads(text)
    rep.pop("timing")
    return rep


def test_sweep_deterministic_and_mutant(capsys):
    args = ("sweep", "--seed", 4, "--count", 3)
    code, _ = run(capsys, *args)
    assert code == 0
    main([str(a) for a in args])
    first = capsys.readouterr().out
    main([str(a) for a in args])
    second = capsys.readouterr().out
    assert _strip(first) == _strip(second)
    code, rep = run(capsys, *args, "--inject-mutant")
    assert code == 1 and all(f["check"] == "classes_vs_brute" for f in rep["findings"])


def test_swap_search_cli(capsys):
    code, rep = run(capsys, "swap-search", "--budget", 4)
    assert code == 0 and rep["result"]["found"]


def test_duplicate_names_rejected():
    with pytest.raises(InputError):
        io.load_json('{"ring": {"p": 2, "e": 2}, "objects": {"A": {}, "A": {}}}')


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([ChainRing(2, 2), ChainRing(3, 2)]), st.integers(1, 3), st.integers(0, 2**30))
def test_round_trip(ring, n, seed):
    x = random_object(ring, n, ring.p**4, seed)
    inst = io.Instance(ring, n, {"x": x})
    once = io.instance_to_dict(inst)
    again = io.instance_to_dict(io.parse_instance(json.loads(io.dumps(once))))
    assert once == again
    assert io.parse_instance(once).get("x") == x
