"""JSON instance files.

An instance file looks like::

    {
      "ring": {"p": 2, "e": 2},
      "n": 2,
      "objects": {
        "A": {"exponents": [2], "chain": [[[2]]]},
        "B": {"exponents": [1, 1], "chain": [[[1, 0]]]}
      }
    }

``chain`` lists the generators of levels 1..n-1 as coordinate vectors in
the object's own coordinates (0-indexed); level 0 and level n are implicit.
``n`` may be omitted when at least one object is given.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .arith import ChainRing
from .chains import ChainObject, chain_object_new
from .errors import InputError
from .fmodule import FModule, submodule_from_generators


@dataclass
class Instance:
    ring: ChainRing
    n: int
    objects: dict[str, ChainObject] = field(default_factory=dict)

    def get(self, name: str) -> ChainObject:
        try:
            return self.objects[name]
        except KeyError:
            raise InputError(f"no object named {name!r}") from None


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise InputError(f"duplicate key {k!r}")
        out[k] = v
    return out


def load_json(text: str):
    try:
        return json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"{what} must be an integer, got {v!r}")
    return v


def parse_ring(data) -> ChainRing:
    if not isinstance(data, dict) or set(data) != {"p", "e"}:
        raise InputError("ring must be an object with keys p and e")
    return ChainRing(_int(data["p"], "p"), _int(data["e"], "e"))


def parse_object(ring: ChainRing, desc, n: int | None = None) -> ChainObject:
    if not isinstance(desc, dict) or not {"exponents", "chain"} <= set(desc):
        raise InputError("object needs 'exponents' and 'chain'")
    exps = [_int(a, "exponent") for a in desc["exponents"]]
    module = FModule(ring, exps)
    chain = desc["chain"]
    if not isinstance(chain, list):
        raise InputError("chain must be a list of generator lists")
    levels = []
    for gens in chain:
        if not isinstance(gens, list):
            raise InputError("each chain level must be a list of coordinate vectors")
        vecs = []
        for g in gens:
            if not isinstance(g, list) or len(g) != module.rank:
                raise InputError(f"generator {g!r} does not have {module.rank} coordinates")
            vecs.append([_int(c, "coordinate") for c in g])
        levels.append(submodule_from_generators(module, vecs))
    return chain_object_new(module, levels, n)


def parse_instance(data) -> Instance:
    if not isinstance(data, dict) or "ring" not in data or "objects" not in data:
        raise InputError("instance needs 'ring' and 'objects'")
    ring = parse_ring(data["ring"])
    objs = data["objects"]
    if not isinstance(objs, dict):
        raise InputError("'objects' must map names to descriptions")
    n = data.get("n")
    if n is None:
        if not objs:
            raise InputError("'n' is required when there are no objects")
        n = len(next(iter(objs.values())).get("chain", [])) + 1
    n = _int(n, "n")
    inst = Instance(ring, n)
    for name, desc in objs.items():
        inst.objects[name] = parse_object(ring, desc, n)
    return inst


def parse_objects_leniently(data):
    """Parse each object on its own, collecting errors instead of stopping."""
    ring = parse_ring(data.get("ring") if isinstance(data, dict) else None)
    objs = data.get("objects", {})
    if not isinstance(objs, dict):
        raise InputError("'objects' must map names to descriptions")
    n = data.get("n")
    if n is None and objs:
        first = next(iter(objs.values()))
        n = len(first.get("chain", [])) + 1 if isinstance(first, dict) else None
    out = {}
    for name, desc in objs.items():
        try:
            out[name] = parse_object(ring, desc, n)
        except InputError as exc:
            out[name] = exc
    return ring, n, out


def object_to_dict(obj: ChainObject) -> dict:
    """Normal form: chain levels as canonical (Howell) generators in actual coordinates."""
    return {
        "exponents": list(obj.module.exponents),
        "chain": [obj.level(i).generators().tolist() for i in range(1, obj.n)],
    }


def instance_to_dict(inst: Instance) -> dict:
    return {
        "ring": {"p": inst.ring.p, "e": inst.ring.e},
        "n": inst.n,
        "objects": {name: object_to_dict(o) for name, o in inst.objects.items()},
    }


def dumps(data) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=2)


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x
