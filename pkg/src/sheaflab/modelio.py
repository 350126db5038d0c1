"""Reading and describing JSON model files (``"schema": 1``)."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from . import lang
from .generate import characteristic_section
from .muchnik import DegreeStructure, MuchnikReals, ValueSystem
from .poset import Poset
from .semantics import Caps, EvalError, Model
from .sheaf import Section, Sheaf, SimpleSheaf, simple_sheaf, terminal

SCHEMA_VERSION = 1


class ModelFileError(ValueError):
    pass


def _poset(block, what="poset") -> Poset:
    if not isinstance(block, dict) or "elements" not in block:
        raise ModelFileError(f"{what} block needs an 'elements' list")
    return Poset(block["elements"], [tuple(p) for p in block.get("leq", [])])


def _pairs(spec):
    if isinstance(spec, dict):
        return list(spec.items())
    return [tuple(kv) for kv in spec]


def _sheaf(name, spec, base: Poset, degrees=None, values=None) -> Sheaf:
    kind = spec.get("kind", "functor")
    if kind == "functor":
        stalks = {p: tuple(spec.get("stalks", {}).get(p, ())) for p in base}
        trans = {}
        given = spec.get("transitions", [])
        if isinstance(given, dict):
            # {"a->b": {"x": "y"}} form
            given = [key.split("->") + [mapping] for key, mapping in given.items()]
        for entry in given:
            a, b, mapping = entry
            trans[(a.strip() if isinstance(a, str) else a, b.strip() if isinstance(b, str) else b)] = dict(
                _pairs(mapping)
            )
        return Sheaf(base, stalks, trans, name=name)
    if kind == "simple":
        return simple_sheaf(base, spec["values"], name=name)
    if kind == "terminal":
        return terminal(base)
    raise ModelFileError(f"sort {name!r}: unknown sheaf kind {kind!r}")


def _section(m: Model, name: str, spec: dict):
    srt = lang.parse_sort(spec["sort"])
    sh = m.sheaf_for(srt) if not isinstance(srt, lang.Power) else None
    if "section" in spec:
        return srt, Section(spec["section"])
    if "function" in spec:
        if not isinstance(sh, SimpleSheaf):
            raise ModelFileError(f"constant {name!r}: 'function' needs a simple sort")
        return srt, sh.section_from_function(spec["function"])
    if "value" in spec:
        if not isinstance(sh, MuchnikReals):
            raise ModelFileError(f"constant {name!r}: 'value' needs the Muchnik-real sort")
        if "extent" in spec:
            return srt, sh.section(spec["value"], spec["extent"])
        return srt, sh.hat(spec["value"])
    if "subsheaf" in spec:
        if not isinstance(srt, lang.Power):
            raise ModelFileError(f"constant {name!r}: 'subsheaf' needs a power sort")
        elem = m.sheaf_for(srt.elem)
        sub = {p: frozenset(spec["subsheaf"].get(p, ())) for p in m.base}
        for (a, b), f in elem.trans.items():
            if any(f[x] not in sub[b] for x in sub[a]):
                raise ModelFileError(f"constant {name!r}: subsheaf is not closed under {a}->{b}")
        return srt, characteristic_section(elem, sub)
    raise ModelFileError(f"constant {name!r} needs one of section, function, value, subsheaf")


def model_from_dict(data: dict) -> Model:
    if data.get("schema") != SCHEMA_VERSION:
        raise ModelFileError(f"unsupported model schema {data.get('schema')!r}, expected {SCHEMA_VERSION}")
    caps = Caps(**data.get("caps", {}))
    for k, v in caps.as_dict().items():
        if not isinstance(v, int) or v <= 0:
            raise ModelFileError(f"cap {k!r} must be a positive integer")
    degrees = values = real_sort = None
    mblock = data.get("muchnik")
    if mblock is not None:
        if "degrees" in mblock:
            degrees = DegreeStructure(
                _poset(mblock["degrees"], "degrees"),
                mblock["oracles"],
                [tuple(p) for p in mblock.get("oracle_leq", [])],
                mblock["deg"],
            )
        else:
            degrees = DegreeStructure.from_preorder(
                mblock["oracles"], [tuple(p) for p in mblock.get("oracle_leq", [])]
            )
        if "values" in mblock:
            vals = mblock["values"]
            values = ValueSystem(list(vals), dict(vals))
            real_sort = mblock.get("real_sort", "R")
    if "poset" in data:
        base = _poset(data["poset"])
        if degrees is not None and base != degrees.degrees:
            raise ModelFileError("poset block and degree poset differ")
    elif degrees is not None:
        base = degrees.degrees
    else:
        raise ModelFileError("model file needs a poset block")
    if len(base) > caps.max_points:
        raise ModelFileError(f"poset has {len(base)} points, cap is {caps.max_points}")
    mu = {name: _sheaf(name, spec, base) for name, spec in data.get("sorts", {}).items()}
    m = Model(base, mu, degrees=degrees, values=values, real_sort=real_sort, caps=caps)
    for name, spec in data.get("constants", {}).items():
        srt, sec = _section(m, name, spec)
        m.add_constant(name, srt, sec)
    return m


def load_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFileError(f"{path}: invalid JSON ({exc})") from None
    try:
        return model_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ModelFileError(f"{path}: malformed model file ({exc!r})") from None


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("sheaflab") / "data" / name))


def load_fixture(name: str) -> Model:
    if not name.endswith(".json"):
        name += ".json"
    return load_model(fixture_path(name))


def describe(m: Model) -> str:
    lines = [f"base: {m.base!r}"]
    for name, sh in m.mu.items():
        stalks = ", ".join(f"{p}:{len(sh.stalks[p])}" for p in m.base)
        lines.append(f"sort {name}: {type(sh).__name__} [{stalks}]")
    for name, (srt, sec) in m.constants.items():
        ext = m.base.sort_points(sec.extent)
        lines.append(f"const {name} : {lang.show_sort(srt)}  extent {ext}")
    if m.degrees is not None:
        lines.append(f"degrees: {m.degrees.degrees!r}")
        lines.append("oracles: " + ", ".join(f"{f}->{m.degrees.deg[f]}" for f in m.degrees.oracles))
    if m.values is not None:
        lines.append("values: " + ", ".join(f"{v}@{m.values.vdeg[v]}" for v in m.values.values))
    caps = m.caps.as_dict()
    lines.append("caps: " + ", ".join(f"{k}={v}" for k, v in caps.items()))
    return "\n".join(lines)
