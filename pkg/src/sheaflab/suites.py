"""Named batteries run over a model file or over seeded random models."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from importlib import resources
from itertools import product as cartesian

from . import checks, lang
from . import muchnik as mu
from .generate import (
    atom_model,
    choice_model,
    random_degree_structure,
    random_model,
    random_poset,
    random_sheaf,
    two_valued_models,
)
from .modelio import load_fixture
from .semantics import Caps, Evaluator, Model, SchemaRecord, check_schema, eval_formula
from .sheaf import CapExceeded

# ------------------------------------------------------------------ corpora
CLOSED_POOL = [
    "E a",
    "a = b",
    "a in p",
    "c = d",
    "c in q",
    "E e1",
    "~ E e2",
    "E e1 /\\ E e3",
    "exists x:s. x in p",
    "forall y:t. E y => y in q",
    "c in q \\/ ~ E d",
    "exists x:t. ~ x = c",
]

S_POOL = [
    "_ in p",
    "_ = a",
    "~ _ = b",
    "_ in p \\/ _ = a",
    "E _ /\\ ~ _ in p",
    "exists zz:t. zz in q /\\ _ = a",
]

T_POOL = ["_ in q", "_ = c", "~ _ = d", "E _ /\\ (_ = c \\/ _ = d)"]

# propositional corpus over p, q, r; each letter becomes an existence atom
GLIVENKO_CORPUS = [
    "p \\/ ~ p",
    "~ ~ p => p",
    "((p => q) => p) => p",
    "(p => q) \\/ (q => p)",
    "~ (p /\\ q) => ~ p \\/ ~ q",
    "(~ p => q) => p \\/ q",
    "p => (q => p)",
    "(p => q) => (~ q => ~ p)",
    "(~ q => ~ p) => (p => q)",
    "p /\\ ~ p",
    "p => q",
    "p \\/ q",
    "(p => q) => q",
    "((p => q) => q) => p \\/ q",
    "(p <=> q) \\/ (p <=> ~ q)",
    "(p => q) \\/ (q => r) \\/ (r => p)",
    "p /\\ (q \\/ r) <=> (p /\\ q) \\/ (p /\\ r)",
    "(p => r) /\\ (q => r) => (p \\/ q => r)",
    "~ ~ (p \\/ ~ p)",
    "(p => q) /\\ (q => r) => (p => r)",
    "p \\/ q \\/ r",
    "~ (p <=> ~ p)",
    "(p => (q \\/ r)) => ((p => q) \\/ (p => r))",
    "~ p \\/ ~ ~ p",
]
GLIVENKO_ATOMS = {"p": "E e1", "q": "E e2", "r": "E e3"}

# x : t (simple), y : s or t
AC_CORPUS = [
    "E x /\\ E y",
    "E x => E y",
    "x = c => y = a",
    "x in q => y in p",
    "E y /\\ (x in q \\/ ~ x in q)",
    "x = c /\\ E y",
    "~ x = d => E y",
    "E x /\\ ~ ~ E y",
    "exists zz:t. zz = x /\\ E y",
    "E x /\\ (E y => ~ ~ E y)",
    "(x = c \\/ x = d) => E y",
    "E y /\\ E x /\\ (x in q => ~ E a \\/ E y)",
]

# x : t (simple)
GMP_CORPUS = [
    "x = c",
    "x in q",
    "~ x = d",
    "x = c \\/ x = d",
    "E x /\\ ~ x in q",
    "E x /\\ exists y:s. y in p",
    "x in q /\\ x = c",
    "E x /\\ E a",
]

# x, y : the Muchnik-real sort
ACBP_CORPUS = [
    "E x /\\ E y",
    "y = x",
    "y <=T x /\\ E y",
    "E x /\\ E y /\\ x <=T y",
    "E y /\\ ~ E x",
    "E x /\\ ~ ~ E y",
    "~ y = x /\\ E y",
    "E x /\\ E y /\\ (y <=T x => y = x)",
]


# ----------------------------------------------------------------- battery
@dataclass(frozen=True)
class BatteryEntry:
    name: str
    expect: str
    text: str


def load_battery(path=None) -> list:
    if path is None:
        text = (resources.files("sheaflab") / "data" / "ihol_battery.txt").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [x.strip() for x in line.split("|")]
        if len(parts) != 3 or parts[1] not in ("valid", "xfail"):
            raise ValueError(f"battery line {lineno}: expected 'name | valid|xfail | formula'")
        out.append(BatteryEntry(*parts))
    return out


_UNARY = re.compile(r"\[([PQR]) ([A-Za-z0-9_]+)\]")
_LETTER = re.compile(r"\b([ABC])\b")


def _usable(m: Model, texts, scope=None) -> list:
    """The pool members that sort-check in ``m``."""
    sig = m.signature
    ok = []
    for t in texts:
        try:
            lang.sort_check(lang.parse_formula(t), sig, scope or {})
        except (lang.SortError, lang.ParseError):
            continue
        ok.append(t)
    return ok


def instantiate(entry: BatteryEntry, rng: random.Random, pools: dict) -> str:
    """Fill the placeholders of one battery entry.  Raises KeyError if a pool is empty."""
    text = entry.text
    for letter in sorted(set(_LETTER.findall(text))):
        if not pools["closed"]:
            raise KeyError("closed")
        text = re.sub(rf"\b{letter}\b", "(" + rng.choice(pools["closed"]) + ")", text)
    chosen = {}

    def fill(match):
        key, arg = match.group(1), match.group(2)
        pool = pools["t" if key == "Q" else "s"]
        if not pool:
            raise KeyError(key)
        if key not in chosen:
            chosen[key] = rng.choice(pool)
        return "(" + chosen[key].replace("_", arg) + ")"

    return _UNARY.sub(fill, text)


def model_pools(m: Model) -> dict:
    grounds = set(m.mu)
    return {
        "closed": _usable(m, CLOSED_POOL),
        "s": [
            t for t in S_POOL if "s" in grounds and _usable(m, [t.replace("_", "zs")], {"zs": lang.Ground("s")})
        ],
        "t": [
            t for t in T_POOL if "t" in grounds and _usable(m, [t.replace("_", "zt")], {"zt": lang.Ground("t")})
        ],
    }


# ------------------------------------------------------------------ reports
@dataclass
class SuiteReport:
    suite: str
    header: dict
    records: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.verdict in ("fail", "error")]

    @property
    def ok(self) -> bool:
        return not self.failures

    def counts(self) -> dict:
        out = {}
        for r in self.records:
            out[r.verdict] = out.get(r.verdict, 0) + 1
        return dict(sorted(out.items()))


def _record(schema, instance, verdict, truth=(), detail="", model=""):
    return SchemaRecord(schema, instance, list(truth), verdict, detail=detail, model=model)


def _eval_record(m: Model, schema: str, text: str, expect: str, label: str):
    try:
        f = lang.sort_check(lang.parse_formula(text), m.signature)
        val = Evaluator(m).formula(f)
    except CapExceeded as exc:
        return _record(schema, text, "cap", detail=str(exc), model=label)
    except (lang.SortError, lang.ParseError) as exc:
        return _record(schema, text, "skip", detail=str(exc), model=label)
    holds = val == m.base.top
    if expect == "valid":
        verdict = "pass" if holds else "fail"
    else:
        verdict = "xpass" if holds else "xfail"
    return _record(schema, text, verdict, m.base.sort_points(val), model=label)


def _models(model, seed, count, factory):
    if model is not None:
        return [("model", model)]
    rng = random.Random(seed)
    return [(f"gen{i}", factory(rng)) for i in range(count)]


def run_ihol(model=None, *, seed=0, count=40, per_entry=2, caps=None, battery=None) -> SuiteReport:
    entries = battery if battery is not None else load_battery()
    rep = SuiteReport("ihol", {})
    rng = random.Random(seed)
    for label, m in _models(model, seed, count, lambda r: random_model(r, caps=caps)):
        pools = model_pools(m)
        for entry in entries:
            seen = set()
            for _ in range(per_entry):
                try:
                    text = instantiate(entry, rng, pools)
                except KeyError as exc:
                    rep.records.append(_record("IHOL", f"{entry.name}: {entry.text}", "skip",
                                               detail=f"no pool for placeholder {exc}", model=label))
                    break
                if text in seen:
                    continue
                seen.add(text)
                rec = _eval_record(m, "IHOL", text, entry.expect, label)
                rec.instance = f"{entry.name}: {text}"
                rep.records.append(rec)
    return rep


def classical_value(f, assignment: dict) -> bool:
    """Truth-table value of a propositional formula built from existence atoms."""
    if isinstance(f, lang.Ex):
        return assignment[f.term.name]
    if isinstance(f, lang.Not):
        return not classical_value(f.body, assignment)
    if isinstance(f, lang.And):
        return classical_value(f.left, assignment) and classical_value(f.right, assignment)
    if isinstance(f, lang.Or):
        return classical_value(f.left, assignment) or classical_value(f.right, assignment)
    if isinstance(f, lang.Implies):
        return (not classical_value(f.left, assignment)) or classical_value(f.right, assignment)
    if isinstance(f, lang.Iff):
        return classical_value(f.left, assignment) == classical_value(f.right, assignment)
    raise TypeError(f"not propositional: {f!r}")


def glivenko_sentence(text: str) -> str:
    return re.sub(r"\b([pqr])\b", lambda mt: GLIVENKO_ATOMS[mt.group(1)], text)


def is_tautology(text: str) -> bool:
    f = lang.parse_formula(glivenko_sentence(text))
    names = sorted({v for v in re.findall(r"e\d", glivenko_sentence(text))})
    return all(
        classical_value(f, dict(zip(names, bits)))
        for bits in cartesian((False, True), repeat=len(names))
    )


def run_glivenko(*, seed=0, count=60, corpus=None) -> SuiteReport:
    corpus = corpus or GLIVENKO_CORPUS
    rng = random.Random(seed)
    ms = two_valued_models() + [atom_model(rng) for _ in range(count)]
    rep = SuiteReport("glivenko", {})
    for text in corpus:
        sentence = "~ ~ (" + glivenko_sentence(text) + ")"
        valid_everywhere = all(eval_formula(m, sentence) == m.base.top for m in ms)
        taut = is_tautology(text)
        verdict = "pass" if valid_everywhere == taut else "fail"
        detail = f"tautology={taut} double-negation-valid={valid_everywhere}"
        rep.records.append(_record("GLIVENKO", text, verdict, detail=detail))
    return rep


def run_choice(schema: str, model=None, *, seed=0, count=30, caps=None, corpus=None, sorts=None) -> SuiteReport:
    """AC with a simple domain sort, or GMP over a simple sort."""
    if corpus is None:
        corpus = AC_CORPUS if schema == "AC" else GMP_CORPUS
    if sorts is None:
        sorts = [("t", "s"), ("t", "t")] if schema == "AC" else [("t", None)]
    name = "ac-simple" if schema == "AC" else "gmp"
    rep = SuiteReport(name, {})
    for label, m in _models(model, seed, count, lambda r: choice_model(r, caps=caps)):
        for s, t in sorts:
            usable = _usable_templates(m, corpus, s, t, schema)
            for rec in check_schema(m, schema, s, t, usable):
                rec.model = label
                rec.instance = f"{schema}({s},{t or s}): {rec.instance}"
                rep.records.append(rec)
    return rep


def _usable_templates(m, corpus, s, t, schema):
    scope = {"x": lang.parse_sort(s)}
    if schema != "GMP":
        scope["y"] = lang.parse_sort(t or s)
    return _usable(m, corpus, scope)


REAL_FIXTURES = ("reals_k2", "reals_chain3")


def muchnik_models(model=None, *, seed=0, count=0):
    if model is not None:
        return [("model", model)]
    out = [(name, load_fixture(name)) for name in REAL_FIXTURES]
    rng = random.Random(seed)
    while len(out) < len(REAL_FIXTURES) + count:
        ds = random_degree_structure(rng, max_oracles=3)
        try:
            ds.require_semilattice()
        except mu.MuchnikError:
            continue
        vals = {f"v{i}": d for i, d in enumerate(ds.degrees)}
        vs = mu.ValueSystem(list(vals), vals)
        out.append((f"gen{len(out)}", Model(ds.degrees, {}, degrees=ds, values=vs, real_sort="R")))
    return out


def run_acbp(model=None, *, seed=0, count=2, corpus=None, schemas=("ACBP", "AC", "BP")) -> SuiteReport:
    corpus = corpus or ACBP_CORPUS
    rep = SuiteReport("acbp", {})
    for label, m in muchnik_models(model, seed=seed, count=count):
        if m.real_sort is None:
            rep.records.append(_record("ACBP", "-", "error", detail="model has no Muchnik-real sort", model=label))
            continue
        r = m.real_sort
        for schema in schemas:
            usable = _usable(m, corpus, {"x": lang.Ground(r), "y": lang.Ground(r)})
            for rec in check_schema(m, schema, r, r, usable):
                rec.model = label
                rec.instance = f"{schema}: {rec.instance}"
                rep.records.append(rec)
    return rep


def run_heyting(model=None, **_) -> SuiteReport:
    rep = SuiteReport("heyting-laws", {})
    posets = [model.base] if model is not None else checks.posets_up_to_iso(4)
    for P in posets:
        bad = checks.heyting_violations(P)
        rep.records.append(_record("HEYTING", repr(P), "fail" if bad else "pass", detail="; ".join(bad[:3])))
    return rep


def run_duality(model=None, *, seed=0, count=50, **_) -> SuiteReport:
    rep = SuiteReport("muchnik-duality", {})
    if model is not None:
        if model.degrees is None:
            rep.records.append(_record("DUALITY", "-", "error", detail="model has no degree structure"))
            return rep
        structures = [("model", model.degrees)]
    else:
        rng = random.Random(seed)
        structures = [(f"gen{i}", random_degree_structure(rng)) for i in range(count)]
    for label, ds in structures:
        bad = checks.duality_violations(ds) + checks.distributivity_violations(ds, max_family=2)
        inst = f"{len(ds.oracles)} oracles, {len(ds.degrees)} degrees, {len(ds.degrees.all_opens())} weak degrees"
        rep.records.append(_record("DUALITY", inst, "fail" if bad else "pass", detail="; ".join(bad[:3]), model=label))
    return rep


def run_sheaf_axioms(model=None, *, seed=0, count=200, **_) -> SuiteReport:
    rep = SuiteReport("sheaf-axioms", {})
    rng = random.Random(seed)
    if model is not None:
        sheaves = [(f"sort {n}", sh) for n, sh in model.mu.items()]
    else:
        sheaves = []
        for i in range(count):
            P = random_poset(rng)
            sheaves.append((f"gen{i}", random_sheaf(rng, P)))
    for label, sh in sheaves:
        bad = checks.sheaf_axiom_violations(sh, random.Random(rng.random()))
        rep.records.append(_record("SHEAF", f"{sh!r} over {sh.base!r}", "fail" if bad else "pass",
                                   detail="; ".join(bad[:3]), model=label))
    return rep


SUITES = {
    "ihol": run_ihol,
    "ac-simple": lambda model=None, **kw: run_choice("AC", model, **kw),
    "gmp": lambda model=None, **kw: run_choice("GMP", model, **kw),
    "acbp": run_acbp,
    "heyting-laws": run_heyting,
    "muchnik-duality": run_duality,
    "sheaf-axioms": run_sheaf_axioms,
    "glivenko": lambda model=None, **kw: run_glivenko(**{k: v for k, v in kw.items() if k in ("seed", "count")}),
}


def run_suite(name: str, model=None, *, seed=0, caps: Caps | None = None, count=None) -> SuiteReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    kw = {"seed": seed}
    if count is not None:
        kw["count"] = count
    if caps is not None and name in ("ihol", "ac-simple", "gmp"):
        kw["caps"] = caps
    rep = SUITES[name](model, **kw)
    caps = caps or (model.caps if model is not None else Caps())
    rep.header = {
        "suite": name,
        "seed": seed,
        "source": "model file" if model is not None else "generated",
        "caps": caps.as_dict(),
    }
    return rep
