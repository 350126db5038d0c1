"""Truth values of sentences in a sheaf model over a finite poset.

Every sentence gets an open set of the base.  Quantifiers range over *all*
sections of the sheaf for the bound sort, the empty section included; the
existence guards make the empty section neutral.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import lang
from .lang import (
    And,
    App,
    Const,
    Eq,
    Ex,
    Exists,
    Forall,
    Fst,
    Func,
    Ground,
    Iff,
    Implies,
    LeT,
    Mem,
    Not,
    Or,
    Pair,
    Power,
    Prod,
    Signature,
    Snd,
    Var,
)
from .muchnik import DegreeStructure, MuchnikReals, ValueSystem, let_value
from .poset import Poset
from .sheaf import (
    DEFAULT_STALK_CAP,
    CapExceeded,
    NaturalFamily,
    Section,
    Sheaf,
    function_sheaf,
    power_sheaf,
    product,
)

DEFAULT_QUANTIFIER_CAP = 4096


class EvalError(ValueError):
    pass


@dataclass
class Caps:
    max_points: int = 8
    stalk: int = DEFAULT_STALK_CAP
    quantifier: int = DEFAULT_QUANTIFIER_CAP

    def as_dict(self) -> dict:
        return {"max_points": self.max_points, "stalk": self.stalk, "quantifier": self.quantifier}


class Model:
    """A base poset, sheaves for the ground sorts, and named constants.

    In Muchnik mode the base is the degree poset, ``real_sort`` names the
    ground sort interpreted by the Muchnik reals and ``<=T`` is available.
    """

    def __init__(
        self,
        base: Poset,
        mu: dict,
        constants: Optional[dict] = None,
        *,
        degrees: Optional[DegreeStructure] = None,
        values: Optional[ValueSystem] = None,
        real_sort: Optional[str] = None,
        caps: Optional[Caps] = None,
    ):
        self.base = base
        self.mu = dict(mu)
        self.caps = caps or Caps()
        self.degrees = degrees
        self.values = values
        self.real_sort = real_sort
        for name, m in self.mu.items():
            if m.base != base:
                raise EvalError(f"sheaf for sort {name!r} lives over a different base")
        if real_sort is not None:
            if degrees is None or values is None:
                raise EvalError("a Muchnik-real sort needs a degree structure and a value system")
            if degrees.degrees != base:
                raise EvalError("Muchnik mode requires the degree poset as base")
            if real_sort not in self.mu:
                self.mu[real_sort] = MuchnikReals(degrees, values)
            if not isinstance(self.mu[real_sort], MuchnikReals):
                raise EvalError(f"sort {real_sort!r} must be interpreted by the Muchnik reals")
            values.check(degrees, require_cover=True)
        self._sheaves = {}
        self.constants = {}
        for name, (srt, sec) in (constants or {}).items():
            self.add_constant(name, srt, sec)

    def add_constant(self, name: str, srt, section: Section):
        if isinstance(srt, str):
            srt = lang.parse_sort(srt)
        self.signature_without_constants().check_sort(srt)
        if not self.sheaf_for(srt).is_section(section):
            raise EvalError(f"constant {name!r} is not a section of the sheaf for {lang.show_sort(srt)}")
        self.constants[name] = (srt, section)

    def signature_without_constants(self) -> Signature:
        return Signature(frozenset(self.mu), {}, self.real_sort)

    @property
    def signature(self) -> Signature:
        return Signature(
            frozenset(self.mu), {n: s for n, (s, _) in self.constants.items()}, self.real_sort
        )

    def sheaf_for(self, srt) -> Sheaf:
        """The sheaf for a sort, built from ground sorts by product, exponential and power."""
        if isinstance(srt, str):
            srt = lang.parse_sort(srt)
        got = self._sheaves.get(srt)
        if got is not None:
            return got
        if isinstance(srt, Ground):
            if srt.name not in self.mu:
                raise EvalError(f"no sheaf assigned to ground sort {srt.name!r}")
            out = self.mu[srt.name]
        elif isinstance(srt, Prod):
            out = product(self.sheaf_for(srt.left), self.sheaf_for(srt.right))
        elif isinstance(srt, Func):
            out = function_sheaf(self.sheaf_for(srt.dom), self.sheaf_for(srt.cod), stalk_cap=self.caps.stalk)
        elif isinstance(srt, Power):
            out = power_sheaf(self.sheaf_for(srt.elem), stalk_cap=self.caps.stalk)
        else:
            raise TypeError(srt)
        self._sheaves[srt] = out
        return out

    def restrict_to(self, point) -> "Model":
        """The same data over the subspace ``U_point`` (not for Muchnik mode)."""
        if self.real_sort is not None:
            raise EvalError("restriction of a Muchnik-mode model is not supported")
        sub = self.base.subposet(self.base.minimal_open(point))
        mu = {name: _restrict_sheaf_base(m, sub) for name, m in self.mu.items()}
        out = Model(sub, mu, caps=self.caps)
        pts = set(sub)
        for name, (srt, sec) in self.constants.items():
            fam = {p: _restrict_value(sec[p], pts) for p in sec.extent & pts}
            out.add_constant(name, srt, Section(fam))
        return out

    def parse(self, text: str):
        return lang.sort_check(lang.parse_formula(text), self.signature)

    def __repr__(self):
        sorts = ", ".join(f"{k}={v!r}" for k, v in self.mu.items())
        return f"Model({self.base!r}; {sorts}; {len(self.constants)} constants)"


def _restrict_sheaf_base(m: Sheaf, sub: Poset) -> Sheaf:
    stalks = {a: m.stalks[a] for a in sub}
    trans = {(a, b): m.trans[(a, b)] for a in sub for b in sub.minimal_open(a)}
    return Sheaf(sub, stalks, trans, name=m.name)


def _restrict_value(v, pts):
    if isinstance(v, NaturalFamily):
        return v.restrict(pts)
    if isinstance(v, tuple):
        return tuple(_restrict_value(x, pts) for x in v)
    return v


# --------------------------------------------------------------- evaluator
class Evaluator:
    """Evaluates closed terms and sentences of one model, with memoization."""

    def __init__(self, model: Model, debug: bool = False):
        self.m = model
        self.base = model.base
        self.debug = debug
        self._memo = {}
        self._fv = {}

    def _free(self, node):
        got = self._fv.get(id(node))
        if got is None:
            got = (node, tuple(sorted(lang.free_vars(node))))
            self._fv[id(node)] = got
        return got[1]

    # terms
    def term(self, t, env=None) -> Section:
        env = env or {}
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise EvalError(f"free variable {t.name!r} in a term that should be closed") from None
        if isinstance(t, Const):
            if t.value is not None:
                return t.value
            try:
                return self.m.constants[t.name][1]
            except KeyError:
                raise EvalError(f"unknown constant {t.name!r}") from None
        if isinstance(t, Pair):
            a, b = self.term(t.left, env), self.term(t.right, env)
            return Section((p, (a[p], b[p])) for p in a.extent & b.extent)
        if isinstance(t, Fst):
            a = self.term(t.arg, env)
            return Section((p, v[0]) for p, v in a.family().items())
        if isinstance(t, Snd):
            a = self.term(t.arg, env)
            return Section((p, v[1]) for p, v in a.family().items())
        if isinstance(t, App):
            phi = self.term(t.fun, env)
            a = self.term(t.arg, env)
            return Section((p, phi[p](p, a[p])) for p in a.extent & phi.extent)
        raise TypeError(t)

    # formulas
    def formula(self, f, env=None) -> frozenset:
        env = env or {}
        fv = self._free(f)
        try:
            key = (id(f), tuple(env[v] for v in fv))
        except KeyError as exc:
            raise EvalError(f"free variable {exc.args[0]!r} in a formula that should be closed") from None
        got = self._memo.get(key)
        if got is None:
            got = self._formula(f, env)
            if self.debug and not self.base.is_open(got):
                raise AssertionError(f"truth value {sorted(got)} is not upward closed")
            self._memo[key] = got
        return got

    def _formula(self, f, env) -> frozenset:
        P = self.base
        if isinstance(f, Eq):
            a, b = self.term(f.left, env), self.term(f.right, env)
            out = frozenset(p for p in a.extent & b.extent if a[p] == b[p])
            if self.debug:
                literal = _eq_literal(P, a, b)
                assert literal == out, "equality clause mismatch"
            return out
        if isinstance(f, Ex):
            return self.term(f.term, env).extent
        if isinstance(f, Mem):
            s, t = self.term(f.elem, env), self.term(f.set, env)
            out = set()
            for p in s.extent & t.extent:
                out |= t[p](p, s[p])
            return frozenset(out)
        if isinstance(f, LeT):
            if self.m.real_sort is None:
                raise EvalError("'<=T' outside Muchnik mode")
            a, b = self.term(f.left, env), self.term(f.right, env)
            c = None if f.third is None else self.term(f.third, env)
            return let_value(self.m.degrees, self.m.values, a, b, c)
        if isinstance(f, Not):
            return P.neg(self.formula(f.body, env))
        if isinstance(f, And):
            left = self.formula(f.left, env)
            if not left:
                return left
            return left & self.formula(f.right, env)
        if isinstance(f, Or):
            left = self.formula(f.left, env)
            if left == P.top:
                return left
            return left | self.formula(f.right, env)
        if isinstance(f, Implies):
            left = self.formula(f.left, env)
            if not left:
                return P.top
            return P.imp(left, self.formula(f.right, env))
        if isinstance(f, Iff):
            a, b = self.formula(f.left, env), self.formula(f.right, env)
            return P.imp(a, b) & P.imp(b, a)
        if isinstance(f, Exists):
            return self._exists(f, env)
        if isinstance(f, Forall):
            return self._forall(f, env)
        raise TypeError(f)

    def _domain(self, f):
        m = self.m.sheaf_for(f.sort)
        try:
            secs = m.all_sections(limit=self.m.caps.quantifier)
        except CapExceeded as exc:
            raise CapExceeded(
                f"quantifier over {f.var}:{lang.show_sort(f.sort)} exceeds the cap of "
                f"{self.m.caps.quantifier} sections ({exc})"
            ) from None
        # larger extents first so the early exits below trigger sooner
        return sorted(secs, key=lambda s: -len(s.extent))

    def _exists(self, f, env) -> frozenset:
        P = self.base
        acc = frozenset()
        inner = dict(env)
        for a in self._domain(f):
            if a.extent <= acc:
                continue  # contributes a subset of E(a)
            inner[f.var] = a
            acc = acc | (a.extent & self.formula(f.body, inner))
            if acc == P.top:
                break
        return acc

    def _forall(self, f, env) -> frozenset:
        P = self.base
        acc = P.top
        inner = dict(env)
        parts = [] if self.debug else None
        for a in self._domain(f):
            if not (acc & a.extent) and parts is None:
                continue  # E(a) => X contains the complement interior, which contains acc
            inner[f.var] = a
            val = P.imp(a.extent, self.formula(f.body, inner))
            if parts is not None:
                parts.append(val)
            acc = acc & val
            if not acc and parts is None:
                break
        out = P.interior(acc)
        if parts is not None:
            literal = P.top
            for v in parts:
                literal = literal & v
            assert P.interior(literal) == out, "universal clause mismatch"
        return out


def _eq_literal(P: Poset, a: Section, b: Section) -> frozenset:
    """Union of all opens inside both extents on which ``a`` and ``b`` agree."""
    common = a.extent & b.extent
    out = frozenset()
    for u in P.all_opens():
        if u <= common and all(a[p] == b[p] for p in u):
            out |= u
    return out


def _prepare(m: Model, f):
    if isinstance(f, str):
        f = lang.parse_formula(f)
    return lang.sort_check(f, m.signature)


def eval_term(m: Model, t) -> Section:
    if isinstance(t, str):
        t = lang.parse_term(t)
    t = lang.sort_check(t, m.signature)
    if lang.term_vars(t):
        raise EvalError("term is not closed")
    return Evaluator(m).term(t)


def eval_formula(m: Model, f, *, debug: bool = False) -> frozenset:
    f = _prepare(m, f)
    if lang.free_vars(f):
        raise EvalError(f"not a sentence: free variables {sorted(lang.free_vars(f))}")
    return Evaluator(m, debug=debug).formula(f)


def models(m: Model, f, **kw) -> bool:
    return eval_formula(m, f, **kw) == m.base.top


# ----------------------------------------------------------------- schemas
@dataclass
class SchemaRecord:
    schema: str
    instance: str
    truth_value: list
    verdict: str
    lhs: frozenset = field(default_factory=frozenset)
    rhs: frozenset = field(default_factory=frozenset)
    detail: str = ""
    model: str = ""

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def as_dict(self) -> dict:
        return {
            "schema": self.schema,
            "instance": self.instance,
            "truth_value": self.truth_value,
            "verdict": self.verdict,
            "lhs": sorted(map(str, self.lhs)),
            "rhs": sorted(map(str, self.rhs)),
            "detail": self.detail,
            "model": self.model,
        }


SCHEMAS = ("AC", "GMP", "BP", "ACBP")


def schema_sides(schema: str, template, s, t=None, *, x="x", y="y", w="w", z="z"):
    """Build the antecedent and consequent of a schema around ``template``."""
    if isinstance(s, str):
        s = lang.parse_sort(s)
    if isinstance(t, str):
        t = lang.parse_sort(t)
    fv = lang.free_vars(template)
    for bad in (w, z):
        if bad in fv:
            raise lang.SortError(f"template may not mention {bad!r}")
    X, Y = Var(x), Var(y)
    if schema == "GMP":
        A = template
        lhs = And(Forall(x, s, Or(A, Not(A))), Not(Not(Exists(x, s, A))))
        return lhs, Exists(x, s, A)
    if t is None:
        t = s
    forall_exists = Forall(x, s, Exists(y, t, template))
    wx = App(Var(w), X)
    if schema == "AC":
        A_wx = lang.substitute(template, y, wx)
        return forall_exists, Exists(w, Func(s, t), Forall(x, s, A_wx))
    if schema == "BP":
        body = Exists(y, s, And(LeT(Y, X, Var(z)), template))
        return forall_exists, Exists(z, s, Forall(x, s, body))
    if schema == "ACBP":
        A_wx = lang.substitute(template, y, wx)
        body = And(LeT(wx, X, Var(z)), A_wx)
        return forall_exists, Exists(w, Func(s, s), Exists(z, s, Forall(x, s, body)))
    raise ValueError(f"unknown schema {schema!r}")


def check_schema(m: Model, schema: str, s, t=None, corpus=(), *, x="x", y="y", expect_valid=True) -> list:
    """Evaluate a choice-style schema for each template in ``corpus``.

    Templates are formulas (or text) whose free variables are ``x`` and, for
    two-place schemas, ``y``.  Each record carries the antecedent and
    consequent truth values; the instance holds when the first is contained
    in the second.
    """
    if isinstance(s, str):
        s = lang.parse_sort(s)
    if isinstance(t, str):
        t = lang.parse_sort(t)
    out = []
    for tpl in corpus:
        text = tpl if isinstance(tpl, str) else lang.show_formula(tpl)
        try:
            scope = {x: s} if schema == "GMP" else {x: s, y: t if t is not None else s}
            raw = lang.parse_formula(tpl) if isinstance(tpl, str) else tpl
            A = lang.sort_check(raw, m.signature, scope)
            extra = lang.free_vars(A) - set(scope)
            if extra:
                raise lang.SortError(f"template has unexpected free variables {sorted(extra)}")
            lhs_f, rhs_f = schema_sides(schema, A, s, t, x=x, y=y)
            ev = Evaluator(m)
            lhs = ev.formula(lhs_f)
            rhs = ev.formula(rhs_f)
        except CapExceeded as exc:
            out.append(SchemaRecord(schema, text, [], "cap", detail=str(exc)))
            continue
        value = m.base.imp(lhs, rhs)
        ok = lhs <= rhs
        if expect_valid:
            verdict = "pass" if ok else "fail"
        else:
            verdict = "xpass" if ok else "xfail"
        out.append(
            SchemaRecord(schema, text, m.base.sort_points(value), verdict, lhs, rhs)
        )
    return out
