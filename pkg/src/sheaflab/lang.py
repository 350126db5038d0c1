"""The many-sorted higher-order language: sorts, terms, formulas.

Concrete syntax::

    sorts     g | s * s | s -> s | P s          (* binds tighter than ->, -> is right-assoc)
    terms     x | x:s | <t, t> | fst t | snd t | t t | (t)
    formulas  E t | t = t | t in t | t <=T t | t <=T (t, t)
              ~ f | f /\\ f | f \\/ f | f => f | f <=> f
              forall x:s. f | exists x:s. f

Precedence from tightest: ``~``, ``/\\``, ``\\/``, ``=>`` (right-assoc), ``<=>``.
Quantifier bodies extend as far right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional, Union


# ------------------------------------------------------------------- sorts
@dataclass(frozen=True)
class Ground:
    name: str


@dataclass(frozen=True)
class Prod:
    left: "Sort"
    right: "Sort"


@dataclass(frozen=True)
class Func:
    dom: "Sort"
    cod: "Sort"


@dataclass(frozen=True)
class Power:
    elem: "Sort"


Sort = Union[Ground, Prod, Func, Power]


# ------------------------------------------------------------------- terms
@dataclass(frozen=True)
class Var:
    name: str
    sort: Optional[Sort] = None


@dataclass(frozen=True)
class Const:
    """A named constant, or (with ``value`` set) a section used as a constant."""

    name: str
    sort: Optional[Sort] = field(default=None, compare=False)
    value: object = None


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"
    sort: Optional[Sort] = field(default=None, compare=False)


@dataclass(frozen=True)
class Fst:
    arg: "Term"
    sort: Optional[Sort] = field(default=None, compare=False)


@dataclass(frozen=True)
class Snd:
    arg: "Term"
    sort: Optional[Sort] = field(default=None, compare=False)


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"
    sort: Optional[Sort] = field(default=None, compare=False)


Term = Union[Var, Const, Pair, Fst, Snd, App]


# ---------------------------------------------------------------- formulas
@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Mem:
    elem: Term
    set: Term


@dataclass(frozen=True)
class Ex:
    term: Term


@dataclass(frozen=True)
class LeT:
    """Turing reducibility between Muchnik reals; ``third`` makes the bound a pair."""

    left: Term
    right: Term
    third: Optional[Term] = None


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sort: Sort
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    body: "Formula"


Formula = Union[Eq, Mem, Ex, LeT, Not, And, Or, Implies, Iff, Forall, Exists]
ATOMS = (Eq, Mem, Ex, LeT)
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)


# ------------------------------------------------------------------ errors
class ParseError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class SortError(ValueError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


# --------------------------------------------------------------- tokenizer
_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><=>|<=T|=>|->|/\\|\\/|[~*()<>,:.=])
  | (?P<name>[A-Za-z0-9_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)
KEYWORDS = {"forall", "exists", "in", "fst", "snd", "E"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok_text = m.group()
        if kind == "ws":
            nl = tok_text.count("\n")
            if nl:
                line += nl
                line_start = pos + tok_text.rindex("\n") + 1
        else:
            out.append(_Tok(kind, tok_text, line, pos - line_start + 1))
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


_RELOPS = {"=", "in", "<=T"}


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, *texts):
        return self.tok.text in texts and self.tok.kind != "eof"

    def expect(self, text):
        if self.tok.text != text or self.tok.kind == "eof":
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        self.i += 1

    def ident(self, what="identifier"):
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # sorts
    def sort(self):
        left = self.sort_prod()
        if self.at("->"):
            self.i += 1
            return Func(left, self.sort())
        return left

    def sort_prod(self):
        left = self.sort_atom()
        while self.at("*"):
            self.i += 1
            left = Prod(left, self.sort_atom())
        return left

    def sort_atom(self):
        if self.at("("):
            self.i += 1
            s = self.sort()
            self.expect(")")
            return s
        if self.tok.kind == "name" and self.tok.text == "P":
            self.i += 1
            return Power(self.sort_atom())
        return Ground(self.ident("sort name"))

    # terms
    def _starts_prim(self):
        t = self.tok
        if t.kind == "name":
            return t.text not in KEYWORDS or t.text in ("fst", "snd")
        return t.text in ("<", "(")

    def term(self):
        t = self.prim()
        while self._starts_prim():
            t = App(t, self.prim())
        return t

    def prim(self):
        tok = self.tok
        if tok.kind == "name" and tok.text in ("fst", "snd"):
            self.i += 1
            arg = self.prim()
            return Fst(arg) if tok.text == "fst" else Snd(arg)
        if self.at("<"):
            self.i += 1
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(">")
            return Pair(a, b)
        if self.at("("):
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        name = self.ident("term")
        if self.at(":"):
            self.i += 1
            return Var(name, self.sort())
        return Var(name)

    # formulas
    def formula(self):
        left = self.imp()
        while self.at("<=>"):
            self.i += 1
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.at("=>"):
            self.i += 1
            return Implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.at("\\/"):
            self.i += 1
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.at("/\\"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self):
        if self.at("~"):
            self.i += 1
            return Not(self.unary())
        if self.tok.kind == "name" and self.tok.text in ("forall", "exists"):
            q = self.tok.text
            self.i += 1
            var = self.ident("bound variable")
            self.expect(":")
            srt = self.sort()
            self.expect(".")
            body = self.formula()
            return Forall(var, srt, body) if q == "forall" else Exists(var, srt, body)
        return self.atom()

    def atom(self):
        if self.tok.kind == "name" and self.tok.text == "E":
            self.i += 1
            return self._no_chain(Ex(self.term()))
        if self.at("("):
            save = self.i
            try:
                self.i += 1
                f = self.formula()
                self.expect(")")
                if not (self.tok.text in _RELOPS and self.tok.kind != "eof") and not self._starts_prim():
                    return f
            except ParseError:
                pass
            self.i = save
        start = self.tok
        left = self.term()
        op = self.tok
        if op.text == "=" and op.kind == "op":
            self.i += 1
            f = Eq(left, self.term())
        elif op.text == "in" and op.kind == "name":
            self.i += 1
            f = Mem(left, self.term())
        elif op.text == "<=T":
            self.i += 1
            f = self._let_rhs(left)
        else:
            found = op.text or "end of input"
            raise self.error(f"expected '=', 'in' or '<=T' after term, found {found!r}", op)
        del start
        return self._no_chain(f)

    def _let_rhs(self, left):
        if self.at("("):
            save = self.i
            self.i += 1
            b = self.term()
            if self.at(","):
                self.i += 1
                c = self.term()
                self.expect(")")
                return LeT(left, b, c)
            self.i = save
        return LeT(left, self.term())

    def _no_chain(self, f):
        if self.tok.text in _RELOPS and self.tok.kind != "eof":
            raise self.error(f"comparison chaining is not allowed ({self.tok.text!r})")
        return f


def parse_sort(text: str) -> Sort:
    p = _Parser(text)
    s = p.sort()
    p.finish()
    return s


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.finish()
    return t


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.finish()
    return f


# ----------------------------------------------------------------- printer
def show_sort(s: Sort) -> str:
    if isinstance(s, Ground):
        return s.name
    if isinstance(s, Prod):
        left = show_sort(s.left)
        right = show_sort(s.right)
        if isinstance(s.left, Func):
            left = f"({left})"
        if isinstance(s.right, (Func, Prod)):
            right = f"({right})"
        return f"{left} * {right}"
    if isinstance(s, Func):
        left = show_sort(s.dom)
        if isinstance(s.dom, Func):
            left = f"({left})"
        return f"{left} -> {show_sort(s.cod)}"
    if isinstance(s, Power):
        inner = show_sort(s.elem)
        if isinstance(s.elem, (Prod, Func)):
            inner = f"({inner})"
        return f"P {inner}"
    raise TypeError(s)


def _needs_parens_as_arg(t) -> bool:
    return isinstance(t, (App, Fst, Snd)) or (isinstance(t, Var) and t.sort is not None)


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        if t.sort is None:
            return t.name
        return f"{t.name}:{show_sort(t.sort)}"
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Pair):
        return f"<{show_term(t.left)}, {show_term(t.right)}>"
    if isinstance(t, (Fst, Snd)):
        kw = "fst" if isinstance(t, Fst) else "snd"
        inner = show_term(t.arg)
        if _needs_parens_as_arg(t.arg):
            inner = f"({inner})"
        return f"{kw} {inner}"
    if isinstance(t, App):
        fun = show_term(t.fun)
        if isinstance(t.fun, Var) and t.fun.sort is not None:
            fun = f"({fun})"
        arg = show_term(t.arg)
        if _needs_parens_as_arg(t.arg):
            arg = f"({arg})"
        return f"{fun} {arg}"
    raise TypeError(t)


def _level(f) -> int:
    if isinstance(f, QUANTIFIERS):
        return 0
    if isinstance(f, Iff):
        return 1
    if isinstance(f, Implies):
        return 2
    if isinstance(f, Or):
        return 3
    if isinstance(f, And):
        return 4
    return 5


_OPS = {And: "/\\", Or: "\\/", Implies: "=>", Iff: "<=>"}


def show_formula(f: Formula) -> str:
    def wrap(g, min_level):
        s = show_formula(g)
        return f"({s})" if _level(g) < min_level else s

    if isinstance(f, Eq):
        return f"{show_term(f.left)} = {show_term(f.right)}"
    if isinstance(f, Mem):
        return f"{show_term(f.elem)} in {show_term(f.set)}"
    if isinstance(f, Ex):
        return f"E {show_term(f.term)}"
    if isinstance(f, LeT):
        if f.third is None:
            return f"{show_term(f.left)} <=T {show_term(f.right)}"
        return f"{show_term(f.left)} <=T ({show_term(f.right)}, {show_term(f.third)})"
    if isinstance(f, Not):
        return f"~ {wrap(f.body, 5)}"
    if isinstance(f, (And, Or)):
        lvl = _level(f)
        return f"{wrap(f.left, lvl)} {_OPS[type(f)]} {wrap(f.right, lvl + 1)}"
    if isinstance(f, Implies):
        return f"{wrap(f.left, 3)} => {wrap(f.right, 2)}"
    if isinstance(f, Iff):
        return f"{wrap(f.left, 1)} <=> {wrap(f.right, 2)}"
    if isinstance(f, QUANTIFIERS):
        q = "forall" if isinstance(f, Forall) else "exists"
        return f"{q} {f.var}:{show_sort(f.sort)}. {show_formula(f.body)}"
    raise TypeError(f)


def show(node) -> str:
    if isinstance(node, (Ground, Prod, Func, Power)):
        return show_sort(node)
    if isinstance(node, (Var, Const, Pair, Fst, Snd, App)):
        return show_term(node)
    return show_formula(node)


# ------------------------------------------------------------ sort checking
@dataclass(frozen=True)
class Signature:
    grounds: frozenset
    constants: dict = field(default_factory=dict)
    real_sort: Optional[str] = None

    def check_sort(self, s: Sort):
        if isinstance(s, Ground):
            if s.name not in self.grounds:
                raise SortError(f"unknown ground sort {s.name!r}", s)
        elif isinstance(s, Prod):
            self.check_sort(s.left)
            self.check_sort(s.right)
        elif isinstance(s, Func):
            self.check_sort(s.dom)
            self.check_sort(s.cod)
        elif isinstance(s, Power):
            self.check_sort(s.elem)


def sort_of(t: Term) -> Optional[Sort]:
    return t.sort


def _check_term(t, sig: Signature, scope: dict):
    if isinstance(t, Var):
        if t.name in scope:
            bound = scope[t.name]
            if t.sort is not None and t.sort != bound:
                raise SortError(
                    f"variable {t.name!r} annotated {show_sort(t.sort)} but bound at {show_sort(bound)}", t
                )
            return Var(t.name, bound)
        if t.sort is not None:
            sig.check_sort(t.sort)
            return t
        if t.name in sig.constants:
            return Const(t.name, sig.constants[t.name])
        raise SortError(f"unknown constant {t.name!r}", t)
    if isinstance(t, Const):
        if t.value is not None:
            if t.sort is None:
                raise SortError(f"section constant {t.name!r} has no sort", t)
            return t
        if t.name not in sig.constants:
            raise SortError(f"unknown constant {t.name!r}", t)
        return Const(t.name, sig.constants[t.name])
    if isinstance(t, Pair):
        a = _check_term(t.left, sig, scope)
        b = _check_term(t.right, sig, scope)
        return Pair(a, b, Prod(a.sort, b.sort))
    if isinstance(t, (Fst, Snd)):
        a = _check_term(t.arg, sig, scope)
        if not isinstance(a.sort, Prod):
            raise SortError(f"projection of non-product term of sort {show_sort(a.sort)}", t)
        if isinstance(t, Fst):
            return Fst(a, a.sort.left)
        return Snd(a, a.sort.right)
    if isinstance(t, App):
        f = _check_term(t.fun, sig, scope)
        a = _check_term(t.arg, sig, scope)
        if not isinstance(f.sort, Func):
            raise SortError(f"application of non-function term of sort {show_sort(f.sort)}", t)
        if f.sort.dom != a.sort:
            raise SortError(
                f"argument of sort {show_sort(a.sort)} where {show_sort(f.sort.dom)} is expected", t
            )
        return App(f, a, f.sort.cod)
    raise TypeError(t)


def _check_formula(f, sig: Signature, scope: dict):
    if isinstance(f, Eq):
        a = _check_term(f.left, sig, scope)
        b = _check_term(f.right, sig, scope)
        if a.sort != b.sort:
            raise SortError(f"equality between sorts {show_sort(a.sort)} and {show_sort(b.sort)}", f)
        return Eq(a, b)
    if isinstance(f, Mem):
        a = _check_term(f.elem, sig, scope)
        b = _check_term(f.set, sig, scope)
        if not isinstance(b.sort, Power):
            raise SortError(f"membership in non-power sort {show_sort(b.sort)}", f)
        if b.sort.elem != a.sort:
            raise SortError(f"membership of {show_sort(a.sort)} in {show_sort(b.sort)}", f)
        return Mem(a, b)
    if isinstance(f, Ex):
        return Ex(_check_term(f.term, sig, scope))
    if isinstance(f, LeT):
        if sig.real_sort is None:
            raise SortError("'<=T' needs a model with a Muchnik-real sort", f)
        real = Ground(sig.real_sort)
        parts = [f.left, f.right] + ([f.third] if f.third is not None else [])
        checked = [_check_term(t, sig, scope) for t in parts]
        for t in checked:
            if t.sort != real:
                raise SortError(f"'<=T' operand of sort {show_sort(t.sort)}, expected {sig.real_sort}", f)
        return LeT(*checked)
    if isinstance(f, Not):
        return Not(_check_formula(f.body, sig, scope))
    if isinstance(f, BINARY):
        return type(f)(_check_formula(f.left, sig, scope), _check_formula(f.right, sig, scope))
    if isinstance(f, QUANTIFIERS):
        sig.check_sort(f.sort)
        inner = dict(scope)
        inner[f.var] = f.sort
        return type(f)(f.var, f.sort, _check_formula(f.body, sig, inner))
    raise TypeError(f)


def sort_check(node, sig: Signature, scope: Optional[dict] = None):
    """Annotate every term with its sort, resolving bare names to constants."""
    scope = dict(scope or {})
    if isinstance(node, (Var, Const, Pair, Fst, Snd, App)):
        return _check_term(node, sig, scope)
    return _check_formula(node, sig, scope)


# ---------------------------------------------------------- free variables
def term_vars(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    if isinstance(t, Pair):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, (Fst, Snd)):
        return term_vars(t.arg)
    if isinstance(t, App):
        return term_vars(t.fun) | term_vars(t.arg)
    raise TypeError(t)


def free_vars(f) -> set:
    if isinstance(f, (Var, Const, Pair, Fst, Snd, App)):
        return term_vars(f)
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Mem):
        return term_vars(f.elem) | term_vars(f.set)
    if isinstance(f, Ex):
        return term_vars(f.term)
    if isinstance(f, LeT):
        out = term_vars(f.left) | term_vars(f.right)
        return out | term_vars(f.third) if f.third is not None else out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    raise TypeError(f)


def is_sentence(f) -> bool:
    return not free_vars(f)


def complexity(f) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return 1 + complexity(f.body)
    if isinstance(f, BINARY):
        return 1 + complexity(f.left) + complexity(f.right)
    if isinstance(f, QUANTIFIERS):
        return 1 + complexity(f.body)
    raise TypeError(f)


# ------------------------------------------------------------ substitution
def _subst_term(t, name, repl):
    if isinstance(t, Var):
        if t.name != name:
            return t
        if t.sort is not None and repl.sort is not None and t.sort != repl.sort:
            raise SortError(
                f"cannot substitute a term of sort {show_sort(repl.sort)} for {name}:{show_sort(t.sort)}", t
            )
        return repl
    if isinstance(t, Const):
        return t
    if isinstance(t, Pair):
        return replace(t, left=_subst_term(t.left, name, repl), right=_subst_term(t.right, name, repl))
    if isinstance(t, (Fst, Snd)):
        return replace(t, arg=_subst_term(t.arg, name, repl))
    if isinstance(t, App):
        return replace(t, fun=_subst_term(t.fun, name, repl), arg=_subst_term(t.arg, name, repl))
    raise TypeError(t)


def substitute(f, name: str, repl: Term, _repl_vars=None):
    """Replace free occurrences of variable ``name`` by ``repl``.

    Raises ``SortError`` if a binder would capture a variable of ``repl``.
    """
    fv = term_vars(repl) if _repl_vars is None else _repl_vars
    if isinstance(f, (Var, Const, Pair, Fst, Snd, App)):
        return _subst_term(f, name, repl)
    if isinstance(f, Eq):
        return Eq(_subst_term(f.left, name, repl), _subst_term(f.right, name, repl))
    if isinstance(f, Mem):
        return Mem(_subst_term(f.elem, name, repl), _subst_term(f.set, name, repl))
    if isinstance(f, Ex):
        return Ex(_subst_term(f.term, name, repl))
    if isinstance(f, LeT):
        third = None if f.third is None else _subst_term(f.third, name, repl)
        return LeT(_subst_term(f.left, name, repl), _subst_term(f.right, name, repl), third)
    if isinstance(f, Not):
        return Not(substitute(f.body, name, repl, fv))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, name, repl, fv), substitute(f.right, name, repl, fv))
    if isinstance(f, QUANTIFIERS):
        if f.var == name:
            return f
        if f.var in fv and name in free_vars(f.body):
            raise SortError(f"substitution for {name!r} would be captured by binder {f.var!r}", f)
        return type(f)(f.var, f.sort, substitute(f.body, name, repl, fv))
    raise TypeError(f)


def substitute_constant(f, name: str, c: Const):
    if not isinstance(c, Const):
        raise TypeError("substitute_constant expects a Const")
    return substitute(f, name, c)
