"""Seeded random posets, sheaves, models and degree structures.

Everything here takes a ``random.Random`` (or a seed) so that a seed fully
determines the output.
"""
from __future__ import annotations

import random
from itertools import product as cartesian

from .lang import parse_sort
from .muchnik import DegreeStructure, ValueSystem, random_preorder
from .poset import Poset
from .semantics import Caps, Model
from .sheaf import (
    CapExceeded,
    NaturalFamily,
    Section,
    Sheaf,
    SheafError,
    simple_sheaf,
    terminal,
)

MAX_GEN_POINTS = 4
MAX_GEN_STALK = 3
MAX_GEN_VALUES = 3


def _rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def random_poset(rng, n: int | None = None, p_edge: float = 0.4, max_points: int = MAX_GEN_POINTS) -> Poset:
    rng = _rng(rng)
    if n is None:
        n = rng.randint(1, max_points)
    pts = [f"p{i}" for i in range(n)]
    # edges only go forward in index order, so no cycles
    pairs = [(pts[i], pts[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p_edge]
    return Poset(pts, pairs)


def random_sheaf(rng, base: Poset, max_stalk: int = MAX_GEN_STALK, tries: int = 40, name: str = "") -> Sheaf:
    """A functor sheaf with random stalk sizes and random transition maps.

    Random maps along covering pairs are retried until they compose
    consistently; after ``tries`` failures every map sends everything to the
    first element of its target, which is always functorial.
    """
    rng = _rng(rng)
    sizes = {a: rng.randint(0, max_stalk) for a in base}
    # a point above a nonempty stalk needs a nonempty stalk
    for a in base.linear_extension:
        if any(sizes[b] > 0 for b in base.down(a) if b != a):
            sizes[a] = max(sizes[a], 1)
    stalks = {a: tuple(range(sizes[a])) for a in base}
    for _ in range(tries):
        trans = {
            (a, b): {x: rng.choice(stalks[b]) for x in stalks[a]}
            for a, b in base.covers
        }
        try:
            return Sheaf(base, stalks, trans, name=name)
        except SheafError:
            continue
    trans = {(a, b): {x: stalks[b][0] for x in stalks[a]} for a, b in base.covers}
    return Sheaf(base, stalks, trans, name=name)


def random_section(rng, m: Sheaf, limit: int = 4096) -> Section:
    secs = m.all_sections(limit=limit)
    return secs[_rng(rng).randrange(len(secs))]


def random_open(rng, p: Poset):
    opens = p.all_opens()
    return opens[_rng(rng).randrange(len(opens))]


def characteristic_section(m: Sheaf, sub: dict) -> Section:
    """The global section of the power sheaf classifying a subfunctor.

    ``sub`` maps each point to a subset of its stalk, closed under the
    transitions.  At ``q`` an element ``x`` is sent to the open set of points
    above ``q`` where it lands inside ``sub``.
    """
    p = m.base
    fam = {}
    for a in p:
        comps = {}
        for q in p.minimal_open(a):
            comps[q] = {
                x: frozenset(r for r in p.minimal_open(q) if m.trans[(q, r)][x] in sub[r])
                for x in m.stalks[q]
            }
        fam[a] = NaturalFamily(comps)
    return Section(fam)


def random_subfunctor(rng, m: Sheaf) -> dict:
    rng = _rng(rng)
    sub = {}
    for a in m.base.linear_extension:
        forced = {
            m.trans[(b, a)][x] for b in m.base.down(a) if b != a for x in sub[b]
        }
        sub[a] = frozenset(forced | {x for x in m.stalks[a] if rng.random() < 0.5})
    return sub


def random_model(rng, *, max_points: int = MAX_GEN_POINTS, max_stalk: int = MAX_GEN_STALK,
                 max_values: int = MAX_GEN_VALUES, caps: Caps | None = None, base: Poset | None = None) -> Model:
    """A model for the default batteries.

    Ground sorts: ``s`` a functor sheaf, ``t`` a simple sheaf, ``u`` the
    terminal sheaf.  Constants ``a, b : s``, ``c, d : t``, ``e1, e2, e3 : u``
    and predicates ``p : P s``, ``q : P t`` given as random subfunctors.
    """
    rng = _rng(rng)
    base = base or random_poset(rng, max_points=max_points)
    s = random_sheaf(rng, base, max_stalk=max_stalk, name="s")
    t = simple_sheaf(base, list(range(rng.randint(1, max_values))), name="t")
    u = terminal(base)
    m = Model(base, {"s": s, "t": t, "u": u}, caps=caps)
    for name in ("a", "b"):
        m.add_constant(name, "s", random_section(rng, s))
    for name in ("c", "d"):
        m.add_constant(name, "t", random_section(rng, t))
    for name in ("e1", "e2", "e3"):
        m.add_constant(name, "u", random_section(rng, u))
    for name, srt, sh in (("p", "P s", s), ("q", "P t", t)):
        _add_predicate(m, name, srt, sh, random_subfunctor(rng, sh))
    return m


def _add_predicate(m: Model, name, srt, sh, sub):
    sec = characteristic_section(sh, sub)
    try:
        m.add_constant(name, srt, sec)
    except CapExceeded:
        # the power sheaf is too big to build for validation; the section is
        # correct by construction, so register it directly
        m.constants[name] = (parse_sort(srt), sec)


def two_valued_models(atoms=("e1", "e2", "e3")) -> list:
    """One-point models realising every classical assignment of the atoms."""
    base = Poset(["w"])
    u = terminal(base)
    out = []
    for bits in cartesian((False, True), repeat=len(atoms)):
        m = Model(base, {"u": u})
        for name, bit in zip(atoms, bits):
            m.add_constant(name, "u", Section({"w": "*"}) if bit else Section())
        out.append(m)
    return out


def atom_model(rng, max_points: int = MAX_GEN_POINTS, atoms=("e1", "e2", "e3")) -> Model:
    """A model with only terminal-sort atoms, for propositional checks."""
    rng = _rng(rng)
    base = random_poset(rng, max_points=max_points)
    u = terminal(base)
    m = Model(base, {"u": u})
    for name in atoms:
        m.add_constant(name, "u", Section((p, "*") for p in random_open(rng, base)))
    return m


def choice_model(rng, *, max_points: int = MAX_GEN_POINTS, tau_stalk: int = 2, max_values: int = 2,
                 caps: Caps | None = None) -> Model:
    """A model for the choice batteries: ``t`` simple, ``s`` a small functor sheaf."""
    return random_model(rng, max_points=max_points, max_stalk=tau_stalk, max_values=max_values, caps=caps)


def random_degree_structure(rng, n_oracles: int | None = None, max_oracles: int = 5) -> DegreeStructure:
    rng = _rng(rng)
    if n_oracles is None:
        n_oracles = rng.randint(1, max_oracles)
    names, pairs = random_preorder(rng, n_oracles)
    return DegreeStructure.from_preorder(names, pairs)


def random_directed_poset(rng, max_points: int = MAX_GEN_POINTS) -> Poset:
    """A random poset with a top element added, so every pair has an upper bound."""
    rng = _rng(rng)
    n = rng.randint(0, max_points - 1)
    if n == 0:
        return Poset(["top"])
    p = random_poset(rng, n=n)
    return Poset(list(p) + ["top"], list(p.leq) + [(a, "top") for a in p])
