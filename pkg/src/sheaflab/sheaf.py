"""Finite sheaves over poset spaces, in functor form.

Over an Alexandrov space a sheaf is determined by its stalks: the stalk at
``a`` is the set of sections over the cone ``U_a``, and the transition
``a <= b`` is restriction from ``U_a`` to ``U_b``.  Sections over an
arbitrary open ``U`` are matching families ``(x_a)_{a in U}``; the extent /
restriction structure of the classical definition is derived from them.
"""
from __future__ import annotations

from functools import cached_property
from itertools import permutations, product as cartesian
from typing import Iterable, Optional

from .poset import OpenSet, Poset, PosetError

DEFAULT_STALK_CAP = 512


class SheafError(ValueError):
    pass


class CapExceeded(RuntimeError):
    """An enumeration grew past its configured limit."""


def _show(v) -> str:
    if isinstance(v, frozenset):
        return "{" + ",".join(sorted(map(_show, v))) + "}"
    if isinstance(v, tuple):
        return "(" + ",".join(map(_show, v)) + ")"
    return str(v)


class Section:
    """A matching family; ``extent`` is the set of points it is defined on."""

    __slots__ = ("_map", "items", "extent", "_hash")

    def __init__(self, family=()):
        m = dict(family)
        self._map = m
        self.items = frozenset(m.items())
        self.extent = frozenset(m)
        self._hash = hash(self.items)

    def __getitem__(self, point):
        return self._map[point]

    def get(self, point, default=None):
        return self._map.get(point, default)

    def family(self) -> dict:
        return dict(self._map)

    def is_empty(self) -> bool:
        return not self._map

    def __eq__(self, other):
        return isinstance(other, Section) and self.items == other.items

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self._map)

    def __repr__(self):
        body = ", ".join(f"{p}: {_show(v)}" for p, v in sorted(self._map.items(), key=lambda kv: str(kv[0])))
        return f"Section({{{body}}})"


EMPTY = Section()
_UNSET = object()


def restrict(a: Section, u) -> Section:
    u = frozenset(u)
    if a.extent <= u:
        return a
    return Section((p, v) for p, v in a._map.items() if p in u)


def compatible(a: Section, b: Section) -> bool:
    return all(a[p] == b[p] for p in a.extent & b.extent)


def le(a: Section, b: Section) -> bool:
    """The sheaf order ``a <= b`` iff ``a = b restricted to E(a)``."""
    return a.extent <= b.extent and restrict(b, a.extent) == a


def sup_sections(sections: Iterable[Section]) -> Section:
    fam = {}
    for s in sections:
        for p, v in s._map.items():
            if p in fam and fam[p] != v:
                raise SheafError(f"incompatible sections at point {p!r}")
            fam[p] = v
    return Section(fam)


class NaturalFamily:
    """Components ``point -> {x: y}`` of a sheaf morphism over an open set."""

    __slots__ = ("components", "key", "_hash")

    def __init__(self, components):
        self.components = {p: dict(f) for p, f in dict(components).items()}
        self.key = frozenset((p, frozenset(f.items())) for p, f in self.components.items())
        self._hash = hash(self.key)

    @property
    def domain(self) -> frozenset:
        return frozenset(self.components)

    def __call__(self, point, x):
        return self.components[point][x]

    def restrict(self, u) -> "NaturalFamily":
        return NaturalFamily({p: f for p, f in self.components.items() if p in u})

    def __eq__(self, other):
        return isinstance(other, NaturalFamily) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        parts = []
        for p in sorted(self.components, key=str):
            f = self.components[p]
            inner = ",".join(f"{_show(x)}>{_show(y)}" for x, y in sorted(f.items(), key=lambda kv: str(kv[0])))
            parts.append(f"{p}:[{inner}]")
        return "nat(" + " ".join(parts) + ")"


class Sheaf:
    """Stalks per point plus transition maps for every related pair.

    ``transitions`` may list only covering pairs; the remaining maps are
    obtained by composition and functoriality is checked for every triple.
    """

    def __init__(self, base: Poset, stalks: dict, transitions: Optional[dict] = None, *, name: str = ""):
        self.base = base
        self.name = name
        self.stalks = {}
        for a in base:
            if a not in stalks:
                raise SheafError(f"missing stalk at point {a!r}")
            elems = tuple(stalks[a])
            if len(set(elems)) != len(elems):
                raise SheafError(f"repeated stalk element at point {a!r}")
            self.stalks[a] = elems
        extra = set(stalks) - set(base)
        if extra:
            raise SheafError(f"stalk given for unknown point {sorted(map(str, extra))[0]}")
        self.trans = _close_transitions(base, self.stalks, dict(transitions or {}))

    def __repr__(self):
        sizes = ", ".join(f"{a}:{len(self.stalks[a])}" for a in self.base)
        return f"Sheaf({self.name or 'functor'}; {sizes})"

    def __eq__(self, other):
        if not isinstance(other, Sheaf):
            return NotImplemented
        return (
            self.base == other.base
            and {a: frozenset(s) for a, s in self.stalks.items()}
            == {a: frozenset(s) for a, s in other.stalks.items()}
            and self.trans == other.trans
        )

    __hash__ = object.__hash__

    def stalk(self, a) -> tuple:
        return self.stalks[a]

    def transition(self, a, b) -> dict:
        return self.trans[(a, b)]

    # ---------------------------------------------------------- sections
    def sections(self, u, limit: Optional[int] = None) -> list:
        """All matching families over the open ``u``."""
        u = self.base.check_open(u)
        pts = [a for a in self.base.linear_extension if a in u]
        below = {b: [a for a in pts if a != b and self.base.le(a, b)] for b in pts}
        out = []
        fam = {}

        def rec(i):
            if i == len(pts):
                out.append(Section(fam))
                if limit is not None and len(out) > limit:
                    raise CapExceeded(f"more than {limit} sections over {self.base.sort_points(u)}")
                return
            b = pts[i]
            forced = _UNSET
            for a in below[b]:
                v = self.trans[(a, b)][fam[a]]
                if forced is _UNSET:
                    forced = v
                elif forced != v:
                    return
            choices = self.stalks[b] if forced is _UNSET else (forced,)
            for v in choices:
                fam[b] = v
                rec(i + 1)
                del fam[b]

        rec(0)
        return out

    def all_sections(self, limit: Optional[int] = None) -> list:
        if limit is None or "_all_sections" in self.__dict__:
            found = list(self._all_sections)
            if limit is not None and len(found) > limit:
                raise CapExceeded(f"sheaf has {len(found)} sections, limit is {limit}")
            return found
        out = []
        for u in self.base.all_opens():
            out.extend(self.sections(u, limit=limit - len(out)))
        return out

    @cached_property
    def _all_sections(self) -> tuple:
        out = []
        for u in self.base.all_opens():
            out.extend(self.sections(u))
        return tuple(out)

    def global_sections(self) -> list:
        return self.sections(self.base.top)

    def count_sections(self, u) -> int:
        return len(self.sections(u))

    def is_section(self, a: Section) -> bool:
        if not self.base.is_open(a.extent) or not a.extent <= self.base.top:
            return False
        for p in a.extent:
            if a[p] not in self.stalks[p]:
                return False
        return all(
            self.trans[(p, q)][a[p]] == a[q]
            for p in a.extent
            for q in self.base.minimal_open(p)
        )

    def germ(self, a) -> list:
        """Sections over the cone ``U_a``, one per stalk element."""
        return self.sections(self.base.minimal_open(a))

    def section_at(self, a, x) -> Section:
        """The section over ``U_a`` generated by stalk element ``x``."""
        return Section((b, self.trans[(a, b)][x]) for b in self.base.minimal_open(a))


def _close_transitions(base: Poset, stalks: dict, given: dict) -> dict:
    trans = {}
    for (a, b), f in given.items():
        if a not in base or b not in base:
            raise SheafError(f"transition for unknown pair ({a!r}, {b!r})")
        if not base.le(a, b):
            raise SheafError(f"transition given for unrelated pair ({a!r}, {b!r})")
        f = dict(f)
        if set(f) != set(stalks[a]):
            raise SheafError(f"transition ({a!r}, {b!r}) is not total on the stalk at {a!r}")
        bad = [y for y in f.values() if y not in stalks[b]]
        if bad:
            raise SheafError(f"transition ({a!r}, {b!r}) leaves the stalk at {b!r}: {bad[0]!r}")
        trans[(a, b)] = f
    for a in base:
        ident = {x: x for x in stalks[a]}
        if (a, a) in trans and trans[(a, a)] != ident:
            raise SheafError(f"functoriality violation: transition ({a!r}, {a!r}) is not the identity")
        trans[(a, a)] = ident
    order = base.linear_extension
    for a in order:
        for b in order:
            if b == a or not base.le(a, b) or (a, b) in trans:
                continue
            if (a, b) in base.covers:
                if stalks[a]:
                    raise SheafError(f"missing transition for covering pair ({a!r}, {b!r})")
                trans[(a, b)] = {}
                continue
            # a < c < b with c a lower cover of b
            c = next(c for c, d in base.covers if d == b and base.le(a, c))
            if (c, b) not in trans:
                if stalks[c]:
                    raise SheafError(f"missing transition for covering pair ({c!r}, {b!r})")
                trans[(c, b)] = {}
            f, g = trans[(a, c)], trans[(c, b)]
            trans[(a, b)] = {x: g[f[x]] for x in stalks[a]}
    for a in base:
        for b in base.minimal_open(a):
            for c in base.minimal_open(b):
                fab, fbc, fac = trans[(a, b)], trans[(b, c)], trans[(a, c)]
                for x in stalks[a]:
                    if fbc[fab[x]] != fac[x]:
                        raise SheafError(
                            f"functoriality violation: ({a!r},{c!r}) differs from the composite through {b!r}"
                        )
    return trans


def make_sheaf(base: Poset, stalks: dict, transitions: Optional[dict] = None, name: str = "") -> Sheaf:
    return Sheaf(base, stalks, transitions, name=name)


def sections(m: Sheaf, u) -> list:
    return m.sections(u)


def all_sections(m: Sheaf) -> list:
    return m.all_sections()


def _same_base(m: Sheaf, n: Sheaf):
    if m.base != n.base:
        raise SheafError("sheaves over different base posets")


# ------------------------------------------------------------ constructions
def terminal(p: Poset) -> Sheaf:
    return Sheaf(p, {a: ("*",) for a in p}, {(a, b): {"*": "*"} for a, b in p.covers}, name="1")


def empty_sheaf(p: Poset) -> Sheaf:
    return Sheaf(p, {a: () for a in p}, {}, name="0")


def product(m: Sheaf, n: Sheaf) -> Sheaf:
    _same_base(m, n)
    p = m.base
    stalks = {a: tuple(cartesian(m.stalks[a], n.stalks[a])) for a in p}
    trans = {
        (a, b): {(x, y): (m.trans[(a, b)][x], n.trans[(a, b)][y]) for x, y in stalks[a]}
        for a in p
        for b in p.minimal_open(a)
    }
    return Sheaf(p, stalks, trans, name=f"({m.name}x{n.name})")


def restriction_sheaf(m: Sheaf, u) -> Sheaf:
    p = m.base
    u = p.check_open(u)
    stalks = {a: (m.stalks[a] if a in u else ()) for a in p}
    trans = {(a, b): (dict(m.trans[(a, b)]) if a in u else {}) for a in p for b in p.minimal_open(a)}
    return Sheaf(p, stalks, trans, name=f"{m.name}|U")


def omega1(p: Poset) -> Sheaf:
    """Sections over ``U`` are the opens ``V`` contained in ``U``."""
    opens = p.all_opens()
    stalks = {a: tuple(v for v in opens if v <= p.minimal_open(a)) for a in p}
    trans = {
        (a, b): {v: v & p.minimal_open(b) for v in stalks[a]}
        for a in p
        for b in p.minimal_open(a)
    }
    return Sheaf(p, stalks, trans, name="Omega1")


def natural_families(m: Sheaf, n: Sheaf, points, *, bijective: bool = False, limit: Optional[int] = None) -> list:
    """Enumerate families ``(f_b)_{b in points}`` commuting with transitions.

    ``points`` must be upward closed.  Each component ``f_b`` maps the stalk of
    ``m`` at ``b`` into the stalk of ``n`` at ``b``.
    """
    _same_base(m, n)
    p = m.base
    points = p.check_open(points)
    pts = [a for a in p.linear_extension if a in points]
    below = {b: [a for a in pts if a != b and p.le(a, b)] for b in pts}
    out = []
    comps = {}

    def rec(i):
        if i == len(pts):
            out.append(NaturalFamily(comps))
            if limit is not None and len(out) > limit:
                raise CapExceeded(f"more than {limit} natural families over {p.sort_points(points)}")
            return
        b = pts[i]
        src, dst = m.stalks[b], n.stalks[b]
        if bijective and len(src) != len(dst):
            return
        forced = {}
        for a in below[b]:
            tm, tn, fa = m.trans[(a, b)], n.trans[(a, b)], comps[a]
            for x in m.stalks[a]:
                y = tn[fa[x]]
                tx = tm[x]
                if forced.setdefault(tx, y) != y:
                    return
        free = [x for x in src if x not in forced]
        if bijective:
            used = list(forced.values())
            if len(set(used)) != len(used):
                return
            avail = [y for y in dst if y not in set(used)]
            choices = permutations(avail, len(free))
        else:
            choices = cartesian(dst, repeat=len(free))
        for pick in choices:
            f = dict(forced)
            f.update(zip(free, pick))
            comps[b] = f
            rec(i + 1)
            del comps[b]

    rec(0)
    return out


def function_sheaf(m: Sheaf, n: Sheaf, stalk_cap: Optional[int] = DEFAULT_STALK_CAP) -> Sheaf:
    """The exponential ``n ** m``: the stalk at ``a`` holds the morphisms over ``U_a``."""
    _same_base(m, n)
    p = m.base
    stalks = {}
    for a in p:
        try:
            stalks[a] = tuple(natural_families(m, n, p.minimal_open(a), limit=stalk_cap))
        except CapExceeded as exc:
            raise CapExceeded(f"function-sheaf stalk at {a!r}: {exc}") from None
    trans = {}
    for a in p:
        for b in p.minimal_open(a):
            ub = p.minimal_open(b)
            trans[(a, b)] = {phi: phi.restrict(ub) for phi in stalks[a]}
    return Sheaf(p, stalks, trans, name=f"({n.name}^{m.name})")


def power_sheaf(m: Sheaf, stalk_cap: Optional[int] = DEFAULT_STALK_CAP) -> Sheaf:
    out = function_sheaf(m, omega1(m.base), stalk_cap=stalk_cap)
    out.name = f"P({m.name})"
    return out


class SimpleSheaf(Sheaf):
    """Locally constant partial functions into a finite set of values.

    Stalk elements are tuples of ``(point, value)`` pairs describing a locally
    constant function on the cone of the point.
    """

    def __init__(self, base: Poset, values: Iterable, name: str = ""):
        values = tuple(values)
        if len(set(values)) != len(values):
            raise SheafError("repeated value in simple sheaf")
        self.values = values
        stalks = {}
        for a in base:
            comps = base.connected_components(base.minimal_open(a))
            fns = []
            for pick in cartesian(values, repeat=len(comps)):
                fn = {}
                for comp, v in zip(comps, pick):
                    for q in comp:
                        fn[q] = v
                fns.append(tuple((q, fn[q]) for q in base.sort_points(fn)))
            stalks[a] = tuple(fns)
        trans = {}
        for a in base:
            for b in base.minimal_open(a):
                ub = base.minimal_open(b)
                trans[(a, b)] = {f: tuple(kv for kv in f if kv[0] in ub) for f in stalks[a]}
        super().__init__(base, stalks, trans, name=name or "simple")

    def section_from_function(self, fn: dict) -> Section:
        """Lift a locally constant function on an open set to a section."""
        dom = self.base.check_open(fn)
        fam = {}
        for a in dom:
            ua = self.base.minimal_open(a)
            elem = tuple((q, fn[q]) for q in self.base.sort_points(ua))
            if elem not in self.stalks[a]:
                raise SheafError(f"function is not locally constant near {a!r}")
            fam[a] = elem
        return Section(fam)

    def constant(self, x) -> Section:
        if x not in self.values:
            raise SheafError(f"{x!r} is not a value of this simple sheaf")
        return self.section_from_function({a: x for a in self.base})

    def as_function(self, s: Section) -> dict:
        return {a: dict(s[a])[a] for a in s.extent}


def simple_sheaf(p: Poset, values: Iterable, name: str = "") -> SimpleSheaf:
    return SimpleSheaf(p, values, name=name)


def iso_check(m: Sheaf, n: Sheaf) -> Optional[NaturalFamily]:
    """Search for a natural isomorphism over the whole base."""
    _same_base(m, n)
    for a in m.base:
        if len(m.stalks[a]) != len(n.stalks[a]):
            return None
    found = natural_families(m, n, m.base.top, bijective=True, limit=None)
    return found[0] if found else None


def apply_morphism(phi: NaturalFamily, a: Section) -> Section:
    """Apply a morphism to a section inside its domain."""
    if not a.extent <= phi.domain:
        raise SheafError("section extent is outside the morphism's domain")
    return Section((p, phi(p, a[p])) for p in a.extent)


def inverse_family(phi: NaturalFamily) -> NaturalFamily:
    comps = {}
    for p, f in phi.components.items():
        inv = {y: x for x, y in f.items()}
        if len(inv) != len(f):
            raise SheafError(f"component at {p!r} is not injective")
        comps[p] = inv
    return NaturalFamily(comps)


def is_natural(m: Sheaf, n: Sheaf, phi: NaturalFamily) -> bool:
    p = m.base
    dom = phi.domain
    for a in dom:
        f = phi.components[a]
        if set(f) != set(m.stalks[a]) or any(y not in n.stalks[a] for y in f.values()):
            return False
        for b in p.minimal_open(a):
            g = phi.components[b]
            for x in m.stalks[a]:
                if g[m.trans[(a, b)][x]] != n.trans[(a, b)][f[x]]:
                    return False
    return True
