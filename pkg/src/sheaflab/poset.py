"""Finite posets with the Alexandrov topology.

Open sets are plain ``frozenset`` objects of point identifiers; a set is open
when it is upward closed.  The opens of a poset form a complete Heyting
algebra, which is the algebra of truth values used by the evaluator.
"""
from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Optional

DEFAULT_MAX_POINTS = 8

OpenSet = frozenset


class PosetError(ValueError):
    pass


def _point_key(p):
    return (type(p).__name__, str(p))


class Poset:
    """A finite partial order, stored with its reflexive-transitive closure.

    Points are sorted canonically so that every enumeration is deterministic.
    """

    def __init__(self, elements, leq_pairs=(), max_points: Optional[int] = DEFAULT_MAX_POINTS):
        elements = list(elements)
        if len(set(elements)) != len(elements):
            dup = sorted({e for e in elements if elements.count(e) > 1}, key=_point_key)
            raise PosetError(f"duplicate element identifier: {dup[0]!r}")
        if not elements:
            raise PosetError("a poset needs at least one point")
        if max_points is not None and len(elements) > max_points:
            raise PosetError(f"poset has {len(elements)} points, cap is {max_points}")
        self.elements: tuple = tuple(sorted(elements, key=_point_key))
        index = set(self.elements)

        up = {a: {a} for a in self.elements}
        for a, b in leq_pairs:
            if a not in index or b not in index:
                raise PosetError(f"unknown point in pair ({a!r}, {b!r})")
            up[a].add(b)
        # Warshall closure
        for k in self.elements:
            for i in self.elements:
                if k in up[i]:
                    up[i] |= up[k]
        for a in self.elements:
            for b in up[a]:
                if a != b and a in up[b]:
                    raise PosetError(f"cycle detected between {a!r} and {b!r}")
        self._up = {a: frozenset(up[a]) for a in self.elements}
        self._down = {
            a: frozenset(b for b in self.elements if a in self._up[b]) for a in self.elements
        }
        self.top = frozenset(self.elements)

    # ------------------------------------------------------------------ basics
    @property
    def leq(self) -> frozenset:
        return frozenset((a, b) for a in self.elements for b in self._up[a])

    def le(self, a, b) -> bool:
        return b in self._up[a]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, item):
        return item in self._up

    def __eq__(self, other):
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and self._up == other._up

    def __hash__(self):
        return hash((self.elements, frozenset(self._up.items())))

    def __repr__(self):
        covers = ", ".join(f"{a}<{b}" for a, b in self.covers)
        return f"Poset([{', '.join(map(str, self.elements))}]; {covers})"

    def _check_point(self, a):
        if a not in self._up:
            raise PosetError(f"unknown point {a!r}")

    def _check_points(self, s) -> frozenset:
        s = frozenset(s)
        for a in s:
            self._check_point(a)
        return s

    def sort_points(self, points: Iterable) -> list:
        pos = {a: i for i, a in enumerate(self.elements)}
        return sorted(points, key=pos.__getitem__)

    @cached_property
    def covers(self) -> tuple:
        """Pairs ``(a, b)`` with ``a < b`` and nothing strictly between."""
        out = []
        for a in self.elements:
            for b in self._up[a]:
                if a == b:
                    continue
                if not any(c not in (a, b) and b in self._up[c] for c in self._up[a]):
                    out.append((a, b))
        return tuple(out)

    @cached_property
    def linear_extension(self) -> tuple:
        """Points ordered so that every point comes after everything below it."""
        return tuple(sorted(self.elements, key=lambda a: (len(self._down[a]), _point_key(a))))

    def down(self, a) -> frozenset:
        self._check_point(a)
        return self._down[a]

    # --------------------------------------------------------------- topology
    def minimal_open(self, a) -> OpenSet:
        """The cone ``{b : a <= b}``, the smallest open containing ``a``."""
        self._check_point(a)
        return self._up[a]

    def is_open(self, s) -> bool:
        return all(self._up[a] <= s for a in s)

    def check_open(self, s) -> OpenSet:
        s = self._check_points(s)
        if not self.is_open(s):
            raise PosetError(f"not an open (upward closed) set: {self.sort_points(s)}")
        return s

    def up_closure(self, s) -> OpenSet:
        s = self._check_points(s)
        out = set()
        for a in s:
            out |= self._up[a]
        return frozenset(out)

    def interior(self, s) -> OpenSet:
        s = self._check_points(s)
        return frozenset(a for a in s if self._up[a] <= s)

    @cached_property
    def _opens(self) -> tuple:
        found = set()
        n = len(self.elements)
        for r in range(n + 1):
            for combo in combinations(self.elements, r):
                s = frozenset(combo)
                if self.is_open(s):
                    found.add(s)
        pos = {a: i for i, a in enumerate(self.elements)}
        return tuple(sorted(found, key=lambda u: (len(u), sorted(pos[a] for a in u))))

    def all_opens(self) -> list:
        """Every upward closed subset, ordered by size then by point positions."""
        return list(self._opens)

    # ---------------------------------------------------------------- Heyting
    def meet(self, u, v) -> OpenSet:
        return frozenset(u) & frozenset(v)

    def join(self, u, v) -> OpenSet:
        return frozenset(u) | frozenset(v)

    def imp(self, u, v) -> OpenSet:
        u, v = frozenset(u), frozenset(v)
        return frozenset(a for a in self.elements if not ((self._up[a] & u) - v))

    def neg(self, u) -> OpenSet:
        return self.imp(u, frozenset())

    def heyting(self, op: str, u, v=frozenset()) -> OpenSet:
        u = self.check_open(u)
        v = self.check_open(v)
        if op == "meet":
            return self.meet(u, v)
        if op == "join":
            return self.join(u, v)
        if op == "imp":
            return self.imp(u, v)
        if op == "neg":
            return self.neg(u)
        raise ValueError(f"unknown Heyting operation {op!r}")

    # --------------------------------------------------------- connectivity
    def connected_components(self, u) -> list:
        """Split ``u`` into pieces connected by comparability inside ``u``."""
        u = self._check_points(u)
        seen = set()
        parts = []
        for a in self.sort_points(u):
            if a in seen:
                continue
            comp = {a}
            stack = [a]
            while stack:
                x = stack.pop()
                for y in (self._up[x] | self._down[x]) & u:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            parts.append(frozenset(comp))
        return parts

    # ------------------------------------------------------------- bounds
    def upper_bounds(self, a, b) -> frozenset:
        self._check_point(a)
        self._check_point(b)
        return self._up[a] & self._up[b]

    def is_directed(self) -> bool:
        return all(self._up[a] & self._up[b] for a in self.elements for b in self.elements)

    def binary_sup(self, a, b):
        ub = self.upper_bounds(a, b)
        least = [c for c in ub if self._up[c] >= ub]
        return least[0] if len(least) == 1 else None

    @cached_property
    def bottom(self):
        for a in self.elements:
            if self._up[a] == self.top:
                return a
        return None

    def is_upper_semilattice(self) -> bool:
        return all(
            self.binary_sup(a, b) is not None for a in self.elements for b in self.elements
        )

    # -------------------------------------------------------- subspaces
    def subposet(self, points) -> "Poset":
        points = self._check_points(points)
        pairs = [(a, b) for a in points for b in self._up[a] & points]
        return Poset(points, pairs, max_points=None)


def make_poset(elements, leq_pairs=(), max_points: Optional[int] = DEFAULT_MAX_POINTS) -> Poset:
    return Poset(elements, leq_pairs, max_points=max_points)


def chain(n: int, prefix: str = "c") -> Poset:
    pts = [f"{prefix}{i}" for i in range(n)]
    return Poset(pts, list(zip(pts, pts[1:])))


def minimal_open(p: Poset, a) -> OpenSet:
    return p.minimal_open(a)


def interior(p: Poset, s) -> OpenSet:
    return p.interior(s)


def all_opens(p: Poset) -> list:
    return p.all_opens()


def heyting(p: Poset, op: str, u, v=frozenset()) -> OpenSet:
    return p.heyting(op, u, v)


def connected_components(p: Poset, u) -> list:
    return p.connected_components(u)


def is_directed(p: Poset) -> bool:
    return p.is_directed()


def binary_sup(p: Poset, a, b):
    return p.binary_sup(a, b)
