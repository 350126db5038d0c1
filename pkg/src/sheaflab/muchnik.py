"""Finite Muchnik-degree calculus.

Oracles carry a user supplied preorder standing in for Turing reducibility,
and their equivalence classes form the degree poset.  Mass problems are sets
of oracles.  Weak degrees are represented canonically by the upward closed
set of degrees that can solve them, which makes the dual isomorphism with
the up-set lattice of degrees the identity on representatives.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional

from .poset import Poset, PosetError
from .sheaf import Section, Sheaf, SheafError

BRUTE_FORCE_MAX_ORACLES = 6


class MuchnikError(ValueError):
    pass


class DegreeStructure:
    """Degrees, oracles, the oracle preorder and the quotient map ``deg``."""

    def __init__(self, degrees: Poset, oracles: Iterable, oracle_leq: Iterable, deg: dict):
        self.degrees = degrees
        self.oracles = tuple(oracles)
        if len(set(self.oracles)) != len(self.oracles):
            raise MuchnikError("repeated oracle name")
        if not self.oracles:
            raise MuchnikError("at least one oracle is required")
        self.deg = dict(deg)
        for f in self.oracles:
            if f not in self.deg:
                raise MuchnikError(f"oracle {f!r} has no degree")
            if self.deg[f] not in degrees:
                raise MuchnikError(f"degree {self.deg[f]!r} of oracle {f!r} is not a point of the degree poset")
        missing = set(degrees) - set(self.deg.values())
        if missing:
            raise MuchnikError(f"degree {sorted(map(str, missing))[0]} is not the degree of any oracle")

        known = set(self.oracles)
        up = {f: {f} for f in self.oracles}
        for f, g in oracle_leq:
            if f not in known or g not in known:
                raise MuchnikError(f"unknown oracle in pair ({f!r}, {g!r})")
            up[f].add(g)
        for k in self.oracles:
            for i in self.oracles:
                if k in up[i]:
                    up[i] |= up[k]
        self._up = {f: frozenset(s) for f, s in up.items()}
        for f in self.oracles:
            for g in self.oracles:
                if (g in self._up[f]) != degrees.le(self.deg[f], self.deg[g]):
                    raise MuchnikError(
                        f"deg is not order-faithful on ({f!r}, {g!r}): oracle order and degree order disagree"
                    )
        self._index = {f: i for i, f in enumerate(self.oracles)}
        self._up_mask = {
            f: sum(1 << self._index[g] for g in self._up[f]) for f in self.oracles
        }

    @classmethod
    def from_preorder(cls, oracles, oracle_leq, max_points: Optional[int] = None) -> "DegreeStructure":
        """Build the quotient degree poset of an oracle preorder."""
        oracles = tuple(oracles)
        up = {f: {f} for f in oracles}
        for f, g in oracle_leq:
            up[f].add(g)
        for k in oracles:
            for i in oracles:
                if k in up[i]:
                    up[i] |= up[k]
        rep = {}
        for f in oracles:
            cls_members = [g for g in oracles if g in up[f] and f in up[g]]
            rep[f] = "d_" + cls_members[0]
        points = sorted(set(rep.values()))
        pairs = {(rep[f], rep[g]) for f in oracles for g in up[f]}
        degrees = Poset(points, pairs, max_points=max_points)
        return cls(degrees, oracles, [(f, g) for f in oracles for g in up[f]], rep)

    def __repr__(self):
        return f"DegreeStructure({len(self.oracles)} oracles, {len(self.degrees)} degrees)"

    def oracle_le(self, f, g) -> bool:
        return g in self._up[f]

    @property
    def oracle_leq(self) -> frozenset:
        return frozenset((f, g) for f in self.oracles for g in self._up[f])

    def check_mass_problem(self, p) -> frozenset:
        p = frozenset(p)
        for f in p:
            if f not in self._up:
                raise MuchnikError(f"unknown oracle {f!r}")
        return p

    def require_semilattice(self):
        """Bottom degree and binary sups, as needed for pairing bounds."""
        if self.degrees.bottom is None:
            raise MuchnikError("degree poset has no bottom element")
        if not self.degrees.is_upper_semilattice():
            raise MuchnikError("degree poset lacks a binary supremum for some pair")

    # --------------------------------------------------------- bit encoding
    def _mask(self, p) -> int:
        return sum(1 << self._index[f] for f in p)

    def _unmask(self, m: int) -> frozenset:
        return frozenset(f for f, i in self._index.items() if m >> i & 1)

    def _solvers_mask(self, m: int) -> int:
        out = 0
        for f, i in self._index.items():
            if m >> i & 1:
                out |= self._up_mask[f]
        return out

    @cached_property
    def _all_masks(self) -> tuple:
        return tuple(range(1 << len(self.oracles)))

    @cached_property
    def _solvers(self) -> tuple:
        return tuple(self._solvers_mask(m) for m in self._all_masks)


MassProblem = frozenset


@dataclass(frozen=True)
class WeakDegree:
    """A Muchnik degree, represented by the up-set of degrees that solve it.

    The order is the weak-reducibility order: ``a <= b`` iff every degree
    solving ``b`` also solves ``a``, i.e. ``a.upset >= b.upset``.
    """

    upset: frozenset

    def __le__(self, other: "WeakDegree") -> bool:
        return self.upset >= other.upset

    def __ge__(self, other: "WeakDegree") -> bool:
        return self.upset <= other.upset

    def __lt__(self, other):
        return self <= other and self != other

    def __gt__(self, other):
        return self >= other and self != other


@dataclass(frozen=True)
class ValueSystem:
    """Abstract values (stand-ins for reals) and the degree of each value."""

    values: tuple
    vdeg: dict

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(set(self.values)) != len(self.values):
            raise MuchnikError("repeated value name")
        for v in self.values:
            if v not in self.vdeg:
                raise MuchnikError(f"value {v!r} has no degree")

    def __hash__(self):
        return hash((self.values, frozenset(self.vdeg.items())))

    def check(self, ds: DegreeStructure, require_cover: bool = True):
        for v in self.values:
            if self.vdeg[v] not in ds.degrees:
                raise MuchnikError(f"degree {self.vdeg[v]!r} of value {v!r} is unknown")
        if require_cover:
            missing = set(ds.degrees) - {self.vdeg[v] for v in self.values}
            if missing:
                raise MuchnikError(
                    f"degree {sorted(map(str, missing))[0]} is not the degree of any value"
                )


# ---------------------------------------------------- reducibility and psi
def weak_reduces(ds: DegreeStructure, p, q) -> bool:
    """``p <=_w q``: every member of ``q`` computes some member of ``p``."""
    p = ds.check_mass_problem(p)
    q = ds.check_mass_problem(q)
    return all(any(ds.oracle_le(f, g) for f in p) for g in q)


def weakly_equivalent(ds: DegreeStructure, p, q) -> bool:
    return weak_reduces(ds, p, q) and weak_reduces(ds, q, p)


def psi_inv(ds: DegreeStructure, p) -> frozenset:
    """Degrees that compute some member of ``p``."""
    p = ds.check_mass_problem(p)
    return ds.degrees.up_closure(ds.deg[f] for f in p)


def psi(ds: DegreeStructure, u) -> WeakDegree:
    u = frozenset(u)
    try:
        u = ds.degrees.check_open(u)
    except PosetError as exc:
        raise MuchnikError(str(exc)) from None
    return WeakDegree(u)


def wdeg(ds: DegreeStructure, p) -> WeakDegree:
    return WeakDegree(psi_inv(ds, p))


def mass_problem_of(ds: DegreeStructure, u) -> frozenset:
    """The canonical mass problem ``{f : deg(f) in u}``."""
    u = frozenset(u.upset if isinstance(u, WeakDegree) else u)
    return frozenset(f for f in ds.oracles if ds.deg[f] in u)


def top(ds: DegreeStructure) -> WeakDegree:
    return WeakDegree(frozenset())


def bottom(ds: DegreeStructure) -> WeakDegree:
    return WeakDegree(ds.degrees.top)


def all_weak_degrees(ds: DegreeStructure) -> list:
    return [WeakDegree(u) for u in ds.degrees.all_opens()]


# ------------------------------------------------------ lattice operations
def wdeg_sup(ds, a: WeakDegree, b: WeakDegree) -> WeakDegree:
    return WeakDegree(a.upset & b.upset)


def wdeg_inf(ds, a: WeakDegree, b: WeakDegree) -> WeakDegree:
    return WeakDegree(a.upset | b.upset)


def wdeg_sup_all(ds, family) -> WeakDegree:
    out = ds.degrees.top
    for a in family:
        out = out & a.upset
    return WeakDegree(out)


def wdeg_inf_all(ds, family) -> WeakDegree:
    out = frozenset()
    for a in family:
        out = out | a.upset
    return WeakDegree(out)


def wdeg_imp_heyting(ds, a: WeakDegree, b: WeakDegree) -> WeakDegree:
    return WeakDegree(ds.degrees.imp(a.upset, b.upset))


def wdeg_lattice(ds: DegreeStructure, op: str, a: WeakDegree, b: Optional[WeakDegree] = None) -> WeakDegree:
    """``sup``, ``inf``, ``imp`` or ``neg`` on weak degrees.

    ``imp`` is computed through the Heyting implication of up-sets and, for
    small oracle sets, also by brute force over all mass problems; the two
    must agree.
    """
    for x in (a, b):
        if x is not None:
            psi(ds, x.upset)
    if op == "sup":
        return wdeg_sup(ds, a, b)
    if op == "inf":
        return wdeg_inf(ds, a, b)
    if op == "neg":
        b = top(ds)
        op = "imp"
    if op == "imp":
        fast = wdeg_imp_heyting(ds, a, b)
        if len(ds.oracles) <= BRUTE_FORCE_MAX_ORACLES:
            slow = brute_imp(ds, a, b)
            if slow != fast:
                raise RuntimeError(f"implication mismatch: Heyting {fast} vs brute force {slow}")
        return fast
    raise MuchnikError(f"unknown lattice operation {op!r}")


# ------------------------------------------- brute force over mass problems
def _brute_le(ds, pm: int, qm: int) -> bool:
    return qm & ~ds._solvers[pm] == 0


def _degree_of_mask(ds, m: int) -> WeakDegree:
    return wdeg(ds, ds._unmask(m))


def _brute_least(ds, candidates: list) -> int:
    """A member of ``candidates`` below all others; error if none."""
    for c in candidates:
        if all(_brute_le(ds, c, d) for d in candidates):
            return c
    raise RuntimeError("no least element among candidates")


def _brute_greatest(ds, candidates: list) -> int:
    for c in candidates:
        if all(_brute_le(ds, d, c) for d in candidates):
            return c
    raise RuntimeError("no greatest element among candidates")


def _rep(ds, a: WeakDegree) -> int:
    return ds._mask(mass_problem_of(ds, a))


def brute_sup(ds, a: WeakDegree, b: WeakDegree) -> WeakDegree:
    pa, pb = _rep(ds, a), _rep(ds, b)
    ub = [m for m in ds._all_masks if _brute_le(ds, pa, m) and _brute_le(ds, pb, m)]
    return _degree_of_mask(ds, _brute_least(ds, ub))


def brute_inf(ds, a: WeakDegree, b: WeakDegree) -> WeakDegree:
    pa, pb = _rep(ds, a), _rep(ds, b)
    lb = [m for m in ds._all_masks if _brute_le(ds, m, pa) and _brute_le(ds, m, pb)]
    return _degree_of_mask(ds, _brute_greatest(ds, lb))


def _brute_sup_mask(ds, pa: int, pb: int) -> int:
    ub = [m for m in ds._all_masks if _brute_le(ds, pa, m) and _brute_le(ds, pb, m)]
    return _brute_least(ds, ub)


def brute_imp(ds, a: WeakDegree, b: WeakDegree) -> WeakDegree:
    """``inf {c : sup(a, c) >= b}`` computed over every mass problem."""
    pa, pb = _rep(ds, a), _rep(ds, b)
    sups = {}
    cands = []
    for m in ds._all_masks:
        s = sups.get(m)
        if s is None:
            s = sups[m] = _brute_sup_mask(ds, pa, m)
        if _brute_le(ds, pb, s):
            cands.append(m)
    lower = [m for m in ds._all_masks if all(_brute_le(ds, m, c) for c in cands)]
    return _degree_of_mask(ds, _brute_greatest(ds, lower))


def brute_weak_degree_classes(ds) -> list:
    """Equivalence classes of all mass problems under weak equivalence."""
    classes = []
    for m in ds._all_masks:
        for cls in classes:
            r = cls[0]
            if _brute_le(ds, m, r) and _brute_le(ds, r, m):
                cls.append(m)
                break
        else:
            classes.append([m])
    return [[ds._unmask(m) for m in cls] for cls in classes]


# ----------------------------------------------------------- Muchnik reals
class MuchnikReals(Sheaf):
    """Constant sections ``(v, U)`` with ``U`` inside the cone of ``vdeg(v)``.

    The stalk at degree ``d`` is the set of values whose degree is below
    ``d``; transitions are inclusions.
    """

    def __init__(self, ds: DegreeStructure, vs: ValueSystem, name: str = "R_M"):
        ds.require_semilattice()
        vs.check(ds, require_cover=False)
        self.ds = ds
        self.vs = vs
        p = ds.degrees
        stalks = {d: tuple(v for v in vs.values if p.le(vs.vdeg[v], d)) for d in p}
        trans = {(a, b): {v: v for v in stalks[a]} for a in p for b in p.minimal_open(a)}
        super().__init__(p, stalks, trans, name=name)

    def value_of(self, s: Section):
        """The value of a nonempty section, or ``None`` for the empty one."""
        if s.is_empty():
            return None
        vals = {s[p] for p in s.extent}
        if len(vals) != 1:
            raise SheafError("section of the Muchnik reals is not constant")
        return vals.pop()

    def hat(self, v) -> Section:
        cone = self.base.minimal_open(self.vs.vdeg[v])
        return Section((p, v) for p in cone)

    def section(self, v, extent) -> Section:
        extent = self.base.check_open(extent)
        if not extent <= self.base.minimal_open(self.vs.vdeg[v]):
            raise SheafError(f"extent leaves the cone of degree {self.vs.vdeg[v]!r}")
        return Section((p, v) for p in extent)


def muchnik_reals_sheaf(ds: DegreeStructure, vs: ValueSystem) -> MuchnikReals:
    return MuchnikReals(ds, vs)


def constant_function_sheaf(ds: DegreeStructure, vs: ValueSystem) -> Sheaf:
    """All constant sections into the value set, the sheaf the reals sit in."""
    p = ds.degrees
    stalks = {d: tuple(vs.values) for d in p}
    trans = {(a, b): {v: v for v in vs.values} for a in p for b in p.minimal_open(a)}
    return Sheaf(p, stalks, trans, name="C")


def let_value(ds: DegreeStructure, vs: ValueSystem, a: Section, b: Section, c: Optional[Section] = None) -> frozenset:
    """Truth value of ``a <=T b`` or ``a <=T (b, c)`` for sections of the reals."""
    parts = [a, b] + ([c] if c is not None else [])
    if any(s.is_empty() for s in parts):
        return frozenset()
    vals = []
    for s in parts:
        vset = {s[p] for p in s.extent}
        if len(vset) != 1:
            raise SheafError("section of the Muchnik reals is not constant")
        vals.append(vset.pop())
    p = ds.degrees
    bound = vs.vdeg[vals[1]]
    if c is not None:
        bound = p.binary_sup(bound, vs.vdeg[vals[2]])
        if bound is None:
            raise MuchnikError("pairing bound needs a binary supremum")
    if not p.le(vs.vdeg[vals[0]], bound):
        return frozenset()
    out = a.extent & b.extent
    if c is not None:
        out &= c.extent
    return out


def eval_leT(m, r, s, t=None) -> frozenset:
    """Evaluate ``r <=T s`` (or ``r <=T (s, t)``) in a Muchnik-mode model."""
    from .lang import LeT
    from .semantics import eval_formula

    return eval_formula(m, LeT(r, s, t))


def acbp_check(m, template, *, with_bound: bool = True, x: str = "x", y: str = "y") -> dict:
    """Evaluate both sides of the choice-and-bounding schema on one template."""
    from .semantics import check_schema

    schema = "ACBP" if with_bound else "AC"
    rec = check_schema(m, schema, m.real_sort, m.real_sort, [template], x=x, y=y)[0]
    return {"lhs": rec.lhs, "rhs": rec.rhs, "holds": rec.holds, "record": rec}


def random_preorder(rng, n: int, p_edge: float = 0.35) -> list:
    """A random reflexive-transitive relation on ``n`` oracle names."""
    names = [f"f{i}" for i in range(n)]
    pairs = [(a, b) for a in names for b in names if a != b and rng.random() < p_edge]
    return names, pairs
