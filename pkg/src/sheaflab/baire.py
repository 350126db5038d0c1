"""Prefix cones over a finite alphabet with bounded depth.

A cone ``V_p`` is the set of sequences that start with the prefix ``p``.
Sequences live in ``{0..b-1}^D``, so membership can be checked by brute force.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product


class BoundError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class PrefixCone:
    prefix: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(x) for x in self.prefix))

    def check(self, b: int, depth: int) -> "PrefixCone":
        if len(self.prefix) > depth:
            raise BoundError(f"prefix {self} longer than depth {depth}")
        for x in self.prefix:
            if not 0 <= x < b:
                raise BoundError(f"prefix {self} leaves the alphabet 0..{b - 1}")
        return self

    def contains_seq(self, seq) -> bool:
        return tuple(seq[: len(self.prefix)]) == self.prefix

    def __len__(self):
        return len(self.prefix)

    def __str__(self):
        return "(" + ",".join(map(str, self.prefix)) + ")"


def cone(*xs) -> PrefixCone:
    return PrefixCone(tuple(xs))


def parse_cone(text: str) -> PrefixCone:
    """Read ``(0,1)``, ``0,1`` or ``()`` into a cone."""
    body = text.strip().strip("()").strip()
    if not body:
        return PrefixCone(())
    try:
        return PrefixCone(tuple(int(x) for x in body.split(",")))
    except ValueError:
        raise BoundError(f"cannot read prefix {text!r}") from None


def is_prefix(p: tuple, q: tuple) -> bool:
    return q[: len(p)] == p


def cone_relations(p: PrefixCone, q: PrefixCone) -> str:
    """How ``V_p`` sits relative to ``V_q``."""
    if p.prefix == q.prefix:
        return "equal"
    if is_prefix(p.prefix, q.prefix):
        return "contains"
    if is_prefix(q.prefix, p.prefix):
        return "contained"
    return "disjoint"


def _prefixes(b: int, depth: int):
    # length first, then lexicographic
    for n in range(depth + 1):
        yield from product(range(b), repeat=n)


def refine_disjoint(cones, b: int, depth: int) -> list:
    """Replace a family of cones by the cones of its minimal covered prefixes.

    A prefix is kept when its cone lies inside some input cone and no proper
    initial segment has that property.  The result has the same union, each
    output cone sits inside an input cone, and the output cones are pairwise
    disjoint.
    """
    cones = [PrefixCone(c.prefix if isinstance(c, PrefixCone) else c).check(b, depth) for c in cones]
    given = [c.prefix for c in cones]
    kept = []
    for p in _prefixes(b, depth):
        if not any(is_prefix(g, p) for g in given):
            continue
        if any(is_prefix(k, p) for k in kept):
            continue  # a shorter prefix already covers it
        kept.append(p)
    return [PrefixCone(p) for p in kept]


# ------------------------------------------------------- brute-force checks
def universe(b: int, depth: int):
    return product(range(b), repeat=depth)


def members(cones, b: int, depth: int) -> frozenset:
    cones = list(cones)
    return frozenset(s for s in universe(b, depth) if any(c.contains_seq(s) for c in cones))


def refinement_report(cones, out, b: int, depth: int) -> dict:
    """Check the refinement properties by enumerating every sequence."""
    cones, out = list(cones), list(out)
    seqs = list(universe(b, depth))
    union_ok = members(cones, b, depth) == members(out, b, depth)
    sub_ok = all(
        any(all(c.contains_seq(s) for s in seqs if o.contains_seq(s)) for c in cones) for o in out
    )
    disjoint_ok = all(
        not any(o1.contains_seq(s) and o2.contains_seq(s) for s in seqs)
        for i, o1 in enumerate(out)
        for o2 in out[i + 1:]
    )
    idem_ok = sorted(refine_disjoint(out, b, depth)) == sorted(out)
    return {
        "union": union_ok,
        "subordinate": sub_ok,
        "disjoint": disjoint_ok,
        "idempotent": idem_ok,
    }
