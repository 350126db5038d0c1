"""Exhaustive and sampled property batteries.

Each check returns a list of human readable violations; an empty list means
the property held on the given input.
"""
from __future__ import annotations

import random
from itertools import combinations, permutations, product as cartesian

from . import muchnik as mu
from .poset import Poset
from .sheaf import (
    EMPTY,
    Section,
    Sheaf,
    SheafError,
    apply_morphism,
    compatible,
    function_sheaf,
    inverse_family,
    is_natural,
    iso_check,
    le,
    power_sheaf,
    restrict,
    simple_sheaf,
    sup_sections,
)


# ---------------------------------------------------------- sheaf axioms
def sheaf_axiom_violations(m: Sheaf, rng=None, samples: int = 60) -> list:
    """Check the five sheaf axioms and the four basic consequences.

    Pairs are checked exhaustively, compatible sets of every size are
    sampled, and every bounded set of the form ``{a : a <= d}`` is checked.
    """
    rng = rng or random.Random(0)
    P = m.base
    opens = P.all_opens()
    secs = m.all_sections()
    bad = []
    index = {s: i for i, s in enumerate(secs)}
    if len(index) != len(secs):
        bad.append("section list has duplicates")
    if EMPTY not in index:
        bad.append("empty section missing")

    for a in secs:
        # (1) a | E(a) = a
        if restrict(a, a.extent) != a:
            bad.append(f"restriction to own extent changed {a}")
        for u in opens:
            r = restrict(a, u)
            # closure and (2)
            if r not in index:
                bad.append(f"restriction of {a} to {sorted(u)} is not a section")
            if r.extent != a.extent & u:
                bad.append(f"extent of restriction wrong for {a}, {sorted(u)}")
            for v in opens:
                # (3)
                if restrict(r, v) != restrict(a, u & v):
                    bad.append(f"restrictions do not compose for {a}")
        # restrictions to a family of opens glue back to the restriction to the union
        for fam in _open_families(opens, rng):
            parts = [restrict(a, u) for u in fam]
            if not all(compatible(x, y) for x, y in combinations(parts, 2)):
                bad.append(f"restrictions of {a} are not compatible")
                continue
            union = frozenset().union(*fam) if fam else frozenset()
            if sup_sections(parts) != restrict(a, union):
                bad.append(f"sup of restrictions of {a} is not the restriction to the union")

    # (4) the order a <= b iff a = b | E(a) is a partial order
    ups = []
    for a in secs:
        ups.append(frozenset(index[b] for b in secs if le(a, b)))
    for i, a in enumerate(secs):
        if i not in ups[i]:
            bad.append(f"order not reflexive at {a}")
        for j in ups[i]:
            b = secs[j]
            if j != i and i in ups[j]:
                bad.append(f"order not antisymmetric on {a}, {b}")
            if not ups[j] <= ups[i]:
                bad.append(f"order not transitive through {b}")
            # the order refines extent inclusion
            if not a.extent <= b.extent:
                bad.append(f"{a} <= {b} but extents are not nested")

    def check_sup(cset, label, characterise=True):
        try:
            c = sup_sections(cset)
        except SheafError:
            bad.append(f"{label}: compatible set has no supremum")
            return
        if c not in index:
            bad.append(f"{label}: supremum {c} is not a section")
            return
        # sup C <= d iff every member <= d
        want = frozenset(range(len(secs)))
        for a in cset:
            want &= ups[index[a]]
        if ups[index[c]] != want:
            bad.append(f"{label}: {c} is not the least upper bound")
        if not characterise:
            return
        # the sup is the unique upper bound with the union as extent
        ext = frozenset().union(*(a.extent for a in cset)) if cset else frozenset()
        for d in secs:
            is_ub = all(index[d] in ups[index[a]] for a in cset)
            if (d == c) != (d.extent == ext and is_ub):
                bad.append(f"{label}: supremum characterisation fails at {d}")

    # (5) on all compatible pairs
    for a, b in combinations(secs, 2):
        if compatible(a, b):
            check_sup([a, b], f"pair {a}, {b}", characterise=False)
    check_sup([], "empty family")
    # bounded sets are compatible and have a sup
    for d in secs:
        below = [secs[i] for i in range(len(secs)) if index[d] in ups[i]]
        if not all(compatible(x, y) for x, y in combinations(below, 2)):
            bad.append(f"sections below {d} are not compatible")
        else:
            check_sup(below, f"down-set of {d}")
    # (5) on sampled larger compatible sets
    for _ in range(samples):
        k = rng.randint(3, 5)
        cset = []
        for a in rng.sample(secs, min(len(secs), 3 * k)):
            if all(compatible(a, x) for x in cset):
                cset.append(a)
            if len(cset) == k:
                break
        check_sup(cset, f"sampled set of {len(cset)}")
    return bad


def _open_families(opens, rng, k: int = 4) -> list:
    fams = [[], list(opens)]
    fams.extend([u, v] for u, v in combinations(opens, 2))
    for _ in range(k):
        fams.append(rng.sample(opens, min(len(opens), 3)))
    return fams


# ------------------------------------------------------------ Heyting laws
def posets_up_to_iso(max_points: int = 4) -> list:
    """Every partial order on at most ``max_points`` points, one per isomorphism class."""
    out = []
    for n in range(1, max_points + 1):
        pts = [f"x{i}" for i in range(n)]
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        seen = set()
        for bits in cartesian((0, 1), repeat=len(pairs)):
            rel = {pairs[k] for k, b in enumerate(bits) if b}
            if not _is_strict_order(rel, n):
                continue
            canon = min(
                tuple(sorted((perm[i], perm[j]) for i, j in rel)) for perm in permutations(range(n))
            )
            if canon in seen:
                continue
            seen.add(canon)
            out.append(Poset(pts, [(pts[i], pts[j]) for i, j in rel]))
    return out


def _is_strict_order(rel, n) -> bool:
    for i, j in rel:
        if (j, i) in rel:
            return False
        for k in range(n):
            if (j, k) in rel and (i, k) not in rel:
                return False
    return True


def _brute_opens(P: Poset) -> list:
    """Up-closed subsets found by testing every subset directly."""
    pts = list(P)
    out = []
    for bits in cartesian((0, 1), repeat=len(pts)):
        s = frozenset(p for p, b in zip(pts, bits) if b)
        if all(q in s for p in s for q in pts if P.le(p, q)):
            out.append(s)
    return out


def heyting_violations(P: Poset) -> list:
    bad = []
    opens = _brute_opens(P)
    if set(opens) != set(P.all_opens()):
        bad.append("open-set enumeration disagrees with brute force")
    for u, v in cartesian(opens, repeat=2):
        imp = P.heyting("imp", u, v)
        # largest open w with u & w inside v
        brute = frozenset().union(*[w for w in opens if u & w <= v])
        if imp != brute:
            bad.append(f"imp({sorted(u)}, {sorted(v)}) = {sorted(imp)}, expected {sorted(brute)}")
        if P.heyting("meet", u, v) != u & v or P.heyting("join", u, v) != u | v:
            bad.append("meet or join is not intersection or union")
        for w in opens:
            if (u & w <= v) != (w <= imp):
                bad.append(f"residuation fails at {sorted(u)}, {sorted(v)}, {sorted(w)}")
            if u & (v | w) != (u & v) | (u & w):
                bad.append("meet does not distribute over join")
            if u | (v & w) != (u | v) & (u | w):
                bad.append("join does not distribute over meet")
    for u in opens:
        if P.heyting("neg", u) != P.heyting("imp", u, frozenset()):
            bad.append("negation differs from implication into the empty set")
    return bad


# ------------------------------------------------------- simple sheaves
def directed_collapse_violations(m: Sheaf) -> list:
    """Over a directed poset every section of a simple sheaf is constant."""
    bad = []
    for s in m.all_sections():
        vals = {v for p in s.extent for _, v in s[p]}
        if len(vals) > 1:
            bad.append(f"section {s} takes values {sorted(map(str, vals))}")
    return bad


def currying_witness(P: Poset, xs, ys):
    """Compare the exponential of two simple sheaves with the simple sheaf on functions.

    Returns ``(phi, problems)`` where ``phi`` is the natural isomorphism found
    and ``problems`` lists any failed verification.
    """
    xs, ys = tuple(xs), tuple(ys)
    fx = function_sheaf(simple_sheaf(P, ys), simple_sheaf(P, xs))
    funcs = [tuple(zip(ys, pick)) for pick in cartesian(xs, repeat=len(ys))]
    target = simple_sheaf(P, funcs)
    phi = iso_check(fx, target)
    if phi is None:
        return None, ["no natural isomorphism found"]
    problems = []
    inv = inverse_family(phi)
    if not is_natural(fx, target, phi):
        problems.append("witness is not natural")
    if not is_natural(target, fx, inv):
        problems.append("inverse is not natural")
    for s in fx.all_sections():
        if apply_morphism(inv, apply_morphism(phi, s)) != s:
            problems.append(f"inverse does not undo the witness on {s}")
            break
    for s in target.all_sections():
        if apply_morphism(phi, apply_morphism(inv, s)) != s:
            problems.append(f"witness does not undo the inverse on {s}")
            break
    return phi, problems


# ------------------------------------------------------------- subsheaves
def set_form_subsheaves(m: Sheaf, max_sections: int = 16) -> list:
    """Every subset of sections closed under restriction and compatible sups.

    Works directly on the set of sections, without the functor form, so it
    serves as an independent count for the power sheaf.
    """
    secs = [s for s in m.all_sections() if not s.is_empty()]
    if len(secs) > max_sections:
        raise ValueError(f"{len(secs)} nonempty sections is too many for subset enumeration")
    opens = m.base.all_opens()
    out = []
    for bits in range(1 << len(secs)):
        chosen = {EMPTY} | {s for i, s in enumerate(secs) if bits >> i & 1}
        if any(restrict(a, u) not in chosen for a in chosen for u in opens):
            continue
        if any(
            sup_sections([a, b]) not in chosen
            for a, b in combinations(chosen, 2)
            if compatible(a, b)
        ):
            continue
        out.append(frozenset(chosen))
    return out


def power_sheaf_count(m: Sheaf) -> int:
    return len(power_sheaf(m).global_sections())


# ---------------------------------------------------------------- Muchnik
def duality_violations(ds: mu.DegreeStructure) -> list:
    """Check the up-set representation against brute force over mass problems."""
    bad = []
    P = ds.degrees
    upsets = P.all_opens()
    classes = mu.brute_weak_degree_classes(ds)
    if len(classes) != len(upsets):
        bad.append(f"{len(classes)} weak degrees but {len(upsets)} up-sets")
    seen = set()
    for cls in classes:
        reps = {mu.psi_inv(ds, p) for p in cls}
        if len(reps) != 1:
            bad.append("weakly equivalent problems have different up-sets")
        seen |= reps
    if seen != set(upsets):
        bad.append("psi_inv does not hit every up-set exactly")
    for u in upsets:
        if mu.psi_inv(ds, mu.mass_problem_of(ds, u)) != u:
            bad.append(f"psi_inv after psi is not the identity at {sorted(u)}")
    for u, v in cartesian(upsets, repeat=2):
        pu, pv = mu.mass_problem_of(ds, u), mu.mass_problem_of(ds, v)
        # U <= V as up-sets iff psi(U) >= psi(V) as weak degrees
        if (u <= v) != mu.weak_reduces(ds, pv, pu):
            bad.append(f"order reversal fails at {sorted(u)}, {sorted(v)}")
        a, b = mu.psi(ds, u), mu.psi(ds, v)
        if mu.wdeg_lattice(ds, "sup", a, b) != mu.brute_sup(ds, a, b):
            bad.append(f"sup formula disagrees at {sorted(u)}, {sorted(v)}")
        if mu.wdeg_lattice(ds, "inf", a, b) != mu.brute_inf(ds, a, b):
            bad.append(f"inf formula disagrees at {sorted(u)}, {sorted(v)}")
        if mu.wdeg_imp_heyting(ds, a, b) != mu.brute_imp(ds, a, b):
            bad.append(f"imp formula disagrees at {sorted(u)}, {sorted(v)}")
    for u in upsets:
        a = mu.psi(ds, u)
        if mu.wdeg_lattice(ds, "neg", a) != mu.brute_imp(ds, a, mu.top(ds)):
            bad.append(f"neg formula disagrees at {sorted(u)}")
    return bad


def distributivity_violations(ds: mu.DegreeStructure, max_family: int = 3) -> list:
    bad = []
    degs = mu.all_weak_degrees(ds)
    for k in range(max_family + 1):
        for fam in combinations(degs, k):
            for b in degs:
                lhs = mu.wdeg_inf(ds, mu.wdeg_sup_all(ds, fam), b)
                rhs = mu.wdeg_sup_all(ds, [mu.wdeg_inf(ds, a, b) for a in fam])
                if lhs != rhs:
                    bad.append("inf does not distribute over sup")
                lhs = mu.wdeg_sup(ds, mu.wdeg_inf_all(ds, fam), b)
                rhs = mu.wdeg_inf_all(ds, [mu.wdeg_sup(ds, a, b) for a in fam])
                if lhs != rhs:
                    bad.append("sup does not distribute over inf")
    return bad
