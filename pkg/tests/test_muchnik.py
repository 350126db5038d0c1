import random
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from sheaflab import muchnik as mu
from sheaflab.checks import distributivity_violations, duality_violations
from sheaflab.generate import random_degree_structure
from sheaflab.lang import parse_term
from sheaflab.modelio import load_fixture
from sheaflab.poset import make_poset
from sheaflab.semantics import EvalError, Model, check_schema, eval_formula
from sheaflab.sheaf import SheafError


@pytest.fixture
def vds():
    return load_fixture("muchnik_v").degrees


def masks(ds):
    names = sorted(ds.oracles)
    for k in range(len(names) + 1):
        for c in combinations(names, k):
            yield frozenset(c)


def brute_weak(ds, p, q):
    return all(any(ds.oracle_le(f, g) for f in p) for g in q)


# -- reducibility

def test_weak_reduces_examples(vds):
    assert mu.weak_reduces(vds, {"f1"}, {"f1"})
    assert mu.weak_reduces(vds, {"f1"}, set())
    assert mu.weak_reduces(vds, set(), set())
    assert not mu.weak_reduces(vds, {"f1"}, {"f2"})
    assert mu.weak_reduces(vds, {"f0"}, {"f1", "f2"})
    with pytest.raises(mu.MuchnikError, match="unknown oracle"):
        mu.weak_reduces(vds, {"nope"}, set())


def test_psi_examples(vds):
    assert mu.psi_inv(vds, set()) == frozenset()
    assert mu.psi(vds, frozenset()) == mu.top(vds)
    assert mu.psi_inv(vds, vds.oracles) == vds.degrees.top
    assert mu.wdeg(vds, vds.oracles) == mu.bottom(vds)
    assert mu.psi_inv(vds, {"f1"}) == {"d1"}
    with pytest.raises(mu.MuchnikError):
        mu.psi(vds, {"d0"})


def test_lattice_examples(vds):
    f1, f2 = mu.wdeg(vds, {"f1"}), mu.wdeg(vds, {"f2"})
    assert mu.wdeg_lattice(vds, "inf", f1, f2) == mu.wdeg(vds, {"f1", "f2"})
    assert mu.wdeg_lattice(vds, "inf", f1, f2).upset == {"d1", "d2"}
    for a in mu.all_weak_degrees(vds):
        assert mu.wdeg_lattice(vds, "sup", a, mu.bottom(vds)) == a
        assert mu.wdeg_lattice(vds, "imp", a, a) == mu.bottom(vds)
    assert mu.wdeg_lattice(vds, "neg", mu.bottom(vds)) == mu.top(vds)
    assert mu.wdeg_lattice(vds, "neg", mu.top(vds)) == mu.bottom(vds)


def test_order_is_reversed(vds):
    # a bigger up-set is an easier problem
    assert mu.wdeg(vds, {"f0"}) <= mu.wdeg(vds, {"f1"})
    assert mu.bottom(vds) <= mu.top(vds)
    assert not mu.top(vds) <= mu.bottom(vds)


def test_preorder_quotient():
    ds = mu.DegreeStructure.from_preorder(["f", "g", "h"], [("f", "g"), ("g", "f"), ("g", "h")])
    assert len(ds.degrees) == 2
    assert ds.deg["f"] == ds.deg["g"] != ds.deg["h"]


# -- Muchnik reals

def test_reals_sections_k2():
    m = load_fixture("reals_k2")
    R = m.mu["R"]
    nonempty = {(R.value_of(s), s.extent) for s in R.all_sections() if not s.is_empty()}
    assert nonempty == {("u", frozenset({"bot", "top"})), ("u", frozenset({"top"})), ("v", frozenset({"top"}))}
    assert R.hat("u").extent == m.base.top
    with pytest.raises(SheafError):
        R.section("v", m.base.top)


def test_reals_proper_subsheaf():
    m = load_fixture("reals_k2")
    R = m.mu["R"]
    C = mu.constant_function_sheaf(m.degrees, m.values)
    assert set(R.all_sections()) < set(C.all_sections())
    assert len(R.all_sections()) == 4 and len(C.all_sections()) == 5


def test_reals_equal_constant_sheaf_when_all_values_at_bottom():
    ds = load_fixture("reals_k2").degrees
    vs = mu.ValueSystem(["u", "w"], {"u": "bot", "w": "bot"})
    R = mu.muchnik_reals_sheaf(ds, vs)
    assert set(R.all_sections()) == set(mu.constant_function_sheaf(ds, vs).all_sections())


def test_let_examples():
    m = load_fixture("reals_k2")
    uh, vh = parse_term("uh"), parse_term("vh")
    assert mu.eval_leT(m, uh, uh) == m.base.top
    assert mu.eval_leT(m, uh, vh) == {"top"}
    assert mu.eval_leT(m, vh, uh) == frozenset()
    assert mu.eval_leT(m, vh, uh, vh) == {"top"}
    assert eval_formula(m, "forall x:R. E x => x <=T x") == m.base.top
    # the empty section is never bounded
    assert eval_formula(m, "exists x:R. ~ E x /\\ x <=T x") == frozenset()


def test_let_outside_muchnik_mode():
    m = load_fixture("pem_k2")
    from sheaflab.lang import SortError

    with pytest.raises(SortError):
        eval_formula(m, "a <=T a")


def test_acbp_examples():
    for name in ("reals_k2", "reals_chain3"):
        m = load_fixture(name)
        out = mu.acbp_check(m, "E x /\\ E y")
        assert out["lhs"] == m.base.top and out["holds"]
        empty = mu.acbp_check(m, "y = y /\\ ~ E x")
        assert empty["holds"]
        assert mu.acbp_check(m, "E x /\\ E y", with_bound=False)["holds"]


def _uncovered_k2_model():
    """K2 degrees with a single value living at the top degree only."""
    good = load_fixture("reals_k2")
    ds = good.degrees
    vs = mu.ValueSystem(["v"], {"v": "top"})
    m = Model(ds.degrees, {}, degrees=ds, values=good.values, real_sort="R")
    m.values = vs
    m.mu["R"] = mu.MuchnikReals(ds, vs)
    m._sheaves.clear()
    return m


def test_value_cover_required():
    ds = load_fixture("reals_k2").degrees
    vs = mu.ValueSystem(["v"], {"v": "top"})
    with pytest.raises(mu.MuchnikError, match="not the degree of any value"):
        Model(ds.degrees, {}, degrees=ds, values=vs, real_sort="R")


def test_bounding_fails_without_value_cover():
    # with no value at the bottom degree no bound z exists there, while a
    # choice function still does; the cover requirement rules this out
    m = _uncovered_k2_model()
    (acbp,) = check_schema(m, "ACBP", "R", "R", ["E x /\\ E y"])
    (ac,) = check_schema(m, "AC", "R", "R", ["E x /\\ E y"])
    assert acbp.lhs == m.base.top and not acbp.holds
    assert ac.holds


def test_restrict_unsupported_in_muchnik_mode():
    with pytest.raises(EvalError):
        load_fixture("reals_k2").restrict_to("top")


def test_semilattice_required_for_reals(vds):
    vs = mu.ValueSystem(["r"], {"r": "d0"})
    with pytest.raises(mu.MuchnikError):
        mu.muchnik_reals_sheaf(vds, vs)


# -- properties against brute force over mass problems

seeds = st.integers(0, 10**6)


@given(seeds)
def test_weak_reduces_is_preorder(seed):
    ds = random_degree_structure(random.Random(seed), max_oracles=4)
    probs = list(masks(ds))
    for p in probs:
        assert mu.weak_reduces(ds, p, p)
        for q in probs:
            assert mu.weak_reduces(ds, p, q) == brute_weak(ds, p, q)
            if mu.weak_reduces(ds, p, q):
                for r in probs:
                    if mu.weak_reduces(ds, q, r):
                        assert mu.weak_reduces(ds, p, r)


@given(seeds)
def test_psi_reverses_order(seed):
    ds = random_degree_structure(random.Random(seed), max_oracles=4)
    for p in masks(ds):
        brute = {d for d in ds.degrees if any(ds.degrees.le(ds.deg[f], d) for f in p)}
        assert mu.psi_inv(ds, p) == brute
        for q in masks(ds):
            assert mu.weak_reduces(ds, p, q) == (mu.psi_inv(ds, p) >= mu.psi_inv(ds, q))


@given(seeds)
def test_duality_against_brute_force(seed):
    ds = random_degree_structure(random.Random(seed), max_oracles=4)
    assert duality_violations(ds) == []


@given(seeds)
def test_imp_is_least_c_with_sup_above(seed):
    ds = random_degree_structure(random.Random(seed), max_oracles=4)
    degs = mu.all_weak_degrees(ds)
    for a in degs:
        for b in degs:
            cands = [c for c in degs if mu.wdeg_sup(ds, a, c) >= b]
            least = [c for c in cands if all(c <= d for d in cands)]
            assert len(least) == 1
            assert mu.wdeg_lattice(ds, "imp", a, b) == least[0]


@given(seeds)
def test_complete_distributivity(seed):
    ds = random_degree_structure(random.Random(seed), max_oracles=3)
    assert distributivity_violations(ds) == []


@given(seeds)
def test_joins_and_meets_of_families(seed):
    ds = random_degree_structure(random.Random(seed), max_oracles=4)
    degs = mu.all_weak_degrees(ds)
    for k in range(4):
        for fam in combinations(degs, k):
            sup = mu.wdeg_sup_all(ds, fam)
            inf = mu.wdeg_inf_all(ds, fam)
            assert all(a <= sup for a in fam) and all(inf <= a for a in fam)
            assert all(sup <= c for c in degs if all(a <= c for a in fam))
            assert all(c <= inf for c in degs if all(c <= a for a in fam))


def test_reals_pass_sheaf_axioms():
    from sheaflab.checks import sheaf_axiom_violations

    for name in ("reals_k2", "reals_chain3"):
        m = load_fixture(name)
        assert sheaf_axiom_violations(m.mu["R"], random.Random(0)) == []


def test_degree_structure_validation():
    P = make_poset(["x", "y"], [("x", "y")])
    with pytest.raises(mu.MuchnikError):
        mu.DegreeStructure(P, ["f"], [], {"f": "x"})  # y is nobody's degree
    with pytest.raises(mu.MuchnikError):
        mu.DegreeStructure(P, ["f", "g"], [("g", "f")], {"f": "x", "g": "y"})
