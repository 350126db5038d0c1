from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from sheaflab.poset import PosetError, chain, make_poset

from conftest import brute_opens, subsets


@st.composite
def posets(draw, max_points=5):
    n = draw(st.integers(1, max_points))
    pts = [f"p{i}" for i in range(n)]
    pairs = [(pts[i], pts[j]) for i, j in combinations(range(n), 2)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return make_poset(pts, chosen)


@st.composite
def poset_and_sets(draw, k=2):
    P = draw(posets())
    pts = sorted(P)
    sets = [frozenset(draw(st.sets(st.sampled_from(pts)))) for _ in range(k)]
    return P, sets


# -- construction

def test_k2_and_v(K2, V):
    assert K2.le("bot", "top") and not K2.le("top", "bot")
    assert V.le("a", "c") and not V.le("b", "c") and not V.le("c", "b")


def test_transitive_closure():
    P = make_poset(["x", "y", "z"], [("x", "y"), ("y", "z")])
    assert P.le("x", "z")
    c = chain(3)
    assert all(c.le(f"c{i}", f"c{j}") == (i <= j) for i in range(3) for j in range(3))


def test_cycle_rejected():
    with pytest.raises(PosetError, match="cycle"):
        make_poset(["x", "y"], [("x", "y"), ("y", "x")])


def test_duplicate_rejected():
    with pytest.raises(PosetError, match="duplicate"):
        make_poset(["x", "x"])


def test_unknown_point_in_pair():
    with pytest.raises(PosetError):
        make_poset(["x"], [("x", "y")])


def test_point_cap():
    with pytest.raises(PosetError):
        make_poset([f"p{i}" for i in range(9)])
    assert len(make_poset([f"p{i}" for i in range(9)], max_points=None)) == 9


# -- opens

def test_minimal_open_examples(K2, V):
    assert K2.minimal_open("bot") == {"bot", "top"}
    assert K2.minimal_open("top") == {"top"}
    assert V.minimal_open("a") == {"a", "b", "c"}
    with pytest.raises(PosetError):
        K2.minimal_open("nope")


def test_interior_examples(K2, V):
    assert K2.interior({"bot"}) == frozenset()
    assert K2.interior({"top"}) == {"top"}
    assert V.interior({"a", "b"}) == {"b"}
    with pytest.raises(PosetError):
        V.interior({"z"})


def test_all_opens_examples(K2, V):
    assert K2.all_opens() == [frozenset(), frozenset({"top"}), frozenset({"bot", "top"})]
    assert len(V.all_opens()) == 5
    assert set(V.all_opens()) == {frozenset(), frozenset("b"), frozenset("c"), frozenset("bc"), frozenset("abc")}
    assert make_poset(["o"]).all_opens() == [frozenset(), frozenset({"o"})]


def test_heyting_examples(K2, V):
    assert K2.heyting("imp", {"top"}, set()) == frozenset()
    assert V.heyting("imp", {"b"}, {"c"}) == {"c"}
    for u in V.all_opens():
        assert V.heyting("imp", u, u) == V.top


def test_heyting_rejects_non_open(K2):
    with pytest.raises(PosetError):
        K2.heyting("meet", {"bot"}, {"top"})


def test_components_examples(K2, V):
    assert sorted(map(sorted, V.connected_components({"b", "c"}))) == [["b"], ["c"]]
    assert V.connected_components(V.top) == [V.top]
    assert K2.connected_components(K2.top) == [K2.top]
    assert K2.connected_components(frozenset()) == []


def test_directed_and_sup(K2, V, diamond):
    assert not V.is_directed()
    assert K2.is_directed() and diamond.is_directed()
    assert K2.binary_sup("bot", "top") == "top"
    assert diamond.binary_sup("x", "y") == "T"
    assert V.binary_sup("b", "c") is None
    assert V.binary_sup("a", "b") == "b"


def test_sup_needs_unique_least_bound():
    # x, y have two incomparable upper bounds
    P = make_poset(["x", "y", "u", "v"], [("x", "u"), ("x", "v"), ("y", "u"), ("y", "v")])
    assert P.is_directed() is False
    assert P.binary_sup("x", "y") is None


# -- properties against brute force

@given(posets())
def test_opens_match_brute_force(P):
    assert set(P.all_opens()) == set(brute_opens(P))
    assert len(P.all_opens()) == len(brute_opens(P))


@given(posets())
def test_minimal_open_is_least(P):
    opens = brute_opens(P)
    for a in P:
        u = P.minimal_open(a)
        assert P.is_open(u) and a in u
        assert all(u <= w for w in opens if a in w)


@given(poset_and_sets(k=2))
def test_interior_is_largest_open_inside(data):
    P, (s, t) = data
    inner = P.interior(s)
    brute = frozenset().union(*[w for w in brute_opens(P) if w <= s])
    assert inner == brute
    assert P.interior(inner) == inner
    assert inner <= s
    if s <= t:
        assert inner <= P.interior(t)


@given(poset_and_sets(k=3))
def test_interior_distributes_over_intersection(data):
    P, sets = data
    both = frozenset.intersection(*sets)
    assert P.interior(both) == frozenset.intersection(*[P.interior(s) for s in sets])


@given(posets())
def test_heyting_adjunction_and_negation(P):
    opens = P.all_opens()
    for u in opens:
        for v in opens:
            imp = P.heyting("imp", u, v)
            assert P.is_open(imp)
            for w in opens:
                assert (w & u <= v) == (w <= imp)
    assert P.heyting("neg", P.top) == frozenset()
    assert P.heyting("neg", frozenset()) == P.top


@given(posets())
def test_components_partition_open(P):
    for u in P.all_opens():
        parts = P.connected_components(u)
        assert frozenset().union(*parts) == u if parts else u == frozenset()
        assert sum(map(len, parts)) == len(u)
        for i, x in enumerate(parts):
            for y in parts[i + 1:]:
                assert not any(P.le(p, q) or P.le(q, p) for p in x for q in y)


@given(posets())
def test_binary_sup_is_least_upper_bound(P):
    for a in P:
        for b in P:
            ubs = [c for c in P if P.le(a, c) and P.le(b, c)]
            least = [c for c in ubs if all(P.le(c, d) for d in ubs)]
            assert P.binary_sup(a, b) == (least[0] if least else None)
    directed = all(any(P.le(a, c) and P.le(b, c) for c in P) for a in P for b in P)
    assert P.is_directed() == directed
