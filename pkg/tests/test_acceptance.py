"""The fifteen acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line (visible even
under output capture) and then asserts.
"""
import random
import time
from itertools import combinations

import pytest

from sheaflab import muchnik as mu
from sheaflab import suites
from sheaflab.baire import PrefixCone, refine_disjoint, refinement_report
from sheaflab.checks import (
    currying_witness, directed_collapse_violations, posets_up_to_iso, power_sheaf_count,
    set_form_subsheaves,
)
from sheaflab.generate import choice_model, random_directed_poset, random_poset, random_sheaf
from sheaflab.modelio import load_fixture
from sheaflab.poset import make_poset
from sheaflab.semantics import check_schema, eval_formula
from sheaflab.sheaf import simple_sheaf

MUCHNIK_FIXTURES = ("muchnik_v", "reals_k2", "reals_chain3")


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, started=None):
        took = f" ({time.perf_counter() - started:.1f}s)" if started is not None else ""
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}{took}")
        return ok
    return emit


def counts_line(rep):
    return ", ".join(f"{k}={v}" for k, v in rep.counts().items())


def test_01_sheaf_axioms(report):
    t0 = time.perf_counter()
    rep = suites.run_suite("sheaf-axioms", seed=2024, count=200)
    took = time.perf_counter() - t0
    ok = rep.ok and len(rep.records) >= 200 and took < 60
    assert report(1, ok, f"sheaf axioms on {len(rep.records)} random sheaves: {counts_line(rep)}", t0)
    assert rep.failures == [] and len(rep.records) >= 200
    assert took < 60


def test_02_heyting_laws(report):
    t0 = time.perf_counter()
    rep = suites.run_suite("heyting-laws")
    took = time.perf_counter() - t0
    sizes = [len([p for p in posets_up_to_iso(4) if len(p) == n]) for n in range(1, 5)]
    ok = rep.ok and len(rep.records) == 24 and sizes == [1, 2, 5, 16] and took < 30
    assert report(2, ok, f"Heyting laws on {len(rep.records)} posets (sizes {sizes}): {counts_line(rep)}", t0)
    assert rep.failures == [] and len(rep.records) == 24
    assert took < 30


def test_03_ihol_battery(report):
    t0 = time.perf_counter()
    entries = suites.load_battery()
    valid = [e for e in entries if e.expect == "valid"]
    rep = suites.run_suite("ihol", seed=7)
    took = time.perf_counter() - t0
    checked = [r for r in rep.records if r.verdict in ("pass", "fail")]
    names = {r.instance.split(":")[0] for r in checked}
    caps = [r for r in rep.records if r.verdict == "cap"]
    ok = (
        rep.ok and not caps and len(valid) >= 30 and {"nn_pem", "subst_const", "subst_var"} <= names
        and took < 300
    )
    assert report(3, ok, f"{len(valid)} valid schemas, {len(checked)} instances: {counts_line(rep)}", t0)
    assert rep.failures == [] and caps == []
    assert len(valid) >= 30
    assert took < 300


def test_04_pem_refutation(report):
    m = load_fixture("pem_k2")
    pem = eval_formula(m, "E a \\/ ~ E a")
    nn = eval_formula(m, "~ ~ (E a \\/ ~ E a)")
    ok = pem == {"top"} and nn == m.base.top
    assert report(4, ok, f"[[PEM]] = {sorted(pem)}, [[~~PEM]] = {sorted(nn)}")
    assert pem == {"top"} and pem != m.base.top
    assert nn == m.base.top


def test_05_glivenko(report):
    rep = suites.run_suite("glivenko", seed=5)
    ok = rep.ok and len(rep.records) >= 20
    assert report(5, ok, f"{len(rep.records)} propositional formulas: {counts_line(rep)}")
    assert rep.failures == [] and len(rep.records) >= 20


def _choice_run(schema, seed, count=30):
    rng = random.Random(seed)
    records, not_full = [], []
    for i in range(count):
        m = choice_model(rng)
        rep = suites.run_choice(schema, m)
        for r in rep.records:
            r.model = f"gen{i}"
            if set(r.truth_value) != set(m.base):
                not_full.append(r)
        records += rep.records
    return records, not_full


def _counts(records):
    out = {}
    for r in records:
        out[r.verdict] = out.get(r.verdict, 0) + 1
    return ", ".join(f"{k}={v}" for k, v in sorted(out.items()))


def test_06_choice_simple(report):
    t0 = time.perf_counter()
    records, not_full = _choice_run("AC", 11)
    bad = [r for r in records if r.verdict != "pass"]
    nontrivial = sum(1 for r in records if r.lhs)
    ok = not bad and not not_full and len(suites.AC_CORPUS) >= 10
    assert report(6, ok, f"{len(suites.AC_CORPUS)} templates, {len(records)} AC instances "
                         f"({nontrivial} with nonempty antecedent): {_counts(records)}", t0)
    assert bad == [] and not_full == []
    assert len(suites.AC_CORPUS) >= 10


def test_07_gmp(report):
    t0 = time.perf_counter()
    records, not_full = _choice_run("GMP", 13)
    bad = [r for r in records if r.verdict != "pass"]
    ok = not bad and not not_full
    assert report(7, ok, f"{len(suites.GMP_CORPUS)} templates, {len(records)} GMP instances: {_counts(records)}", t0)
    assert bad == [] and not_full == []


def test_08_directed_collapse(report):
    rng = random.Random(8)
    posets = [random_directed_poset(rng) for _ in range(60)]
    posets += [P for P in posets_up_to_iso(4) if P.is_directed()]
    bad = []
    for P in posets:
        assert P.is_directed()
        for k in (1, 2, 3):
            bad += directed_collapse_violations(simple_sheaf(P, range(k)))
    ok = not bad
    assert report(8, ok, f"{len(posets)} directed posets, simple sheaves of 1-3 values, {len(bad)} violations")
    assert bad == []


def test_09_currying(report):
    K2 = make_poset(["bot", "top"], [("bot", "top")])
    V = make_poset(["a", "b", "c"], [("a", "b"), ("a", "c")])
    results = {}
    for name, P in (("K2", K2), ("V", V)):
        phi, problems = currying_witness(P, [0, 1], ["y0", "y1"])
        results[name] = (phi is not None, problems)
    ok = all(found and not problems for found, problems in results.values())
    assert report(9, ok, f"witness found and invertible: {results}")
    assert ok


def test_10_power_sheaf_counts(report):
    rng = random.Random(10)
    checked = []
    while len(checked) < 25:
        P = random_poset(rng, max_points=3)
        m = random_sheaf(rng, P, max_stalk=2)
        nonempty = [s for s in m.all_sections() if not s.is_empty()]
        if not nonempty or len(nonempty) > 14:
            continue
        checked.append((power_sheaf_count(m), len(set_form_subsheaves(m))))
    ok = all(a == b for a, b in checked)
    assert report(10, ok, f"{len(checked)} sheaves, global sections vs subsheaves: {checked[:8]} ...")
    assert ok and len(checked) >= 20


def test_11_muchnik_duality(report):
    t0 = time.perf_counter()
    rep = suites.run_suite("muchnik-duality", seed=11, count=50)
    took = time.perf_counter() - t0
    ok = rep.ok and len(rep.records) >= 50 and took < 60
    assert report(11, ok, f"{len(rep.records)} oracle preorders (<= 5 oracles): {counts_line(rep)}", t0)
    assert rep.failures == [] and len(rep.records) >= 50
    assert took < 60


def _least_c(ds, a, b):
    degs = mu.all_weak_degrees(ds)
    cands = [c for c in degs if mu.brute_sup(ds, a, c) >= b]
    return [c for c in cands if all(c <= d for d in cands)]


def test_12_implication_agreement(report):
    pairs = bad = 0
    for name in MUCHNIK_FIXTURES:
        ds = load_fixture(name).degrees
        for a in mu.all_weak_degrees(ds):
            for b in mu.all_weak_degrees(ds):
                pairs += 1
                heyting = mu.wdeg_imp_heyting(ds, a, b)
                if heyting != mu.brute_imp(ds, a, b) or _least_c(ds, a, b) != [heyting]:
                    bad += 1
    assert report(12, bad == 0, f"{pairs} weak-degree pairs over {len(MUCHNIK_FIXTURES)} fixtures, {bad} disagreements")
    assert bad == 0


SENTENCES = {
    "muchnik_v": ["E a", "E b", "E c", "~ E a", "E a \\/ E b", "E a => E b", "a = c", "E a /\\ E b"],
    "reals_k2": ["E uh", "E vh", "uh = vh", "vh <=T uh", "uh <=T vh", "exists x:R. ~ E uh /\\ E x"],
    "reals_chain3": ["E x0", "E x1", "E x2", "x2 <=T x1", "x0 <=T (x1, x2)", "forall y:R. E y => E x1"],
}


def test_13_topos_correspondence(report):
    n = bad = 0
    for name, texts in SENTENCES.items():
        m = load_fixture(name)
        ds = m.degrees
        for A, B in combinations(texts, 2):
            n += 1
            a, b = (mu.psi(ds, eval_formula(m, t)) for t in (A, B))
            got = {
                "and": mu.psi(ds, eval_formula(m, f"({A}) /\\ ({B})")),
                "or": mu.psi(ds, eval_formula(m, f"({A}) \\/ ({B})")),
                "imp": mu.psi(ds, eval_formula(m, f"({A}) => ({B})")),
                "not": mu.psi(ds, eval_formula(m, f"~ ({A})")),
            }
            want = {
                "and": mu.brute_sup(ds, a, b),
                "or": mu.brute_inf(ds, a, b),
                "imp": mu.brute_imp(ds, a, b),
                "not": mu.brute_imp(ds, a, mu.top(ds)),
            }
            bad += got != want
    assert report(13, bad == 0, f"{n} sentence pairs on {len(SENTENCES)} Muchnik fixtures, {bad} mismatches")
    assert n >= 10 and bad == 0


def test_14_acbp(report):
    corpus = suites.ACBP_CORPUS
    worst = 0.0
    records = []
    for name in ("reals_k2", "reals_chain3"):
        m = load_fixture(name)
        for schema in ("ACBP", "AC"):
            for tpl in corpus:
                t0 = time.perf_counter()
                (rec,) = check_schema(m, schema, "R", "R", [tpl])
                worst = max(worst, time.perf_counter() - t0)
                records.append(rec)
    bad = [r for r in records if r.verdict != "pass"]
    full = sum(1 for r in records if r.lhs)
    ok = not bad and len(corpus) >= 5 and worst < 60
    assert report(14, ok, f"{len(corpus)} templates, {len(records)} instances, {full} with nonempty antecedent, "
                          f"slowest {worst:.2f}s, {len(bad)} failures")
    assert bad == [] and len(corpus) >= 5
    assert worst < 60


def test_15_disjoint_refinement(report):
    rng = random.Random(15)
    bad = []
    for _ in range(1000):
        b, depth = rng.randint(1, 3), rng.randint(0, 5)
        cones = [
            PrefixCone(tuple(rng.randrange(b) for _ in range(rng.randint(0, depth))))
            for _ in range(rng.randint(0, 6))
        ]
        out = refine_disjoint(cones, b, depth)
        rep = refinement_report(cones, out, b, depth)
        if not all(rep.values()):
            bad.append((cones, rep))
    assert report(15, not bad, f"1000 cone collections (b <= 3, D <= 5), {len(bad)} violations")
    assert bad == []
