"""Acceptance suite: one test per criterion, each printing a pass line.

Criteria 1-4 reproduce the worked three-agent problem and the
un-Skolemization examples exactly (up to renaming). Criteria 5-10 are
randomized property suites measured against independent oracles: finite
relativized models, brute-force enumeration, and centralized saturation.
"""

import random
import time

import pytest

from helpers import (
    V,
    brute_glb,
    brute_subsumes,
    clause,
    clause_sets_variant,
    clause_sets_variant_modulo_symbols,
    fn,
    lit,
    matches_onto,
    brute_ground_unifiers,
    random_atom,
    random_hierarchy,
    random_network,
    random_sentence,
    random_signature,
    relativized_verdict,
    sorted_verdict,
    verdict,
)
from osfol.language import (
    Atom,
    Clause,
    Exists,
    ForAll,
    FreshNames,
    Literal,
    Signature,
    Substitution,
    Var,
    alpha_equal,
    apply_substitution,
    term_variables,
    variant_clauses,
)
from osfol.parser import parse_clause, parse_formula, parse_literals, parse_problem
from osfol.report import prove_centralized, run_report
from osfol.saturation import (
    Limits,
    Proved,
    ResourceLimit,
    Saturated,
    TraceStep,
    replay,
    saturate,
    subsumes,
)
from osfol.sorts import BOT, NoGlb, TOP, synthesize_glbs
from osfol.transform import (
    UnskolemizeFailure,
    check_acceptable,
    clausify,
    skolemize_group,
    unskolemize,
    SkolemTable,
)
from osfol.unification import UnifyFailure, unify_atoms, unify_terms

from test_network import steamroller_network


def _report(criterion: int, text: str) -> None:
    print(f"[acceptance] criterion {criterion}: PASS - {text}")


@pytest.fixture
def steamroller():
    return steamroller_network()


def steamroller_query(net):
    return parse_formula(
        "exists a1:A. exists a2:A. (E(a1:A, a2:A) & E(a2:A, j(a1:A, a2:A)))",
        net.agents["x"].signature,
    )


PAPER_KPRIME = [
    "~E(w1:W, f1:F)",
    "~E(w1:W, g1:G)",
    "E(b1:B, c1:C)",
    "~E(b1:B, s1:S)",
    "E(c1:C, SK1(c1:C))",
    "P(SK1(c1:C))",
    "E(s1:S, SK2(s1:S))",
    "P(SK2(s1:S))",
    "M(c1:C, b1:B)",
    "M(s1:S, b1:B)",
    "M(b1:B, f1:F)",
    "M(f1:F, w1:W)",
    "E(a1:A, p1:P) | ~M(a2:A, a1:A) | ~E(a2:A, p2:P) | E(a1:A, a2:A)",
    "G(j(a1:A, a2:A))",
    "~E(a1:A, a2:A) | ~E(a2:A, j(a1:A, a2:A))",
]


def recv_signature(net):
    sig = net.agents["x"].signature.copy()
    sig = sig.merge(net.agents["y"].signature).merge(net.agents["z"].signature)
    sig.declare_function("SK1", ("C",), "P")
    sig.declare_function("SK2", ("S",), "P")
    return sig


def test_criterion_01_steamroller_distributed(steamroller):
    started = time.monotonic()
    outcome = run_report(
        steamroller,
        steamroller_query(steamroller),
        Limits(max_clauses=50_000, timeout_secs=30),
        record_proved=False,
    )
    elapsed = time.monotonic() - started
    assert outcome.status == "proved"
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    sig = recv_signature(steamroller)
    expected = [parse_clause(text, sig) for text in PAPER_KPRIME]
    skolems = {s for s in sig.functions if s.startswith("SK")}
    assert clause_sets_variant_modulo_symbols(
        list(outcome.decider_clauses), expected, skolems
    )
    _report(1, f"distributed run proved in {elapsed:.2f}s with the 15-clause working set")


def test_criterion_02_steamroller_payloads(steamroller):
    outcome = run_report(
        steamroller,
        steamroller_query(steamroller),
        Limits(max_clauses=50_000, timeout_secs=30),
        record_proved=False,
    )
    by_sender = {m.sender: m for m in outcome.messages}
    sy = steamroller.agents["y"].signature

    y = by_sender["y"]
    expected_clauses = [
        parse_clause("~E(w1:W, f1:F)", sy),
        parse_clause("~E(w1:W, g1:G)", sy),
        parse_clause("E(b1:B, c1:C)", sy),
        parse_clause("~E(b1:B, s1:S)", sy),
    ]
    assert clause_sets_variant(y.clauses, expected_clauses)
    expected_formulas = [
        parse_formula("forall c1:C. exists p1:P. E(c1:C, p1:P)", sy),
        parse_formula("forall s1:S. exists p2:P. E(s1:S, p2:P)", sy),
    ]
    assert len(y.formulas) == 2
    matched = [
        any(alpha_equal(got, want) for got in y.formulas) for want in expected_formulas
    ]
    assert all(matched)
    assert y.payload_size() == 6

    z = by_sender["z"]
    sz = steamroller.agents["z"].signature
    expected_z = [
        parse_clause("M(c1:C, b1:B)", sz),
        parse_clause("M(s1:S, b1:B)", sz),
        parse_clause("M(b1:B, f1:F)", sz),
        parse_clause("M(f1:F, w1:W)", sz),
    ]
    assert clause_sets_variant(z.clauses, expected_z) and not z.groups
    _report(2, "agent payloads match the reported six and four formulas")


PAPER_DERIVATION = [
    (16, "E(a1:A, p1:P) | ~M(a2:A, a1:A) | ~E(a2:A, p2:P) | ~E(a2:A, j(a1:A, a2:A))",
     "res", ((13, 4), (15, 1))),
    (17, "E(a1:A, p1:P) | ~M(a2:A, a1:A) | ~E(a2:A, j(a1:A, a2:A))",
     "factor", ((16, 3), (16, 4))),
    (18, "E(w1:W, p1:P) | ~E(f1:F, j(w1:W, f1:F))", "res", ((17, 2), (12, 1))),
    (19, "E(f1:F, p1:P) | ~E(b1:B, j(f1:F, b1:B))", "res", ((17, 2), (11, 1))),
    (20, "~E(f1:F, j(w1:W, f1:F))", "res", ((18, 1), (2, 1))),
    (21, "~E(b1:B, j(f1:F, b1:B))", "res", ((19, 1), (20, 1))),
    (22, "E(b1:B, p1:P) | ~M(s1:S, b1:B) | ~E(s1:S, p2:P)", "res", ((13, 4), (4, 1))),
    (23, "~M(s1:S, b1:B) | ~E(s1:S, p2:P)", "res", ((21, 1), (22, 1))),
    (24, "~E(s1:S, p2:P)", "res", ((23, 1), (10, 1))),
    (25, "", "res", ((24, 1), (7, 1))),
]


def test_criterion_03_steamroller_centralized_and_replay(steamroller):
    # centralized run over all input clauses
    result = prove_centralized(
        steamroller,
        steamroller_query(steamroller),
        Limits(max_clauses=50_000, timeout_secs=30),
    )
    assert isinstance(result, Proved)

    # the published derivation replays step for step
    sig = recv_signature(steamroller)
    steps = [
        TraceStep(i, parse_literals(text), "input")
        for i, text in enumerate(PAPER_KPRIME, start=1)
    ]
    for step_id, text, rule, refs in PAPER_DERIVATION:
        literals = parse_literals(text) if text else ()
        steps.append(TraceStep(step_id, literals, rule, refs))
    mismatch = replay(steps, sig)
    assert mismatch is None, str(mismatch)
    _report(3, "centralized proof found and published derivation (16)-(25) replays")


def test_criterion_04_unskolemization_goldens():
    from test_unskolemize import (
        TestSingleClauseExample,
        TestThreeClausePartition,
        make_pqr_sig,
    )

    three = TestThreeClausePartition()
    three.test_prefix_matches_worked_example(make_pqr_sig())
    three.test_formulas_match_worked_example(make_pqr_sig())
    TestSingleClauseExample().test_mixed_arity_skolems()
    _report(4, "worked partition and mixed-arity example reproduce exactly")


def test_criterion_05_relativization_oracle():
    rng = random.Random(505)
    limits = Limits(max_clauses=1500, timeout_secs=2.5)
    compared = disagreements = 0
    total = 0
    while total < 200:
        total += 1
        hierarchy = random_hierarchy(rng, rng.randint(1, 5))
        sig = random_signature(
            rng, hierarchy, n_preds=rng.randint(1, 4), n_funcs=rng.randint(0, 1),
            n_consts=rng.randint(1, 2),
        )
        sentence = random_sentence(rng, sig, depth=rng.randint(1, 3))
        sorted_result = sorted_verdict(sentence, sig, limits)
        flat_result = relativized_verdict(sentence, sig, limits)
        if "limit" in (sorted_result, flat_result):
            continue
        compared += 1
        if sorted_result != flat_result:
            disagreements += 1
            print("disagreement:", sentence, sorted_result, flat_result)
    assert disagreements == 0
    assert compared >= 120, f"only {compared} comparable sentences"
    _report(5, f"{compared}/{total} sentences comparable, zero disagreements")


def test_criterion_06_distributed_equals_centralized():
    rng = random.Random(606)
    limits = Limits(max_clauses=800, timeout_secs=5)
    compared = disagreements = 0
    seed_variations = 0
    total = 0
    while total < 100:
        total += 1
        net, query = random_network(rng)
        central = prove_centralized(net, query, limits)
        central_verdict = (
            "proved" if isinstance(central, Proved)
            else "saturated" if isinstance(central, Saturated) else "limit"
        )
        outcomes = []
        for seed in range(5):
            outcome = run_report(net, query, limits, seed=seed, record_proved=False)
            outcomes.append(outcome)
        statuses = {o.status for o in outcomes}
        if len(statuses) > 1 and not any(
            o.status == "resource-limit" or o.any_resource_limit for o in outcomes
        ):
            seed_variations += 1
            print("seed variation:", statuses)
        first = outcomes[0]
        if (
            central_verdict == "limit"
            or first.status == "resource-limit"
            or first.any_resource_limit
        ):
            continue
        compared += 1
        if first.status != central_verdict:
            disagreements += 1
            print("disagreement:", first.status, central_verdict)
    assert disagreements == 0
    assert seed_variations == 0
    assert compared >= 60, f"only {compared} comparable networks"
    _report(6, f"{compared}/{total} networks comparable, zero disagreements, seed-stable")


def test_criterion_07_unification_suite():
    rng = random.Random(707)

    # soundness over >= 1000 random pairs
    pairs = 0
    unified = 0
    while pairs < 1000:
        hierarchy = random_hierarchy(rng, rng.randint(1, 5))
        sig = random_signature(rng, hierarchy, n_preds=2, n_funcs=1, n_consts=2)
        sorts = sorted(s for s in hierarchy.sorts if s != BOT)
        vs = [Var(f"v{i}", rng.choice(sorts)) for i in range(3)]
        try:
            a1 = random_atom(rng, sig, vs, depth=2)
            a2 = random_atom(rng, sig, vs, depth=2)
        except ValueError:
            continue
        pairs += 1
        out = unify_atoms([a1, a2], sig)
        if isinstance(out, UnifyFailure):
            continue
        unified += 1
        assert apply_substitution(out, a1) == apply_substitution(out, a2)
        assert out.is_well_sorted(sig)
    assert unified >= 100

    # most-generality against ground enumeration on >= 200 unifiable instances
    checked = 0
    while checked < 200:
        hierarchy = random_hierarchy(rng, rng.randint(1, 4))
        sig = random_signature(rng, hierarchy, n_preds=1, n_funcs=1, n_consts=2)
        sorts = sorted(s for s in hierarchy.sorts if s != BOT)
        vs = [Var(f"v{i}", rng.choice(sorts)) for i in range(2)]
        try:
            a1 = random_atom(rng, sig, vs, depth=1)
            a2 = random_atom(rng, sig, vs, depth=1)
        except ValueError:
            continue
        mgu = unify_atoms([a1, a2], sig)
        ground = brute_ground_unifiers([a1, a2], sig, max_depth=2)
        if isinstance(mgu, UnifyFailure):
            assert not ground
            continue
        checked += 1
        all_vars: list[Var] = []
        for a in (a1, a2):
            for t in a.args:
                term_variables(t, all_vars)
        for tau in ground:
            assert matches_onto(mgu, tau, all_vars, sig)

    # bottom-glb failure exactly when enumeration finds no common subsort
    glb_checked = 0
    while glb_checked < 200:
        hierarchy = random_hierarchy(rng, rng.randint(2, 5))
        sorts = sorted(s for s in hierarchy.sorts if s != BOT)
        s1, s2 = rng.choice(sorts), rng.choice(sorts)
        if hierarchy.comparable(s1, s2):
            continue
        glb_checked += 1
        sig = Signature(hierarchy)
        out = unify_terms(V("y", s1), V("z", s2), sig)
        common = [
            t for t in hierarchy.sorts
            if t != BOT and hierarchy.leq(t, s1) and hierarchy.leq(t, s2)
        ]
        if common:
            assert isinstance(out, Substitution)
        else:
            assert isinstance(out, UnifyFailure) and out.rule == "bottom-glb"
    _report(7, f"{pairs} pairs sound ({unified} unifiable), 200 mgu-general, 200 glb checks")


def test_criterion_08_lattice_suite():
    rng = random.Random(808)
    instances = 0
    while instances < 500:
        hierarchy = random_hierarchy(rng, rng.randint(1, 8), synthesize=False)
        hierarchy = synthesize_glbs(hierarchy)
        instances += 1
        sorts = sorted(hierarchy.sorts)
        for s1 in sorts:
            for s2 in sorts:
                expected = brute_glb(hierarchy, (s1, s2))
                got = hierarchy.glb((s1, s2))
                assert expected is not None, f"post-synthesis pair ({s1}, {s2}) lacks glb"
                assert got == expected
    _report(8, f"{instances} synthesized hierarchies, all pairwise glbs match enumeration")


def test_criterion_09_subsumption_suite():
    rng = random.Random(909)
    instances = 0
    box = Clause(frozenset())
    while instances < 500:
        hierarchy = random_hierarchy(rng, rng.randint(1, 3))
        sig = random_signature(rng, hierarchy, n_preds=2, n_funcs=1, n_consts=2)
        sorts = sorted(s for s in hierarchy.sorts if s != BOT)
        vs = [Var(f"v{i}", rng.choice(sorts)) for i in range(3)]
        try:
            lits1 = [
                Literal(rng.random() < 0.7, a.pred, a.args)
                for a in (random_atom(rng, sig, vs[:2], 1),)
            ]
            lits2 = [
                Literal(rng.random() < 0.7, a.pred, a.args)
                for a in (random_atom(rng, sig, [], 1), random_atom(rng, sig, [], 1))
            ]
        except ValueError:
            continue
        instances += 1
        c1, c2 = Clause(frozenset(lits1)), Clause(frozenset(lits2))
        assert subsumes(c1, c2, sig) == brute_subsumes(c1, c2, sig)
        assert subsumes(box, c1, sig) and subsumes(box, c2, sig)
        assert subsumes(c1, c1, sig) and subsumes(c2, c2, sig)
    _report(9, f"{instances} instances agree with brute-force substitution enumeration")


def test_criterion_10_unskolemize_round_trip():
    rng = random.Random(1010)
    limits = Limits(max_clauses=1500, timeout_secs=5)
    compared = disagreements = failures = 0
    total = 0
    while total < 200:
        total += 1
        hierarchy = random_hierarchy(rng, rng.randint(1, 3))
        sig = random_signature(
            rng, hierarchy, n_preds=rng.randint(1, 3), n_funcs=0, n_consts=1
        )
        sentence = random_sentence(rng, sig, depth=rng.randint(2, 3))

        work = sig.copy()
        fresh = FreshNames(work.non_logical_symbols())
        table = SkolemTable()
        clauses = [c for c in clausify(sentence, work, fresh, table=table) if not c.is_empty]
        if not clauses:
            continue
        skolems = set(table)

        # fixed adversary set for this instance, from the base signature
        adversary = []
        for _ in range(rng.randint(1, 3)):
            vs = [Var("x0", rng.choice(sorted(s for s in hierarchy.sorts if s != BOT)))]
            try:
                a1 = random_atom(rng, sig, vs, 1)
                a2 = random_atom(rng, sig, vs, 1)
            except ValueError:
                continue
            adversary.append(
                Clause(frozenset([Literal(False, a1.pred, a1.args), Literal(True, a2.pred, a2.args)]))
            )

        assert check_acceptable(clauses, skolems) == []
        outcome = unskolemize(clauses, skolems, work, fresh)
        if isinstance(outcome, UnskolemizeFailure):
            failures += 1
            continue
        back_sig = sig.copy()
        back_fresh = FreshNames(back_sig.non_logical_symbols())
        restored: list[Clause] = []
        for group in outcome:
            restored.extend(
                skolemize_group(group, back_sig, back_fresh, emit_sort_atoms=True)
            )

        v1 = verdict(clauses + adversary, work, limits)
        v2 = verdict(restored + adversary, back_sig, limits)
        if "limit" in (v1, v2):
            continue
        compared += 1
        if v1 != v2:
            disagreements += 1
            print("round-trip disagreement:", v1, v2, clauses, restored)
    assert failures == 0, "Skolemized clause sets must stay un-Skolemizable"
    assert disagreements == 0
    assert compared >= 120, f"only {compared} comparable round trips"
    _report(10, f"{compared}/{total} round trips comparable, zero disagreements")
