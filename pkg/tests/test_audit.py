"""Charging-scheme bookkeeping on concrete runs."""
import json

import pytest

from smti import (
    AuditReport,
    Matching,
    brute_force_opt,
    build_matching,
    check_all,
    classify,
    costs,
    decompose,
    gen_random,
    gen_tight,
    parse_instance,
    run_stage1,
    solve,
    tight_optimum,
)
from smti.audit import ALT_CYCLE, ALT_PATH, BAD, GOOD, M_AUGMENTING, OPT_AUGMENTING, TRIVIAL
from smti.instance import MAN, WOMAN, PersonId

CHECK_NAMES = [
    "degree_cap",
    "event_counter_caps",
    "matching_inside_graph",
    "saturated_all_matched",
    "size_floor",
    "output_stable",
    "reference_stable",
    "rejecter_has_no_tied_slack",
    "doubled_basic_keeps_tied_rejects",
    "no_token_bad_both_ways",
    "good_inputs_cover_bad_outputs",
    "optimal_pair_cost_floor",
    "component_cost_floor",
    "no_short_augmenting_path",
    "total_cost_floor",
    "cost_degree_chain",
    "matched_woman_cost_floor",
    "approximation_ratio",
]


def full_audit(inst, opt=None):
    res = solve(inst)
    if opt is None:
        opt, _, _ = brute_force_opt(inst)
    report = check_all(inst, res.graph, res.trace, res.matching, opt)
    return res, opt, report


def test_check_roster_is_fixed():
    _, _, report = full_audit(gen_tight(2), tight_optimum(2))
    assert [c.name for c in report.checks] == CHECK_NAMES


def test_tight2_tokens_and_costs():
    inst = gen_tight(2)
    res = solve(inst)
    opt = tight_optimum(2)
    cls = classify(inst, res.graph, res.trace, res.matching, opt)

    token_edges = {e for e, t in cls.by_pair.items() if t.tokens}
    if (1, 1) in res.matching.pairs:
        assert token_edges == {(1, 4), (3, 1)}
    else:
        assert token_edges == {(2, 4), (3, 2)}
    assert sum(t.tokens for t in cls.by_pair.values()) == 2
    assert cls.good_inputs == 1
    assert cls.bad_inputs == 1
    assert cls.bad_outputs == 1
    assert cls.good_outputs == 1

    cv = costs(inst, res.graph, cls)
    # every held proposal is charged twice and nothing else moves: the
    # grand total meets the 2L|M| ceiling with equality on this family
    assert cv.total() == 12 == 2 * inst.tie_cap * res.matching.size


def test_tight2_decomposition():
    inst = gen_tight(2)
    res = solve(inst)
    comps = decompose(inst, res.matching, tight_optimum(2))
    shapes = sorted((c.kind, c.length) for c in comps)
    assert shapes == [(ALT_CYCLE, 2), (M_AUGMENTING, 5)]
    cyc = next(c for c in comps if c.kind == ALT_CYCLE)
    assert cyc.m_edges == cyc.opt_edges and len(cyc.m_edges) == 1
    path = next(c for c in comps if c.kind == M_AUGMENTING)
    assert len(path.opt_edges) == 3 and len(path.m_edges) == 2
    assert len(path.nodes) == 6


def test_tight2_report_all_green():
    _, _, report = full_audit(gen_tight(2), tight_optimum(2))
    assert report.all_pass
    assert report.alg_size == 3 and report.opt_size == 4


def test_tight3_cost_accounting():
    inst = gen_tight(3)
    res = solve(inst)
    opt = tight_optimum(3)
    cls = classify(inst, res.graph, res.trace, res.matching, opt)
    assert cls.good_inputs == 4
    assert cls.bad_outputs == 4
    cv = costs(inst, res.graph, cls)
    assert cv.total() == 30 == 2 * inst.tie_cap * res.matching.size

    comps = decompose(inst, res.matching, opt)
    per_comp = sorted(cv.total(c.nodes) for c in comps)
    assert per_comp == [4, 13, 13]

    report = check_all(inst, res.graph, res.trace, res.matching, opt)
    assert report.all_pass
    assert report.alg_size == 5 and report.opt_size == 7


def test_component_kinds_on_crafted_pairs():
    inst = parse_instance(
        "men 3\nwomen 3\n"
        "m 1: 1 2\nm 2: 1 2\nm 3: 3\n"
        "w 1: 1 2\nw 2: 1 2\nw 3: 3\n"
    )
    m = build_matching(inst, [(1, 1)])
    opt = build_matching(inst, [(2, 1)])
    comps = decompose(inst, m, opt)
    kinds = sorted(c.kind for c in comps)
    assert kinds == [ALT_PATH, TRIVIAL, TRIVIAL, TRIVIAL]
    path = next(c for c in comps if c.kind == ALT_PATH)
    assert path.length == 2

    # mirror case: the output has the surplus edge
    m2 = build_matching(inst, [(1, 1), (2, 2)])
    o2 = build_matching(inst, [(2, 1)])
    comps2 = decompose(inst, m2, o2)
    aug = next(c for c in comps2 if c.kind == OPT_AUGMENTING)
    assert aug.length == 3
    assert len(aug.m_edges) == 2 and len(aug.opt_edges) == 1

    # a four-edge cycle
    m3 = build_matching(inst, [(1, 1), (2, 2)])
    o3 = build_matching(inst, [(1, 2), (2, 1)])
    comps3 = decompose(inst, m3, o3)
    cyc = next(c for c in comps3 if c.kind == ALT_CYCLE)
    assert cyc.length == 4
    assert len(cyc.nodes) == 4


def test_every_person_in_exactly_one_component():
    inst = gen_random(6, 5, 0.5, 3, 11)
    res = solve(inst)
    opt, _, _ = brute_force_opt(inst)
    comps = decompose(inst, res.matching, opt)
    seen = [n for c in comps for n in c.nodes]
    assert len(seen) == len(set(seen)) == inst.n_men + inst.n_women


def test_instance_key_mismatch_rejected():
    inst2, inst3 = gen_tight(2), gen_tight(3)
    res3 = solve(inst3)
    with pytest.raises(ValueError):
        classify(inst2, res3.graph, res3.trace, res3.matching, tight_optimum(2))
    with pytest.raises(ValueError):
        check_all(inst2, res3.graph, res3.trace, res3.matching, tight_optimum(2))


def test_foreign_matching_fails_named_checks():
    inst = gen_tight(2)
    res = solve(inst)
    fake = Matching(frozenset({(4, 4)}))  # acceptable pair, but never held
    report = check_all(inst, res.graph, res.trace, fake, tight_optimum(2))
    assert not report.all_pass
    failed = {c.name for c in report.failed()}
    assert "matching_inside_graph" in failed
    assert "saturated_all_matched" in failed


def test_unstable_reference_fails_named_check():
    inst = gen_tight(2)
    res = solve(inst)
    bad_ref = Matching(frozenset({(1, 4)}))  # leaves (2, 2) mutually wanting
    report = check_all(inst, res.graph, res.trace, res.matching, bad_ref)
    failed = {c.name for c in report.failed()}
    assert "reference_stable" in failed


def test_missing_reference_partner_conventions():
    # classification is mechanical in the reference matching, so an empty
    # reference isolates the missing-partner rules: an input token with no
    # reference rival cannot be bad, and an output token with no reference
    # alternative is bad exactly when the receiving woman never rejected
    inst = parse_instance(
        "men 3\nwomen 3\nm 1: 2 3\nm 2: (1 2)\nm 3: 1\nw 1: 2 3\nw 2: 1 2\nw 3: 1\n"
    )
    res = solve(inst)
    empty = build_matching(inst, [])
    cls = classify(inst, res.graph, res.trace, res.matching, empty)
    token_edges = {e: t for e, t in cls.by_pair.items() if t.tokens}
    assert set(token_edges) == {(1, 2), (2, 1)}
    for (a, b), tok in token_edges.items():
        assert tok.input_kind == GOOD
        # both women rejected someone during the run, so neither output is bad
        assert b in res.trace.popular
        assert tok.output_kind == GOOD

    quiet = parse_instance("men 2\nwomen 2\nm 1: 1\nm 2: (1 2)\nw 1: 1 2\nw 2: 2\n")
    qres = solve(quiet)
    qcls = classify(quiet, qres.graph, qres.trace, qres.matching, build_matching(quiet, []))
    qtokens = {e: t for e, t in qcls.by_pair.items() if t.tokens}
    assert set(qtokens) == {(1, 1), (2, 2)}
    for (a, b), tok in qtokens.items():
        assert tok.input_kind == GOOD
        assert b not in qres.trace.popular  # nobody was rejected here
        assert tok.output_kind == BAD


def test_token_accessors_sum_up():
    inst = gen_tight(3)
    res = solve(inst)
    cls = classify(inst, res.graph, res.trace, res.matching, tight_optimum(3))
    assert sum(cls.woman_tokens(b, GOOD) for b in range(1, 8)) == cls.good_inputs
    assert sum(cls.woman_tokens(b, BAD) for b in range(1, 8)) == cls.bad_inputs
    assert sum(cls.man_tokens(a, GOOD) for a in range(1, 8)) == cls.good_outputs
    assert sum(cls.man_tokens(a, BAD) for a in range(1, 8)) == cls.bad_outputs


def test_woman_costs_never_negative():
    for seed in range(20):
        inst = gen_random(6, 6, 0.6, 3, seed + 50)
        res = solve(inst)
        opt, _, _ = brute_force_opt(inst)
        cls = classify(inst, res.graph, res.trace, res.matching, opt)
        cv = costs(inst, res.graph, cls)
        for b in range(1, inst.n_women + 1):
            assert cv.of(PersonId(WOMAN, b)) >= 0
        for a in range(1, inst.n_men + 1):
            assert cv.of(PersonId(MAN, a)) >= res.graph.deg_man(a)


def test_report_serialisation_shape():
    _, _, report = full_audit(gen_tight(2), tight_optimum(2))
    d = json.loads(report.to_json())
    assert d["summary"]["L"] == 2
    assert d["summary"]["alg"] == 3
    assert d["summary"]["opt"] == 4
    assert d["summary"]["ratio"] == "4/3"
    assert d["summary"]["all_pass"] is True
    assert d["instance"] == report.instance_key
    assert len(d["checks"]) == len(CHECK_NAMES)
    for entry in d["checks"]:
        assert set(entry) == {"name", "rule", "pass", "witnesses"}


@pytest.mark.parametrize("seed", range(30))
def test_random_runs_fully_green(seed):
    inst = gen_random(6, 5, 0.55, 3, seed * 7 + 1)
    _, _, report = full_audit(inst)
    assert report.all_pass, [c.name for c in report.failed()]


@pytest.mark.parametrize("L", [2, 3, 4, 5])
def test_tight_family_fully_green(L):
    _, _, report = full_audit(gen_tight(L), tight_optimum(L))
    assert report.all_pass, [c.name for c in report.failed()]
    assert (3 * L - 2) * report.alg_size == (2 * L - 1) * report.opt_size
