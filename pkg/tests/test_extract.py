"""Matching extraction from the held-proposal graph."""
import pytest

from smti import (
    extract_matching,
    gen_random,
    gen_tight,
    parse_instance,
    run_stage1,
    saturation_set,
)
from smti.instance import MAN, WOMAN, PersonId


def all_matchings(pairs):
    """Every matching inside an edge list, the slow way."""
    pairs = sorted(set(pairs))

    def rec(i, used_a, used_b, acc):
        if i == len(pairs):
            yield frozenset(acc)
            return
        a, b = pairs[i]
        yield from rec(i + 1, used_a, used_b, acc)
        if a not in used_a and b not in used_b:
            yield from rec(i + 1, used_a | {a}, used_b | {b}, acc + [(a, b)])

    return set(rec(0, set(), set(), []))


def test_tight2_extraction():
    graph, trace, _ = run_stage1(gen_tight(2))
    m = extract_matching(graph)
    assert m.size == 3
    assert m.pairs in (
        frozenset({(1, 1), (3, 2), (2, 4)}),
        frozenset({(3, 1), (2, 2), (1, 4)}),
    )
    sat = saturation_set(graph)
    assert sat == {
        PersonId(MAN, 1), PersonId(MAN, 2), PersonId(MAN, 3),
        PersonId(WOMAN, 1), PersonId(WOMAN, 2), PersonId(WOMAN, 4),
    }
    covered = {PersonId(MAN, a) for a, _ in m.pairs} | {PersonId(WOMAN, b) for _, b in m.pairs}
    assert sat <= covered


def test_extraction_deterministic():
    graph, _, _ = run_stage1(gen_tight(4))
    assert extract_matching(graph).pairs == extract_matching(graph).pairs


def test_parallel_edges_collapse():
    inst = parse_instance("men 2\nwomen 2\nm 1: 1\nm 2: (1 2)\nw 1: 1 2\nw 2: 2\n")
    graph, _, _ = run_stage1(inst)
    assert graph.multiplicity == {(1, 1): 2, (2, 2): 2}
    m = extract_matching(graph)
    assert m.pairs == frozenset({(1, 1), (2, 2)})


def test_empty_graph():
    inst = parse_instance("men 1\nwomen 1\nm 1:\nw 1:\n")
    graph, _, _ = run_stage1(inst)
    assert extract_matching(graph).size == 0


@pytest.mark.parametrize("seed", range(40))
def test_extraction_is_a_max_saturating_matching(seed):
    inst = gen_random(5, 5, 0.55, 3, seed)
    graph, _, _ = run_stage1(inst)
    m = extract_matching(graph)
    support = graph.pairs()
    assert m.pairs <= set(support)
    L = graph.tie_cap
    assert L * m.size >= graph.edge_count()

    sat = saturation_set(graph)

    def covers(pairs):
        got = {PersonId(MAN, a) for a, _ in pairs} | {PersonId(WOMAN, b) for _, b in pairs}
        return sat <= got

    assert covers(m.pairs)
    best = max((len(p) for p in all_matchings(support) if covers(p)), default=0)
    assert m.size == best
