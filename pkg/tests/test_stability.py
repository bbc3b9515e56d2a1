"""Blocking-pair detection."""
import pytest

from smti import (
    build_matching,
    find_blocking_pairs,
    gen_random,
    gen_tight,
    is_stable,
    parse_instance,
    solve,
    tight_optimum,
)

SQUARE = """\
men 2
women 2
m 1: 1 2
m 2: 1 2
w 1: 1 2
w 2: 1 2
"""


def test_mutual_improvement_blocks():
    inst = parse_instance(SQUARE)
    # both prefer each other's partner: (1, 1) blocks
    assert find_blocking_pairs(inst, [(1, 2), (2, 1)]) == [(1, 1)]
    assert not is_stable(inst, [(1, 2), (2, 1)])
    assert is_stable(inst, [(1, 1), (2, 2)])


def test_unmatched_is_worse_than_anyone():
    inst = parse_instance("men 1\nwomen 1\nm 1: 1\nw 1: 1\n")
    assert find_blocking_pairs(inst, []) == [(1, 1)]


def test_tie_never_blocks():
    inst = parse_instance("men 2\nwomen 2\nm 1: (1 2)\nm 2: 1\nw 1: (1 2)\nw 2: 1\n")
    # man 1 is indifferent between his partner and woman 1, so no block
    assert find_blocking_pairs(inst, [(1, 2), (2, 1)]) == []


def test_one_sided_preference_does_not_block():
    inst = parse_instance(SQUARE)
    m = build_matching(inst, [(1, 1), (2, 2)])
    assert find_blocking_pairs(inst, m) == []


def test_invalid_matching_rejected():
    inst = parse_instance(SQUARE)
    with pytest.raises(ValueError):
        find_blocking_pairs(inst, [(1, 1), (1, 2)])


def test_blocking_pairs_sorted_by_edge_order():
    inst = parse_instance("men 2\nwomen 2\nm 1: 1 2\nm 2: 1 2\nw 1: 1 2\nw 2: 1 2\n")
    got = find_blocking_pairs(inst, [])
    assert got == sorted(got)
    assert (1, 1) in got


@pytest.mark.parametrize("L", [2, 3, 4, 5])
def test_tight_reference_is_stable(L):
    inst = gen_tight(L)
    assert is_stable(inst, tight_optimum(L))


@pytest.mark.parametrize("seed", range(30))
def test_solver_output_is_stable(seed):
    inst = gen_random(6, 5, 0.6, 3, seed)
    res = solve(inst)
    assert find_blocking_pairs(inst, res.matching) == []
