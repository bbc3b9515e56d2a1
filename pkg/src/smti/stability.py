"""Stability checking: a pair blocks only if both sides strictly gain."""
from __future__ import annotations

from typing import Iterable

from .instance import Instance, Matching, build_matching, build_rank_tables


def find_blocking_pairs(inst: Instance, matching: Matching | Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """All acceptable pairs (a, b) outside the matching where a strictly
    prefers b to his current situation and b strictly prefers a to hers.
    Being unmatched is worse than any acceptable partner; a tie never
    blocks. The matching is validated first (ValueError on bad input).
    """
    if not isinstance(matching, Matching):
        matching = build_matching(inst, matching)
    else:
        matching = build_matching(inst, matching.pairs)
    rank_m, rank_w = build_rank_tables(inst)
    man_of = matching.woman_to_man()
    woman_of = matching.man_to_woman()
    blocking = []
    for a, b in inst.edges():
        if woman_of.get(a) == b:
            continue
        wa = woman_of.get(a)
        if wa is not None and rank_m[a][wa] <= rank_m[a][b]:
            continue
        hb = man_of.get(b)
        if hb is not None and rank_w[b][hb] <= rank_w[b][a]:
            continue
        blocking.append((a, b))
    return blocking


def is_stable(inst: Instance, matching: Matching | Iterable[tuple[int, int]]) -> bool:
    return not find_blocking_pairs(inst, matching)
