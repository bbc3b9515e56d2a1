"""Exhaustive optimum: largest stable matching by branch and bound.

Desk-scale only. The search assigns men one at a time (each acceptable
free woman, or nobody), checks stability at complete leaves, and prunes
branches that cannot reach the best size found so far. The bound starts
at the size of a deferred-acceptance matching computed with ties broken
in list order, which is always stable here, so a stable matching always
exists and the oracle never comes back empty.
"""
from __future__ import annotations

from .instance import Instance, Matching, build_rank_tables


def _deferred_acceptance(inst: Instance) -> list[int]:
    """Men-proposing rounds on the tie-broken lists; returns woman->man map."""
    rank_w = [dict()] + [
        {a: i for i, g in enumerate(inst.woman_groups(b)) for a in g}
        for b in range(1, inst.n_women + 1)
    ]
    pref = [()] + [inst.man_neighbors(a) for a in range(1, inst.n_men + 1)]
    nxt = [0] * (inst.n_men + 1)
    holds = [0] * (inst.n_women + 1)  # woman -> man, 0 if free
    free = list(range(inst.n_men, 0, -1))
    while free:
        a = free.pop()
        while nxt[a] < len(pref[a]):
            b = pref[a][nxt[a]]
            nxt[a] += 1
            cur = holds[b]
            if cur == 0:
                holds[b] = a
                break
            if rank_w[b][a] < rank_w[b][cur]:
                holds[b] = a
                free.append(cur)
                break
        # list exhausted: a stays unmatched
    return holds


def brute_force_opt(inst: Instance, limit: int = 10) -> tuple[Matching, int, int]:
    """Return (an optimal stable matching, its size, how many stable
    matchings attain that size). Refuses instances with a side larger
    than ``limit`` (ValueError)."""
    if max(inst.n_men, inst.n_women) > limit:
        raise ValueError(
            f"instance side exceeds the search limit ({max(inst.n_men, inst.n_women)} > {limit})"
        )
    rank_m, rank_w = build_rank_tables(inst)
    n = inst.n_men
    neigh = [()] + [inst.man_neighbors(a) for a in range(1, n + 1)]
    edges = [
        (a, b, rank_m[a][b], rank_w[b][a])
        for a in range(1, n + 1)
        for b in neigh[a]
    ]

    match_m = [0] * (n + 1)
    match_w = [0] * (inst.n_women + 1)

    def leaf_is_stable() -> bool:
        for a, b, ga, gb in edges:
            if match_m[a] == b:
                continue
            wa = match_m[a]
            if wa and rank_m[a][wa] <= ga:
                continue
            hb = match_w[b]
            if hb and rank_w[b][hb] <= gb:
                continue
            return False
        return True

    da_holds = _deferred_acceptance(inst)
    best_size = sum(1 for b in range(1, inst.n_women + 1) if da_holds[b])
    best_pairs: list[tuple[int, int]] | None = None
    count = 0

    def search(i: int, size: int) -> None:
        nonlocal best_size, best_pairs, count
        if size + (n - i + 1) < best_size:
            return
        if i > n:
            if size >= best_size and leaf_is_stable():
                if size > best_size or best_pairs is None:
                    best_size = size
                    best_pairs = [(a, match_m[a]) for a in range(1, n + 1) if match_m[a]]
                    count = 1
                else:
                    count += 1
            return
        for b in neigh[i]:
            if match_w[b] == 0:
                match_m[i] = b
                match_w[b] = i
                search(i + 1, size + 1)
                match_m[i] = 0
                match_w[b] = 0
        search(i + 1, size)

    search(1, 0)
    if best_pairs is None:
        # the deferred-acceptance bound was never met by an enumerated leaf,
        # which cannot happen: that matching is itself a leaf
        raise RuntimeError("search failed to recover a stable matching")
    return Matching(frozenset(best_pairs)), best_size, count
