"""Second solving stage: a maximum matching that saturates every full node.

Every person holding or held at exactly L proposals when the rounds stop
can be matched simultaneously; subject to that, we take a maximum-size
matching inside the held-proposal graph. Both facts are asserted at
runtime, as is the size floor |M| >= |E'| / L.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .engine import ProposalGraph
from .instance import MAN, WOMAN, Matching, PersonId


def saturation_set(graph: ProposalGraph) -> set[PersonId]:
    """People whose proposal count reached the cap; all of them must be matched."""
    deg_m, deg_w = graph.degrees()
    L = graph.tie_cap
    out = {PersonId(MAN, a) for a in range(1, graph.n_men + 1) if deg_m[a] == L}
    out |= {PersonId(WOMAN, b) for b in range(1, graph.n_women + 1) if deg_w[b] == L}
    return out


def extract_matching(graph: ProposalGraph, tie_cap: int | None = None) -> Matching:
    """Pick the final matching from the held-proposal graph.

    Maximises coverage of the saturation set first and cardinality second,
    via edge weights W*w(e) + 1 with w(e) counting saturated endpoints and
    W larger than any possible cardinality. Parallel proposals collapse to
    one edge. Raises RuntimeError if the result fails its post-conditions,
    which cannot happen on a graph produced by the proposal rounds.
    """
    L = graph.tie_cap if tie_cap is None else tie_cap
    pairs = graph.pairs()
    must_match = saturation_set(graph)
    if not pairs:
        if must_match:
            raise RuntimeError("saturated nodes exist but the graph has no edges")
        return Matching(frozenset())

    deg_m, deg_w = graph.degrees()
    big = min(graph.n_men, graph.n_women) + 1
    weights = np.zeros((graph.n_men, graph.n_women), dtype=np.int64)
    for a, b in pairs:
        w = (deg_m[a] == L) + (deg_w[b] == L)
        weights[a - 1, b - 1] = big * w + 1
    rows, cols = linear_sum_assignment(weights, maximize=True)
    chosen = frozenset(
        (int(r) + 1, int(c) + 1) for r, c in zip(rows, cols) if weights[r, c] > 0
    )
    matching = Matching(chosen)

    matched = {PersonId(MAN, a) for a, _ in chosen} | {PersonId(WOMAN, b) for _, b in chosen}
    missing = must_match - matched
    if missing:
        raise RuntimeError(f"matching fails to cover saturated nodes: {sorted(missing)}")
    if L * matching.size < graph.edge_count():
        raise RuntimeError("matching smaller than the proposal-count floor")
    return matching
