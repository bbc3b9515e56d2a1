"""Machine-checks for the charging argument behind the solver's guarantee.

The analysis buys the ratio (3L-2)/(2L-1) by classifying every held
proposal that is absorbed by neither the output matching nor an optimal
one (a "token") as good or bad from each endpoint's point of view, then
charging node costs

    cost(a) = deg(a) + #bad outputs from a    (men)
    cost(b) = deg(b) - #good inputs to b      (women)

and bounding component sums of cost over the union of the two matchings.
``check_all`` re-derives every checkable inequality on a concrete run and
reports each one with witnesses for any failure.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .engine import ProposalGraph, Trace
from .instance import (
    MAN,
    WOMAN,
    Instance,
    Matching,
    PersonId,
    build_rank_tables,
    instance_key,
)
from .stability import find_blocking_pairs

GOOD = "good"
BAD = "bad"


@dataclass(frozen=True)
class EdgeTokens:
    """Token accounting for one held pair (a, b).

    ``tokens`` is the number of held copies not absorbed by membership in
    the output or optimal matching: n minus one per matching containing
    the pair, floored at zero. All tokens of a pair classify alike.
    """

    multiplicity: int
    tokens: int
    input_kind: str | None  # at the woman; None when tokens == 0
    output_kind: str | None  # at the man


@dataclass
class Classification:
    by_pair: dict[tuple[int, int], EdgeTokens]

    def _total(self, attr: str, kind: str) -> int:
        return sum(
            e.tokens for e in self.by_pair.values() if getattr(e, attr) == kind
        )

    @property
    def good_inputs(self) -> int:
        return self._total("input_kind", GOOD)

    @property
    def bad_inputs(self) -> int:
        return self._total("input_kind", BAD)

    @property
    def good_outputs(self) -> int:
        return self._total("output_kind", GOOD)

    @property
    def bad_outputs(self) -> int:
        return self._total("output_kind", BAD)

    def woman_tokens(self, b: int, kind: str) -> int:
        return sum(
            e.tokens
            for (_, w), e in self.by_pair.items()
            if w == b and e.input_kind == kind
        )

    def man_tokens(self, a: int, kind: str) -> int:
        return sum(
            e.tokens
            for (x, _), e in self.by_pair.items()
            if x == a and e.output_kind == kind
        )


def _check_keys(inst: Instance, graph: ProposalGraph, trace: Trace) -> str:
    key = instance_key(inst)
    if graph.instance_key != key or trace.instance_key != key:
        raise ValueError("graph or trace does not belong to this instance")
    return key


def classify(
    inst: Instance,
    graph: ProposalGraph,
    trace: Trace,
    matching: Matching,
    opt: Matching,
) -> Classification:
    """Classify every token of the held-proposal graph.

    A token into b is bad when b ever rejected someone and the optimum
    treats her token partner generously: he beats her optimal partner, or
    ties him while that partner fell short of the cap, or ties him while
    being once-promoted with her output partner in the same tie. A token
    out of a is bad when the woman never rejected anyone, or when a holds
    her above his own optimal partner without the promotion credentials
    that excuse it. Comparisons against a missing partner are false.
    """
    _check_keys(inst, graph, trace)
    rank_m, rank_w = build_rank_tables(inst)
    deg_m, deg_w = graph.degrees()
    L = graph.tie_cap
    statuses = (0,) + trace.final_statuses
    popular = trace.popular
    m_of_man = matching.man_to_woman()
    m_of_woman = matching.woman_to_man()
    o_of_man = opt.man_to_woman()
    o_of_woman = opt.woman_to_man()

    def input_is_bad(a: int, b: int) -> bool:
        if b not in popular:
            return False
        ob = o_of_woman.get(b)
        if ob is None:
            return False
        ra, ro = rank_w[b][a], rank_w[b][ob]
        if ra < ro:
            return True  # he beats her optimal partner outright
        if ra > ro:
            return False
        if deg_m[ob] < L:
            return True  # tied, and her optimal partner fell short of the cap
        mb = m_of_woman.get(b)
        return statuses[a] == 1 and mb is not None and rank_w[b][mb] == ro

    def output_is_bad(a: int, b: int) -> bool:
        if b not in popular:
            return True
        oa = o_of_man.get(a)
        if oa is None or rank_m[a][b] >= rank_m[a][oa]:
            return False
        if statuses[a] == 0:
            return True
        if statuses[a] == 2:
            return False
        ob = o_of_woman.get(b)
        mb = m_of_woman.get(b)
        tied_chain = (
            ob is not None
            and mb is not None
            and rank_w[b][mb] == rank_w[b][ob] == rank_w[b][a]
        )
        return not tied_chain

    by_pair: dict[tuple[int, int], EdgeTokens] = {}
    for (a, b), n in graph.multiplicity.items():
        absorbed = ((a, b) in matching.pairs) + ((a, b) in opt.pairs)
        tokens = max(0, n - absorbed)
        if tokens:
            ik = BAD if input_is_bad(a, b) else GOOD
            ok = BAD if output_is_bad(a, b) else GOOD
        else:
            ik = ok = None
        by_pair[(a, b)] = EdgeTokens(n, tokens, ik, ok)
    return Classification(by_pair)


@dataclass
class CostVector:
    costs: dict[PersonId, int]

    def of(self, node: PersonId) -> int:
        return self.costs[node]

    def total(self, nodes=None) -> int:
        if nodes is None:
            return sum(self.costs.values())
        return sum(self.costs[n] for n in nodes)


def costs(inst: Instance, graph: ProposalGraph, cls: Classification) -> CostVector:
    """Node costs: men pay degree plus bad outputs, women pay degree minus
    good inputs. Every person appears, including isolated ones at cost 0."""
    deg_m, deg_w = graph.degrees()
    out: dict[PersonId, int] = {}
    for a in range(1, inst.n_men + 1):
        out[PersonId(MAN, a)] = deg_m[a] + cls.man_tokens(a, BAD)
    for b in range(1, inst.n_women + 1):
        out[PersonId(WOMAN, b)] = deg_w[b] - cls.woman_tokens(b, GOOD)
    return CostVector(out)


TRIVIAL = "trivial"
ALT_PATH = "alternating_path"
ALT_CYCLE = "alternating_cycle"
OPT_AUGMENTING = "opt_augmenting"
M_AUGMENTING = "m_augmenting"


@dataclass(frozen=True)
class Component:
    kind: str
    nodes: tuple[PersonId, ...]
    length: int  # edge count; a pair in both matchings contributes two
    m_edges: tuple[tuple[int, int], ...]
    opt_edges: tuple[tuple[int, int], ...]


def decompose(inst: Instance, matching: Matching, opt: Matching) -> list[Component]:
    """Split the union multigraph of the two matchings into components.

    Everyone has at most one edge per matching, so each component is an
    isolated node, an even alternating cycle (a pair in both matchings is
    a two-edge cycle), or an alternating path. A path whose terminal edges
    both come from ``opt`` could augment ``matching`` and is labelled so;
    the mirror case augments ``opt``; mixed ends are plain paths.
    """
    m_of_man = matching.man_to_woman()
    m_of_woman = matching.woman_to_man()
    o_of_man = opt.man_to_woman()
    o_of_woman = opt.woman_to_man()

    def neighbors(node: PersonId) -> list[tuple[str, PersonId]]:
        out = []
        if node.side == MAN:
            if node.index in m_of_man:
                out.append(("m", PersonId(WOMAN, m_of_man[node.index])))
            if node.index in o_of_man:
                out.append(("o", PersonId(WOMAN, o_of_man[node.index])))
        else:
            if node.index in m_of_woman:
                out.append(("m", PersonId(MAN, m_of_woman[node.index])))
            if node.index in o_of_woman:
                out.append(("o", PersonId(MAN, o_of_woman[node.index])))
        return out

    def as_pair(u: PersonId, v: PersonId) -> tuple[int, int]:
        return (u.index, v.index) if u.side == MAN else (v.index, u.index)

    everyone = [PersonId(MAN, a) for a in range(1, inst.n_men + 1)]
    everyone += [PersonId(WOMAN, b) for b in range(1, inst.n_women + 1)]
    seen: set[PersonId] = set()
    components: list[Component] = []

    for start in everyone:
        if start in seen:
            continue
        nbrs = neighbors(start)
        if not nbrs:
            seen.add(start)
            components.append(Component(TRIVIAL, (start,), 0, (), ()))
            continue
        # collect the component and find its endpoints
        comp = {start}
        frontier = [start]
        while frontier:
            u = frontier.pop()
            for _, v in neighbors(u):
                if v not in comp:
                    comp.add(v)
                    frontier.append(v)
        endpoints = sorted(u for u in comp if len(neighbors(u)) == 1)
        origin = endpoints[0] if endpoints else min(comp)

        # walk the path or cycle edge by edge, alternating matchings
        order = [origin]
        kinds: list[str] = []
        m_edges: list[tuple[int, int]] = []
        opt_edges: list[tuple[int, int]] = []
        prev_kind: str | None = None
        cur = origin
        while True:
            # nodes carry at most one edge per matching, so excluding the
            # arrival kind is enough to keep moving forward
            options = [(k, v) for k, v in neighbors(cur) if k != prev_kind]
            if len(order) == 1 and not endpoints:
                options.sort(key=lambda kv: kv[1])  # deterministic cycle direction
            if not options:
                break
            kind, nxt = options[0]
            kinds.append(kind)
            (m_edges if kind == "m" else opt_edges).append(as_pair(cur, nxt))
            if nxt == origin:
                break  # cycle closed
            order.append(nxt)
            prev_kind = kind
            cur = nxt

        seen |= comp
        length = len(kinds)
        if not endpoints:
            label = ALT_CYCLE
        elif kinds[0] == "o" and kinds[-1] == "o":
            label = M_AUGMENTING
        elif kinds[0] == "m" and kinds[-1] == "m":
            label = OPT_AUGMENTING
        else:
            label = ALT_PATH
        components.append(
            Component(label, tuple(order), length, tuple(m_edges), tuple(opt_edges))
        )
    return components


@dataclass(frozen=True)
class CheckResult:
    name: str
    rule: str
    passed: bool
    witnesses: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rule": self.rule,
            "pass": self.passed,
            "witnesses": list(self.witnesses),
        }


@dataclass
class AuditReport:
    instance_key: str
    tie_cap: int
    alg_size: int
    opt_size: int
    checks: list[CheckResult]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        ratio = f"{self.opt_size}/{self.alg_size}" if self.alg_size else f"{self.opt_size}/0"
        return {
            "instance": self.instance_key,
            "summary": {
                "L": self.tie_cap,
                "alg": self.alg_size,
                "opt": self.opt_size,
                "ratio": ratio,
                "all_pass": self.all_pass,
            },
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def check_all(
    inst: Instance,
    graph: ProposalGraph,
    trace: Trace,
    matching: Matching,
    opt: Matching,
) -> AuditReport:
    """Verify every checkable claim of the analysis on one concrete run."""
    key = _check_keys(inst, graph, trace)
    L = graph.tie_cap
    n, m = inst.n_men, inst.n_women
    rank_m, rank_w = build_rank_tables(inst)
    deg_m, deg_w = graph.degrees()
    statuses = (0,) + trace.final_statuses
    cls = classify(inst, graph, trace, matching, opt)
    cv = costs(inst, graph, cls)
    comps = decompose(inst, matching, opt)
    m_of_woman = matching.woman_to_man()
    o_of_man = opt.man_to_woman()
    o_of_woman = opt.woman_to_man()
    checks: list[CheckResult] = []

    def add(name: str, rule: str, witnesses: list[str]) -> None:
        checks.append(CheckResult(name, rule, not witnesses, tuple(witnesses)))

    # --- mechanical state of the run -------------------------------------
    bad = [f"man {a} holds {deg_m[a]}" for a in range(1, n + 1) if deg_m[a] > L]
    bad += [f"woman {b} holds {deg_w[b]}" for b in range(1, m + 1) if deg_w[b] > L]
    add("degree_cap", "nobody holds more than L proposals at the end", bad)

    bad = []
    if trace.n_bounce > L * m:
        bad.append(f"bounces {trace.n_bounce} > {L * m}")
    if trace.n_forward > 3 * n * m:
        bad.append(f"forwards {trace.n_forward} > {3 * n * m}")
    if trace.n_reject > 3 * L * n * m:
        bad.append(f"rejects {trace.n_reject} > {3 * L * n * m}")
    add(
        "event_counter_caps",
        "bounces <= L*|B|, forwards <= 3|A||B|, rejects <= 3L|A||B|",
        bad,
    )

    bad = [str(p) for p in matching.sorted_pairs() if p not in graph.multiplicity]
    add("matching_inside_graph", "every output pair is a held pair", bad)

    matched_nodes = {PersonId(MAN, a) for a, _ in matching.pairs}
    matched_nodes |= {PersonId(WOMAN, b) for _, b in matching.pairs}
    bad = [str(u) for u in sorted(
        {u for u in _saturated(graph, deg_m, deg_w) if u not in matched_nodes}
    )]
    add("saturated_all_matched", "everyone at the proposal cap is matched", bad)

    bad = []
    if L * matching.size < graph.edge_count():
        bad.append(f"L*|M| = {L * matching.size} < held proposals {graph.edge_count()}")
    add("size_floor", "|M| >= (held proposals) / L", bad)

    bad = [str(p) for p in find_blocking_pairs(inst, matching)]
    add("output_stable", "the output matching admits no blocking pair", bad)

    bad = [str(p) for p in find_blocking_pairs(inst, opt)]
    add("reference_stable", "the reference optimum admits no blocking pair", bad)

    # --- end-state facts the charging argument leans on ------------------
    bad = []
    for (a, b) in graph.pairs():
        for b2 in _tie_group(inst, a, b):
            if b2 != b and deg_w[b2] < L and b in trace.popular:
                bad.append(f"({a}, {b}) held while tied {b2} has room yet {b} rejected someone")
    add(
        "rejecter_has_no_tied_slack",
        "a woman who ever rejected cannot hold a proposal whose owner ties her with a woman short of the cap",
        bad,
    )

    bad = []
    for (a, b), c in graph.multiplicity.items():
        if c < 2 or statuses[a] != 0:
            continue
        for (a2, b2) in trace.rejected_pairs:
            if b2 == b and rank_w[b][a2] == rank_w[b][a] and (a2, b) not in graph.multiplicity:
                bad.append(f"woman {b} rejected {a2}, ties him with doubled-up basic {a}, holds nothing from him")
    add(
        "doubled_basic_keeps_tied_rejects",
        "a woman holding two copies from a basic man still holds something from every tied man she rejected",
        bad,
    )

    # --- token classification --------------------------------------------
    bad = [
        f"pair {p} tokens are bad both ways"
        for p, e in cls.by_pair.items()
        if e.tokens and e.input_kind == BAD and e.output_kind == BAD
    ]
    add("no_token_bad_both_ways", "no token is a bad input and a bad output at once", bad)

    bad = []
    if cls.good_inputs < cls.bad_outputs:
        bad.append(f"good inputs {cls.good_inputs} < bad outputs {cls.bad_outputs}")
    add("good_inputs_cover_bad_outputs", "good inputs are at least as many as bad outputs", bad)

    # --- cost floors ------------------------------------------------------
    bad = []
    for a, b in sorted(opt.pairs):
        pair_cost = cv.of(PersonId(MAN, a)) + cv.of(PersonId(WOMAN, b))
        floor = L
        if deg_m[a] >= 1:
            floor = max(floor, L + 1)
        if deg_w[b] <= L - 1:
            floor = max(floor, 2 * L - 1)
        if pair_cost < floor:
            bad.append(f"optimal pair ({a}, {b}) costs {pair_cost} < {floor}")
    add(
        "optimal_pair_cost_floor",
        "each optimal pair costs at least L; L+1 if the man holds anything; 2L-1 if the woman is short of the cap",
        bad,
    )

    bad = []
    for comp in comps:
        c_cost = cv.total(comp.nodes)
        k = len(comp.opt_edges)
        floor = (L + 1) * k
        if comp.kind == M_AUGMENTING and comp.length >= 5:
            floor += L - 2
        if c_cost < floor:
            bad.append(f"component {comp.kind} {comp.nodes} costs {c_cost} < {floor}")
    add(
        "component_cost_floor",
        "each component costs at least (L+1) per optimal pair inside, plus L-2 if it augments the output and has length 5 or more",
        bad,
    )

    bad = [
        f"augmenting path of length {comp.length}: {comp.nodes}"
        for comp in comps
        if comp.kind == M_AUGMENTING and comp.length in (1, 3)
    ]
    add("no_short_augmenting_path", "no output-augmenting path has length 1 or 3", bad)

    total_cost = cv.total()
    bound = (L + 1) * opt.size + (L - 2) * (opt.size - matching.size)
    bad = []
    if total_cost < bound:
        bad.append(f"total cost {total_cost} < {bound}")
    add(
        "total_cost_floor",
        "summed cost is at least (L+1)|OPT| + (L-2)(|OPT| - |M|)",
        bad,
    )

    degree_sum = sum(deg_m[1:]) + sum(deg_w[1:])
    bad = []
    if 2 * L * matching.size < degree_sum:
        bad.append(f"2L|M| = {2 * L * matching.size} < degree sum {degree_sum}")
    if degree_sum < total_cost:
        bad.append(f"degree sum {degree_sum} < total cost {total_cost}")
    add(
        "cost_degree_chain",
        "2L|M| bounds the degree sum, which bounds the total cost",
        bad,
    )

    bad = []
    for b in range(1, m + 1):
        node = PersonId(WOMAN, b)
        k = cls.woman_tokens(b, BAD)
        if b in m_of_woman and cv.of(node) < k + 1:
            bad.append(f"woman {b} matched in output, {k} bad inputs, cost {cv.of(node)}")
        ob = o_of_woman.get(b)
        if ob is not None and (ob, b) in graph.multiplicity and cv.of(node) < k + 1:
            bad.append(f"woman {b} holds her optimal partner, {k} bad inputs, cost {cv.of(node)}")
        mb = m_of_woman.get(b)
        if (
            ob is not None
            and mb is not None
            and ob != mb
            and (ob, b) in graph.multiplicity
            and cv.of(node) < 2
        ):
            bad.append(f"woman {b} matched differently in the two matchings, cost {cv.of(node)}")
    add(
        "matched_woman_cost_floor",
        "a matched woman costs at least bad inputs + 1, and at least 2 when her two partners differ and she holds the optimal one",
        bad,
    )

    bad = []
    if (3 * L - 2) * matching.size < (2 * L - 1) * opt.size:
        bad.append(
            f"(3L-2)|M| = {(3 * L - 2) * matching.size} < (2L-1)|OPT| = {(2 * L - 1) * opt.size}"
        )
    add("approximation_ratio", "(3L-2)|M| >= (2L-1)|OPT|", bad)

    return AuditReport(key, L, matching.size, opt.size, checks)


def _saturated(graph: ProposalGraph, deg_m: list[int], deg_w: list[int]) -> set[PersonId]:
    L = graph.tie_cap
    out = {PersonId(MAN, a) for a in range(1, graph.n_men + 1) if deg_m[a] == L}
    out |= {PersonId(WOMAN, b) for b in range(1, graph.n_women + 1) if deg_w[b] == L}
    return out


def _tie_group(inst: Instance, a: int, b: int) -> tuple[int, ...]:
    for group in inst.man_groups(a):
        if b in group:
            return group
    return ()
