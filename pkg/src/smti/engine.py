"""First solving stage: capped proposal rounds with bounce, forward, reject.

Every man carries L proposals (L = tie_cap) and sends them one at a time to
the best women on his list he has not been rejected by; a woman holds at
most L proposals, possibly several from the same man. When a proposal
arrives at a full woman she tries, in order, to

  * bounce: some involved man is indifferent between her and a woman with
    spare capacity, so one of his proposals moves there and the newcomer
    fits;
  * forward: some involved man has at least two proposals here and another
    acceptable, not-yet-refusing, equally good woman; one of his proposals
    travels onward (and may cascade);
  * reject: otherwise she discards a proposal from a least-desirable man,
    preferring to shed a lower promotion status and, within that, a larger
    pile from one man.

A man rejected by his whole list is promoted (twice at most) and starts
over; a third wipe-out terminates him. Rejection-aware desirability plus
promotion is what buys the approximation guarantee downstream.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .instance import Instance, instance_key

ACCEPT = "accept"
BOUNCE = "bounce"
FORWARD = "forward"
REJECT = "reject"
PROMOTE = "promote"
TERMINATE = "terminate"


@dataclass(frozen=True)
class Policy:
    """Scheduling knobs. The defaults are fully deterministic.

    man_order: "index" serves eligible men lowest-index-first; "shuffle"
    uses one seeded permutation drawn at the start of the run.
    woman_tiebreak: how a man picks among equally good targets; "list"
    keeps his written order, "shuffle" reorders each tie group once,
    seeded. scan_order names the fixed rule used inside bounce/forward
    scans (held men by ascending index, the newcomer last, candidate
    women in list order); "index" is the only rule implemented.
    """

    man_order: str = "index"
    woman_tiebreak: str = "list"
    seed: int | None = None
    scan_order: str = "index"

    def __post_init__(self):
        if self.man_order not in ("index", "shuffle"):
            raise ValueError(f"unknown man_order {self.man_order!r}")
        if self.woman_tiebreak not in ("list", "shuffle"):
            raise ValueError(f"unknown woman_tiebreak {self.woman_tiebreak!r}")
        if self.scan_order != "index":
            raise ValueError(f"unknown scan_order {self.scan_order!r}")


@dataclass
class ManState:
    status: int = 0  # 0 basic, 1 and 2 promoted
    rejected: set[int] = field(default_factory=set)
    placed: int = 0
    terminated: bool = False


@dataclass(frozen=True)
class TraceEvent:
    t: int
    kind: str
    man: int
    woman: int | None = None
    aux_man: int | None = None
    aux_woman: int | None = None
    status: int | None = None

    def to_record(self) -> dict:
        rec = {"t": self.t, "kind": self.kind, "man": self.man}
        if self.woman is not None:
            rec["woman"] = self.woman
        if self.aux_man is not None:
            rec["aux_man"] = self.aux_man
        if self.aux_woman is not None:
            rec["aux_woman"] = self.aux_woman
        if self.status is not None:
            rec["status"] = self.status
        return rec


@dataclass
class Trace:
    """Event log of one stage-one run plus end-of-run summary facts."""

    events: tuple[TraceEvent, ...]
    n_accept: int
    n_bounce: int
    n_forward: int
    n_reject: int
    popular: frozenset[int]  # women that rejected at least one proposal
    rejected_pairs: frozenset[tuple[int, int]]  # (man, woman) ever rejected at woman
    final_statuses: tuple[int, ...]  # final_statuses[a-1] for man a
    instance_key: str

    def to_jsonl(self) -> str:
        lines = [json.dumps(e.to_record(), separators=(",", ":")) for e in self.events]
        summary = {
            "kind": "summary",
            "n_accept": self.n_accept,
            "n_bounce": self.n_bounce,
            "n_forward": self.n_forward,
            "n_reject": self.n_reject,
            "popular": sorted(self.popular),
            "statuses": list(self.final_statuses),
            "instance": self.instance_key,
        }
        lines.append(json.dumps(summary, separators=(",", ":")))
        return "\n".join(lines) + "\n"


@dataclass
class ProposalGraph:
    """Multigraph of proposals held when stage one stops."""

    n_men: int
    n_women: int
    tie_cap: int
    multiplicity: dict[tuple[int, int], int]
    instance_key: str

    def deg_man(self, a: int) -> int:
        return sum(c for (x, _), c in self.multiplicity.items() if x == a)

    def deg_woman(self, b: int) -> int:
        return sum(c for (_, y), c in self.multiplicity.items() if y == b)

    def degrees(self) -> tuple[list[int], list[int]]:
        """Multiplicity-counted degree arrays (index 0 unused)."""
        deg_m = [0] * (self.n_men + 1)
        deg_w = [0] * (self.n_women + 1)
        for (a, b), c in self.multiplicity.items():
            deg_m[a] += c
            deg_w[b] += c
        return deg_m, deg_w

    def edge_count(self) -> int:
        return sum(self.multiplicity.values())

    def pairs(self) -> list[tuple[int, int]]:
        """Distinct held pairs, sorted."""
        return sorted(self.multiplicity)

    def dump_lines(self) -> str:
        return "".join(f"{a} {b} {c}\n" for (a, b), c in sorted(self.multiplicity.items()))


class _Run:
    """Mutable working state; frozen into ProposalGraph and Trace at the end."""

    def __init__(self, inst: Instance, policy: Policy):
        self.inst = inst
        self.L = inst.tie_cap
        n, m = inst.n_men, inst.n_women
        rng = random.Random(policy.seed if policy.seed is not None else 0)

        self.man_order = list(range(1, n + 1))
        if policy.man_order == "shuffle":
            rng.shuffle(self.man_order)

        # Effective per-man view of his groups; "shuffle" reorders within
        # each tie group once up front, so the run stays deterministic.
        self.groups_m: list[list[tuple[int, ...]]] = [[]]
        for a in range(1, n + 1):
            groups = [list(g) for g in inst.man_groups(a)]
            if policy.woman_tiebreak == "shuffle":
                for g in groups:
                    rng.shuffle(g)
            self.groups_m.append([tuple(g) for g in groups])
        self.tie_group_m: list[dict[int, tuple[int, ...]]] = [{}]
        for a in range(1, n + 1):
            self.tie_group_m.append({b: g for g in self.groups_m[a] for b in g})
        self.n_neigh = [0] * (n + 1)
        for a in range(1, n + 1):
            self.n_neigh[a] = sum(len(g) for g in self.groups_m[a])

        self.rank_w: list[dict[int, int]] = [{}]
        for b in range(1, m + 1):
            self.rank_w.append({a: i for i, g in enumerate(inst.woman_groups(b)) for a in g})

        self.holds: list[dict[int, int]] = [dict() for _ in range(m + 1)]  # woman -> man -> copies
        self.deg_m = [0] * (n + 1)
        self.deg_w = [0] * (m + 1)
        self.states = {a: ManState() for a in range(1, n + 1)}
        self.events: list[TraceEvent] = []
        self.counts = {ACCEPT: 0, BOUNCE: 0, FORWARD: 0, REJECT: 0}
        self.popular: set[int] = set()
        self.rejected_pairs: set[tuple[int, int]] = set()
        # generous cap derived from the running-time argument; hitting it is a bug
        self.event_budget = 8 * (self.L * m + 3 * n * m + 3 * self.L * n * m + self.L * n) + 1024

    def emit(self, kind: str, man: int, woman: int | None = None, aux_man: int | None = None,
             aux_woman: int | None = None, status: int | None = None) -> None:
        self.events.append(TraceEvent(len(self.events), kind, man, woman, aux_man, aux_woman, status))
        if kind in self.counts:
            self.counts[kind] += 1
        if len(self.events) > self.event_budget:
            raise RuntimeError("internal step limit exceeded; proposal rounds are not converging")

    def add_hold(self, a: int, b: int) -> None:
        self.holds[b][a] = self.holds[b].get(a, 0) + 1
        self.deg_m[a] += 1
        self.deg_w[b] += 1
        self.states[a].placed = self.deg_m[a]
        if self.deg_w[b] > self.L or self.deg_m[a] > self.L:
            raise RuntimeError(f"capacity overflow at pair ({a}, {b})")

    def drop_hold(self, a: int, b: int) -> None:
        left = self.holds[b][a] - 1
        if left:
            self.holds[b][a] = left
        else:
            del self.holds[b][a]
        self.deg_m[a] -= 1
        self.deg_w[b] -= 1
        self.states[a].placed = self.deg_m[a]

    def scan_candidates(self, a: int, b: int) -> list[int]:
        cand = sorted(self.holds[b])
        if a not in self.holds[b]:
            cand.append(a)
        return cand

    def propose(self, a: int, b: int) -> None:
        """Deliver one proposal; forwards continue in-loop rather than recursing."""
        while True:
            L = self.L
            if self.deg_w[b] < L:
                self.add_hold(a, b)
                self.emit(ACCEPT, a, b)
                return

            # bounce: any involved man with an equally good woman that has room
            moved = False
            for alpha in self.scan_candidates(a, b):
                for beta in self.tie_group_m[alpha][b]:
                    if beta == b or self.deg_w[beta] >= L:
                        continue
                    if alpha == a:
                        self.add_hold(a, beta)  # the newcomer lands at beta directly
                    else:
                        self.drop_hold(alpha, b)
                        self.add_hold(a, b)
                        self.add_hold(alpha, beta)
                    self.emit(BOUNCE, a, b, aux_man=alpha, aux_woman=beta)
                    moved = True
                    break
                if moved:
                    return

            # forward: a doubled-up man sends one copy to an equally good woman
            # he has not been refused by and is not already holding at
            forwarded = False
            for alpha in self.scan_candidates(a, b):
                copies = self.holds[b].get(alpha, 0) + (1 if alpha == a else 0)
                if copies < 2:
                    continue
                for beta in self.tie_group_m[alpha][b]:
                    if beta == b or beta in self.states[alpha].rejected:
                        continue
                    if self.holds[beta].get(alpha, 0):
                        continue
                    self.drop_hold(alpha, b)
                    self.add_hold(a, b)
                    self.emit(FORWARD, alpha, b, aux_man=a, aux_woman=beta)
                    a, b = alpha, beta
                    forwarded = True
                    break
                if forwarded:
                    break
            if forwarded:
                continue

            # reject: least preference tier, then lowest promotion status,
            # then the largest pile of copies, then lowest index
            pool = self.scan_candidates(a, b)
            worst_rank = max(self.rank_w[b][x] for x in pool)
            tier = [x for x in pool if self.rank_w[b][x] == worst_rank]
            low_status = min(self.states[x].status for x in tier)
            least = [x for x in tier if self.states[x].status == low_status]
            victim = max(least, key=lambda x: (self.holds[b].get(x, 0) + (1 if x == a else 0), -x))
            if victim != a:
                self.drop_hold(victim, b)
                self.add_hold(a, b)
            # victim == a: the newcomer (or an equivalent copy) is turned away, holdings unchanged
            self.popular.add(b)
            self.rejected_pairs.add((victim, b))
            self.emit(REJECT, victim, b, aux_man=a)
            st = self.states[victim]
            st.rejected.add(b)
            if len(st.rejected) == self.n_neigh[victim]:
                if st.status < 2:
                    st.status += 1
                    st.rejected.clear()
                    self.emit(PROMOTE, victim, status=st.status)
                else:
                    st.terminated = True
                    self.emit(TERMINATE, victim, status=st.status)
            return

    def next_target(self, a: int) -> int:
        rejected = self.states[a].rejected
        for group in self.groups_m[a]:
            for b in group:
                if b not in rejected:
                    return b
        raise RuntimeError(f"man {a} has no remaining target")  # loop condition prevents this

    def eligible(self, a: int) -> bool:
        st = self.states[a]
        return not st.terminated and self.deg_m[a] < self.L and len(st.rejected) < self.n_neigh[a]


def run_stage1(inst: Instance, policy: Policy | None = None) -> tuple[ProposalGraph, Trace, dict[int, ManState]]:
    """Run the proposal rounds to quiescence.

    Returns the held-proposal multigraph, the event trace, and the final
    per-man states. Deterministic for a fixed (instance, policy) pair.
    """
    if policy is None:
        policy = Policy()
    run = _Run(inst, policy)
    while True:
        a = next((x for x in run.man_order if run.eligible(x)), None)
        if a is None:
            break
        run.propose(a, run.next_target(a))

    n, m, L = inst.n_men, inst.n_women, inst.tie_cap
    for a in range(1, n + 1):
        st = run.states[a]
        if run.deg_m[a] != L and not st.terminated and run.n_neigh[a] > 0:
            raise RuntimeError(f"man {a} stopped neither fully placed nor terminated")
    if run.counts[BOUNCE] > L * m or run.counts[FORWARD] > 3 * n * m or run.counts[REJECT] > 3 * L * n * m:
        raise RuntimeError("event counters exceeded their analytical caps")

    key = instance_key(inst)
    multiplicity = {}
    for b in range(1, m + 1):
        for a, c in run.holds[b].items():
            multiplicity[(a, b)] = c
    graph = ProposalGraph(n, m, L, dict(sorted(multiplicity.items())), key)
    trace = Trace(
        events=tuple(run.events),
        n_accept=run.counts[ACCEPT],
        n_bounce=run.counts[BOUNCE],
        n_forward=run.counts[FORWARD],
        n_reject=run.counts[REJECT],
        popular=frozenset(run.popular),
        rejected_pairs=frozenset(run.rejected_pairs),
        final_statuses=tuple(run.states[a].status for a in range(1, n + 1)),
        instance_key=key,
    )
    return graph, trace, run.states
