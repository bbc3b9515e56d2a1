"""Solver entry points: a one-call pipeline and an estimator-style wrapper."""
from __future__ import annotations

from typing import NamedTuple

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .engine import ManState, Policy, ProposalGraph, Trace, run_stage1
from .extract import extract_matching
from .instance import Instance, Matching, validate_instance


class SolveResult(NamedTuple):
    graph: ProposalGraph
    trace: Trace
    states: dict[int, ManState]
    matching: Matching


def solve(inst: Instance, policy: Policy | None = None) -> SolveResult:
    """Run both stages and return all artifacts of the run."""
    graph, trace, states = run_stage1(inst, policy)
    matching = extract_matching(graph)
    return SolveResult(graph, trace, states, matching)


class StableMatcher(BaseEstimator):
    """Approximate maximum-cardinality stable matching solver.

    For an instance with tie groups of size at most L, the fitted matching
    is stable and at least (2L-1)/(3L-2) times the size of a largest
    stable matching. Hyperparameters mirror Policy; the defaults are fully
    deterministic, and with man_order="shuffle" or woman_tiebreak="shuffle"
    the run is still reproducible for a fixed seed.

    Attributes after fit: ``matching_``, ``proposal_graph_``, ``trace_``,
    ``man_states_``, ``n_matched_``.
    """

    def __init__(self, man_order: str = "index", woman_tiebreak: str = "list", seed: int | None = None):
        self.man_order = man_order
        self.woman_tiebreak = woman_tiebreak
        self.seed = seed

    def fit(self, X: Instance, y=None) -> "StableMatcher":
        """Solve the instance and store the run artifacts on the estimator."""
        if not isinstance(X, Instance):
            raise TypeError("X must be an Instance")
        validate_instance(X)
        policy = Policy(man_order=self.man_order, woman_tiebreak=self.woman_tiebreak, seed=self.seed)
        result = solve(X, policy)
        self.proposal_graph_ = result.graph
        self.trace_ = result.trace
        self.man_states_ = result.states
        self.matching_ = result.matching
        self.n_matched_ = result.matching.size
        return self

    def fit_predict(self, X: Instance, y=None) -> list[tuple[int, int]]:
        """Solve the instance and return the matched pairs, sorted."""
        return self.fit(X).matching_.sorted_pairs()

    def predict(self, X: Instance | None = None) -> list[tuple[int, int]]:
        """Pairs from the most recent fit; refits first when X is given."""
        if X is not None:
            self.fit(X)
        if not hasattr(self, "matching_"):
            raise NotFittedError("this StableMatcher instance is not fitted yet")
        return self.matching_.sorted_pairs()
