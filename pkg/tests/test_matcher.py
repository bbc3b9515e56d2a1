"""solve() wrapper and the estimator-style front end."""
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from smti import Policy, StableMatcher, gen_random, gen_tight, is_stable, solve


def test_solve_bundles_everything():
    inst = gen_tight(2)
    res = solve(inst)
    assert res.matching.size == 3
    assert res.graph.edge_count() == 6
    assert res.trace.instance_key == res.graph.instance_key
    assert res.states[4].terminated


def test_solve_accepts_policy():
    inst = gen_random(5, 5, 0.7, 3, 2)
    res = solve(inst, Policy(man_order="shuffle", woman_tiebreak="shuffle", seed=7))
    assert is_stable(inst, res.matching)


def test_estimator_params_round_trip():
    est = StableMatcher(man_order="shuffle", woman_tiebreak="shuffle", seed=3)
    assert est.get_params() == {"man_order": "shuffle", "woman_tiebreak": "shuffle", "seed": 3}
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    est.set_params(seed=9)
    assert est.get_params()["seed"] == 9


def test_estimator_fit_exposes_run():
    inst = gen_tight(3)
    est = StableMatcher().fit(inst)
    assert est.n_matched_ == 5
    assert est.matching_.size == 5
    assert est.proposal_graph_.edge_count() == 15
    assert est.trace_.instance_key == est.proposal_graph_.instance_key
    assert est.man_states_[6].terminated
    assert est.predict() == est.matching_.sorted_pairs()


def test_estimator_fit_predict():
    inst = gen_tight(2)
    pairs = StableMatcher().fit_predict(inst)
    assert pairs == sorted(pairs)
    assert len(pairs) == 3
    assert is_stable(inst, pairs)


def test_estimator_predict_refits_on_new_data():
    est = StableMatcher().fit(gen_tight(2))
    pairs = est.predict(gen_tight(3))
    assert len(pairs) == 5
    assert est.n_matched_ == 5  # the attributes now describe the new run


def test_estimator_unfitted():
    with pytest.raises(NotFittedError):
        StableMatcher().predict()


def test_estimator_rejects_non_instance():
    with pytest.raises(TypeError):
        StableMatcher().fit([[1, 2], [2, 1]])
