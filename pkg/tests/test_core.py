"""Domain types and exact metrics."""

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import amdl
from amdl import (ContractViolation, FeatureSpace, Hypothesis, HypothesisClass,
                  LabeledDistribution, MDLInstance, RandomizedHypothesis)
from amdl.core import disagreement_exact, loss_exact, max_disagreement_exact

from conftest import brute_best_nu, brute_loss, two_point_instance


def test_loss_prop1_reference_hypothesis():
    inst = amdl.gen_prop1(3, 0.2)
    hstar = inst.hypothesis_class[0]
    for d in inst.distributions:
        assert amdl.loss(hstar, d) == 0.2


def test_loss_fully_consistent_labels_is_zero():
    h = Hypothesis([1, -1, 1])
    dist = LabeledDistribution([Fraction(1, 3)] * 3, [1, 0, 1])
    assert amdl.loss(h, dist) == 0.0


def test_loss_hand_evaluated_two_point():
    # uniform on 2 points, eta_plus = (0.25, 0.75), h identically +1:
    # 0.5*0.75 + 0.5*0.25 = 0.5
    inst = two_point_instance()
    assert amdl.loss(inst.hypothesis_class[0], inst.distributions[0]) == 0.5


def test_loss_dimension_mismatch():
    with pytest.raises(ContractViolation):
        amdl.loss(Hypothesis([1, 1]), LabeledDistribution([1.0], [0.5]))


def test_worst_loss_agnostic_table():
    inst = amdl.gen_agnostic_lb(4, 0.4, 0.05)
    h1, h2 = inst.hypothesis_class.hypotheses
    assert amdl.worst_loss(h1, inst) == 0.4 - 2 * 0.05
    assert amdl.worst_loss(h2, inst) == 0.4
    assert amdl.loss(h1, inst.distributions[0]) == 0.0


def test_worst_loss_single_distribution_reduces_to_loss():
    inst = two_point_instance()
    h = inst.hypothesis_class[0]
    assert amdl.worst_loss(h, inst) == amdl.loss(h, inst.distributions[0])


def test_worst_loss_duplicate_support_mixture():
    inst = two_point_instance()
    mix = RandomizedHypothesis(inst.hypothesis_class, [0, 0])
    assert amdl.worst_loss(mix, inst) == amdl.worst_loss(inst.hypothesis_class[0], inst)


def test_disagreement_prop1():
    inst = amdl.gen_prop1(4, 0.1)
    cls = inst.hypothesis_class
    for i in range(4):
        assert amdl.disagreement(cls[0], cls[i + 1], inst.distributions[i]) == 0.1


def test_disagreement_identity_and_complement():
    inst = two_point_instance()
    h_plus, h_minus = inst.hypothesis_class.hypotheses
    d = inst.distributions[0]
    assert amdl.disagreement(h_plus, h_plus, d) == 0.0
    assert amdl.disagreement(h_plus, h_minus, d) == 1.0


def test_max_disagreement_prop1_pair_brute_force():
    inst = amdl.gen_prop1(3, 0.25)
    cls = inst.hypothesis_class
    # brute force over the pmfs: h_i and h_j disagree on {x_i, x_j}; under D_l
    # only its own flip point carries mass 0.25
    for i in range(1, 4):
        for j in range(1, 4):
            if i == j:
                continue
            expect = max(
                float(sum(d.marginal[x] for x in range(inst.m)
                          if cls[i].labels[x] != cls[j].labels[x]))
                for d in inst.distributions)
            assert amdl.max_disagreement(cls[i], cls[j], inst) == expect == 0.25


def test_max_disagreement_equal_arguments():
    inst = amdl.gen_prop1(2, 0.1)
    assert amdl.max_disagreement(inst.hypothesis_class[1],
                                 inst.hypothesis_class[1], inst) == 0.0


def test_disagreement_region_singleton_and_complements():
    inst = two_point_instance()
    cls = inst.hypothesis_class
    assert amdl.disagreement_region(cls, [0]).size == 0
    assert list(amdl.disagreement_region(cls, [0, 1])) == [0, 1]


def test_disagreement_region_prop1():
    inst = amdl.gen_prop1(5, 0.1)
    region = amdl.disagreement_region(inst.hypothesis_class,
                                      inst.hypothesis_class.full_version_space())
    assert list(region) == [1, 2, 3, 4, 5]


def test_disagreement_region_empty_version_space():
    inst = two_point_instance()
    with pytest.raises(ContractViolation):
        amdl.disagreement_region(inst.hypothesis_class, [])


def test_agreement_labels_unanimous_accessor():
    inst = amdl.gen_prop1(3, 0.1)
    lab = amdl.agreement_labels(inst.hypothesis_class, [0, 1])
    # members disagree only on x_1; elsewhere unanimous -1
    assert lab[1] == 0
    assert lab[0] == -1 and lab[2] == -1 and lab[3] == -1


def test_best_nu_agnostic_lb():
    inst = amdl.gen_agnostic_lb(3, 0.4, 0.05)
    h, nu = amdl.best_nu(inst)
    assert h == inst.hypothesis_class[0]
    assert nu == 0.4 - 2 * 0.05


def test_best_nu_realizable():
    inst = amdl.gen_star_lb(2, 3, 1, 2)
    h, nu = amdl.best_nu(inst)
    assert nu == 0.0
    assert amdl.worst_loss(h, inst) == 0.0


def test_best_nu_matches_brute_force_small_random():
    inst = amdl.gen_random(4, 4, 2, seed=7)
    idx, val = brute_best_nu(inst)
    h, nu = amdl.best_nu(inst)
    assert inst.hypothesis_class.index_of(h) == idx
    assert Fraction(nu) == Fraction(float(val))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rho_is_a_metric(seed):
    inst = amdl.gen_random(5, 5, 2, seed=seed)
    cls = inst.hypothesis_class
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(0, len(cls), size=3)
    ab = max_disagreement_exact(cls[a], cls[b], inst)
    ba = max_disagreement_exact(cls[b], cls[a], inst)
    ac = max_disagreement_exact(cls[a], cls[c], inst)
    cb = max_disagreement_exact(cls[c], cls[b], inst)
    assert ab == ba
    assert ab <= ac + cb
    assert max_disagreement_exact(cls[a], cls[a], inst) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_loss_disagreement_inequality_chain(seed):
    inst = amdl.gen_random(5, 6, 3, seed=seed)
    cls = inst.hypothesis_class
    rng = np.random.default_rng(seed + 1)
    a, b = rng.integers(0, len(cls), size=2)
    for i, d in enumerate(inst.distributions):
        la, lb = loss_exact(cls[a], d), loss_exact(cls[b], d)
        rho = disagreement_exact(cls[a], cls[b], d)
        assert abs(la - lb) <= rho <= la + lb


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_worst_loss_dominates_nu(seed):
    inst = amdl.gen_random(4, 5, 2, seed=seed)
    nu = inst.nu_exact()
    for h in inst.hypothesis_class.hypotheses:
        assert inst.worst_loss_exact(h) >= nu


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_disagreement_region_monotone(seed):
    inst = amdl.gen_random(6, 6, 1, seed=seed)
    cls = inst.hypothesis_class
    rng = np.random.default_rng(seed + 2)
    size = int(rng.integers(1, len(cls)))
    v1 = sorted(rng.choice(len(cls), size=size, replace=False))
    v2 = sorted(set(v1) | {int(rng.integers(0, len(cls)))})
    r1 = set(amdl.disagreement_region(cls, v1).tolist())
    r2 = set(amdl.disagreement_region(cls, v2).tolist())
    assert r1 <= r2


def test_repeated_evaluation_bit_identical():
    inst = amdl.gen_random(6, 8, 3, seed=11)
    h = inst.hypothesis_class[3]
    vals = {amdl.worst_loss(h, inst) for _ in range(5)}
    assert len(vals) == 1


def test_randomized_hypothesis_validation():
    inst = two_point_instance()
    with pytest.raises(ContractViolation):
        RandomizedHypothesis(inst.hypothesis_class, [])
    with pytest.raises(ContractViolation):
        RandomizedHypothesis(inst.hypothesis_class, [5])


def test_hypothesis_class_validation():
    with pytest.raises(ContractViolation):
        HypothesisClass([])
    with pytest.raises(ContractViolation):
        HypothesisClass([Hypothesis([1, 1]), Hypothesis([1, 1])])
    with pytest.raises(ContractViolation):
        Hypothesis([1, 0])


def test_distribution_validation():
    with pytest.raises(ContractViolation):
        LabeledDistribution([0.5, 0.4], [0.5, 0.5])  # does not sum to 1
    with pytest.raises(ContractViolation):
        LabeledDistribution([0.5, 0.5], [1.5, 0.0])  # eta out of range
    with pytest.raises(ContractViolation):
        LabeledDistribution([-0.5, 1.5], [0.5, 0.5])  # negative mass


def test_declared_nu_checked():
    cls = HypothesisClass([Hypothesis([1])])
    dist = LabeledDistribution([1.0], [1.0])
    MDLInstance(FeatureSpace(1), cls, [dist], declared_nu=0.0)
    with pytest.raises(ContractViolation):
        MDLInstance(FeatureSpace(1), cls, [dist], declared_nu=0.3)


def test_instance_file_round_trip(tmp_path):
    inst = amdl.gen_agnostic_lb(4, 0.4, 0.05)
    path = tmp_path / "inst.json"
    amdl.save_instance(inst, str(path))
    back = amdl.load_instance(str(path))
    assert back.m == inst.m and back.k == inst.k
    for da, db in zip(inst.distributions, back.distributions):
        assert [float(v) for v in da.marginal] == [float(v) for v in db.marginal]
        assert [float(v) for v in da.eta_plus] == [float(v) for v in db.eta_plus]
    for ha, hb in zip(inst.hypothesis_class.hypotheses,
                      back.hypothesis_class.hypotheses):
        assert ha == hb
    # a second save emits identical bytes
    path2 = tmp_path / "inst2.json"
    amdl.save_instance(back, str(path2))
    assert path.read_text() == path2.read_text()


def test_mixture_distribution_prop1_average():
    inst = amdl.gen_prop1(4, 0.2)
    bar = amdl.mixture_distribution(inst.distributions)
    assert float(bar.marginal[0]) == 0.8
    assert all(float(bar.marginal[i]) == 0.2 / 4 for i in range(1, 5))
    assert bar.eta_plus[1] == 1


def test_exact_loss_matches_independent_fraction_sum():
    inst = amdl.gen_random(7, 6, 2, seed=3)
    for h in inst.hypothesis_class.hypotheses:
        for d in inst.distributions:
            assert loss_exact(h, d) == brute_loss(h, d)
