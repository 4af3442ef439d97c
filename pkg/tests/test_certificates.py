import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnrpca.certificates import (
    check_det_asymmetric,
    check_det_symmetric,
    check_prob_asymmetric,
    check_prob_symmetric,
    connectivity_failure_bound,
    connectivity_threshold,
    degree_concentration_bounds,
    observation_margin,
    stationary_box_check,
    validate_connectivity,
    validate_degrees,
)
from nnrpca.generators import build_zero_entry_counterexample, gen_truth, sample_connected_omega
from nnrpca.model import MeasurementSet, build_asymmetric_instance, build_symmetric_instance
from nnrpca.objective import REGULARIZED_SYM, descent_direction, objective_spec

# frozen from an independent evaluation of the closed-form bounds with math.log
CONN_50 = 0.36016514330025684
DEG_UPPER_100 = 165.7861266955713
DENSITY_1 = 0.006896551724137931
DENSITY_HALF = 0.0034602076124567475
SAMPLING_100 = 88.14295735981209


def test_observation_margin_examples():
    om = MeasurementSet.symmetric_from_pairs(2, [(0, 1)])
    assert observation_margin(build_symmetric_instance([1.0, 1.0], MeasurementSet.full(2))) == 1.0
    assert observation_margin(build_symmetric_instance([1.0, 1.0], om, {(0, 1): -0.9})) == pytest.approx(0.1)
    assert observation_margin(build_symmetric_instance([1.0, 1.0], om, {(0, 1): -1.0})) == 0.0


def test_noiseless_connected_instance_passes():
    inst = build_symmetric_instance([0.5, 1.0, 2.0], MeasurementSet.full(3))
    rep = check_det_symmetric(inst, 1.0, require_connected=True)
    assert rep.passed
    assert rep["degree_ratio"].rhs == 0.0


def test_single_bad_edge_needs_huge_good_degree():
    om = MeasurementSet.full(3)
    inst = build_symmetric_instance([1.0, 1.0, 1.0], om, {(0, 1): 2.0})
    rep = check_det_symmetric(inst, 1.0)
    assert rep["degree_ratio"].lhs == 2 and rep["degree_ratio"].rhs == 48
    assert not rep.passed


def test_zero_truth_entry_fails_positivity():
    rep = check_det_symmetric(build_zero_entry_counterexample(3), 1.0)
    assert not rep["truth_positive"].passed and not rep.passed


def test_bipartite_component_fails():
    om = MeasurementSet.symmetric_from_pairs(3, [(0, 1), (1, 2)])
    assert not check_det_symmetric(build_symmetric_instance([1.0, 1.0, 1.0], om), 1.0).passed


def test_report_rows_end_with_overall():
    rows = check_det_symmetric(build_symmetric_instance([1.0, 1.0], MeasurementSet.full(2)), 1.0).rows()
    assert rows[0] == ("theorem", "condition", "lhs", "relation", "rhs", "pass")
    assert rows[-1][1] == "overall" and rows[-1][-1] == 1


def test_asymmetric_certificate():
    inst = build_asymmetric_instance([1.0, 2.0], [1.0, 1.0, 1.0], MeasurementSet.full(3, 2))
    assert check_det_asymmetric(inst, 1.0).passed
    om = MeasurementSet.asymmetric_from_pairs(2, 3, [(0, 0), (1, 0), (0, 1), (1, 1)])
    rep = check_det_asymmetric(build_asymmetric_instance([1.0, 1.0], [1.0, 1.0, 1.0], om), 1.0)
    assert not rep["good_components"].passed


def test_asymmetric_degree_threshold_uses_balanced_kappa():
    # balanced w* = [1, 2, 1, 2] has kappa 2; one bad edge gives 48 * 2^4
    om = MeasurementSet.full(2, 2)
    inst = build_asymmetric_instance([1.0, 2.0], [1.0, 2.0], om, {(0, 0): 0.5})
    rep = check_det_asymmetric(inst, 1.0)
    assert rep.constants["kappa"] == pytest.approx(2.0)
    assert rep["degree_ratio"].rhs == pytest.approx(768.0)


def test_probabilistic_thresholds():
    rep = check_prob_symmetric(100, 1.0, 0.0, 1.0, 1.0, eta=0.1)
    assert rep["sampling"].rhs == pytest.approx(SAMPLING_100)
    assert not rep["sampling"].passed and rep.notes["sampling_vacuous"] == 1.0
    assert rep["density"].passed
    assert check_prob_symmetric(10, 1.0, 0.0, 1.0, 1.0)["density"].rhs == pytest.approx(DENSITY_1)
    assert check_prob_symmetric(10, 1.0, 0.0, 7.0, 0.01)["density"].passed
    assert check_prob_asymmetric(10, 10, 1.0, 0.0, 1.0, 1.0)["density"].rhs == pytest.approx(DENSITY_1)
    assert check_prob_asymmetric(5, 10, 1.0, 0.0, 1.0, 1.0)["density"].rhs == pytest.approx(DENSITY_HALF)
    with pytest.raises(ValueError):
        check_prob_asymmetric(11, 10, 1.0, 0.0, 1.0, 1.0)


def test_symmetric_and_square_asymmetric_density_thresholds_agree():
    for kappa in (1.0, 1.5, 3.0):
        a = check_prob_symmetric(20, 0.5, 0.0, kappa, 0.5)["density"].rhs
        b = check_prob_asymmetric(20, 20, 0.5, 0.0, kappa, 0.5)["density"].rhs
        assert a == pytest.approx(b)


@settings(max_examples=200)
@given(st.floats(1, 5), st.floats(1, 5), st.floats(0.05, 1), st.floats(0.05, 1),
       st.floats(0, 0.01), st.floats(0, 1), st.integers(2, 10**6))
def test_certificates_are_monotone_in_kappa_and_c(k1, k2, c1, c2, d, p, n):
    k_lo, k_hi = sorted((k1, k2))
    c_lo, c_hi = sorted((c1, c2))
    easy = check_prob_symmetric(n, p, d, k_lo, c_hi)
    hard = check_prob_symmetric(n, p, d, k_hi, c_lo)
    assert hard.passed <= easy.passed
    m = max(2, n // 3)
    if m <= n:
        assert check_prob_asymmetric(m, n, p, d, k_hi, c_lo).passed <= check_prob_asymmetric(m, n, p, d, k_lo, c_hi).passed


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 1), st.floats(0.05, 1), st.integers(0, 10**6))
def test_deterministic_certificate_monotone_in_c(c1, c2, seed):
    rng = np.random.default_rng(seed)
    n = 6
    om = MeasurementSet.full(n)
    noise = {p: 2.0 for p in om.pairs() if rng.random() < 0.05}
    inst = build_symmetric_instance(rng.uniform(0.9, 1.0, n), om, noise)
    lo, hi = sorted((c1, c2))
    assert check_det_symmetric(inst, lo).passed <= check_det_symmetric(inst, hi).passed


def test_connectivity_thresholds():
    assert connectivity_threshold(50) == pytest.approx(CONN_50)
    assert connectivity_threshold(2) == 1.0
    assert connectivity_threshold(10, m=10) == 1.0
    assert connectivity_failure_bound(50) == pytest.approx(0.03)


def test_degree_bounds():
    b = degree_concentration_bounds(100, 1.0)
    assert b.max_upper == pytest.approx(DEG_UPPER_100)
    assert not degree_concentration_bounds(100, 0.1).min_applicable
    bb = degree_concentration_bounds(40, 1.0, m=40)
    assert bb.min_lower == 20.0


def test_box_check():
    u_star = np.array([0.5, 1.0, 2.0])
    assert stationary_box_check(u_star, 1.0, u_star)
    assert not stationary_box_check(np.array([0.5, 2.5 * 2.0, 2.0]), 1.0, u_star)
    low = (1.0 / 4) * (0.25) ** 2 * 2.0
    assert not stationary_box_check(np.array([low, 1.0, 2.0]), 1.0, u_star)


def test_monte_carlo_validators_small():
    chk = validate_connectivity(20, 200, seed=1)
    assert chk.passed and chk.p == connectivity_threshold(20)
    below = validate_connectivity(20, 50, seed=1, p=0.05)
    assert not below.applicable and below.passed
    hi, lo = validate_degrees(200, 24 * math.log(200) / 200, 200, seed=2)
    assert hi.passed and lo.passed and lo.applicable


def test_certified_instances_have_descent_directions_everywhere():
    rng = np.random.default_rng(5)
    tested = 0
    while tested < 30:
        n = int(rng.integers(3, 11))
        u_star = gen_truth(n, 0.5, 1.0, rng)
        om = sample_connected_omega(n, 0.7, rng)
        noise = {p: 2.0 for p in om.pairs() if rng.random() < 0.05}
        inst = build_symmetric_instance(u_star, om, noise)
        c = observation_margin(inst)
        if not 0 < c <= 1 or not check_det_symmetric(inst, c).passed:
            continue
        tested += 1
        spec = objective_spec(inst, REGULARIZED_SYM)
        for _ in range(20):
            rep = descent_direction(spec, rng.uniform(0.05, 2.0, n))
            assert rep.forward < -1e-8 and rep.backward > 1e-8
