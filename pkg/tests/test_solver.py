import numpy as np
import pytest

from nnrpca.generators import (
    build_zero_entry_counterexample,
    gen_truth,
    random_symmetric_instance,
    rng_for,
    sample_connected_omega,
    sample_omega,
)
from nnrpca.graph import analyze, graph_from
from nnrpca.model import MeasurementSet, build_asymmetric_instance, build_rank_r_instance, build_symmetric_instance
from nnrpca.objective import eval_objective, objective_spec
from nnrpca.solver import SolverConfig, random_start, solve_asymmetric, solve_rank_r, solve_symmetric


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(decay=1.0)
    with pytest.raises(ValueError):
        SolverConfig(mu0=0.0)
    with pytest.raises(ValueError):
        SolverConfig(init="gaussian")


def test_default_start_is_in_unit_interval():
    u = random_start((1000, 1), SolverConfig())
    assert u.min() > 0 and u.max() <= 1


def test_three_variable_full_observation():
    inst = build_symmetric_instance([1.0, 2.0, 1.0], MeasurementSet.full(3))
    for seed in range(5):
        res = solve_symmetric(inst, cfg=SolverConfig(rng_seed=seed))
        assert res.recovery_error <= 1e-4
        assert res.objective >= 0


def test_non_positive_start_rejected():
    inst = build_symmetric_instance([1.0, 2.0], MeasurementSet.full(2))
    with pytest.raises(ValueError):
        solve_symmetric(inst, u0=[1.0, 0.0])


def test_result_is_best_iterate_and_positive():
    inst = random_symmetric_instance(15, 0.2, 4)
    res = solve_symmetric(inst, cfg=SolverConfig(trace_every=1))
    assert res.w.min() >= SolverConfig().positivity_floor
    assert res.objective == pytest.approx(eval_objective(objective_spec(inst), res.w))
    assert res.objective <= res.trace.min() + 1e-12
    assert res.reason in ("plateau", "max_iters", "step_floor")


def test_determinism():
    inst = random_symmetric_instance(12, 0.1, 2)
    a = solve_symmetric(inst, cfg=SolverConfig(rng_seed=9))
    b = solve_symmetric(inst, cfg=SolverConfig(rng_seed=9))
    assert np.array_equal(a.w, b.w) and np.array_equal(a.trace, b.trace)


def test_all_starts_recover_on_connected_noiseless_instances():
    rng = np.random.default_rng(11)
    for _ in range(5):
        n = int(rng.integers(4, 21))
        inst = build_symmetric_instance(gen_truth(n, 0.1, 2.0, rng), sample_connected_omega(n, 0.5, rng))
        for s in range(50):
            res = solve_symmetric(inst, cfg=SolverConfig(rng_seed=s))
            assert res.recovery_error <= 1e-4
            assert res.objective <= 1e-6


def test_noisy_full_observation_recovery_rate():
    ok = sum(solve_symmetric(random_symmetric_instance(50, 0.2, (5, t)),
                             cfg=SolverConfig(rng_seed=t)).recovery_error <= 1e-4 for t in range(30))
    assert ok >= 27


def test_spurious_counterexample_traps_some_uniform_starts():
    inst = build_zero_entry_counterexample(3)
    errs = [solve_symmetric(inst, cfg=SolverConfig(rng_seed=s)).recovery_error for s in range(300)]
    errs = np.array(errs)
    assert np.mean(errs > 0.5) > 0
    assert np.mean((errs <= 1e-4) | (errs > 0.5)) >= 0.98


def test_diagonal_measurement_removes_the_trap():
    inst = build_symmetric_instance([1.0, 1.0, 0.0], MeasurementSet.full(3))
    for cfg in (SolverConfig(), SolverConfig(init="loguniform", mu0=0.1)):
        errs = [solve_symmetric(inst, cfg=cfg.with_seed(s)).recovery_error for s in range(100)]
        assert max(errs) <= 1e-4


def test_asymmetric_noiseless_balance_and_recovery():
    inst = build_asymmetric_instance([1.0, 2.0], [0.5, 1.0, 3.0], MeasurementSet.full(3, 2))
    res = solve_asymmetric(inst)
    assert res.recovery_error <= 1e-4
    assert abs(np.sum(res.u ** 2) - np.sum(res.v ** 2)) <= 1e-6


def test_sparse_asymmetric_recovery_with_light_balance_and_slow_decay():
    # alpha=1, q=0.995 stalls on about 5% of these runs
    cfg = SolverConfig(decay=0.999, max_iters=50000)
    for k in range(15):
        rng = rng_for(3, "sparse-asym", k)
        m, n = int(rng.integers(2, 12)), int(rng.integers(2, 12))
        while True:
            om = sample_omega((m, n), 0.6, rng)
            if analyze(graph_from(om)).connected:
                break
        inst = build_asymmetric_instance(gen_truth(m, 0.1, 2.0, rng), gen_truth(n, 0.1, 2.0, rng), om)
        for s in range(4):
            res = solve_asymmetric(inst, objective_spec(inst, alpha=0.1), cfg.with_seed(s))
            assert res.recovery_error <= 1e-4


def test_asymmetric_scaling_invariance():
    u, v = np.array([1.0, 2.0, 0.7]), np.array([0.5, 1.0])
    om = MeasurementSet.full(2, 3)
    a = solve_asymmetric(build_asymmetric_instance(u, v, om), cfg=SolverConfig(rng_seed=3))
    b = solve_asymmetric(build_asymmetric_instance(u / 2, 2 * v, om), cfg=SolverConfig(rng_seed=3))
    assert np.allclose(np.outer(a.u, a.v), np.outer(b.u, b.v), atol=1e-6)


def test_asymmetric_solver_needs_asymmetric_spec():
    inst = build_symmetric_instance([1.0, 1.0], MeasurementSet.full(2))
    with pytest.raises(ValueError):
        solve_asymmetric(inst, objective_spec(inst))


def test_rank_one_reduction_is_iterate_identical():
    inst = random_symmetric_instance(20, 0.1, 8)
    cfg = SolverConfig(rng_seed=4, trace_every=1)
    a = solve_symmetric(inst, cfg=cfg)
    b = solve_rank_r(inst, cfg=cfg, r=1)
    assert np.array_equal(a.w, b.w[:, 0])
    assert np.array_equal(a.trace, b.trace)


def test_rank_r_errors_and_noiseless_recovery():
    rng = np.random.default_rng(1)
    U = rng.uniform(0.5, 2.5, (10, 2))
    inst = build_rank_r_instance(U, MeasurementSet.full(10))
    with pytest.raises(ValueError):
        solve_rank_r(inst, r=11)
    ok = sum(solve_rank_r(inst, cfg=SolverConfig(rng_seed=s)).recovery_error <= 1e-4 for s in range(20))
    assert ok >= 19
