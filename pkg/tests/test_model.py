import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnrpca.model import (
    ComponentVector,
    MeasurementSet,
    SparseNoise,
    balanced_truth,
    build_asymmetric_instance,
    build_rank_r_instance,
    build_symmetric_instance,
    condition_number,
    recovery_error,
    symmetrize,
)

from oracles import relative_product_error


def test_component_vector_rejects_negative_and_nan():
    with pytest.raises(ValueError):
        ComponentVector([1.0, -0.1])
    with pytest.raises(ValueError):
        ComponentVector([1.0, np.nan])
    assert ComponentVector([1.0, 2.0]).strictly_positive
    assert not ComponentVector([1.0, 0.0]).strictly_positive


def test_condition_number():
    assert condition_number([0.5, 1.0, 2.0]) == 4.0
    with pytest.raises(ValueError):
        condition_number([0.0, 1.0])


def test_symmetric_pairs_are_canonical_and_sorted():
    om = MeasurementSet.symmetric_from_pairs(3, [(2, 0), (1, 1), (0, 1)])
    assert om.pairs() == [(0, 1), (0, 2), (1, 1)]
    assert (2, 0) in om and (0, 2) in om and (2, 2) not in om


def test_duplicates_after_canonicalization_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        MeasurementSet.symmetric_from_pairs(3, [(0, 1), (1, 0)])


def test_out_of_range_pair_rejected():
    with pytest.raises(ValueError):
        MeasurementSet.asymmetric_from_pairs(2, 3, [(2, 0)])


def test_full_sizes():
    assert len(MeasurementSet.full(5)) == 15
    assert len(MeasurementSet.full(4, 2)) == 8
    assert MeasurementSet.full(4, 2).shape == (2, 4)


def test_measurement_arrays_are_read_only():
    om = MeasurementSet.full(3)
    with pytest.raises(ValueError):
        om.rows[0] = 2


@given(st.integers(2, 8), st.data())
def test_index_of_roundtrip(n, data):
    pairs = data.draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).map(
        lambda p: (min(p), max(p))), min_size=1))
    om = MeasurementSet.symmetric_from_pairs(n, pairs)
    r = np.array([p[1] for p in pairs])
    c = np.array([p[0] for p in pairs])
    pos = om.index_of(r, c)
    assert np.all(pos >= 0)
    assert [om.pairs()[k] for k in pos] == [(min(a, b), max(a, b)) for a, b in zip(r, c)]


def test_noise_outside_omega_rejected():
    om = MeasurementSet.symmetric_from_pairs(2, [(0, 1)])
    with pytest.raises(ValueError, match="outside"):
        build_symmetric_instance([1, 1], om, SparseNoise.from_dict({(0, 0): 1.0}))


def test_symmetric_instance_values_and_noise():
    om = MeasurementSet.full(2)
    inst = build_symmetric_instance([1.0, 2.0], om, {(1, 0): -0.5})
    assert om.pairs() == [(0, 0), (0, 1), (1, 1)]
    np.testing.assert_allclose(inst.observed, [1.0, 1.5, 4.0])
    assert inst.bad.pairs() == [(0, 1)]
    assert inst.good.pairs() == [(0, 0), (1, 1)]
    assert inst.noise.as_dict() == {(0, 1): -0.5}
    np.testing.assert_allclose(inst.clean_values(), [1.0, 2.0, 4.0])


def test_nonpositive_observations_are_kept():
    om = MeasurementSet.full(2)
    inst = build_symmetric_instance([1.0, 1.0], om, {(0, 1): -3.0})
    assert inst.observed.min() == -2.0


def test_asymmetric_instance_and_symmetrization():
    om = MeasurementSet.asymmetric_from_pairs(2, 3, [(0, 2), (1, 0), (1, 1)])
    inst = build_asymmetric_instance([1.0, 2.0], [3.0, 4.0, 5.0], om, {(1, 1): 1.0})
    sym = symmetrize(inst)
    assert sym.omega.shape == (5, 5)
    assert sym.omega.pairs() == [(0, 4), (1, 2), (1, 3)]
    np.testing.assert_allclose(sym.instance.observed, [5.0, 6.0, 9.0])
    np.testing.assert_allclose(sym.instance.noise_values, [0.0, 0.0, 1.0])
    np.testing.assert_allclose(sym.w_star, [1, 2, 3, 4, 5])


def test_balanced_truth_keeps_product():
    u, v = balanced_truth([1.0, 2.0], [4.0, 4.0, 2.0])
    assert np.isclose(np.linalg.norm(u), np.linalg.norm(v))
    np.testing.assert_allclose(np.outer(u, v), np.outer([1, 2], [4, 4, 2]))


def test_rank_r_instance_rejects_negative_factor():
    with pytest.raises(ValueError):
        build_rank_r_instance([[1.0, -1.0], [1.0, 1.0]], MeasurementSet.full(2))


@settings(max_examples=50)
@given(st.lists(st.floats(0.1, 3), min_size=2, max_size=6), st.data())
def test_recovery_error_matches_loop_oracle(a, data):
    x = data.draw(st.lists(st.floats(0, 3), min_size=len(a), max_size=len(a)))
    assert np.isclose(recovery_error(x, np.array(a)), relative_product_error(x, x, a, a), rtol=1e-9, atol=1e-12)


def test_recovery_error_asymmetric_and_zero_truth():
    a, b = np.array([1.0, 2.0]), np.array([1.0, 1.0, 3.0])
    x, y = 2 * a, b / 2
    assert recovery_error((x, y), (a, b)) == pytest.approx(0.0, abs=1e-15)
    assert recovery_error((x, 2 * b), (a, b)) == pytest.approx(
        relative_product_error(x, 2 * b, a, b))
    with pytest.raises(ValueError):
        recovery_error([1.0, 1.0], np.zeros(2))
