"""Ridge readout, cross-validation, metrics and the random-matrix baseline."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from memrc.bank import numerical_rank
from memrc.errors import DegenerateTarget, DimensionMismatch, SingularSystem
from memrc.readout import (ReadoutModel, classify_z3, correlation_coefficient,
                           default_reg_grid, fold_indices, predict, random_truncated_matrix,
                           ridge_fit, ridge_solve)

# ridge solution of a 5x3 system at reg = 1/2, solved in exact rational arithmetic
SMALL_THETA = np.array([[1, 2, 0], [0, 1, 3], [2, 0, 1], [1, 1, 1], [3, -1, 2]], float)
SMALL_Y = np.array([1, 0, 2, -1, 3], float)
SMALL_W = np.array([7606 / 9059, -2412 / 9059, -14 / 9059])


def test_ridge_against_exact_rational_solution():
    assert ridge_solve(SMALL_THETA, SMALL_Y, 0.5) == pytest.approx(SMALL_W, abs=1e-12)


@given(st.integers(0, 10_000), st.integers(2, 10), st.floats(1e-6, 10))
def test_ridge_matches_normal_equations(seed, n, reg):
    rng = np.random.default_rng(seed)
    theta = rng.standard_normal((n, n))
    y = rng.standard_normal(n)
    w = np.linalg.solve(theta.T @ theta + reg * np.eye(n), theta.T @ y)
    assert np.allclose(ridge_solve(theta, y, reg), w, atol=1e-10 * max(1, np.abs(w).max()))


def test_identity_recovers_target():
    y = np.array([0.3, -1.0, 2.0, 5.0])
    model = ridge_fit(np.eye(4), y, [1e-14, 1e-12], k_folds=2)
    assert model.weights == pytest.approx(y, abs=1e-10)


def test_target_in_span_has_no_residual():
    rng = np.random.default_rng(0)
    theta = rng.standard_normal((40, 4))
    y = theta @ np.array([1.0, -2.0, 0.5, 3.0])
    model = ridge_fit(theta, y, [1e-12, 1e-6, 1.0], k_folds=5)
    assert np.max(np.abs(predict(model, theta) - y)) < 1e-8


def test_duplicate_columns_share_weight():
    rng = np.random.default_rng(1)
    col = rng.standard_normal(30)
    theta = np.column_stack([col, col, rng.standard_normal(30)])
    w = ridge_solve(theta, rng.standard_normal(30), 0.3)
    assert w[0] == pytest.approx(w[1], rel=1e-12)


def test_residual_grows_with_reg():
    rng = np.random.default_rng(2)
    theta, y = rng.standard_normal((50, 6)), rng.standard_normal(50)
    res = [np.linalg.norm(theta @ ridge_solve(theta, y, g) - y) for g in np.geomspace(1e-6, 1e3, 12)]
    assert np.all(np.diff(res) >= -1e-12)


def test_cv_picks_minimum_loss_and_is_deterministic():
    rng = np.random.default_rng(3)
    theta = rng.standard_normal((60, 8))
    y = theta @ rng.standard_normal(8) + 2.0 * rng.standard_normal(60)
    a = ridge_fit(theta, y, k_folds=6, seed=9, shuffle=True)
    b = ridge_fit(theta, y, k_folds=6, seed=9, shuffle=True)
    assert a.reg == b.reg and np.array_equal(a.weights, b.weights)
    assert a.reg == a.reg_grid[np.argmin(a.cv_loss)]
    assert len(a.cv_scores) == 6


def test_selected_index_invariant_to_scaling():
    rng = np.random.default_rng(4)
    theta = rng.standard_normal((40, 5))
    y = theta @ rng.standard_normal(5) + rng.standard_normal(40)
    grid = np.geomspace(1e-4, 1e2, 9)
    a = ridge_fit(theta, y, grid, 4)
    b = ridge_fit(7 * theta, 7 * y, 49 * grid, 4)
    assert np.argmin(a.cv_loss) == np.argmin(b.cv_loss)


def test_multi_target_matches_single_fits():
    rng = np.random.default_rng(5)
    theta = rng.standard_normal((30, 4))
    Y = rng.standard_normal((30, 3))
    many = ridge_fit(theta, Y, k_folds=5)
    for j in range(3):
        one = ridge_fit(theta, Y[:, j], k_folds=5)
        assert one.reg == many.reg[j]
        assert np.allclose(one.weights, many.weights[:, j])


def test_contiguous_folds_skip_empty():
    folds = fold_indices(9, 10)
    assert len(folds) == 9 and all(len(f) == 1 for f in folds)
    assert [list(f) for f in fold_indices(6, 3)] == [[0, 1], [2, 3], [4, 5]]


def test_zero_reg_on_singular_system():
    theta = np.column_stack([np.ones(6), np.ones(6)])
    with pytest.warns(RuntimeWarning), pytest.raises(SingularSystem):
        ridge_fit(theta, np.arange(6.0), [0.0, 1.0], k_folds=2)


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        ridge_fit(np.eye(3), np.ones(4))
    with pytest.raises(DimensionMismatch):
        predict(ReadoutModel(np.ones(2), 0.1, np.zeros(1)), np.eye(3))


def test_predict_simple_models():
    theta = np.column_stack([np.arange(4.0), np.ones(4)])
    assert np.all(predict(ReadoutModel(np.zeros(2), 0, np.zeros(0)), theta) == 0)
    assert np.all(predict(ReadoutModel(np.array([0.0, 2.5]), 0, np.zeros(0)), theta) == 2.5)


def test_model_csv(tmp_path):
    text = open(ReadoutModel(np.array([0.5, -1.0]), 0.25, np.zeros(0)).to_csv(tmp_path / "m.csv")).read()
    assert text == "#reg=0.25\ncol_id,weight\n0,0.5\n1,-1\n"


def test_correlation():
    y = np.array([1.0, 3.0, 2.0, 5.0])
    assert correlation_coefficient(y, y) == pytest.approx(1)
    assert correlation_coefficient(y, -y) == pytest.approx(-1)
    assert correlation_coefficient(y, y + 7) == pytest.approx(1)
    with pytest.raises(DegenerateTarget):
        correlation_coefficient(np.ones(4), y)


def test_classify_z3():
    target = np.array([0, 1, 2] * 3)
    assert classify_z3(target.astype(float), target)[1] == 0
    assert classify_z3(target + 0.4, target)[1] == 0
    assert classify_z3(np.ones(9), target)[1] == 6
    assert list(classify_z3(np.array([-3.0, 0.6, 9.0]))[0]) == [0, 1, 2]


def test_random_truncated_matrix():
    full = random_truncated_matrix(9, 30, 9, seed=1)
    g = np.random.Generator(np.random.Philox(np.random.SeedSequence(1, spawn_key=(0x5A3D, 0))))
    assert np.allclose(full.values, g.standard_normal((9, 30)), atol=1e-10)
    one = random_truncated_matrix(9, 30, 1, seed=1)
    cols = one.values / np.linalg.norm(one.values, axis=0)
    assert np.allclose(np.abs(cols.T @ cols), 1.0)
    for k in range(1, 10):
        assert numerical_rank(random_truncated_matrix(rank=k, seed=k), 1e-10)[0] == k


def test_default_grid_is_relative():
    theta = np.diag([3.0, 1.0])
    assert default_reg_grid(theta) == pytest.approx(9 * np.geomspace(1e-8, 1, 9))
