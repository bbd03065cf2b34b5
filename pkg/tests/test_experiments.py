"""Delay and Z/3 pipelines, report files and determinism (reduced sizes)."""
import os

import numpy as np
import pytest

from memrc.config import ExperimentConfig
from memrc.experiments import (Z3_PAIRS, DelayResult, operator_table, run_delay_experiment,
                               run_z3_experiment)
from memrc.report import emit_report


def small_delay_cfg(**delay):
    cfg = ExperimentConfig()
    cfg.delay.n_signals = 6
    cfg.delay.periods = 8
    cfg.delay.train_periods = 4
    cfg.delay.n_delays = 5
    for k, v in delay.items():
        setattr(cfg.delay, k, v)
    return cfg


def small_z3_cfg():
    cfg = ExperimentConfig()
    cfg.z3.operators = 400
    cfg.z3.n_random = 1
    cfg.z3.baseline_ranks = (7,)
    return cfg


@pytest.fixture(scope="module")
def delay_result():
    return run_delay_experiment(small_delay_cfg())


@pytest.fixture(scope="module")
def z3_result():
    return run_z3_experiment(small_z3_cfg())


def test_zero_delay_is_reconstructed(delay_result):
    assert delay_result.delays[0] == 0
    assert delay_result.test_corr[0] > 0.999


def test_delay_result_shapes(delay_result):
    r = delay_result
    assert r.weight_matrix.shape == (5, 10)
    assert np.all(np.abs(r.train_corr) <= 1) and np.all(np.abs(r.test_corr) <= 1)
    assert len(r.weight_centers()) == 5


def test_operator_table():
    full = operator_table()
    assert full.shape == (9, 3**9)
    assert np.all(full[:, 0] == 0) and np.all(full[:, -1] == 2)
    assert list(full[:, 5]) == [2, 1, 0, 0, 0, 0, 0, 0, 0]
    sub = operator_table(50, seed=1)
    assert sub.shape == (9, 50) and np.array_equal(sub, operator_table(50, seed=1))


def test_constant_operator_is_solved():
    cfg = small_z3_cfg()
    cfg.z3.operators = 0
    cfg.z3.baseline_ranks = ()
    res = run_z3_experiment(cfg)
    assert res.errors[0] <= 1
    assert res.error_histogram.sum() == 3**9


def test_z3_histogram(z3_result, tmp_path):
    assert z3_result.error_histogram.sum() == 400 == z3_result.n_operators
    files = emit_report(z3_result, tmp_path)
    assert sorted(os.path.basename(f) for f in files) == [
        "histogram.csv", "histogram.svg", "singular_values.csv", "solved.csv"]
    lines = open(tmp_path / "z3" / "histogram.csv").read().splitlines()
    assert lines[0] == "errors,bank,raw,random_rank7" and len(lines) == 11


def test_pair_order_is_irrelevant(z3_result):
    perm = [Z3_PAIRS[i] for i in (4, 0, 8, 2, 7, 1, 3, 6, 5)]
    res = run_z3_experiment(small_z3_cfg(), pairs=perm)
    assert np.array_equal(res.errors, z3_result.errors)


def test_raw_inputs_do_worse(z3_result):
    assert z3_result.raw_solved < z3_result.solved_3_or_less


def test_delay_report_files_are_deterministic(tmp_path):
    a = emit_report(run_delay_experiment(small_delay_cfg(), threads=1), tmp_path / "a")
    b = emit_report(run_delay_experiment(small_delay_cfg(), threads=4), tmp_path / "b")
    for fa, fb in zip(a, b):
        if fa.endswith(".csv"):
            assert open(fa, "rb").read() == open(fb, "rb").read()
    names = sorted(os.path.basename(f) for f in a)
    assert names == ["correlations.csv", "correlations.svg", "singular_values.csv",
                     "weights.csv", "weights.svg"]


def test_empty_delay_grid(tmp_path):
    res = run_delay_experiment(small_delay_cfg(n_delays=0))
    files = emit_report(res, tmp_path)
    assert not any(f.endswith(".svg") for f in files)
    assert open(tmp_path / "delay" / "correlations.csv").read() == "delay,train_corr,test_corr\n"


def test_report_rejects_unknown_result(tmp_path):
    with pytest.raises(TypeError):
        emit_report(object(), tmp_path)


def test_delay_result_validation():
    with pytest.raises(ValueError):
        DelayResult(np.zeros(2), np.zeros(1), np.zeros(2), np.zeros((2, 3)), np.ones(3), 1,
                    np.ones(3))
