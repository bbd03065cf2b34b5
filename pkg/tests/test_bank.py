"""Memristor bank simulation and design-matrix assembly."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from memrc.bank import (BankSpec, DesignMatrix, build_bank, design_matrix_buffered,
                        design_matrix_timeseries, numerical_rank, rank_gap, simulate_bank,
                        simulate_bank_many)
from memrc.devices import Trajectory, integrate_volatile_nonlinear
from memrc.errors import GridMismatch, OffsetOutOfRange
from memrc.signals import random_fourier_signal, sinusoid_with_mean, z3_encoding


def test_epsilon_grid():
    assert [d.epsilon for d in build_bank(BankSpec(n=2))] == pytest.approx([0.1, 100])
    eps = [d.epsilon for d in build_bank(BankSpec(n=3, eps_hi=10))]
    assert eps == pytest.approx([0.1, 1, 10])
    devs = build_bank(BankSpec(n=5))
    assert all(d.bias == pytest.approx(d.params.lam + d.epsilon) for d in devs)


def test_shared_bias_mode():
    devs = build_bank(BankSpec(n=4, eps_hi=10, bias_mode="shared", shared_m=12))
    assert all(d.bias == 12 for d in devs)
    assert [d.bias - d.params.lam for d in devs] == pytest.approx([d.epsilon for d in devs])


def test_jitter_is_seeded():
    spec = BankSpec(n=6, jitter=0.2)
    a = [d.epsilon for d in build_bank(spec, seed=3)]
    assert a == [d.epsilon for d in build_bank(spec, seed=3)]
    assert a != [d.epsilon for d in build_bank(spec, seed=4)]


def test_bank_matches_single_device_integration():
    devs = build_bank(BankSpec(n=3, eps_hi=10))
    gamma = random_fourier_signal(0.4, seed=1, n_periods=3)
    traces = simulate_bank(devs, gamma, 6.0, 0.02, substeps=2)
    for d, tr in zip(devs, traces):
        ref = integrate_volatile_nonlinear(gamma.shifted(gamma.mean + d.bias), d.params,
                                           0.02, 6.0, substeps=2)
        assert np.allclose(tr.voltages, ref.voltages, rtol=1e-12, atol=1e-13)


def test_wiener_bank_runs():
    devs = build_bank(BankSpec(n=3, eps_hi=10, model="wiener"))
    traces = simulate_bank(devs, sinusoid_with_mean(0, 0.2, 3.0), 10.0, 0.01)
    assert all(np.all(np.isfinite(t.voltages)) for t in traces)


def test_thread_count_does_not_change_results():
    devs = build_bank(BankSpec(n=4))
    sigs = [random_fourier_signal(0.5, seed=2, stream=k) for k in range(20)]
    _, v1, _ = simulate_bank_many(devs, sigs, 4.0, 0.02, substeps=2, threads=1)
    _, v8, _ = simulate_bank_many(devs, sigs, 4.0, 0.02, substeps=2, threads=8)
    assert np.array_equal(v1, v8)


def test_timeseries_matrix_with_bias():
    t = np.array([0.0, 1.0, 2.0])
    traces = [Trajectory(t, t, t + k) for k in range(2)]
    dm = design_matrix_timeseries(traces)
    assert dm.shape == (3, 3) and np.all(dm.values[:, -1] == 1)
    with pytest.raises(GridMismatch):
        design_matrix_timeseries([traces[0], Trajectory(t + 1, t, t)])


def test_design_matrix_validation(tmp_path):
    with pytest.raises(ValueError):
        DesignMatrix(np.array([[np.nan]]), (0,), ("a",))
    with pytest.raises(ValueError):
        DesignMatrix(np.array([[2.0]]), (0,), ("bias",))
    dm = DesignMatrix(np.array([[1.0, 1.0]]), (0.5,), ("dev0", "bias"))
    text = open(dm.to_csv(tmp_path / "d.csv")).read()
    assert text == "#meta,dev0,bias\nrow,c0,c1\n0.5,1,1\n"


def z3_traces(devs, duration):
    return [simulate_bank(devs, z3_encoding(a, b, duration), duration, 1 / 150, substeps=2)
            for a in range(3) for b in range(3)]


def test_buffered_matrix_shape_and_columns():
    period = 2 * math.pi / (math.pi**2 / math.sqrt(2))
    duration = 10 * period
    devs = build_bank(BankSpec(n=10, eps_hi=10))
    dm = design_matrix_buffered(z3_traces(devs, duration), [0.95, 0.7, 0.5], period, duration)
    assert dm.shape == (9, 30)
    one = design_matrix_buffered(z3_traces(devs[:1], duration)[:2], [0.5], period, duration)
    traces = z3_traces(devs[:1], duration)[:2]
    idx = np.abs(traces[0][0].times - (duration - 0.5 * period)).argmin()
    assert one.values[:, 0] == pytest.approx([tr[0].voltages[idx] for tr in traces])


def test_buffered_offset_outside_trace():
    t = np.linspace(0, 1, 11)
    with pytest.raises(OffsetOutOfRange):
        design_matrix_buffered([[Trajectory(t, t, t)]], [2.0], 1.0, 1.0)


def test_numerical_rank_basics():
    assert numerical_rank(np.eye(3), 1e-2)[0] == 3
    u = np.arange(1.0, 5.0)
    assert numerical_rank(np.outer(u, u + 1), 1e-10)[0] == 1
    assert rank_gap(np.array([4.0, 2.0, 0.5]), 2) == 4.0


@given(st.floats(1e-3, 1e3), st.integers(0, 100))
def test_rank_scale_invariant(c, seed):
    a = np.random.default_rng(seed).standard_normal((8, 5)) @ np.diag([1, 1, 1e-3, 1e-5, 0])
    r1, s1 = numerical_rank(a, 1e-2)
    r2, s2 = numerical_rank(c * a, 1e-2)
    assert r1 == r2
    assert np.allclose(s2, c * s1, rtol=1e-10, atol=1e-12 * c * s1[0])


def test_device_permutation_permutes_columns():
    devs = build_bank(BankSpec(n=4))
    sig = random_fourier_signal(0.3, seed=5, n_periods=2)
    a = design_matrix_timeseries(simulate_bank(devs, sig, 4.0, 0.02))
    perm = [2, 0, 3, 1]
    b = design_matrix_timeseries(simulate_bank([devs[i] for i in perm], sig, 4.0, 0.02))
    assert np.array_equal(b.values[:, :4], a.values[:, perm])


def test_single_tone_small_signal_rank():
    devs = build_bank(BankSpec(n=10))
    traces = simulate_bank(devs, sinusoid_with_mean(0.0, 1e-3, 2.0), 60.0, 0.01, substeps=2)
    tail = [Trajectory(t.times[3000:], t.states[3000:], t.voltages[3000:]) for t in traces]
    dm = design_matrix_timeseries(tail, with_bias=False)
    assert numerical_rank(dm, 1e-6)[0] <= 3
