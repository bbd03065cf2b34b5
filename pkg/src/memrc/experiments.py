"""End-to-end reservoir tasks: a signal delayer and Z/3 binary operators."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bank import (BankSpec, DesignMatrix, buffer_indices, build_bank, numerical_rank,
                   simulate_bank_many)
from .config import ExperimentConfig
from .readout import (classify_z3, correlation_coefficient, predict, random_truncated_matrix,
                      ridge_fit)
from .signals import Z3_OMEGA_SIN, random_fourier_signal, z3_encoding

Z3_PAIRS = tuple(itertools.product(range(3), repeat=2))


def bank_spec_from(cfg, eps_lo=None, eps_hi=None):
    b = cfg.bank
    return BankSpec(
        n=b.n,
        eps_lo=b.eps_lo if eps_lo is None else eps_lo,
        eps_hi=b.eps_hi if eps_hi is None else eps_hi,
        lam=b.lam, mu=b.mu, R=b.R, r=b.r, x0=b.x0, model=b.model,
        bias_mode=b.bias_mode, shared_m=b.shared_m or None, jitter=b.jitter,
    )


@dataclass
class DelayResult:
    delays: np.ndarray
    train_corr: np.ndarray
    test_corr: np.ndarray
    weight_matrix: np.ndarray  # (delay, device), weights on standardized responses
    epsilons: np.ndarray
    rank: int
    singular_values: np.ndarray
    regs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        n = len(self.delays)
        if len(self.train_corr) != n or len(self.test_corr) != n:
            raise ValueError("correlation arrays do not match the delay grid")
        if self.weight_matrix.shape != (n, len(self.epsilons)):
            raise ValueError("weight matrix shape does not match delays x devices")

    def weight_centers(self):
        """``|w|``-weighted mean of ``log10(eps)`` for every delay."""
        w = np.abs(self.weight_matrix)
        return (w @ np.log10(self.epsilons)) / w.sum(axis=1)


def delay_signals(cfg):
    d = cfg.delay
    return [
        random_fourier_signal(d.alpha, cfg.run.seed, n_terms=d.n_terms, stream=k,
                              samples_per_period=d.samples_per_period, n_periods=d.periods)
        for k in range(d.n_signals + 1)
    ]


def delay_design(cfg, threads=1):
    """Simulate the delay-task bank.

    Returns the training responses ``(n_signals * n_train, D)``, the held-out
    responses, the training-window times, the signals and the devices.
    """
    d = cfg.delay
    devices = build_bank(bank_spec_from(cfg), cfg.run.seed)
    signals = delay_signals(cfg)
    dt = 2.0 / d.samples_per_period
    duration = 2.0 * d.periods
    times, v, _ = simulate_bank_many(devices, signals, duration, dt,
                                     substeps=cfg.solver.substeps, threads=threads)
    start = len(times) - d.train_periods * d.samples_per_period
    window = times[start:]
    train = v[:-1, start:, :].reshape(-1, len(devices))
    test = v[-1, start:, :]
    return train, test, window, signals, devices


def _with_bias(x):
    return np.column_stack([x, np.ones(len(x))])


def run_delay_experiment(cfg: ExperimentConfig, threads=1):
    """Train one readout per delay to reproduce ``gamma(t - d)``.

    Device responses are standardized with training statistics before the
    ridge fit so the weights measure each device's contribution; a bias
    column absorbs the mean.
    """
    d = cfg.delay
    delays = np.linspace(d.delay_min, d.delay_max, d.n_delays)
    train, test, window, signals, devices = delay_design(cfg, threads)
    eps = np.array([dev.epsilon for dev in devices])
    rank, sv = numerical_rank(_with_bias(train), cfg.rank.tol)
    if len(delays) == 0:
        empty = np.zeros(0)
        return DelayResult(delays, empty, empty, np.zeros((0, len(devices))), eps, rank, sv)

    center, scale = train.mean(axis=0), train.std(axis=0)
    scale[scale == 0] = 1.0
    theta = _with_bias((train - center) / scale)
    theta_test = _with_bias((test - center) / scale)
    targets = np.column_stack([
        np.concatenate([sig(window - lag) for sig in signals[:-1]]) for lag in delays])
    test_targets = np.column_stack([signals[-1](window - lag) for lag in delays])

    s1 = np.linalg.norm(theta, 2)
    grid = np.geomspace(cfg.readout.reg_min, cfg.readout.reg_max, cfg.readout.n_reg) * s1**2
    model = ridge_fit(theta, targets, grid, cfg.readout.folds, cfg.run.seed,
                      cfg.readout.shuffle)
    fit, fit_test = theta @ model.weights, theta_test @ model.weights
    train_corr = np.array([correlation_coefficient(targets[:, j], fit[:, j])
                           for j in range(len(delays))])
    test_corr = np.array([correlation_coefficient(test_targets[:, j], fit_test[:, j])
                          for j in range(len(delays))])
    return DelayResult(delays, train_corr, test_corr, model.weights[:-1].T.copy(), eps,
                       rank, sv, np.asarray(model.reg))


@dataclass
class Z3Result:
    error_histogram: np.ndarray
    solved_3_or_less: float
    rank: int
    singular_values: np.ndarray
    errors: np.ndarray
    raw_histogram: np.ndarray
    raw_solved: float
    baseline_histograms: dict
    baseline_solved: dict
    n_operators: int = 0

    def __post_init__(self):
        if int(self.error_histogram.sum()) != len(self.errors):
            raise ValueError("histogram does not sum to the number of operators")
        self.n_operators = len(self.errors)


def operator_table(n_operators=0, seed=0):
    """Labels of Z/3 binary operators, one column per operator.

    Row ``i`` is the output for ``Z3_PAIRS[i]``; operator ``k`` reads its
    outputs from the base-3 digits of ``k``.  ``n_operators > 0`` draws a
    seeded subsample instead of the full 3^9 enumeration.
    """
    total = 3 ** len(Z3_PAIRS)
    ids = np.arange(total)
    if 0 < n_operators < total:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(0x0E,))))
        ids = np.sort(rng.choice(total, n_operators, replace=False))
    digits = (ids[None, :] // 3 ** np.arange(len(Z3_PAIRS))[:, None]) % 3
    return digits


def z3_buffered(cfg, pairs=Z3_PAIRS, threads=1):
    """Bank design matrix (pairs x devices*offsets) and raw-input matrix."""
    z = cfg.z3
    devices = build_bank(bank_spec_from(cfg, z.eps_lo, z.eps_hi), cfg.run.seed)
    period = 2.0 * math.pi / Z3_OMEGA_SIN
    duration = z.cycles * period
    signals = [z3_encoding(s1, s2, duration) for s1, s2 in pairs]
    times, v, _ = simulate_bank_many(devices, signals, duration, 1.0 / z.f,
                                     substeps=cfg.solver.substeps, threads=threads)
    idx = buffer_indices(times, duration, z.offsets, period)
    rows = v[:, idx, :].transpose(0, 2, 1).reshape(len(pairs), -1)
    meta = tuple(f"dev{j}@{c:g}" for j in range(len(devices)) for c in z.offsets)
    bank = DesignMatrix(rows, tuple(range(len(pairs))), meta)
    raw_rows = np.array([sig(times[idx]) for sig in signals])
    raw = DesignMatrix(raw_rows, tuple(range(len(pairs))),
                       tuple(f"u@{c:g}" for c in z.offsets))
    return bank, raw


def z3_errors(theta, labels, cfg):
    """Error count of the in-sample readout for every operator.

    The rows are stacked ``replicas`` times, as repeated presentations of the
    same inputs, and the folds are contiguous over replicas.
    """
    values = theta.values if isinstance(theta, DesignMatrix) else np.asarray(theta)
    reps = cfg.z3.replicas
    stacked = np.tile(values, (reps, 1))
    s1 = np.linalg.norm(stacked, 2)
    grid = np.geomspace(cfg.z3.reg_min, cfg.readout.reg_max, cfg.readout.n_reg) * s1**2
    model = ridge_fit(stacked, np.tile(labels, (reps, 1)).astype(float), grid,
                      cfg.readout.folds, cfg.run.seed, cfg.readout.shuffle)
    _, errors = classify_z3(predict(model, values), labels)
    return errors


def _summary(errors):
    hist = np.bincount(errors, minlength=10)
    return hist, float(np.mean(errors <= 3))


def run_z3_experiment(cfg: ExperimentConfig, threads=1, pairs=Z3_PAIRS):
    """Fit every Z/3 operator on the bank, raw inputs and random matrices."""
    z = cfg.z3
    labels = operator_table(z.operators, cfg.run.seed)
    order = [Z3_PAIRS.index(p) for p in pairs]
    labels = labels[order]
    bank, raw = z3_buffered(cfg, pairs, threads)
    errors = z3_errors(bank, labels, cfg)
    hist, solved = _summary(errors)
    raw_hist, raw_solved = _summary(z3_errors(raw, labels, cfg))
    rank, sv = numerical_rank(bank, cfg.rank.tol)
    base_hist, base_solved = {}, {}
    rows, cols = bank.shape
    for k in z.baseline_ranks:
        counts = np.zeros(10, dtype=int)
        fractions = []
        for j in range(z.n_random):
            g = random_truncated_matrix(rows, cols, k, cfg.run.seed, stream=1000 * k + j)
            h, f = _summary(z3_errors(g, labels, cfg))
            counts += h
            fractions.append(f)
        base_hist[k] = counts
        base_solved[k] = float(np.mean(fractions))
    return Z3Result(hist, solved, rank, sv, errors, raw_hist, raw_solved, base_hist,
                    base_solved)
