"""Series bank of heterogeneous volatile memristors.

Devices in series carry the same current, so the bank is simulated as
independent devices driven by ``m_i + gamma(t)``: a per-device bias plus the
shared zero-mean signal.  Devices differ by ``eps_i = m_i - lam_i``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .csvio import write_csv
from .devices import (MemristorParams, Trajectory, WienerParams, _foh_weights,
                      memristance_piecewise, memristance_wiener, rk4_bernoulli)
from .errors import GridMismatch, NonFiniteState, OffsetOutOfRange
from .harmonics import wiener_equivalent_params

SIGNAL_BLOCK = 8  # signals per work item; fixed so results never depend on threads


@dataclass(frozen=True)
class BankSpec:
    """Bank layout.

    ``eps`` values are log-spaced over ``[eps_lo, eps_hi]`` (both included).
    With ``bias_mode='independent'`` every device shares ``lam`` and gets
    ``m_i = lam + eps_i``; with ``'shared'`` every device gets the same bias
    ``shared_m`` and ``lam_i = shared_m - eps_i``.  ``jitter`` applies a
    seeded log-normal perturbation to each ``eps_i``.
    """

    n: int = 10
    eps_lo: float = 0.1
    eps_hi: float = 100.0
    lam: float = 1.0
    mu: float = 1.0
    R: float = 2.0
    r: float = 1.0
    x0: float = 0.5
    model: str = "nonlinear"
    bias_mode: str = "independent"
    shared_m: float | None = None
    jitter: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("bank needs at least one device")
        if not 0 < self.eps_lo < self.eps_hi and self.n > 1:
            raise ValueError("need 0 < eps_lo < eps_hi")
        if self.model not in ("nonlinear", "wiener"):
            raise ValueError(f"unknown bank model {self.model!r}")
        if self.bias_mode not in ("independent", "shared"):
            raise ValueError(f"unknown bias mode {self.bias_mode!r}")


@dataclass(frozen=True)
class BankDevice:
    params: MemristorParams
    bias: float
    epsilon: float
    wiener: WienerParams | None = None


def bank_epsilons(spec, seed=0):
    if spec.n == 1:
        eps = np.array([spec.eps_lo])
    else:
        eps = np.geomspace(spec.eps_lo, spec.eps_hi, spec.n)
    if spec.jitter > 0:
        seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(0xBA4C,))
        rng = np.random.Generator(np.random.Philox(seq))
        eps = np.sort(eps * np.exp(spec.jitter * rng.standard_normal(spec.n)))
    return eps


def build_bank(spec, seed=0):
    """Per-device parameters and biases for ``spec``."""
    devices = []
    shared_m = spec.shared_m if spec.shared_m is not None else spec.eps_hi + spec.lam
    for eps in bank_epsilons(spec, seed):
        if spec.bias_mode == "independent":
            lam, m = spec.lam, spec.lam + eps
        else:
            lam, m = shared_m - eps, shared_m
            if lam < 0:
                raise ValueError("shared bias is smaller than the largest epsilon")
        p = MemristorParams(mu=spec.mu, lam=lam, R=spec.R, r=spec.r, x0=spec.x0)
        wp = None
        if spec.model == "wiener":
            lam_l, z_s = wiener_equivalent_params(m, lam, spec.x0)
            wp = WienerParams(p, lam_l, z_s, 0.0)
        devices.append(BankDevice(p, float(m), float(eps), wp))
    return devices


def _column(devices, attr):
    return np.array([getattr(d.params, attr) for d in devices])


def _simulate_block(devices, gammas, h, substeps, model):
    """Voltages for a block of drive arrays sampled every ``h/2``.

    ``gammas`` has shape (2N+1, S); returns (N//substeps + 1, S, D).
    """
    bias = np.array([d.bias for d in devices])
    mu = _column(devices, "mu")
    drive = gammas[:, :, None] + bias[None, None, :]
    if model == "nonlinear":
        x = rk4_bernoulli(drive, _column(devices, "lam"), _column(devices, "x0"), h,
                          stride=substeps)
        kept = drive[::2 * substeps]
        R, dr = _column(devices, "R"), _column(devices, "R") - _column(devices, "r")
        return (R - dr * np.clip(x, 0.0, 1.0)) * kept / mu, x
    # Wiener: exact decay with linearly interpolated drive on the h/2 grid
    s = drive
    step = 0.5 * h
    zs = np.empty(s.shape)
    for j, d in enumerate(devices):
        wp = d.wiener
        decay, a, b = _foh_weights(wp.lambda_l, step)
        u = a * s[:-1, :, j] + b * (s[1:, :, j] - s[:-1, :, j])
        w0 = np.full(s.shape[1], wp.z0 - wp.z_s)
        w, _ = lfilter([1.0], [1.0, -decay], u, axis=0, zi=(decay * w0)[None, :])
        zs[0, :, j] = w0 + wp.z_s
        zs[1:, :, j] = w + wp.z_s
    z = zs[::2 * substeps]
    kept = s[::2 * substeps]
    v = np.empty(z.shape)
    for j, d in enumerate(devices):
        v[:, :, j] = memristance_wiener(z[:, :, j], d.params.x0, d.params) * kept[:, :, j] / d.params.mu
    if not np.all(np.isfinite(v)):
        raise NonFiniteState("Wiener bank produced non-finite voltages")
    return v, z


def simulate_bank_many(devices, signals, duration, dt, substeps=1, threads=1, model=None):
    """Simulate every device against every signal.

    Parameters
    ----------
    devices : list of BankDevice
    signals : list of Signal
        Zero-mean parts; each device adds its own bias.
    duration, dt : float
        Output grid ``k * dt`` for k = 0..round(duration/dt).
    substeps : int
        Integration steps per output sample.
    threads : int
        Worker count.  Work items are fixed blocks of signals, so the result
        is bit-identical for any thread count.

    Returns
    -------
    times : ndarray, shape (T,)
    voltages : ndarray, shape (S, T, D)
    states : ndarray, shape (S, T, D)
    """
    if model is None:
        model = "wiener" if devices[0].wiener is not None else "nonlinear"
    n_out = int(round(duration / dt))
    times = np.arange(n_out + 1) * dt
    h = dt / substeps
    half_grid = np.arange(2 * n_out * substeps + 1) * (0.5 * h)
    # signal samples are computed once per signal, independent of blocking
    gammas = [sig(half_grid) - sig.mean for sig in signals]
    blocks = [range(i, min(i + SIGNAL_BLOCK, len(signals)))
              for i in range(0, len(signals), SIGNAL_BLOCK)]

    def work(block):
        g = np.stack([gammas[i] for i in block], axis=1)
        return _simulate_block(devices, g, h, substeps, model)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    v = np.concatenate([p[0] for p in parts], axis=1).transpose(1, 0, 2)
    x = np.concatenate([p[1] for p in parts], axis=1).transpose(1, 0, 2)
    return times, v, x


def simulate_bank(devices, shared_signal, duration, dt, substeps=1, threads=1):
    """One trajectory per device for a single shared signal."""
    times, v, x = simulate_bank_many(devices, [shared_signal], duration, dt,
                                     substeps=substeps, threads=threads)
    return [Trajectory(times, x[0, :, j], v[0, :, j]) for j in range(len(devices))]


@dataclass(frozen=True)
class DesignMatrix:
    """Sampled responses, one row per sample and one column per feature."""

    values: np.ndarray
    row_meta: tuple
    col_meta: tuple

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("design matrix must be two-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValueError("design matrix contains NaN or Inf")
        if len(self.row_meta) != vals.shape[0] or len(self.col_meta) != vals.shape[1]:
            raise ValueError("metadata does not match matrix shape")
        bias = [j for j, c in enumerate(self.col_meta) if c == "bias"]
        if len(bias) > 1:
            raise ValueError("more than one bias column")
        if bias and not np.all(vals[:, bias[0]] == 1.0):
            raise ValueError("bias column must be identically one")
        object.__setattr__(self, "values", vals)

    @property
    def shape(self):
        return self.values.shape

    @property
    def has_bias(self):
        return "bias" in self.col_meta

    def to_csv(self, path):
        labels = [str(c) for c in self.col_meta]
        rows = ([meta] + list(vals) for meta, vals in zip(self.row_meta, self.values))
        header = ["row"] + [f"c{j}" for j in range(len(labels))]
        return write_csv(path, header, rows, preamble=["#meta," + ",".join(labels)])


def design_matrix_timeseries(traces, sample_stride=1, with_bias=True):
    """Stack device voltages over time as columns, optionally with a bias column."""
    times = traces[0].times
    for tr in traces[1:]:
        if len(tr.times) != len(times) or not np.array_equal(tr.times, times):
            raise GridMismatch("traces do not share a time grid")
    cols = [tr.voltages[::sample_stride] for tr in traces]
    meta = [f"dev{j}" for j in range(len(traces))]
    if with_bias:
        cols.append(np.ones_like(cols[0]))
        meta.append("bias")
    return DesignMatrix(np.column_stack(cols), tuple(times[::sample_stride]), tuple(meta))


def buffer_indices(times, duration, sample_offsets, period):
    """Nearest-sample indices of ``duration - c * period`` for each offset."""
    targets = duration - np.asarray(sample_offsets, dtype=float) * period
    dt = times[1] - times[0]
    if np.any(targets < times[0] - 0.5 * dt) or np.any(targets > times[-1] + 0.5 * dt):
        raise OffsetOutOfRange("sample time falls outside the simulated trace")
    return np.abs(times[None, :] - targets[:, None]).argmin(axis=1)


def design_matrix_buffered(per_input_traces, sample_offsets, period, duration=None):
    """One row per input: each device's voltage at a few buffered timestamps.

    ``per_input_traces[i][j]`` is device ``j`` under input ``i``.  Columns are
    device-major: all offsets of device 0, then device 1, and so on.
    """
    rows = []
    idx = None
    for traces in per_input_traces:
        times = traces[0].times
        end = times[-1] if duration is None else duration
        idx = buffer_indices(times, end, sample_offsets, period)
        rows.append(np.concatenate([tr.voltages[idx] for tr in traces]))
    n_dev = len(per_input_traces[0])
    meta = tuple(f"dev{j}@{c:g}" for j in range(n_dev) for c in sample_offsets)
    return DesignMatrix(np.vstack(rows), tuple(range(len(rows))), meta)


def numerical_rank(dm, tol=1e-2):
    """Number of singular values at or above ``tol * sigma_1``."""
    values = dm.values if isinstance(dm, DesignMatrix) else np.asarray(dm, dtype=float)
    sv = np.linalg.svd(values, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0, sv
    return int(np.sum(sv >= tol * sv[0])), sv


def rank_gap(sv, rank):
    """``sigma_rank / sigma_(rank+1)``; infinite when the next value is zero."""
    if rank < 1 or rank >= len(sv):
        return math.inf
    return math.inf if sv[rank] == 0 else float(sv[rank - 1] / sv[rank])
