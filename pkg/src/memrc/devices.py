"""Current-controlled memristor models.

Four models share one set of parameters:

* piecewise linear memristance of the state ``x`` (clamped to [0, 1]),
* the nonvolatile windowed model, solved in closed form through the charge,
* the volatile nonlinear model ``dx/dt = (s - lam) x - s x^2`` where
  ``s = mu I`` is the drive, integrated with RK4 or solved in closed form,
* the volatile Wiener model: a leaky integrator ``dz/dt = s - lam_l (z - z_s)``
  followed by a logistic memristance.

The drive passed around is always ``s(t) = mu * I(t)``; voltages are
``V = H * I = H * s / mu``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .csvio import write_csv
from .errors import LengthMismatch, NonFiniteState, QuadratureUnderflow

STATE_FLOOR = 1e-12
Z_GUARD = 1e6


@dataclass(frozen=True)
class MemristorParams:
    """Device constants.

    ``mu`` ionic mobility scale, ``lam`` diffusion (decay) rate, ``R`` and
    ``r`` the high and low resistances, ``x0`` the initial state.
    """

    mu: float = 1.0
    lam: float = 1.0
    R: float = 2.0
    r: float = 1.0
    x0: float = 0.5

    def __post_init__(self):
        if not (self.R > self.r > 0):
            raise ValueError(f"need R > r > 0, got R={self.R}, r={self.r}")
        if not (0.0 < self.x0 < 1.0):
            raise ValueError(f"x0 must lie in (0, 1), got {self.x0}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")

    @property
    def delta_r(self):
        return self.R - self.r


@dataclass(frozen=True)
class WienerParams:
    """Leaky-integrator state with logistic output around ``base``.

    ``z_s`` is the resting value of ``z``; it is usually negative so the
    undriven output sits near ``R``, but the equivalence map can produce a
    small positive value for low ``x0`` and that is accepted.
    """

    base: MemristorParams
    lambda_l: float
    z_s: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        if self.lambda_l < 0:
            raise ValueError(f"lambda_l must be >= 0, got {self.lambda_l}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    voltages: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if len(self.states) != n or len(self.voltages) != n:
            raise LengthMismatch(
                f"times/states/voltages lengths differ: "
                f"{n}, {len(self.states)}, {len(self.voltages)}")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def to_csv(self, path):
        rows = zip(self.times, self.states, self.voltages)
        return write_csv(path, ["t", "x", "v"], rows)


def memristance_piecewise(x, p):
    """``R`` below 0, ``R - delta_r x`` on [0, 1], ``r`` above 1."""
    return p.R - p.delta_r * np.clip(x, 0.0, 1.0)


def _logistic(u):
    u = np.asarray(u, dtype=float)
    e = np.exp(-np.abs(u))
    return np.where(u >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def logit(x0):
    return math.log(x0 / (1.0 - x0))


def wiener_state(q, x0):
    """State ``x = (1 + (1-x0)/x0 * exp(-q))^-1`` reached after drive ``q``."""
    return _logistic(np.asarray(q, dtype=float) + logit(x0))


def memristance_wiener(q, x0, p):
    """Logistic memristance of the accumulated drive ``q``."""
    return p.R - p.delta_r * wiener_state(q, x0)


def memristance_wiener_tanh(q, x0, p):
    """Same curve written as ``R - delta_r/2 (1 + tanh(q/2 + C))``."""
    c = 0.5 * logit(x0)
    return p.R - 0.5 * p.delta_r * (1.0 + np.tanh(0.5 * np.asarray(q, dtype=float) + c))


def _grid(duration, dt):
    n = int(round(duration / dt))
    if n < 1:
        raise ValueError("duration must cover at least one step")
    return np.arange(n + 1) * dt


def closed_form_nonvolatile(sig, p, t):
    """Exact voltage of the nonvolatile model (``lam`` ignored).

    The state is a logistic function of the accumulated drive ``mu q``.
    """
    t = np.asarray(t, dtype=float)
    x = wiener_state(sig.drive_integral(t), p.x0)
    current = sig(t) / p.mu
    return Trajectory(t, x, memristance_piecewise(x, p) * current)


def bernoulli_rhs(x, s, lam):
    return (s - lam) * x - s * x * x


def rk4_bernoulli(drive, lam, x0, h, stride=1):
    """Fixed-step RK4 for ``dx/dt = (s - lam) x - s x^2``.

    Parameters
    ----------
    drive : ndarray, shape (2N+1, ...)
        Drive sampled every ``h/2``; trailing axes are independent devices.
    lam, x0 : float or ndarray broadcastable to ``drive[0]``
    h : float
        Step size.
    stride : int
        Keep every ``stride``-th step in the output.

    Returns
    -------
    ndarray, shape (N//stride + 1, ...)
        States after each kept step; clamped to ``[STATE_FLOOR, 1]``.
    """
    drive = np.asarray(drive, dtype=float)
    n_steps = (drive.shape[0] - 1) // 2
    x = np.array(np.broadcast_to(x0, drive.shape[1:]), dtype=float)
    lam = np.asarray(lam, dtype=float)
    out = np.empty((n_steps // stride + 1,) + x.shape)
    out[0] = x
    half = 0.5 * h
    sixth = h / 6.0
    for k in range(n_steps):
        s0, s1, s2 = drive[2 * k], drive[2 * k + 1], drive[2 * k + 2]
        k1 = bernoulli_rhs(x, s0, lam)
        k2 = bernoulli_rhs(x + half * k1, s1, lam)
        k3 = bernoulli_rhs(x + half * k2, s1, lam)
        k4 = bernoulli_rhs(x + h * k3, s2, lam)
        x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x = np.clip(x, STATE_FLOOR, 1.0)
        if (k + 1) % stride == 0:
            out[(k + 1) // stride] = x
    if not np.all(np.isfinite(out)):
        raise NonFiniteState("RK4 produced non-finite states; reduce the step size")
    return out


def integrate_volatile_nonlinear(sig, p, dt, duration=None, substeps=1):
    """RK4 trajectory of the volatile nonlinear model sampled every ``dt``."""
    duration = sig.duration if duration is None else duration
    t = _grid(duration, dt)
    h = dt / substeps
    fine = np.arange(2 * (len(t) - 1) * substeps + 1) * (0.5 * h)
    x = rk4_bernoulli(sig(fine), p.lam, p.x0, h, stride=substeps)
    return voltage_trace(Trajectory(t, x, np.zeros_like(t)), sig, p)


def _refined(t_grid, refine):
    """Fine quadrature grid and the positions of ``t_grid`` inside it.

    A grid that starts after 0 gets a lead-in from 0 at its own typical spacing.
    """
    lead = np.zeros(1)
    if t_grid[0] > 0:
        step = np.median(np.diff(t_grid)) if len(t_grid) > 1 else t_grid[0]
        lead = np.linspace(0.0, t_grid[0], max(1, math.ceil(t_grid[0] / step)) + 1)[:-1]
    knots = np.concatenate((lead, t_grid)) if t_grid[0] > 0 else t_grid
    a, b = knots[:-1], knots[1:]
    steps = np.arange(refine) / refine
    fine = (a[:, None] + (b - a)[:, None] * steps).ravel()
    fine = np.append(fine, knots[-1])
    idx = np.arange(len(knots)) * refine
    if t_grid[0] > 0:
        idx = idx[len(lead):]
    return fine, idx


def closed_form_volatile_nonlinear(sig, p, t_grid, refine=10):
    """Closed-form solution of the volatile nonlinear model.

    ``1/x = 1 + (1-x0)/x0 / F + lam/F * int_0^t F`` with
    ``F = exp(int_0^t s - lam t)``.  The integral uses a composite trapezoid
    on a grid ``refine`` times finer than ``t_grid``, accumulated as the
    ratio ``int F / F`` so that growing or shrinking ``F`` never overflows.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] < 0:
        raise ValueError("time grid must start at or after 0")
    fine, idx = _refined(t_grid, refine)
    log_f = sig.drive_integral(fine) - p.lam * fine
    if np.max(-log_f) > 700.0:
        raise QuadratureUnderflow("1/F(t) overflows; shorten the horizon or raise the drive")
    ratio = np.zeros_like(fine)
    if p.lam > 0:
        acc = 0.0
        for k in range(1, len(fine)):
            h2 = 0.5 * (fine[k] - fine[k - 1])
            decay = math.exp(log_f[k - 1] - log_f[k])
            acc = decay * (acc + h2) + h2
            ratio[k] = acc
    a = (1.0 - p.x0) / p.x0
    x = 1.0 / (1.0 + a * np.exp(-log_f[idx]) + p.lam * ratio[idx])
    return voltage_trace(Trajectory(t_grid, x, np.zeros_like(t_grid)), sig, p)


def _foh_weights(lam, h):
    """Weights of a first-order-hold input over one exact decay step."""
    x = lam * h
    decay = math.exp(-x)
    if x < 1e-3:
        a = h * (1 - x / 2 + x**2 / 6 - x**3 / 24 + x**4 / 120)
        c = h * (1 / 2 - x / 3 + x**2 / 8 - x**3 / 30 + x**4 / 144)
    else:
        a = -math.expm1(-x) / lam
        c = (-math.expm1(-x) - x * decay) / (lam * lam * h)
    return decay, a, a - c


def integrate_wiener_volatile(sig, wp, dt, duration=None, substeps=1):
    """Exact decay step of the linear state with a linearly interpolated drive."""
    duration = sig.duration if duration is None else duration
    t = _grid(duration, dt)
    h = dt / substeps
    fine = np.arange((len(t) - 1) * substeps + 1) * h
    s = sig(fine)
    decay, a, b = _foh_weights(wp.lambda_l, h)
    u = a * s[:-1] + b * (s[1:] - s[:-1])
    w0 = wp.z0 - wp.z_s
    w = np.concatenate(([w0], lfilter([1.0], [1.0, -decay], u, zi=[decay * w0])[0]))
    if not np.all(np.isfinite(w)):
        raise NonFiniteState("linear state overflowed")
    if np.max(np.abs(w)) > Z_GUARD:
        warnings.warn("Wiener state drifted more than 1e6 from rest; "
                      "a drive with nonzero mean may overflow", RuntimeWarning)
    z = w[::substeps] + wp.z_s
    return voltage_trace(Trajectory(t, z, np.zeros_like(t)), sig, wp)


def voltage_trace(traj, sig, params):
    """Recompute voltages from states.

    ``params`` is a :class:`MemristorParams` (state ``x``) or a
    :class:`WienerParams` (state ``z``, logistic memristance).
    """
    if isinstance(params, WienerParams):
        base = params.base
        h = memristance_wiener(traj.states, base.x0, base)
    else:
        base = params
        h = memristance_piecewise(traj.states, base)
    v = h * sig(traj.times) / base.mu
    return Trajectory(traj.times, traj.states, v)


def simulate(sig, params, dt, model="nonlinear", duration=None, substeps=1):
    """Dispatch to the integrator for ``model``."""
    if model == "nonlinear":
        return integrate_volatile_nonlinear(sig, params, dt, duration, substeps)
    if model == "wiener":
        return integrate_wiener_volatile(sig, params, dt, duration, substeps)
    if model == "nonvolatile":
        duration = sig.duration if duration is None else duration
        return closed_form_nonvolatile(sig, params, _grid(duration, dt))
    if model == "closed-form":
        duration = sig.duration if duration is None else duration
        return closed_form_volatile_nonlinear(sig, params, _grid(duration, dt))
    raise ValueError(f"unknown model {model!r}")
