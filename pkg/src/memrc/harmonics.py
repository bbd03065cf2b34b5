"""Steady-state analysis of sinusoidally driven volatile memristors.

With drive ``s(t) = m + alpha sin(omega t)`` and ``eps = m - lam > 0`` the
state settles around ``eps/m`` and oscillates with a phase lag ``phi``
satisfying ``sin(phi) = omega / sqrt(omega^2 + eps^2)``.  Expanding the
voltage ``V = H(x) s / mu`` to first order in the oscillation gives the
analytic harmonic coefficients below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ExpansionDiverges, InsufficientPeriods, InvalidRegime, NoRealPole


@dataclass(frozen=True)
class SteadyState:
    x_bar: float
    epsilon: float
    t_c: float | None = None


@dataclass(frozen=True)
class HarmonicCoeffs:
    """Sine/cosine amplitudes at omega and 2 omega, the dc level and the lag."""

    a_w: float
    b_w: float
    a_2w: float
    b_2w: float
    dc: float
    phi: float


def convergence_pole_time(m, lam, x0):
    """Time at which the mean-drive solution has its pole.

    ``t_c = ln[(m/(lam-m)) x0/(1-x0)] / (lam - m)``, real only for ``m < lam``.
    """
    if lam == m:
        raise NoRealPole("no pole when m equals lambda")
    arg = (m / (lam - m)) * (x0 / (1.0 - x0))
    if arg <= 0:
        raise NoRealPole(f"log argument {arg:g} is not positive (m={m}, lambda={lam})")
    return math.log(arg) / (lam - m)


def steady_state_mean(m, lam, x0=None):
    """Long-run mean state under constant drive ``m``; zero when ``m <= lam``."""
    if m < 0 or lam < 0:
        raise ValueError("m and lambda must be non-negative")
    eps = m - lam
    x_bar = eps / m if m > lam else 0.0
    t_c = None
    if x0 is not None:
        try:
            t_c = convergence_pole_time(m, lam, x0)
        except NoRealPole:
            t_c = None
    return SteadyState(x_bar=x_bar, epsilon=eps, t_c=t_c)


def delay_phase(omega, epsilon):
    """Phase lag of the state behind the drive, in (0, pi/2]."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if epsilon < 0:
        raise InvalidRegime("epsilon must be non-negative")
    return math.atan2(omega, epsilon)


def _check_expansion(m, lam, alpha, omega):
    eps = m - lam
    if eps < 0 or m <= 0:
        raise InvalidRegime(f"need m > lambda >= 0, got m={m}, lambda={lam}")
    if lam > 0 and alpha >= m * math.hypot(omega, eps) / lam:
        raise ExpansionDiverges(
            f"alpha={alpha} exceeds m sqrt(omega^2 + eps^2) / lambda")
    return eps


def first_order_state_response(t, m, lam, alpha, omega):
    """Steady oscillation of the state under ``m + alpha sin(omega t)``."""
    eps = _check_expansion(m, lam, alpha, omega)
    phi = delay_phase(omega, eps)
    t = np.asarray(t, dtype=float)
    osc = (lam / (m * omega)) * alpha * math.sin(phi) * np.sin(omega * t - phi)
    return (eps / m) / (1.0 - osc)


def harmonic_coeffs(p, m, alpha, omega):
    """First-order harmonic content of the voltage.

    ``V ~ dc + a_w sin wt + b_w cos wt + a_2w sin 2wt + b_2w cos 2wt``.
    """
    eps = _check_expansion(m, p.lam, alpha, omega)
    w2 = omega * omega
    den = w2 + eps * eps
    g = p.delta_r * p.lam / p.mu
    k = alpha / m
    b_w = k * g * omega * eps / den
    return HarmonicCoeffs(
        a_w=k * (g * w2 / den + p.r * m / p.mu),
        b_w=b_w,
        a_2w=0.5 * k * b_w,
        b_2w=0.5 * k * k * g * eps * eps / den,
        dc=(p.r * m + p.delta_r * p.lam) / p.mu,
        phi=delay_phase(omega, eps),
    )


def wiener_equivalent_params(m, lam, x0):
    """Leaky-integrator rate and rest offset matching the nonlinear model.

    Returns ``(lambda_l, z_s)`` with ``lambda_l = m - lam`` and
    ``z_s = -ln(x0/(1-x0) * lam/eps) - m/lambda_l``.
    """
    if not m > lam > 0:
        raise InvalidRegime(f"need m > lambda > 0, got m={m}, lambda={lam}")
    if not 0 < x0 < 1:
        raise ValueError("x0 must lie in (0, 1)")
    eps = m - lam
    z_s = -math.log((x0 / (1.0 - x0)) * (lam / eps)) - m / eps
    return eps, z_s


def first_order_wiener_state(t, wp, x0, m, alphas, omegas):
    """Steady state of the Wiener model under ``m + sum alpha_i sin(omega_i t)``."""
    lam_l = wp.lambda_l
    eps_l = m / lam_l + wp.z_s
    t = np.asarray(t, dtype=float)
    osc = np.zeros(t.shape)
    for a, w in zip(alphas, omegas):
        phi = math.atan2(w, lam_l)
        osc += (a / w) * math.sin(phi) * np.sin(w * t - phi)
    inv = 1.0 + ((1.0 - x0) / x0) * math.exp(-eps_l) * (1.0 - osc)
    return 1.0 / inv


def empirical_harmonics(trace, omega, n_harmonics=2, values=None, discard=1.0 / 3.0):
    """Least-squares harmonic amplitudes of a sampled trace.

    The first third of the trace is dropped as transient and the rest is
    trimmed to a whole number of periods ending at the last sample.

    Parameters
    ----------
    trace : Trajectory
        Uses ``trace.voltages`` unless ``values`` is given (e.g. the states).
    omega : float
        Fundamental angular frequency.

    Returns
    -------
    dc : float
    amps : ndarray, shape (n_harmonics, 2)
        ``amps[k-1] = (sine, cosine)`` amplitude at ``k omega``.
    """
    t = np.asarray(trace.times, dtype=float)
    y = np.asarray(trace.voltages if values is None else values, dtype=float)
    period = 2.0 * math.pi / omega
    keep = t >= t[0] + discard * (t[-1] - t[0])
    t, y = t[keep], y[keep]
    n_periods = math.floor((t[-1] - t[0]) / period + 1e-9)
    if n_periods < 4:
        raise InsufficientPeriods(f"only {n_periods} full periods after the transient")
    keep = t >= t[-1] - n_periods * period - 1e-12
    t, y = t[keep], y[keep]
    cols = [np.ones_like(t)]
    for k in range(1, n_harmonics + 1):
        cols += [np.sin(k * omega * t), np.cos(k * omega * t)]
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), y, rcond=None)
    return float(coef[0]), coef[1:].reshape(n_harmonics, 2)
