"""Driving signals with analytic primitives.

A :class:`Signal` is the drive ``mu * I(t)`` seen by a device: a constant mean
plus a finite sum of sinusoids.  Because every component is analytic, the
primitive of the zero-mean part is available in closed form and closed-form
solvers never need numerical quadrature of the input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import LengthMismatch, SymbolOutOfRange

Z3_OMEGA_SIN = math.pi**2 / math.sqrt(2.0)
Z3_OMEGA_COS = 3.0 * math.pi * math.sqrt(3.0)


@dataclass(frozen=True)
class Component:
    amplitude: float
    omega: float
    phase: float = 0.0
    kind: str = "sin"

    def __post_init__(self):
        if self.kind not in ("sin", "cos"):
            raise ValueError(f"component kind must be 'sin' or 'cos', got {self.kind!r}")
        if self.omega <= 0:
            raise ValueError("component frequency must be positive")


@dataclass(frozen=True)
class Signal:
    """Mean plus a sum of sinusoidal components.

    Parameters
    ----------
    mean : float
        Constant part ``m`` of the drive.
    components : tuple of Component
        Zero-mean oscillating part ``gamma(t)``.
    duration : float
        Nominal length of the signal (s); simulations default to it.
    period : float, optional
        Fundamental period when the signal is periodic.
    """

    mean: float = 0.0
    components: tuple = field(default_factory=tuple)
    duration: float = 1.0
    period: float | None = None

    def __call__(self, t):
        return self.sampler(t)

    def sampler(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, float(self.mean))
        for c in self.components:
            arg = c.omega * t + c.phase
            out += c.amplitude * (np.sin(arg) if c.kind == "sin" else np.cos(arg))
        return out

    def primitive(self, t):
        """Integral of ``sampler - mean`` from 0 to ``t``."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for c in self.components:
            arg = c.omega * t + c.phase
            k = c.amplitude / c.omega
            if c.kind == "sin":
                out += k * (math.cos(c.phase) - np.cos(arg))
            else:
                out += k * (np.sin(arg) - math.sin(c.phase))
        return out

    def drive_integral(self, t):
        """Integral of the full drive from 0 to ``t``."""
        t = np.asarray(t, dtype=float)
        return self.mean * t + self.primitive(t)

    def shifted(self, mean):
        """Same oscillating part around a different mean."""
        return replace(self, mean=float(mean))

    def scaled(self, factor):
        comps = tuple(replace(c, amplitude=c.amplitude * factor) for c in self.components)
        return replace(self, mean=self.mean * factor, components=comps)

    def with_duration(self, duration):
        return replace(self, duration=float(duration))


def constant_signal(m, duration=1.0):
    return Signal(mean=float(m), duration=float(duration))


def sinusoid_with_mean(m, alpha, omega, duration=None):
    """``m + alpha * sin(omega t)``; duration defaults to ten periods."""
    period = 2.0 * math.pi / omega
    comps = (Component(float(alpha), float(omega)),) if alpha != 0 else ()
    return Signal(
        mean=float(m),
        components=comps,
        duration=float(duration) if duration is not None else 10.0 * period,
        period=period,
    )


def fourier_coefficients(seed, stream=0, n_terms=12):
    """Standard normal coefficients from a counter-based generator.

    Each ``(seed, stream)`` pair owns an independent stream, so signals can be
    generated in any order or in parallel with identical results.
    """
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    rng = np.random.Generator(np.random.Philox(seq))
    return rng.standard_normal(n_terms)


def random_fourier_signal(alpha, seed, n_terms=12, stream=0, samples_per_period=150,
                          n_periods=1, xi=None):
    """Random band-limited signal of period 2.

    ``alpha * sum_n xi_n / (pi n) * sin(pi n t) - C`` with ``xi_n`` standard
    normal.  ``C`` is the mean of the sum over one period sampled at
    ``samples_per_period`` points, so the sampled signal has zero mean.
    Passing ``xi`` overrides the random coefficients.
    """
    if xi is None:
        xi = fourier_coefficients(seed, stream, n_terms)
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (n_terms,):
        raise LengthMismatch(f"expected {n_terms} coefficients, got {xi.shape}")
    comps = tuple(
        Component(float(alpha * x / (math.pi * n)), math.pi * n)
        for n, x in enumerate(xi, start=1)
        if x != 0.0
    )
    period = 2.0
    raw = Signal(components=comps, duration=period * n_periods, period=period)
    grid = np.arange(samples_per_period) * (period / samples_per_period)
    offset = float(np.mean(raw.sampler(grid))) if comps else 0.0
    return replace(raw, mean=-offset)


def z3_encoding(s1, s2, duration=None):
    """Frequency encoding of a symbol pair from {0, 1, 2}.

    ``(s1 + 1)/3 * sin(w1 t) + (s2 + 1)/3 * cos(w2 t)`` with the two
    incommensurate frequencies ``pi^2/sqrt(2)`` and ``3 pi sqrt(3)``.
    """
    for s in (s1, s2):
        if s not in (0, 1, 2):
            raise SymbolOutOfRange(f"symbol must be 0, 1 or 2, got {s!r}")
    comps = (
        Component((s1 + 1) / 3.0, Z3_OMEGA_SIN, 0.0, "sin"),
        Component((s2 + 1) / 3.0, Z3_OMEGA_COS, 0.0, "cos"),
    )
    if duration is None:
        duration = 20.0 * math.pi / Z3_OMEGA_SIN
    return Signal(components=comps, duration=float(duration))


def sample(sig, dt, duration=None):
    """Sample a signal on ``k * dt`` for k = 0..round(duration/dt)."""
    duration = sig.duration if duration is None else duration
    n = int(round(duration / dt))
    t = np.arange(n + 1) * dt
    return t, sig.sampler(t)
