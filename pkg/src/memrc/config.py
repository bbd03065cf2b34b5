"""Line-based experiment configuration.

Each non-blank line is ``section.key = value``; ``#`` starts a comment.
Lists are comma separated.  Every key has a default, so an empty file is a
valid configuration, and unknown keys are rejected with their line number.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from .errors import ConfigParseError, RangeViolation, UnknownKey


@dataclass
class RunConfig:
    experiment: str = ""
    seed: int = 0
    threads: int = 0  # 0 means all available cores


@dataclass
class DeviceConfig:
    model: str = "nonlinear"  # nonlinear | wiener | nonvolatile | closed-form
    mu: float = 1.0
    lam: float = 1.0
    R: float = 2.0
    r: float = 1.0
    x0: float = 0.5
    lambda_l: float = 0.0  # 0 derives the Wiener map from the signal mean
    z_s: float = 0.0
    z0: float = 0.0


@dataclass
class SignalConfig:
    kind: str = "sinusoid"  # sinusoid | fourier | z3
    mean: float = 2.0
    alpha: float = 0.2
    omega: float = 5.0
    n_terms: int = 12
    stream: int = 0
    s1: int = 0
    s2: int = 0
    duration: float = 20.0


@dataclass
class SolverConfig:
    dt: float = 0.005
    substeps: int = 4  # RK4 steps per output sample for bank simulations


@dataclass
class BankConfig:
    n: int = 10
    eps_lo: float = 0.1
    eps_hi: float = 100.0
    lam: float = 1.0
    mu: float = 1.0
    R: float = 2.0
    r: float = 1.0
    x0: float = 0.5
    model: str = "nonlinear"  # nonlinear | wiener
    bias_mode: str = "independent"  # independent | shared
    shared_m: float = 0.0  # 0 means eps_hi + lam
    jitter: float = 0.0


@dataclass
class DelayConfig:
    n_signals: int = 50
    alpha: float = 0.1
    n_terms: int = 12
    periods: int = 36
    train_periods: int = 12
    samples_per_period: int = 150
    delay_min: float = 0.0
    delay_max: float = 1.0
    n_delays: int = 20


@dataclass
class ReadoutConfig:
    reg_min: float = 1e-8
    reg_max: float = 1.0
    n_reg: int = 9
    folds: int = 10
    shuffle: bool = False


@dataclass
class Z3Config:
    eps_lo: float = 0.1
    eps_hi: float = 10.0
    f: float = 150.0
    cycles: int = 10
    offsets: tuple = (0.95, 0.7, 0.5)
    replicas: int = 10
    reg_min: float = 1e-12
    operators: int = 0  # 0 means all 3^9
    n_random: int = 10
    baseline_ranks: tuple = (1, 2, 3, 4, 5, 6, 7, 8, 9)


@dataclass
class RankConfig:
    task: str = "z3"  # z3 | delay
    tol: float = 1e-2


@dataclass
class AnalyzeConfig:
    m: float = 2.0
    alpha: float = 0.2
    omegas: tuple = (8.0, 12.0, 20.0)
    periods: int = 60


@dataclass
class OutputConfig:
    dir: str = ""


@dataclass
class ExperimentConfig:
    run: RunConfig = field(default_factory=RunConfig)
    device: DeviceConfig = field(default_factory=DeviceConfig)
    signal: SignalConfig = field(default_factory=SignalConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    bank: BankConfig = field(default_factory=BankConfig)
    delay: DelayConfig = field(default_factory=DelayConfig)
    readout: ReadoutConfig = field(default_factory=ReadoutConfig)
    z3: Z3Config = field(default_factory=Z3Config)
    rank: RankConfig = field(default_factory=RankConfig)
    analyze: AnalyzeConfig = field(default_factory=AnalyzeConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def seed(self):
        return self.run.seed

    @property
    def experiment(self):
        return self.run.experiment


CHOICES = {
    "run.experiment": ("", "simulate", "analyze", "delay", "z3", "rank"),
    "device.model": ("nonlinear", "wiener", "nonvolatile", "closed-form"),
    "signal.kind": ("sinusoid", "fourier", "z3"),
    "bank.model": ("nonlinear", "wiener"),
    "bank.bias_mode": ("independent", "shared"),
    "rank.task": ("z3", "delay"),
}

POSITIVE = {
    "device.mu", "device.R", "device.r", "solver.dt", "solver.substeps", "bank.n",
    "bank.eps_lo", "bank.eps_hi", "bank.mu", "bank.R", "bank.r", "delay.n_signals",
    "delay.n_terms", "delay.periods", "delay.train_periods", "delay.samples_per_period",
    "readout.reg_min", "readout.reg_max", "readout.n_reg", "z3.eps_lo", "z3.eps_hi",
    "z3.f", "z3.cycles", "z3.replicas", "z3.reg_min", "z3.n_random", "rank.tol",
    "analyze.m", "analyze.periods", "signal.omega", "signal.n_terms", "signal.duration",
}

NON_NEGATIVE = {
    "run.seed", "run.threads", "device.lam", "device.lambda_l", "bank.lam",
    "bank.jitter", "bank.shared_m", "delay.n_delays", "z3.operators", "signal.stream",
    "analyze.alpha",
}

UNIT_OPEN = {"device.x0", "bank.x0"}
SYMBOLS = {"signal.s1", "signal.s2"}


def _convert(text, default, key, lineno):
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text, 0)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            kind = type(default[0]) if default else float
            items = [t.strip() for t in text.split(",") if t.strip()]
            return tuple(int(t, 0) if kind is int else float(t) for t in items)
        return text
    except ValueError:
        kind = type(default).__name__
        raise ConfigParseError(lineno, f"{key}: cannot read {text!r} as {kind}") from None


def _check(key, value, lineno):
    where = f"line {lineno}: " if lineno else ""
    if key in CHOICES and value not in CHOICES[key]:
        raise RangeViolation(f"{where}{key} must be one of {CHOICES[key]}, got {value!r}")
    values = value if isinstance(value, tuple) else (value,)
    for v in values:
        if isinstance(v, float) and not math.isfinite(v):
            raise RangeViolation(f"{where}{key} must be finite")
        if key in POSITIVE and not v > 0:
            raise RangeViolation(f"{where}{key} must be positive, got {v}")
        if key in NON_NEGATIVE and not v >= 0:
            raise RangeViolation(f"{where}{key} must be non-negative, got {v}")
        if key in UNIT_OPEN and not 0 < v < 1:
            raise RangeViolation(f"{where}{key} must lie in (0, 1), got {v}")
        if key in SYMBOLS and v not in (0, 1, 2):
            raise RangeViolation(f"{where}{key} must be 0, 1 or 2, got {v}")
    if key == "z3.baseline_ranks" and any(not 1 <= v <= 9 for v in values):
        raise RangeViolation(f"{where}{key} entries must lie in [1, 9]")
    if key == "readout.folds" and value < 2:
        raise RangeViolation(f"{where}{key} must be at least 2, got {value}")


def _check_relations(cfg):
    if cfg.device.R <= cfg.device.r:
        raise RangeViolation("device.R must exceed device.r")
    if cfg.bank.R <= cfg.bank.r:
        raise RangeViolation("bank.R must exceed bank.r")
    if cfg.bank.n > 1 and cfg.bank.eps_hi <= cfg.bank.eps_lo:
        raise RangeViolation("bank.eps_hi must exceed bank.eps_lo")
    if cfg.z3.eps_hi <= cfg.z3.eps_lo:
        raise RangeViolation("z3.eps_hi must exceed z3.eps_lo")
    if cfg.delay.train_periods > cfg.delay.periods:
        raise RangeViolation("delay.train_periods cannot exceed delay.periods")
    if cfg.delay.delay_max < cfg.delay.delay_min:
        raise RangeViolation("delay.delay_max must not be below delay.delay_min")
    if cfg.readout.reg_max < cfg.readout.reg_min:
        raise RangeViolation("readout.reg_max must not be below readout.reg_min")


def parse_config(text):
    """Parse configuration text into an :class:`ExperimentConfig`."""
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(lineno, f"expected 'section.key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.count(".") != 1:
            raise ConfigParseError(lineno, f"key {key!r} must look like section.key")
        section_name, name = key.split(".")
        section = getattr(cfg, section_name, None)
        if section is None or not dataclasses.is_dataclass(section):
            raise UnknownKey(f"line {lineno}: unknown section in key {key!r}")
        names = {f.name for f in dataclasses.fields(section)}
        if name not in names:
            raise UnknownKey(f"line {lineno}: unknown key {key!r}")
        converted = _convert(value, getattr(section, name), key, lineno)
        _check(key, converted, lineno)
        setattr(section, name, converted)
    _check_relations(cfg)
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_lines(cfg):
    """Every key with its current value, in the config file syntax."""
    lines = []
    for sec in dataclasses.fields(cfg):
        section = getattr(cfg, sec.name)
        for f in dataclasses.fields(section):
            v = getattr(section, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = str(v).lower()
            lines.append(f"{sec.name}.{f.name} = {v}")
    return lines
