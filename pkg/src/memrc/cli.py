"""Command-line front end: ``memrc {simulate,analyze,delay,z3,rank}``."""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import devices as dv
from .bank import numerical_rank
from .config import ExperimentConfig, load_config
from .csvio import write_csv
from .errors import ConfigError, MemrcError
from .experiments import (delay_design, run_delay_experiment, run_z3_experiment,
                          z3_buffered)
from .harmonics import empirical_harmonics, harmonic_coeffs, wiener_equivalent_params
from .report import emit_report
from .signals import random_fourier_signal, sample, sinusoid_with_mean, z3_encoding

COMMANDS = ("simulate", "analyze", "delay", "z3", "rank")


def build_parser():
    parser = argparse.ArgumentParser(prog="memrc", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--seed", type=int, help="overrides run.seed")
    parser.add_argument("--out", help="output directory (default: output.dir, $MEMRC_OUT)")
    parser.add_argument("--threads", type=int, help="worker threads; never changes results")
    return parser


def _signal(cfg):
    s = cfg.signal
    if s.kind == "sinusoid":
        return sinusoid_with_mean(s.mean, s.alpha, s.omega, s.duration)
    if s.kind == "fourier":
        sig = random_fourier_signal(s.alpha, cfg.run.seed, s.n_terms, s.stream,
                                    n_periods=max(1, math.ceil(s.duration / 2.0)))
        return sig.shifted(sig.mean + s.mean).with_duration(s.duration)
    sig = z3_encoding(s.s1, s.s2, s.duration)
    return sig.shifted(s.mean)


def _device(cfg, mean_drive):
    d = cfg.device
    p = dv.MemristorParams(mu=d.mu, lam=d.lam, R=d.R, r=d.r, x0=d.x0)
    if d.model != "wiener":
        return p
    if d.lambda_l > 0:
        return dv.WienerParams(p, d.lambda_l, d.z_s, d.z0)
    lam_l, z_s = wiener_equivalent_params(mean_drive, d.lam, d.x0)
    return dv.WienerParams(p, lam_l, z_s, d.z0)


def cmd_simulate(cfg, out, threads):
    sig = _signal(cfg)
    params = _device(cfg, sig.mean)
    traj = dv.simulate(sig, params, cfg.solver.dt, cfg.device.model, sig.duration)
    folder = os.path.join(out, "simulate")
    traj.to_csv(os.path.join(folder, "trajectory.csv"))
    t, u = sample(sig, cfg.solver.dt)
    write_csv(os.path.join(folder, "signal.csv"), ["t", "u"], zip(t, u))
    print(f"simulated {len(traj.times)} samples; final state {traj.states[-1]:.6g}")


def cmd_analyze(cfg, out, threads):
    a, d = cfg.analyze, cfg.device
    p = dv.MemristorParams(mu=d.mu, lam=d.lam, R=d.R, r=d.r, x0=d.x0)
    eps = a.m - p.lam
    rows = []
    for omega in a.omegas:
        c = harmonic_coeffs(p, a.m, a.alpha, omega)
        rows.append([omega, eps, c.phi, c.a_w, c.b_w, c.a_2w, c.b_2w, "analytic"])
        period = 2.0 * math.pi / omega
        duration = max(a.periods * period, 30.0 / eps)
        dt = min(cfg.solver.dt, period / 200.0)
        tr = dv.integrate_volatile_nonlinear(
            sinusoid_with_mean(a.m, a.alpha, omega, duration), p, dt)
        _, amps = empirical_harmonics(tr, omega, 2)
        _, state = empirical_harmonics(tr, omega, 1, values=tr.states)
        phi = math.atan2(-state[0, 1], state[0, 0])
        rows.append([omega, eps, phi, amps[0, 0], amps[0, 1], amps[1, 0], amps[1, 1],
                     "empirical"])
    path = write_csv(os.path.join(out, "analyze", "harmonics.csv"),
                     ["omega", "epsilon", "phi", "a_w", "b_w", "a_2w", "b_2w", "src"], rows)
    print(f"wrote {path}")


def cmd_delay(cfg, out, threads):
    res = run_delay_experiment(cfg, threads)
    emit_report(res, out)
    if len(res.delays):
        print(f"train correlation min {res.train_corr.min():.4f}, "
              f"test correlation min {res.test_corr.min():.4f}")
    print(f"numerical rank {res.rank} (tol {cfg.rank.tol:g})")


def cmd_z3(cfg, out, threads):
    res = run_z3_experiment(cfg, threads)
    emit_report(res, out)
    print(f"solved fraction (<=3 errors): {res.solved_3_or_less:.4f}")
    print(f"raw input solved fraction: {res.raw_solved:.4f}")
    print(f"numerical rank {res.rank} (tol {cfg.rank.tol:g})")


def cmd_rank(cfg, out, threads):
    if cfg.rank.task == "z3":
        dm, _ = z3_buffered(cfg, threads=threads)
        values = dm.values
    else:
        train = delay_design(cfg, threads)[0]
        values = np.column_stack([train, np.ones(len(train))])
    rank, sv = numerical_rank(values, cfg.rank.tol)
    write_csv(os.path.join(out, "rank", "singular_values.csv"), ["i", "sigma"],
              ((i + 1, s) for i, s in enumerate(sv)))
    print(f"{cfg.rank.task} design matrix {values.shape[0]}x{values.shape[1]}: "
          f"numerical rank {rank} at tol {cfg.rank.tol:g}")


HANDLERS = {"simulate": cmd_simulate, "analyze": cmd_analyze, "delay": cmd_delay,
            "z3": cmd_z3, "rank": cmd_rank}


def main(argv=None):
    """Run the CLI; returns 0 on success, 1 for configuration errors, 2 otherwise."""
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            if not os.path.isfile(args.config):
                raise ConfigError(f"config file not found: {args.config}")
            cfg = load_config(args.config)
        else:
            cfg = ExperimentConfig()
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            cfg.run.seed = args.seed
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
    except ConfigError as exc:
        print(f"memrc: configuration error: {exc}", file=sys.stderr)
        return 1
    cfg.run.experiment = args.command
    out = args.out or cfg.output.dir or os.environ.get("MEMRC_OUT") or "memrc_out"
    threads = args.threads or cfg.run.threads or os.cpu_count() or 1
    try:
        HANDLERS[args.command](cfg, out, threads)
    except (MemrcError, ValueError, OSError) as exc:
        print(f"memrc: {exc}", file=sys.stderr)
        return 2
    return 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
