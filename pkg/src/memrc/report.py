"""CSV tables and SVG figures for experiment results."""
from __future__ import annotations

import os

import numpy as np
from matplotlib import rcParams
from matplotlib.figure import Figure

from .csvio import write_csv
from .experiments import DelayResult, Z3Result

rcParams["svg.hashsalt"] = "memrc"


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _singular_values(path, sv):
    return write_csv(path, ["i", "sigma"], ((i + 1, s) for i, s in enumerate(sv)))


def _emit_delay(res, out):
    files = [
        write_csv(os.path.join(out, "correlations.csv"), ["delay", "train_corr", "test_corr"],
                  zip(res.delays, res.train_corr, res.test_corr)),
        write_csv(os.path.join(out, "weights.csv"), ["delay", "device", "epsilon", "weight"],
                  ((d, j, res.epsilons[j], res.weight_matrix[i, j])
                   for i, d in enumerate(res.delays) for j in range(len(res.epsilons)))),
        _singular_values(os.path.join(out, "singular_values.csv"), res.singular_values),
    ]
    if len(res.delays) == 0:
        return files
    fig = Figure(figsize=(6, 4))
    ax = fig.subplots()
    ax.plot(res.delays, res.train_corr, "-", label="train")
    ax.plot(res.delays, res.test_corr, ":", label="test")
    ax.set_xlabel("delay")
    ax.set_ylabel("correlation")
    ax.legend()
    files.append(_save(fig, os.path.join(out, "correlations.svg")))
    fig = Figure(figsize=(6, 4))
    ax = fig.subplots()
    im = ax.imshow(res.weight_matrix.T, aspect="auto", origin="lower", cmap="RdBu_r",
                   extent=(res.delays[0], res.delays[-1], 0, len(res.epsilons)))
    ax.set_yticks(np.arange(len(res.epsilons)) + 0.5)
    ax.set_yticklabels([f"{e:.3g}" for e in res.epsilons])
    ax.set_xlabel("delay")
    ax.set_ylabel("epsilon")
    fig.colorbar(im, ax=ax, label="weight")
    files.append(_save(fig, os.path.join(out, "weights.svg")))
    return files


def _emit_z3(res, out):
    ranks = sorted(res.baseline_histograms)
    header = ["errors", "bank", "raw"] + [f"random_rank{k}" for k in ranks]
    rows = ([e, res.error_histogram[e], res.raw_histogram[e]]
            + [res.baseline_histograms[k][e] for k in ranks] for e in range(10))
    solved = ([("bank", res.solved_3_or_less), ("raw", res.raw_solved)]
              + [(f"random_rank{k}", res.baseline_solved[k]) for k in ranks])
    files = [
        write_csv(os.path.join(out, "histogram.csv"), header, rows),
        write_csv(os.path.join(out, "solved.csv"), ["design", "solved_3_or_less"], solved),
        _singular_values(os.path.join(out, "singular_values.csv"), res.singular_values),
    ]
    fig = Figure(figsize=(6, 4))
    ax = fig.subplots()
    e = np.arange(10)
    n = max(res.n_operators, 1)
    ax.bar(e - 0.2, res.error_histogram / n, width=0.4, label="memristor bank")
    ax.bar(e + 0.2, res.raw_histogram / n, width=0.4, label="raw input")
    ax.set_xlabel("errors")
    ax.set_ylabel("fraction of operators")
    ax.legend()
    files.append(_save(fig, os.path.join(out, "histogram.svg")))
    return files


def emit_report(result, out_dir):
    """Write tables and figures under ``out_dir/delay`` or ``out_dir/z3``."""
    if isinstance(result, DelayResult):
        sub, writer = "delay", _emit_delay
    elif isinstance(result, Z3Result):
        sub, writer = "z3", _emit_z3
    else:
        raise TypeError(f"cannot report {type(result).__name__}")
    out = os.path.join(out_dir, sub)
    try:
        os.makedirs(out, exist_ok=True)
        return writer(result, out)
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
