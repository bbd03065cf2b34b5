"""Linear readout: ridge regression with k-fold cross-validation."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bank import DesignMatrix
from .csvio import write_csv
from .errors import DegenerateTarget, DimensionMismatch, SingularSystem


@dataclass(frozen=True)
class ReadoutModel:
    """Fitted readout.

    For a single target ``weights`` has shape (n,) and ``reg`` is a float;
    for a matrix of targets they have shapes (n, k) and (k,).
    """

    weights: np.ndarray
    reg: object
    cv_scores: np.ndarray
    metric: str = "mse"
    reg_grid: np.ndarray | None = None
    cv_loss: np.ndarray | None = None
    col_meta: tuple | None = None

    def to_csv(self, path):
        w = np.asarray(self.weights)
        if w.ndim != 1:
            raise ValueError("only single-target models serialize to CSV")
        ids = self.col_meta or tuple(range(len(w)))
        reg = format(float(self.reg), ".17g")
        return write_csv(path, ["col_id", "weight"], zip(ids, w), preamble=[f"#reg={reg}"])


def _values(dm):
    return dm.values if isinstance(dm, DesignMatrix) else np.asarray(dm, dtype=float)


def default_reg_grid(theta, lo=1e-8, hi=1.0, n=9):
    """``n`` log-spaced values in ``[lo, hi] * sigma_1^2``."""
    s1 = np.linalg.norm(_values(theta), 2)
    return np.geomspace(lo, hi, n) * s1 * s1


def fold_indices(n_rows, k_folds, seed=None, shuffle=False):
    """Contiguous folds (optionally over a seeded permutation); empty folds dropped."""
    order = np.arange(n_rows)
    if shuffle:
        order = np.random.default_rng(seed).permutation(n_rows)
    return [f for f in np.array_split(order, k_folds) if len(f)]


def _filter_factors(s, regs):
    s = s[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        f = s / (s * s + regs[None, :])
    f[~np.isfinite(f)] = 0.0
    return f


def _ridge_svd(theta, y, regs):
    """Weights for each reg in ``regs`` (one reg per target column of ``y``)."""
    u, s, vt = np.linalg.svd(theta, full_matrices=False)
    coef = u.T @ y
    return vt.T @ (coef * _filter_factors(s, regs))


def ridge_fit(dm, y, reg_grid=None, k_folds=10, seed=None, shuffle=False):
    """Ridge readout with the regularization picked by k-fold CV.

    Parameters
    ----------
    dm : DesignMatrix or ndarray, shape (m, n)
    y : ndarray, shape (m,) or (m, k)
        One or several targets; each target gets its own reg.
    reg_grid : array_like, optional
        Absolute penalties.  Defaults to :func:`default_reg_grid`.
    k_folds : int
        Number of contiguous folds (empty folds are skipped when k > m).

    Returns
    -------
    ReadoutModel
        ``cv_scores`` holds the per-fold held-out mean squared error at the
        chosen reg; ``cv_loss`` the mean held-out error for every grid value.
    """
    theta = _values(dm)
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    Y = y[:, None] if single else y
    if Y.shape[0] != theta.shape[0]:
        raise DimensionMismatch(f"{theta.shape[0]} rows but {Y.shape[0]} targets")
    if k_folds < 2:
        raise ValueError("need at least two folds")
    regs = default_reg_grid(theta) if reg_grid is None else np.asarray(reg_grid, dtype=float)
    if regs.size == 0 or np.any(regs < 0):
        raise ValueError("reg grid must be non-empty and non-negative")
    if np.any(regs == 0):
        warnings.warn("reg = 0 in the grid; the fit may be ill-conditioned", RuntimeWarning)
        if np.linalg.matrix_rank(theta) < theta.shape[1]:
            raise SingularSystem("reg = 0 requested for a rank-deficient design matrix")

    folds = fold_indices(theta.shape[0], k_folds, seed, shuffle)
    n_t = Y.shape[1]
    fold_err = np.zeros((len(folds), regs.size, n_t))
    for i, test in enumerate(folds):
        train = np.setdiff1d(np.arange(theta.shape[0]), test)
        u, s, vt = np.linalg.svd(theta[train], full_matrices=False)
        coef = u.T @ Y[train]
        proj = theta[test] @ vt.T
        f = _filter_factors(s, regs)
        for j in range(regs.size):
            pred = proj @ (coef * f[:, j:j + 1])
            fold_err[i, j] = np.mean((pred - Y[test]) ** 2, axis=0)
    sizes = np.array([len(f) for f in folds], dtype=float)
    cv_loss = np.tensordot(sizes / sizes.sum(), fold_err, axes=(0, 0))
    best = np.argmin(cv_loss, axis=0)
    chosen = regs[best]
    W = _ridge_svd(theta, Y, chosen)
    scores = fold_err[:, best, np.arange(n_t)]
    col_meta = dm.col_meta if isinstance(dm, DesignMatrix) else None
    if single:
        return ReadoutModel(W[:, 0], float(chosen[0]), scores[:, 0], "mse", regs,
                            cv_loss[:, 0], col_meta)
    return ReadoutModel(W, chosen, scores, "mse", regs, cv_loss, col_meta)


def ridge_solve(dm, y, reg):
    """Ridge weights for a fixed penalty (no cross-validation)."""
    theta = _values(dm)
    y = np.asarray(y, dtype=float)
    Y = y[:, None] if y.ndim == 1 else y
    W = _ridge_svd(theta, Y, np.full(Y.shape[1], float(reg)))
    return W[:, 0] if y.ndim == 1 else W


def predict(model, dm):
    theta = _values(dm)
    w = model.weights if isinstance(model, ReadoutModel) else np.asarray(model)
    if theta.shape[1] != w.shape[0]:
        raise DimensionMismatch(f"{theta.shape[1]} columns but {w.shape[0]} weights")
    return theta @ w


def correlation_coefficient(y, y_hat):
    """Pearson correlation; raises DegenerateTarget for a constant target."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape:
        raise DimensionMismatch("target and prediction differ in length")
    if y.size < 2 or np.ptp(y) == 0:
        raise DegenerateTarget("correlation is undefined for a constant target")
    dy = y - y.mean()
    dh = y_hat - y_hat.mean()
    den = np.sqrt(np.dot(dy, dy) * np.dot(dh, dh))
    return 0.0 if den == 0 else float(np.clip(np.dot(dy, dh) / den, -1.0, 1.0))


def classify_z3(y_hat, target=None):
    """Round to the nearest symbol in {0, 1, 2}; count mismatches against ``target``.

    Works column-wise when ``y_hat`` is a matrix of predictions.
    """
    labels = np.clip(np.rint(np.asarray(y_hat, dtype=float)), 0, 2).astype(int)
    if target is None:
        return labels, None
    errors = np.sum(labels != np.asarray(target), axis=0)
    return labels, errors


def random_truncated_matrix(rows=9, cols=30, rank=9, seed=0, stream=0):
    """Gaussian matrix with all but the ``rank`` largest singular values zeroed."""
    if not 1 <= rank <= min(rows, cols):
        raise ValueError(f"rank must lie in [1, {min(rows, cols)}]")
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(0x5A3D, int(stream)))
    rng = np.random.Generator(np.random.Philox(seq))
    g = rng.standard_normal((rows, cols))
    u, s, vt = np.linalg.svd(g, full_matrices=False)
    s[rank:] = 0.0
    values = (u * s) @ vt
    return DesignMatrix(values, tuple(range(rows)), tuple(f"g{j}" for j in range(cols)))
