"""Numerical core: SGD-trained logistic models, SMOTE, CV, and grid search.

Per-role classification datasets live in distance space [0, 4]^d. Models
minimize the class-weighted logistic loss plus an L2 penalty (alpha/2)|w|^2
with an unregularized bias, via per-sample stochastic gradient descent on
an inverse-scaling schedule. Everything is deterministic given a seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ValidationError
from .seeding import derive_seed

PROB_EPS = _kernels.PROB_EPS


def logistic_loss(p: float, y: int) -> float:
    """Cross-entropy of one prediction; p is clamped away from 0 and 1."""
    p = min(max(p, PROB_EPS), 1.0 - PROB_EPS)
    return -(y * math.log(p) + (1 - y) * math.log(1.0 - p))


def class_weights(y) -> dict[int, float]:
    """Inverse-frequency weights N / (2 * N_c); their example mean is 1."""
    y = np.asarray(y)
    n = y.size
    n_pos = int(np.sum(y == 1))
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("class weights need both classes present")
    return {0: n / (2.0 * n_neg), 1: n / (2.0 * n_pos)}


@dataclass(frozen=True)
class LabeledDataset:
    """Binary-labeled rows, optionally tagged with player ids."""

    X: np.ndarray
    y: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValidationError("X must be (n, d) and y must be (n,)")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ValidationError("labels must be 0 or 1")
        if self.ids is not None and len(self.ids) != X.shape[0]:
            raise ValidationError("ids length does not match rows")

    @property
    def n_positive(self) -> int:
        return int(np.sum(self.y == 1.0))

    @property
    def n_negative(self) -> int:
        return int(np.sum(self.y == 0.0))

    def example_weights(self) -> np.ndarray:
        cw = class_weights(self.y)
        return np.where(self.y == 1.0, cw[1], cw[0])


@dataclass(frozen=True)
class TrainingConfig:
    alpha: float = 0.05
    beta: float = 0.25
    folds: int = 10
    smote_neighbors: int = 5
    epochs: int = 100
    eta0: float = 0.5
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValidationError("alpha must be positive")
        if not 0.0 < self.beta < 0.5:
            raise ValidationError("beta must be in (0, 0.5)")
        for name in ("folds", "smote_neighbors", "epochs"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be a positive integer")
        if self.eta0 <= 0 or self.tol < 0:
            raise ValidationError("eta0 must be positive and tol non-negative")


@dataclass(frozen=True)
class LogisticModel:
    """Trained logistic classifier: p = sigmoid(w.x + b)."""

    weights: np.ndarray
    bias: float
    alpha: float
    epochs_run: int
    initial_loss: float
    final_loss: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "weights": [float(v) for v in self.weights],
            "bias": self.bias,
            "alpha": self.alpha,
            "epochs_run": self.epochs_run,
            "initial_loss": self.initial_loss,
            "final_loss": self.final_loss,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        return cls(
            weights=np.asarray(d["weights"], dtype=np.float64),
            bias=float(d["bias"]),
            alpha=float(d["alpha"]),
            epochs_run=int(d["epochs_run"]),
            initial_loss=float(d["initial_loss"]),
            final_loss=float(d["final_loss"]),
            seed=int(d["seed"]),
        )


def fit_sgd(dataset: LabeledDataset, config: TrainingConfig) -> LogisticModel:
    """Train by per-sample SGD; deterministic given (data, config, seed).

    Shuffle orders are drawn up front from the config seed, the kernel runs
    them sequentially, and training stops early once the epoch objective
    (weighted loss + ridge term) improves by less than config.tol.
    """
    X, y = dataset.X, dataset.y
    if not np.all(np.isfinite(X)):
        raise ValidationError("features must be finite")
    if dataset.n_positive == 0 or dataset.n_negative == 0:
        raise ValidationError("training needs both classes present")

    cw = dataset.example_weights()
    rng = np.random.default_rng(config.seed)
    n = X.shape[0]
    order = np.empty((config.epochs, n), dtype=np.int64)
    for e in range(config.epochs):
        order[e] = rng.permutation(n)

    w, b, losses, epochs_run = _kernels.sgd_epochs(
        X, y, cw, order, config.alpha, config.eta0, config.tol, config.epochs
    )
    return LogisticModel(
        weights=w,
        bias=float(b),
        alpha=config.alpha,
        epochs_run=int(epochs_run),
        initial_loss=float(losses[0]),
        final_loss=float(losses[epochs_run - 1]),
        seed=config.seed,
    )


def predict_proba(model: LogisticModel, row) -> float:
    row = np.ascontiguousarray(row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] != model.weights.shape[0]:
        raise ValidationError(
            f"row dimension {row.shape} does not match model "
            f"({model.weights.shape[0]} features)"
        )
    return float(_kernels.predict_matrix(row[None, :], model.weights, model.bias)[0])


def predict_proba_matrix(model: LogisticModel, X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.weights.shape[0]:
        raise ValidationError("matrix width does not match model")
    return _kernels.predict_matrix(X, model.weights, model.bias)


def weighted_logistic_loss(dataset: LabeledDataset, model: LogisticModel) -> float:
    """Class-weighted mean logistic loss of a model on a dataset."""
    cw = dataset.example_weights()
    return float(
        _kernels.weighted_loss(dataset.X, dataset.y, cw, model.weights, model.bias)
    )


def objective(X, y, cw, w, b, alpha: float) -> float:
    """Full-batch weighted loss plus ridge penalty (the SGD objective)."""
    z = X @ w + b
    p = np.clip(1.0 / (1.0 + np.exp(-z)), PROB_EPS, 1.0 - PROB_EPS)
    data = float(np.mean(cw * -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))
    return data + 0.5 * alpha * float(w @ w)


def objective_gradient(X, y, cw, w, b, alpha: float) -> tuple[np.ndarray, float]:
    """Analytic gradient of `objective` with respect to (w, b)."""
    z = X @ w + b
    p = 1.0 / (1.0 + np.exp(-z))
    g = cw * (p - y)
    grad_w = X.T @ g / X.shape[0] + alpha * w
    grad_b = float(np.mean(g))
    return grad_w, grad_b


def smote(minority, k: int, n_synthetic: int, seed: int) -> np.ndarray:
    """Synthesize minority rows by interpolating toward nearest neighbors.

    Each synthetic row is x + u * (x_nn - x) with u uniform on [0, 1] and
    x_nn one of x's k nearest minority neighbors. Base rows are cycled so
    every minority example contributes evenly.
    """
    minority = np.ascontiguousarray(minority, dtype=np.float64)
    n = minority.shape[0]
    if n < 2:
        raise ValidationError("SMOTE needs at least 2 minority rows")
    if n_synthetic < 0:
        raise ValidationError("n_synthetic must be non-negative")
    k_eff = min(k, n - 1)
    if k_eff < k:
        warnings.warn(f"SMOTE neighbors lowered from {k} to {k_eff} (minority size {n})")
    if n_synthetic == 0:
        return np.empty((0, minority.shape[1]))

    neighbors = _kernels.knn_indices(minority, k_eff)
    rng = np.random.default_rng(seed)
    bases = np.arange(n_synthetic) % n
    picks = rng.integers(0, k_eff, size=n_synthetic)
    u = rng.random(n_synthetic)
    nn = neighbors[bases, picks]
    return minority[bases] + u[:, None] * (minority[nn] - minority[bases])


def oversample_to_balance(
    X, y, k: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """SMOTE the minority class up to a 1:1 ratio; synthetics are appended.

    With fewer than 2 minority rows there is nothing to interpolate between;
    the data is returned unchanged (the weighted loss then carries the
    imbalance correction alone) with a warning.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n_pos = int(np.sum(y == 1.0))
    n_neg = y.size - n_pos
    if n_pos == n_neg:
        return X, y
    minority_label = 1.0 if n_pos < n_neg else 0.0
    deficit = abs(n_neg - n_pos)
    minority = X[y == minority_label]
    if minority.shape[0] < 2:
        warnings.warn("minority class too small to oversample; relying on class weights")
        return X, y
    synthetic = smote(minority, k, deficit, seed)
    X_out = np.vstack([X, synthetic])
    y_out = np.concatenate([y, np.full(deficit, minority_label)])
    return X_out, y_out


def stratified_kfold(y, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic stratified k-fold split; returns (train, validation) index pairs.

    k is lowered (with a warning) to the smallest class count when needed,
    so every validation fold keeps at least one example of each class.
    """
    y = np.asarray(y)
    if y.size == 0:
        raise ValidationError("cannot split an empty dataset")
    classes, counts = np.unique(y, return_counts=True)
    min_count = int(counts.min())
    if min_count < k:
        warnings.warn(f"folds lowered from {k} to {min_count} (smallest class size)")
        k = min_count
    if k < 2:
        raise ValidationError("stratified CV needs at least 2 examples per class")

    rng = np.random.default_rng(seed)
    fold_of = np.empty(y.size, dtype=np.int64)
    for cls in classes:
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.size)]
        for pos, i in enumerate(idx):
            fold_of[i] = pos % k

    splits = []
    everything = np.arange(y.size)
    for f in range(k):
        val = everything[fold_of == f]
        train = everything[fold_of != f]
        splits.append((train, val))
    return splits


def roc_auc(y, scores) -> float:
    """Area under the ROC curve via the rank statistic (ties averaged)."""
    y = np.asarray(y)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(np.sum(y == 1))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(y.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < y.size:
        j = i
        while j + 1 < y.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    u = float(np.sum(ranks[y == 1])) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def default_fold_prepare(X_train, y_train, X_val, beta: float):
    """Range-only fold transform for already-standardized key features."""
    from .ranges import empirical_quantile

    positives = X_train[y_train == 1.0]
    sample = positives if positives.shape[0] > 0 else X_train
    sorted_cols = np.sort(sample, axis=0)
    lower = np.asarray(empirical_quantile(sorted_cols, beta))
    upper = np.asarray(empirical_quantile(sorted_cols, 1.0 - beta))
    t_train = _kernels.distance_transform_matrix(
        np.ascontiguousarray(X_train), lower, upper
    )
    t_val = _kernels.distance_transform_matrix(np.ascontiguousarray(X_val), lower, upper)
    return t_train, t_val


@dataclass(frozen=True)
class GridCell:
    alpha: float
    beta: float
    loss: float
    per_role: dict[str, float] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class RoleEval:
    """Cross-validated quality of one role's model at the chosen grid cell."""

    role: str
    cv_loss: float
    cv_auc: float
    n_positive: int
    n_negative: int
    folds: int


@dataclass(frozen=True)
class GridSearchResult:
    best: GridCell
    cells: tuple[GridCell, ...]
    role_evals: dict[str, RoleEval] = field(hash=False, default_factory=dict)


def select_best(cells) -> GridCell:
    """Argmin cell by loss; ties prefer larger alpha, then larger beta."""
    cells = [c if isinstance(c, GridCell) else GridCell(*c) for c in cells]
    if not cells:
        raise ValidationError("empty grid")
    return min(cells, key=lambda c: (c.loss, -c.alpha, -c.beta))


def grid_search(
    datasets: dict[str, LabeledDataset],
    alpha_grid,
    beta_grid,
    config: TrainingConfig,
    prepare=default_fold_prepare,
) -> GridSearchResult:
    """Scan the (alpha, beta) grid with per-role cross-validation.

    For every cell, each role's dataset is split once (folds depend on the
    seed only, not the cell), the beta transform is fitted on the training
    fold via `prepare`, the training fold is SMOTE-balanced, a model is fit
    at alpha, and the validation fold's class-weighted loss is recorded.
    The cell loss averages over folds then roles.
    """
    alpha_grid = [float(a) for a in alpha_grid]
    beta_grid = [float(b) for b in beta_grid]
    if not alpha_grid or not beta_grid:
        raise ValidationError("alpha and beta grids must be non-empty")
    if not datasets:
        raise ValidationError("grid search needs at least one role dataset")

    folds_by_role = {
        role: stratified_kfold(ds.y, config.folds, derive_seed(config.seed, "cv", role))
        for role, ds in datasets.items()
    }

    # The fold transform and oversampling depend on beta but not alpha, so
    # cache the prepared folds and reuse them across the alpha sweep.
    prepared: dict[tuple[str, int, float], tuple] = {}
    for beta in beta_grid:
        for role, ds in datasets.items():
            for f, (train_idx, val_idx) in enumerate(folds_by_role[role]):
                t_train, t_val = prepare(
                    ds.X[train_idx], ds.y[train_idx], ds.X[val_idx], beta
                )
                xs, ys = oversample_to_balance(
                    t_train,
                    ds.y[train_idx],
                    config.smote_neighbors,
                    derive_seed(config.seed, "smote", role, f),
                )
                val_ds = LabeledDataset(t_val, ds.y[val_idx])
                prepared[(role, f, beta)] = (xs, ys, val_ds)

    cells: list[GridCell] = []
    cell_details: dict[tuple[float, float], dict[str, tuple[float, np.ndarray, np.ndarray]]] = {}
    for alpha in alpha_grid:
        for beta in beta_grid:
            per_role: dict[str, float] = {}
            detail: dict[str, tuple[float, np.ndarray, np.ndarray]] = {}
            for role, ds in datasets.items():
                fold_losses = []
                y_pool: list[np.ndarray] = []
                p_pool: list[np.ndarray] = []
                for f in range(len(folds_by_role[role])):
                    xs, ys, val_ds = prepared[(role, f, beta)]
                    fit_cfg = TrainingConfig(
                        alpha=alpha,
                        beta=beta,
                        folds=config.folds,
                        smote_neighbors=config.smote_neighbors,
                        epochs=config.epochs,
                        eta0=config.eta0,
                        tol=config.tol,
                        seed=derive_seed(config.seed, "cvfit", role, f),
                    )
                    model = fit_sgd(LabeledDataset(xs, ys), fit_cfg)
                    fold_losses.append(weighted_logistic_loss(val_ds, model))
                    y_pool.append(val_ds.y)
                    p_pool.append(predict_proba_matrix(model, val_ds.X))
                if not fold_losses:
                    raise ValidationError(
                        f"all folds failed for cell (alpha={alpha}, beta={beta})"
                    )
                per_role[role] = float(np.mean(fold_losses))
                detail[role] = (
                    per_role[role],
                    np.concatenate(y_pool),
                    np.concatenate(p_pool),
                )
            loss = float(np.mean(list(per_role.values())))
            cells.append(GridCell(alpha=alpha, beta=beta, loss=loss, per_role=per_role))
            cell_details[(alpha, beta)] = detail

    best = select_best(cells)
    role_evals = {}
    for role, (cv_loss, y_pool, p_pool) in cell_details[(best.alpha, best.beta)].items():
        ds = datasets[role]
        role_evals[role] = RoleEval(
            role=role,
            cv_loss=cv_loss,
            cv_auc=roc_auc(y_pool, p_pool),
            n_positive=ds.n_positive,
            n_negative=ds.n_negative,
            folds=len(folds_by_role[role]),
        )
    return GridSearchResult(best=best, cells=tuple(cells), role_evals=role_evals)
