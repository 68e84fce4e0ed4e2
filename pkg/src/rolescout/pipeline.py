"""Per-role training pipeline, model bundle, scoring, and ranked reports.

For each role a binary dataset is built: its labeled players are the
positives, every player labeled with a disconnected role is a negative,
and a seeded 25% sample of connected-role players is added as hard
negatives. Within each cross-validation fold, standardization, key-feature
combination, and optimal ranges are fitted on the training fold only, the
training fold is SMOTE-balanced, and a logistic model is fit by SGD. The
(alpha, beta) pair minimizing the weighted validation loss across roles
and folds is chosen, and final per-role models are refit on all labeled
data at that pair.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ValidationError
from .features import (
    FeatureMatrix,
    KeyFeatureSpec,
    StandardizationParams,
    base_model_columns,
    fit_standardization,
    key_feature_values,
)
from .learning import (
    GridCell,
    GridSearchResult,
    LabeledDataset,
    LogisticModel,
    TrainingConfig,
    fit_sgd,
    grid_search,
    oversample_to_balance,
    predict_proba_matrix,
)
from .ranges import RoleRangeSet, transform_dataset
from .roles import LabelSet, RoleGraph
from .seeding import derive_seed

BUNDLE_FORMAT = "rolescout-bundle"
BUNDLE_VERSION = 1

DEFAULT_ALPHA_GRID = (1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001)
DEFAULT_BETA_GRID = (0.1, 0.2, 0.25, 0.3, 0.35, 0.4)


@dataclass(frozen=True)
class PipelineConfig:
    training: TrainingConfig = field(default_factory=TrainingConfig)
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    beta_grid: tuple[float, ...] = DEFAULT_BETA_GRID
    connected_fraction: float = 0.25
    range_fit_on: str = "positives"
    jobs: int = 1

    def __post_init__(self):
        if not 0.0 <= self.connected_fraction <= 1.0:
            raise ValidationError("connected_fraction must be in [0, 1]")
        if self.range_fit_on not in ("positives", "all"):
            raise ValidationError("range_fit_on must be 'positives' or 'all'")
        if self.jobs < 1:
            raise ValidationError("jobs must be >= 1")


def build_role_dataset(
    role: str,
    features: FeatureMatrix,
    labels: LabelSet,
    graph: RoleGraph,
    connected_fraction: float = 0.25,
    seed: int = 0,
) -> LabeledDataset:
    """Binary dataset for one role per the connected/disconnected rule.

    Positives are the role's labeled players; negatives are every labeled
    player of a disconnected role plus ceil(fraction * n) connected-role
    players sampled without replacement. Unlabeled players are excluded.
    """
    if role not in graph:
        raise ValidationError(f"role '{role}' not in graph")
    if not 0.0 <= connected_fraction <= 1.0:
        raise ValidationError("connected_fraction must be in [0, 1]")
    connected = graph.connected(role)

    present = set(features.player_ids)
    positives, connected_pool, disconnected = [], [], []
    for pid in features.player_ids:
        assigned = labels.role_of(pid)
        if assigned is None or pid not in present:
            continue
        if assigned == role:
            positives.append(pid)
        elif assigned in connected:
            connected_pool.append(pid)
        else:
            disconnected.append(pid)
    if not positives:
        raise ValidationError(f"no positive examples for role '{role}'")

    n_sample = math.ceil(connected_fraction * len(connected_pool))
    rng = np.random.default_rng(derive_seed(seed, "negatives", role))
    sampled = sorted(
        rng.choice(np.array(sorted(connected_pool)), size=n_sample, replace=False)
    ) if n_sample else []

    chosen = set(positives) | set(disconnected) | set(sampled)
    ids = [pid for pid in features.player_ids if pid in chosen]
    rows = [features.row_of(pid) for pid in ids]
    y = np.array([1.0 if labels.role_of(pid) == role else 0.0 for pid in ids])
    return LabeledDataset(X=features.values[rows], y=y, ids=tuple(ids))


def _make_prepare(columns, combos: list[KeyFeatureSpec], fit_on: str):
    """Fold transform: standardize on train, combine keys, fit ranges, map to distances."""

    def prepare(X_train, y_train, X_val, beta):
        std = fit_standardization(X_train, tuple(columns))
        zs_train = std.apply_values(X_train)
        kf_train = key_feature_values(zs_train, tuple(columns), combos)
        sample = kf_train[y_train == 1.0] if fit_on == "positives" else kf_train
        ranges = RoleRangeSet.fit(sample, [c.name for c in combos], beta)
        t_train = transform_dataset(kf_train, ranges)
        if X_val.shape[0]:
            zs_val = std.apply_values(X_val)
            kf_val = key_feature_values(zs_val, tuple(columns), combos)
            t_val = transform_dataset(kf_val, ranges)
        else:
            t_val = np.empty((0, len(combos)))
        return t_train, t_val

    return prepare


@dataclass(frozen=True)
class RoleModel:
    """Everything needed to score an unlabeled player for one role."""

    role: str
    model: LogisticModel
    ranges: RoleRangeSet
    standardization: StandardizationParams
    alpha: float
    beta: float
    n_positive: int
    n_negative: int

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "model": self.model.to_dict(),
            "ranges": self.ranges.to_dict(),
            "standardization": self.standardization.to_dict(),
            "alpha": self.alpha,
            "beta": self.beta,
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RoleModel":
        return cls(
            role=d["role"],
            model=LogisticModel.from_dict(d["model"]),
            ranges=RoleRangeSet.from_dict(d["ranges"]),
            standardization=StandardizationParams.from_dict(d["standardization"]),
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            n_positive=int(d["n_positive"]),
            n_negative=int(d["n_negative"]),
        )


@dataclass(frozen=True)
class RoleModelBundle:
    """Versioned archive of per-role models plus the shared feature manifest."""

    base_columns: tuple[str, ...]
    combos: tuple[KeyFeatureSpec, ...]
    models: dict[str, RoleModel]
    untrained: dict[str, str]
    seed: int
    registry_hash: str
    manifest_id: str = ""

    def trained_roles(self) -> list[str]:
        return list(self.models)

    def to_dict(self) -> dict:
        return {
            "format": BUNDLE_FORMAT,
            "version": BUNDLE_VERSION,
            "tool_version": __version__,
            "manifest_id": self.manifest_id,
            "seed": self.seed,
            "registry_hash": self.registry_hash,
            "base_columns": list(self.base_columns),
            "key_features": [
                {"name": c.name, "inputs": {k: v for k, v in c.inputs}}
                for c in self.combos
            ],
            "models": {r: m.to_dict() for r, m in sorted(self.models.items())},
            "untrained": dict(sorted(self.untrained.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RoleModelBundle":
        if d.get("format") != BUNDLE_FORMAT:
            raise ValidationError("not a rolescout model bundle")
        if d.get("version") != BUNDLE_VERSION:
            raise ValidationError(f"unsupported bundle version {d.get('version')}")
        combos = tuple(
            KeyFeatureSpec(name=c["name"], inputs=tuple(c["inputs"].items()))
            for c in d["key_features"]
        )
        return cls(
            base_columns=tuple(d["base_columns"]),
            combos=combos,
            models={r: RoleModel.from_dict(m) for r, m in d["models"].items()},
            untrained=dict(d["untrained"]),
            seed=int(d["seed"]),
            registry_hash=d["registry_hash"],
            manifest_id=d.get("manifest_id", ""),
        )


def save_bundle(bundle: RoleModelBundle, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(bundle.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_bundle(path: str | Path) -> RoleModelBundle:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bundle is not valid JSON: {exc}") from exc
    return RoleModelBundle.from_dict(payload)


@dataclass(frozen=True)
class RoleReportRow:
    role: str
    trained: bool
    n_positive: int = 0
    n_negative: int = 0
    folds: int = 0
    cv_loss: float = float("nan")
    cv_auc: float = float("nan")
    reason: str = ""


@dataclass(frozen=True)
class TrainReport:
    """Cross-validation summary: the grid table plus per-role quality."""

    cells: tuple[GridCell, ...]
    best_alpha: float
    best_beta: float
    best_loss: float
    roles: tuple[RoleReportRow, ...]
    seed: int

    def to_json(self) -> str:
        payload = {
            "grid": [
                {
                    "alpha": c.alpha,
                    "beta": c.beta,
                    "loss": c.loss,
                    "per_role": dict(sorted(c.per_role.items())),
                }
                for c in self.cells
            ],
            "best": {"alpha": self.best_alpha, "beta": self.best_beta, "loss": self.best_loss},
            "roles": [
                {
                    "role": r.role,
                    "trained": r.trained,
                    "n_positive": r.n_positive,
                    "n_negative": r.n_negative,
                    "folds": r.folds,
                    "cv_loss": r.cv_loss,
                    "cv_auc": r.cv_auc,
                    "reason": r.reason,
                }
                for r in self.roles
            ],
            "seed": self.seed,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TrainReport":
        d = json.loads(text)
        cells = tuple(
            GridCell(alpha=c["alpha"], beta=c["beta"], loss=c["loss"], per_role=c["per_role"])
            for c in d["grid"]
        )
        rows = tuple(
            RoleReportRow(
                role=r["role"],
                trained=r["trained"],
                n_positive=r["n_positive"],
                n_negative=r["n_negative"],
                folds=r["folds"],
                cv_loss=r["cv_loss"],
                cv_auc=r["cv_auc"],
                reason=r["reason"],
            )
            for r in d["roles"]
        )
        return cls(
            cells=cells,
            best_alpha=d["best"]["alpha"],
            best_beta=d["best"]["beta"],
            best_loss=d["best"]["loss"],
            roles=rows,
            seed=d["seed"],
        )


def _fit_final_role(
    role: str,
    dataset: LabeledDataset,
    columns,
    combos: list[KeyFeatureSpec],
    best: GridCell,
    config: PipelineConfig,
) -> RoleModel:
    std = fit_standardization(dataset.X, tuple(columns))
    zs = std.apply_values(dataset.X)
    kf = key_feature_values(zs, tuple(columns), combos)
    sample = kf[dataset.y == 1.0] if config.range_fit_on == "positives" else kf
    ranges = RoleRangeSet.fit(sample, [c.name for c in combos], best.beta, role=role)
    transformed = transform_dataset(kf, ranges)
    xs, ys = oversample_to_balance(
        transformed,
        dataset.y,
        config.training.smote_neighbors,
        derive_seed(config.training.seed, "final-smote", role),
    )
    fit_cfg = TrainingConfig(
        alpha=best.alpha,
        beta=best.beta,
        folds=config.training.folds,
        smote_neighbors=config.training.smote_neighbors,
        epochs=config.training.epochs,
        eta0=config.training.eta0,
        tol=config.training.tol,
        seed=derive_seed(config.training.seed, "final-fit", role),
    )
    model = fit_sgd(LabeledDataset(xs, ys), fit_cfg)
    return RoleModel(
        role=role,
        model=model,
        ranges=ranges,
        standardization=std,
        alpha=best.alpha,
        beta=best.beta,
        n_positive=dataset.n_positive,
        n_negative=dataset.n_negative,
    )


def train_from_features(
    base: FeatureMatrix,
    labels: LabelSet,
    graph: RoleGraph,
    combos: list[KeyFeatureSpec],
    config: PipelineConfig,
    registry_hash: str = "",
) -> tuple[RoleModelBundle, TrainReport]:
    """Train every role with at least 2 labeled positives in the features.

    base must hold the unstandardized model-input columns (dual-normalized
    stats plus team metrics). Roles with fewer than 2 positives are marked
    untrained.
    """
    labels.validate_against(graph)
    columns = base_model_columns(base.columns)
    if not columns:
        raise ValidationError("feature matrix has no model-input columns")
    model_base = base.select(columns)

    datasets: dict[str, LabeledDataset] = {}
    untrained: dict[str, str] = {}
    for role in graph.role_ids():
        n_pos = sum(
            1 for pid in model_base.player_ids if labels.role_of(pid) == role
        )
        if n_pos < 2:
            untrained[role] = f"insufficient labels ({n_pos} positive)"
            continue
        datasets[role] = build_role_dataset(
            role,
            model_base,
            labels,
            graph,
            connected_fraction=config.connected_fraction,
            seed=config.training.seed,
        )
    if not datasets:
        raise ValidationError("no role has enough labeled players to train")

    prepare = _make_prepare(columns, combos, config.range_fit_on)
    result: GridSearchResult = grid_search(
        datasets, config.alpha_grid, config.beta_grid, config.training, prepare
    )
    best = result.best

    def fit_one(role: str) -> tuple[str, RoleModel]:
        return role, _fit_final_role(role, datasets[role], columns, combos, best, config)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            fitted = dict(pool.map(fit_one, sorted(datasets)))
    else:
        fitted = dict(fit_one(role) for role in sorted(datasets))

    bundle = RoleModelBundle(
        base_columns=tuple(columns),
        combos=tuple(combos),
        models=fitted,
        untrained=untrained,
        seed=config.training.seed,
        registry_hash=registry_hash,
    )

    rows = []
    for role in graph.role_ids():
        if role in result.role_evals:
            ev = result.role_evals[role]
            rows.append(
                RoleReportRow(
                    role=role,
                    trained=True,
                    n_positive=ev.n_positive,
                    n_negative=ev.n_negative,
                    folds=ev.folds,
                    cv_loss=ev.cv_loss,
                    cv_auc=ev.cv_auc,
                )
            )
        else:
            rows.append(RoleReportRow(role=role, trained=False, reason=untrained[role]))
    report = TrainReport(
        cells=result.cells,
        best_alpha=best.alpha,
        best_beta=best.beta,
        best_loss=best.loss,
        roles=tuple(rows),
        seed=config.training.seed,
    )
    return bundle, report


def train_all(
    matches,
    labels: LabelSet,
    graph: RoleGraph,
    registry,
    combos: list[KeyFeatureSpec],
    config: PipelineConfig,
    min_minutes: float = 900.0,
) -> tuple[RoleModelBundle, TrainReport]:
    """Full pipeline from parsed matches: features, grid search, final fits."""
    from .features import build_feature_table, registry_fingerprint

    table = build_feature_table(matches, registry, combos, min_minutes)
    return train_from_features(
        table.base, labels, graph, combos, config,
        registry_hash=registry_fingerprint(registry),
    )


def score_players(bundle: RoleModelBundle, features: FeatureMatrix) -> dict[str, dict[str, float]]:
    """Role probabilities for every player and every trained role."""
    missing = [c for c in bundle.base_columns if c not in features.columns]
    if missing:
        raise ValidationError(f"features are missing bundle columns: {missing[:5]}")
    base = features.select(bundle.base_columns)
    combos = list(bundle.combos)

    scores: dict[str, dict[str, float]] = {pid: {} for pid in base.player_ids}
    for role in sorted(bundle.models):
        rm = bundle.models[role]
        zs = rm.standardization.apply_values(base.values)
        kf = key_feature_values(zs, bundle.base_columns, combos)
        transformed = transform_dataset(kf, rm.ranges)
        probs = predict_proba_matrix(rm.model, transformed)
        for pid, p in zip(base.player_ids, probs):
            scores[pid][role] = float(p)
    return scores


@dataclass(frozen=True)
class RankedPlayer:
    player_id: str
    probability: float
    labeled: bool


def rank_players(
    scores: dict[str, dict[str, float]],
    role: str,
    top_k: int,
    labeled_filter: str = "all",
    labels: LabelSet | None = None,
) -> list[RankedPlayer]:
    """Players ranked by a role's probability, ties broken by player id."""
    if labeled_filter not in ("all", "labeled", "unlabeled"):
        raise ValidationError(f"unknown filter '{labeled_filter}'")
    rows = []
    for pid, role_scores in scores.items():
        if role not in role_scores:
            raise ValidationError(f"role '{role}' has no trained model")
        is_labeled = labels is not None and labels.role_of(pid) is not None
        if labeled_filter == "labeled" and not is_labeled:
            continue
        if labeled_filter == "unlabeled" and is_labeled:
            continue
        rows.append(RankedPlayer(pid, role_scores[role], is_labeled))
    rows.sort(key=lambda r: (-r.probability, r.player_id))
    return rows[:top_k]


def grid_report_csv(report: TrainReport, comments: list[str] | None = None) -> str:
    lines = [f"# {c}" for c in (comments or [])]
    lines.append("alpha,beta,weighted_logistic_loss,best")
    for c in report.cells:
        is_best = c.alpha == report.best_alpha and c.beta == report.best_beta
        lines.append(f"{c.alpha!r},{c.beta!r},{c.loss!r},{int(is_best)}")
    return "\n".join(lines) + "\n"


def grid_report_text(report: TrainReport) -> str:
    lines = ["alpha    beta     weighted logistic loss"]
    for c in report.cells:
        mark = "  *" if (c.alpha == report.best_alpha and c.beta == report.best_beta) else ""
        lines.append(f"{c.alpha:<8.3f} {c.beta:<8.3f} {c.loss:.4f}{mark}")
    lines.append("")
    lines.append(
        f"best: alpha={report.best_alpha:.3f} beta={report.best_beta:.3f} "
        f"loss={report.best_loss:.4f}"
    )
    lines.append("")
    lines.append("role   trained  pos   neg   folds  cv loss   cv auc")
    for r in report.roles:
        if r.trained:
            lines.append(
                f"{r.role:<6} yes      {r.n_positive:<5} {r.n_negative:<5} "
                f"{r.folds:<6} {r.cv_loss:<9.4f} {r.cv_auc:.4f}"
            )
        else:
            lines.append(f"{r.role:<6} no       ({r.reason})")
    return "\n".join(lines) + "\n"


def ranking_csv(
    ranking: list[RankedPlayer], role: str, comments: list[str] | None = None
) -> str:
    lines = [f"# {c}" for c in (comments or [])]
    lines.append("role,player_id,labeled,probability")
    for r in ranking:
        lines.append(f"{role},{r.player_id},{'yes' if r.labeled else 'no'},{r.probability!r}")
    return "\n".join(lines) + "\n"


def ranking_text(ranking: list[RankedPlayer], role: str) -> str:
    lines = [f"player_id        labeled  p({role})"]
    for r in ranking:
        lines.append(
            f"{r.player_id:<16} {'yes' if r.labeled else 'no':<8} {r.probability:.4f}"
        )
    return "\n".join(lines) + "\n"
