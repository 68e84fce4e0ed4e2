"""Command-line front door: synth, ingest, features, train, rank.

Every command is reproducible: all randomness flows from --seed, and each
run writes a manifest recording the effective configuration, input hashes,
and seed. Artifacts embed the manifest id (a hash over everything except
wall-clock timestamps), so identical inputs and seed yield byte-identical
bundles and reports.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal failure.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from pathlib import Path

import click

from . import __version__
from .errors import RolescoutError, ValidationError
from .features import (
    FeatureMatrix,
    base_model_columns,
    build_feature_table,
    load_combos,
    load_registry,
    registry_fingerprint,
)
from .ingest import load_dataset
from .learning import TrainingConfig
from .pipeline import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_BETA_GRID,
    PipelineConfig,
    grid_report_csv,
    grid_report_text,
    load_bundle,
    rank_players,
    ranking_csv,
    ranking_text,
    save_bundle,
    score_players,
    train_from_features,
)
from .roles import load_labels, load_role_graph
from .synth import LeagueSpec, generate_league, sample_labels, write_league


def _hash_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(
    out_dir: Path, command: str, config: dict, inputs: list[Path], seed: int | None
) -> str:
    """Write run_manifest.json next to the artifacts; returns the manifest id.

    The id hashes command, config, input digests, seed, and tool version.
    Timestamps are recorded in the manifest but excluded from the id so
    artifacts stay byte-identical across reruns.
    """
    input_hashes = {str(p): _hash_file(p) for p in sorted(inputs) if p.is_file()}
    core = {
        "command": command,
        "config": config,
        "inputs": input_hashes,
        "seed": seed,
        "tool_version": __version__,
    }
    manifest_id = hashlib.sha256(
        json.dumps(core, sort_keys=True).encode("utf-8")
    ).hexdigest()
    manifest = dict(core, manifest_id=manifest_id, created_at=time.strftime("%Y-%m-%dT%H:%M:%S%z"))
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest_id


def _parse_grid(text: str, name: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ValidationError(f"bad {name} grid '{text}'") from exc
    if not values:
        raise ValidationError(f"{name} grid is empty")
    return values


@click.group()
@click.version_option(version=__version__, prog_name="rolescout")
def cli():
    """Identify football players' tactical roles from match event data."""


@cli.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, path_type=Path), required=True,
              help="League spec JSON (see docs/format.md).")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--seed", type=int, default=None, help="Override the spec's seed.")
def synth(spec_path: Path, out_dir: Path, seed: int | None):
    """Generate a synthetic league with planted role archetypes."""
    spec = LeagueSpec.from_json(spec_path.read_text(encoding="utf-8"))
    if seed is not None:
        spec = LeagueSpec(**{**spec.__dict__, "seed": seed})
    matches, truth = generate_league(spec)
    labels = sample_labels(truth, spec.label_fraction, spec.seed)
    write_league(matches, truth, labels, out_dir)
    _write_manifest(out_dir, "synth", spec.__dict__ | {"archetypes": list(spec.archetypes)},
                    [spec_path], spec.seed)
    n_events = sum(len(m.events) for m in matches)
    click.echo(
        f"wrote {len(matches)} matches, {n_events} events, "
        f"{len(truth)} players ({len(labels)} labeled) to {out_dir}"
    )


@cli.command()
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--strict", is_flag=True, help="Reject unknown event types instead of mapping to 'other'.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Store index path (default: DATA_DIR/store.json).")
def ingest(data_dir: Path, strict: bool, out_path: Path | None):
    """Validate a dataset directory and write its store index."""
    records = load_dataset(data_dir, strict=strict)
    players = {ev.player.player_id for m in records for ev in m.events}
    by_league: dict[str, int] = {}
    for m in records:
        by_league[m.competition_id] = by_league.get(m.competition_id, 0) + 1
    n_events = sum(len(m.events) for m in records)

    out_path = out_path or data_dir / "store.json"
    files = sorted(p for p in data_dir.glob("*.jsonl"))
    store = {
        "matches": {m.match_id: len(m.events) for m in records},
        "files": {p.name: _hash_file(p) for p in files},
        "events": n_events,
        "players": len(players),
        "strict": strict,
    }
    out_path.write_text(json.dumps(store, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    click.echo(f"matches: {len(records)}")
    click.echo(f"events: {n_events}")
    click.echo(f"players: {len(players)}")
    for league in sorted(by_league):
        click.echo(f"league {league}: {by_league[league]} matches")


@cli.command()
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--registry", "registry_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="Statistic registry JSON (default: shipped).")
@click.option("--combos", "combos_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="Key-feature spec JSON (default: shipped).")
@click.option("--min-minutes", type=float, default=900.0, show_default=True)
@click.option("--per-competition", is_flag=True,
              help="Standardize the inspection key features within each competition.")
@click.option("--strict", is_flag=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
def features(data_dir: Path, registry_path, combos_path, min_minutes, per_competition,
             strict, out_path: Path):
    """Build the per-player feature matrix CSV from a dataset directory."""
    registry = load_registry(registry_path)
    combos = load_combos(combos_path)
    records = load_dataset(data_dir, strict=strict)
    table = build_feature_table(
        records, registry, combos, min_minutes, by_competition=per_competition
    )
    inputs = sorted(data_dir.glob("*.jsonl")) + [data_dir / "matches.meta.json"]
    if registry_path:
        inputs.append(Path(registry_path))
    if combos_path:
        inputs.append(Path(combos_path))
    manifest_id = _write_manifest(
        out_path.parent if out_path.parent != Path("") else Path("."),
        "features",
        {"min_minutes": min_minutes, "per_competition": per_competition, "strict": strict},
        inputs,
        None,
    )
    table.full.to_csv(out_path, comments=[f"manifest: {manifest_id}"])
    c = table.counts
    click.echo(
        f"columns: base={c['base']} normalized={c['normalized']} "
        f"team={c['team']} key={c['key']}"
    )
    click.echo(f"players: {c['players']}")
    click.echo(f"wrote {out_path}")


@cli.command()
@click.argument("features_csv", type=click.Path(exists=True, path_type=Path))
@click.option("--labels", "labels_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--graph", "graph_path", type=click.Path(exists=True, path_type=Path), default=None,
              help="Role graph JSON (default: shipped 21-role graph).")
@click.option("--combos", "combos_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--alpha-grid", default=",".join(str(a) for a in DEFAULT_ALPHA_GRID), show_default=True)
@click.option("--beta-grid", default=",".join(str(b) for b in DEFAULT_BETA_GRID), show_default=True)
@click.option("--folds", type=int, default=10, show_default=True)
@click.option("--epochs", type=int, default=100, show_default=True)
@click.option("--eta0", type=float, default=0.5, show_default=True)
@click.option("--smote-neighbors", type=int, default=5, show_default=True)
@click.option("--connected-fraction", type=float, default=0.25, show_default=True)
@click.option("--range-fit", type=click.Choice(["positives", "all"]), default="positives",
              show_default=True, help="Fit optimal ranges on positives only or on all labeled rows.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Parallel workers for final fits.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), required=True,
              help="Directory for bundle.json, grid_report.{csv,txt}, train_report.json.")
def train(features_csv: Path, labels_path: Path, graph_path, combos_path, alpha_grid,
          beta_grid, folds, epochs, eta0, smote_neighbors, connected_fraction,
          range_fit, jobs, seed, out_dir: Path):
    """Grid-search (alpha, beta), train per-role models, write bundle and reports."""
    fm = FeatureMatrix.from_csv(features_csv)
    labels = load_labels(labels_path)
    graph = load_role_graph(graph_path)
    combos = load_combos(combos_path)
    config = PipelineConfig(
        training=TrainingConfig(
            folds=folds, epochs=epochs, eta0=eta0,
            smote_neighbors=smote_neighbors, seed=seed,
        ),
        alpha_grid=_parse_grid(alpha_grid, "alpha"),
        beta_grid=_parse_grid(beta_grid, "beta"),
        connected_fraction=connected_fraction,
        range_fit_on=range_fit,
        jobs=jobs,
    )

    base = fm.select(base_model_columns(fm.columns))
    if not base.columns:
        raise ValidationError("features CSV has no model-input columns")
    bundle, report = train_from_features(base, labels, graph, combos, config)

    inputs = [features_csv, labels_path]
    for p in (graph_path, combos_path):
        if p:
            inputs.append(Path(p))
    manifest_id = _write_manifest(
        out_dir,
        "train",
        {
            "alpha_grid": list(config.alpha_grid),
            "beta_grid": list(config.beta_grid),
            "folds": folds, "epochs": epochs, "eta0": eta0,
            "smote_neighbors": smote_neighbors,
            "connected_fraction": connected_fraction,
            "range_fit": range_fit,
        },
        inputs,
        seed,
    )
    bundle = type(bundle)(**{**bundle.__dict__, "manifest_id": manifest_id})

    out_dir.mkdir(parents=True, exist_ok=True)
    save_bundle(bundle, out_dir / "bundle.json")
    (out_dir / "grid_report.csv").write_text(
        grid_report_csv(report, comments=[f"manifest: {manifest_id}"]), encoding="utf-8"
    )
    (out_dir / "grid_report.txt").write_text(grid_report_text(report), encoding="utf-8")
    (out_dir / "train_report.json").write_text(report.to_json(), encoding="utf-8")

    click.echo(f"chosen alpha={report.best_alpha} beta={report.best_beta} "
               f"(weighted logistic loss {report.best_loss:.4f})")
    click.echo(f"trained {len(bundle.models)} roles; "
               f"{len(bundle.untrained)} untrained")
    click.echo(f"wrote {out_dir / 'bundle.json'}")


@cli.command()
@click.argument("bundle_path", type=click.Path(exists=True, path_type=Path))
@click.argument("features_csv", type=click.Path(exists=True, path_type=Path))
@click.option("--role", required=True)
@click.option("--top", "top_k", type=int, default=10, show_default=True)
@click.option("--filter", "labeled_filter", type=click.Choice(["all", "labeled", "unlabeled", "mixed"]),
              default="all", show_default=True,
              help="'mixed' lists the top labeled player then the top unlabeled ones.")
@click.option("--labels", "labels_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "csv"]), default="text", show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write the table here instead of stdout.")
def rank(bundle_path: Path, features_csv: Path, role: str, top_k: int,
         labeled_filter: str, labels_path, fmt: str, out_path):
    """Rank players by a role's probability."""
    bundle = load_bundle(bundle_path)
    if role not in bundle.models:
        reason = bundle.untrained.get(role)
        raise ValidationError(
            f"role '{role}' is untrained" + (f" ({reason})" if reason else "")
        )
    fm = FeatureMatrix.from_csv(features_csv)
    labels = load_labels(labels_path) if labels_path else None
    scores = score_players(bundle, fm)

    if labeled_filter == "mixed":
        table = rank_players(scores, role, 1, "labeled", labels)
        table += rank_players(scores, role, max(top_k - len(table), 0), "unlabeled", labels)
    else:
        table = rank_players(scores, role, top_k, labeled_filter, labels)

    rendered = ranking_csv(table, role) if fmt == "csv" else ranking_text(table, role)
    if out_path:
        Path(out_path).write_text(rendered, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(rendered, nl=False)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return 2
    except RolescoutError as exc:
        click.echo(f"internal error: {exc}", err=True)
        return 3
    except Exception as exc:  # pragma: no cover - last-resort guard
        click.echo(f"internal error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
