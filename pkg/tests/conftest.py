import warnings

import pytest

from rolescout import features, pipeline, roles, synth
from rolescout.learning import TrainingConfig

SMALL_SEED = 73


@pytest.fixture(scope="session")
def registry():
    return features.load_registry()


@pytest.fixture(scope="session")
def combos():
    return features.load_combos()


@pytest.fixture(scope="session")
def graph():
    return roles.load_role_graph()


@pytest.fixture(scope="session")
def small_spec():
    return synth.LeagueSpec(
        teams=4,
        players_per_team=14,
        matches_per_team=10,
        label_fraction=0.5,
        noise_level=0.15,
        seed=SMALL_SEED,
    )


@pytest.fixture(scope="session")
def small_league(small_spec):
    return synth.generate_league(small_spec)


@pytest.fixture(scope="session")
def small_table(small_league, registry, combos):
    matches, _ = small_league
    return features.build_feature_table(matches, registry, combos, min_minutes=900)


@pytest.fixture(scope="session")
def small_labels(small_league, small_spec):
    _, truth = small_league
    return synth.sample_labels(truth, small_spec.label_fraction, small_spec.seed)


@pytest.fixture(scope="session")
def small_run(small_table, small_labels, graph, combos):
    """One trained bundle + report on the small league, shared by tests."""
    config = pipeline.PipelineConfig(
        training=TrainingConfig(folds=5, seed=SMALL_SEED),
        alpha_grid=(0.5, 0.05, 0.005),
        beta_grid=(0.25,),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bundle, report = pipeline.train_from_features(
            small_table.base, small_labels, graph, combos, config
        )
    return bundle, report, config
