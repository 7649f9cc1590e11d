import os
import warnings

import numpy as np
import pytest

from ppfl.crypto import seeded_rng
from ppfl.data import (
    Dataset,
    EmptyShardWarning,
    dirichlet_partition,
    generate_synthetic,
    load_csv_dataset,
    train_test_split,
)
from ppfl.errors import ParseError
from ppfl.model import ModelSpec, loss_and_gradient, make_optimizer, optimizer_step, predict

HERE = os.path.dirname(__file__)


def test_synthetic_is_deterministic():
    a = generate_synthetic(200, 5, 3, seed=11)
    b = generate_synthetic(200, 5, 3, seed=11)
    assert np.array_equal(a.features, b.features) and np.array_equal(a.labels, b.labels)
    c = generate_synthetic(200, 5, 3, seed=12)
    assert not np.array_equal(a.features, c.features)


def test_synthetic_covers_all_classes():
    for seed in range(20):
        data = generate_synthetic(50 * 10, 4, 10, seed=seed)
        assert set(np.unique(data.labels)) == set(range(10))


def test_synthetic_is_learnable_centrally():
    data = generate_synthetic(3000, 20, 10, seed=5)
    train, test = train_test_split(data, 0.2, seeded_rng(5, 1))
    spec = ModelSpec("logistic", 20, 10)
    params = np.zeros(spec.num_params)
    state = make_optimizer("adam", 0.01, spec.num_params)
    rng = np.random.default_rng(0)
    for _ in range(10):
        for idx in np.array_split(rng.permutation(len(train)), len(train) // 32):
            _, g = loss_and_gradient(spec, params, train.features[idx], train.labels[idx])
            params = optimizer_step(state, params, g)
    acc = np.mean(predict(spec, params, test.features) == test.labels)
    assert acc >= 0.90


def test_load_csv_fixture():
    data = load_csv_dataset(os.path.join(HERE, "data", "tiny.csv"))
    assert len(data) == 10
    assert data.features.shape == (10, 4)
    assert data.labels[0] == 3
    assert data.features[0, 0] == 0.0 and data.features[0, 1] == 1.0
    assert data.features[0, 2] == pytest.approx(0.2)
    assert data.num_classes == 10


def test_load_csv_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ParseError):
        load_csv_dataset(empty)

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,2,3\n1,2\n")
    with pytest.raises(ParseError, match="row 2"):
        load_csv_dataset(ragged)

    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,3\n0,1,2\n2,x,4\n")
    with pytest.raises(ParseError, match="row 3"):
        load_csv_dataset(bad)


def test_dataset_invariants():
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 2)), [0, 1], 2)
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 2)), [0, 2], 2)


def _rows(data):
    return sorted(tuple(r) + (l,) for r, l in zip(data.features.tolist(), data.labels.tolist()))


@pytest.mark.parametrize("alpha", [0.05, 0.5, 5.0])
def test_partition_conserves_examples(alpha):
    data = generate_synthetic(500, 3, 5, seed=1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyShardWarning)
        shards = dirichlet_partition(data, 7, alpha, seed=2)
    assert sum(len(s) for s in shards) == len(data)
    merged = Dataset(
        np.concatenate([s.features for s in shards]),
        np.concatenate([s.labels for s in shards]),
        data.num_classes,
    )
    assert _rows(merged) == _rows(data)


def test_partition_single_client_is_identity():
    data = generate_synthetic(100, 3, 4, seed=1)
    (only,) = dirichlet_partition(data, 1, 0.5, seed=0)
    assert np.array_equal(only.features, data.features)
    assert np.array_equal(only.labels, data.labels)


def test_partition_large_alpha_matches_global_proportions():
    for seed in range(5):
        data = generate_synthetic(5000, 3, 5, seed=seed)
        global_props = data.class_counts() / len(data)
        for shard in dirichlet_partition(data, 5, 1e6, seed=seed):
            props = shard.class_counts() / len(shard)
            assert np.max(np.abs(props - global_props)) <= 0.05


def test_partition_is_deterministic_and_flags_empty_shards():
    data = generate_synthetic(60, 3, 3, seed=0)
    with pytest.warns(EmptyShardWarning):
        a = dirichlet_partition(data, 30, 0.01, seed=4)
    with pytest.warns(EmptyShardWarning):
        b = dirichlet_partition(data, 30, 0.01, seed=4)
    assert all(np.array_equal(x.labels, y.labels) for x, y in zip(a, b))


def test_small_alpha_skews_shards():
    data = generate_synthetic(2000, 3, 10, seed=0)
    shards = dirichlet_partition(data, 10, 0.1, seed=0)
    dominant = [s.class_counts().max() / len(s) for s in shards if len(s)]
    assert np.mean(dominant) > 0.5
