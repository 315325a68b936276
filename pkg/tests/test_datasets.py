import numpy as np
import pytest

from spiralmfo.datasets import (
    Dataset,
    Provenance,
    SplitSpec,
    augment,
    load_dataset_csv,
    load_sonar_csv,
    split,
    synth_multiclass,
    write_dataset_csv,
)
from spiralmfo.exceptions import ParseError, SchemaError, SizeError


@pytest.fixture(scope="module")
def sonar():
    return load_sonar_csv()


def test_bundled_sonar_shape(sonar):
    assert sonar.features.shape == (208, 60)
    assert sonar.class_counts() == {"cylinder": 111, "rock": 97}
    assert sonar.provenance is Provenance.GORMAN_SEJNOWSKI
    assert np.all((sonar.features >= 0) & (sonar.features <= 1))


def _row(label="R", n=60):
    return ",".join(["0.5"] * n + [label])


def test_empty_file_is_schema_error(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(SchemaError):
        load_sonar_csv(path)


def test_malformed_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(_row() + "\n" + _row("X") + "\n")
    with pytest.raises(ParseError, match="line 2"):
        load_sonar_csv(path, strict=False)
    path.write_text(_row() + "\n" + _row().replace("0.5", "abc", 1) + "\n")
    with pytest.raises(ParseError, match="line 2"):
        load_sonar_csv(path, strict=False)
    path.write_text(_row(n=59) + "\n")
    with pytest.raises(SchemaError):
        load_sonar_csv(path, strict=False)


def test_strict_count_check(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text(_row("M") + "\n" + _row("R") + "\n")
    with pytest.raises(SchemaError):
        load_sonar_csv(path)
    ds = load_sonar_csv(path, strict=False)
    assert ds.labels.tolist() == [0, 1]


def test_split_sizes_disjoint_and_stratified(sonar):
    train, test = split(sonar, SplitSpec(150, 58, seed=0))
    assert len(train) == 150 and len(test) == 58
    rows = {tuple(r) for r in train.features}
    # sonar rows are all distinct, so set sizes expose any overlap
    all_rows = {tuple(r) for r in sonar.features}
    assert len(all_rows) == 208
    assert not rows & {tuple(r) for r in test.features}
    for part, size in ((train, 150), (test, 58)):
        counts = np.bincount(part.labels, minlength=2)
        expected = size * np.array([111, 97]) / 208
        assert np.all(np.abs(counts - expected) <= 1)


def test_split_deterministic_and_edge_cases(sonar):
    a = split(sonar, SplitSpec(150, 58, seed=7))
    b = split(sonar, SplitSpec(150, 58, seed=7))
    assert np.array_equal(a[0].features, b[0].features)
    train, test = split(sonar, SplitSpec(208, 0))
    assert len(train) == 208 and len(test) == 0
    with pytest.raises(SizeError):
        split(sonar, SplitSpec(200, 9))


def test_unstratified_split(sonar):
    train, test = split(sonar, SplitSpec(100, 50, seed=1, stratified=False))
    assert len(train) == 100 and len(test) == 50


def test_augment_counts_and_identity(sonar):
    train, test = split(sonar, SplitSpec(150, 58))
    assert augment(train, 1) is train
    big = augment(train, 8, seed=3)
    assert len(big) == 1200
    assert len(augment(test, 8)) == 464
    assert np.array_equal(big.features[:150], train.features)
    assert np.array_equal(big.labels, np.tile(train.labels, 8))
    assert np.all((big.features >= 0) & (big.features <= 1))
    noisy = big.features[150:] - np.tile(train.features, (7, 1))
    assert 0.01 < noisy.std() < 0.03
    assert np.array_equal(big.features, augment(train, 8, seed=3).features)


def test_synthetic_generator():
    ds = synth_multiclass(7, 30, 5, 4.0, seed=1)
    assert len(ds) == 210 and ds.n_classes == 7
    assert np.bincount(ds.labels).tolist() == [30] * 7
    again = synth_multiclass(7, 30, 5, 4.0, seed=1)
    assert np.array_equal(ds.features, again.features)
    assert synth_multiclass(6, 3, 2, 1.0).n_classes == 6


def test_synthetic_zero_separation_is_chance_level():
    """Nearest-centroid on held-out data scores about 100/classes."""
    ds = synth_multiclass(4, 2000, 3, 0.0, seed=5)
    train, test = split(ds, SplitSpec(4000, 4000, seed=0))
    centroids = np.stack([train.features[train.labels == c].mean(0) for c in range(4)])
    dist = ((test.features[:, None, :] - centroids[None]) ** 2).sum(-1)
    rate = 100 * np.mean(dist.argmin(1) == test.labels)
    assert abs(rate - 25.0) < 3.0


def test_csv_round_trips(tmp_path, sonar):
    path = write_dataset_csv(tmp_path / "sonar.csv", sonar)
    again = load_sonar_csv(path)
    assert np.array_equal(again.features, sonar.features)
    assert np.array_equal(again.labels, sonar.labels)
    syn = synth_multiclass(3, 4, 2, 1.0)
    path = write_dataset_csv(tmp_path / "syn.csv", syn)
    back = load_dataset_csv(path)
    assert np.array_equal(back.labels, syn.labels)
    assert np.array_equal(back.features, syn.features)


def test_dataset_rejects_bad_values():
    with pytest.raises(SchemaError):
        Dataset(np.array([[np.nan]]), [0], ["a"], Provenance.SYNTHETIC)
    with pytest.raises(SchemaError):
        Dataset(np.zeros((2, 1)), [0, 3], ["a", "b"], Provenance.SYNTHETIC)
