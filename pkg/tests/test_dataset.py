import numpy as np
import pytest

from spectral_bench import dataset
from spectral_bench.dataset import LabeledDataset, WavelengthGrid
from spectral_bench.errors import MissingLabelColumn, ParseError


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_small_file(tmp_path):
    p = write(tmp_path / "d.csv", "label,w1100,w1102\na,1,2\nb,3,4\nc,5,6\na,7,8\n")
    data = dataset.load_csv(p)
    assert data.n_samples == 4 and data.n_classes == 3
    assert data.class_names == ("a", "b", "c")
    assert data.labels.tolist() == [1, 2, 3, 1]
    assert data.grid == WavelengthGrid(1100.0, 2.0, 2)


def test_parse_error_names_row_and_column(tmp_path):
    p = write(tmp_path / "d.csv", "label,w1100,w1102\na,1,2\nb,3,oops\n")
    with pytest.raises(ParseError) as info:
        dataset.load_csv(p)
    assert info.value.row == 3 and info.value.col == "w1102"


def test_missing_label_column(tmp_path):
    p = write(tmp_path / "d.csv", "class,w1\na,1\n")
    with pytest.raises(MissingLabelColumn):
        dataset.load_csv(p)
    assert dataset.load_csv(p, label_column="class").n_samples == 1


def test_round_trip(tmp_path):
    data = dataset.synth_spectra(per_class=5, grid=WavelengthGrid(1100, 2, 30), seed=3)
    dataset.write_csv(data, tmp_path / "a.csv")
    again = dataset.load_csv(tmp_path / "a.csv")
    dataset.write_csv(again, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert again.class_names == data.class_names
    assert np.array_equal(again.labels, data.labels)
    np.testing.assert_allclose(again.spectra, data.spectra, rtol=1e-8)


def test_split_162_rows():
    data = dataset.synth_spectra(per_class=54, seed=1)
    split = dataset.balanced_split(data, 37 / 54, seed=42)
    assert split.train_indices.size == 111 and split.test_indices.size == 51
    assert data.subset(split.train_indices).class_counts().tolist() == [37, 37, 37]
    assert data.subset(split.test_indices).class_counts().tolist() == [17, 17, 17]
    assert np.intersect1d(split.train_indices, split.test_indices).size == 0


def test_split_two_per_class():
    data = LabeledDataset(np.arange(8.0).reshape(4, 2), [1, 1, 2, 2], ("a", "b"), WavelengthGrid(1, 1, 2))
    split = dataset.balanced_split(data, 0.5, seed=0)
    assert data.subset(split.train_indices).class_counts().tolist() == [1, 1]
    assert data.subset(split.test_indices).class_counts().tolist() == [1, 1]


def test_split_unbalanced_floors():
    labels = [1] * 10 + [2] * 7
    data = LabeledDataset(np.zeros((17, 1)), labels, ("a", "b"), WavelengthGrid(1, 1, 1))
    split = dataset.balanced_split(data, 0.7, seed=5)
    assert data.subset(split.train_indices).class_counts().tolist() == [7, 4]


def test_split_deterministic():
    data = dataset.synth_spectra(per_class=20, grid=WavelengthGrid(1, 1, 5), seed=0)
    a = dataset.balanced_split(data, 0.7, seed=9)
    b = dataset.balanced_split(data, 0.7, seed=9)
    assert np.array_equal(a.train_indices, b.train_indices)
    assert np.array_equal(a.test_indices, b.test_indices)


def test_center(rng):
    x = rng.standard_normal((10, 4))
    x[:, 2] = 3.0
    xc, mean = dataset.center(x)
    assert np.all(xc[:, 2] == 0.0)
    np.testing.assert_allclose(xc.mean(axis=0), 0.0, atol=1e-15)
    again, mean2 = dataset.center(xc)
    np.testing.assert_allclose(again, xc, atol=1e-12)
    np.testing.assert_allclose(mean2, 0.0, atol=1e-12)
    test = rng.standard_normal((6, 4)) + 1.0
    assert np.all(np.abs((test - mean).mean(axis=0)[[0, 1, 3]]) > 0)


def test_autoscale(rng):
    x = rng.standard_normal((30, 3)) * [1.0, 5.0, 0.1]
    z, _, std = dataset.autoscale(x)
    np.testing.assert_allclose(z.std(axis=0, ddof=1), 1.0)
    np.testing.assert_allclose(std, x.std(axis=0, ddof=1))


def test_synth_shape_and_smoothness():
    data = dataset.synth_spectra(seed=42)
    assert data.spectra.shape == (162, 601)
    assert data.class_counts().tolist() == [54, 54, 54]
    x = data.spectra
    corr = [np.corrcoef(x[:, j], x[:, j + 1])[0, 1] for j in range(0, 600, 10)]
    assert min(corr) > 0.9


def test_synth_noise_free_rows_identical():
    data = dataset.synth_spectra(per_class=4, noise=0.0, seed=0)
    for k in range(1, 4):
        rows = data.spectra[data.labels == k]
        assert np.all(rows == rows[0])


def test_synth_rank_deficient():
    data = dataset.synth_spectra(per_class=10, seed=0)
    xc, _ = dataset.center(data.spectra)
    assert np.linalg.matrix_rank(xc) <= data.n_samples - 1


def test_dataset_is_read_only():
    data = dataset.synth_spectra(per_class=3, grid=WavelengthGrid(1, 1, 4))
    with pytest.raises(ValueError):
        data.spectra[0, 0] = 1.0
