import csv
import json

import numpy as np
import pytest

from spectral_bench import dataset, discriminant, pls, serialize
from spectral_bench.cli import main
from spectral_bench.pipeline import parse_benchmark_text


def run(*argv):
    return main([str(a) for a in argv])


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run("synth", "--per-class", 15, "--count", 60, "--step", 10, "--seed", 3, "--out", d / "all.csv") == 0
    assert run("split", "--input", d / "all.csv", "--train-fraction", 0.7, "--seed", 1,
               "--train-out", d / "train.csv", "--test-out", d / "test.csv") == 0
    return d


def test_split_counts(work, capsys):
    run("split", "--input", work / "all.csv", "--train-fraction", 0.7, "--seed", 1,
        "--train-out", work / "t1.csv", "--test-out", work / "t2.csv")
    out = json.loads(capsys.readouterr().out)
    assert out["train"] == 30 and out["test"] == 15
    assert out["per_class"]["class1"] == {"train": 10, "test": 5}
    assert (work / "t1.csv").read_bytes() == (work / "train.csv").read_bytes()


def test_unbalanced_split(tmp_path, capsys):
    data = dataset.synth_spectra(n_classes=2, per_class=[10, 7], grid=dataset.WavelengthGrid(1, 1, 3))
    dataset.write_csv(data, tmp_path / "u.csv")
    run("split", "--input", tmp_path / "u.csv", "--train-fraction", 0.7,
        "--train-out", tmp_path / "a.csv", "--test-out", tmp_path / "b.csv")
    out = json.loads(capsys.readouterr().out)
    assert out["per_class"] == {"class1": {"train": 7, "test": 3}, "class2": {"train": 4, "test": 3}}


def test_train_plsda_auto(work, capsys):
    assert run("train", "--model", "plsda", "--train", work / "train.csv", "--out", work / "pls.json") == 0
    summary = json.loads(capsys.readouterr().out)
    assert [p for p, _ in summary["scree"]] == list(range(2, 11))
    chis = dict(summary["scree"])
    assert chis[summary["components"]] == max(chis.values())


def test_train_lda_fails_on_wide_data(tmp_path, capsys):
    data = dataset.synth_spectra(n_classes=2, per_class=10, grid=dataset.WavelengthGrid(1, 1, 100))
    dataset.write_csv(data, tmp_path / "w.csv")
    assert run("train", "--model", "lda", "--train", tmp_path / "w.csv", "--out", tmp_path / "m.json") == 1
    assert "SingularWithinScatter" in capsys.readouterr().err
    assert not (tmp_path / "m.json").exists()


def test_train_slda_auto_matches_select_gamma(work, capsys):
    assert run("train", "--model", "slda", "--gamma", "auto", "--train", work / "train.csv", "--out", work / "s.json") == 0
    summary = json.loads(capsys.readouterr().out)
    data = dataset.load_csv(work / "train.csv")
    gamma, accuracy = discriminant.select_gamma(data.spectra, data.labels)
    assert summary["gamma"] == gamma and summary["loo_accuracy"] == accuracy
    model, _ = serialize.load_model(work / "s.json")
    assert model.gamma == gamma


def test_train_config_file(work, tmp_path, capsys):
    cfg = tmp_path / "bench.ini"
    cfg.write_text("[knn]\nk = 5\n[plsda]\ncomponents = 3\n")
    run("train", "--model", "knn", "--train", work / "train.csv", "--out", tmp_path / "k.json", "--config", cfg)
    assert json.loads(capsys.readouterr().out)["k"] == 5
    run("train", "--model", "knn", "--k", 1, "--train", work / "train.csv", "--out", tmp_path / "k.json", "--config", cfg)
    assert json.loads(capsys.readouterr().out)["k"] == 1


def test_bad_config_section(work, tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[forest]\ntrees = 3\n")
    assert run("benchmark", "--train", work / "train.csv", "--test", work / "test.csv", "--config", cfg) == 1
    assert "InvalidConfig" in capsys.readouterr().err


def test_evaluate_report(work, tmp_path, capsys):
    # 1-NN scored on its own training rows is a perfect predictor
    run("train", "--model", "knn", "--k", 1, "--train", work / "train.csv", "--out", tmp_path / "d.json")
    capsys.readouterr()
    assert run("evaluate", "--model", tmp_path / "d.json", "--data", work / "train.csv", "--out", tmp_path / "r.json") == 0
    text = capsys.readouterr().out.splitlines()
    assert text[0].split() == ["MODEL", "MIS", "ARI", "CHI2"]
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["mis"] == 0.0 and report["ari"] == 1.0
    assert np.trace(report["confusion"]) == 30


def test_export_plsda(work, tmp_path):
    model, grid = serialize.load_model(work / "pls.json")
    run("export", "--what", "scores", "--model", work / "pls.json", "--data", work / "train.csv", "--out", tmp_path / "s.csv")
    rows = read_rows(tmp_path / "s.csv")
    assert rows[0][-2:] == ["real_label", "predicted_label"]
    scores = np.array([[float(v) for v in r[:2]] for r in rows[1:]])
    np.testing.assert_allclose(scores, model.scores[:, :2], atol=1e-10)

    run("export", "--what", "loadings", "--model", work / "pls.json", "--out", tmp_path / "l.csv")
    rows = read_rows(tmp_path / "l.csv")
    p = model.n_components
    assert len(rows) == 1 + grid.count and len(rows[0]) == 1 + 2 * p
    assert float(rows[1][1 + p]) == pytest.approx(float(rows[1][1]) ** 2)

    run("export", "--what", "variance", "--model", work / "pls.json", "--out", tmp_path / "v.csv")
    rows = read_rows(tmp_path / "v.csv")
    assert [r[0] for r in rows[1:]] == ["explained", "cumulative"]
    per, cum = np.array(rows[1][1:], float), np.array(rows[2][1:], float)
    np.testing.assert_allclose(np.cumsum(per), cum)

    run("export", "--what", "scree", "--model", work / "pls.json", "--out", tmp_path / "c.csv")
    assert read_rows(tmp_path / "c.csv")[0] == ["components", "chi2"]


def test_export_spectra(work, tmp_path):
    run("export", "--what", "spectra", "--data", work / "test.csv", "--out", tmp_path / "x.csv")
    rows = read_rows(tmp_path / "x.csv")
    assert len(rows) == 61 and len(rows[0]) == 16


def test_export_incompatible(work, tmp_path, capsys):
    run("train", "--model", "knn", "--train", work / "train.csv", "--out", tmp_path / "k.json")
    assert run("export", "--what", "loadings", "--model", tmp_path / "k.json", "--out", tmp_path / "o.csv") == 1
    assert "IncompatibleExport" in capsys.readouterr().err


def test_benchmark_text_and_json_agree(work, tmp_path, capsys):
    assert run("benchmark", "--train", work / "train.csv", "--test", work / "test.csv",
               "--out", tmp_path / "b.json", "--text-out", tmp_path / "b.txt") == 0
    text = (tmp_path / "b.txt").read_text()
    assert capsys.readouterr().out == text
    parsed = parse_benchmark_text(text)
    result = json.loads((tmp_path / "b.json").read_text())
    for row in result["rows"]:
        if row["status"] != "ok":
            assert parsed[row["model"]] == f"FAILED({row['reason']})"
            continue
        expected = [row[s][k] for s in ("train", "test") for k in ("mis", "ari", "chi2")]
        np.testing.assert_allclose(parsed[row["model"]], expected, atol=5e-4)


def test_benchmark_lda_fails_others_intact(work, tmp_path, capsys):
    run("benchmark", "--train", work / "train.csv", "--test", work / "test.csv", "--out", tmp_path / "b.json")
    rows = json.loads((tmp_path / "b.json").read_text())["rows"]
    status = {r["model"]: r["status"] for r in rows}
    assert status.pop("LDA") == "FAILED"
    assert set(status.values()) == {"ok"} and len(status) == 6


def test_missing_file(tmp_path, capsys):
    assert run("evaluate", "--model", tmp_path / "none.json", "--data", tmp_path / "none.csv") == 1
    assert "error" in capsys.readouterr().err


def test_scores_from_model_internals(work):
    data = dataset.load_csv(work / "train.csv")
    model, _ = serialize.load_model(work / "pls.json")
    np.testing.assert_allclose(pls.transform(model, data.spectra), model.scores, atol=1e-10)
