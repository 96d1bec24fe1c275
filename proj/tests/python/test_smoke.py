"""Smoke tests for the Python bindings."""

import json

import pytest

songprint = pytest.importorskip("songprint")

CORPUS = json.dumps(
    {
        "songs": [
            {
                "id": "a",
                "title": "A",
                "author": "LENNON",
                "segments": [
                    {
                        "key": {"tonic": "C", "mode": "major"},
                        "chords": ["C", "G7", "Am"],
                        "phrases": [["C4", "D4", "E4", "G4"], ["E4", "D4", "C4"]],
                    }
                ],
            },
            {
                "id": "b",
                "title": "B",
                "author": "MCCARTNEY",
                "segments": [
                    {
                        "key": {"tonic": "A", "mode": "minor"},
                        "chords": ["Am", "F", "G", "C"],
                        "phrases": [["A4", "C5", "Bb4", "A4"]],
                    }
                ],
            },
            {
                "id": "c",
                "title": "C",
                "author": "DISPUTED",
                "segments": [
                    {
                        "key": {"tonic": "C", "mode": "major"},
                        "chords": ["C", "F"],
                        "phrases": [["E4", "F4", "G4"]],
                    }
                ],
            },
        ]
    }
)


def test_parse_and_validate():
    corpus = songprint.parse_corpus(CORPUS)
    assert len(corpus) == 3
    assert corpus.song_ids == ["a", "b", "c"]
    diags = songprint.validate(corpus)
    assert all(d["severity"] == "warning" for d in diags)


def test_serialize_round_trip():
    corpus = songprint.parse_corpus(CORPUS)
    text = songprint.serialize_corpus(corpus)
    again = songprint.parse_corpus(text)
    assert songprint.serialize_corpus(again) == text


def test_catalog_shape():
    cat = songprint.catalog()
    assert len(cat) == 147
    families = {}
    for family, code, _ in cat:
        families[family] = families.get(family, 0) + 1
        assert code
    assert families == {
        "CHORD": 9,
        "NOTE": 12,
        "CHORD_TRANSITION": 29,
        "NOTE_TRANSITION": 70,
        "CONTOUR": 27,
    }


def test_extract_features():
    corpus = songprint.parse_corpus(CORPUS)
    feats = songprint.extract_features(corpus, "a")
    assert "CHORD:I" in feats
    assert "CHORD:V" in feats  # G7 collapses to G major
    assert "NOTE:tonic" in feats


def test_feature_matrix_and_screen():
    corpus = songprint.parse_corpus(CORPUS)
    m = songprint.feature_matrix(corpus, min_count=0, max_count=3)
    assert m["song_ids"] == ["a", "b", "c"]
    assert m["labels"] == [0, 1, None]
    assert len(m["features"]) == len(m["cells"][0])
    results = songprint.screen(corpus, threshold=1.0, mc_iterations=200,
                               min_count=0, max_count=3)
    assert all(0 < r["p_value"] <= 1 for r in results)


def test_pipeline_loo_and_predict():
    corpus = songprint.parse_corpus(CORPUS)
    cfg = dict(
        threshold_grid=[1.0],
        alpha_grid=[1.0],
        n_lambda=5,
        mc_iterations=100,
        min_count=0,
        max_count=3,
        seed=7,
    )
    out = songprint.loo(corpus, **cfg)
    assert len(out["records"]) == 2
    for rec in out["records"]:
        assert 0.0 < rec["p_hat"] < 1.0
        assert rec["intercept_only"]  # two songs cannot support 5-fold CV

    reports = songprint.predict(corpus, **cfg)
    assert [r["song_id"] for r in reports] == ["c"]
    rep = reports[0]
    assert 0.0 <= rep["ci_low"] <= rep["ci_high"] <= 1.0
    assert len(rep["loo_prediction_set"]) == 2

    again = songprint.loo(corpus, **cfg)
    assert out == again  # deterministic in the seed


def test_auc():
    assert songprint.auc([0, 0, 1, 1], [0.1, 0.6, 0.6, 0.9]) == pytest.approx(0.875)
