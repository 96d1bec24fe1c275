"""Songwriter attribution from symbolic music encodings.

Thin wrapper around the compiled extension. The heavy lifting (feature
extraction, screening, elastic-net fitting, nested cross-validation) happens
in C++; see the project README for the corpus format and the CLI.
"""

from ._core import (
    Corpus,
    auc,
    catalog,
    extract_features,
    feature_matrix,
    fit,
    importance,
    loo,
    parse_corpus,
    predict,
    screen,
    serialize_corpus,
    validate,
    __version__,
)


def parse_corpus_file(path):
    """Parse a corpus JSON document from a file path."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_corpus(fh.read())


__all__ = [
    "Corpus",
    "auc",
    "catalog",
    "extract_features",
    "feature_matrix",
    "fit",
    "importance",
    "loo",
    "parse_corpus",
    "parse_corpus_file",
    "predict",
    "screen",
    "serialize_corpus",
    "validate",
    "__version__",
]
