"""Shared fixtures: planted corpora with known structure and tiny file helpers."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from topictree.corpus import CorpusMatrix, build_tfidf, build_vocabulary

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"
MINICORPUS = DATA / "minicorpus.jsonl"
MINI_EMBEDDINGS = DATA / "mini_embeddings.txt"
MINI_TRUTH = DATA / "minicorpus_truth.json"


def disjoint_topic_docs(
    seed: int = 0,
    topics: int = 3,
    words_per_topic: int = 50,
    docs_per_topic: int = 100,
    tokens_per_doc: int = 40,
) -> list[tuple[str, list[str]]]:
    """Documents drawing tokens from fully disjoint per-topic vocabularies."""
    rng = np.random.default_rng(seed)
    docs = []
    for t in range(topics):
        vocab = [f"t{t}w{i:03d}" for i in range(words_per_topic)]
        for d in range(docs_per_topic):
            docs.append((f"doc{t}-{d}", list(rng.choice(vocab, tokens_per_doc))))
    return docs


def planted_hierarchy_docs(
    seed: int = 123,
    supers: int = 4,
    subs: int = 3,
    docs_per: int = 25,
    common_words: int = 20,
    specific_words: int = 20,
    tokens_per_doc: int = 60,
    common_frac: float = 0.45,
) -> tuple[list[tuple[str, list[str]]], dict[str, tuple[int, int]]]:
    """Two-level structure: per-supergroup shared vocabulary plus disjoint
    per-subgroup vocabulary; returns (docs, doc_id -> (super, sub))."""
    rng = np.random.default_rng(seed)
    docs, truth = [], {}
    for g in range(supers):
        shared = [f"g{g}w{i}" for i in range(common_words)]
        for s in range(subs):
            spec = [f"g{g}s{s}w{i}" for i in range(specific_words)]
            for d in range(docs_per):
                doc_id = f"doc{g}-{s}-{d}"
                n_shared = rng.binomial(tokens_per_doc, common_frac)
                toks = list(rng.choice(shared, n_shared)) + list(
                    rng.choice(spec, tokens_per_doc - n_shared)
                )
                docs.append((doc_id, toks))
                truth[doc_id] = (g, s)
    return docs, truth


def matrix_from_docs(docs, min_df: int = 2, max_df_ratio: float = 1.0) -> CorpusMatrix:
    vocab = build_vocabulary([t for _, t in docs], min_df=min_df, max_df_ratio=max_df_ratio)
    return build_tfidf(docs, vocab)


@pytest.fixture
def corpus_file(tmp_path):
    """Write records (dicts) to a line-delimited corpus file."""

    def write(records, name="corpus.jsonl") -> Path:
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
        return path

    return write


def record(doc_id: str, body: str = "full text body", abstract: str = "an abstract",
           title: str = "", language: str = "en", source: str = "unit") -> dict:
    return {"id": doc_id, "title": title, "abstract": abstract, "body": body,
            "source": source, "language": language}
