"""Corpus ingestion, token pipeline, vocabulary and TF-IDF matrix construction.

The input corpus is a UTF-8 line-delimited file of JSON records with fields
{id, title, abstract, body, source, language}. Articles surviving the
ingestion filter are tokenized, a document-frequency-pruned vocabulary is
built, and the corpus becomes a sparse nonnegative term-document matrix
with L2-normalized columns.
"""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import InputError
from .stemming import get_normalizer

log = logging.getLogger(__name__)

DEFAULT_DROP_LIST = ("copyright", "et al")
DEFAULT_MIN_DF = 5
DEFAULT_MAX_DF_RATIO = 0.95


@dataclass(frozen=True)
class Document:
    id: str
    title: str = ""
    abstract: str = ""
    body: str = ""
    source: str = ""
    language: str = "en"


@dataclass(frozen=True)
class IngestFilter:
    """Which records make it into the corpus.

    language=None accepts any language tag. Abstract and body must be
    non-empty for a record to pass.
    """

    language: str | None = "en"

    def accepts(self, doc: Document) -> bool:
        if self.language is not None and doc.language != self.language:
            return False
        return bool(doc.abstract.strip()) and bool(doc.body.strip())


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a one-token-per-line stopword file; None loads the bundled English list."""
    if path is None:
        text = resources.files("topictree.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        try:
            text = Path(path).read_text("utf-8")
        except OSError as exc:
            raise InputError(f"cannot read stopword list {path}: {exc}") from exc
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


@dataclass(frozen=True)
class TokenPipelineConfig:
    stopwords: frozenset[str]
    drop_list: tuple[str, ...] = DEFAULT_DROP_LIST
    normalizer: str = "porter"
    min_token_len: int = 2
    lowercase: bool = True
    include_title: bool = True

    def __post_init__(self) -> None:
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")

    @classmethod
    def default(cls, **overrides) -> "TokenPipelineConfig":
        overrides.setdefault("stopwords", load_stopwords())
        return cls(**overrides)


def ingest(path: str | Path, filt: IngestFilter | None = None) -> list[Document]:
    """Read a line-delimited corpus file and return the documents passing the filter.

    Input order is preserved. Malformed records and duplicate ids raise
    InputError naming the offending line.
    """
    filt = filt or IngestFilter()
    try:
        raw = Path(path).read_text("utf-8")
    except OSError as exc:
        raise InputError(f"cannot read corpus file {path}: {exc}") from exc

    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: malformed record: {exc.msg}") from exc
        if not isinstance(rec, dict):
            raise InputError(f"{path}:{lineno}: record is not an object")
        doc_id = rec.get("id")
        if not isinstance(doc_id, str) or not doc_id:
            raise InputError(f"{path}:{lineno}: missing or empty id")
        if doc_id in seen:
            raise InputError(f"{path}:{lineno}: duplicate id {doc_id!r}")
        seen.add(doc_id)
        doc = Document(
            id=doc_id,
            title=str(rec.get("title", "") or ""),
            abstract=str(rec.get("abstract", "") or ""),
            body=str(rec.get("body", "") or ""),
            source=str(rec.get("source", "") or ""),
            language=str(rec.get("language", "") or ""),
        )
        if filt.accepts(doc):
            docs.append(doc)
    return docs


def _drop_phrases(tokens: list[str], phrases: tuple[tuple[str, ...], ...]) -> list[str]:
    """Remove every contiguous token run matching a drop-list entry."""
    if not phrases:
        return tokens
    out: list[str] = []
    i = 0
    while i < len(tokens):
        span = 0
        for ph in phrases:
            end = i + len(ph)
            if end <= len(tokens) and tuple(t.lower() for t in tokens[i:end]) == ph:
                span = len(ph)
                break
        if span:
            i += span
        else:
            out.append(tokens[i])
            i += 1
    return out


def tokenize(doc: Document, cfg: TokenPipelineConfig) -> list[str]:
    """Run the token pipeline over title+abstract+body of one document.

    Lowercase (if configured), strip punctuation (intra-word hyphens
    survive), split, then iterate drop-list and stopword/length filtering to
    a fixed point — dropping a stopword can create a new drop-list
    adjacency — normalize, and filter once more. The output is stable under
    re-tokenization except where the stemmer itself is not idempotent.
    """
    parts = []
    if cfg.include_title and doc.title:
        parts.append(doc.title)
    parts.extend(p for p in (doc.abstract, doc.body) if p)
    text = " ".join(parts)
    if cfg.lowercase:
        text = text.lower()
    keep = r"[^0-9a-z-]+" if cfg.lowercase else r"[^0-9A-Za-z-]+"
    text = re.sub(keep, " ", text)

    phrases = tuple(
        tuple(d.lower().split()) for d in cfg.drop_list if d.strip()
    )
    normalize = get_normalizer(cfg.normalizer)

    def ok(tok: str) -> bool:
        return len(tok) >= cfg.min_token_len and tok not in cfg.stopwords

    def scrub(tokens: list[str]) -> list[str]:
        while True:
            before = tokens
            tokens = [t for t in _drop_phrases(tokens, phrases) if ok(t)]
            if tokens == before:
                return tokens

    tokens = [t for t in (tok.strip("-") for tok in text.split()) if t]
    tokens = scrub(tokens)
    tokens = [normalize(t) if t.isalpha() else t for t in tokens]
    return scrub([t for t in tokens if t])


@dataclass(frozen=True)
class Vocabulary:
    """Token <-> index bijection with per-token document frequencies.

    Indices follow lexicographic token order so that identical corpora
    always produce identical matrices.
    """

    tokens: tuple[str, ...]
    df: np.ndarray
    n_docs: int

    @cached_property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tokens)}

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


def build_vocabulary(
    token_seqs: Iterable[Sequence[str]],
    min_df: int = DEFAULT_MIN_DF,
    max_df_ratio: float = DEFAULT_MAX_DF_RATIO,
) -> Vocabulary:
    """Count document frequencies and retain tokens with min_df <= df <= max_df_ratio * n."""
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if not 0 < max_df_ratio <= 1:
        raise ValueError("max_df_ratio must be in (0, 1]")
    counts: Counter[str] = Counter()
    n = 0
    for tokens in token_seqs:
        n += 1
        counts.update(set(tokens))
    # integer df against a fractional bound: ceil keeps a token whose share
    # only just reaches the cutoff (a 0.4 cutoff over 2 docs allows df=1)
    cutoff = math.ceil(max_df_ratio * n)
    retained = sorted(t for t, c in counts.items() if min_df <= c <= cutoff)
    if not retained:
        raise InputError(
            f"empty vocabulary after df filtering (min_df={min_df}, max_df_ratio={max_df_ratio}, n={n})"
        )
    df = np.array([counts[t] for t in retained], dtype=np.int64)
    return Vocabulary(tokens=tuple(retained), df=df, n_docs=n)


@dataclass(frozen=True)
class CorpusMatrix:
    """Sparse nonnegative term-document matrix with unit-L2 columns.

    Rows are vocabulary terms, columns are documents; `excluded` lists the
    ids of documents dropped because their TF-IDF vector was all zero.
    """

    X: sparse.csc_array
    doc_ids: tuple[str, ...]
    vocab: Vocabulary
    excluded: tuple[str, ...] = ()

    @property
    def d(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @cached_property
    def col_of(self) -> dict[str, int]:
        return {doc_id: j for j, doc_id in enumerate(self.doc_ids)}

    def submatrix(self, doc_ids: Sequence[str]) -> "CorpusMatrix":
        """Column submatrix for the given documents, same vocabulary rows."""
        cols = [self.col_of[i] for i in doc_ids]
        return CorpusMatrix(
            X=self.X[:, cols],
            doc_ids=tuple(doc_ids),
            vocab=self.vocab,
        )

    def column(self, doc_id: str) -> np.ndarray:
        return np.asarray(self.X[:, [self.col_of[doc_id]]].todense()).ravel()


def build_tfidf(
    docs: Sequence[tuple[str, Sequence[str]]],
    vocab: Vocabulary,
) -> CorpusMatrix:
    """Build the TF-IDF matrix from (doc_id, tokens) pairs.

    entry(t, j) = count(t in doc j) * (ln((1+n)/(1+df(t))) + 1), columns
    L2-normalized. Documents with an all-zero vector (no vocabulary tokens)
    are excluded and reported.
    """
    n = len(docs)
    if n == 0:
        raise InputError("no documents to vectorize")
    idf = np.log((1.0 + n) / (1.0 + vocab.df.astype(np.float64))) + 1.0

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    kept_ids: list[str] = []
    excluded: list[str] = []
    for doc_id, tokens in docs:
        counts = Counter(t for t in tokens if t in vocab.index)
        if not counts:
            excluded.append(doc_id)
            continue
        j = len(kept_ids)
        kept_ids.append(doc_id)
        norm = 0.0
        entries = sorted((vocab.index[t], c) for t, c in counts.items())
        col_vals = []
        for r, c in entries:
            v = c * idf[r]
            col_vals.append((r, v))
            norm += v * v
        norm = math.sqrt(norm)
        for r, v in col_vals:
            rows.append(r)
            cols.append(j)
            vals.append(v / norm)

    if not kept_ids:
        raise InputError("all documents excluded: no document contains a vocabulary token")
    if excluded:
        log.warning("excluded %d document(s) with empty TF-IDF vectors: %s",
                    len(excluded), ", ".join(excluded[:10]))

    X = sparse.csc_array(
        (np.asarray(vals, dtype=np.float64), (np.asarray(rows), np.asarray(cols))),
        shape=(vocab.size, len(kept_ids)),
    )
    return CorpusMatrix(X=X, doc_ids=tuple(kept_ids), vocab=vocab, excluded=tuple(excluded))
