"""Hierarchical NMF topic trees for document corpora."""

from .corpus import (
    CorpusMatrix,
    Document,
    IngestFilter,
    TokenPipelineConfig,
    Vocabulary,
    build_tfidf,
    build_vocabulary,
    ingest,
    load_stopwords,
    tokenize,
)
from .errors import InputError, NumericError, SchemaError, TopicTreeError
from .evaluate import (
    EmbeddingTable,
    SimilarityHeatmap,
    TopicWordSet,
    TransportProblem,
    coherence,
    emd,
    heatmap,
    load_embeddings,
    wmd,
)
from .hnmf import (
    HnmfConfig,
    TopicNode,
    TopicTree,
    assign_documents,
    build_tree,
    reassign_extras,
    split_node,
)
from .modelsel import (
    KRange,
    TopicSet,
    lss,
    pairwise_cosine,
    select_k,
    suggest_range,
    variance_increments,
)
from .nmf import (
    Factorization,
    NmfConfig,
    nmf,
    normalize,
    objective,
    top_words,
)

__version__ = "0.1.0"

__all__ = [
    "CorpusMatrix", "Document", "IngestFilter", "TokenPipelineConfig", "Vocabulary",
    "build_tfidf", "build_vocabulary", "ingest", "load_stopwords", "tokenize",
    "InputError", "NumericError", "SchemaError", "TopicTreeError",
    "EmbeddingTable", "SimilarityHeatmap", "TopicWordSet", "TransportProblem",
    "coherence", "emd", "heatmap", "load_embeddings", "wmd",
    "HnmfConfig", "TopicNode", "TopicTree", "assign_documents", "build_tree",
    "reassign_extras", "split_node",
    "KRange", "TopicSet", "lss", "pairwise_cosine", "select_k", "suggest_range",
    "variance_increments",
    "Factorization", "NmfConfig", "nmf", "normalize", "objective", "top_words",
]
