"""Hierarchical topic tree construction by recursive NMF splitting.

The corpus is factorized into a first layer of topics; documents attach to
every topic whose mixture proportion clears the threshold alpha, and
documents claimed by no topic pool up as extras. Any topic holding more
than m documents is split again the same way (its own topic count chosen
per node), until every leaf is small enough or the depth cap is reached.
Pooled extras are then attached to the most cosine-similar leaf dictionary,
and leaves pushed over m by that reassignment are split once more.

Splits run sequentially in a deterministic node order; per-node seeds are
derived by hashing (seed_master, node path), so results do not depend on
traversal or scheduling. All inputs are immutable and the finished tree is
never mutated.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import CorpusMatrix, Vocabulary
from .errors import NumericError
from .modelsel import (
    KRange,
    LssDistribution,
    select_k,
    suggest_range,
    variance_increments,
)
from .nmf import Factorization, NmfConfig, nmf, normalize, top_words

log = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.05
DEFAULT_MAX_LEAF = 1400
DEFAULT_SEED_PAIRS = 30

FLAG_MAX_DEPTH = "max_depth"
FLAG_UNSPLITTABLE = "unsplittable"


@dataclass(frozen=True)
class HnmfConfig:
    alpha: float = DEFAULT_ALPHA
    m: int = DEFAULT_MAX_LEAF
    q: int = DEFAULT_SEED_PAIRS
    max_depth: int = 5
    seed_master: int = 0
    # fixed per-depth (k1, k2) ranges; the last entry covers deeper layers.
    # Empty means the variance-increment heuristic picks a range per node.
    ranges: tuple[tuple[int, int], ...] = ()
    auto_k_max: int = 20
    drop_ratio: float = 0.9
    nmf_max_iters: int = 400
    nmf_rel_tol: float = 1e-5
    keywords: int = 10

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        for k1, k2 in self.ranges:
            if not 1 <= k1 <= k2:
                raise ValueError(f"invalid fixed range [{k1}, {k2}]")


@dataclass
class TopicNode:
    """One topic: its dictionary vector, keywords and assigned documents."""

    path: str
    dictionary: np.ndarray
    keywords: list[tuple[str, float]]
    doc_ids: set[str]
    children: list["TopicNode"] = field(default_factory=list)
    k_star: int | None = None
    coherence: float | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return self.path.count("-") + 1

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator["TopicNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


def path_key(path: str) -> tuple[int, ...]:
    return tuple(int(p) for p in path.split("-"))


@dataclass
class TopicTree:
    roots: list[TopicNode]
    config: HnmfConfig
    vocab: Vocabulary
    audit_log: list[dict]
    warnings: list[str]
    variance_series: list[float]
    lss_distributions: dict[str, LssDistribution]  # splitting node path ("" = root)

    def nodes(self) -> list[TopicNode]:
        """All nodes, shallow layers first, numeric path order within a layer."""
        everything = [nd for root in self.roots for nd in root.walk()]
        return sorted(everything, key=lambda nd: (nd.depth, path_key(nd.path)))

    def leaves(self) -> list[TopicNode]:
        return [nd for nd in self.nodes() if nd.is_leaf]

    def node(self, path: str) -> TopicNode:
        for nd in self.nodes():
            if nd.path == path:
                return nd
        raise KeyError(path)

    def document_ids(self) -> set[str]:
        out: set[str] = set()
        for leaf in self.leaves():
            out |= leaf.doc_ids
        return out

    def per_layer_k(self) -> dict[int, dict[str, int]]:
        """depth -> {splitting node path: chosen k}; the root split is depth 0."""
        out: dict[int, dict[str, int]] = {}
        if self.roots:
            out[0] = {"": len(self.roots)}
        for nd in self.nodes():
            if nd.children and nd.k_star is not None:
                out.setdefault(nd.depth, {})[nd.path] = nd.k_star
        return out


def node_seed(seed_master: int, path: str, salt: str) -> int:
    """Stable per-node seed, independent of traversal order."""
    digest = hashlib.sha256(f"{seed_master}:{salt}:{path}".encode()).digest()
    return int.from_bytes(digest[:8], "little") % (2**63)


def assign_documents(
    f: Factorization, alpha: float
) -> tuple[list[set[int]], set[int]]:
    """Soft-assign documents (H columns) to topics by mixture proportion.

    Each H column is normalized to sum 1; document j joins every topic i
    with proportion > alpha, and documents claiming no topic (including
    all-zero columns) land in the extras set.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    H = f.H
    k, n = H.shape
    col_sums = H.sum(axis=0)
    dead = col_sums <= 0
    if dead.any():
        log.warning("%d document(s) with all-zero coding column go to extras",
                    int(dead.sum()))
    safe = np.where(dead, 1.0, col_sums)
    Hn = H / safe
    Hn[:, dead] = 0.0
    mask = Hn > alpha
    topics: list[set[int]] = [set() for _ in range(k)]
    extras: set[int] = set()
    for j in range(n):
        hits = np.flatnonzero(mask[:, j])
        if hits.size:
            for i in hits:
                topics[int(i)].add(j)
        else:
            extras.add(j)
    return topics, extras


def _resolve_range(sub: CorpusMatrix, cfg: HnmfConfig, depth: int) -> KRange | None:
    """Candidate range for splitting one node, clamped to the submatrix size.

    Returns None when the sub-corpus is too small for the smallest
    candidate, i.e. the node cannot be split.
    """
    lim = min(sub.d, sub.n)
    if cfg.ranges:
        k1, k2 = cfg.ranges[min(depth, len(cfg.ranges) - 1)]
    else:
        if lim < 3:
            return None
        k_max = min(cfg.auto_k_max, lim)
        series = variance_increments(sub.X, k_max)
        r = suggest_range(series, cfg.drop_ratio)
        # a 1-topic "split" cannot make progress, so the heuristic floors at 2
        k1, k2 = max(r.k1, 2), max(r.k2, 2)
    k2 = min(k2, lim)
    if k1 > k2 or k2 < 1:
        return None
    return KRange(k1, k2)


def split_node(
    sub: CorpusMatrix,
    cfg: HnmfConfig,
    depth: int,
    parent_path: str = "",
) -> tuple[list[TopicNode], set[str], dict]:
    """Split one node's sub-corpus into child topics.

    Returns (children, extras document ids, info). An empty child list
    means the node could not be split (info carries the flag); the caller
    keeps it as a leaf.
    """
    krange = _resolve_range(sub, cfg, depth)
    if krange is None or sub.n < krange.k1:
        return [], set(), {"flag": FLAG_UNSPLITTABLE}
    k_star, dist = select_k(
        sub.X,
        krange,
        cfg.q,
        node_seed(cfg.seed_master, parent_path, "select"),
        max_iters=cfg.nmf_max_iters,
        rel_tol=cfg.nmf_rel_tol,
    )
    final_cfg = NmfConfig(
        k=k_star,
        seed=node_seed(cfg.seed_master, parent_path, "final"),
        max_iters=cfg.nmf_max_iters,
        rel_tol=cfg.nmf_rel_tol,
    )
    f = normalize(nmf(sub.X, final_cfg))
    topics, extras = assign_documents(f, cfg.alpha)

    children: list[TopicNode] = []
    n_kw = min(cfg.keywords, sub.vocab.size)
    for i in range(k_star):
        path = f"{parent_path}-{i + 1}" if parent_path else str(i + 1)
        children.append(
            TopicNode(
                path=path,
                dictionary=f.W[:, i].copy(),
                keywords=top_words(f.W[:, i], sub.vocab, n_kw),
                doc_ids={sub.doc_ids[j] for j in topics[i]},
            )
        )
    extras_ids = {sub.doc_ids[j] for j in extras}
    return children, extras_ids, {"k_star": k_star, "dist": dist, "range": krange}


def reassign_extras(
    pool: Iterable[str],
    leaves: Sequence[TopicNode],
    X: CorpusMatrix,
) -> dict[str, tuple[str, float]]:
    """Attach each pooled document to the single most similar leaf.

    Similarity is the cosine between the document's TF-IDF column and the
    leaf's dictionary vector (both unit vectors). Ties, including the
    all-zero-similarity case, resolve to the lexicographically smallest
    leaf path. Mutates the winning leaves' document sets.
    """
    pool = sorted(pool, key=X.col_of.__getitem__)
    if not pool:
        return {}
    if not leaves:
        raise NumericError("no leaves to reassign extras to")
    taken = set().union(*(leaf.doc_ids for leaf in leaves))
    overlap = taken.intersection(pool)
    if overlap:
        raise NumericError(f"extras pool overlaps leaf assignments: {sorted(overlap)[:5]}")

    ordered = sorted(leaves, key=lambda nd: nd.path)
    D = np.column_stack([leaf.dictionary for leaf in ordered])
    cols = [X.col_of[doc] for doc in pool]
    sims = (X.X[:, cols].T @ D)  # |pool| x |leaves|

    out: dict[str, tuple[str, float]] = {}
    for row, doc in enumerate(pool):
        best = int(np.argmax(sims[row]))  # first maximum = smallest path on ties
        score = float(sims[row, best])
        if score <= 0:
            log.warning("document %s has zero similarity to every leaf; "
                        "assigned to %s by tie-break", doc, ordered[best].path)
        ordered[best].doc_ids.add(doc)
        out[doc] = (ordered[best].path, score)
    return out


def _splittable(leaf: TopicNode, cfg: HnmfConfig) -> bool:
    return (
        len(leaf.doc_ids) > cfg.m
        and not leaf.flags
        and leaf.depth < cfg.max_depth
    )


def _homed(leaves: Sequence[TopicNode]) -> set[str]:
    out: set[str] = set()
    for leaf in leaves:
        out |= leaf.doc_ids
    return out


def build_tree(X: CorpusMatrix, cfg: HnmfConfig) -> TopicTree:
    """Run the full hierarchical factorization over a corpus matrix."""
    audit: list[dict] = []
    warnings: list[str] = []
    lss_dists: dict[str, LssDistribution] = {}

    series = variance_increments(
        X.X, min(cfg.auto_k_max, min(X.d, X.n))
    )

    def log_alpha(children: Sequence[TopicNode]) -> None:
        for child in children:
            for doc in sorted(child.doc_ids, key=X.col_of.__getitem__):
                audit.append({"event": "assign", "doc": doc,
                              "node": child.path, "source": "alpha"})

    roots, pool, info = split_node(X, cfg, 0, "")
    if not roots:
        raise NumericError("corpus too small to split into topics")
    lss_dists[""] = info["dist"]
    root_k = info["k_star"]
    log_alpha(roots)

    def leaves() -> list[TopicNode]:
        return [
            nd
            for root in roots
            for nd in root.walk()
            if nd.is_leaf
        ]

    while True:
        grew = True
        while grew:
            grew = False
            for leaf in sorted(leaves(), key=lambda nd: (nd.depth, path_key(nd.path))):
                if len(leaf.doc_ids) <= cfg.m or leaf.flags:
                    continue
                if leaf.depth >= cfg.max_depth:
                    if FLAG_MAX_DEPTH not in leaf.flags:
                        leaf.flags.append(FLAG_MAX_DEPTH)
                        warnings.append(
                            f"leaf {leaf.path} holds {len(leaf.doc_ids)} > m={cfg.m} "
                            f"documents at the depth cap"
                        )
                    continue
                sub = X.submatrix(sorted(leaf.doc_ids, key=X.col_of.__getitem__))
                children, extras, info = split_node(sub, cfg, leaf.depth, leaf.path)
                if not children:
                    if FLAG_UNSPLITTABLE not in leaf.flags:
                        leaf.flags.append(FLAG_UNSPLITTABLE)
                        warnings.append(
                            f"leaf {leaf.path} holds {len(leaf.doc_ids)} > m={cfg.m} "
                            f"documents but its sub-corpus cannot be split"
                        )
                    continue
                leaf.children = children
                leaf.k_star = info["k_star"]
                lss_dists[leaf.path] = info["dist"]
                pool |= extras
                log_alpha(children)
                grew = True
        if pool:
            # soft assignment means a document pooled under one branch may
            # already live in a leaf elsewhere; only truly homeless
            # documents are reattached
            current = leaves()
            pool -= _homed(current)
            moved = reassign_extras(pool, current, X)
            touched = set()
            for doc in sorted(moved, key=X.col_of.__getitem__):
                path, score = moved[doc]
                touched.add(path)
                audit.append({"event": "assign", "doc": doc, "node": path,
                              "source": "extras", "cosine": score})
            pool = set()
            # a leaf that grew may have become splittable again
            for leaf in current:
                if leaf.path in touched and FLAG_UNSPLITTABLE in leaf.flags:
                    leaf.flags.remove(FLAG_UNSPLITTABLE)
        if not any(_splittable(leaf, cfg) for leaf in leaves()):
            break

    def pull_up(node: TopicNode) -> set[str]:
        if node.children:
            merged: set[str] = set()
            for child in node.children:
                merged |= pull_up(child)
            node.doc_ids = merged
        return node.doc_ids

    for root in roots:
        pull_up(root)

    tree = TopicTree(
        roots=roots,
        config=cfg,
        vocab=X.vocab,
        audit_log=audit,
        warnings=warnings,
        variance_series=series,
        lss_distributions=lss_dists,
    )
    log.info("built tree: %d layer-1 topics, %d nodes, %d leaves",
             root_k, len(tree.nodes()), len(tree.leaves()))
    return tree
