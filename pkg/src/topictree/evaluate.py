"""Tree quality scoring: keyword coherence and transport-based topic similarity.

Coherence rewards topic keywords that co-occur in the topic's own
documents (log-ratio of joint to single document counts). Topic similarity
is the exact earth mover's distance between two topics' top-word sets,
with word-embedding Euclidean distances as the ground cost; the solver is
a successive-shortest-path min-cost-flow on the bipartite transport graph,
exact for the tiny instances that topic word sets produce.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InputError, NumericError
from .hnmf import TopicTree, path_key
from .nmf import top_words

log = logging.getLogger(__name__)

DEFAULT_COHERENCE_TOP = 10
DEFAULT_WMD_TOP = 100
TRANSFORM_NAME = "affine-inverse"  # sim = (d_max - d) / (d_max - d_min)

_MASS_TOL = 1e-12


def coherence(topic_docs: Sequence[Iterable[str]], words: Sequence[str]) -> float:
    """Co-occurrence coherence of an ordered keyword list within one topic.

    topic_docs are the token sets of the documents assigned to the topic.
    For each keyword pair (later word p, earlier word l) the score adds
    ln((D(p, l) + 1) / D(l)) where D counts topic documents containing
    both words resp. the earlier word. Words occurring in no topic
    document are dropped with a warning before scoring.
    """
    doc_sets = [frozenset(d) for d in topic_docs]
    occ: dict[str, set[int]] = {}
    kept: list[str] = []
    dropped: list[str] = []
    for w in words:
        where = {i for i, ds in enumerate(doc_sets) if w in ds}
        if where:
            occ[w] = where
            kept.append(w)
        else:
            dropped.append(w)
    if dropped:
        log.warning("dropping %d keyword(s) absent from all topic documents: %s",
                    len(dropped), ", ".join(dropped))
    if len(kept) < 2:
        raise NumericError("fewer than 2 scoreable keywords")
    total = 0.0
    for p in range(1, len(kept)):
        for l in range(p):
            joint = len(occ[kept[p]] & occ[kept[l]])
            total += math.log((joint + 1) / len(occ[kept[l]]))
    return total


@dataclass(frozen=True)
class EmbeddingTable:
    """token -> dense vector map; missing tokens are a detectable absence."""

    vectors: dict[str, np.ndarray]
    dim: int

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Parse word2vec text format: a "count dim" header line, then one
    token followed by dim floats per line."""
    try:
        raw = Path(path).read_text("utf-8")
    except OSError as exc:
        raise InputError(f"cannot read embeddings {path}: {exc}") from exc
    lines = raw.splitlines()
    if not lines:
        raise InputError(f"{path}: empty embeddings file")
    header = lines[0].split()
    if len(header) != 2:
        raise InputError(f"{path}:1: header must be 'count dimension'")
    try:
        count, dim = int(header[0]), int(header[1])
    except ValueError as exc:
        raise InputError(f"{path}:1: non-integer header: {lines[0]!r}") from exc
    if count < 1 or dim < 1:
        raise InputError(f"{path}:1: count and dimension must be positive")

    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        token = parts[0]
        if len(parts) - 1 != dim:
            raise InputError(
                f"{path}:{lineno}: expected {dim} components, got {len(parts) - 1}"
            )
        if token in vectors:
            raise InputError(f"{path}:{lineno}: duplicate token {token!r}")
        try:
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: malformed component: {exc}") from exc
        vectors[token] = vec
    if len(vectors) != count:
        raise InputError(
            f"{path}: header declares {count} vectors but file has {len(vectors)}"
        )
    return EmbeddingTable(vectors=vectors, dim=dim)


@dataclass(frozen=True)
class TopicWordSet:
    """A topic represented by its heaviest vocabulary words."""

    path: str
    words: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.words) != len(self.weights):
            raise ValueError("words and weights must align")
        if len(set(self.words)) != len(self.words):
            raise ValueError("topic words must be distinct")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if any(a < b for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError("weights must be descending")


@dataclass(frozen=True)
class TransportProblem:
    supply: np.ndarray
    demand: np.ndarray
    cost: np.ndarray

    def __post_init__(self) -> None:
        a, b, C = self.supply, self.demand, self.cost
        if a.ndim != 1 or b.ndim != 1 or C.shape != (a.size, b.size):
            raise NumericError("cost matrix dimensions must match weight lengths")
        if a.min() < 0 or b.min() < 0 or (C.size and C.min() < 0):
            raise NumericError("weights and costs must be nonnegative")
        if abs(a.sum() - b.sum()) > _MASS_TOL:
            raise NumericError(
                f"supply ({a.sum()!r}) and demand ({b.sum()!r}) masses differ"
            )


def _dijkstra(C, plan, pot, sources, m, n):
    """Shortest reduced-cost distances over the bipartite residual graph.

    Nodes 0..m-1 are supplies, m..m+n-1 demands. Forward arcs i->j carry
    cost C[i,j]; backward arcs j->i exist where plan[i,j] > 0 with cost
    -C[i,j]. Reduced costs via the node potentials stay nonnegative.
    """
    size = m + n
    dist = np.full(size, np.inf)
    parent = np.full(size, -1, dtype=np.int64)
    dist[sources] = 0.0
    done = np.zeros(size, dtype=bool)
    for _ in range(size):
        cand = np.where(done, np.inf, dist)
        u = int(np.argmin(cand))
        if not np.isfinite(cand[u]):
            break
        done[u] = True
        if u < m:
            rc = np.maximum(C[u, :] + pot[u] - pot[m:], 0.0)
            nd = dist[u] + rc
            better = (nd < dist[m:]) & ~done[m:]
            dist[m:][better] = nd[better]
            parent[m:][better] = u
        else:
            j = u - m
            open_back = plan[:, j] > _MASS_TOL
            if open_back.any():
                rc = np.maximum(-C[:, j] + pot[u] - pot[:m], 0.0)
                nd = np.where(open_back, dist[u] + rc, np.inf)
                better = (nd < dist[:m]) & ~done[:m]
                dist[:m][better] = nd[better]
                parent[:m][better] = u
    return dist, parent


def emd(problem: TransportProblem) -> tuple[float, np.ndarray]:
    """Exact optimal transport cost and plan by successive shortest paths.

    Each augmentation saturates a supply, a demand, or a residual arc, so
    the loop terminates quickly on the small instances used here.
    """
    a = problem.supply.astype(np.float64).copy()
    b = problem.demand.astype(np.float64).copy()
    C = problem.cost.astype(np.float64)
    m, n = C.shape
    plan = np.zeros((m, n))
    pot = np.zeros(m + n)
    rem_s = a
    rem_d = b
    scale = max(float(b.sum()), 1.0)
    limit = 200 * (m + n) + 1000
    for _ in range(limit):
        if rem_d.sum() <= _MASS_TOL * scale:
            break
        sources = np.flatnonzero(rem_s > _MASS_TOL * scale)
        dist, parent = _dijkstra(C, plan, pot, sources, m, n)
        targets = np.flatnonzero(rem_d > _MASS_TOL * scale)
        t = int(targets[np.argmin(dist[m + targets])])
        if not np.isfinite(dist[m + t]):
            raise NumericError("transport graph disconnected; cannot route mass")
        # walk the path back to its origin, collecting edges and the bottleneck
        delta = float(rem_d[t])
        node = m + t
        edges: list[tuple[str, int, int]] = []
        while parent[node] != -1:
            prev = int(parent[node])
            if node >= m:
                edges.append(("f", prev, node - m))
            else:
                edges.append(("b", node, prev - m))
                delta = min(delta, float(plan[node, prev - m]))
            node = prev
        origin = node
        delta = min(delta, float(rem_s[origin]))
        for kind, i, j in edges:
            plan[i, j] += delta if kind == "f" else -delta
        plan[plan < 0] = 0.0
        rem_s[origin] -= delta
        rem_d[t] -= delta
        pot += np.minimum(dist, dist[m + t])
    else:
        raise NumericError("transport solver failed to converge")
    return float(np.einsum("ij,ij->", plan, C)), plan


def embedding_coverage(words: Sequence[str], emb: EmbeddingTable) -> float:
    if not words:
        return 0.0
    return sum(1 for w in words if w in emb) / len(words)


def wmd(
    a: TopicWordSet,
    b: TopicWordSet,
    emb: EmbeddingTable,
    use_weights: bool = False,
) -> float:
    """Minimum cumulative embedding-space distance to morph one topic's
    word mass into the other's.

    Words missing from the embedding table are dropped and the remaining
    mass renormalized; by default mass is uniform over the retained words,
    optionally proportional to the topic weights.
    """

    def retained(ts: TopicWordSet) -> tuple[list[str], np.ndarray]:
        words = [w for w in ts.words if w in emb]
        if not words:
            raise NumericError(f"no embeddable words for topic {ts.path!r}")
        cov = len(words) / len(ts.words)
        if cov < 1.0:
            log.info("topic %s: embedding coverage %.0f%%", ts.path, 100 * cov)
        if use_weights:
            wts = np.array([wt for w, wt in zip(ts.words, ts.weights) if w in emb])
            if wts.sum() <= 0:
                raise NumericError(f"zero total weight for topic {ts.path!r}")
            return words, wts / wts.sum()
        return words, np.full(len(words), 1.0 / len(words))

    wa, ma = retained(a)
    wb, mb = retained(b)
    Va = np.stack([emb.vectors[w] for w in wa])
    Vb = np.stack([emb.vectors[w] for w in wb])
    cost = cdist(Va, Vb, metric="euclidean")
    value, _ = emd(TransportProblem(supply=ma, demand=mb, cost=cost))
    return value


@dataclass(frozen=True)
class SimilarityHeatmap:
    """Pairwise topic distances plus the affine display transform."""

    paths: tuple[str, ...]
    distances: np.ndarray  # symmetric, zero diagonal
    d_min: float
    d_max: float
    transform: str = TRANSFORM_NAME

    def similarities(self) -> np.ndarray:
        if self.d_max == self.d_min:
            return np.ones_like(self.distances)
        return (self.d_max - self.distances) / (self.d_max - self.d_min)


def topic_word_sets(tree: TopicTree, top: int = DEFAULT_WMD_TOP) -> list[TopicWordSet]:
    """Top-word representation of every tree node, shallow layers first."""
    out = []
    for nd in tree.nodes():
        pairs = top_words(nd.dictionary, tree.vocab, min(top, tree.vocab.size))
        out.append(TopicWordSet(
            path=nd.path,
            words=tuple(w for w, _ in pairs),
            weights=tuple(wt for _, wt in pairs),
        ))
    return out


def heatmap(
    tree: TopicTree,
    emb: EmbeddingTable,
    top: int = DEFAULT_WMD_TOP,
    use_weights: bool = False,
) -> SimilarityHeatmap:
    """Pairwise word-mover distances over all tree nodes."""
    sets = topic_word_sets(tree, top)
    return heatmap_from_word_sets(sets, emb, use_weights=use_weights)


def heatmap_from_word_sets(
    sets: Sequence[TopicWordSet],
    emb: EmbeddingTable,
    use_weights: bool = False,
) -> SimilarityHeatmap:
    sets = sorted(sets, key=lambda ts: (ts.path.count("-"), path_key(ts.path)))
    L = len(sets)
    D = np.zeros((L, L))
    for i in range(L):
        for j in range(i + 1, L):
            d = wmd(sets[i], sets[j], emb, use_weights=use_weights)
            D[i, j] = D[j, i] = d
    return SimilarityHeatmap(
        paths=tuple(ts.path for ts in sets),
        distances=D,
        d_min=float(D.min()),
        d_max=float(D.max()),
    )


def write_heatmap_csv(path: str | Path, hm: SimilarityHeatmap) -> None:
    """Distance matrix as CSV with node-path header row and column, plus a
    JSON sidecar recording the display transform."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", *hm.paths])
        for i, p in enumerate(hm.paths):
            writer.writerow([p, *(repr(float(x)) for x in hm.distances[i])])
    meta = {
        "d_min": hm.d_min,
        "d_max": hm.d_max,
        "transform": hm.transform,
    }
    Path(path).with_suffix(".meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", "utf-8"
    )


def read_heatmap_csv(path: str | Path) -> SimilarityHeatmap:
    p = Path(path)
    meta_path = p.with_suffix(".meta.json")
    try:
        with open(p, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        meta = json.loads(meta_path.read_text("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read heatmap: {exc}") from exc
    paths = tuple(rows[0][1:])
    D = np.array([[float(x) for x in row[1:]] for row in rows[1:]])
    return SimilarityHeatmap(
        paths=paths,
        distances=D,
        d_min=float(meta["d_min"]),
        d_max=float(meta["d_max"]),
        transform=str(meta["transform"]),
    )
