"""Topic-count selection for a corpus matrix.

Two ingredients: the marginal variance explained by each additional
singular direction of X (plotted to choose a candidate range), and a
cross-seed consistency score. For each candidate k, NMF is run with q+1
seeds; consecutive runs are compared through the pairwise cosine matrix of
their topic vectors, and the least seed similarity (lss) of that matrix is
the minimum over all row maxima and column maxima. The k whose q lss
scores have the highest median wins: a consistent topic count should
rediscover essentially the same topics no matter the seed.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import svds

from .errors import NumericError
from .nmf import Factorization, NmfConfig, nmf, normalize

DEFAULT_DROP_RATIO = 0.9
FALLBACK_RANGE = (2, 6)
_DENSE_CUTOFF = 400

# LssDistribution: candidate k -> the q lss scores of its consecutive seed pairs
LssDistribution = dict[int, list[float]]


@dataclass(frozen=True)
class KRange:
    k1: int
    k2: int

    def __post_init__(self) -> None:
        if not 1 <= self.k1 <= self.k2:
            raise ValueError(f"invalid topic-count range [{self.k1}, {self.k2}]")

    def __iter__(self):
        return iter(range(self.k1, self.k2 + 1))


@dataclass(frozen=True)
class TopicSet:
    """Unit-normalized dictionary columns of one seeded NMF run."""

    vectors: np.ndarray  # d x k, nonnegative unit columns
    seed: int

    @property
    def k(self) -> int:
        return self.vectors.shape[1]


def variance_increments(X, k_max: int, method: str = "auto") -> list[float]:
    """Fraction of total variance captured by each of the top k_max singular
    directions: sigma_i^2 / ||X||_F^2, descending in i.

    The denominator is the exact squared Frobenius norm, so the series sums
    to 1 only once k_max reaches the rank of X.
    """
    d, n = X.shape
    if not 1 <= k_max <= min(d, n):
        raise NumericError(f"k_max={k_max} out of range for a {d}x{n} matrix")
    is_sp = sparse.issparse(X)
    total = float(np.dot(X.data, X.data)) if is_sp else float(np.einsum("ij,ij->", np.asarray(X, float), np.asarray(X, float)))
    if total == 0:
        raise NumericError("zero matrix has no variance to explain")

    if method not in ("auto", "dense", "sparse"):
        raise ValueError(f"unknown method {method!r}")
    use_dense = method == "dense" or (
        method == "auto" and (min(d, n) <= _DENSE_CUTOFF or k_max >= min(d, n) - 1)
    )
    if use_dense:
        dense = X.toarray() if is_sp else np.asarray(X, dtype=np.float64)
        sv = np.linalg.svd(dense, compute_uv=False)[:k_max]
    else:
        # deterministic start vector keeps repeated runs bit-identical
        v0 = np.random.default_rng(0).random(min(d, n))
        sv = svds(sparse.csr_array(X) if is_sp else X, k=k_max, v0=v0,
                  return_singular_vectors=False)
        sv = np.sort(sv)[::-1]
    return [float(s * s / total) for s in sv]


def suggest_range(increments: Sequence[float], drop_ratio: float = DEFAULT_DROP_RATIO) -> KRange:
    """Heuristic candidate range from the variance-increment series.

    k1 is the first index whose next two increment ratios stay above
    drop_ratio (the series has leveled off); k2 = k1 + 4. Falls back to
    [2, 6] when no plateau is found. A user-supplied range always takes
    precedence over this heuristic.
    """
    if not increments:
        raise ValueError("empty increment series")

    def ratio(a: float, b: float) -> float:
        if a > 0:
            return b / a
        return 1.0 if b == 0 else float("inf")

    for i in range(len(increments) - 2):
        r1 = ratio(increments[i], increments[i + 1])
        r2 = ratio(increments[i + 1], increments[i + 2])
        if r1 > drop_ratio and r2 > drop_ratio:
            k1 = i + 1
            return KRange(k1, k1 + 4)
    return KRange(*FALLBACK_RANGE)


def lss(S: np.ndarray) -> float:
    """Least seed similarity of a cross-run topic similarity matrix:
    the minimum over all row maxima and all column maxima."""
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.size == 0:
        raise NumericError("similarity matrix must be non-empty and 2-D")
    return float(min(S.max(axis=1).min(), S.max(axis=0).min()))


def pairwise_cosine(A: TopicSet, B: TopicSet) -> np.ndarray:
    """S[a, b] = cosine between topic a of A and topic b of B.

    Vectors are nonnegative unit vectors, so entries land in [0, 1]
    (clipped against fp overshoot).
    """
    if A.vectors.shape != B.vectors.shape:
        raise NumericError(
            f"topic set shapes differ: {A.vectors.shape} vs {B.vectors.shape}"
        )
    S = A.vectors.T @ B.vectors
    return np.clip(S, 0.0, 1.0)


def topic_set(f: Factorization) -> TopicSet:
    """Unit-normalized dictionary columns of a factorization."""
    return TopicSet(vectors=normalize(f).W, seed=f.seed)


def draw_seeds(seed_master: int, count: int) -> list[int]:
    rng = np.random.default_rng(seed_master)
    return [int(s) for s in rng.integers(0, 2**63 - 1, size=count)]


def _argmax_median(dist: Mapping[int, Sequence[float]]) -> int:
    """k with the highest median score; the median of an even-length list is
    the mean of the two middle values, and ties go to the smaller k."""
    best_k = None
    best = -np.inf
    for k in sorted(dist):
        med = statistics.median(dist[k])
        if med > best:
            best, best_k = med, k
    if best_k is None:
        raise NumericError("empty lss distribution")
    return best_k


def select_k(
    X,
    krange: KRange,
    q: int,
    seed_master: int,
    max_iters: int = 400,
    rel_tol: float = 1e-5,
) -> tuple[int, LssDistribution]:
    """Pick the topic count in krange whose seeded runs agree the most.

    Draws q+1 seeds from seed_master, factorizes X once per (k, seed), and
    scores the q consecutive run pairs per k with lss. Returns the winning
    k and the full score distribution for boxplot export.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    d, n = X.shape
    if krange.k2 > min(d, n):
        raise NumericError(f"range upper bound {krange.k2} exceeds min(d, n)={min(d, n)}")
    seeds = draw_seeds(seed_master, q + 1)
    dist: LssDistribution = {}
    for k in krange:
        sets = [
            topic_set(nmf(X, NmfConfig(k=k, seed=s, max_iters=max_iters, rel_tol=rel_tol)))
            for s in seeds
        ]
        dist[k] = [lss(pairwise_cosine(sets[j], sets[j + 1])) for j in range(q)]
    return _argmax_median(dist), dist


def write_variance_csv(path: str | Path, increments: Sequence[float]) -> None:
    """Variance-increment series as CSV (k, increment) for plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "increment"])
        for i, inc in enumerate(increments, start=1):
            writer.writerow([i, repr(inc)])


def write_lss_csv(path: str | Path, dist: Mapping[int, Sequence[float]]) -> None:
    """Long-form lss scores as CSV (k, score) for the boxplot."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "score"])
        for k in sorted(dist):
            for s in dist[k]:
                writer.writerow([k, repr(s)])
