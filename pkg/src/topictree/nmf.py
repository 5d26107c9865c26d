"""Seeded nonnegative matrix factorization with multiplicative updates.

Factorizes a nonnegative d x n matrix X into a d x k dictionary W and a
k x n coding matrix H minimizing the squared Frobenius reconstruction
error. The solver is fully determined by (X, config): W and H start from
i.i.d. uniform draws of a seeded generator, and the multiplicative update
rule keeps the objective non-increasing, which the tests rely on.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import NumericError
from .corpus import Vocabulary

_DUMP_MAGIC = b"WHDUMP01"


@dataclass(frozen=True)
class NmfConfig:
    k: int
    seed: int
    max_iters: int = 400
    rel_tol: float = 1e-5
    eps: float = 1e-12

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be >= 0")
        if self.eps <= 0:
            raise ValueError("eps must be > 0")


@dataclass(frozen=True)
class Factorization:
    W: np.ndarray
    H: np.ndarray
    objective_history: tuple[float, ...]
    seed: int

    @property
    def k(self) -> int:
        return self.W.shape[1]


def _as_matrix(X) -> tuple:
    """Return (X, is_sparse) with X in a multiply-friendly layout."""
    if sparse.issparse(X):
        return sparse.csr_array(X), True
    return np.asarray(X, dtype=np.float64), False


def _sq_frobenius(X, is_sparse: bool) -> float:
    if is_sparse:
        return float(np.dot(X.data, X.data))
    return float(np.einsum("ij,ij->", X, X))


def nmf(X, cfg: NmfConfig) -> Factorization:
    """Multiplicative-update NMF of a nonnegative matrix.

    Stops after cfg.max_iters iterations or once the relative objective
    decrease over one iteration falls below cfg.rel_tol. The recorded
    objective history is the squared Frobenius loss after each iteration.
    """
    X, is_sp = _as_matrix(X)
    d, n = X.shape
    if cfg.k > min(d, n):
        raise NumericError(f"k={cfg.k} exceeds min(d, n)={min(d, n)}")
    if is_sp:
        if X.nnz and X.data.min() < 0:
            raise NumericError("X must be nonnegative")
        col_mass = abs(X).sum(axis=0)
    else:
        if X.size and X.min() < 0:
            raise NumericError("X must be nonnegative")
        col_mass = np.abs(X).sum(axis=0)
    if np.any(col_mass == 0):
        raise NumericError("X has all-zero columns")

    rng = np.random.default_rng(cfg.seed)
    W = rng.random((d, cfg.k))
    H = rng.random((cfg.k, n))
    eps = cfg.eps

    xx = _sq_frobenius(X, is_sp)
    history: list[float] = []
    prev = None
    WtW = W.T @ W
    for _ in range(cfg.max_iters):
        # H <- H * (W^T X) / (W^T W H + eps)
        WtX = W.T @ X if not is_sp else (X.T @ W).T
        H *= WtX / (WtW @ H + eps)
        # W <- W * (X H^T) / (W H H^T + eps)
        XHt = X @ H.T
        HHt = H @ H.T
        W *= XHt / (W @ HHt + eps)
        WtW = W.T @ W
        # loss via <X,WH> = sum(XH^T * W), ||WH||^2 = <W^T W, H H^T>;
        # XHt depends only on H so it is exact for the updated pair
        obj = xx - 2.0 * float(np.einsum("ij,ij->", XHt, W)) + float(np.einsum("ij,ij->", WtW, HHt))
        obj = max(obj, 0.0)
        history.append(obj)
        if prev is not None and prev > 0 and (prev - obj) / prev < cfg.rel_tol:
            break
        prev = obj

    return Factorization(W=W, H=H, objective_history=tuple(history), seed=cfg.seed)


def objective(X, W: np.ndarray, H: np.ndarray, _chunk: int = 4_000_000) -> float:
    """Exact squared Frobenius reconstruction error ||X - WH||_F^2.

    Computed blockwise over columns so sparse inputs are never fully
    densified at once.
    """
    W = np.asarray(W, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    is_sp = sparse.issparse(X)
    d, n = X.shape
    if W.shape[0] != d or H.shape[1] != n or W.shape[1] != H.shape[0]:
        raise NumericError(
            f"shape mismatch: X is {d}x{n}, W is {W.shape[0]}x{W.shape[1]}, "
            f"H is {H.shape[0]}x{H.shape[1]}"
        )
    if not is_sp:
        R = np.asarray(X, dtype=np.float64) - W @ H
        return float(np.einsum("ij,ij->", R, R))
    Xc = sparse.csc_array(X)
    step = max(1, _chunk // max(d, 1))
    total = 0.0
    for j0 in range(0, n, step):
        j1 = min(n, j0 + step)
        R = W @ H[:, j0:j1] - Xc[:, j0:j1].toarray()
        total += float(np.einsum("ij,ij->", R, R))
    return total


def normalize(f: Factorization) -> Factorization:
    """Rescale W columns to unit L2 norm, compensating in H so WH is unchanged."""
    norms = np.linalg.norm(f.W, axis=0)
    if np.any(norms == 0):
        dead = np.flatnonzero(norms == 0).tolist()
        raise NumericError(f"degenerate topic: all-zero W column(s) {dead}")
    return replace(f, W=f.W / norms, H=f.H * norms[:, None])


def top_words(w: np.ndarray, vocab: Vocabulary, P: int) -> list[tuple[str, float]]:
    """The P heaviest vocabulary tokens of one dictionary column.

    Descending weight; ties resolve to lexicographically smaller tokens,
    which coincides with index order because the vocabulary is sorted.
    """
    w = np.asarray(w, dtype=np.float64).ravel()
    if P < 1:
        raise ValueError("P must be >= 1")
    if P > w.size:
        raise ValueError(f"P={P} exceeds vocabulary size {w.size}")
    order = np.lexsort((np.arange(w.size), -w))[:P]
    return [(vocab.tokens[i], float(w[i])) for i in order]


def save_factorization(f: Factorization, path: str | Path) -> None:
    """Binary debug dump: magic, little-endian u64 dims (d, k, n), then W and H
    as row-major little-endian float64."""
    d, k = f.W.shape
    n = f.H.shape[1]
    with open(path, "wb") as fh:
        fh.write(_DUMP_MAGIC)
        fh.write(struct.pack("<3Q", d, k, n))
        fh.write(np.ascontiguousarray(f.W, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(f.H, dtype="<f8").tobytes())


def load_factorization(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "rb") as fh:
        magic = fh.read(len(_DUMP_MAGIC))
        if magic != _DUMP_MAGIC:
            raise NumericError(f"{path}: not a factorization dump")
        d, k, n = struct.unpack("<3Q", fh.read(24))
        W = np.frombuffer(fh.read(d * k * 8), dtype="<f8").reshape(d, k).copy()
        H = np.frombuffer(fh.read(k * n * 8), dtype="<f8").reshape(k, n).copy()
    return W, H
