"""Truncated SVD of the weighted pair-pattern matrix and row-cosine queries."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

from .pairs import WordPair

logger = logging.getLogger(__name__)

# below this many cells, a dense LAPACK SVD is both exact and fast
DENSE_CELL_LIMIT = 4_000_000
ARPACK_TOL = 1e-10


@dataclass
class TruncatedFactorization:
    U: np.ndarray
    sigma: np.ndarray
    Vt: np.ndarray | None
    rank: int

    @property
    def k_effective(self) -> int:
        return len(self.sigma)

    def reconstruct(self) -> np.ndarray:
        if self.Vt is None:
            raise ValueError("right singular vectors were discarded")
        return (self.U * self.sigma) @ self.Vt


def _numerical_rank(sigma: np.ndarray, shape: tuple[int, int]) -> int:
    if len(sigma) == 0 or sigma[0] == 0:
        return 0
    tol = sigma[0] * max(shape) * np.finfo(float).eps
    return int(np.sum(sigma > tol))


def _orient_signs(U: np.ndarray, Vt: np.ndarray) -> None:
    # largest-magnitude entry of each left vector made positive, in place
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U *= signs
    Vt *= signs[:, None]


def truncated_svd(matrix, k: int, seed: int = 0) -> TruncatedFactorization:
    """Top ``min(k, rank)`` singular triplets of ``matrix`` (dense or sparse).

    Small matrices go through a dense LAPACK SVD. Larger ones use ARPACK on
    the sparse matrix with a start vector drawn from ``seed``.
    """
    m, n = matrix.shape
    if m < 2 or n < 1:
        raise ValueError(f"matrix too small for SVD: {m}x{n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    data = matrix.data if sp.issparse(matrix) else np.asarray(matrix)
    if not np.all(np.isfinite(data)):
        raise ValueError("matrix contains non-finite values")

    small = min(m, n)
    if m * n <= DENSE_CELL_LIMIT or k >= small - 1:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
        U, sigma, Vt = np.linalg.svd(dense, full_matrices=False)
        rank = _numerical_rank(sigma, (m, n))
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(small)
        A = sp.csr_matrix(matrix, dtype=float)
        if m < n:
            A = A.T.tocsr()
        U, sigma, Vt = svds(A, k=k, v0=v0, tol=ARPACK_TOL, solver="arpack")
        order = np.argsort(-sigma, kind="stable")
        U, sigma, Vt = U[:, order], sigma[order], Vt[order]
        if m < n:
            U, Vt = Vt.T, U.T
        # only a lower bound: singular values past k are never computed here
        rank = _numerical_rank(sigma, (m, n))
    k_eff = min(k, rank)
    if k > k_eff:
        warnings.warn(f"k={k} exceeds matrix rank; clamped to {k_eff}", stacklevel=2)
    U = np.ascontiguousarray(U[:, :k_eff])
    Vt = np.ascontiguousarray(Vt[:k_eff])
    _orient_signs(U, Vt)
    return TruncatedFactorization(U, sigma[:k_eff].copy(), Vt, rank)


@dataclass
class ProjectedSpace:
    """Row vectors for word pairs; every relational cosine is taken between them."""

    vectors: np.ndarray | sp.csr_matrix
    row_map: Mapping[WordPair, int]
    norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if sp.issparse(self.vectors):
            self.vectors = sp.csr_matrix(self.vectors)
            self.norms = np.sqrt(np.asarray(self.vectors.multiply(self.vectors).sum(axis=1)).ravel())
        else:
            self.vectors = np.asarray(self.vectors, dtype=float)
            self.norms = np.linalg.norm(self.vectors, axis=1)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, pair: WordPair) -> bool:
        return pair in self.row_map

    def vector(self, pair: WordPair) -> np.ndarray | None:
        row = self.row_map.get(pair)
        if row is None:
            return None
        if sp.issparse(self.vectors):
            return self.vectors[row].toarray().ravel()
        return self.vectors[row]

    def _dot(self, i: int, j: int) -> float:
        if sp.issparse(self.vectors):
            return float(self.vectors[i].multiply(self.vectors[j]).sum())
        return float(self.vectors[i] @ self.vectors[j])


def project(f: TruncatedFactorization, row_map: Mapping[WordPair, int]) -> ProjectedSpace:
    return ProjectedSpace(f.U * f.sigma, dict(row_map))


def row_cosine(space: ProjectedSpace, p: WordPair, q: WordPair) -> float | None:
    """Cosine between the rows of ``p`` and ``q``; None if either row is missing or zero."""
    i, j = space.row_map.get(p), space.row_map.get(q)
    if i is None or j is None:
        return None
    denom = space.norms[i] * space.norms[j]
    if denom == 0:
        return None
    return max(-1.0, min(1.0, space._dot(i, j) / denom))


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    denom = math.sqrt(float(u @ u) * float(v @ v))
    return float(u @ v) / denom if denom else math.nan
