"""Similarity-matrix construction from per-sample embeddings.

The default pipeline is Pearson correlation followed by clamping of
negative entries; k-NN sparsification is optional. All functions accept
either a FeatureSet or a bare ``n x d`` array and return plain arrays.
"""
from __future__ import annotations

import numpy as np

from .core import FeatureSet
from .errors import ConfigError, NonFinite, OutOfRange, ShapeMismatch


def _as_data(features) -> np.ndarray:
    if isinstance(features, FeatureSet):
        return features.data
    return np.asarray(features, dtype=np.float64)


def pearson_matrix(features) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise Pearson correlation between sample embeddings.

    Each sample's feature vector is standardized (mean removed, scaled by
    its population standard deviation over the d coordinates), which makes
    the result invariant to per-sample positive affine transforms. The
    diagonal is fixed at zero.

    Samples with zero feature variance carry no correlation information;
    their rows and columns are set to 0 and their indices are returned as
    a flag array rather than raising, so a run survives uninformative
    samples.

    Returns
    -------
    (w, zero_variance) : n x n symmetric matrix with entries in [-1, 1]
        and zero diagonal, plus the indices of flagged zero-variance
        samples.
    """
    data = _as_data(features)
    if data.ndim != 2:
        raise ShapeMismatch("feature matrix must be 2-d")
    n, d = data.shape
    if n < 2 or d < 2:
        raise ShapeMismatch(f"need n >= 2 and d >= 2, got {n} x {d}")
    if not np.all(np.isfinite(data)):
        raise NonFinite("feature matrix contains non-finite entries")

    centered = data - data.mean(axis=1, keepdims=True)
    # population normalization (divide by d); the ratio is normalization
    # invariant but fixing it keeps tests bit-stable
    var = np.mean(centered**2, axis=1)
    zero_variance = np.flatnonzero(var == 0)
    scale = np.sqrt(np.where(var > 0, var, 1.0))
    z = centered / scale[:, None]
    w = (z @ z.T) / d
    w = (w + w.T) / 2.0  # kill last-ulp asymmetry from the matrix product
    if zero_variance.size:
        w[zero_variance, :] = 0.0
        w[:, zero_variance] = 0.0
    np.fill_diagonal(w, 0.0)
    return w, zero_variance


def handle_negatives(w, mode: str = "clamp") -> np.ndarray:
    """Map a possibly-negative similarity matrix into the non-negative regime.

    ``clamp`` zeroes every negative entry (a ReLU), which simply ignores
    anti-correlated pairs. ``shift`` subtracts the most negative entry
    from the whole matrix, then re-zeroes the diagonal; small spurious
    positives created this way can add up over large groups, which is why
    clamping is the default. Both are no-ops on already non-negative input.
    """
    w = np.asarray(w, dtype=np.float64)
    if mode == "clamp":
        return np.maximum(w, 0.0)
    if mode == "shift":
        lowest = w.min() if w.size else 0.0
        if lowest >= 0:
            return w.copy()
        shifted = w - lowest
        np.fill_diagonal(shifted, 0.0)
        return shifted
    raise ConfigError(f"unknown negative-handling mode {mode!r} (use clamp or shift)")


def sparsify_knn(w, k: int) -> np.ndarray:
    """Keep each row's k largest off-diagonal entries, then max-symmetrize.

    Ties prefer the lower column index so results are deterministic. The
    element-wise max symmetrization means a row can end up with at most 2k
    nonzeros: its own picks plus other rows that picked it.
    """
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ShapeMismatch("similarity matrix must be square")
    if not 1 <= k < n:
        raise OutOfRange(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    kept = np.zeros_like(w)
    for i in range(n):
        row = w[i].copy()
        row[i] = -np.inf  # never keep the diagonal
        # stable sort on the negated row: equal values keep ascending
        # column order, so ties break toward the lower index
        order = np.argsort(-row, kind="stable")[:k]
        kept[i, order] = w[i, order]
    return np.maximum(kept, kept.T)
