"""Classic graph propagation baselines and K-means.

Label spreading follows Zhou et al. (2004): iterate
F <- alpha * S * F + (1 - alpha) * Y with the symmetrically normalized
similarity S = D^{-1/2} W D^{-1/2}; the fixed point has the closed form
(1 - alpha) (I - alpha S)^{-1} Y, which is kept as an independent oracle.
The harmonic function solution of Zhu et al. (2003) solves the grounded
Laplacian system directly, and label propagation (Zhu, 2002) iterates the
row-normalized walk matrix with labeled rows re-clamped; on connected
graphs both converge to the same harmonic labeling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import FeatureSet, LabelSet
from .errors import ConfigError, DataError, OutOfRange, ShapeMismatch, SingularSystem


@dataclass(frozen=True)
class BaselineConfig:
    alpha: float = 0.99
    max_iterations: int = 1000
    tolerance: float = 1e-8
    kmeans_restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.tolerance < 0:
            raise ConfigError("tolerance must be >= 0")
        if self.kmeans_restarts < 1:
            raise ConfigError("kmeans_restarts must be >= 1")


def _check_graph(w, labels: LabelSet):
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ShapeMismatch("similarity matrix must be square")
    if labels.labels.shape[0] != n:
        raise ShapeMismatch("label vector must match similarity size")
    if np.any(w < 0):
        raise DataError("similarity weights must be non-negative")
    return w, n


def _one_hot_targets(labels: LabelSet) -> np.ndarray:
    n = labels.labels.shape[0]
    y = np.zeros((n, labels.num_classes))
    idx = labels.labeled_indices()
    y[idx, labels.labels[idx]] = 1.0
    return y


def _require_labeled_components(w, labels: LabelSet):
    """Every unlabeled vertex must reach a labeled one, else the harmonic
    system is singular."""
    n = w.shape[0]
    _, comp = connected_components(csr_matrix(w != 0), directed=False)
    labeled_comps = set(comp[labels.labeled_indices()].tolist())
    orphans = [i for i in range(n) if labels.labels[i] < 0 and comp[i] not in labeled_comps]
    if orphans:
        raise SingularSystem(
            f"unlabeled vertices {orphans[:8]} have no path to any labeled vertex"
        )


def label_spreading(
    w, labels: LabelSet, alpha: float = 0.99, cfg: BaselineConfig | None = None
) -> tuple[np.ndarray, dict]:
    """Iterative label spreading on the normalized similarity graph.

    Runs F <- alpha*S*F + (1-alpha)*Y from F(0)=Y until the L1 change
    drops below cfg.tolerance or cfg.max_iterations is hit. Rows are
    renormalized onto the simplex for decoding; isolated vertices (degree
    zero, so their S row vanishes) end up uniform and are flagged.

    Returns (assignment, meta); meta carries the raw fixed-point scores
    (before renormalization), iteration count, convergence flag and the
    isolated indices.
    """
    cfg = cfg or BaselineConfig()
    if not 0 < alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)")
    w, n = _check_graph(w, labels)
    if labels.labeled_indices().size == 0:
        raise DataError("label spreading needs at least one labeled sample")
    degree = w.sum(axis=1)
    isolated = np.flatnonzero(degree == 0)
    inv_sqrt = np.where(degree > 0, 1.0 / np.sqrt(np.where(degree > 0, degree, 1.0)), 0.0)
    s = w * inv_sqrt[:, None] * inv_sqrt[None, :]
    y = _one_hot_targets(labels)
    f = y.copy()
    converged = False
    iterations = 0
    for _ in range(cfg.max_iterations):
        f_next = alpha * (s @ f) + (1 - alpha) * y
        delta = float(np.abs(f_next - f).sum())
        f = f_next
        iterations += 1
        if delta < cfg.tolerance:
            converged = True
            break
    x = _normalize_for_decoding(f)
    meta = {
        "raw_scores": f,
        "iterations": iterations,
        "converged": converged,
        "isolated": [int(i) for i in isolated if labels.labels[i] < 0],
    }
    return x, meta


def label_spreading_closed_form(w, labels: LabelSet, alpha: float = 0.99) -> np.ndarray:
    """Exact fixed point (1-alpha)(I - alpha S)^{-1} Y; oracle for the
    iterative solver."""
    if not 0 < alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)")
    w, n = _check_graph(w, labels)
    degree = w.sum(axis=1)
    inv_sqrt = np.where(degree > 0, 1.0 / np.sqrt(np.where(degree > 0, degree, 1.0)), 0.0)
    s = w * inv_sqrt[:, None] * inv_sqrt[None, :]
    y = _one_hot_targets(labels)
    return (1 - alpha) * np.linalg.solve(np.eye(n) - alpha * s, y)


def _normalize_for_decoding(scores) -> np.ndarray:
    """Rows onto the simplex; zero rows become uniform."""
    sums = scores.sum(axis=1)
    m = scores.shape[1]
    out = np.where(sums[:, None] > 0, scores / np.where(sums > 0, sums, 1.0)[:, None], 1.0 / m)
    return out


def harmonic_function(w, labels: LabelSet) -> np.ndarray:
    """Gaussian-fields harmonic labeling via a direct grounded-Laplacian solve.

    Labeled rows are their one-hot labels; every unlabeled row solves
    (D_uu - W_uu) f_u = W_ul Y_l, i.e. equals the weighted average of its
    neighbors' rows. Raises SingularSystem when an unlabeled vertex has no
    path to any labeled vertex.
    """
    w, n = _check_graph(w, labels)
    if labels.labeled_indices().size == 0:
        raise DataError("harmonic labeling needs at least one labeled sample")
    _require_labeled_components(w, labels)
    labeled = labels.labeled_mask()
    unlabeled = ~labeled
    y = _one_hot_targets(labels)
    out = y.copy()
    u = np.flatnonzero(unlabeled)
    if u.size:
        l = np.flatnonzero(labeled)
        w_uu = w[np.ix_(u, u)]
        w_ul = w[np.ix_(u, l)]
        deg = w[u].sum(axis=1)
        laplacian_uu = np.diag(deg) - w_uu
        out[u] = np.linalg.solve(laplacian_uu, w_ul @ y[l])
    return out


def label_propagation(
    w, labels: LabelSet, cfg: BaselineConfig | None = None
) -> tuple[np.ndarray, dict]:
    """Random-walk label propagation with labeled rows re-clamped each step.

    Iterates F <- P F with P = D^{-1} W; on connected graphs this
    converges to the harmonic solution. If the step cap is hit first the
    best iterate is returned with converged=False in the metadata rather
    than raising.
    """
    cfg = cfg or BaselineConfig()
    w, n = _check_graph(w, labels)
    if labels.labeled_indices().size == 0:
        raise DataError("label propagation needs at least one labeled sample")
    _require_labeled_components(w, labels)
    labeled = labels.labeled_mask()
    y = _one_hot_targets(labels)
    degree = w.sum(axis=1)
    p = w / np.where(degree > 0, degree, 1.0)[:, None]
    m = labels.num_classes
    f = np.full((n, m), 1.0 / m)
    f[labeled] = y[labeled]
    converged = False
    iterations = 0
    for _ in range(cfg.max_iterations):
        f_next = p @ f
        f_next[labeled] = y[labeled]
        delta = float(np.abs(f_next - f).sum())
        f = f_next
        iterations += 1
        if delta < cfg.tolerance:
            converged = True
            break
    meta = {"iterations": iterations, "converged": converged}
    return _normalize_for_decoding(f), meta


# --- K-means -----------------------------------------------------------


def _wcss(points, assign, centroids) -> float:
    return float(np.sum((points - centroids[assign]) ** 2))


def _kmeans_pp_init(points, k, rng) -> np.ndarray:
    """k-means++ seeding: new centers drawn proportional to squared
    distance from the chosen set."""
    n = points.shape[0]
    centers = [int(rng.integers(n))]
    d2 = np.sum((points - points[centers[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining mass at chosen centers; pick any uncovered index
            candidates = np.setdiff1d(np.arange(n), centers)
            centers.append(int(candidates[0]) if candidates.size else centers[-1])
        else:
            centers.append(int(rng.choice(n, p=d2 / total)))
        d2 = np.minimum(d2, np.sum((points - points[centers[-1]]) ** 2, axis=1))
    return points[centers].copy()


def lloyd(points, centroids, max_iterations: int = 300) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Lloyd iterations from given centroids.

    Returns (assignment, centroids, per-iteration WCSS history). Empty
    clusters are repaired by re-seeding at the point farthest from its
    current centroid.
    """
    points = np.asarray(points, dtype=np.float64)
    centroids = np.array(centroids, dtype=np.float64)
    k = centroids.shape[0]
    history = []
    assign = None
    for _ in range(max_iterations):
        d2 = np.sum((points[:, None, :] - centroids[None]) ** 2, axis=2)
        new_assign = np.argmin(d2, axis=1)
        for c in range(k):
            members = new_assign == c
            if members.any():
                centroids[c] = points[members].mean(axis=0)
            else:
                residual = np.sum((points - centroids[new_assign]) ** 2, axis=1)
                far = int(np.argmax(residual))
                centroids[c] = points[far]
                new_assign[far] = c
        history.append(_wcss(points, new_assign, centroids))
        if assign is not None and np.array_equal(assign, new_assign):
            break
        assign = new_assign
    return assign, centroids, history


def kmeans(features, k: int, cfg: BaselineConfig | None = None) -> np.ndarray:
    """Best-of-restarts Lloyd's algorithm with k-means++ seeding.

    Deterministic given cfg.seed: restart r uses its own generator seeded
    from (seed, r) and the winner is the lowest (WCSS, restart index)
    pair.
    """
    cfg = cfg or BaselineConfig()
    points = features.data if isinstance(features, FeatureSet) else np.asarray(features, dtype=np.float64)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise OutOfRange(f"k must satisfy 1 <= k <= n, got k={k}, n={n}")
    best = None
    for restart in range(cfg.kmeans_restarts):
        rng = np.random.default_rng([cfg.seed, restart])
        centroids = _kmeans_pp_init(points, k, rng)
        assign, centroids, history = lloyd(points, centroids)
        score = history[-1]
        if best is None or score < best[0] - 1e-12:
            best = (score, assign)
    return best[1]
