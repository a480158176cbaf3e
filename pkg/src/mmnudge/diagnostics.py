"""Embedding-space geometry: 2-D PCA projections and modality cluster statistics.

The PCA is computed in-house by power iteration with deflation. When there
are fewer points than dimensions (110 points in R^1536 for the shipped
corpus) the iteration runs on the n x n Gram matrix of the centered data
and components are mapped back through the data matrix.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mmnudge._io import write_atomic
from mmnudge.errors import NudgeError, ValidationError

PLOT_FIELDS = ["id", "modality", "x", "y", "centered"]


class ConvergenceError(NudgeError, ArithmeticError):
    def __init__(self, message, iterations):
        super().__init__(message)
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (n_components, d), orthonormal rows
    explained_variance: np.ndarray  # non-increasing, sample variance (ddof=1)
    iterations: tuple = ()


def _power_iteration(A, start, tol, max_iter, zero_tol):
    """Dominant eigenpair of a symmetric PSD matrix.

    Returns ``(eigenvalue, vector, iterations)``; eigenvalue 0 and vector
    ``None`` when ``A`` has no direction above ``zero_tol``.
    """
    v = start / np.linalg.norm(start)
    for it in range(1, max_iter + 1):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw <= zero_tol:
            return 0.0, None, it
        w /= nw
        if np.linalg.norm(w - v) < tol:
            return float(w @ A @ w), w, it
        v = w
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations", max_iter)


def _fill_direction(previous, d):
    """Unit vector orthogonal to ``previous``, taken from the standard basis."""
    best, best_norm = None, -1.0
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        for c in previous:
            e -= (c @ e) * c
        n = np.linalg.norm(e)
        if n > 1e-12 and n > best_norm + 1e-12:
            best, best_norm = e / n, n
        if n > 0.5:
            break
    return best


def _orient(c):
    j = int(np.argmax(np.abs(c)))
    return -c if c[j] < 0 else c


def fit_pca(vectors, n_components=2, tol=1e-10, max_iter=10_000) -> PcaModel:
    X = np.asarray([np.asarray(v, dtype=np.float64) for v in vectors])
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValidationError("PCA needs at least 2 vectors of equal dimension")
    n, d = X.shape
    if not 1 <= n_components <= d:
        raise ValidationError(f"n_components must be in [1, {d}]")
    mean = X.mean(axis=0)
    Xc = X - mean
    gram = n <= d
    A = (Xc @ Xc.T if gram else Xc.T @ Xc) / (n - 1)
    zero_tol = 1e-13 * max(float(np.trace(A)), np.finfo(float).tiny)
    start = np.random.default_rng(0).standard_normal(A.shape[0])

    components, variances, iterations = [], [], []
    for _ in range(n_components):
        lam, v, it = _power_iteration(A, start, tol, max_iter, zero_tol)
        iterations.append(it)
        if v is None or lam <= zero_tol:
            lam, c = 0.0, _fill_direction(components, d)
        else:
            A = A - lam * np.outer(v, v)
            c = Xc.T @ v if gram else v.copy()
            for prev in components:
                c -= (prev @ c) * prev
            c /= np.linalg.norm(c)
        components.append(_orient(c))
        variances.append(max(lam, 0.0))
    return PcaModel(mean, np.array(components), np.array(variances), tuple(iterations))


def project(model: PcaModel, vectors) -> np.ndarray:
    X = np.asarray([np.asarray(v, dtype=np.float64) for v in vectors])
    return (X - model.mean) @ model.components.T


@dataclass
class ClusterStats:
    centroid_norm: dict
    intra_cosine: dict  # per modality
    mean_intra_cosine: float
    mean_inter_cosine: float | None  # None with a single modality

    def to_dict(self) -> dict:
        return {
            "centroid_norm": self.centroid_norm,
            "intra_cosine": self.intra_cosine,
            "mean_intra_cosine": self.mean_intra_cosine,
            "mean_inter_cosine": self.mean_inter_cosine,
        }


def _unit_rows(X):
    norms = np.linalg.norm(X, axis=1)
    keep = norms > 0  # cosine is undefined for zero vectors; they are skipped
    return X[keep] / norms[keep, None]


def cluster_stats(groups: dict) -> ClusterStats:
    """Centroid norms and mean pairwise cosines, over all pairs.

    ``groups`` maps modality to an (n, d) array or a list of vectors.
    """
    mats = {k: np.atleast_2d(np.asarray(v, dtype=np.float64)) for k, v in groups.items() if len(v)}
    if not mats:
        raise ValidationError("cluster_stats needs at least one non-empty group")
    units = {k: _unit_rows(X) for k, X in mats.items()}

    centroid_norm = {k: float(np.linalg.norm(X.mean(axis=0))) for k, X in mats.items()}
    intra, intra_sum, intra_n = {}, 0.0, 0
    for k, U in units.items():
        m = U.shape[0]
        if m < 2:
            intra[k] = None
            continue
        G = np.clip(U @ U.T, -1.0, 1.0)
        s = float((G.sum() - np.trace(G)) / 2)
        pairs = m * (m - 1) // 2
        intra[k] = s / pairs
        intra_sum += s
        intra_n += pairs

    inter = None
    keys = list(units)
    if len(keys) > 1:
        total, count = 0.0, 0
        for a in range(len(keys)):
            for b in range(a + 1, len(keys)):
                G = np.clip(units[keys[a]] @ units[keys[b]].T, -1.0, 1.0)
                total += float(G.sum())
                count += G.size
        inter = total / count if count else None
    return ClusterStats(centroid_norm, intra, intra_sum / intra_n if intra_n else None, inter)


def plot_rows(ids, modalities, points, centered: bool) -> list[tuple]:
    return [(i, m, float(x), float(y), centered) for i, m, (x, y) in zip(ids, modalities, points)]


def plot_data_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_FIELDS)
    for item_id, modality, x, y, centered in rows:
        w.writerow([item_id, modality, repr(float(x)), repr(float(y)), "true" if centered else "false"])
    return buf.getvalue()


def emit_plot_data(rows, path):
    """Write projection rows ``(id, modality, x, y, centered)`` as CSV."""
    write_atomic(path, plot_data_csv(rows))
    return Path(path)


def read_plot_data(path) -> list[tuple]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [(r["id"], r["modality"], float(r["x"]), float(r["y"]), r["centered"] == "true")
                for r in csv.DictReader(fh)]
