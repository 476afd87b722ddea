"""First principal component of z-scored features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TooFewRows

TIE_TOL = 1e-9
SIGN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PcaModel:
    means: np.ndarray
    stds: np.ndarray
    loadings: np.ndarray
    eigenvalue: float
    explained_variance_ratio: float

    def zscore(self, matrix) -> np.ndarray:
        X = np.asarray(matrix, dtype=float)
        safe = np.where(self.stds > 0, self.stds, 1.0)
        return np.where(self.stds > 0, (X - self.means) / safe, 0.0)

    def transform(self, matrix) -> np.ndarray:
        return (self.zscore(matrix) * self.loadings).sum(axis=1)

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
            "loadings": self.loadings.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio,
        }


def orient(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its loadings sum positive (or, for a zero sum, so its
    first nonzero entry is positive)."""
    s = float(v.sum())
    if abs(s) > SIGN_TOL:
        return -v if s < 0 else v
    for c in v:
        if abs(c) > SIGN_TOL:
            return -v if c < 0 else v
    return v


def _leading_vector(cov: np.ndarray) -> tuple[np.ndarray, float]:
    k = cov.shape[0]
    vals, vecs = np.linalg.eigh(cov)
    top = vals[-1]
    tied = vecs[:, vals >= top - TIE_TOL]
    if tied.shape[1] == 1:
        return tied[:, 0], float(top)
    # several equally large eigenvalues: project the standard basis onto
    # the tied eigenspace and take the first vector that survives
    for i in range(k):
        proj = tied @ tied[i]
        norm = np.linalg.norm(proj)
        if norm > 1e-6:
            return proj / norm, float(top)
    return np.eye(k)[0], float(top)


def pca_first_component(matrix) -> tuple[PcaModel, np.ndarray]:
    """Project rows onto the first principal component of the z-scored columns.

    Columns are standardized with the population standard deviation; a
    constant column becomes all zeros. The loading vector is the unit
    eigenvector of the z-score covariance with the largest eigenvalue, ties
    broken toward the lowest-index axis, oriented by :func:`orient`.

    Returns:
        The fitted model and one score per row (the scores have zero mean).
    """
    X = np.asarray(matrix, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected an (n_rows, n_features) matrix")
    n, k = X.shape
    if n < 2:
        raise TooFewRows(f"need at least 2 rows, got {n}")
    if k < 2:
        raise ValueError(f"need at least 2 features, got {k}")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")

    means = X.mean(axis=0)
    stds = np.sqrt(((X - means) ** 2).mean(axis=0))
    stds = np.where(stds > 1e-15 * np.maximum(1.0, np.abs(means)), stds, 0.0)
    model = PcaModel(means, stds, np.zeros(k), 0.0, 0.0)
    Z = model.zscore(X)
    cov = np.array([[np.mean(Z[:, i] * Z[:, j]) for j in range(k)] for i in range(k)])
    vec, top = _leading_vector(cov)
    vec = orient(vec)
    trace = float(np.trace(cov))
    ratio = min(1.0, max(0.0, top / trace)) if trace > 0 else 0.0
    model = PcaModel(means, stds, vec, top, ratio)
    return model, (Z * vec).sum(axis=1)
