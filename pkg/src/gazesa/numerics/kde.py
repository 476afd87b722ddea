"""Gaussian kernel density estimation in one or two dimensions.

Bandwidth follows Scott's rule: the kernel covariance is the (population)
sample covariance scaled by ``n ** (-2 / (d + 4))``. Evaluation avoids BLAS
so every query point is summed in the same fixed order no matter how the
queries are batched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateData

_BLOCK = 256


def scott_factor(n: int, d: int) -> float:
    return n ** (-1.0 / (d + 4))


@dataclass(frozen=True, eq=False)
class DensityModel:
    dim: int
    points: np.ndarray  # (n, dim)
    bandwidth: np.ndarray  # kernel covariance, (dim, dim)
    _whitened: np.ndarray
    _chol: np.ndarray
    _log_norm: float

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def _whiten(self, pts: np.ndarray) -> np.ndarray:
        L = self._chol
        if self.dim == 1:
            return pts / L[0, 0]
        z0 = pts[:, 0] / L[0, 0]
        z1 = (pts[:, 1] - L[1, 0] * z0) / L[1, 1]
        return np.column_stack([z0, z1])

    def _as_points(self, query) -> np.ndarray:
        q = np.asarray(query, dtype=float)
        if self.dim == 1:
            return q.reshape(-1, 1)
        return q.reshape(-1, 2)

    def _kernel_sums(self, zq: np.ndarray) -> np.ndarray:
        zt = self._whitened
        out = np.empty(zq.shape[0])
        for lo in range(0, zq.shape[0], _BLOCK):
            blk = zq[lo:lo + _BLOCK]
            sq = (blk[:, 0:1] - zt[:, 0][None, :]) ** 2
            if self.dim == 2:
                sq += (blk[:, 1:2] - zt[:, 1][None, :]) ** 2
            out[lo:lo + _BLOCK] = np.exp(-0.5 * sq).sum(axis=1)
        return out

    def evaluate(self, query) -> np.ndarray:
        """Density at each query point (1-D array of length m)."""
        zq = self._whiten(self._as_points(query))
        return self._kernel_sums(zq) * math.exp(self._log_norm)

    def logpdf(self, query) -> np.ndarray:
        zq = self._whiten(self._as_points(query))
        with np.errstate(divide="ignore"):
            return np.log(self._kernel_sums(zq)) + self._log_norm

    __call__ = evaluate


def kde_fit(points) -> DensityModel:
    """Fit a Gaussian KDE with Scott's-rule bandwidth.

    Args:
        points: 1-D array of scalars, or an ``(n, 2)`` array of pairs.

    Raises:
        DegenerateData: fewer than two points, a zero-variance dimension, or
            (in 2-D) perfectly collinear samples.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[1] not in (1, 2):
        raise ValueError("kde_fit expects 1-D samples or (n, 2) pairs")
    n, d = pts.shape
    if n < 2:
        raise DegenerateData(f"need at least 2 points, got {n}")
    if not np.all(np.isfinite(pts)):
        raise DegenerateData("non-finite training point")

    centered = pts - pts.mean(axis=0)
    cov = np.array([[np.mean(centered[:, i] * centered[:, j]) for j in range(d)] for i in range(d)])
    if np.any(np.diag(cov) <= 0):
        raise DegenerateData("zero variance in at least one dimension")
    h2 = scott_factor(n, d) ** 2
    bw = cov * h2
    if d == 1:
        chol = np.sqrt(bw)
    else:
        l00 = math.sqrt(bw[0, 0])
        l10 = bw[1, 0] / l00
        rem = bw[1, 1] - l10 * l10
        if rem <= bw[1, 1] * 1e-12:
            raise DegenerateData("samples are collinear; kernel covariance is singular")
        chol = np.array([[l00, 0.0], [l10, math.sqrt(rem)]])
    log_det_chol = float(np.sum(np.log(np.diag(chol))))
    log_norm = -math.log(n) - 0.5 * d * math.log(2 * math.pi) - log_det_chol

    model = DensityModel(d, pts, bw, np.empty((0, d)), chol, log_norm)
    object.__setattr__(model, "_whitened", model._whiten(pts))
    return model
