"""Distribution distance between image sets (Frechet / FID-style).

Images are embedded with a perceptual extractor's final stage, pooled to
vectors, and per-set Gaussians are fit; the distance is the Frechet
distance between those Gaussians. The trace of the matrix square root is
computed through symmetric eigendecompositions, clamping tiny negative
eigenvalues.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import torch

from ..losses.perceptual import embed

logger = logging.getLogger(__name__)

_EIG_CLAMP = -1e-6


@dataclass(frozen=True)
class GaussianStats:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=np.float64))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=np.float64))
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov {cov.shape} does not match mean dimension {mean.size}")
        if not np.allclose(cov, cov.T, atol=1e-8):
            raise ValueError("covariance is not symmetric within 1e-8")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", (cov + cov.T) / 2.0)

    @property
    def dim(self) -> int:
        return self.mean.size


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(matrix)
    if vals.min() < _EIG_CLAMP:
        raise ValueError(f"matrix is not PSD within tolerance (min eigenvalue {vals.min():.3e})")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    """||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2))."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    diff = a.mean - b.mean
    root_a = _psd_sqrt(a.cov)
    inner = root_a @ b.cov @ root_a
    vals = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    if vals.min() < _EIG_CLAMP * max(1.0, abs(vals).max()):
        raise ValueError("product covariance is not PSD within tolerance")
    tr_sqrt = np.sqrt(np.clip(vals, 0.0, None)).sum()
    return float(diff @ diff + np.trace(a.cov) + np.trace(b.cov) - 2.0 * tr_sqrt)


def fit_gaussian(vectors: np.ndarray) -> GaussianStats:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] < 1:
        raise ValueError("need a (N, D) matrix with N >= 1")
    mean = vectors.mean(axis=0)
    if vectors.shape[0] == 1:
        cov = np.zeros((vectors.shape[1], vectors.shape[1]))
    else:
        cov = np.cov(vectors, rowvar=False)
    return GaussianStats(mean, np.atleast_2d(cov))


def embed_images(images: Iterable[torch.Tensor], extractor) -> np.ndarray:
    vecs = []
    with torch.no_grad():
        for img in images:
            vecs.append(embed(extractor, img).detach().cpu().numpy().astype(np.float64))
    if not vecs:
        raise ValueError("empty image set")
    return np.stack(vecs)


def fid_score(
    images_a: Sequence[torch.Tensor], images_b: Sequence[torch.Tensor], extractor
) -> float:
    """Frechet distance between Gaussian fits of pooled final-stage features."""
    va = embed_images(images_a, extractor)
    vb = embed_images(images_b, extractor)
    d = va.shape[1]
    for label, v in (("first", va), ("second", vb)):
        if v.shape[0] < d + 1:
            logger.warning(
                "%s image set has %d samples for %d feature dims; covariance is rank-deficient",
                label, v.shape[0], d,
            )
    return frechet_distance(fit_gaussian(va), fit_gaussian(vb))
