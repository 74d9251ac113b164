"""Feature embeddings for distributional metrics and their Gaussian summaries.

The built-in embedder is a seeded random projection of downsampled
grayscale pixels: deterministic, dependency-free, and exchangeable with
externally computed deep features imported through the CSV round-trip.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, IngestError, InsufficientSamplesError, ValidationError
from .imagecore import ImageBuffer, resize

_EMBED_SIDE = 64
_EMBED_PIXELS = _EMBED_SIDE * _EMBED_SIDE


@dataclass(frozen=True)
class FeatureMatrix:
    """n x d matrix of per-image feature vectors."""

    rows: np.ndarray
    source_tag: str = ""

    def __post_init__(self):
        a = np.asarray(self.rows, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValidationError(f"feature matrix must be 2-D with n,d >= 1, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("feature matrix contains non-finite entries")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "rows", a)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class GaussianSummary:
    """Mean vector and covariance matrix of a feature set."""

    mu: np.ndarray
    sigma: np.ndarray
    n: int

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if mu.ndim != 1 or sigma.shape != (mu.size, mu.size):
            raise ValidationError("mu must be a d-vector and sigma d x d")
        asym = np.abs(sigma - sigma.T)
        tol = 1e-12 * np.maximum(1.0, np.abs(sigma))
        if np.any(asym > tol):
            raise ValidationError("sigma is not symmetric within tolerance")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def d(self) -> int:
        return self.mu.size


def embed_dataset(images: list[ImageBuffer], d: int, seed: int) -> FeatureMatrix:
    """Project each image to a d-vector with a fixed seeded Gaussian matrix.

    Each image is resized to 64x64 grayscale and flattened; the flattened
    vectors are centered by their dataset column mean and projected by a
    4096 x d matrix with entries N(0, 1/4096). Bit-identical for fixed
    (pixel content, d, seed).
    """
    if not images:
        raise ValidationError("image list is empty")
    if d < 2:
        raise ValidationError(f"feature dimension must be >= 2, got {d}")
    flat = np.stack([resize(im.to_gray(), _EMBED_SIDE).plane().ravel() for im in images])
    flat = flat - flat.mean(axis=0)
    rng = np.random.default_rng(seed)
    proj = rng.normal(0.0, 1.0 / np.sqrt(_EMBED_PIXELS), size=(_EMBED_PIXELS, d))
    return FeatureMatrix(flat @ proj, source_tag=f"random-projection(d={d},seed={seed})")


def write_features(path: str, features: FeatureMatrix) -> None:
    """Write a FeatureMatrix as CSV with header f0..f{d-1}, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(features.d)])
        for row in features.rows:
            writer.writerow([format(v, ".17g") for v in row])


def read_features(path: str) -> FeatureMatrix:
    if not os.path.exists(path):
        raise IngestError(f"feature file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise FormatError(f"{path}: missing header row")
        d = len(header)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d:
                raise FormatError(f"{path}: row {lineno} has {len(row)} cells, expected {d}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise FormatError(f"{path}: row {lineno} has a non-numeric cell") from exc
    if not rows:
        raise FormatError(f"{path}: no data rows")
    return FeatureMatrix(np.array(rows), source_tag=path)


def gaussian_summary(features: FeatureMatrix) -> GaussianSummary:
    """Column mean and unbiased (n-1) covariance, symmetrized."""
    if features.n < 2:
        raise InsufficientSamplesError(f"need n >= 2 for a covariance, got n={features.n}")
    mu = features.rows.mean(axis=0)
    centered = features.rows - mu
    sigma = centered.T @ centered / (features.n - 1)
    sigma = (sigma + sigma.T) / 2.0
    return GaussianSummary(mu=mu, sigma=sigma, n=features.n)
