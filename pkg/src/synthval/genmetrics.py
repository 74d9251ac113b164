"""Distributional similarity metrics between real and synthetic feature sets.

FID is the squared Frechet distance between Gaussian fits; KID is the
unbiased squared MMD under the cubic polynomial kernel
k(x, y) = (<x, y>/d + 1)^3, block-averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import FeatureMatrix, GaussianSummary, gaussian_summary
from .errors import InsufficientSamplesError, NumericError, ValidationError

_EIG_CLAMP = 1e-8


@dataclass(frozen=True)
class KidConfig:
    block_size: int = 100
    degree: int = 3
    coef: float = 1.0
    shuffle_seed: int | None = None  # None = keep input order

    def __post_init__(self):
        if self.block_size < 2:
            raise ValidationError(f"block_size must be >= 2, got {self.block_size}")


def _sqrt_eigvals(a: GaussianSummary, b: GaussianSummary) -> np.ndarray:
    """Eigenvalues of (Sa^1/2 Sb Sa^1/2), clamped per tolerance policy."""
    wa, va = np.linalg.eigh(a.sigma)
    if wa.min() < -_EIG_CLAMP:
        raise NumericError(f"covariance not PSD: eigenvalue {wa.min():.3e}")
    wa = np.clip(wa, 0.0, None)
    root_a = (va * np.sqrt(wa)) @ va.T
    m = root_a @ b.sigma @ root_a
    wm = np.linalg.eigvalsh((m + m.T) / 2.0)
    if wm.min() < -_EIG_CLAMP:
        raise NumericError(f"covariance product not PSD: eigenvalue {wm.min():.3e}")
    return np.clip(wm, 0.0, None)


def frechet_distance(a: GaussianSummary, b: GaussianSummary) -> float:
    """Squared Frechet distance between two Gaussians.

    ||mu_a - mu_b||^2 + Tr(Sa + Sb - 2 (Sa Sb)^{1/2}), with the matrix
    square root evaluated through the symmetric form Sa^{1/2} Sb Sa^{1/2}.
    """
    if a.d != b.d:
        raise ValidationError(f"dimension mismatch: {a.d} vs {b.d}")
    diff = a.mu - b.mu
    wb = np.linalg.eigvalsh(b.sigma)
    if wb.min() < -_EIG_CLAMP:
        raise NumericError(f"covariance not PSD: eigenvalue {wb.min():.3e}")
    cross = _sqrt_eigvals(a, b)
    value = float(diff @ diff + np.trace(a.sigma) + np.trace(b.sigma)
                  - 2.0 * np.sum(np.sqrt(cross)))
    if value < -1e-6:
        raise NumericError(f"Frechet distance evaluated to {value:.3e} < -1e-6")
    return max(value, 0.0)


def fid(real: FeatureMatrix, synth: FeatureMatrix) -> float:
    if real.d != synth.d:
        raise ValidationError(f"dimension mismatch: {real.d} vs {synth.d}")
    return frechet_distance(gaussian_summary(real), gaussian_summary(synth))


def _poly_kernel(x: np.ndarray, y: np.ndarray, degree: int, coef: float) -> np.ndarray:
    d = x.shape[1]
    return (x @ y.T / d + coef) ** degree


def _mmd2_unbiased(x: np.ndarray, y: np.ndarray, degree: int, coef: float) -> float:
    n, m = x.shape[0], y.shape[0]
    kxx = _poly_kernel(x, x, degree, coef)
    kyy = _poly_kernel(y, y, degree, coef)
    kxy = _poly_kernel(x, y, degree, coef)
    sum_xx = (kxx.sum() - np.trace(kxx)) / (n * (n - 1))
    sum_yy = (kyy.sum() - np.trace(kyy)) / (m * (m - 1))
    return float(sum_xx + sum_yy - 2.0 * kxy.mean())


def kid(real: FeatureMatrix, synth: FeatureMatrix,
        cfg: KidConfig = KidConfig()) -> tuple[float, float]:
    """Block-averaged unbiased MMD^2 estimate and its standard error.

    Blocks are disjoint; with fewer samples than one block, a single block
    of size min(n_real, n_synth) is used. The estimate may be slightly
    negative by unbiasedness.
    """
    if real.d != synth.d:
        raise ValidationError(f"dimension mismatch: {real.d} vs {synth.d}")
    if real.n < 2 or synth.n < 2:
        raise InsufficientSamplesError("KID needs at least 2 samples per side")
    x, y = real.rows, synth.rows
    if cfg.shuffle_seed is not None:
        rng = np.random.default_rng(cfg.shuffle_seed)
        x = x[rng.permutation(len(x))]
        y = y[rng.permutation(len(y))]
    block = min(cfg.block_size, real.n, synth.n)
    n_blocks = min(real.n, synth.n) // block
    estimates = [
        _mmd2_unbiased(x[i * block:(i + 1) * block], y[i * block:(i + 1) * block],
                       cfg.degree, cfg.coef)
        for i in range(n_blocks)
    ]
    estimate = float(np.mean(estimates))
    if n_blocks > 1:
        std_error = float(np.std(estimates, ddof=1) / np.sqrt(n_blocks))
    else:
        std_error = 0.0
    return estimate, std_error
