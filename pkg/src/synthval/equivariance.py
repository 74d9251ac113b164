"""Translation and rotation equivariance scores for image operators.

For an operator f and transform t, the commutator residual is
f(t(img)) - t(f(img)); the score is the PSNR of the residual pooled over
all sampled (image, transform) pairs. Exactly equivariant operators hit
the PSNR cap. MSE is pooled before the log so one divergent pair cannot
be hidden by averaging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .imagecore import ImageBuffer, rotate, translate_circular

ImageOperator = Callable[[ImageBuffer], ImageBuffer]


@dataclass(frozen=True)
class EquivarianceConfig:
    num_transforms: int = 64
    max_translate: int | None = None  # None = image_size // 8
    rotation_set: str = "exact90"  # exact90 | any_angle
    seed: int = 0
    psnr_cap_db: float = 100.0
    mask_central_disk: bool = True

    def __post_init__(self):
        if self.num_transforms < 1:
            raise ValidationError("num_transforms must be >= 1")
        if self.rotation_set not in ("exact90", "any_angle"):
            raise ValidationError(f"unknown rotation_set {self.rotation_set!r}")


def _disk_mask(size: int) -> np.ndarray:
    c = (size - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    return (yy - c) ** 2 + (xx - c) ** 2 <= (size / 2.0) ** 2


def _sample_translations(rng, count: int, max_t: int):
    out = []
    while len(out) < count:
        dx = int(rng.integers(-max_t, max_t + 1))
        dy = int(rng.integers(-max_t, max_t + 1))
        if (dx, dy) != (0, 0):
            out.append((dx, dy))
    return out


def eq_score(op: ImageOperator, images: list[ImageBuffer], family: str,
             cfg: EquivarianceConfig = EquivarianceConfig()) -> float:
    """EQ-T (family='translation') or EQ-R (family='rotation') in dB."""
    if not images:
        raise ValidationError("image list is empty")
    size = images[0].height
    for im in images:
        if im.height != size or im.width != size:
            raise ValidationError("all images must be square and the same size")
    if family not in ("translation", "rotation"):
        raise ValidationError(f"unknown family {family!r}")

    rng = np.random.default_rng(cfg.seed)
    if family == "translation":
        max_t = cfg.max_translate if cfg.max_translate is not None else size // 8
        if not 0 < max_t < size:
            raise ValidationError(f"max_translate must be in (0, {size}), got {max_t}")
        transforms = _sample_translations(rng, cfg.num_transforms, max_t)
        apply = lambda im, t: translate_circular(im, t[0], t[1])
        mask = None
    else:
        if cfg.rotation_set == "exact90":
            transforms = list(rng.choice([90.0, 180.0, 270.0], size=cfg.num_transforms))
        else:
            transforms = list(rng.uniform(0.0, 360.0, size=cfg.num_transforms))
        apply = rotate
        mask = _disk_mask(size) if cfg.mask_central_disk else None

    sq_sum = 0.0
    count = 0
    for img in images:
        f_img = op(img)
        if f_img.data.shape != img.data.shape:
            raise ValidationError("operator changed image dimensions")
        for t in transforms:
            lhs = op(apply(img, t))
            rhs = apply(f_img, t)
            resid = lhs.data - rhs.data
            if mask is not None:
                resid = resid[mask]
            sq_sum += float(np.sum(resid * resid))
            count += resid.size
    pooled_mse = sq_sum / count
    if pooled_mse == 0.0:
        return cfg.psnr_cap_db
    return min(10.0 * math.log10(1.0 / pooled_mse), cfg.psnr_cap_db)


# ---------------------------------------------------------------------------
# Built-in operators, addressable by name from the CLI.

def identity_op(img: ImageBuffer) -> ImageBuffer:
    return img


def gamma_op(g: float) -> ImageOperator:
    def apply(img: ImageBuffer) -> ImageBuffer:
        return ImageBuffer(np.clip(img.data ** g, 0.0, 1.0))
    return apply


def blur_op(radius: int) -> ImageOperator:
    """Circular box blur; commutes exactly with circular translation."""
    if radius < 1:
        raise ValidationError("blur radius must be >= 1")

    def apply(img: ImageBuffer) -> ImageBuffer:
        acc = np.zeros_like(img.data)
        shifts = [(dy, dx) for dy in range(-radius, radius + 1)
                  for dx in range(-radius, radius + 1)]
        for dy, dx in shifts:
            acc += np.roll(img.data, shift=(dy, dx), axis=(0, 1))
        return ImageBuffer(np.clip(acc / len(shifts), 0.0, 1.0))
    return apply


def mask_left_half_op(img: ImageBuffer) -> ImageBuffer:
    out = img.data.copy()
    out[:, img.width // 2:, :] = 0.0
    return ImageBuffer(out)


def resolve_operator(name: str) -> ImageOperator:
    """Parse an operator name: identity, gamma:<g>, blur:<radius>, mask-left-half."""
    if name == "identity":
        return identity_op
    if name == "mask-left-half":
        return mask_left_half_op
    if name.startswith("gamma:"):
        return gamma_op(float(name.split(":", 1)[1]))
    if name.startswith("blur:"):
        return blur_op(int(name.split(":", 1)[1]))
    raise ValidationError(f"unknown operator {name!r}")
