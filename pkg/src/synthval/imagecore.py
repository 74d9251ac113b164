"""Image ingestion, standardization, geometric/photometric transforms, and PSNR.

Images live in a normalized [0, 1] pixel range regardless of source bit
depth, which keeps PSNR (peak = 1) well defined everywhere downstream.
Translation is circular (toroidal) so it is exactly invertible; rotation by
multiples of 90 degrees is a lossless index permutation, other angles use
bilinear resampling about the image center with zero fill.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import FormatError, IngestError, ValidationError

# ITU-R BT.601 luma weights for RGB -> grayscale
_LUMA = np.array([0.299, 0.587, 0.114])

VALID_LABELS = ("real", "synthetic")


@dataclass(frozen=True)
class ImageBuffer:
    """Raster image with float64 pixels in [0, 1], shape (height, width, channels)."""

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=np.float64)
        if a.ndim == 2:
            a = a[:, :, None]
        if a.ndim != 3 or a.shape[2] not in (1, 3):
            raise ValidationError(f"image must be HxW or HxWxC with C in (1,3), got shape {a.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValidationError(f"image dimensions must be >= 1, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("image contains non-finite pixel values")
        if a.min() < 0.0 or a.max() > 1.0:
            raise ValidationError("pixel values must lie in [0, 1]")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "data", a)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def plane(self) -> np.ndarray:
        """2-D view for single-channel images."""
        if self.channels != 1:
            raise ValidationError("plane() requires a grayscale image")
        return self.data[:, :, 0]

    def to_gray(self) -> "ImageBuffer":
        if self.channels == 1:
            return self
        g = self.data @ _LUMA
        return ImageBuffer(np.clip(g, 0.0, 1.0))


@dataclass(frozen=True)
class TransformSpec:
    """Geometric/photometric transform parameters.

    The identity spec maps any image to itself bit-exactly. Stages apply in
    the order: flips, scale, rotation, translation, gamma.
    """

    translate: tuple[int, int] = (0, 0)
    rotate_degrees: float = 0.0
    flip_horizontal: bool = False
    flip_vertical: bool = False
    scale: float = 1.0
    gamma: float = 1.0

    def validate(self) -> None:
        vals = (*self.translate, self.rotate_degrees, self.scale, self.gamma)
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValidationError("transform fields must be finite")
        if self.scale <= 0:
            raise ValidationError(f"scale must be > 0, got {self.scale}")
        if self.gamma <= 0:
            raise ValidationError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class DatasetManifest:
    """List of (path, label) entries; paths are relative to root."""

    entries: list[tuple[str, str]]
    root: str = "."

    def paths(self, label: str | None = None) -> list[str]:
        return [os.path.join(self.root, p) for p, lab in self.entries
                if label is None or lab == label]


def read_manifest(path: str) -> DatasetManifest:
    """Parse a manifest CSV with header ``path,label``."""
    if not os.path.exists(path):
        raise IngestError(f"manifest not found: {path}")
    entries = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["path", "label"]:
            raise FormatError(f"manifest {path}: expected header 'path,label'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise FormatError(f"manifest {path}: line {lineno} has {len(row)} fields")
            p, lab = row[0].strip(), row[1].strip()
            if lab not in VALID_LABELS:
                raise FormatError(f"manifest {path}: line {lineno}: label {lab!r} not in {VALID_LABELS}")
            entries.append((p, lab))
    return DatasetManifest(entries=entries, root=os.path.dirname(os.path.abspath(path)))


def _bilinear_sample(plane: np.ndarray, ys: np.ndarray, xs: np.ndarray,
                     fill: float | None) -> np.ndarray:
    """Sample a 2-D array at fractional coordinates.

    fill=None clamps to the edge; a float fills out-of-support samples.
    """
    h, w = plane.shape
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    fy = ys - y0
    fx = xs - x0

    def at(yy, xx):
        yc = np.clip(yy, 0, h - 1)
        xc = np.clip(xx, 0, w - 1)
        return plane[yc, xc]

    top = at(y0, x0) * (1 - fx) + at(y0, x0 + 1) * fx
    bot = at(y0 + 1, x0) * (1 - fx) + at(y0 + 1, x0 + 1) * fx
    out = top * (1 - fy) + bot * fy
    if fill is not None:
        inside = (ys >= 0) & (ys <= h - 1) & (xs >= 0) & (xs <= w - 1)
        out = np.where(inside, out, fill)
    return out


def resize(img: ImageBuffer, target: int) -> ImageBuffer:
    """Bilinear resize to target x target using half-pixel sample centers.

    For an exact 2:1 reduction this reduces to averaging each 2x2 block.
    """
    if target < 1:
        raise ValidationError(f"target size must be >= 1, got {target}")
    if img.height == target and img.width == target:
        return img
    sy = img.height / target
    sx = img.width / target
    ys = (np.arange(target) + 0.5) * sy - 0.5
    xs = (np.arange(target) + 0.5) * sx - 0.5
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    out = np.stack(
        [_bilinear_sample(img.data[:, :, c], yy, xx, fill=None) for c in range(img.channels)],
        axis=-1,
    )
    return ImageBuffer(np.clip(out, 0.0, 1.0))


def load_image(path: str, target_size: int, grayscale: bool) -> ImageBuffer:
    if not os.path.exists(path):
        raise IngestError(f"image not found: {path}")
    try:
        with Image.open(path) as im:
            im = im.convert("L" if grayscale else "RGB")
            arr = np.asarray(im, dtype=np.float64) / 255.0
    except UnidentifiedImageError as exc:
        raise FormatError(f"cannot decode image: {path}") from exc
    return resize(ImageBuffer(arr), target_size)


def load_dataset(manifest: DatasetManifest, target_size: int = 512,
                 grayscale: bool = False, label: str | None = None) -> list[ImageBuffer]:
    """Load every manifest entry, standardized to target_size x target_size.

    Order matches the manifest. Optionally filter to one label.
    """
    if target_size < 8:
        raise ValidationError(f"target_size must be >= 8, got {target_size}")
    paths = manifest.paths(label)
    if not paths:
        raise ValidationError("manifest selects no images")
    return [load_image(p, target_size, grayscale) for p in paths]


def _rotate_any(plane: np.ndarray, degrees: float) -> np.ndarray:
    h, w = plane.shape
    cy = (h - 1) / 2.0
    cx = (w - 1) / 2.0
    th = math.radians(degrees)
    c, s = math.cos(th), math.sin(th)
    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    # inverse rotation: destination -> source
    dy = yy - cy
    dx = xx - cx
    src_y = cy + (c * dy + s * dx)
    src_x = cx + (-s * dy + c * dx)
    return _bilinear_sample(plane, src_y, src_x, fill=0.0)


def _scale_about_center(plane: np.ndarray, scale: float) -> np.ndarray:
    h, w = plane.shape
    cy = (h - 1) / 2.0
    cx = (w - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    src_y = cy + (yy - cy) / scale
    src_x = cx + (xx - cx) / scale
    return _bilinear_sample(plane, src_y, src_x, fill=0.0)


def translate_circular(img: ImageBuffer, dx: int, dy: int) -> ImageBuffer:
    """Toroidal shift: +dx moves content right, +dy moves it down."""
    return ImageBuffer(np.roll(img.data, shift=(dy, dx), axis=(0, 1)))


def rotate(img: ImageBuffer, degrees: float) -> ImageBuffer:
    """Rotate about the image center; exact permutation for 90-degree multiples."""
    deg = float(degrees) % 360.0
    if deg == 0.0:
        return img
    if deg % 90.0 == 0.0:
        k = int(deg // 90)
        return ImageBuffer(np.rot90(img.data, k=k, axes=(0, 1)))
    out = np.stack([_rotate_any(img.data[:, :, c], deg) for c in range(img.channels)], axis=-1)
    return ImageBuffer(np.clip(out, 0.0, 1.0))


def apply_transform(img: ImageBuffer, spec: TransformSpec) -> ImageBuffer:
    """Apply a TransformSpec. Output dimensions always equal input dimensions."""
    spec.validate()
    out = img
    if spec.flip_horizontal:
        out = ImageBuffer(out.data[:, ::-1, :])
    if spec.flip_vertical:
        out = ImageBuffer(out.data[::-1, :, :])
    if spec.scale != 1.0:
        planes = [_scale_about_center(out.data[:, :, c], spec.scale)
                  for c in range(out.channels)]
        out = ImageBuffer(np.clip(np.stack(planes, axis=-1), 0.0, 1.0))
    if spec.rotate_degrees % 360.0 != 0.0:
        out = rotate(out, spec.rotate_degrees)
    dx, dy = spec.translate
    if (dx, dy) != (0, 0):
        out = translate_circular(out, int(dx), int(dy))
    if spec.gamma != 1.0:
        out = ImageBuffer(np.clip(out.data ** spec.gamma, 0.0, 1.0))
    return out


def mse(a: ImageBuffer, b: ImageBuffer) -> float:
    if a.data.shape != b.data.shape:
        raise ValidationError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")
    d = a.data - b.data
    return float(np.mean(d * d))


def psnr(a: ImageBuffer, b: ImageBuffer, cap_db: float = 100.0) -> float:
    """Peak signal-to-noise ratio in dB, peak value 1, capped at cap_db."""
    if cap_db <= 0:
        raise ValidationError(f"cap_db must be > 0, got {cap_db}")
    m = mse(a, b)
    if m == 0.0:
        return cap_db
    return min(10.0 * math.log10(1.0 / m), cap_db)
