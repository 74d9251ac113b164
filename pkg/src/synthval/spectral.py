"""Frequency-domain fidelity analysis.

Convention: unnormalized forward DFT (numpy's default), so Parseval reads
sum(x^2) = sum(|X|^2) / N^2. Power spectra carry the 1/N^2 factor;
amplitude spectra are raw |X|. All maps are centered with the DC bin at
(N/2, N/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .imagecore import ImageBuffer

SLICE_ANGLES = (0, 45, 90, 135)


@dataclass(frozen=True)
class SpectrumMap:
    """Centered N x N nonnegative spectrum, DC at (N/2, N/2)."""

    values: np.ndarray
    kind: str  # amplitude | power
    log_scaled: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2 != 0:
            raise ValidationError(f"spectrum must be square with even side, got {v.shape}")
        if self.kind not in ("amplitude", "power"):
            raise ValidationError(f"unknown spectrum kind {self.kind!r}")
        if v.min() < 0:
            raise ValidationError("spectrum values must be nonnegative")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def log_view(self) -> np.ndarray:
        """log(1 + value) display transform."""
        return np.log1p(self.values)


def _check_input(img: ImageBuffer) -> np.ndarray:
    if img.channels != 1:
        raise ValidationError("spectral analysis requires grayscale input")
    if img.height != img.width or img.height % 2 != 0:
        raise ValidationError(f"image must be square with even side, got {img.height}x{img.width}")
    return img.plane()


def fft2_amplitude(img: ImageBuffer) -> SpectrumMap:
    """Amplitude spectrum |X| of the unnormalized 2-D DFT, centered."""
    x = _check_input(img)
    amp = np.abs(np.fft.fftshift(np.fft.fft2(x)))
    return SpectrumMap(values=amp, kind="amplitude")


def power_spectrum(img: ImageBuffer) -> SpectrumMap:
    x = _check_input(img)
    n = x.shape[0]
    pw = np.abs(np.fft.fftshift(np.fft.fft2(x))) ** 2 / (n * n)
    return SpectrumMap(values=pw, kind="power")


def average_power_spectrum(images: list[ImageBuffer]) -> SpectrumMap:
    """Per-bin mean of |X|^2 / N^2 over an image corpus."""
    if not images:
        raise ValidationError("image list is empty")
    shape = images[0].data.shape
    for im in images:
        if im.data.shape != shape:
            raise ValidationError("all images must share one size")
    acc = np.zeros(shape[:2])
    for im in images:
        acc += power_spectrum(im).values
    return SpectrumMap(values=acc / len(images), kind="power")


def spectrum_slice(spec: SpectrumMap, angle_degrees: int) -> np.ndarray:
    """Profile of length N/2 along a lattice-exact ray from the DC bin.

    0 degrees steps along +u (first axis), 45 along the diagonal, 90 along
    +v, 135 along the anti-diagonal; index 0 is the DC bin.
    """
    if angle_degrees not in SLICE_ANGLES:
        raise ValidationError(f"angle must be one of {SLICE_ANGLES}, got {angle_degrees}")
    n = spec.size
    c = n // 2
    k = np.arange(n // 2)
    steps = {0: (1, 0), 45: (1, 1), 90: (0, 1), 135: (1, -1)}
    du, dv = steps[angle_degrees]
    u = (c + k * du) % n
    v = (c + k * dv) % n
    return spec.values[u, v].copy()


def spectral_divergence(real_spec: SpectrumMap, synth_spec: SpectrumMap) -> float:
    """Mean squared difference of log(1+value) over all bins; 0 iff identical."""
    if real_spec.size != synth_spec.size:
        raise ValidationError(f"size mismatch: {real_spec.size} vs {synth_spec.size}")
    if real_spec.kind != synth_spec.kind:
        raise ValidationError(f"kind mismatch: {real_spec.kind} vs {synth_spec.kind}")
    d = np.log1p(real_spec.values) - np.log1p(synth_spec.values)
    return float(np.mean(d * d))
