"""Average power spectra, angular slices, and spectral divergence.

White noise has a flat spectrum; blurring attenuates high frequencies, and
the log-power divergence between the two averaged spectra picks that up.
"""

import numpy as np

from synthval import (average_power_spectrum, spectral_divergence,
                      spectrum_slice)
from synthval.imagecore import ImageBuffer

rng = np.random.default_rng(3)


def boxblur(img):
    s = sum(np.roll(np.roll(img.data, dy, 0), dx, 1)
            for dy in (-1, 0, 1) for dx in (-1, 0, 1))
    return ImageBuffer(s / 9.0)


noise = [ImageBuffer(rng.uniform(0, 1, (32, 32, 1))) for _ in range(200)]
smooth = [boxblur(im) for im in noise]

spec_noise = average_power_spectrum(noise)
spec_smooth = average_power_spectrum(smooth)

print(f"spectral divergence (noise vs blurred) = "
      f"{spectral_divergence(spec_noise, spec_smooth):.4f}")
print(f"spectral divergence (noise vs itself)  = "
      f"{spectral_divergence(spec_noise, spec_noise):.4f}")

# horizontal slice from DC outward: blurred power falls off with frequency
print(f"\n{'bin':>4} {'noise':>12} {'blurred':>12}")
a = spectrum_slice(spec_noise, 0)
b = spectrum_slice(spec_smooth, 0)
for i in range(0, len(a), 3):
    print(f"{i:>4} {a[i]:>12.2f} {b[i]:>12.2f}")
