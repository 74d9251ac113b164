import csv
import os

import numpy as np
import pytest
from PIL import Image


def write_png(path, array_01):
    """Save a [0,1] float array (HxW or HxWx3) as an 8-bit PNG."""
    a = np.asarray(array_01)
    data = np.round(np.clip(a, 0, 1) * 255).astype(np.uint8)
    Image.fromarray(data).save(path)


def write_manifest(directory, entries):
    """entries: list of (filename, label). Returns the manifest path."""
    path = os.path.join(directory, "manifest.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "label"])
        writer.writerows(entries)
    return path


def make_corpus(directory, n, size, label, seed, blur=0):
    """Write n random-noise PNGs plus a manifest; returns the manifest path."""
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(n):
        img = rng.uniform(0, 1, size=(size, size, 3))
        for _ in range(blur):
            img = (img + np.roll(img, 1, axis=0) + np.roll(img, -1, axis=0)
                   + np.roll(img, 1, axis=1) + np.roll(img, -1, axis=1)) / 5.0
        name = f"{label}_{i:03d}.png"
        write_png(os.path.join(directory, name), img)
        entries.append((name, label))
    return write_manifest(directory, entries)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
