import os

import numpy as np
import pytest

from synthval.errors import FormatError, IngestError, ValidationError
from synthval.imagecore import (ImageBuffer, TransformSpec, apply_transform,
                                load_dataset, psnr, read_manifest, resize)

from conftest import write_manifest, write_png


def random_image(rng, size=16, channels=3):
    return ImageBuffer(rng.uniform(0, 1, size=(size, size, channels)))


class TestImageBuffer:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            ImageBuffer(np.full((4, 4), 1.5))

    def test_rejects_bad_channel_count(self):
        with pytest.raises(ValidationError):
            ImageBuffer(np.zeros((4, 4, 2)))

    def test_grayscale_weights(self):
        img = ImageBuffer(np.stack([np.full((2, 2), 1.0), np.zeros((2, 2)),
                                    np.zeros((2, 2))], axis=-1))
        assert np.allclose(img.to_gray().plane(), 0.299)


class TestLoadDataset:
    def test_noop_resize(self, tmp_path):
        rng = np.random.default_rng(0)
        write_png(tmp_path / "a.png", rng.uniform(0, 1, (512, 512, 3)))
        manifest = read_manifest(write_manifest(tmp_path, [("a.png", "real")]))
        (img,) = load_dataset(manifest, 512, grayscale=False)
        assert img.data.shape == (512, 512, 3)

    def test_2to1_reduction_is_block_average(self, tmp_path):
        rng = np.random.default_rng(1)
        src = np.round(rng.uniform(0, 1, (64, 64, 3)) * 255) / 255.0
        write_png(tmp_path / "a.png", src)
        manifest = read_manifest(write_manifest(tmp_path, [("a.png", "real")]))
        (img,) = load_dataset(manifest, 32, grayscale=False)
        # oracle: mean of each 2x2 block
        oracle = src.reshape(32, 2, 32, 2, 3).mean(axis=(1, 3))
        assert np.allclose(img.data, oracle, atol=1e-12)

    def test_missing_file_names_path(self, tmp_path):
        manifest = read_manifest(write_manifest(tmp_path, [("gone.png", "real")]))
        with pytest.raises(IngestError, match="gone.png"):
            load_dataset(manifest, 16)

    def test_undecodable_image(self, tmp_path):
        (tmp_path / "bad.png").write_bytes(b"not a png")
        manifest = read_manifest(write_manifest(tmp_path, [("bad.png", "real")]))
        with pytest.raises(FormatError):
            load_dataset(manifest, 16)

    def test_empty_manifest(self, tmp_path):
        manifest = read_manifest(write_manifest(tmp_path, []))
        with pytest.raises(ValidationError):
            load_dataset(manifest, 16)

    def test_bad_label_rejected(self, tmp_path):
        with pytest.raises(FormatError, match="line 2"):
            read_manifest(write_manifest(tmp_path, [("a.png", "bogus")]))


class TestApplyTransform:
    def test_identity_is_bit_exact(self, rng):
        img = random_image(rng)
        out = apply_transform(img, TransformSpec())
        assert np.array_equal(out.data, img.data)

    def test_constant_invariant_under_translation(self):
        img = ImageBuffer(np.full((8, 8, 1), 0.37))
        out = apply_transform(img, TransformSpec(translate=(7, -3)))
        assert np.array_equal(out.data, img.data)

    def test_flip_is_involution(self, rng):
        img = random_image(rng)
        spec = TransformSpec(flip_horizontal=True)
        assert np.array_equal(apply_transform(apply_transform(img, spec), spec).data,
                              img.data)

    def test_translate_inverse(self, rng):
        img = random_image(rng)
        fwd = apply_transform(img, TransformSpec(translate=(3, -2)))
        back = apply_transform(fwd, TransformSpec(translate=(-3, 2)))
        assert np.array_equal(back.data, img.data)

    def test_translation_preserves_pixel_multiset(self, rng):
        img = random_image(rng)
        out = apply_transform(img, TransformSpec(translate=(5, 1)))
        assert np.allclose(np.sort(out.data.ravel()), np.sort(img.data.ravel()))

    def test_rot90_four_times_is_identity(self, rng):
        img = random_image(rng)
        out = img
        for _ in range(4):
            out = apply_transform(out, TransformSpec(rotate_degrees=90))
        assert np.array_equal(out.data, img.data)

    def test_gamma(self, rng):
        img = random_image(rng)
        out = apply_transform(img, TransformSpec(gamma=2.0))
        assert np.allclose(out.data, img.data ** 2)

    def test_nonfinite_spec_rejected(self, rng):
        with pytest.raises(ValidationError):
            apply_transform(random_image(rng), TransformSpec(rotate_degrees=float("nan")))

    def test_invalid_scale_rejected(self, rng):
        with pytest.raises(ValidationError):
            apply_transform(random_image(rng), TransformSpec(scale=-1.0))


class TestPsnr:
    def test_identical_hits_cap(self, rng):
        img = random_image(rng)
        assert psnr(img, img) == 100.0

    def test_uniform_offset_20db(self):
        a = ImageBuffer(np.full((8, 8), 0.3))
        b = ImageBuffer(np.full((8, 8), 0.4))
        assert psnr(a, b) == pytest.approx(20.0, abs=1e-9)

    def test_zero_vs_one_is_0db(self):
        a = ImageBuffer(np.zeros((8, 8)))
        b = ImageBuffer(np.ones((8, 8)))
        assert psnr(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric(self, rng):
        a, b = random_image(rng), random_image(rng)
        assert psnr(a, b) == psnr(b, a)

    def test_monotone_in_mse(self):
        a = ImageBuffer(np.zeros((8, 8)))
        scores = [psnr(a, ImageBuffer(np.full((8, 8), v))) for v in (0.1, 0.2, 0.4)]
        assert scores[0] > scores[1] > scores[2]

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValidationError):
            psnr(random_image(rng, 8), random_image(rng, 16))


def test_resize_upscale_stays_in_range(rng):
    img = random_image(rng, 8)
    out = resize(img, 32)
    assert out.data.shape == (32, 32, 3)
    assert out.data.min() >= 0 and out.data.max() <= 1
