import numpy as np
import pytest

from nds import _fallback, backend
from nds.errors import InvalidInputError
from nds.kernels import gaussian_kernel_aniso, gaussian_kernel_iso
from nds.ops import bilinear_resize, convolve2d


def naive_convolve(img, taps):
    """Quadruple-loop correlation with replicate borders (no clamp)."""
    h, w, c = img.shape
    k = taps.shape[0]
    r = k // 2
    out = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            for ky in range(k):
                for kx in range(k):
                    sy = min(max(y + ky - r, 0), h - 1)
                    sx = min(max(x + kx - r, 0), w - 1)
                    out[y, x] += taps[ky, kx] * img[sy, sx]
    return out


def test_delta_kernel_is_identity(rng):
    img = rng.random((9, 7, 3))
    delta = np.zeros((3, 3))
    delta[1, 1] = 1.0
    assert np.array_equal(convolve2d(img, delta), img)


def test_constant_image_preserved(rng):
    img = np.full((6, 6, 3), 0.37)
    k = gaussian_kernel_iso(5, 1.2)
    assert np.allclose(convolve2d(img, k), 0.37, atol=1e-12)


def test_matches_naive_oracle(rng):
    img = rng.random((8, 8, 3))
    k = gaussian_kernel_aniso(3, 0.9, 0.4, 25.0)
    assert np.max(np.abs(convolve2d(img, k) - naive_convolve(img, k))) < 1e-6


@pytest.mark.parametrize("h,w,ks", [(5, 5, 3), (16, 16, 7), (11, 16, 5), (16, 3, 3)])
def test_oracle_sweep(rng, h, w, ks):
    img = rng.random((h, w, 3))
    k = gaussian_kernel_iso(ks, 1.1)
    assert np.max(np.abs(convolve2d(img, k) - naive_convolve(img, k))) < 1e-6


def test_normalized_kernel_preserves_bounds(rng):
    img = rng.random((12, 12, 3))
    k = gaussian_kernel_iso(5, 0.8)
    out = convolve2d(img, k)
    assert out.max() <= img.max() + 1e-12
    assert out.min() >= img.min() - 1e-12


def test_backends_agree_bit_exactly(rng):
    img = np.ascontiguousarray(rng.random((20, 17, 3)))
    k = gaussian_kernel_aniso(7, 1.2, 0.3, 63.0)
    ext = backend.convolve2d_replicate(img, np.ascontiguousarray(k))
    fall = _fallback.convolve2d_replicate(img, k)
    assert np.array_equal(ext, fall)


def test_single_channel_supported(rng):
    img = rng.random((8, 8))
    k = gaussian_kernel_iso(3, 0.7)
    out = convolve2d(img, k)
    assert out.shape == (8, 8)


def test_bad_kernel_rejected(rng):
    with pytest.raises(InvalidInputError):
        convolve2d(rng.random((4, 4, 3)), np.ones((2, 2)) / 4)


# --- bilinear resize ---


def test_resize_identity(rng):
    img = rng.random((7, 5, 3))
    assert np.array_equal(bilinear_resize(img, 1.0), img)


def test_resize_constant(rng):
    img = np.full((8, 6, 3), 0.42)
    for s in (0.5, 0.25, 2.0):
        assert np.allclose(bilinear_resize(img, s), 0.42, atol=1e-12)


def test_resize_ramp_half_matches_hand_computation():
    # 4x4 ramp at scale 0.5: half-pixel centers land mid-block, so each output
    # pixel is the mean of its 2x2 block
    ramp = (np.arange(16, dtype=np.float64).reshape(4, 4) / 15.0)[:, :, None]
    out = bilinear_resize(ramp, 0.5)[:, :, 0]
    expected = np.array([[2.5, 4.5], [10.5, 12.5]]) / 15.0
    assert np.allclose(out, expected, atol=1e-12)


def test_resize_output_dims():
    img = np.zeros((256, 448, 3))
    assert bilinear_resize(img, 0.25).shape == (64, 112, 3)
    assert bilinear_resize(img, 0.125).shape == (32, 56, 3)
