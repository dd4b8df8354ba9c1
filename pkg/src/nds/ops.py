"""Image-wide operations: convolution and bilinear resampling."""

from __future__ import annotations

import numpy as np

from . import backend
from .errors import InvalidInputError
from .kernels import is_normalized


def convolve2d(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Per-channel 2-D correlation with replicate borders, clamped to [0,1].

    Accepts (H, W) or (H, W, C) float images; the kernel must be square with
    odd side length.
    """
    img = np.asarray(img, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    if kernel.ndim != 2 or kernel.shape[0] != kernel.shape[1] or kernel.shape[0] % 2 == 0:
        raise InvalidInputError(f"kernel must be square with odd side, got {kernel.shape}")
    squeeze = img.ndim == 2
    if squeeze:
        img = img[:, :, None]
    if img.ndim != 3:
        raise InvalidInputError(f"expected (H, W[, C]) image, got {img.shape}")
    out = backend.convolve2d_replicate(np.ascontiguousarray(img), kernel)
    out = np.clip(out, 0.0, 1.0)
    return out[:, :, 0] if squeeze else out


def bilinear_resize(img: np.ndarray, scale: float) -> np.ndarray:
    """Bilinear resampling with half-pixel centers (align-corners=false).

    Output dims are round(dim * scale), floored at 1.  Source coordinates are
    src = (dst + 0.5) * in/out - 0.5, clamped to the image; scale=1 is the
    identity.
    """
    img = np.asarray(img, dtype=np.float64)
    if scale <= 0:
        raise InvalidInputError(f"scale must be > 0, got {scale}")
    squeeze = img.ndim == 2
    if squeeze:
        img = img[:, :, None]
    h, w = img.shape[:2]
    out_h = max(1, int(round(h * scale)))
    out_w = max(1, int(round(w * scale)))
    out = _resample_axis(img, out_h, axis=0)
    out = _resample_axis(out, out_w, axis=1)
    return out[:, :, 0] if squeeze else out


def _resample_axis(img: np.ndarray, out_n: int, axis: int) -> np.ndarray:
    in_n = img.shape[axis]
    if out_n == in_n:
        return img
    src = (np.arange(out_n, dtype=np.float64) + 0.5) * (in_n / out_n) - 0.5
    src = np.clip(src, 0.0, in_n - 1.0)
    i0 = np.floor(src).astype(np.intp)
    i1 = np.minimum(i0 + 1, in_n - 1)
    frac = src - i0
    a = np.take(img, i0, axis=axis)
    b = np.take(img, i1, axis=axis)
    shape = [1, 1, 1]
    shape[axis] = out_n
    f = frac.reshape(shape)
    return a * (1.0 - f) + b * f


def ensure_image(img: np.ndarray, channels: int | None = None) -> np.ndarray:
    """Validate and return a float64 (H, W, C) image."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3:
        raise InvalidInputError(f"expected (H, W, C) image, got shape {img.shape}")
    if channels is not None and img.shape[2] != channels:
        raise InvalidInputError(
            f"expected {channels}-channel image, got {img.shape[2]} channels"
        )
    return img


__all__ = ["convolve2d", "bilinear_resize", "ensure_image", "is_normalized"]
