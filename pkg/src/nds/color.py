"""sRGB <-> CIELAB conversion (D65 white point, 2-degree observer).

Lab buffers are float64 arrays of shape (H, W, 3) holding L in [0, 100] and
unbounded a, b.  Conversion back to sRGB clamps out-of-gamut values to [0, 1].
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

# sRGB D65 linear-RGB <-> XYZ
_RGB2XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ2RGB = np.linalg.inv(_RGB2XYZ)

_WHITE = np.array([0.95047, 1.0, 1.08883])  # D65

_EPS = (6.0 / 29.0) ** 3
_KAPPA = (29.0 / 6.0) ** 2 / 3.0  # slope of the linear segment of f


def _srgb_decode(v: np.ndarray) -> np.ndarray:
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def _srgb_encode(v: np.ndarray) -> np.ndarray:
    v = np.clip(v, 0.0, None)
    return np.where(v <= 0.0031308, v * 12.92, 1.055 * v ** (1.0 / 2.4) - 0.055)


def _f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _EPS, np.cbrt(t), _KAPPA * t + 4.0 / 29.0)


def _f_inv(u: np.ndarray) -> np.ndarray:
    return np.where(u > 6.0 / 29.0, u**3, (u - 4.0 / 29.0) / _KAPPA)


def srgb_to_lab(img: np.ndarray) -> np.ndarray:
    """Convert a (H, W, 3) sRGB image in [0,1] to a CIELAB buffer."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise InvalidInputError(f"srgb_to_lab needs a 3-channel image, got {img.shape}")
    xyz = _srgb_decode(img) @ _RGB2XYZ.T
    fxyz = _f(xyz / _WHITE)
    lab = np.empty_like(fxyz)
    lab[..., 0] = 116.0 * fxyz[..., 1] - 16.0
    lab[..., 1] = 500.0 * (fxyz[..., 0] - fxyz[..., 1])
    lab[..., 2] = 200.0 * (fxyz[..., 1] - fxyz[..., 2])
    return lab


def lab_to_srgb(lab: np.ndarray) -> np.ndarray:
    """Convert a CIELAB buffer back to sRGB, clamping out-of-gamut values to [0,1]."""
    lab = np.asarray(lab, dtype=np.float64)
    if lab.ndim != 3 or lab.shape[2] != 3:
        raise InvalidInputError(f"lab_to_srgb needs a (H, W, 3) buffer, got {lab.shape}")
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    xyz = np.stack([_f_inv(fx), _f_inv(fy), _f_inv(fz)], axis=-1) * _WHITE
    rgb = _srgb_encode(xyz @ _XYZ2RGB.T)
    return np.clip(rgb, 0.0, 1.0)
