"""Gaussian kernel synthesis.

Kernels are square float64 arrays with odd side length, non-negative taps,
normalized to sum 1.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError


def _check_size(size: int) -> None:
    if size < 1 or size % 2 == 0:
        raise InvalidParameterError(f"kernel size must be odd and >= 1, got {size}")


def gaussian_kernel_iso(size: int, sigma: float) -> np.ndarray:
    """Isotropic Gaussian kernel on the centered integer grid, normalized."""
    _check_size(size)
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be > 0, got {sigma}")
    r = size // 2
    y, x = np.mgrid[-r : r + 1, -r : r + 1].astype(np.float64)
    taps = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def gaussian_kernel_aniso(
    size: int, sigma_major: float, sigma_minor: float, angle_deg: float
) -> np.ndarray:
    """Oriented anisotropic Gaussian kernel.

    Taps are proportional to exp(-0.5 x^T Sigma^-1 x) with
    Sigma = R(theta) diag(sigma_major^2, sigma_minor^2) R(theta)^T, where the
    major axis at angle 0 lies along the horizontal (x) direction.
    """
    _check_size(size)
    if sigma_major <= 0 or sigma_minor <= 0:
        raise InvalidParameterError(
            f"sigmas must be > 0, got ({sigma_major}, {sigma_minor})"
        )
    theta = np.deg2rad(angle_deg)
    c, s = np.cos(theta), np.sin(theta)
    r = size // 2
    y, x = np.mgrid[-r : r + 1, -r : r + 1].astype(np.float64)
    # rotate the grid into the kernel's principal frame
    u = c * x + s * y
    v = -s * x + c * y
    q = (u / sigma_major) ** 2 + (v / sigma_minor) ** 2
    taps = np.exp(-0.5 * q)
    return taps / taps.sum()


def is_normalized(kernel: np.ndarray, tol: float = 1e-6) -> bool:
    return bool(np.all(kernel >= 0.0) and abs(kernel.sum() - 1.0) < tol)
