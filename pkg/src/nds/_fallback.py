"""Pure-numpy fallback for the compiled convolution core.

Accumulates shifted image views in row-major tap order, matching the compiled
extension's per-pixel accumulation order bit for bit.
"""

from __future__ import annotations

import numpy as np


def convolve2d_replicate(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    h, w = img.shape[:2]
    k = taps.shape[0]
    r = k // 2
    padded = np.pad(img, ((r, r), (r, r), (0, 0)), mode="edge")
    out = np.zeros_like(img)
    for ky in range(k):
        for kx in range(k):
            out += taps[ky, kx] * padded[ky : ky + h, kx : kx + w, :]
    return out
