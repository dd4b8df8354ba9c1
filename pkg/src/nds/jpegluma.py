"""JPEG-style lossy transfer for a single gray channel.

Implements the lossy part of baseline JPEG on an [0,255] channel: 8x8 block
DCT-II (orthonormal), quantization with the standard luminance table scaled by
the IJG quality formula, dequantization, inverse DCT, clamp.  No entropy
coding: the goal is the quantization transfer function, not a bitstream.
Edge blocks are padded by replication.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dctn, idctn

from .errors import InvalidParameterError

# Annex K luminance quantization table
BASE_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


def quant_table(quality: int) -> np.ndarray:
    """IJG quality scaling of the base luminance table; entries clamped to [1, 255]."""
    if not 1 <= quality <= 100:
        raise InvalidParameterError(f"quality must be in [1,100], got {quality}")
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    tbl = np.floor((BASE_LUMA_TABLE * scale + 50.0) / 100.0)
    return np.clip(tbl, 1.0, 255.0)


def jpeg_luma_compress(gray: np.ndarray, quality: int) -> np.ndarray:
    """Quantize-dequantize a [0,255] gray channel through 8x8 block DCT."""
    tbl = quant_table(quality)
    gray = np.asarray(gray, dtype=np.float64)
    h, w = gray.shape
    ph, pw = -h % 8, -w % 8
    padded = np.pad(gray, ((0, ph), (0, pw)), mode="edge") - 128.0
    bh, bw = padded.shape[0] // 8, padded.shape[1] // 8
    blocks = padded.reshape(bh, 8, bw, 8).transpose(0, 2, 1, 3)
    coeffs = dctn(blocks, type=2, norm="ortho", axes=(2, 3))
    coeffs = np.round(coeffs / tbl) * tbl
    rec = idctn(coeffs, type=2, norm="ortho", axes=(2, 3))
    rec = rec.transpose(0, 2, 1, 3).reshape(bh * 8, bw * 8) + 128.0
    return np.clip(rec[:h, :w], 0.0, 255.0)
