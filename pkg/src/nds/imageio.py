"""8-bit image I/O.

Images travel through the package as float64 arrays of shape (H, W, C) with
values in [0, 1].  Quantization at the I/O boundary is exactly value/255 on
read and round(value*255) on write, so a read-write round trip of any 8-bit
file is lossless.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import InvalidInputError


def to_float(arr8: np.ndarray) -> np.ndarray:
    """uint8 -> float64 in [0,1], dividing by 255."""
    return arr8.astype(np.float64) / 255.0


def to_uint8(img: np.ndarray) -> np.ndarray:
    """float [0,1] -> uint8, round-half-away via floor(x*255 + 0.5)."""
    return np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def read_image(path: str | os.PathLike) -> np.ndarray:
    """Read a PNG (via Pillow) or binary PPM file as (H, W, 3) float64 in [0,1]."""
    path = os.fspath(path)
    if path.lower().endswith((".ppm", ".pnm")):
        return to_float(_read_ppm(path))
    from PIL import Image

    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return to_float(arr)


def write_image(path: str | os.PathLike, img: np.ndarray) -> None:
    """Write a (H, W, 3) or (H, W) float image as 8-bit PNG or binary PPM."""
    path = os.fspath(path)
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    if img.ndim != 3 or img.shape[2] != 3:
        raise InvalidInputError(f"expected (H, W, 3) image, got shape {img.shape}")
    arr8 = to_uint8(img)
    if path.lower().endswith((".ppm", ".pnm")):
        _write_ppm(path, arr8)
        return
    from PIL import Image

    Image.fromarray(arr8, mode="RGB").save(path)


def _read_ppm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    i = 0
    # header: magic, width, height, maxval; '#' starts a comment
    while len(tokens) < 4:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace():
            i += 1
        tokens.append(data[start:i])
    i += 1  # single whitespace after maxval
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != b"P6" or maxval != 255:
        raise InvalidInputError(f"unsupported PPM header {magic!r} maxval={maxval}")
    raster = np.frombuffer(data, dtype=np.uint8, count=h * w * 3, offset=i)
    return raster.reshape(h, w, 3).copy()


def _write_ppm(path: str, arr8: np.ndarray) -> None:
    h, w = arr8.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(arr8).tobytes())
