"""Float32 array-interchange bindings for external training loops.

Thin wrappers over the `nds` simulator: a trainer hands in C-contiguous
float32 (H, W, C) arrays and gets back freshly allocated float32 results
that match the `nds` CLI output exactly.  Inputs are validated at the
boundary — wrong dtype, layout, or shape raises BoundaryError naming the
offending argument instead of converting silently, because a silent copy
or cast would break the bit-exactness contract with the CLI.

Out-of-range values are clamped to [0, 1] with a warning; `clamp_count()`
reports how many calls needed clamping.  Every call owns its RNG, so
concurrent callers never interfere.
"""

from __future__ import annotations

import threading
import warnings

import numpy as np

from nds import MANIFEST_SCHEMA, RECIPE_SCHEMA
from nds import __version__ as NDS_VERSION
from nds.degrade import RecipeRanges, degrade, recipe_to_dict, sample_recipe
from nds.errors import NdsError
from nds.imageio import to_float, to_uint8
from nds.viewsel import CameraPose, select_references
from nds.wks import multiscale_l1, wks_loss

__version__ = "0.1.0"

__all__ = [
    "BoundaryError",
    "MANIFEST_SCHEMA",
    "NDS_VERSION",
    "RECIPE_SCHEMA",
    "clamp_count",
    "py_degrade",
    "py_multiscale_l1",
    "py_select_references",
    "py_wks_loss",
    "reset_clamp_count",
]


class BoundaryError(ValueError):
    """Raised when an argument violates the array-interchange contract."""


_clamp_lock = threading.Lock()
_clamp_count = 0


def clamp_count() -> int:
    """Number of inputs so far that carried values outside [0, 1]."""
    return _clamp_count


def reset_clamp_count() -> None:
    global _clamp_count
    with _clamp_lock:
        _clamp_count = 0


def _take_view(arr, field: str) -> np.ndarray:
    """Validate one borrowed input and promote it to the float64 core dtype."""
    global _clamp_count
    if not isinstance(arr, np.ndarray):
        raise BoundaryError(f"{field}: expected a numpy array, got {type(arr).__name__}")
    if arr.dtype != np.float32:
        raise BoundaryError(f"{field}: dtype must be float32, got {arr.dtype}")
    if not arr.flags["C_CONTIGUOUS"]:
        raise BoundaryError(f"{field}: array must be C-contiguous")
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise BoundaryError(f"{field}: expected shape (H, W, 3), got {arr.shape}")
    out = arr.astype(np.float64)  # exact widening; the borrowed view is untouched
    lo, hi = float(out.min()), float(out.max())
    if lo < 0.0 or hi > 1.0:
        with _clamp_lock:
            _clamp_count += 1
        warnings.warn(
            f"{field}: values outside [0, 1] (min {lo:.4g}, max {hi:.4g}) were clamped",
            stacklevel=3,
        )
        np.clip(out, 0.0, 1.0, out=out)
    return out


def _snap(img: np.ndarray) -> np.ndarray:
    """Quantize a result to the 8-bit grid the CLI writes, as float32."""
    return (to_float(to_uint8(img))).astype(np.float32)


def _ranges_from_mapping(ranges) -> RecipeRanges:
    if ranges is None:
        return RecipeRanges()
    try:
        return RecipeRanges(
            **{k: tuple(v) if isinstance(v, (list, tuple)) else v for k, v in ranges.items()}
        )
    except TypeError as exc:
        raise BoundaryError(f"ranges: {exc}") from exc


def py_degrade(target, refs, seed: int, ranges=None):
    """Degrade one target given two reference views.

    Returns (degraded, (ref1, ref2), recipe) where the images are float32
    quantized to the 8-bit grid — byte-identical to what the CLI `degrade`
    command writes for the same inputs and seed — and the recipe is a plain
    mapping matching the recipe.json schema.
    """
    tgt = _take_view(target, "target")
    if len(refs) != 2:
        raise BoundaryError(f"refs: expected exactly 2 reference views, got {len(refs)}")
    ref_imgs = [_take_view(r, f"refs[{i}]") for i, r in enumerate(refs)]
    try:
        recipe = sample_recipe(int(seed), _ranges_from_mapping(ranges))
        degraded, adj_refs = degrade(tgt, ref_imgs, recipe)
    except NdsError as exc:
        raise BoundaryError(str(exc)) from exc
    return _snap(degraded), (_snap(adj_refs[0]), _snap(adj_refs[1])), recipe_to_dict(recipe)


def py_wks_loss(pred, gt, real, patch: int = 7, stride: int = 4, k: int = 5) -> float:
    """Weighted top-K similarity between a prediction and a real view."""
    p = _take_view(pred, "pred")
    g = _take_view(gt, "gt")
    r = _take_view(real, "real")
    try:
        return wks_loss(p, g, r, patch, stride, k)
    except NdsError as exc:
        raise BoundaryError(str(exc)) from exc


def py_multiscale_l1(
    pred_full, pred_quarter, pred_eighth, gt_full, low_scale_weight: float = 0.1
) -> float:
    """Three-level L1 against bilinear pyramids of the ground truth."""
    args = [
        _take_view(pred_full, "pred_full"),
        _take_view(pred_quarter, "pred_quarter"),
        _take_view(pred_eighth, "pred_eighth"),
        _take_view(gt_full, "gt_full"),
    ]
    try:
        return multiscale_l1(*args, low_scale_weight=low_scale_weight)
    except NdsError as exc:
        raise BoundaryError(str(exc)) from exc


def py_select_references(poses, target: int, k: int = 2, grid_n: int = 16) -> list[int]:
    """Pick the k views with the least mutual matching cost to the target.

    `poses` is a list of camera records in the poses.json schema
    (fx, fy, cx, cy, w, h, R row-major 9 floats, center 3 floats).
    """
    cams = []
    for i, rec in enumerate(poses):
        try:
            cams.append(
                CameraPose(
                    fx=rec["fx"],
                    fy=rec["fy"],
                    cx=rec["cx"],
                    cy=rec["cy"],
                    rotation=np.asarray(rec["R"], dtype=np.float64).reshape(3, 3),
                    center=np.asarray(rec["center"], dtype=np.float64),
                    image_w=int(rec["w"]),
                    image_h=int(rec["h"]),
                )
            )
        except (KeyError, ValueError, NdsError) as exc:
            raise BoundaryError(f"poses[{i}]: {exc}") from exc
    if not 0 <= target < len(cams):
        raise BoundaryError(f"target: index {target} out of range for {len(cams)} poses")
    try:
        return select_references(cams, target, k=k, grid_n=grid_n)
    except NdsError as exc:
        raise BoundaryError(str(exc)) from exc
