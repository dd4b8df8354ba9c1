"""Weighted top-K patch-similarity metric and multi-scale L1.

Pure metric kernels: no gradients, no networks.  Patch comparisons run on all
channels flattened; candidate patches come from unfolding a real rendered
exemplar image.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .ops import bilinear_resize, ensure_image


@dataclass(frozen=True)
class PatchGrid:
    patch_size: int
    stride: int
    patches: np.ndarray  # (N, patch_size*patch_size*C) flattened, scan order
    origins: np.ndarray  # (N, 2) (row, col)


@dataclass(frozen=True)
class TopKMatch:
    k: int
    indices: np.ndarray  # (K,) candidate indices, ascending triple distance
    scores: np.ndarray  # (K,) triple distances
    weights: np.ndarray  # (K,) softmax weights, sum 1


def unfold_patches(img: np.ndarray, patch_size: int, stride: int) -> PatchGrid:
    """All patch_size x patch_size patches at the given stride, row-major."""
    img = ensure_image(img)
    h, w, c = img.shape
    if patch_size > min(h, w):
        raise InvalidInputError(
            f"patch size {patch_size} exceeds image dims ({h}, {w})"
        )
    if stride < 1:
        raise InvalidInputError(f"stride must be >= 1, got {stride}")
    rows = np.arange(0, h - patch_size + 1, stride)
    cols = np.arange(0, w - patch_size + 1, stride)
    windows = np.lib.stride_tricks.sliding_window_view(img, (patch_size, patch_size, c))
    sel = windows[np.ix_(rows, cols)][:, :, 0]
    patches = sel.reshape(len(rows) * len(cols), patch_size * patch_size * c)
    origins = np.stack(
        [np.repeat(rows, len(cols)), np.tile(cols, len(rows))], axis=1
    )
    return PatchGrid(patch_size=patch_size, stride=stride, patches=np.ascontiguousarray(patches), origins=origins)


def topk_buddies(
    g_pred: np.ndarray,
    g_gt: np.ndarray,
    candidates: PatchGrid,
    k: int,
    alpha: float = 1.0,
    beta: float = 1.0,
) -> TopKMatch:
    """The K candidates minimizing alpha*||g-g_pred||^2 + beta*||g-g_gt||^2.

    Sorted ascending; ties resolve to the earlier scan position.
    """
    g_pred = np.asarray(g_pred, dtype=np.float64).ravel()
    g_gt = np.asarray(g_gt, dtype=np.float64).ravel()
    cand = candidates.patches
    if g_pred.shape[0] != cand.shape[1] or g_gt.shape[0] != cand.shape[1]:
        raise InvalidInputError("query patches must match candidate patch size")
    if not 1 <= k <= len(cand):
        raise InvalidInputError(f"k={k} out of range for {len(cand)} candidates")
    scores = alpha * ((cand - g_pred) ** 2).sum(axis=1) + beta * (
        (cand - g_gt) ** 2
    ).sum(axis=1)
    order = np.argsort(scores, kind="stable")[:k]
    weights = wks_weights(cand[order], g_pred)
    return TopKMatch(k=k, indices=order, scores=scores[order], weights=weights)


def wks_weights(top_patches: np.ndarray, g_pred: np.ndarray) -> np.ndarray:
    """Softmax over d_k = -0.5*||g*_k - g_pred||^2, max-subtracted for stability."""
    g_pred = np.asarray(g_pred, dtype=np.float64).ravel()
    d = -0.5 * ((np.asarray(top_patches, dtype=np.float64) - g_pred) ** 2).sum(axis=1)
    e = np.exp(d - d.max())
    return e / e.sum()


def wks_loss(
    pred: np.ndarray,
    gt: np.ndarray,
    real: np.ndarray,
    patch_size: int,
    stride: int,
    k: int,
    alpha: float = 1.0,
    beta: float = 1.0,
    reduction: str = "mean",
    candidates: PatchGrid | None = None,
) -> float:
    """Weighted top-K similarity over aligned pred/gt, candidates from `real`.

    Per query patch i: sum_k w_ik * ||g*_ik - g_pred_i||_1 with the softmax
    weights of `wks_weights`; reduced over patches by mean (default) or sum.
    """
    pred = ensure_image(pred)
    gt = ensure_image(gt)
    if pred.shape != gt.shape:
        raise InvalidInputError(f"pred {pred.shape} and gt {gt.shape} must align")
    if reduction not in ("mean", "sum"):
        raise InvalidInputError(f"unknown reduction {reduction!r}")
    grid_pred = unfold_patches(pred, patch_size, stride)
    grid_gt = unfold_patches(gt, patch_size, stride)
    if candidates is None:
        candidates = unfold_patches(ensure_image(real), patch_size, stride)
    if candidates.patches.shape[1] != grid_pred.patches.shape[1]:
        raise InvalidInputError("candidate patch size must match query patch size")
    per_patch = np.empty(len(grid_pred.patches))
    for i, (gp, gg) in enumerate(zip(grid_pred.patches, grid_gt.patches)):
        match = topk_buddies(gp, gg, candidates, k, alpha=alpha, beta=beta)
        diffs = np.abs(candidates.patches[match.indices] - gp).sum(axis=1)
        per_patch[i] = (match.weights * diffs).sum()
    return float(per_patch.mean() if reduction == "mean" else per_patch.sum())


def wks_per_patch(
    pred: np.ndarray,
    gt: np.ndarray,
    real: np.ndarray,
    patch_size: int,
    stride: int,
    k: int,
    alpha: float = 1.0,
    beta: float = 1.0,
) -> np.ndarray:
    """Per-query-patch weighted top-K terms (the unreduced loss)."""
    grid_pred = unfold_patches(ensure_image(pred), patch_size, stride)
    grid_gt = unfold_patches(ensure_image(gt), patch_size, stride)
    candidates = unfold_patches(ensure_image(real), patch_size, stride)
    out = np.empty(len(grid_pred.patches))
    for i, (gp, gg) in enumerate(zip(grid_pred.patches, grid_gt.patches)):
        match = topk_buddies(gp, gg, candidates, k, alpha=alpha, beta=beta)
        diffs = np.abs(candidates.patches[match.indices] - gp).sum(axis=1)
        out[i] = (match.weights * diffs).sum()
    return out


def multiscale_l1(
    pred_full: np.ndarray,
    pred_quarter: np.ndarray,
    pred_eighth: np.ndarray,
    gt_full: np.ndarray,
    low_scale_weight: float = 0.1,
) -> float:
    """Mean-abs L1 at full scale plus weighted L1 at the 1/4 and 1/8 scales.

    Ground-truth pyramids are built with `bilinear_resize`; predicted scales
    must match them exactly.
    """
    pred_full = ensure_image(pred_full)
    gt_full = ensure_image(gt_full)
    if pred_full.shape != gt_full.shape:
        raise InvalidInputError(
            f"full-scale shapes differ: {pred_full.shape} vs {gt_full.shape}"
        )
    gt_quarter = bilinear_resize(gt_full, 0.25)
    gt_eighth = bilinear_resize(gt_full, 0.125)
    pred_quarter = ensure_image(pred_quarter)
    pred_eighth = ensure_image(pred_eighth)
    if pred_quarter.shape != gt_quarter.shape or pred_eighth.shape != gt_eighth.shape:
        raise InvalidInputError(
            "pyramid shapes must match bilinear_resize of the ground truth"
        )
    l_full = float(np.abs(pred_full - gt_full).mean())
    l_quarter = float(np.abs(pred_quarter - gt_quarter).mean())
    l_eighth = float(np.abs(pred_eighth - gt_eighth).mean())
    return l_full + low_scale_weight * (l_quarter + l_eighth)
