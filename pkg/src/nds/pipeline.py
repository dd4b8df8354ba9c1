"""Dataset factory: ingest raw sequences, run the simulator, emit paired
samples with a JSONL manifest, and compute simulation-quality reports.

Every sample owns a Philox substream keyed by its ordinal, so the output tree
is byte-identical regardless of worker count or scheduling.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .degrade import (
    RecipeRanges,
    degrade,
    recipe_from_dict,
    recipe_to_dict,
    sample_recipe,
)
from .errors import ConfigError, IngestionError, InvalidInputError, VerifyError
from .imageio import read_image, to_uint8, write_image
from .ops import ensure_image
from .viewsel import load_llff_poses_bounds, load_poses_json, select_references

log = logging.getLogger(__name__)

MANIFEST_SCHEMA = 1
IMAGE_EXTS = (".png", ".ppm", ".pnm", ".jpg", ".jpeg")


@dataclass
class DatasetConfig:
    seed: int
    sources: list[dict]
    output_dir: str
    global_offset_max: int = 8
    verify_fraction: float = 0.05
    recipe_ranges: RecipeRanges = field(default_factory=RecipeRanges)
    workers: int = 1

    def validate(self) -> None:
        if not self.sources:
            raise ConfigError("config needs at least one source")
        if not 0.0 <= self.verify_fraction <= 1.0:
            raise ConfigError(f"verify_fraction must be in [0,1]: {self.verify_fraction}")
        self.recipe_ranges.validate()

    @classmethod
    def from_json(cls, path: str | os.PathLike) -> "DatasetConfig":
        with open(path) as fh:
            d = json.load(fh)
        if d.get("schema") != 1:
            raise ConfigError(f"unsupported config schema: {d.get('schema')!r}")
        ranges = RecipeRanges(**{
            k: tuple(v) if isinstance(v, list) else v
            for k, v in d.get("recipe_ranges", {}).items()
        })
        cfg = cls(
            seed=int(d["seed"]),
            sources=d["sources"],
            output_dir=d["output_dir"],
            global_offset_max=int(d.get("global_offset_max", 8)),
            verify_fraction=float(d.get("verify_fraction", 0.05)),
            recipe_ranges=ranges,
            workers=int(d.get("workers", 1)),
        )
        cfg.validate()
        return cfg


def config_hash(cfg: DatasetConfig) -> str:
    payload = {
        "seed": cfg.seed,
        "sources": cfg.sources,
        "global_offset_max": cfg.global_offset_max,
        "verify_fraction": cfg.verify_fraction,
        "recipe_ranges": cfg.recipe_ranges.__dict__,
    }
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# ingestion


def _list_images(d: Path) -> list[Path]:
    return sorted(p for p in d.iterdir() if p.suffix.lower() in IMAGE_EXTS)


def ingest_triplets(
    clips_dir: str | os.PathLike, rng: np.random.Generator
) -> list[tuple[str, str, str, str]]:
    """Sample one (clip, gt, ref1, ref2) path triple per clip subdirectory.

    Three distinct frames are drawn uniformly without replacement; the draw
    order is the role assignment.  Clips with fewer than 3 frames are skipped
    with a warning.
    """
    clips_dir = Path(clips_dir)
    out = []
    for clip in sorted(p for p in clips_dir.iterdir() if p.is_dir()):
        frames = _list_images(clip)
        if len(frames) < 3:
            log.warning("skipping clip %s: only %d frames", clip.name, len(frames))
            continue
        idx = rng.choice(len(frames), size=3, replace=False)
        out.append((clip.name, str(frames[idx[0]]), str(frames[idx[1]]), str(frames[idx[2]])))
    return out


def ingest_posed_scene(
    scene_dir: str | os.PathLike,
    holdout_every: int = 0,
    grid_n: int = 16,
) -> list[tuple[str, str, str, str]]:
    """Pair every frame of a posed scene with its two most-overlapped views.

    The scene directory holds the frames plus either poses.json (native
    schema) or an LLFF-style poses_bounds.npy.  With holdout_every=n, every
    n-th view is excluded from both targets and reference candidacy.
    """
    scene_dir = Path(scene_dir)
    frames = _list_images(scene_dir)
    if (scene_dir / "poses.json").exists():
        cams = load_poses_json(scene_dir / "poses.json")
    elif (scene_dir / "poses_bounds.npy").exists():
        cams = load_llff_poses_bounds(scene_dir / "poses_bounds.npy")
    else:
        raise IngestionError(f"no poses.json or poses_bounds.npy in {scene_dir}")
    if len(cams) != len(frames):
        raise IngestionError(
            f"{scene_dir}: {len(frames)} frames but {len(cams)} poses"
        )
    holdout = (
        {i for i in range(len(cams)) if i % holdout_every == 0} if holdout_every else set()
    )
    out = []
    for target in range(len(cams)):
        if target in holdout:
            continue
        refs = select_references(
            cams, target, k=2, exclude=holdout, grid_n=grid_n
        )
        out.append(
            (
                scene_dir.name,
                str(frames[target]),
                str(frames[refs[0]]),
                str(frames[refs[1]]),
            )
        )
    return out


# ---------------------------------------------------------------------------
# augmentation


def shift_replicate(img: np.ndarray, di: int, dj: int) -> np.ndarray:
    """Translate by (di, dj) with replicate padding, keeping the original dims."""
    img = ensure_image(img)
    h, w = img.shape[:2]
    pad = max(abs(di), abs(dj))
    if pad == 0:
        return img.copy()
    padded = np.pad(img, ((pad, pad), (pad, pad), (0, 0)), mode="edge")
    return padded[pad - di : pad - di + h, pad - dj : pad - dj + w]


def augment_global_offsets(
    ref1: np.ndarray, ref2: np.ndarray, max_px: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, tuple[int, int], tuple[int, int]]:
    """Independent uniform integer global offsets for the two reference views."""
    ref1 = ensure_image(ref1)
    if max_px >= min(ref1.shape[0], ref1.shape[1]) / 4:
        raise InvalidInputError(
            f"max_px={max_px} too large for {ref1.shape[:2]} frames"
        )
    o1 = tuple(int(v) for v in rng.integers(-max_px, max_px + 1, size=2))
    o2 = tuple(int(v) for v in rng.integers(-max_px, max_px + 1, size=2))
    return (
        shift_replicate(ref1, *o1),
        shift_replicate(ensure_image(ref2), *o2),
        o1,
        o2,
    )


# ---------------------------------------------------------------------------
# dataset build


def _crop_to(img: np.ndarray, h: int, w: int) -> np.ndarray:
    if img.shape[0] < h or img.shape[1] < w:
        raise InvalidInputError(
            f"reference {img.shape[:2]} smaller than target ({h}, {w})"
        )
    return img[:h, :w]


def _process_sample(
    ordinal: int,
    clip: str,
    gt_path: str,
    ref1_path: str,
    ref2_path: str,
    source_name: str,
    cfg: DatasetConfig,
    out_root: Path,
) -> dict:
    sample_seed = rngmod.stream(cfg.seed, 1000, ordinal).integers(0, 2**63).item()
    gt = read_image(gt_path)
    h, w = gt.shape[:2]
    ref1 = _crop_to(read_image(ref1_path), h, w)
    ref2 = _crop_to(read_image(ref2_path), h, w)
    off_rng = rngmod.stream(sample_seed, rngmod.STAGE_OFFSETS)
    ref1, ref2, o1, o2 = augment_global_offsets(ref1, ref2, cfg.global_offset_max, off_rng)
    recipe = sample_recipe(sample_seed, cfg.recipe_ranges)
    degraded, (ref1_adj, ref2_adj) = degrade(gt, [ref1, ref2], recipe)

    sid = f"{source_name}-{clip}-{ordinal:06d}"
    sdir = out_root / "samples" / sid
    sdir.mkdir(parents=True, exist_ok=True)
    write_image(sdir / "gt.png", gt)
    write_image(sdir / "degraded.png", degraded)
    write_image(sdir / "ref1.png", ref1_adj)
    write_image(sdir / "ref2.png", ref2_adj)
    with open(sdir / "recipe.json", "w") as fh:
        json.dump(recipe_to_dict(recipe), fh, sort_keys=True, indent=2)
    return {
        "id": sid,
        "gt_path": f"samples/{sid}/gt.png",
        "degraded_path": f"samples/{sid}/degraded.png",
        "ref1_path": f"samples/{sid}/ref1.png",
        "ref2_path": f"samples/{sid}/ref2.png",
        "recipe_path": f"samples/{sid}/recipe.json",
        "seed": sample_seed,
        "source": {
            "dataset": source_name,
            "clip": clip,
            "gt": gt_path,
            "ref1": ref1_path,
            "ref2": ref2_path,
            "offsets": [list(o1), list(o2)],
        },
    }


def collect_triples(cfg: DatasetConfig) -> list[tuple[str, str, str, str, str]]:
    """Deterministic list of (source_name, clip, gt, ref1, ref2) across sources."""
    triples = []
    for si, src in enumerate(cfg.sources):
        name = src.get("name", f"src{si}")
        if src["type"] == "triplets":
            rng = rngmod.stream(cfg.seed, rngmod.STAGE_INGEST, si)
            for clip, gt, r1, r2 in ingest_triplets(src["dir"], rng):
                triples.append((name, clip, gt, r1, r2))
        elif src["type"] == "posed":
            for clip, gt, r1, r2 in ingest_posed_scene(
                src["dir"],
                holdout_every=int(src.get("holdout_every", 0)),
                grid_n=int(src.get("grid_n", 16)),
            ):
                triples.append((name, clip, gt, r1, r2))
        else:
            raise ConfigError(f"unknown source type {src['type']!r}")
    return triples


def build_dataset(cfg: DatasetConfig) -> Path:
    """Run the full factory; returns the manifest path.

    Raises VerifyError if the post-build reproduction check fails on any
    sampled output.
    """
    cfg.validate()
    out_root = Path(cfg.output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    triples = collect_triples(cfg)

    workers = int(os.environ.get("NDS_THREADS", cfg.workers) or 1)
    entries: list[dict | None] = [None] * len(triples)
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {
                pool.submit(
                    _process_sample, i, clip, gt, r1, r2, name, cfg, out_root
                ): i
                for i, (name, clip, gt, r1, r2) in enumerate(triples)
            }
            for fut in concurrent.futures.as_completed(futs):
                entries[futs[fut]] = fut.result()
    else:
        for i, (name, clip, gt, r1, r2) in enumerate(triples):
            entries[i] = _process_sample(i, clip, gt, r1, r2, name, cfg, out_root)

    failures = verify_samples(out_root, entries, cfg)
    manifest = out_root / "manifest.jsonl"
    header = {
        "schema": MANIFEST_SCHEMA,
        "config_hash": config_hash(cfg),
        "count": len(entries),
        "valid": not failures,
    }
    with open(manifest, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for entry in entries:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    if failures:
        raise VerifyError(f"verification failed for samples: {failures}")
    return manifest


def verify_samples(
    out_root: Path, entries: list[dict], cfg: DatasetConfig
) -> list[str]:
    """Re-run the simulator on a sampled fraction; return ids that mismatch."""
    n = len(entries)
    n_check = int(np.ceil(cfg.verify_fraction * n)) if cfg.verify_fraction > 0 else 0
    if n_check == 0:
        return []
    rng = rngmod.stream(cfg.seed, rngmod.STAGE_VERIFY)
    picks = sorted(rng.choice(n, size=min(n_check, n), replace=False).tolist())
    failures = []
    for i in picks:
        if not verify_one(out_root, entries[i], cfg):
            failures.append(entries[i]["id"])
    return failures


def verify_one(out_root: Path, entry: dict, cfg: DatasetConfig) -> bool:
    """Rebuild one sample from its sources and recipe; compare byte-for-byte."""
    with open(out_root / entry["recipe_path"]) as fh:
        recipe = recipe_from_dict(json.load(fh))
    src = entry["source"]
    gt = read_image(out_root / entry["gt_path"])
    h, w = gt.shape[:2]
    ref1 = _crop_to(read_image(src["ref1"]), h, w)
    ref2 = _crop_to(read_image(src["ref2"]), h, w)
    (di1, dj1), (di2, dj2) = src["offsets"]
    ref1 = shift_replicate(ref1, di1, dj1)
    ref2 = shift_replicate(ref2, di2, dj2)
    degraded, (ref1_adj, ref2_adj) = degrade(gt, [ref1, ref2], recipe)
    checks = [
        (degraded, entry["degraded_path"]),
        (ref1_adj, entry["ref1_path"]),
        (ref2_adj, entry["ref2_path"]),
    ]
    for img, rel in checks:
        stored = read_image(out_root / rel)
        if not np.array_equal(to_uint8(img), to_uint8(stored)):
            return False
    return True


# ---------------------------------------------------------------------------
# quality report


_GRAD_BINS = np.linspace(0.0, 0.5, 65)
_VAR_BINS = np.linspace(0.0, 0.05, 65)


def _corpus_stats(image_dir: str | os.PathLike) -> dict:
    paths = _list_images(Path(image_dir))
    if not paths:
        raise InvalidInputError(f"no images found in {image_dir}")
    grad_hist = np.zeros(len(_GRAD_BINS) - 1)
    var_hist = np.zeros(len(_VAR_BINS) - 1)
    means = []
    stds = []
    for p in paths:
        img = read_image(p)
        gray = img.mean(axis=2)
        gy, gx = np.gradient(gray)
        mag = np.sqrt(gx * gx + gy * gy)
        grad_hist += np.histogram(mag, bins=_GRAD_BINS)[0]
        h8, w8 = (gray.shape[0] // 8) * 8, (gray.shape[1] // 8) * 8
        blocks = gray[:h8, :w8].reshape(h8 // 8, 8, w8 // 8, 8)
        var_hist += np.histogram(blocks.var(axis=(1, 3)), bins=_VAR_BINS)[0]
        means.append(img.mean(axis=(0, 1)))
        stds.append(img.std(axis=(0, 1)))
    return {
        "count": len(paths),
        "gradient_hist": (grad_hist / grad_hist.sum()).tolist(),
        "variance_hist": (var_hist / var_hist.sum()).tolist(),
        "channel_mean": np.mean(means, axis=0).tolist(),
        "channel_std": np.mean(stds, axis=0).tolist(),
    }


def _hist_w1(p: list[float], q: list[float], bins: np.ndarray) -> float:
    # Wasserstein-1 between histograms = integral of |CDF difference|
    widths = np.diff(bins)
    cdf_diff = np.cumsum(np.asarray(p) - np.asarray(q))
    return float(np.abs(cdf_diff * widths).sum())


def quality_report(sim_dir: str, real_dir: str) -> dict:
    """Classical patch-statistics comparison between two image corpora."""
    sim = _corpus_stats(sim_dir)
    real = _corpus_stats(real_dir)
    d_grad = _hist_w1(sim["gradient_hist"], real["gradient_hist"], _GRAD_BINS)
    d_var = _hist_w1(sim["variance_hist"], real["variance_hist"], _VAR_BINS)
    d_mean = float(
        np.abs(np.subtract(sim["channel_mean"], real["channel_mean"])).mean()
    )
    d_std = float(np.abs(np.subtract(sim["channel_std"], real["channel_std"])).mean())
    return {
        "schema": 1,
        "per_corpus": {"sim": sim, "real": real},
        "distances": {
            "gradient_hist_w1": d_grad,
            "variance_hist_w1": d_var,
            "channel_mean_abs": d_mean,
            "channel_std_abs": d_std,
        },
        "aggregate": d_grad + d_var + d_mean + d_std,
    }
