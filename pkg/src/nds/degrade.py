"""NeRF-style degradation simulator.

Five operators (splatted Gaussian noise, re-positioning, anisotropic blur,
illumination jetting, lightness compression), oriented-Gaussian region masks,
uniform parameter sampling, and the full target+references pipeline.  Every
run is reproducible from its recipe: all randomness comes from Philox streams
keyed by the recipe seed, one stream per stage.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .color import lab_to_srgb, srgb_to_lab
from .errors import ConfigError, InvalidInputError, InvalidParameterError
from .jpegluma import jpeg_luma_compress
from .kernels import gaussian_kernel_aniso, gaussian_kernel_iso
from .ops import convolve2d, ensure_image

RECIPE_SCHEMA = 1


# ---------------------------------------------------------------------------
# recipe types


@dataclass(frozen=True)
class MaskParams:
    c_i: float
    c_j: float
    sigma_i: float
    sigma_j: float
    angle_deg: float


@dataclass(frozen=True)
class SgnParams:
    noise_sigma: float
    splat_kernel_size: int
    splat_sigma: float
    mask: MaskParams


@dataclass(frozen=True)
class ReposParams:
    prob: float
    max_offset: int
    mask: MaskParams


@dataclass(frozen=True)
class AblurParams:
    size: int
    angle_deg: float
    sigma_major: float
    sigma_minor: float
    mask: MaskParams


@dataclass(frozen=True)
class IjParams:
    gamma: float


@dataclass(frozen=True)
class LcParams:
    quality: int
    mask: MaskParams


@dataclass(frozen=True)
class DegradationRecipe:
    seed: int
    sgn: SgnParams
    repos: ReposParams
    ablur: AblurParams
    ij: IjParams
    lc: LcParams


@dataclass(frozen=True)
class RecipeRanges:
    """Uniform sampling ranges; defaults follow the simulator's standard setup."""

    noise_sigma: tuple[float, float] = (0.01, 0.05)
    splat_kernel_size: int = 5
    splat_sigma: tuple[float, float] = (0.6, 1.2)
    repos_prob: float = 0.1
    repos_max_offset: int = 2
    blur_sizes: tuple[int, ...] = (3, 5, 7)
    blur_angle: tuple[float, float] = (0.0, 180.0)
    blur_sigma: tuple[float, float] = (0.2, 1.2)
    gamma: tuple[float, float] = (0.95, 1.05)
    quality: tuple[int, int] = (20, 90)
    mask_center: tuple[float, float] = (-16.0, 144.0)
    mask_sigma_i: tuple[float, float] = (13.0, 25.0)
    # nominal upper bound 24 with a positive floor to avoid a zero-width mask
    mask_sigma_j: tuple[float, float] = (0.5, 24.0)
    mask_angle: tuple[float, float] = (0.0, 180.0)

    def validate(self) -> None:
        for name in (
            "noise_sigma",
            "splat_sigma",
            "blur_angle",
            "blur_sigma",
            "gamma",
            "quality",
            "mask_center",
            "mask_sigma_i",
            "mask_sigma_j",
            "mask_angle",
        ):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ConfigError(f"range {name} is empty: ({lo}, {hi})")
        if not self.blur_sizes:
            raise ConfigError("blur_sizes must be non-empty")
        if any(s < 1 or s % 2 == 0 for s in self.blur_sizes):
            raise ConfigError(f"blur_sizes must be odd and >= 1: {self.blur_sizes}")
        if self.mask_sigma_j[0] <= 0 or self.mask_sigma_i[0] <= 0:
            raise ConfigError("mask sigma ranges need a positive lower bound")


# ---------------------------------------------------------------------------
# operators


def region_mask(h: int, w: int, p: MaskParams) -> np.ndarray:
    """Oriented anisotropic Gaussian blending mask, peak amplitude 1.

    M(i,j) = exp(-0.5 * (u^2/sigma_i^2 + v^2/sigma_j^2)) where (u, v) is
    (i-c_i, j-c_j) rotated by the orientation angle.
    """
    if p.sigma_i <= 0 or p.sigma_j <= 0:
        raise InvalidParameterError(f"mask sigmas must be > 0, got {p}")
    theta = np.deg2rad(p.angle_deg)
    c, s = np.cos(theta), np.sin(theta)
    i, j = np.mgrid[0:h, 0:w].astype(np.float64)
    di = i - p.c_i
    dj = j - p.c_j
    u = c * di + s * dj
    v = -s * di + c * dj
    return np.exp(-0.5 * ((u / p.sigma_i) ** 2 + (v / p.sigma_j) ** 2))


def blend_region_adaptive(
    original: np.ndarray, degraded: np.ndarray, mask: np.ndarray
) -> np.ndarray:
    """out = mask * degraded + (1 - mask) * original, per pixel per channel."""
    original = ensure_image(original)
    degraded = ensure_image(degraded)
    mask = np.asarray(mask, dtype=np.float64)
    if original.shape != degraded.shape or mask.shape != original.shape[:2]:
        raise InvalidInputError(
            f"shape mismatch: {original.shape} vs {degraded.shape} vs mask {mask.shape}"
        )
    m = mask[:, :, None]
    return m * degraded + (1.0 - m) * original


def splatted_gaussian_noise(
    img: np.ndarray, noise_sigma: float, splat: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Add iid zero-mean Gaussian noise, then convolve with the splat kernel."""
    if noise_sigma < 0:
        raise InvalidParameterError(f"noise_sigma must be >= 0, got {noise_sigma}")
    img = ensure_image(img)
    noise = rng.normal(0.0, 1.0, size=img.shape) * noise_sigma
    return convolve2d(img + noise, splat)


def reposition(
    img: np.ndarray, prob: float, max_offset: int, rng: np.random.Generator
) -> np.ndarray:
    """Probabilistic per-pixel displacement within [-max_offset, max_offset]^2.

    Each pixel draws p ~ U[0,1]; when p <= prob it is replaced by the source
    pixel at the offset location, with source coordinates clamped to the image
    bounds.  Offset maps are drawn for every pixel (taken or not) so the draw
    layout is independent of the probability.
    """
    if not 0.0 <= prob <= 1.0:
        raise InvalidParameterError(f"prob must be in [0,1], got {prob}")
    if max_offset < 0:
        raise InvalidParameterError(f"max_offset must be >= 0, got {max_offset}")
    img = ensure_image(img)
    h, w = img.shape[:2]
    p = rng.random(size=(h, w))
    di = rng.integers(-max_offset, max_offset + 1, size=(h, w))
    dj = rng.integers(-max_offset, max_offset + 1, size=(h, w))
    take = p <= prob
    ii, jj = np.mgrid[0:h, 0:w]
    si = np.clip(ii + np.where(take, di, 0), 0, h - 1)
    sj = np.clip(jj + np.where(take, dj, 0), 0, w - 1)
    return img[si, sj]


def aniso_blur(
    img: np.ndarray, size: int, sigma_major: float, sigma_minor: float, angle_deg: float
) -> np.ndarray:
    """Blur with an oriented anisotropic Gaussian kernel."""
    kernel = gaussian_kernel_aniso(size, sigma_major, sigma_minor, angle_deg)
    return convolve2d(ensure_image(img), kernel)


def illumination_jetting(
    target: np.ndarray, refs: list[np.ndarray], gamma: float
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Shared gamma adjustment y = x^gamma on the target and all references."""
    if gamma <= 0:
        raise InvalidParameterError(f"gamma must be > 0, got {gamma}")
    target = ensure_image(target)
    out_t = np.power(np.clip(target, 0.0, 1.0), gamma)
    out_refs = [np.power(np.clip(ensure_image(r), 0.0, 1.0), gamma) for r in refs]
    return out_t, out_refs


def lightness_compression(img: np.ndarray, quality: int) -> np.ndarray:
    """JPEG-quantize the CIELAB L channel, keep a/b untouched, convert back."""
    img = ensure_image(img, channels=3)
    lab = srgb_to_lab(img)
    l255 = lab[:, :, 0] * (255.0 / 100.0)
    lab_out = lab.copy()
    lab_out[:, :, 0] = jpeg_luma_compress(l255, quality) * (100.0 / 255.0)
    return lab_to_srgb(lab_out)


# ---------------------------------------------------------------------------
# sampling and the full pipeline


def _sample_mask(rng: np.random.Generator, r: RecipeRanges) -> MaskParams:
    return MaskParams(
        c_i=rng.uniform(*r.mask_center),
        c_j=rng.uniform(*r.mask_center),
        sigma_i=rng.uniform(*r.mask_sigma_i),
        sigma_j=rng.uniform(*r.mask_sigma_j),
        angle_deg=rng.uniform(*r.mask_angle),
    )


def sample_recipe(seed: int, ranges: RecipeRanges | None = None) -> DegradationRecipe:
    """Draw a full parameter set uniformly from the configured ranges.

    The draw order is fixed (sgn, repos, ablur, ij, lc); the recipe stream is
    separate from the stage streams consumed by `degrade`.
    """
    r = ranges or RecipeRanges()
    r.validate()
    g = rngmod.stream(seed, rngmod.STAGE_RECIPE)
    sgn = SgnParams(
        noise_sigma=g.uniform(*r.noise_sigma),
        splat_kernel_size=r.splat_kernel_size,
        splat_sigma=g.uniform(*r.splat_sigma),
        mask=_sample_mask(g, r),
    )
    repos = ReposParams(
        prob=r.repos_prob, max_offset=r.repos_max_offset, mask=_sample_mask(g, r)
    )
    ablur = AblurParams(
        size=int(g.choice(np.asarray(r.blur_sizes))),
        angle_deg=g.uniform(*r.blur_angle),
        sigma_major=g.uniform(*r.blur_sigma),
        sigma_minor=g.uniform(*r.blur_sigma),
        mask=_sample_mask(g, r),
    )
    ij = IjParams(gamma=g.uniform(*r.gamma))
    lc = LcParams(
        quality=int(g.integers(r.quality[0], r.quality[1] + 1)), mask=_sample_mask(g, r)
    )
    return DegradationRecipe(seed=int(seed), sgn=sgn, repos=repos, ablur=ablur, ij=ij, lc=lc)


def degrade(
    target: np.ndarray, refs: list[np.ndarray], recipe: DegradationRecipe
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Run the full simulator on a clean target view.

    Order: illumination jetting (shared gamma, hits target and references),
    then splatted Gaussian noise, re-positioning, anisotropic blur, and
    lightness compression on the target, each blended through its own region
    mask.  Deterministic given the recipe.
    """
    target = ensure_image(target, channels=3)
    if len(refs) != 2:
        raise InvalidInputError(f"expected exactly 2 reference views, got {len(refs)}")
    refs = [ensure_image(r, channels=3) for r in refs]
    for ref in refs:
        if ref.shape != target.shape:
            raise InvalidInputError(
                f"reference shape {ref.shape} != target shape {target.shape}"
            )
    h, w = target.shape[:2]
    seed = recipe.seed

    x, out_refs = illumination_jetting(target, refs, recipe.ij.gamma)

    splat = gaussian_kernel_iso(recipe.sgn.splat_kernel_size, recipe.sgn.splat_sigma)
    noisy = splatted_gaussian_noise(
        x, recipe.sgn.noise_sigma, splat, rngmod.stream(seed, rngmod.STAGE_SGN)
    )
    x = blend_region_adaptive(x, noisy, region_mask(h, w, recipe.sgn.mask))

    moved = reposition(
        x,
        recipe.repos.prob,
        recipe.repos.max_offset,
        rngmod.stream(seed, rngmod.STAGE_REPOS),
    )
    x = blend_region_adaptive(x, moved, region_mask(h, w, recipe.repos.mask))

    blurred = aniso_blur(
        x,
        recipe.ablur.size,
        recipe.ablur.sigma_major,
        recipe.ablur.sigma_minor,
        recipe.ablur.angle_deg,
    )
    x = blend_region_adaptive(x, blurred, region_mask(h, w, recipe.ablur.mask))

    compressed = lightness_compression(x, recipe.lc.quality)
    x = blend_region_adaptive(x, compressed, region_mask(h, w, recipe.lc.mask))

    return np.clip(x, 0.0, 1.0), out_refs


# ---------------------------------------------------------------------------
# recipe serialization (schema 1)


def recipe_to_dict(recipe: DegradationRecipe) -> dict:
    d = dataclasses.asdict(recipe)
    d["schema"] = RECIPE_SCHEMA
    return d


def recipe_from_dict(d: dict) -> DegradationRecipe:
    if d.get("schema") != RECIPE_SCHEMA:
        raise ConfigError(f"unsupported recipe schema: {d.get('schema')!r}")

    def mask(m: dict) -> MaskParams:
        return MaskParams(**m)

    return DegradationRecipe(
        seed=int(d["seed"]),
        sgn=SgnParams(
            noise_sigma=d["sgn"]["noise_sigma"],
            splat_kernel_size=int(d["sgn"]["splat_kernel_size"]),
            splat_sigma=d["sgn"]["splat_sigma"],
            mask=mask(d["sgn"]["mask"]),
        ),
        repos=ReposParams(
            prob=d["repos"]["prob"],
            max_offset=int(d["repos"]["max_offset"]),
            mask=mask(d["repos"]["mask"]),
        ),
        ablur=AblurParams(
            size=int(d["ablur"]["size"]),
            angle_deg=d["ablur"]["angle_deg"],
            sigma_major=d["ablur"]["sigma_major"],
            sigma_minor=d["ablur"]["sigma_minor"],
            mask=mask(d["ablur"]["mask"]),
        ),
        ij=IjParams(gamma=d["ij"]["gamma"]),
        lc=LcParams(quality=int(d["lc"]["quality"]), mask=mask(d["lc"]["mask"])),
    )
