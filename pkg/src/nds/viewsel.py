"""Geometric reference-view selection.

Cameras cast a grid of rays onto a bounding sphere; views are scored by the
mutual nearest-point matching cost between their hit sets, and the references
with the smallest cost to the target are selected.

Pose convention: world-from-camera rotation with +x right, +y down, and the
camera looking along -z; `rotation` columns are the world directions of the
camera axes.  LLFF-style poses are converted at ingestion.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidInputError

#: sentinel cost for matching against an empty hit set
INFINITE_COST = math.inf

# brute force below this many points, uniform KD-tree above (identical results)
_BRUTE_FORCE_LIMIT = 1000


@dataclass(frozen=True)
class CameraPose:
    fx: float
    fy: float
    cx: float
    cy: float
    rotation: np.ndarray  # 3x3 world-from-camera
    center: np.ndarray  # camera origin in world units
    image_w: int
    image_h: int

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        c = np.asarray(self.center, dtype=np.float64).reshape(3)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "center", c)
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidInputError(f"focal lengths must be > 0: ({self.fx}, {self.fy})")
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-6 or abs(np.linalg.det(R) - 1.0) > 1e-6:
            raise InvalidInputError("rotation must be orthonormal with det +1")

    @property
    def view_dir(self) -> np.ndarray:
        """Unit viewing direction in world coordinates (camera -z axis)."""
        return -self.rotation[:, 2]


@dataclass(frozen=True)
class BoundingSphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64).reshape(3))
        if self.radius <= 0:
            raise InvalidInputError(f"sphere radius must be > 0, got {self.radius}")


def look_at(origin, target, up=(0.0, 0.0, 1.0)) -> np.ndarray:
    """World-from-camera rotation for a camera at `origin` aimed at `target`."""
    origin = np.asarray(origin, dtype=np.float64)
    fwd = np.asarray(target, dtype=np.float64) - origin
    fwd = fwd / np.linalg.norm(fwd)
    up = np.asarray(up, dtype=np.float64)
    right = np.cross(fwd, up)
    n = np.linalg.norm(right)
    if n < 1e-12:
        up = np.array([0.0, 1.0, 0.0])
        right = np.cross(fwd, up)
        n = np.linalg.norm(right)
    right /= n
    back = -fwd
    # the y column completes a det +1 triple with x = right and z = back; ray
    # grids are symmetric in v, so the vertical image orientation is moot here
    return np.stack([right, np.cross(back, right), back], axis=1)


def estimate_sphere(
    cams: list[CameraPose], ratio: float = 0.7
) -> BoundingSphere:
    """Heuristic scene sphere: least-squares intersection of the optical axes.

    The radius is `ratio` times the median center-to-camera distance, clamped
    so every camera origin stays strictly outside the sphere.
    """
    if len(cams) < 2:
        raise InvalidInputError("need at least 2 cameras to estimate a sphere")
    A = np.zeros((3, 3))
    b = np.zeros(3)
    for cam in cams:
        d = cam.view_dir
        P = np.eye(3) - np.outer(d, d)
        A += P
        b += P @ cam.center
    if np.linalg.matrix_rank(A, tol=1e-9) < 3:
        raise DegenerateGeometryError("camera optical axes do not intersect a point")
    center = np.linalg.solve(A, b)
    dists = np.array([np.linalg.norm(cam.center - center) for cam in cams])
    if np.min(dists) <= 0:
        raise DegenerateGeometryError("a camera origin coincides with the sphere center")
    radius = ratio * float(np.median(dists))
    radius = min(radius, 0.99 * float(np.min(dists)))
    return BoundingSphere(center=center, radius=radius)


def cast_rays(cam: CameraPose, sphere: BoundingSphere, grid_n: int = 16) -> np.ndarray:
    """First ray-sphere intersections for a grid_n x grid_n grid of pixel centers.

    Returns an (M, 3) array of surface points, M <= grid_n^2; misses are
    dropped.
    """
    if grid_n < 2:
        raise InvalidInputError(f"grid_n must be >= 2, got {grid_n}")
    u = (np.arange(grid_n) + 0.5) * (cam.image_w / grid_n)
    v = (np.arange(grid_n) + 0.5) * (cam.image_h / grid_n)
    uu, vv = np.meshgrid(u, v)
    dirs_cam = np.stack(
        [(uu - cam.cx) / cam.fx, (vv - cam.cy) / cam.fy, -np.ones_like(uu)], axis=-1
    ).reshape(-1, 3)
    dirs = dirs_cam @ cam.rotation.T
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    oc = cam.center - sphere.center
    b = dirs @ oc
    c = oc @ oc - sphere.radius**2
    disc = b * b - c
    ok = disc >= 0
    t = -b[ok] - np.sqrt(disc[ok])
    pos = t > 0
    # camera inside the sphere would need the far root; origins are outside by
    # construction, so only positive near roots count as hits
    pts = cam.center + t[pos, None] * dirs[ok][pos]
    return pts


def _nearest_sq_dists(query: np.ndarray, points: np.ndarray) -> np.ndarray:
    if len(points) <= _BRUTE_FORCE_LIMIT:
        d2 = ((query[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
        return d2.min(axis=1)
    from scipy.spatial import cKDTree

    d, _ = cKDTree(points).query(query, k=1)
    return d**2


def directed_cost(a: np.ndarray, b: np.ndarray) -> float:
    """Sum over points of `a` of the squared distance to their nearest point in `b`."""
    if len(b) == 0:
        return INFINITE_COST
    if len(a) == 0:
        return 0.0
    return float(_nearest_sq_dists(np.asarray(a, float), np.asarray(b, float)).sum())


def mutual_cost(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric matching cost: directed cost a->b plus b->a."""
    if len(a) == 0 or len(b) == 0:
        return INFINITE_COST
    return directed_cost(a, b) + directed_cost(b, a)


def select_references(
    cams: list[CameraPose],
    target: int,
    k: int = 2,
    exclude: set[int] | None = None,
    sphere: BoundingSphere | None = None,
    grid_n: int = 16,
) -> list[int]:
    """Indices of the k views with the least mutual matching cost to `target`.

    Ties break toward the lower index; the target and excluded indices are
    never returned.
    """
    exclude = exclude or set()
    candidates = [i for i in range(len(cams)) if i != target and i not in exclude]
    if k > len(candidates):
        raise InvalidInputError(
            f"need {k} reference candidates, only {len(candidates)} available"
        )
    if sphere is None:
        sphere = estimate_sphere(cams)
    hits = {i: cast_rays(cams[i], sphere, grid_n) for i in [target] + candidates}
    costs = [(mutual_cost(hits[target], hits[i]), i) for i in candidates]
    costs.sort()
    return [i for _, i in costs[:k]]


# ---------------------------------------------------------------------------
# pose file ingestion


def load_poses_json(path: str | os.PathLike) -> list[CameraPose]:
    """Read the native pose schema: a JSON array of camera records."""
    with open(path) as fh:
        records = json.load(fh)
    cams = []
    for rec in records:
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
    return cams


def save_poses_json(path: str | os.PathLike, cams: list[CameraPose]) -> None:
    records = [
        {
            "fx": cam.fx,
            "fy": cam.fy,
            "cx": cam.cx,
            "cy": cam.cy,
            "w": cam.image_w,
            "h": cam.image_h,
            "R": cam.rotation.reshape(-1).tolist(),
            "center": cam.center.tolist(),
        }
        for cam in cams
    ]
    with open(path, "w") as fh:
        json.dump(records, fh, indent=2)


def load_llff_poses_bounds(path: str | os.PathLike) -> list[CameraPose]:
    """Convert an LLFF poses_bounds.npy file (N x 17) to CameraPose records.

    LLFF stores camera-to-world 3x5 matrices with rotation columns ordered
    (down, right, back) and a trailing (h, w, f) column; we reorder to the
    native det +1 convention with x = right and z = back.
    """
    arr = np.load(os.fspath(path))
    if arr.ndim != 2 or arr.shape[1] < 15:
        raise InvalidInputError(f"poses_bounds array has shape {arr.shape}")
    cams = []
    for row in arr:
        m = row[:15].reshape(3, 5)
        down, right, back = m[:, 0], m[:, 1], m[:, 2]
        center = m[:, 3]
        h, w, f = m[:, 4]
        R = np.stack([right, -down, back], axis=1)
        cams.append(
            CameraPose(
                fx=float(f),
                fy=float(f),
                cx=float(w) / 2.0,
                cy=float(h) / 2.0,
                rotation=R,
                center=center,
                image_w=int(round(w)),
                image_h=int(round(h)),
            )
        )
    return cams
