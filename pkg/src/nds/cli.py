"""Command-line interface.

Exit codes: 0 success, 1 input/config error, 2 verification failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .degrade import RecipeRanges, degrade, recipe_to_dict, sample_recipe
from .errors import NdsError, VerifyError
from .imageio import read_image, write_image
from .pipeline import DatasetConfig, build_dataset, quality_report
from .viewsel import BoundingSphere, load_llff_poses_bounds, load_poses_json, select_references
from .wks import wks_per_patch


@click.group()
@click.version_option(__version__)
def main():
    """NeRF-style degradation simulator and dataset factory."""


def _run(fn):
    try:
        fn()
    except VerifyError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except (NdsError, OSError, ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command("degrade")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--refs", nargs=2, required=True, type=click.Path(exists=True))
@click.option("--seed", required=True, type=int)
@click.option("--recipe-out", type=click.Path(), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
def degrade_cmd(input_path, refs, seed, recipe_out, out_dir):
    """Degrade one target view given two reference views."""

    def run():
        target = read_image(input_path)
        ref_imgs = [read_image(r) for r in refs]
        recipe = sample_recipe(seed, RecipeRanges())
        degraded, adj_refs = degrade(target, ref_imgs, recipe)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_image(out / "degraded.png", degraded)
        write_image(out / "ref1.png", adj_refs[0])
        write_image(out / "ref2.png", adj_refs[1])
        recipe_path = recipe_out or out / "recipe.json"
        with open(recipe_path, "w") as fh:
            json.dump(recipe_to_dict(recipe), fh, sort_keys=True, indent=2)
        click.echo(f"wrote degraded view and recipe to {out}")

    _run(run)


@main.command("select-views")
@click.option("--poses", "poses_path", required=True, type=click.Path(exists=True))
@click.option("--target", required=True, type=int)
@click.option("--k", default=2, type=int, show_default=True)
@click.option("--grid", default=16, type=int, show_default=True)
@click.option("--sphere", default=None, help="explicit sphere as cx,cy,cz,r")
def select_views_cmd(poses_path, target, k, grid, sphere):
    """Pick the k reference views with the least mutual matching cost."""

    def run():
        if poses_path.endswith(".npy"):
            cams = load_llff_poses_bounds(poses_path)
        else:
            cams = load_poses_json(poses_path)
        sph = None
        if sphere:
            cx, cy, cz, r = (float(v) for v in sphere.split(","))
            sph = BoundingSphere(center=np.array([cx, cy, cz]), radius=r)
        picks = select_references(cams, target, k=k, sphere=sph, grid_n=grid)
        click.echo(json.dumps({"target": target, "references": picks}))

    _run(run)


@main.command("wks-eval")
@click.option("--pred", required=True, type=click.Path(exists=True))
@click.option("--gt", required=True, type=click.Path(exists=True))
@click.option("--real", required=True, type=click.Path(exists=True))
@click.option("--patch", default=7, type=int, show_default=True)
@click.option("--stride", default=4, type=int, show_default=True)
@click.option("--k", default=5, type=int, show_default=True)
def wks_eval_cmd(pred, gt, real, patch, stride, k):
    """Weighted top-K similarity score between a prediction and a real view."""

    def run():
        per_patch = wks_per_patch(
            read_image(pred), read_image(gt), read_image(real), patch, stride, k
        )
        click.echo(
            json.dumps(
                {
                    "loss": float(per_patch.mean()),
                    "per_patch_stats": {
                        "count": int(per_patch.size),
                        "min": float(per_patch.min()),
                        "max": float(per_patch.max()),
                        "mean": float(per_patch.mean()),
                        "std": float(per_patch.std()),
                    },
                }
            )
        )

    _run(run)


@main.command("build-dataset")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def build_dataset_cmd(config_path):
    """Build a paired dataset from a JSON config."""

    def run():
        cfg = DatasetConfig.from_json(config_path)
        manifest = build_dataset(cfg)
        click.echo(f"manifest written to {manifest}")

    _run(run)


@main.command("quality-report")
@click.option("--sim", "sim_dir", required=True, type=click.Path(exists=True))
@click.option("--real", "real_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
def quality_report_cmd(sim_dir, real_dir, out_path):
    """Patch-statistics comparison between simulated and real corpora."""

    def run():
        report = quality_report(sim_dir, real_dir)
        text = json.dumps(report, indent=2)
        if out_path:
            Path(out_path).write_text(text)
            click.echo(f"report written to {out_path}")
        else:
            click.echo(text)

    _run(run)


if __name__ == "__main__":
    main()
