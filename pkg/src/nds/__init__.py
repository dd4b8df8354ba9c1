"""NeRF-style degradation simulator, view selection, and patch-similarity metrics."""

__version__ = "0.1.0"

MANIFEST_SCHEMA = 1
RECIPE_SCHEMA = 1
