"""Deterministic random streams.

All randomness flows through Philox (counter-based) generators derived from a
64-bit seed via numpy SeedSequence spawn keys.  Each degradation stage owns a
fixed stream index, so adding or removing a stage never perturbs the draws of
any other stage.  Dataset samples get their own substream keyed by sample
ordinal, making output independent of worker scheduling.
"""

from __future__ import annotations

import numpy as np

# fixed stream indices; append only, never renumber
STAGE_RECIPE = 0
STAGE_SGN = 1
STAGE_REPOS = 2
STAGE_ABLUR = 3
STAGE_IJ = 4
STAGE_LC = 5
STAGE_INGEST = 6
STAGE_OFFSETS = 7
STAGE_VERIFY = 8


def stream(seed: int, *key: int) -> np.random.Generator:
    """A Philox generator for the given seed and stream key path."""
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))
