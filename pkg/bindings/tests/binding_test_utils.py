import math

import numpy as np


def ring_records(n=8, radius=5.0, fx=100.0, size=128):
    """Camera records (poses.json schema) for a ring rig aimed at the origin."""
    from nds.viewsel import look_at

    records = []
    for i in range(n):
        a = 2.0 * math.pi * i / n
        origin = np.array([radius * math.cos(a), radius * math.sin(a), 0.0])
        records.append(
            {
                "fx": fx,
                "fy": fx,
                "cx": size / 2.0,
                "cy": size / 2.0,
                "w": size,
                "h": size,
                "R": look_at(origin, [0.0, 0.0, 0.0]).reshape(-1).tolist(),
                "center": origin.tolist(),
            }
        )
    return records


def binary_image(rng, shape=(32, 32, 3)):
    """Random 0/1 image, exactly representable in both float32 and PNG."""
    return rng.integers(0, 2, shape).astype(np.float32)
