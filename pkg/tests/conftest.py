import math

import numpy as np
import pytest

from nds.viewsel import CameraPose, look_at


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_ring_rig(n=8, radius=5.0, fx=100.0, size=128):
    """Cameras evenly spaced on a circle in the z=0 plane, all aimed at the origin."""
    cams = []
    for i in range(n):
        a = 2.0 * math.pi * i / n
        origin = np.array([radius * math.cos(a), radius * math.sin(a), 0.0])
        cams.append(
            CameraPose(
                fx=fx,
                fy=fx,
                cx=size / 2.0,
                cy=size / 2.0,
                rotation=look_at(origin, [0.0, 0.0, 0.0]),
                center=origin,
                image_w=size,
                image_h=size,
            )
        )
    return cams


@pytest.fixture
def ring_rig():
    return make_ring_rig()
