import numpy as np
import pytest

from nds.errors import InvalidInputError
from nds.imageio import read_image, to_float, to_uint8, write_image


def test_quantization_is_exact_inverse():
    levels = np.arange(256, dtype=np.uint8).reshape(16, 16)
    arr = np.stack([levels] * 3, axis=2)
    assert np.array_equal(to_uint8(to_float(arr)), arr)


def test_png_round_trip(tmp_path, rng):
    img = rng.random((20, 30, 3))
    p = tmp_path / "x.png"
    write_image(p, img)
    back = read_image(p)
    # lossless at 8-bit resolution
    assert np.array_equal(to_uint8(back), to_uint8(img))
    assert np.max(np.abs(back - img)) <= 0.5 / 255 + 1e-12


def test_ppm_round_trip(tmp_path, rng):
    img = rng.random((11, 13, 3))
    p = tmp_path / "x.ppm"
    write_image(p, img)
    back = read_image(p)
    assert np.array_equal(to_uint8(back), to_uint8(img))


def test_ppm_and_png_agree(tmp_path, rng):
    img = rng.random((9, 9, 3))
    write_image(tmp_path / "a.png", img)
    write_image(tmp_path / "a.ppm", img)
    assert np.array_equal(read_image(tmp_path / "a.png"), read_image(tmp_path / "a.ppm"))


def test_write_rejects_bad_shape(tmp_path):
    with pytest.raises(InvalidInputError):
        write_image(tmp_path / "x.png", np.zeros((4, 4, 2)))


def test_gray_write_broadcasts(tmp_path, rng):
    img = rng.random((8, 8))
    write_image(tmp_path / "g.png", img)
    back = read_image(tmp_path / "g.png")
    assert np.array_equal(back[:, :, 0], back[:, :, 1])
