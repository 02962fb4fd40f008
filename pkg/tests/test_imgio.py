import numpy as np
import pytest

from vtimeline import imgio


def test_pgm_round_trip(tmp_path):
    img = np.arange(120, dtype=np.uint8).reshape(10, 12)
    path = tmp_path / "x.pgm"
    imgio.write_netpbm(path, img)
    back = imgio.read_netpbm(path)
    assert back.dtype == np.uint8
    assert np.array_equal(back, img)


def test_ppm_round_trip(tmp_path):
    img = np.random.default_rng(0).integers(0, 256, size=(6, 7, 3), dtype=np.uint8)
    path = tmp_path / "x.ppm"
    imgio.write_netpbm(path, img)
    assert np.array_equal(imgio.read_netpbm(path), img)


def test_reader_tolerates_comments(tmp_path):
    raw = b"P5\n# a comment\n3 2\n# another\n255\n" + bytes(range(6))
    path = tmp_path / "c.pgm"
    path.write_bytes(raw)
    img = imgio.read_netpbm(path)
    assert img.shape == (2, 3)
    assert img[0, 0] == 0 and img[1, 2] == 5


def test_truncated_raster_rejected(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P5\n4 4\n255\n\x00\x01")
    with pytest.raises(imgio.ImageFormatError):
        imgio.read_netpbm(path)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P3\n1 1\n255\n0")
    with pytest.raises(imgio.ImageFormatError):
        imgio.read_netpbm(path)


def test_grayscale_bt601():
    rgb = np.zeros((1, 1, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 0, 0)
    assert imgio.to_grayscale(rgb)[0, 0] == pytest.approx(0.299 * 255)
    rgb[0, 0] = (0, 255, 0)
    assert imgio.to_grayscale(rgb)[0, 0] == pytest.approx(0.587 * 255)
    gray = np.full((2, 2), 17, dtype=np.uint8)
    assert np.array_equal(imgio.to_grayscale(gray), np.full((2, 2), 17.0))


def test_to_uint8_rounds_and_clips():
    img = np.array([[-3.2, 12.6], [255.9, 254.49]])
    out = imgio.to_uint8(img)
    assert out.tolist() == [[0, 13], [255, 254]]
