import numpy as np
import pytest
from PIL import Image

from cdlfuse.image_io import (
    ColorImage,
    load_image,
    replace_luminance,
    rgb_to_ycbcr,
    save_image,
    ycbcr_to_rgb,
)


def test_load_scales_by_255(tmp_path):
    arr = np.array([[0, 128, 255]], dtype=np.uint8)
    path = tmp_path / "g.png"
    Image.fromarray(arr, mode="L").save(path)
    img = load_image(path)
    assert img[0, 0] == 0.0
    assert img[0, 2] == 1.0
    assert img[0, 1] == pytest.approx(128 / 255)


def test_save_rounds_half_away_from_zero(tmp_path):
    # 0.5*255 = 127.5 must become 128, not banker's-round to 127
    img = np.array([[0.5, 0.0, 1.0]])
    path = tmp_path / "q.png"
    save_image(img, path)
    back = np.asarray(Image.open(path))
    assert back.tolist() == [[128, 0, 255]]


def test_save_load_roundtrip_within_half_step(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.random((13, 17))
    path = tmp_path / "r.png"
    save_image(img, path)
    back = load_image(path)
    assert np.max(np.abs(back - img)) <= 1 / 510 + 1e-12


def test_color_roundtrip_and_tags(tmp_path):
    rng = np.random.default_rng(1)
    arr = (rng.random((5, 7, 3)) * 255).astype(np.uint8)
    path = tmp_path / "c.png"
    Image.fromarray(arr, mode="RGB").save(path)
    img = load_image(path)
    assert isinstance(img, ColorImage)
    assert img.tag == "RGB"
    np.testing.assert_allclose(img.data, arr / 255.0)


def test_save_ycbcr_tagged_rejected(tmp_path):
    img = ColorImage(np.full((2, 2, 3), 0.5), "YCbCr")
    with pytest.raises(ValueError, match="convert to RGB first"):
        save_image(img, tmp_path / "x.png")


def test_unsupported_format_rejected(tmp_path):
    path = tmp_path / "j.jpg"
    Image.fromarray(np.zeros((4, 4), dtype=np.uint8), mode="L").save(path, format="JPEG")
    with pytest.raises(ValueError, match="unsupported format"):
        load_image(path)


def test_unsupported_mode_rejected(tmp_path):
    path = tmp_path / "p.png"
    Image.fromarray(np.zeros((4, 4), dtype=np.uint16)).save(path)
    with pytest.raises(ValueError, match="unsupported"):
        load_image(path)


def test_achromatic_maps_to_neutral_chroma():
    g = np.full((3, 3, 3), 0.3)
    out = rgb_to_ycbcr(ColorImage(g, "RGB"))
    assert out.tag == "YCbCr"
    np.testing.assert_allclose(out.data[..., 0], 0.3, atol=1e-12)
    np.testing.assert_allclose(out.data[..., 1], 0.5, atol=1e-12)
    np.testing.assert_allclose(out.data[..., 2], 0.5, atol=1e-12)


def test_pure_red_oracle():
    # hand evaluation of the affine formulas:
    #   Y  = 0.299*1 = 0.299
    #   Cb = 0.5 + (0 - 0.299)*0.564 = 0.331364
    #   Cr = 0.5 + (1 - 0.299)*0.713 = 0.5 + 0.701*0.713 = 0.999813
    red = np.zeros((1, 1, 3))
    red[..., 0] = 1.0
    out = rgb_to_ycbcr(ColorImage(red, "RGB")).data[0, 0]
    assert out[0] == pytest.approx(0.299, abs=1e-12)
    assert out[1] == pytest.approx(0.5 - 0.299 * 0.564, abs=1e-12)
    assert out[2] == pytest.approx(0.999813, abs=1e-9)


def test_black_maps_to_neutral():
    black = np.zeros((2, 2, 3))
    out = rgb_to_ycbcr(ColorImage(black, "RGB")).data
    np.testing.assert_allclose(out[..., 0], 0.0, atol=1e-15)
    np.testing.assert_allclose(out[..., 1], 0.5, atol=1e-15)
    np.testing.assert_allclose(out[..., 2], 0.5, atol=1e-15)
    # and back
    rgb = ycbcr_to_rgb(ColorImage(out, "YCbCr")).data
    np.testing.assert_allclose(rgb, 0.0, atol=1e-12)


def test_gray_fixed_point_inverse():
    mid = np.full((2, 2, 3), 0.5)
    out = ycbcr_to_rgb(ColorImage(mid, "YCbCr")).data
    np.testing.assert_allclose(out, 0.5, atol=1e-12)


def test_roundtrip_random_colors_tight():
    rng = np.random.default_rng(7)
    rgb = ColorImage(rng.random((9, 11, 3)), "RGB")
    back = ycbcr_to_rgb(rgb_to_ycbcr(rgb))
    assert back.tag == "RGB"
    assert np.max(np.abs(back.data - rgb.data)) <= 1e-6


def test_wrong_tag_raises():
    img = ColorImage(np.full((2, 2, 3), 0.5), "RGB")
    with pytest.raises(ValueError, match="YCbCr"):
        ycbcr_to_rgb(img)
    with pytest.raises(ValueError, match="RGB"):
        rgb_to_ycbcr(ColorImage(img.data, "YCbCr"))


def test_replace_luminance_identity_and_passthrough():
    rng = np.random.default_rng(3)
    ycc = ColorImage(rng.random((4, 5, 3)), "YCbCr")
    same = replace_luminance(ycc, ycc.data[..., 0])
    np.testing.assert_array_equal(same.data, ycc.data)
    zeroed = replace_luminance(ycc, np.zeros((4, 5)))
    np.testing.assert_array_equal(zeroed.data[..., 0], 0.0)
    np.testing.assert_array_equal(zeroed.data[..., 1:], ycc.data[..., 1:])


def test_replace_luminance_dimension_mismatch():
    ycc = ColorImage(np.full((4, 5, 3), 0.5), "YCbCr")
    with pytest.raises(ValueError, match="does not match"):
        replace_luminance(ycc, np.zeros((5, 4)))
