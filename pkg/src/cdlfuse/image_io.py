"""8-bit PNG I/O and RGB <-> YCbCr conversion.

Grayscale images are plain 2-D float64 arrays with values in [0, 1] (the
unit every other module works on).  Color images carry a channel tag so the
luminance-only fusion path cannot silently mix spaces.  All conversions are
full-range BT.601 expressed directly on [0, 1] values.
"""

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .validation import check_gray_image

# full-range BT.601 luma weights and chroma scale factors
_KR, _KG, _KB = 0.299, 0.587, 0.114
_CB_SCALE = 0.564
_CR_SCALE = 0.713


@dataclass
class ColorImage:
    """Three-channel image in [0,1] with an explicit space tag."""

    data: np.ndarray  # (M, N, 3) float64
    tag: str  # "RGB" or "YCbCr"

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise ValueError(f"color data must be (M, N, 3), got {self.data.shape}")
        if self.tag not in ("RGB", "YCbCr"):
            raise ValueError(f"channel tag must be 'RGB' or 'YCbCr', got {self.tag!r}")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def load_image(path):
    """Load an 8-bit grayscale or RGB PNG to [0,1] floats (v / 255).

    Returns a 2-D array for grayscale files, a ColorImage tagged RGB for
    color files.
    """
    with Image.open(path) as im:
        if im.format != "PNG":
            raise ValueError(f"{path}: unsupported format {im.format!r}, expected PNG")
        if im.mode == "L":
            return np.asarray(im, dtype=np.float64) / 255.0
        if im.mode == "RGB":
            return ColorImage(np.asarray(im, dtype=np.float64) / 255.0, "RGB")
        raise ValueError(
            f"{path}: unsupported mode {im.mode!r}, expected 8-bit L or RGB"
        )


def _quantize(arr: np.ndarray) -> np.ndarray:
    # round(v*255) with halves away from zero; np.round would round halves
    # to even and shift e.g. 0.5*255=127.5 down to 127
    return np.floor(arr * 255.0 + 0.5).astype(np.uint8)


def save_image(img, path):
    """Write an image as 8-bit PNG, quantizing by round(v*255)."""
    if isinstance(img, ColorImage):
        if img.tag != "RGB":
            raise ValueError("convert to RGB first (got a YCbCr-tagged image)")
        data = img.data
        if data.min() < 0.0 or data.max() > 1.0:
            raise ValueError("color samples outside [0, 1]")
        Image.fromarray(_quantize(data), mode="RGB").save(path, format="PNG")
    else:
        arr = check_gray_image(img)
        Image.fromarray(_quantize(arr), mode="L").save(path, format="PNG")


def rgb_to_ycbcr(img: ColorImage) -> ColorImage:
    """Full-range BT.601 on [0,1]: Y = .299R+.587G+.114B, Cb/Cr offset 0.5."""
    if img.tag != "RGB":
        raise ValueError(f"expected an RGB-tagged image, got {img.tag!r}")
    r, g, b = img.data[..., 0], img.data[..., 1], img.data[..., 2]
    y = _KR * r + _KG * g + _KB * b
    cb = 0.5 + (b - y) * _CB_SCALE
    cr = 0.5 + (r - y) * _CR_SCALE
    out = np.clip(np.stack([y, cb, cr], axis=-1), 0.0, 1.0)
    return ColorImage(out, "YCbCr")


def ycbcr_to_rgb(img: ColorImage) -> ColorImage:
    """Exact inverse of rgb_to_ycbcr (up to clipping)."""
    if img.tag != "YCbCr":
        raise ValueError(f"expected a YCbCr-tagged image, got {img.tag!r}")
    y, cb, cr = img.data[..., 0], img.data[..., 1], img.data[..., 2]
    r = y + (cr - 0.5) / _CR_SCALE
    b = y + (cb - 0.5) / _CB_SCALE
    g = (y - _KR * r - _KB * b) / _KG
    out = np.clip(np.stack([r, g, b], axis=-1), 0.0, 1.0)
    return ColorImage(out, "RGB")


def replace_luminance(color: ColorImage, y) -> ColorImage:
    """Swap in a new Y channel; Cb and Cr pass through untouched."""
    if color.tag != "YCbCr":
        raise ValueError(f"expected a YCbCr-tagged image, got {color.tag!r}")
    y = check_gray_image(y, "luminance")
    if y.shape != (color.height, color.width):
        raise ValueError(
            f"luminance shape {y.shape} does not match color image "
            f"({color.height}, {color.width})"
        )
    out = color.data.copy()
    out[..., 0] = y
    return ColorImage(out, "YCbCr")
