"""Image <-> patch-matrix conversion and overlap-averaging reassembly.

A patch matrix is m x p: column j holds the column-major vectorization of
the b x b window at the j-th coordinate (b = sqrt(m)).  Coordinates are
enumerated row-major over the stride grid; when the stride does not land on
the last valid offset, a clamped final row/column of positions is appended
so every pixel is covered.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


@dataclass(frozen=True)
class PatchGeometry:
    image_shape: tuple  # (M, N)
    side: int  # b
    stride: int
    coords: np.ndarray  # (p, 2) int64 top-left (row, col), row-major order

    @property
    def count(self) -> int:
        return self.coords.shape[0]


@dataclass
class PatchMatrix:
    data: np.ndarray  # (m, p) float64
    geom: PatchGeometry

    @property
    def patch_dim(self) -> int:
        return self.data.shape[0]

    @property
    def count(self) -> int:
        return self.data.shape[1]


def _axis_positions(extent: int, side: int, stride: int) -> np.ndarray:
    # stride grid plus a clamped final position when stride overshoots
    last = extent - side
    pos = list(range(0, last + 1, stride))
    if pos[-1] != last:
        pos.append(last)
    return np.asarray(pos, dtype=np.int64)


def patch_grid(image_shape, side: int, stride: int) -> PatchGeometry:
    """Build the clamped row-major coordinate grid for an image."""
    M, N = image_shape
    if M < side or N < side:
        raise ValueError(f"image {image_shape} smaller than patch side {side}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    rows = _axis_positions(M, side, stride)
    cols = _axis_positions(N, side, stride)
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    coords = np.stack([rr.ravel(), cc.ravel()], axis=1)
    return PatchGeometry((M, N), side, stride, coords)


def extract_patches(img: np.ndarray, patch_dim: int, stride: int = 1) -> PatchMatrix:
    """Extract overlapping patches into an m x p matrix.

    :param img: 2-D image (any float range; [0,1] in the pipeline)
    :param patch_dim: pixels per patch m (perfect square)
    :param stride: step between patch origins
    """
    img = np.asarray(img, dtype=np.float64)
    side = int(round(np.sqrt(patch_dim)))
    if side * side != patch_dim:
        raise ValueError("patch_dim must be a perfect square")
    geom = patch_grid(img.shape, side, stride)
    windows = sliding_window_view(img, (side, side))
    sel = windows[geom.coords[:, 0], geom.coords[:, 1]]  # (p, b, b)
    # column-major within each patch: transpose (row, col) before C-flatten
    data = sel.transpose(0, 2, 1).reshape(geom.count, patch_dim).T
    return PatchMatrix(np.ascontiguousarray(data), geom)


def _flat_indices(geom: PatchGeometry) -> np.ndarray:
    m = geom.side * geom.side
    entry = np.arange(m)
    di = entry % geom.side  # row offset within the patch (column-major)
    dj = entry // geom.side
    rows = geom.coords[:, 0][None, :] + di[:, None]  # (m, p)
    cols = geom.coords[:, 1][None, :] + dj[:, None]
    return rows * geom.image_shape[1] + cols


def assemble_image(patches: PatchMatrix, clip: bool = True) -> np.ndarray:
    """Reassemble an image as the per-pixel mean over covering patches.

    The clamped grid guarantees every pixel is covered.  np.bincount keeps
    the accumulation order fixed, so assembly is bit-reproducible.  Set
    clip=False to get raw averages (used when visualizing signed
    components); the pipeline output is clipped to [0,1] once, here.
    """
    geom = patches.geom
    m = geom.side * geom.side
    if patches.data.shape[0] != m or patches.data.shape[1] != geom.count:
        raise ValueError(
            f"patch data {patches.data.shape} inconsistent with geometry "
            f"(expected ({m}, {geom.count}))"
        )
    M, N = geom.image_shape
    flat = _flat_indices(geom).ravel()
    sums = np.bincount(flat, weights=patches.data.ravel(), minlength=M * N)
    counts = np.bincount(flat, minlength=M * N)
    img = (sums / counts).reshape(M, N)
    if clip:
        np.clip(img, 0.0, 1.0, out=img)
    return img


def patch_column_stats(data: np.ndarray):
    """Per-column mean and population standard deviation (divide by m)."""
    data = np.asarray(data, dtype=np.float64)
    return data.mean(axis=0), data.std(axis=0)
