"""Fusion of a decomposed pair: max-absolute coefficient selection on the
correlated parts, independent parts carried over unaltered, residuals
dropped as noise, overlap-averaged reassembly, one final clip to [0,1].
"""

import numpy as np

from .config import FusionConfig
from .decomposition import DecompositionResult, decompose
from .image_io import ColorImage, replace_luminance, rgb_to_ycbcr, ycbcr_to_rgb
from .patches import PatchMatrix, assemble_image


def select_coefficients(codes):
    """Entrywise binary selection: keep the larger-magnitude coefficient.

    Ties go to side 1 (|A1| >= |A2| keeps A1; side 2 needs a strict win), so
    exactly one selected entry is nonzero wherever either code is.
    """
    A1, A2 = codes.A1, codes.A2
    keep1 = np.abs(A1) >= np.abs(A2)
    A1_sel = np.where(keep1, A1, 0.0)
    A2_sel = np.where(~keep1, A2, 0.0)
    return A1_sel, A2_sel


def fuse_correlated(D1, D2, codes) -> np.ndarray:
    """Fused correlated part D1 A1' + D2 A2' from the selected coefficients."""
    if D1.shape != D2.shape:
        raise ValueError(f"dictionary shapes differ: {D1.shape} vs {D2.shape}")
    if codes.A1.shape[0] != D1.shape[1]:
        raise ValueError(
            f"codes have {codes.A1.shape[0]} atoms, dictionaries {D1.shape[1]}"
        )
    A1_sel, A2_sel = select_coefficients(codes)
    return D1 @ A1_sel + D2 @ A2_sel


def fuse_components(result: DecompositionResult) -> np.ndarray:
    """Fused patch matrix: X_F = Z_F + E1 + E2 (residuals excluded)."""
    return fuse_correlated(result.D1, result.D2, result.codes) + result.E1 + result.E2


def fuse_images(img1, img2, cfg: FusionConfig | None = None, n_threads: int = 1):
    """End-to-end grayscale fusion of a co-registered pair."""
    cfg = FusionConfig() if cfg is None else cfg
    result = decompose(img1, img2, cfg, n_threads)
    XF = fuse_components(result)
    return assemble_image(PatchMatrix(XF, result.geom))


def fuse_color(
    anatomical, functional: ColorImage, cfg: FusionConfig | None = None,
    n_threads: int = 1,
) -> ColorImage:
    """Fuse a grayscale anatomical image with an RGB functional image.

    Fusion runs on the functional image's luminance only; Cb/Cr pass
    through untouched and the result is returned in RGB.
    """
    ycc = rgb_to_ycbcr(functional)
    fused_y = fuse_images(ycc.data[..., 0], anatomical, cfg, n_threads)
    return ycbcr_to_rgb(replace_luminance(ycc, fused_y))
