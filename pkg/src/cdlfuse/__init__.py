"""cdlfuse: multimodal image fusion via coupled dictionary learning.

A co-registered image pair is decomposed into correlated components (sparse
over a coupled dictionary pair with common column supports) and independent
components (driven toward patch-wise decorrelation); the correlated parts
are fused by a max-absolute-coefficient rule and the independent parts are
carried over unaltered.
"""

__version__ = "0.1.0"

from .coding import SparseCodePair, code_all, code_column_pair
from .config import FusionConfig, format_config, load_config
from .dct import overcomplete_dct
from .decomposition import (
    DecompositionResult,
    DecompositionState,
    decompose,
    decompose_patches,
    em_update,
    objective,
    pearson_cost,
)
from .estimator import CoupledFusion
from .fusion import (
    fuse_color,
    fuse_components,
    fuse_correlated,
    fuse_images,
    select_coefficients,
)
from .image_io import (
    ColorImage,
    load_image,
    replace_luminance,
    rgb_to_ycbcr,
    save_image,
    ycbcr_to_rgb,
)
from .ksvd import ksvd_update, update_pair
from .learning import LearningState, init_learning, learning_step
from .metrics import MetricsReport, build_report, image_std
from .patches import (
    PatchGeometry,
    PatchMatrix,
    assemble_image,
    extract_patches,
    patch_column_stats,
    patch_grid,
)

__all__ = [
    "CoupledFusion",
    "ColorImage",
    "DecompositionResult",
    "DecompositionState",
    "FusionConfig",
    "LearningState",
    "MetricsReport",
    "PatchGeometry",
    "PatchMatrix",
    "SparseCodePair",
    "assemble_image",
    "build_report",
    "code_all",
    "code_column_pair",
    "decompose",
    "decompose_patches",
    "em_update",
    "extract_patches",
    "format_config",
    "fuse_color",
    "fuse_components",
    "fuse_correlated",
    "fuse_images",
    "image_std",
    "init_learning",
    "ksvd_update",
    "learning_step",
    "load_config",
    "load_image",
    "objective",
    "overcomplete_dct",
    "patch_column_stats",
    "patch_grid",
    "pearson_cost",
    "replace_luminance",
    "rgb_to_ycbcr",
    "save_image",
    "select_coefficients",
    "update_pair",
    "ycbcr_to_rgb",
]
