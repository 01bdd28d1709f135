"""scikit-learn style front end to the fusion pipeline.

CoupledFusion is a BaseEstimator, so get_params/set_params/clone compose
with the wider ecosystem.  fit(X, Y) learns the pair decomposition; the
fused image and all decomposition pieces are exposed as fitted attributes.
There is no transform(): the learned dictionaries are specific to the
fitted pair, so projecting unrelated images through them would not be
meaningful.
"""

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .config import FusionConfig
from .decomposition import decompose
from .fusion import fuse_components
from .image_io import ColorImage, replace_luminance, rgb_to_ycbcr, ycbcr_to_rgb
from .patches import PatchMatrix, assemble_image
from .validation import check_gray_image, check_same_shape


class CoupledFusion(BaseEstimator):
    """Fuse a co-registered image pair via coupled dictionary learning.

    Parameters mirror FusionConfig; see that class for meanings.

    Attributes (after fit)
    ----------------------
    config_ : the validated FusionConfig actually used
    result_ : full DecompositionResult (dictionaries, codes, components)
    fused_image_ : the fused grayscale image in [0,1]
    """

    def __init__(
        self,
        patch_dim=64,
        dict_atoms=128,
        outer_iters=5,
        sparsity_T=5,
        rho=10.0,
        epsilon=1e-4,
        delta=1e-7,
        stride=1,
        n_threads=1,
    ):
        self.patch_dim = patch_dim
        self.dict_atoms = dict_atoms
        self.outer_iters = outer_iters
        self.sparsity_T = sparsity_T
        self.rho = rho
        self.epsilon = epsilon
        self.delta = delta
        self.stride = stride
        self.n_threads = n_threads

    def _config(self) -> FusionConfig:
        return FusionConfig(
            patch_dim=self.patch_dim,
            dict_atoms=self.dict_atoms,
            outer_iters=self.outer_iters,
            sparsity_T=self.sparsity_T,
            rho=self.rho,
            epsilon=self.epsilon,
            delta=self.delta,
            stride=self.stride,
        ).validate()

    def fit(self, X, Y):
        """Decompose the pair (X, Y) of grayscale images in [0,1]."""
        X = check_gray_image(X, "X")
        Y = check_gray_image(Y, "Y")
        check_same_shape(X, Y, "images")
        self.config_ = self._config()
        self.result_ = decompose(X, Y, self.config_, self.n_threads)
        XF = fuse_components(self.result_)
        self.fused_image_ = assemble_image(PatchMatrix(XF, self.result_.geom))
        return self

    def component_images(self):
        """Assembled (Z1, Z2, E1, E2) images; E images are raw averages
        (signed), not clipped."""
        check_is_fitted(self, "result_")
        res = self.result_
        z1 = assemble_image(PatchMatrix(res.Z1, res.geom))
        z2 = assemble_image(PatchMatrix(res.Z2, res.geom))
        e1 = assemble_image(PatchMatrix(res.E1, res.geom), clip=False)
        e2 = assemble_image(PatchMatrix(res.E2, res.geom), clip=False)
        return z1, z2, e1, e2

    def fuse_color(self, functional: ColorImage) -> ColorImage:
        """Re-attach chroma: replace the functional image's luminance with
        the fitted fused image (the functional image must be the one whose
        luminance was fused)."""
        check_is_fitted(self, "fused_image_")
        ycc = rgb_to_ycbcr(functional)
        return ycbcr_to_rgb(replace_luminance(ycc, self.fused_image_))
