"""Correlated/independent decomposition of a co-registered image pair.

The relaxed objective couples a patch-wise squared-Pearson decorrelation
term on the independent components E1, E2 with quadratic penalties
(rho/2)||D_k A_k + E_k - X_k||_F^2.  It is minimized by alternating (a) one
coupled dictionary-learning step on the targets X_k - E_k and (b) the
closed-form simultaneous update of E1, E2 below, for a fixed number of
outer iterations.  Column statistics (mean, population std) are those of
the CURRENT independent components and are frozen within one update.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .coding import SparseCodePair
from .config import FusionConfig
from .learning import LearningState, init_learning, learning_step
from .patches import PatchGeometry, extract_patches, patch_column_stats
from .validation import check_gray_image, check_same_shape


@dataclass
class DecompositionState:
    X1: np.ndarray  # (m, p) patch targets, fixed
    X2: np.ndarray
    learning: LearningState
    E1: np.ndarray  # independent components, start all-zero
    E2: np.ndarray
    iteration: int
    rho: float
    delta: float


@dataclass
class DecompositionResult:
    Z1: np.ndarray  # correlated parts D_k A_k, (m, p)
    Z2: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    codes: SparseCodePair
    residual1: np.ndarray  # X_k - Z_k - E_k
    residual2: np.ndarray
    objective_trace: list = field(default_factory=list)
    pearson: float = 0.0
    geom: PatchGeometry | None = None


def pearson_cost(E1, E2, delta: float) -> float:
    """Sum of squared centered products, patch-normalized.

    sum_{ij} ((E1_ij - mu1_j)(E2_ij - mu2_j))^2 / max(s1_j^2 s2_j^2, delta);
    the max() guard mirrors the E-update denominators.
    """
    E1 = np.asarray(E1, dtype=np.float64)
    E2 = np.asarray(E2, dtype=np.float64)
    if E1.shape != E2.shape:
        raise ValueError(f"component shapes differ: {E1.shape} vs {E2.shape}")
    mu1, s1 = patch_column_stats(E1)
    mu2, s2 = patch_column_stats(E2)
    den = np.maximum(s1**2 * s2**2, delta)
    num = ((E1 - mu1) * (E2 - mu2)) ** 2
    return float(np.sum(num / den))


def em_update(state: DecompositionState):
    """Closed-form simultaneous update of both independent components.

    With w1_ij = 2 (E2_ij - mu2_j)^2 / max(s1_j^2 s2_j^2, delta):

        E1+_ij = (rho (X1 - D1 A1)_ij + w1_ij mu1_j) / (rho + w1_ij)

    and symmetrically for E2 with w2 built from (E1 - mu1)^2.  Both sides
    use the pre-update statistics (Jacobi update), so the pair is the exact
    stationary point of the quadratic-plus-decorrelation surrogate with the
    statistics frozen.
    """
    ls = state.learning
    R1 = state.X1 - ls.D1 @ ls.codes.A1
    R2 = state.X2 - ls.D2 @ ls.codes.A2
    mu1, s1 = patch_column_stats(state.E1)
    mu2, s2 = patch_column_stats(state.E2)
    den = np.maximum(s1**2 * s2**2, state.delta)
    w1 = 2.0 * (state.E2 - mu2) ** 2 / den
    w2 = 2.0 * (state.E1 - mu1) ** 2 / den
    E1n = (state.rho * R1 + w1 * mu1) / (state.rho + w1)
    E2n = (state.rho * R2 + w2 * mu2) / (state.rho + w2)
    return E1n, E2n


def objective(state: DecompositionState) -> float:
    """Monitored objective: pearson_cost + (rho/2) sum_k ||D_kA_k+E_k-X_k||^2."""
    ls = state.learning
    pen = (
        np.linalg.norm(ls.D1 @ ls.codes.A1 + state.E1 - state.X1) ** 2
        + np.linalg.norm(ls.D2 @ ls.codes.A2 + state.E2 - state.X2) ** 2
    )
    return pearson_cost(state.E1, state.E2, state.delta) + 0.5 * state.rho * float(pen)


def decompose_patches(
    X1, X2, cfg: FusionConfig, n_threads: int = 1, geom: PatchGeometry | None = None
) -> DecompositionResult:
    """Run the full alternation directly on patch matrices."""
    X1 = np.asarray(X1, dtype=np.float64)
    X2 = np.asarray(X2, dtype=np.float64)
    check_same_shape(X1, X2, "patch matrices")
    if X1.shape[0] != cfg.patch_dim:
        raise ValueError(
            f"patch matrices have m={X1.shape[0]}, config says {cfg.patch_dim}"
        )
    state = DecompositionState(
        X1,
        X2,
        init_learning(cfg),
        np.zeros_like(X1),
        np.zeros_like(X2),
        0,
        cfg.rho,
        cfg.delta,
    )
    trace = []
    for _ in range(cfg.outer_iters):
        state.learning = learning_step(
            X1 - state.E1, X2 - state.E2, state.learning, cfg, n_threads
        )
        state.E1, state.E2 = em_update(state)
        state.iteration += 1
        trace.append(objective(state))
    ls = state.learning
    Z1 = ls.D1 @ ls.codes.A1
    Z2 = ls.D2 @ ls.codes.A2
    return DecompositionResult(
        Z1=Z1,
        Z2=Z2,
        E1=state.E1,
        E2=state.E2,
        D1=ls.D1,
        D2=ls.D2,
        codes=ls.codes,
        residual1=X1 - Z1 - state.E1,
        residual2=X2 - Z2 - state.E2,
        objective_trace=trace,
        pearson=pearson_cost(state.E1, state.E2, cfg.delta),
        geom=geom,
    )


def decompose(img1, img2, cfg: FusionConfig, n_threads: int = 1) -> DecompositionResult:
    """Decompose an image pair into correlated and independent patch parts."""
    img1 = check_gray_image(img1, "img1")
    img2 = check_gray_image(img2, "img2")
    check_same_shape(img1, img2, "images")
    side = math.isqrt(cfg.patch_dim)
    if img1.shape[0] < side or img1.shape[1] < side:
        raise ValueError(f"images {img1.shape} smaller than patch side {side}")
    P1 = extract_patches(img1, cfg.patch_dim, cfg.stride)
    P2 = extract_patches(img2, cfg.patch_dim, cfg.stride)
    return decompose_patches(P1.data, P2.data, cfg, n_threads, geom=P1.geom)
