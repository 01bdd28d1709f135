"""Coupled dictionary learning driver: alternate joint sparse coding and
per-side K-SVD on the correlated-part targets.

Sparsity is warm-started: the first step codes with T=1 and each step raises
the level by one up to the configured maximum, so learning with the default
five outer iterations ends exactly at T=5.
"""

from dataclasses import dataclass, field

import numpy as np

from .coding import SparseCodePair, code_all
from .config import FusionConfig
from .dct import overcomplete_dct
from .ksvd import update_pair


@dataclass
class LearningState:
    D1: np.ndarray
    D2: np.ndarray
    codes: SparseCodePair | None
    effective_T: int
    objective_trace: list = field(default_factory=list)


def init_learning(cfg: FusionConfig) -> LearningState:
    """Fresh state: both dictionaries start from the overcomplete DCT."""
    D = overcomplete_dct(cfg.patch_dim, cfg.dict_atoms)
    return LearningState(D.copy(), D.copy(), None, 1, [])


def learning_step(
    X1p, X2p, state: LearningState, cfg: FusionConfig, n_threads: int = 1
) -> LearningState:
    """One alternation (coding at the current effective T, then K-SVD).

    X1p, X2p are the correlated-part targets (inputs minus the current
    independent components).  Appends the post-update representation error
    ||D1 A1 - X1p||_F^2 + ||D2 A2 - X2p||_F^2 to the trace and bumps the
    warm-start level.
    """
    codes = code_all(
        X1p, X2p, state.D1, state.D2, state.effective_T, cfg.epsilon, n_threads
    )
    D1, D2, A1, A2, _ = update_pair(state.D1, state.D2, codes, X1p, X2p)
    codes = SparseCodePair(A1, A2, codes.support, codes.sizes)
    obj = (
        np.linalg.norm(D1 @ A1 - X1p) ** 2
        + np.linalg.norm(D2 @ A2 - X2p) ** 2
    )
    return LearningState(
        D1,
        D2,
        codes,
        min(state.effective_T + 1, cfg.sparsity_T),
        state.objective_trace + [float(obj)],
    )
