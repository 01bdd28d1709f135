"""Separable overcomplete 2-D DCT dictionary (the coding initialization)."""

import math

import numpy as np


def _dct_atoms_1d(side: int, K: int) -> np.ndarray:
    """K 1-D cosine atoms of length `side`, AC atoms mean-removed, all unit norm."""
    V = np.empty((side, K))
    i = np.arange(side)
    for k in range(K):
        v = np.cos(np.pi * k * (2 * i + 1) / (2 * K))
        if k > 0:
            v = v - v.mean()  # keep the DC atom as the unique constant atom
        V[:, k] = v / np.linalg.norm(v)
    return V


def overcomplete_dct(patch_dim: int, n_atoms: int) -> np.ndarray:
    """Build the m x n overcomplete DCT dictionary.

    1-D atoms use K = ceil(sqrt(n)) frequencies; 2-D atoms are their outer
    products taken in (row-frequency, col-frequency) lexicographic order,
    vectorized column-major, truncated to the first n and re-normalized.
    With n == m this is the orthonormal 2-D DCT basis.
    """
    side = math.isqrt(patch_dim)
    if side * side != patch_dim:
        raise ValueError("patch_dim must be a perfect square")
    if n_atoms < patch_dim:
        raise ValueError("n_atoms must be >= patch_dim")
    K = math.ceil(math.sqrt(n_atoms))
    V = _dct_atoms_1d(side, K)
    D = np.empty((patch_dim, n_atoms))
    for t in range(n_atoms):
        k_row, k_col = divmod(t, K)
        # vec_F(outer(v_row, v_col)) = kron(v_col, v_row)
        atom = np.kron(V[:, k_col], V[:, k_row])
        D[:, t] = atom / np.linalg.norm(atom)
    return D
