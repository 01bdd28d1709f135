"""Input-validation helpers shared by the library API and the estimator."""

import numpy as np


def check_gray_image(img, name: str = "image") -> np.ndarray:
    """Validate a grayscale image: 2-D, finite, values in [0, 1].

    Returns the image as a float64 array (copying only if needed).
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} has values outside [0, 1]")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "inputs"):
    if a.shape != b.shape:
        raise ValueError(f"{what} must have equal shapes: {a.shape} vs {b.shape}")


def check_dictionary(D, name: str = "dictionary", tol: float = 1e-8) -> np.ndarray:
    """Validate an m x n dictionary with unit-norm columns."""
    arr = np.asarray(D, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    norms = np.linalg.norm(arr, axis=0)
    if np.any(np.abs(norms - 1.0) > tol):
        worst = int(np.argmax(np.abs(norms - 1.0)))
        raise ValueError(
            f"{name} column {worst} has norm {norms[worst]:.6g}, expected 1"
        )
    return arr


def check_code_matrix(A, n_atoms: int, name: str = "codes") -> np.ndarray:
    arr = np.asarray(A, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != n_atoms:
        raise ValueError(
            f"{name} must be ({n_atoms}, p), got shape {arr.shape}"
        )
    return arr
