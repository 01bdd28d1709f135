"""K-SVD dictionary update: rewrite atoms and their nonzero coefficients
without changing supports.

Atoms are swept in index order; each update replaces the atom with the
dominant left singular vector of the restricted representation error and
its coefficient row with sigma * v'.  The rank-1 pair comes from a power
iteration on the m x m Gram E_t E_t' (tolerance 1e-10, at most 1000 steps,
deterministic start = normalized first nonzero column of E_t), with the
atom sign fixed so its largest-magnitude entry is positive.  Dead atoms
(used by no column) are replaced by the worst-approximated signal column.
"""

import numpy as np

_POWER_TOL = 1e-10
_POWER_MAXITER = 1000
_TINY = 1e-12


def _dominant_rank1(E):
    """Dominant left singular vector of E, or None when E is all zero."""
    norms = np.linalg.norm(E, axis=0)
    j0 = int(np.argmax(norms > _TINY))
    if norms[j0] <= _TINY:
        return None
    u = E[:, j0] / norms[j0]
    G = E @ E.T
    for _ in range(_POWER_MAXITER):
        w = G @ u
        nw = np.linalg.norm(w)
        if nw <= _TINY:
            break
        w /= nw
        if np.linalg.norm(w - u) < _POWER_TOL:
            u = w
            break
        u = w
    imax = int(np.argmax(np.abs(u)))
    if u[imax] < 0:
        u = -u
    return u


def ksvd_update(D, A, X, support_pattern=None):
    """One K-SVD sweep over all atoms of one dictionary.

    :param D: m x n dictionary (unit columns)
    :param A: n x p codes; nonzero structure is treated as fixed
    :param X: m x p signals
    :param support_pattern: optional n x p bool mask giving the authoritative
        support (used by the coupled update so exact-zero coefficients cannot
        desynchronize the two sides); defaults to A != 0
    :returns: (D_new, A_new, replaced) where replaced lists atoms that were
        dead and resampled from the data
    """
    D = np.array(D, dtype=np.float64)
    A = np.array(A, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    n = D.shape[1]
    pattern = (A != 0) if support_pattern is None else support_pattern
    R = X - D @ A
    replaced = []
    for t in range(n):
        omega = np.flatnonzero(pattern[t])
        if omega.size == 0:
            # dead atom: resample from the currently worst-approximated
            # column (skipped when residuals are ~zero, e.g. all-black input)
            norms = np.linalg.norm(R, axis=0)
            j = int(np.argmax(norms))
            cand = X[:, j]
            cnorm = np.linalg.norm(cand)
            if norms[j] > _TINY and cnorm > _TINY:
                D[:, t] = cand / cnorm
                replaced.append(t)
            continue
        # restricted error with atom t's own contribution added back
        Et = R[:, omega] + np.outer(D[:, t], A[t, omega])
        u = _dominant_rank1(Et)
        if u is None:
            continue  # degenerate all-zero error: leave the atom alone
        sv = Et.T @ u
        R[:, omega] = Et - np.outer(u, sv)
        D[:, t] = u
        A[t, omega] = sv
    return D, A, replaced


def update_pair(D1, D2, codes, X1, X2):
    """K-SVD both sides independently, preserving the common support.

    The support pattern is taken from the union of the two codes' nonzeros,
    so a coefficient that happens to be exactly zero on one side still gets
    updated there, and dead atoms (zero rows) coincide across sides.
    Returns (D1, D2, A1, A2, replaced) with replaced the union of resampled
    atom indices.
    """
    A1, A2 = codes.A1, codes.A2
    pattern = (A1 != 0) | (A2 != 0)
    D1n, A1n, rep1 = ksvd_update(D1, A1, X1, support_pattern=pattern)
    D2n, A2n, rep2 = ksvd_update(D2, A2, X2, support_pattern=pattern)
    return D1n, D2n, A1n, A2n, sorted(set(rep1) | set(rep2))
