"""Joint sparse coding with a shared column support (modified SOMP).

Per greedy step one atom index is chosen for BOTH signals by maximizing
|r1' [D1]_t| + |r2' [D2]_t| over the atoms still eligible; each side then
re-solves its own least-squares problem over the shared support.  A column
stops when its support reaches T or either residual norm drops below eps
(checked on entry as well, so zero signals get empty supports).

Columns are processed in fixed-size chunks.  Per-column work is entirely
self-contained, so the chunked/threaded paths are bit-identical to the
sequential one by construction.  Selection ties break to the smallest atom
index (np.argmax returns the first maximizer).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

# condition trigger for rejecting a selected atom: the QR of a selected
# sub-dictionary is declared rank-deficient when min|R_ii|/max|R_ii| falls
# below this ratio (on either side)
_RANK_RTOL = 1e-10
_CHUNK = 4096


@dataclass
class SparseCodePair:
    """Two n x p code matrices sharing column supports.

    support is (T, p) int64, -1 padded, rows in selection order; sizes gives
    the per-column support length.  Nonzeros of A1/A2 live only at supported
    indices.
    """

    A1: np.ndarray
    A2: np.ndarray
    support: np.ndarray
    sizes: np.ndarray

    @property
    def n_atoms(self) -> int:
        return self.A1.shape[0]

    @property
    def count(self) -> int:
        return self.A1.shape[1]

    def column_support(self, j: int) -> np.ndarray:
        return self.support[: self.sizes[j], j].copy()


def _solve_upper(R, y):
    """Back-substitution for batched upper-triangular systems.

    :param R: (b, k, k) upper triangular
    :param y: (b, k)
    """
    k = R.shape[1]
    a = np.empty_like(y)
    a[:, k - 1] = y[:, k - 1] / R[:, k - 1, k - 1]
    for i in range(k - 2, -1, -1):
        tail = np.einsum("bj,bj->b", R[:, i, i + 1 :], a[:, i + 1 :])
        a[:, i] = (y[:, i] - tail) / R[:, i, i]
    return a


def _code_chunk(X1, X2, D1, D2, T, eps):
    """Run the greedy loop on one chunk of column pairs.

    Returns (coef1, coef2, support, sizes) with coef/support shaped (T, pc).
    """
    m, pc = X1.shape
    n = D1.shape[1]
    R1 = X1.copy()
    R2 = X2.copy()
    coef1 = np.zeros((T, pc))
    coef2 = np.zeros((T, pc))
    support = np.full((T, pc), -1, dtype=np.int64)
    sizes = np.zeros(pc, dtype=np.int64)
    eligible = np.ones((n, pc), dtype=bool)
    # entry check: tiny signals are left with empty supports
    active = (np.linalg.norm(R1, axis=0) >= eps) & (np.linalg.norm(R2, axis=0) >= eps)

    for step in range(T):
        work = np.flatnonzero(active)
        if work.size == 0:
            break
        k = step + 1
        scores = np.abs(D1.T @ R1[:, work]) + np.abs(D2.T @ R2[:, work])
        scores[~eligible[:, work]] = -np.inf

        pending = np.arange(work.size)
        while pending.size:
            t_star = np.argmax(scores[:, pending], axis=0)
            feasible = scores[t_star, pending] > -np.inf
            # columns with no eligible atom left simply stop growing
            active[work[pending[~feasible]]] = False
            pending = pending[feasible]
            t_star = t_star[feasible]
            if pending.size == 0:
                break
            cols = work[pending]
            supp = np.concatenate(
                [support[:step, cols], t_star[None, :]], axis=0
            )  # (k, nc)
            S1 = D1[:, supp].transpose(2, 0, 1)  # (nc, m, k)
            S2 = D2[:, supp].transpose(2, 0, 1)
            Q1, U1 = np.linalg.qr(S1)
            Q2, U2 = np.linalg.qr(S2)
            d1 = np.abs(np.diagonal(U1, axis1=1, axis2=2))
            d2 = np.abs(np.diagonal(U2, axis1=1, axis2=2))
            bad = (d1.min(axis=1) < _RANK_RTOL * d1.max(axis=1)) | (
                d2.min(axis=1) < _RANK_RTOL * d2.max(axis=1)
            )
            good = ~bad
            if np.any(good):
                gsel = np.flatnonzero(good)
                gcols = cols[gsel]
                support[step, gcols] = t_star[gsel]
                x1g = X1[:, gcols].T  # (ng, m)
                x2g = X2[:, gcols].T
                a1 = _solve_upper(U1[gsel], np.einsum("bmk,bm->bk", Q1[gsel], x1g))
                a2 = _solve_upper(U2[gsel], np.einsum("bmk,bm->bk", Q2[gsel], x2g))
                coef1[:k, gcols] = a1.T
                coef2[:k, gcols] = a2.T
                R1[:, gcols] = (x1g - np.einsum("bmk,bk->bm", S1[gsel], a1)).T
                R2[:, gcols] = (x2g - np.einsum("bmk,bk->bm", S2[gsel], a2)).T
                sizes[gcols] = k
                eligible[t_star[gsel], gcols] = False
            if np.any(bad):
                # rank-deficient selection: ban the atom for the column and
                # let the column pick again within this step
                bsel = np.flatnonzero(bad)
                eligible[t_star[bsel], cols[bsel]] = False
                scores[t_star[bsel], pending[bsel]] = -np.inf
            pending = pending[bad]
            t_star = None

        grown = np.flatnonzero(support[step] >= 0)
        if grown.size:
            small = (np.linalg.norm(R1[:, grown], axis=0) < eps) | (
                np.linalg.norm(R2[:, grown], axis=0) < eps
            )
            active[grown[small]] = False

    return coef1, coef2, support, sizes


def code_column_pair(x1, x2, D1, D2, T: int, eps: float):
    """Code one signal pair; returns (a1, a2, support) with support ordered."""
    x1 = np.asarray(x1, dtype=np.float64).reshape(-1, 1)
    x2 = np.asarray(x2, dtype=np.float64).reshape(-1, 1)
    codes = code_all(x1, x2, D1, D2, T, eps)
    return codes.A1[:, 0], codes.A2[:, 0], codes.column_support(0)


def code_all(X1, X2, D1, D2, T: int, eps: float, n_threads: int = 1) -> SparseCodePair:
    """Code every column pair of X1, X2 (m x p each).

    Columns are independent; chunking is fixed regardless of n_threads, so
    the output is identical for any thread count.
    """
    X1 = np.asarray(X1, dtype=np.float64)
    X2 = np.asarray(X2, dtype=np.float64)
    if X1.shape != X2.shape:
        raise ValueError(f"signal matrices must match: {X1.shape} vs {X2.shape}")
    if D1.shape != D2.shape or D1.shape[0] != X1.shape[0]:
        raise ValueError(
            f"dictionary shapes {D1.shape}/{D2.shape} inconsistent with "
            f"signals {X1.shape}"
        )
    if T < 1:
        raise ValueError("T must be >= 1")
    m, p = X1.shape
    n = D1.shape[1]
    A1 = np.zeros((n, p))
    A2 = np.zeros((n, p))
    support = np.full((T, p), -1, dtype=np.int64)
    sizes = np.zeros(p, dtype=np.int64)

    starts = list(range(0, p, _CHUNK))

    def run(start):
        stop = min(start + _CHUNK, p)
        return start, stop, _code_chunk(
            X1[:, start:stop], X2[:, start:stop], D1, D2, T, eps
        )

    if n_threads > 1 and len(starts) > 1:
        # worker threads over chunks; BLAS pinned to one thread so the only
        # parallelism is the deterministic chunk split
        with threadpool_limits(limits=1):
            with ThreadPoolExecutor(max_workers=n_threads) as ex:
                results = list(ex.map(run, starts))
    else:
        results = [run(s) for s in starts]

    for start, stop, (c1, c2, supp, sz) in results:
        support[:, start:stop] = supp
        sizes[start:stop] = sz
        mask = supp >= 0
        rows = supp[mask]
        cols = np.nonzero(mask)[1] + start
        A1[rows, cols] = c1[mask]
        A2[rows, cols] = c2[mask]
    return SparseCodePair(A1, A2, support, sizes)
