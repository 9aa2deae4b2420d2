"""Banded LU factorization of complex band matrices.

Thin wrapper over LAPACK zgbtrf/zgbtrs.  A matrix with lower bandwidth kl and
upper bandwidth ku is stored in the (2*kl+ku+1, n) LAPACK layout, factored once
with partial pivoting, and reused for any number of right-hand sides.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import get_lapack_funcs
from scipy.sparse import spmatrix

ComplexArray = NDArray[np.complex128]


def band_storage(matrix: spmatrix, kl: int, ku: int) -> ComplexArray:
    """Pack a sparse matrix into LAPACK band storage for gbtrf.

    Entry (i, j) lands in ab[kl + ku + i - j, j]; the top kl rows are pivot
    workspace.  Raises if any entry falls outside the declared band.
    """
    coo = matrix.tocoo()
    n = coo.shape[0]
    off = coo.row - coo.col
    if off.size and (off.max() > kl or -off.min() > ku):
        raise ValueError(
            f"entry outside declared band: kl={kl}, ku={ku}, "
            f"found offsets [{-off.min()}, {off.max()}]"
        )
    ab = np.zeros((2 * kl + ku + 1, n), dtype=np.complex128)
    ab[kl + ku + off, coo.col] = coo.data
    return ab


class BandedLU:
    """LU factorization of a banded complex matrix, computed once at init."""

    def __init__(self, matrix: spmatrix, kl: int, ku: int, label: str = "system"):
        n = matrix.shape[0]
        if matrix.shape[1] != n:
            raise ValueError(f"{label}: matrix must be square, got {matrix.shape}")
        ab = band_storage(matrix, kl, ku)
        gbtrf, gbtrs = get_lapack_funcs(("gbtrf", "gbtrs"), (ab,))
        lu, ipiv, info = gbtrf(ab, kl, ku)
        if info != 0:
            raise ValueError(f"{label}: banded LU failed, zgbtrf info={info}")
        self.n = n
        self.kl = kl
        self.ku = ku
        self._lu = lu
        self._ipiv = ipiv
        self._gbtrs = gbtrs
        self.factor_count = 1
        self.solve_count = 0

    def solve(self, rhs: ComplexArray) -> ComplexArray:
        x, info = self._gbtrs(self._lu, self.kl, self.ku, rhs.astype(np.complex128, copy=False), self._ipiv)
        if info != 0:
            raise ValueError(f"banded back-substitution failed, zgbtrs info={info}")
        self.solve_count += 1
        return x

    def reconstruct_dense(self) -> ComplexArray:
        """Rebuild the factored matrix as P_0 L_0 P_1 L_1 ... U (small n only).

        gbtrf stores multipliers in place without retroactive pivot swaps, so
        the factorization is the interleaved product above, with scipy's ipiv
        zero-based.
        """
        n, kl, ku = self.n, self.kl, self.ku
        full = np.zeros((n, n), dtype=np.complex128)
        for j in range(n):
            for i in range(max(0, j - (kl + ku)), j + 1):
                full[i, j] = self._lu[kl + ku + i - j, j]
        for j in range(n - 2, -1, -1):
            lj = np.eye(n, dtype=np.complex128)
            for i in range(j + 1, min(n, j + kl + 1)):
                lj[i, j] = self._lu[kl + ku + i - j, j]
            full = lj @ full
            piv = self._ipiv[j]
            if piv != j:
                full[[j, piv], :] = full[[piv, j], :]
        return full
