"""Tridiagonal solver and a dense reference solver."""

from dataclasses import dataclass

import numba
import numpy as np

from .errors import SingularSystemError

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class TridiagonalSystem:
    """Row ``i`` reads ``sub[i-1] u[i-1] + diag[i] u[i] + sup[i] u[i+1] = rhs[i]``."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = self.diag.size
        if n < 1:
            raise ValueError("empty system")
        if self.sub.size != n - 1 or self.sup.size != n - 1 or self.rhs.size != n:
            raise ValueError(
                f"inconsistent lengths: sub={self.sub.size}, diag={n}, "
                f"sup={self.sup.size}, rhs={self.rhs.size}"
            )

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(self.sub, -1) + np.diag(self.sup, 1)
        return m

    def matvec(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[1:] += self.sub * u[:-1]
        out[:-1] += self.sup * u[1:]
        return out

    def residual(self, u) -> np.ndarray:
        return self.matvec(u) - self.rhs


@numba.njit(cache=True)
def _thomas_kernel(sub, diag, sup, rhs, tiny):
    n = diag.size
    cp = np.empty(n)
    dp = np.empty(n)
    x = np.empty(n)
    piv = diag[0]
    if not (abs(piv) >= tiny) or not np.isfinite(piv):
        return x, 0
    cp[0] = sup[0] / piv if n > 1 else 0.0
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * cp[i - 1]
        if not (abs(piv) >= tiny) or not np.isfinite(piv):
            return x, i
        cp[i] = sup[i] / piv if i < n - 1 else 0.0
        dp[i] = (rhs[i] - sub[i - 1] * dp[i - 1]) / piv
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x, -1


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    """Solve by forward elimination and back substitution, without pivoting.

    Raises :class:`SingularSystemError` on a zero, denormal or non-finite
    pivot; ``exc.index`` is the offending row.
    """
    args = [np.ascontiguousarray(a, dtype=float)
            for a in (system.sub, system.diag, system.sup, system.rhs)]
    x, bad = _thomas_kernel(*args, _TINY)
    if bad >= 0:
        raise SingularSystemError(f"zero or denormal pivot at row {bad}", index=int(bad))
    return x


def dense_solve(matrix, rhs) -> np.ndarray:
    """LU solve with partial pivoting (LAPACK ``gesv``) for cross-checks."""
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"matrix must be square, got shape {matrix.shape}")
    if rhs.shape[0] != matrix.shape[0]:
        raise ValueError("rhs length does not match matrix")
    if np.linalg.cond(matrix) > 1.0 / np.finfo(float).eps:
        raise SingularSystemError("matrix is numerically singular")
    try:
        return np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
