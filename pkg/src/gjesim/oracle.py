"""Reference solver used by the tests.

Plain Gaussian elimination with partial pivoting followed by explicit
back-substitution. It shares no code with the Gauss-Jordan kernels.
"""

import numpy as np

from .core import SingularMatrixError, as_array


def oracle_solve(A) -> np.ndarray:
    M = np.array(as_array(A), dtype=np.float64, copy=True)
    n = M.shape[0]
    scale = max(1.0, float(np.max(np.abs(M[:, :n])))) if n else 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(M[k:, k])))
        if abs(M[p, k]) <= 1e-14 * scale:
            raise SingularMatrixError(k, f"oracle: singular matrix at column {k}")
        if p != k:
            M[[k, p]] = M[[p, k]]
        for r in range(k + 1, n):
            factor = M[r, k] / M[k, k]
            if factor != 0.0:
                M[r, k:] = M[r, k:] - factor * M[k, k:]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        acc = M[k, n] - np.dot(M[k, k + 1:n], x[k + 1:])
        x[k] = acc / M[k, k]
    return x


def residual_ratio(A, x) -> float:
    """``||Ax - b||_inf / (||A||_inf ||x||_inf + ||b||_inf)``."""
    M = as_array(A)
    n = M.shape[0]
    coeff, b = M[:, :n], M[:, n]
    r = coeff @ x - b
    denom = np.max(np.sum(np.abs(coeff), axis=1)) * np.max(np.abs(x)) + np.max(np.abs(b))
    if denom == 0.0:
        return float(np.max(np.abs(r)))
    return float(np.max(np.abs(r)) / denom)
