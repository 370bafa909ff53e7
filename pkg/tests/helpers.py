"""Independent oracles used by the test suite.

These deliberately avoid the library's own code paths: the matrix-game
solver enumerates square supports and solves the equalization systems
directly, and the stochasticity checker walks the transition table with
plain Python loops.
"""

from __future__ import annotations

import itertools

import numpy as np


def support_enum_matrix_value(M: np.ndarray, tol: float = 1e-9) -> float:
    """Matrix-game value by exhaustive support enumeration.

    For every pair of equal-size supports, solve the equalization equations
    and accept the first solution that is a valid mixed pair with no
    profitable pure deviation.
    """
    M = np.asarray(M, dtype=float)
    n, m = M.shape
    lo = M.min(axis=1).max()
    hi = M.max(axis=0).min()
    if lo == hi:
        return float(lo)
    for size in range(1, min(n, m) + 1):
        for rows in itertools.combinations(range(n), size):
            A = M[list(rows)]
            for cols in itertools.combinations(range(m), size):
                B = A[:, list(cols)]
                # x^T B = v 1,  B y = v 1,  probabilities sum to 1
                try:
                    lhs = np.zeros((size + 1, size + 1))
                    lhs[:size, :size] = B.T
                    lhs[:size, size] = -1.0
                    lhs[size, :size] = 1.0
                    rhs = np.zeros(size + 1)
                    rhs[size] = 1.0
                    solx = np.linalg.solve(lhs, rhs)
                    lhs2 = np.zeros((size + 1, size + 1))
                    lhs2[:size, :size] = B
                    lhs2[:size, size] = -1.0
                    lhs2[size, :size] = 1.0
                    soly = np.linalg.solve(lhs2, rhs)
                except np.linalg.LinAlgError:
                    continue
                x, vx = solx[:size], solx[size]
                y, vy = soly[:size], soly[size]
                if abs(vx - vy) > tol or np.any(x < -tol) or np.any(y < -tol):
                    continue
                xf = np.zeros(n)
                xf[list(rows)] = np.maximum(x, 0.0)
                yf = np.zeros(m)
                yf[list(cols)] = np.maximum(y, 0.0)
                xf /= xf.sum()
                yf /= yf.sum()
                v = float(xf @ M @ yf)
                if np.all(M @ yf <= v + tol) and np.all(xf @ M >= v - tol):
                    return v
    raise AssertionError("support enumeration found no equilibrium")


def plain_row_sums_ok(spec) -> bool:
    """Row-stochasticity check with no numpy reductions."""
    for w in range(len(spec.omega_names)):
        for i in range(len(spec.i_names)):
            for j in range(len(spec.j_names)):
                total = 0.0
                for w2 in range(len(spec.omega_names)):
                    v = float(spec.rho[w, i, j, w2])
                    if v < 0:
                        return False
                    total += v
                if abs(total - 1.0) > 1e-12:
                    return False
    return True
