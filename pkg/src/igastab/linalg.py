"""Dense direct solvers and a Jacobi eigensolver.

All kernels are O(n^3) and written with numpy row/column operations. The
systems met here have at most a few hundred unknowns.
"""

from __future__ import annotations

import numpy as np

MAX_SWEEPS = 100


class SingularMatrixError(np.linalg.LinAlgError):
    """Zero pivot during LU factorisation; ``index`` is the offending column."""

    def __init__(self, index: int):
        super().__init__(f"matrix is singular: zero pivot in column {index}")
        self.index = index


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    def __init__(self, index: int, pivot: float):
        super().__init__(f"matrix is not positive definite: pivot {pivot:.3e} at index {index}")
        self.index = index
        self.pivot = pivot


class ConvergenceError(RuntimeError):
    pass


def _square(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def lu_factor(a) -> tuple[np.ndarray, np.ndarray]:
    """LU factorisation with partial pivoting.

    Returns the packed factors (unit lower triangle below the diagonal) and
    the row permutation ``perm`` such that ``A[perm] = L U``.
    """
    lu = _square(a)
    n = lu.shape[0]
    perm = np.arange(n)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(lu[k:, k])))
        if lu[piv, k] == 0.0:
            raise SingularMatrixError(k)
        if piv != k:
            lu[[k, piv]] = lu[[piv, k]]
            perm[[k, piv]] = perm[[piv, k]]
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm


def _forward(l: np.ndarray, b: np.ndarray, unit: bool) -> np.ndarray:
    x = np.array(b, dtype=float)
    for i in range(l.shape[0]):
        x[i] -= l[i, :i] @ x[:i]
        if not unit:
            x[i] /= l[i, i]
    return x


def _backward(u: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, dtype=float)
    for i in range(u.shape[0] - 1, -1, -1):
        x[i] = (x[i] - u[i, i + 1 :] @ x[i + 1 :]) / u[i, i]
    return x


def lu_solve(a, b) -> np.ndarray:
    """Solve ``A x = b`` (``b`` may hold several right-hand sides as columns)."""
    lu, perm = lu_factor(a)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != lu.shape[0]:
        raise ValueError(f"right-hand side has {b.shape[0]} rows, matrix has {lu.shape[0]}")
    y = _forward(lu, b[perm], unit=True)
    return _backward(lu, y)


def cholesky(g) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L^T = G`` for symmetric positive definite ``G``."""
    g = _square(g)
    scale = np.abs(g).max()
    if np.abs(g - g.T).max() > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix is not symmetric")
    n = g.shape[0]
    l = np.zeros_like(g)
    for j in range(n):
        d = g[j, j] - l[j, :j] @ l[j, :j]
        if not d > 0.0:
            raise NotPositiveDefiniteError(j, float(d))
        l[j, j] = np.sqrt(d)
        l[j + 1 :, j] = (g[j + 1 :, j] - l[j + 1 :, :j] @ l[j, :j]) / l[j, j]
    return l


def solve_lower(l: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``L^{-1} B`` for lower-triangular ``L``."""
    return _forward(l, b, unit=False)


def solve_upper(u: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``U^{-1} B`` for upper-triangular ``U``."""
    return _backward(u, b)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotate_rows(m: np.ndarray, p, q, c, sn) -> None:
    rp, rq = m[p], m[q]
    m[p] = c * rp - sn * rq
    m[q] = sn * rp + c * rq


def jacobi_eigh(s, tol: float = 1e-12, vectors: bool = True) -> tuple[np.ndarray, np.ndarray | None]:
    """All eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once; within a round the pairs
    are disjoint, so their rotations are applied together. Iteration stops
    once the off-diagonal Frobenius norm falls below ``tol * |S|_F``.

    Returns eigenvalues in ascending order and the matching eigenvectors as
    columns (``None`` when ``vectors`` is false).
    """
    a = _square(s)
    norm = np.linalg.norm(a)
    if np.abs(a - a.T).max() > 1e-10 * max(np.abs(a).max(), 1.0):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1 or norm == 0.0:
        return np.diag(a).copy(), (v if vectors else None)
    rounds = _round_robin(n)
    target = tol * norm
    vt = v  # eigenvectors stored as rows so every update is a row operation
    for _ in range(MAX_SWEEPS):
        if np.linalg.norm(a - np.diag(np.diag(a))) < target:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(theta == 0.0, 1.0, np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0)))
            c = (1.0 / np.sqrt(t * t + 1.0))[:, None]
            sn = t[:, None] * c
            # P^T A on rows, then symmetry turns (P^T A) P into P^T (P^T A)^T
            _rotate_rows(a, p, q, c, sn)
            a = np.ascontiguousarray(a.T)
            _rotate_rows(a, p, q, c, sn)
            a[p, q] = a[q, p] = 0.0
            if vectors:
                _rotate_rows(vt, p, q, c, sn)
    else:
        raise ConvergenceError(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    v = vt.T
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], (v[:, order] if vectors else None)


def sym_eig_extreme(s) -> tuple[float, float, np.ndarray]:
    """``(lambda_min, lambda_max, v_min)`` of a symmetric matrix."""
    w, v = jacobi_eigh(s)
    return float(w[0]), float(w[-1]), v[:, 0]


def generalized_eig_extreme(s, g, vectors: bool = True):
    """Extreme eigenpairs of ``S v = lambda G v`` with ``G`` positive definite.

    Reduced to the standard problem ``L^{-1} S L^{-T}`` with ``G = L L^T``.
    Returns ``(lambda_min, lambda_max, v_min, v_max)``; eigenvectors are in
    the original coordinates, or ``None`` when ``vectors`` is false.
    """
    s = _square(s)
    l = cholesky(g)
    c = solve_lower(l, solve_lower(l, s).T)
    w, y = jacobi_eigh(0.5 * (c + c.T), vectors=vectors)
    if not vectors:
        return float(w[0]), float(w[-1]), None, None
    vecs = solve_upper(l.T, y[:, [0, -1]])
    return float(w[0]), float(w[-1]), vecs[:, 0], vecs[:, 1]


def generalized_min_eig(s, g) -> tuple[float, np.ndarray]:
    """Smallest ``lambda`` of ``S v = lambda G v`` and its eigenvector."""
    lo, _, v, _ = generalized_eig_extreme(s, g)
    return lo, v
