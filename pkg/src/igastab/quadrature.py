"""Gauss--Legendre rules and their tensor-product use on mesh elements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .splines import eval_basis_in_span

MAX_POINTS = 8


@dataclass(frozen=True)
class QuadRule1D:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.nodes.size

    def mapped(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on ``[a, b]``."""
        half = 0.5 * (b - a)
        return a + half * (self.nodes + 1.0), half * self.weights


def _legendre(n: int, x: float) -> tuple[float, float]:
    """``P_n(x)`` and ``P_n'(x)`` by the three-term recurrence."""
    p0, p1 = 1.0, x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    if n == 0:
        return 1.0, 0.0
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> QuadRule1D:
    """``n``-point Gauss--Legendre rule on ``[-1, 1]``, ``1 <= n <= 8``.

    Roots are found by Newton iteration from the Chebyshev-like initial
    guess ``cos(pi (k - 1/4) / (n + 1/2))``.
    """
    if not 1 <= n <= MAX_POINTS:
        raise ValueError(f"number of Gauss points must be in [1, {MAX_POINTS}], got {n}")
    nodes = np.zeros(n)
    weights = np.zeros(n)
    for k in range(1, (n + 1) // 2 + 1):
        x = math.cos(math.pi * (k - 0.25) / (n + 0.5))
        for _ in range(100):
            pn, dpn = _legendre(n, x)
            dx = pn / dpn
            x -= dx
            if abs(dx) < 1e-15:
                break
        _, dpn = _legendre(n, x)
        w = 2.0 / ((1.0 - x * x) * dpn * dpn)
        nodes[k - 1], nodes[n - k] = -x, x
        weights[k - 1] = weights[n - k] = w
    if n % 2:
        nodes[n // 2] = 0.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule1D(nodes, weights)


def default_points(p: int) -> int:
    """Points per direction used for assembly."""
    return p + 2


def norm_points(p: int) -> int:
    """Points per direction used for error norms."""
    return p + 1


def element_quadrature(mesh, element, n: int) -> list[tuple[float, float, float]]:
    """Tensor ``n x n`` rule on ``element`` as ``(x, y, weight)`` triples.

    Weights carry the Jacobian ``(x1 - x0)(y1 - y0) / 4``.
    """
    rule = gauss_rule(n)
    xs, wx = rule.mapped(element.x0, element.x1)
    ys, wy = rule.mapped(element.y0, element.y1)
    return [(float(x), float(y), float(a * b)) for y, b in zip(ys, wy) for x, a in zip(xs, wx)]


@dataclass(frozen=True)
class ElementTable:
    """Tensor basis data of one element at its quadrature points.

    ``basis`` has shape ``(6, nq, nloc)`` holding value, d/dx, d/dy,
    d2/dx2, d2/dxdy and d2/dy2 of the element's ``nloc`` nonzero functions.
    ``dofs`` are their global indices.
    """

    element: object
    dofs: np.ndarray
    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    basis: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return self.basis[0]

    @property
    def grad(self) -> tuple[np.ndarray, np.ndarray]:
        return self.basis[1], self.basis[2]

    @property
    def laplacian(self) -> np.ndarray:
        return self.basis[3] + self.basis[5]


def _span_tables(kv, n: int) -> dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    rule = gauss_rule(n)
    out = {}
    for span in kv.spans():
        xs, ws = rule.mapped(float(kv.knots[span]), float(kv.knots[span + 1]))
        out[span] = (xs, ws, eval_basis_in_span(kv, span, xs))
    return out


# (derivative order in x, derivative order in y) for each row of ElementTable.basis
_DERIVS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def element_tables(mesh, n: int):
    """Yield an :class:`ElementTable` for every element, in a fixed order."""
    tx = _span_tables(mesh.kv_x, n)
    ty = _span_tables(mesh.kv_y, n)
    px, py = mesh.kv_x.degree, mesh.kv_y.degree
    nbx = mesh.shape[0]
    for el in mesh.elements:
        xs, wx, bx = tx[el.span_x]
        ys, wy, by = ty[el.span_y]
        fx, fy = el.span_x - px, el.span_y - py
        dofs = ((fy + np.arange(py + 1))[:, None] * nbx + (fx + np.arange(px + 1))[None, :]).ravel()
        basis = np.stack(
            [np.einsum("qb,ra->qrba", by[:, dy, :], bx[:, dx, :]).reshape(ys.size * xs.size, -1) for dx, dy in _DERIVS]
        )
        gx, gy = np.meshgrid(xs, ys)
        weights = np.outer(wy, wx).ravel()
        yield ElementTable(el, dofs, gx.ravel(), gy.ravel(), weights, basis)
