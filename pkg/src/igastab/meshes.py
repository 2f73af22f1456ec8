"""Tensor-product meshes on the unit square.

Besides uniform meshes this module carries the geometrically graded knot
list used to resolve the outflow boundary layer at ``x = 1``. The list is
stored exactly as tabulated (ten significant digits), not regenerated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .splines import KnotVector, num_basis, open_knot_vector

# Breakpoints 0, 1/2, 3/4, ... halving toward 1; 26 spans.
REFINED_POINTS = (
    0.0, 0.5, 0.75, 0.875, 0.9375, 0.96875, 0.984375, 0.9921875, 0.99609375,
    0.998046875, 0.9990234375, 0.9995117188, 0.9997558594, 0.9998779297,
    0.9999389648, 0.9999694824, 0.9999847412, 0.9999923706, 0.9999961853,
    0.9999980927, 0.9999990463, 0.9999995232, 0.9999997616, 0.9999998808,
    0.9999999404, 0.9999999702, 1.0,
)  # fmt: skip


class MeshSpecError(ValueError):
    """Unparseable mesh description."""


@dataclass(frozen=True)
class Element:
    span_x: int
    span_y: int
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def hx(self) -> float:
        return self.x1 - self.x0

    @property
    def hy(self) -> float:
        return self.y1 - self.y0

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.hx, self.hy))

    @property
    def area(self) -> float:
        return self.hx * self.hy


@dataclass(frozen=True)
class TensorMesh:
    """Tensor product of two knot vectors over ``[0, 1]^2``.

    Global basis index of the product ``B_i(x) B_j(y)`` is ``j * nx + i``
    where ``nx`` is the number of x basis functions.
    """

    kv_x: KnotVector
    kv_y: KnotVector
    label: str = ""

    @property
    def degree(self) -> int:
        return max(self.kv_x.degree, self.kv_y.degree)

    @property
    def shape(self) -> tuple[int, int]:
        return num_basis(self.kv_x), num_basis(self.kv_y)

    @property
    def num_dofs(self) -> int:
        nx, ny = self.shape
        return nx * ny

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        kx, ky = self.kv_x.knots, self.kv_y.knots
        return tuple(
            Element(sx, sy, float(kx[sx]), float(kx[sx + 1]), float(ky[sy]), float(ky[sy + 1]))
            for sy in self.kv_y.spans()
            for sx in self.kv_x.spans()
        )

    @property
    def h_elem(self) -> np.ndarray:
        return np.array([e.diameter for e in self.elements])

    def dof(self, i: int, j: int) -> int:
        return j * self.shape[0] + i


def uniform_mesh(n_x: int, n_y: int | None = None, p: int = 2) -> TensorMesh:
    """Uniform ``n_x`` by ``n_y`` mesh of maximally smooth degree ``p`` splines."""
    n_y = n_x if n_y is None else n_y
    if n_x < 1 or n_y < 1:
        raise MeshSpecError("element counts must be positive")
    if p < 1:
        raise MeshSpecError("degree must be at least 1")
    kx = open_knot_vector(np.linspace(0.0, 1.0, n_x + 1), p)
    ky = open_knot_vector(np.linspace(0.0, 1.0, n_y + 1), p)
    return TensorMesh(kx, ky, label=f"uniform:{n_x}x{n_y}")


def refined_knot_vector(p: int = 2) -> KnotVector:
    return open_knot_vector(REFINED_POINTS, p)


def refined_mesh_ej() -> TensorMesh:
    """Graded in x toward the outflow, four uniform spans in y."""
    return TensorMesh(refined_knot_vector(), open_knot_vector([0, 0.25, 0.5, 0.75, 1.0], 2), "refined-ej")


def refined_mesh_p1() -> TensorMesh:
    """Graded toward ``x = 1`` and ``y = 1``."""
    kv = refined_knot_vector()
    return TensorMesh(kv, kv, "refined-p1")


def boundary_dof_mask(mesh: TensorMesh) -> np.ndarray:
    """True for every product function that does not vanish on the boundary."""
    nx, ny = mesh.shape
    mask = np.zeros((ny, nx), dtype=bool)
    mask[[0, -1], :] = True
    mask[:, [0, -1]] = True
    return mask.ravel()


_UNIFORM = re.compile(r"^uniform:(\d+)(?:x(\d+))?$")


def parse_mesh(spec: str, p: int = 2) -> TensorMesh:
    """Build a mesh from ``uniform:NX[xNY]``, ``refined-ej`` or ``refined-p1``."""
    spec = spec.strip()
    if spec == "refined-ej":
        return refined_mesh_ej()
    if spec == "refined-p1":
        return refined_mesh_p1()
    m = _UNIFORM.match(spec)
    if not m:
        raise MeshSpecError(f"unknown mesh {spec!r}; expected uniform:NX[xNY], refined-ej or refined-p1")
    nx = int(m.group(1))
    ny = int(m.group(2)) if m.group(2) else nx
    return uniform_mesh(nx, ny, p)
