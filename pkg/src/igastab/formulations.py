"""Discrete systems for the four formulations and their solution.

Notation: ``L u = beta . grad u - eps Lap u`` is the strong operator. With
trial functions ``u`` and interior (zero-trace) test functions ``v``:

* ``galerkin``: ``eps (grad u, grad v) + (beta . grad u, v) = (f, v)``
* ``ls``: ``(L u, L v) = (f, L v)``; the test function ``L v`` is the
  L2-optimal one, so no auxiliary problem is ever solved.
* ``gls``: ``(1/h) [eps (grad u, grad v) + (beta . grad u, v)] + (L u, L v)``
  with ``h`` the element size (shortest edge by default, or the diameter).
* ``supg``: Galerkin plus ``(R u, tau beta . grad v)`` element by element.

Dirichlet data enter through a lift: boundary coefficients interpolate ``g``
along each edge, interior coefficients are unknown.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .meshes import TensorMesh, boundary_dof_mask
from .problems import ProblemSpec
from .quadrature import default_points, element_tables
from .splines import DomainError, collocation_matrix, eval_basis, greville


class ConfigurationError(ValueError):
    """Method, mesh and problem do not fit together."""


class SolverError(RuntimeError):
    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


class Method(str, enum.Enum):
    GALERKIN = "galerkin"
    LEAST_SQUARES = "ls"
    GLS = "gls"
    SUPG = "supg"

    @classmethod
    def parse(cls, name: str | Method) -> Method:
        if isinstance(name, cls):
            return name
        aliases = {"least_squares": "ls", "least-squares": "ls"}
        try:
            return cls(aliases.get(name, name))
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ConfigurationError(f"unknown method {name!r}; expected one of {choices}") from None

    @property
    def needs_hessian(self) -> bool:
        return self in (Method.LEAST_SQUARES, Method.GLS)


SUPG_RESIDUALS = ("paper", "consistent")
GLS_H_CHOICES = ("edge", "diameter")


def gls_element_size(element, gls_h: str = "edge") -> float:
    """Element size ``h`` in the GLS weight ``1/h``.

    ``edge`` is the shortest side ``min(h_x, h_y)``, ``diameter`` the
    element diagonal.
    """
    if gls_h == "edge":
        return min(element.hx, element.hy)
    if gls_h == "diameter":
        return element.diameter
    raise ConfigurationError(f"gls h must be one of {GLS_H_CHOICES}, got {gls_h!r}")


@dataclass
class AssembledSystem:
    """Interior system ``matrix @ x = rhs``.

    ``interior`` maps interior unknowns to global basis indices; ``lift``
    holds the global coefficients of the Dirichlet lift.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    interior: np.ndarray
    lift: np.ndarray
    method: Method

    @property
    def size(self) -> int:
        return self.rhs.size


@dataclass
class SolutionField:
    mesh: TensorMesh
    coefficients: np.ndarray
    residual: float = 0.0
    info: dict = field(default_factory=dict)


def strong_operator(spec: ProblemSpec, value, grad, hess):
    """``beta . grad e - eps (e_xx + e_yy)``.

    ``hess`` is ``(e_xx, e_xy, e_yy)``; ``value`` is accepted for symmetry
    with the other point functionals and does not enter.
    """
    bx, by = spec.beta
    return bx * grad[0] + by * grad[1] - spec.epsilon * (hess[0] + hess[2])


def supg_tau(spec: ProblemSpec, hx: float, hy: float) -> float:
    """``1 / (beta_x/h_x + beta_y/h_y + 3 eps / (h_x^2 + h_y^2))``."""
    if not (hx > 0 and hy > 0):
        raise ConfigurationError("element sizes must be positive")
    bx, by = spec.beta
    inv = bx / hx + by / hy + 3.0 * spec.epsilon / (hx * hx + hy * hy)
    if not inv > 0:
        raise ConfigurationError(f"SUPG tau^-1 = {inv} is not positive for beta={spec.beta}")
    return 1.0 / inv


def _supg_sign(residual: str) -> float:
    if residual not in SUPG_RESIDUALS:
        raise ConfigurationError(f"supg residual must be one of {SUPG_RESIDUALS}, got {residual!r}")
    # "paper": R(u) = beta . grad u + eps Lap u; "consistent": the PDE residual
    return 1.0 if residual == "paper" else -1.0


def supg_residual_term(spec: ProblemSpec, u_grad, u_hess, v_grad, tau: float, residual: str = "paper"):
    """Pointwise ``tau R(u) (beta . grad v)``."""
    bx, by = spec.beta
    lap = u_hess[0] + u_hess[2]
    r = bx * u_grad[0] + by * u_grad[1] + _supg_sign(residual) * spec.epsilon * lap
    return tau * r * (bx * v_grad[0] + by * v_grad[1])


def apply_dirichlet_lift(mesh: TensorMesh, spec: ProblemSpec) -> np.ndarray:
    """Global coefficients of a spline matching ``g`` on the boundary.

    Along each edge the trace is a 1D spline; its coefficients interpolate
    ``g`` at the Greville abscissae of that direction. Interior coefficients
    are zero.
    """
    nx, ny = mesh.shape
    coeffs = np.zeros((ny, nx))
    gx, gy = greville(mesh.kv_x), greville(mesh.kv_y)
    cx, cy = collocation_matrix(mesh.kv_x, gx), collocation_matrix(mesh.kv_y, gy)
    for row, y0 in ((0, 0.0), (ny - 1, 1.0)):
        coeffs[row, :] = linalg.lu_solve(cx, spec.g(gx, np.full_like(gx, y0)))
    for col, x0 in ((0, 0.0), (nx - 1, 1.0)):
        coeffs[:, col] = linalg.lu_solve(cy, spec.g(np.full_like(gy, x0), gy))
    return coeffs.ravel()


def _local_forms(method, spec, tab, tau, sign, gls_h="edge"):
    """Element matrix (rows: test, columns: trial) and load vector."""
    bx, by = spec.beta
    eps = spec.epsilon
    w = tab.weights
    val, dx, dy, dxx, _, dyy = tab.basis
    f = spec.f(tab.x, tab.y)
    adv = bx * dx + by * dy

    def gram(a, b):
        return np.einsum("qi,q,qj->ij", a, w, b)

    def load(a):
        return a.T @ (w * f)

    if method in (Method.GALERKIN, Method.GLS, Method.SUPG):
        gal = eps * (gram(dx, dx) + gram(dy, dy)) + gram(val, adv)
        gal_f = load(val)
    if method in (Method.LEAST_SQUARES, Method.GLS):
        strong = adv - eps * (dxx + dyy)
        ls, ls_f = gram(strong, strong), load(strong)

    if method is Method.GALERKIN:
        return gal, gal_f
    if method is Method.LEAST_SQUARES:
        return ls, ls_f
    if method is Method.GLS:
        inv_h = 1.0 / gls_element_size(tab.element, gls_h)
        return inv_h * gal + ls, inv_h * gal_f + ls_f
    residual = adv + sign * eps * (dxx + dyy)
    return gal + tau * gram(adv, residual), gal_f + tau * load(adv)


def assemble_full(method, mesh: TensorMesh, spec: ProblemSpec, quad: int | None = None,
                  supg_residual: str = "paper", tau: float | None = None, gls_h: str = "edge"):
    """Global matrix and load vector over all basis functions.

    Rows are indexed by test functions. ``tau`` overrides the SUPG parameter
    on every element; ``gls_h`` selects the element size in the GLS weight.
    """
    method = Method.parse(method)
    if method.needs_hessian and min(mesh.kv_x.degree, mesh.kv_y.degree) < 2:
        raise ConfigurationError(f"method {method.value!r} needs second derivatives (degree >= 2)")
    sign = _supg_sign(supg_residual)
    if gls_h not in GLS_H_CHOICES:
        raise ConfigurationError(f"gls h must be one of {GLS_H_CHOICES}, got {gls_h!r}")
    n = mesh.num_dofs
    a = np.zeros((n, n))
    b = np.zeros(n)
    nq = quad or default_points(mesh.degree)
    for tab in element_tables(mesh, nq):
        el_tau = 0.0
        if method is Method.SUPG:
            el_tau = supg_tau(spec, tab.element.hx, tab.element.hy) if tau is None else tau
        ke, fe = _local_forms(method, spec, tab, el_tau, sign, gls_h)
        a[np.ix_(tab.dofs, tab.dofs)] += ke
        b[tab.dofs] += fe
    return a, b


def assemble(method, mesh: TensorMesh, spec: ProblemSpec, quad: int | None = None,
             supg_residual: str = "paper", tau: float | None = None, gls_h: str = "edge") -> AssembledSystem:
    """Interior system with the lift's contribution moved to the right-hand side."""
    method = Method.parse(method)
    a, b = assemble_full(method, mesh, spec, quad=quad, supg_residual=supg_residual, tau=tau, gls_h=gls_h)
    lift = apply_dirichlet_lift(mesh, spec)
    interior = np.flatnonzero(~boundary_dof_mask(mesh))
    if interior.size == 0:
        raise ConfigurationError("mesh has no interior degrees of freedom")
    rows = a[interior]
    return AssembledSystem(rows[:, interior], b[interior] - rows @ lift, interior, lift, method)


def solve_system(system: AssembledSystem, mesh: TensorMesh) -> SolutionField:
    try:
        x = linalg.lu_solve(system.matrix, system.rhs)
    except linalg.SingularMatrixError as exc:
        raise SolverError(f"{system.method.value}: {exc}", pivot=exc.index) from exc
    r = system.matrix @ x - system.rhs
    bnorm = np.linalg.norm(system.rhs)
    residual = float(np.linalg.norm(r) / bnorm) if bnorm > 0 else float(np.linalg.norm(r))
    coeffs = system.lift.copy()
    coeffs[system.interior] = x
    return SolutionField(mesh, coeffs, residual, {"method": system.method.value, "dofs": system.size})


def solve(method, mesh: TensorMesh, spec: ProblemSpec, quad: int | None = None,
          supg_residual: str = "paper", tau: float | None = None, gls_h: str = "edge") -> SolutionField:
    system = assemble(method, mesh, spec, quad=quad, supg_residual=supg_residual, tau=tau, gls_h=gls_h)
    return solve_system(system, mesh)


def _check_domain(x: float, y: float) -> None:
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise DomainError(f"point ({x}, {y}) outside the unit square")


def eval_field(field: SolutionField, x: float, y: float) -> tuple[float, float, float]:
    """Value and gradient of the spline field at one point."""
    _check_domain(x, y)
    mesh = field.mesh
    bx, by = eval_basis(mesh.kv_x, x), eval_basis(mesh.kv_y, y)
    px, py = mesh.kv_x.degree, mesh.kv_y.degree
    c = field.coefficients.reshape(mesh.shape[1], mesh.shape[0])
    local = c[by.first_index : by.first_index + py + 1, bx.first_index : bx.first_index + px + 1]
    value = by.values @ local @ bx.values
    gx = by.values @ local @ bx.d1
    gy = by.d1 @ local @ bx.values
    return float(value), float(gx), float(gy)


def eval_field_grid(field: SolutionField, xs, ys) -> np.ndarray:
    """Field values on the lattice ``xs x ys``; result indexed ``[iy, ix]``."""
    mesh = field.mesh
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    for v in (xs, ys):
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise DomainError("sample points outside the unit square")
    c = field.coefficients.reshape(mesh.shape[1], mesh.shape[0])
    return collocation_matrix(mesh.kv_y, ys) @ c @ collocation_matrix(mesh.kv_x, xs).T
