"""Error norms and numerical checks of the stability estimates.

The stability checks work on interior (zero-trace) spline spaces, where the
GLS form is shown to be coercive in the weighted norm

    |v|^2 = (eps / h) |grad v|^2 + |beta . grad v|^2

whenever ``eps <= h / (2 C^2)``, with ``C = 2 sqrt(3 d) (p - 1)^2`` the
constant of the inverse estimate ``|Lap v| <= C / h |grad v|``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .formulations import Method, SolutionField, assemble_full, eval_field_grid
from .meshes import TensorMesh, boundary_dof_mask
from .problems import ProblemSpec, eval_exact
from .quadrature import default_points, element_tables, norm_points

H1_DEFINITIONS = ("full", "seminorm")


def h1_norm_choice_note(definition: str = "full") -> str:
    """Label recorded in reports for the H1 quantity used."""
    if definition not in H1_DEFINITIONS:
        raise ValueError(f"h1 definition must be one of {H1_DEFINITIONS}, got {definition!r}")
    return definition


@dataclass
class ErrorReport:
    problem: str
    method: str
    mesh: str
    epsilon: float
    l2_rel_percent: float
    h1_rel_percent: float
    h1_definition: str
    dofs: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StabilityReport:
    mesh: str
    epsilon: float
    beta: tuple[float, float]
    h: float
    C_inverse_observed: float
    C_inverse_bound: float
    epsilon_threshold: float
    coercivity_min_ratio: float
    condition_satisfied: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["beta"] = list(self.beta)
        return d


def error_norms(
    field: SolutionField,
    spec: ProblemSpec,
    h1: str = "full",
    quad: int | None = None,
    method: str = "",
) -> ErrorReport:
    """Relative L2 and H1 errors of ``field`` against the exact solution, in percent."""
    h1 = h1_norm_choice_note(h1)
    mesh = field.mesh
    nq = quad or norm_points(mesh.degree)
    c = field.coefficients
    err = np.zeros(3)  # |e|^2, |grad e|^2 and the same for the exact solution
    ref = np.zeros(3)
    for tab in element_tables(mesh, nq):
        u, ux, uy = eval_exact(spec, tab.x, tab.y)
        local = c[tab.dofs]
        uh, uhx, uhy = tab.basis[0] @ local, tab.basis[1] @ local, tab.basis[2] @ local
        w = tab.weights
        err += [w @ (uh - u) ** 2, w @ (uhx - ux) ** 2, w @ (uhy - uy) ** 2]
        ref += [w @ u**2, w @ ux**2, w @ uy**2]
    l2 = 100.0 * math.sqrt(err[0] / ref[0])
    if h1 == "full":
        h1_rel = 100.0 * math.sqrt(err.sum() / ref.sum())
    else:
        h1_rel = 100.0 * math.sqrt((err[1] + err[2]) / (ref[1] + ref[2]))
    return ErrorReport(
        problem=spec.name,
        method=method or field.info.get("method", ""),
        mesh=mesh.label,
        epsilon=spec.epsilon,
        l2_rel_percent=l2,
        h1_rel_percent=h1_rel,
        h1_definition=h1,
        dofs=int(field.info.get("dofs", mesh.num_dofs)),
    )


def inverse_constant_bound(p: int, d: int = 2) -> float:
    return 2.0 * math.sqrt(3.0 * d) * (p - 1) ** 2


def coercivity_threshold(h: float, p: int, d: int = 2) -> float:
    """Largest ``eps`` covered by the coercivity estimate, ``h / (2 C^2)``."""
    return 0.5 * h / inverse_constant_bound(p, d) ** 2


def _mesh_h(mesh: TensorMesh) -> float:
    return float(mesh.h_elem.max())


def interior_grams(mesh: TensorMesh, beta=(0.0, 0.0), quad: int | None = None) -> dict[str, np.ndarray]:
    """Gram matrices over interior functions.

    Keys: ``lap`` (Lap u, Lap v), ``grad`` (grad u, grad v), ``stream``
    (beta . grad u, beta . grad v) and ``adv`` (beta . grad u, v) with rows
    indexed by ``v``.
    """
    n = mesh.num_dofs
    out = {k: np.zeros((n, n)) for k in ("lap", "grad", "stream", "adv")}
    bx, by = beta
    nq = quad or default_points(mesh.degree)
    for tab in element_tables(mesh, nq):
        w = tab.weights
        val, dx, dy = tab.basis[0], tab.basis[1], tab.basis[2]
        lap = tab.laplacian
        s = bx * dx + by * dy
        idx = np.ix_(tab.dofs, tab.dofs)
        out["lap"][idx] += np.einsum("qi,q,qj->ij", lap, w, lap)
        out["grad"][idx] += np.einsum("qi,q,qj->ij", dx, w, dx) + np.einsum("qi,q,qj->ij", dy, w, dy)
        out["stream"][idx] += np.einsum("qi,q,qj->ij", s, w, s)
        out["adv"][idx] += np.einsum("qi,q,qj->ij", val, w, s)
    interior = np.flatnonzero(~boundary_dof_mask(mesh))
    return {k: m[np.ix_(interior, interior)] for k, m in out.items()}


def inverse_ratio_max(mesh: TensorMesh, quad: int | None = None) -> float:
    """``max |Lap v| / |grad v|`` over interior splines (no ``h`` factor)."""
    g = interior_grams(mesh, quad=quad)
    _, lam_max, _, _ = linalg.generalized_eig_extreme(g["lap"], g["grad"], vectors=False)
    return math.sqrt(max(lam_max, 0.0))


def verify_inverse_inequality(mesh: TensorMesh, quad: int | None = None,
                              h: float | None = None) -> tuple[float, float]:
    """Observed ``max h |Lap v| / |grad v|`` over interior splines and the bound.

    ``h`` defaults to the largest element diameter.
    """
    p = min(mesh.kv_x.degree, mesh.kv_y.degree)
    if p < 2:
        raise ValueError("inverse estimate needs degree >= 2")
    h = _mesh_h(mesh) if h is None else h
    return h * inverse_ratio_max(mesh, quad=quad), inverse_constant_bound(p)


def gls_interior_matrix(mesh: TensorMesh, spec: ProblemSpec, quad: int | None = None) -> np.ndarray:
    """GLS matrix on interior functions, weighted by the element diameter like the norm."""
    a, _ = assemble_full(Method.GLS, mesh, spec, quad=quad, gls_h="diameter")
    interior = np.flatnonzero(~boundary_dof_mask(mesh))
    return a[np.ix_(interior, interior)]


def weighted_norm_gram(mesh: TensorMesh, spec: ProblemSpec, h: float | None = None,
                       quad: int | None = None) -> np.ndarray:
    """Gram matrix of ``(eps/h)(grad u, grad v) + (beta . grad u, beta . grad v)``."""
    h = _mesh_h(mesh) if h is None else h
    g = interior_grams(mesh, spec.beta, quad=quad)
    return spec.epsilon / h * g["grad"] + g["stream"]


def verify_coercivity(
    mesh: TensorMesh,
    spec: ProblemSpec,
    quad: int | None = None,
    observed_constant: float | None = None,
    form: np.ndarray | None = None,
) -> StabilityReport:
    """Minimum of ``b(v, v) / |v|^2`` over interior splines for the GLS form.

    ``form`` replaces the GLS matrix (used to test the eigen machinery).
    ``observed_constant`` skips recomputing the inverse-estimate constant.
    """
    p = min(mesh.kv_x.degree, mesh.kv_y.degree)
    if p < 2:
        raise ValueError("coercivity check needs degree >= 2")
    h = _mesh_h(mesh)
    gram = weighted_norm_gram(mesh, spec, h, quad=quad)
    b = gls_interior_matrix(mesh, spec, quad=quad) if form is None else np.asarray(form, dtype=float)
    sym = 0.5 * (b + b.T)
    ratio, _, _, _ = linalg.generalized_eig_extreme(sym, gram, vectors=False)
    if observed_constant is None:
        observed_constant, _ = verify_inverse_inequality(mesh, quad=quad)
    threshold = coercivity_threshold(h, p)
    return StabilityReport(
        mesh=mesh.label,
        epsilon=spec.epsilon,
        beta=spec.beta,
        h=h,
        C_inverse_observed=observed_constant,
        C_inverse_bound=inverse_constant_bound(p),
        epsilon_threshold=threshold,
        coercivity_min_ratio=ratio,
        condition_satisfied=spec.epsilon <= threshold,
    )


def sample_field(field: SolutionField, nx: int, ny: int) -> np.ndarray:
    """Rows ``(x, y, value)`` on a uniform ``nx x ny`` lattice, y-major."""
    if nx < 2 or ny < 2:
        raise ValueError("need at least two samples per direction")
    xs, ys = np.linspace(0.0, 1.0, nx), np.linspace(0.0, 1.0, ny)
    values = eval_field_grid(field, xs, ys)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel(), values.ravel()])
