"""Model advection-diffusion problems ``beta . grad u - eps Lap u = f`` on the unit square.

Exact solutions are written so that every exponential has a non-positive
argument (or a bounded one), which keeps them finite for arbitrarily small
diffusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

ExactFn = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]
HessFn = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]
ScalarFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class MissingExactSolution(RuntimeError):
    """Raised when a quantity needs an exact solution the problem lacks."""


@dataclass(frozen=True)
class ProblemSpec:
    """Coefficients and data of one advection-diffusion problem.

    ``f`` and ``g`` take coordinate arrays. ``exact`` returns
    ``(u, u_x, u_y)`` and ``hessian`` returns ``(u_xx, u_xy, u_yy)``.
    """

    name: str
    epsilon: float
    beta: tuple[float, float]
    f: ScalarFn
    g: ScalarFn
    exact: ExactFn | None = None
    hessian: HessFn | None = None

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        object.__setattr__(self, "beta", (float(self.beta[0]), float(self.beta[1])))


def _zero(x, y):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


# -- first model problem: beta = (1, 1), homogeneous boundary data -----------


def _profile_one(t, eps):
    """``F(t) = t + (exp(t/eps) - 1) / (1 - exp(1/eps))`` and two derivatives.

    Numerator and denominator are both scaled by ``exp(-1/eps)``.
    """
    t = np.asarray(t, dtype=float)
    den = math.expm1(-1.0 / eps)
    a = np.exp((t - 1.0) / eps)
    value = t + (a - math.exp(-1.0 / eps)) / den
    d1 = 1.0 + a / (eps * den)
    d2 = a / (eps * eps * den)
    return value, d1, d2


def problem_one(epsilon: float) -> ProblemSpec:
    """``u = F(x) F(y)`` with ``beta = (1, 1)`` and ``g = 0``.

    ``F' - eps F'' = 1``, so the source that makes ``u`` exact is
    ``f = F(x) + F(y)``.
    """
    eps = float(epsilon)

    def exact(x, y):
        fx, dx, _ = _profile_one(x, eps)
        fy, dy, _ = _profile_one(y, eps)
        return fx * fy, dx * fy, fx * dy

    def hessian(x, y):
        fx, dx, ddx = _profile_one(x, eps)
        fy, dy, ddy = _profile_one(y, eps)
        return ddx * fy, dx * dy, fx * ddy

    def source(x, y):
        return _profile_one(x, eps)[0] + _profile_one(y, eps)[0]

    return ProblemSpec("p1", eps, (1.0, 1.0), source, _zero, exact, hessian)


# -- Eriksson--Johnson problem: beta = (1, 0), inflow data sin(pi y) ---------


def ej_rates(epsilon: float) -> tuple[float, float]:
    """Characteristic exponents ``r1 > 0 > r2``; ``r2`` without cancellation."""
    eps = float(epsilon)
    root = math.sqrt(1.0 + 4.0 * eps * eps * math.pi * math.pi)
    r1 = (1.0 + root) / (2.0 * eps)
    r2 = -2.0 * math.pi * math.pi * eps / (1.0 + root)
    return r1, r2


def _profile_ej(x, r1, r2):
    x = np.asarray(x, dtype=float)
    e1 = np.exp(r1 * (x - 1.0))
    e2 = np.exp(r2 * (x - 1.0))
    den = math.exp(-r1) - math.exp(-r2)
    return (e1 - e2) / den, (r1 * e1 - r2 * e2) / den, (r1 * r1 * e1 - r2 * r2 * e2) / den


def problem_ej(epsilon: float) -> ProblemSpec:
    """Eriksson--Johnson benchmark with an outflow layer at ``x = 1``."""
    eps = float(epsilon)
    r1, r2 = ej_rates(eps)

    def exact(x, y):
        px, dpx, _ = _profile_ej(x, r1, r2)
        s, c = np.sin(np.pi * np.asarray(y)), np.cos(np.pi * np.asarray(y))
        return px * s, dpx * s, px * np.pi * c

    def hessian(x, y):
        px, dpx, ddpx = _profile_ej(x, r1, r2)
        s, c = np.sin(np.pi * np.asarray(y)), np.cos(np.pi * np.asarray(y))
        return ddpx * s, dpx * np.pi * c, -np.pi * np.pi * px * s

    def inflow(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.where(x == 0.0, np.sin(np.pi * y), 0.0)

    return ProblemSpec("ej", eps, (1.0, 0.0), _zero, inflow, exact, hessian)


def manufactured_problem(
    epsilon: float,
    beta: tuple[float, float],
    exact: ExactFn,
    hessian: HessFn,
    name: str = "manufactured",
) -> ProblemSpec:
    """Problem whose source and boundary data are generated from ``exact``."""
    bx, by = float(beta[0]), float(beta[1])
    eps = float(epsilon)

    def source(x, y):
        _, ux, uy = exact(x, y)
        uxx, _, uyy = hessian(x, y)
        return bx * ux + by * uy - eps * (uxx + uyy)

    def boundary(x, y):
        return exact(x, y)[0]

    return ProblemSpec(name, eps, (bx, by), source, boundary, exact, hessian)


def get_problem(name: str, epsilon: float) -> ProblemSpec:
    try:
        factory = {"p1": problem_one, "ej": problem_ej}[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; expected 'p1' or 'ej'") from None
    return factory(epsilon)


def eval_exact(spec: ProblemSpec, x, y):
    """``(u, u_x, u_y)`` of the exact solution at ``(x, y)``."""
    if spec.exact is None:
        raise MissingExactSolution(f"problem {spec.name!r} has no exact solution")
    return spec.exact(x, y)
