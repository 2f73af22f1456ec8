"""One-dimensional B-spline bases on open (clamped) knot vectors.

Values and derivatives up to second order are produced with the
Cox--de Boor recursion; the derivative recursion works on knot
differences, so a derivative of a degree ``p`` spline is expressed through
degree ``p - 1`` basis functions. Terms whose knot difference vanishes are
dropped (the usual 0/0 := 0 rule).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

MAX_DERIVATIVE = 2


class DomainError(ValueError):
    """Raised when a parameter value lies outside the knot range."""


class KnotVectorError(ValueError):
    """Raised for knot sequences that do not define an open B-spline basis."""


@dataclass(frozen=True)
class KnotVector:
    """Open knot vector of degree ``degree``.

    The knots are stored as a read-only float array. Construction checks the
    clamping and multiplicity rules so that every later evaluation can assume
    a valid basis.
    """

    knots: np.ndarray
    degree: int
    _breaks: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        knots = np.array(self.knots, dtype=float)
        p = int(self.degree)
        if knots.ndim != 1:
            raise KnotVectorError("knots must be one-dimensional")
        if p < 0:
            raise KnotVectorError("degree must be non-negative")
        if np.any(np.diff(knots) < 0):
            raise KnotVectorError("knots must be non-decreasing")
        if knots.size < 2 * (p + 1):
            raise KnotVectorError(f"need at least {2 * (p + 1)} knots for degree {p}")
        first, last = knots[0], knots[-1]
        if not last > first:
            raise KnotVectorError("knot range must have positive length")
        if np.count_nonzero(knots == first) != p + 1 or np.count_nonzero(knots == last) != p + 1:
            raise KnotVectorError("end knots must be repeated exactly degree + 1 times")
        interior = knots[p + 1 : knots.size - p - 1]
        if interior.size:
            _, counts = np.unique(interior, return_counts=True)
            if counts.max() > p:
                raise KnotVectorError("interior knot multiplicity exceeds degree")
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "degree", p)
        object.__setattr__(self, "_breaks", tuple(float(k) for k in knots))

    @property
    def start(self) -> float:
        return float(self.knots[0])

    @property
    def end(self) -> float:
        return float(self.knots[-1])

    def __len__(self) -> int:
        return self.knots.size

    def spans(self) -> list[int]:
        """Indices ``i`` of the non-empty knot spans ``[knots[i], knots[i+1])``."""
        k = self.knots
        return [i for i in range(self.degree, k.size - self.degree - 1) if k[i + 1] > k[i]]

    def breakpoints(self) -> np.ndarray:
        return np.unique(self.knots)


@dataclass(frozen=True)
class BasisEval:
    """The ``p + 1`` basis functions that do not vanish at a point.

    ``values[k]``, ``d1[k]`` and ``d2[k]`` belong to basis function
    ``first_index + k``.
    """

    first_index: int
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


def open_knot_vector(breaks, degree: int) -> KnotVector:
    """Clamp a strictly increasing breakpoint list into a ``C^{p-1}`` knot vector."""
    breaks = [float(b) for b in breaks]
    knots = [breaks[0]] * degree + breaks + [breaks[-1]] * degree
    return KnotVector(np.asarray(knots), degree)


def num_basis(kv: KnotVector) -> int:
    return len(kv) - kv.degree - 1


def find_span(kv: KnotVector, x: float) -> int:
    """Return ``i`` with ``knots[i] <= x < knots[i+1]``.

    The last non-empty span is closed on the right so that ``x == end`` is
    accepted.
    """
    x = float(x)
    if not kv.start <= x <= kv.end:
        raise DomainError(f"x={x!r} outside knot range [{kv.start}, {kv.end}]")
    n = num_basis(kv)
    if x == kv.end:
        return n - 1
    # rightmost i with knots[i] <= x, restricted to the valid span range
    i = bisect.bisect_right(kv._breaks, x) - 1
    return min(max(i, kv.degree), n - 1)


def _ders_basis(knots: np.ndarray, span: int, p: int, x: float, nd: int) -> np.ndarray:
    """Nonzero basis functions and derivatives at ``x`` in ``span``.

    Returns an array of shape ``(nd + 1, p + 1)``. Row ``k`` holds the
    ``k``-th derivatives.
    """
    ndu = np.zeros((p + 1, p + 1))
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = 0.0
        for r in range(j):
            # lower triangle stores knot differences
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r] if ndu[j, r] != 0.0 else 0.0
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((nd + 1, p + 1))
    ders[0] = ndu[:, p]
    a = np.zeros((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, nd + 1):
            d = 0.0
            rk, pk = r - k, p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk] if ndu[pk + 1, rk] != 0.0 else 0.0
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                den = ndu[pk + 1, rk + j]
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / den if den != 0.0 else 0.0
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                den = ndu[pk + 1, r]
                a[s2, k] = -a[s1, k - 1] / den if den != 0.0 else 0.0
                d += a[s2, k] * ndu[r, pk]
            ders[k, r] = d
            s1, s2 = s2, s1
    fac = p
    for k in range(1, nd + 1):
        ders[k] *= fac
        fac *= p - k
    return ders


def eval_basis(kv: KnotVector, x: float) -> BasisEval:
    """Evaluate the nonzero basis functions of ``kv`` and two derivatives at ``x``."""
    span = find_span(kv, x)
    p = kv.degree
    nd = min(MAX_DERIVATIVE, p)
    ders = _ders_basis(kv.knots, span, p, float(x), nd)
    out = np.zeros((MAX_DERIVATIVE + 1, p + 1))
    out[: nd + 1] = ders
    return BasisEval(first_index=span - p, values=out[0], d1=out[1], d2=out[2])


def eval_basis_in_span(kv: KnotVector, span: int, xs) -> np.ndarray:
    """Tabulate nonzero functions at several points of one span.

    Returns shape ``(len(xs), 3, p + 1)``: values, first and second
    derivatives. Points on the span boundary are evaluated with this span's
    polynomial pieces, which is what element quadrature needs.
    """
    p = kv.degree
    nd = min(MAX_DERIVATIVE, p)
    out = np.zeros((len(xs), MAX_DERIVATIVE + 1, p + 1))
    for q, x in enumerate(xs):
        out[q, : nd + 1] = _ders_basis(kv.knots, span, p, float(x), nd)
    return out


def collocation_matrix(kv: KnotVector, xs, derivative: int = 0) -> np.ndarray:
    """Dense matrix ``M[k, i] = B_i^{(derivative)}(xs[k])``."""
    m = np.zeros((len(xs), num_basis(kv)))
    for k, x in enumerate(xs):
        be = eval_basis(kv, x)
        row = (be.values, be.d1, be.d2)[derivative]
        m[k, be.first_index : be.first_index + kv.degree + 1] = row
    return m


def greville(kv: KnotVector) -> np.ndarray:
    """Knot averages ``(knots[i+1] + ... + knots[i+p]) / p``."""
    p = kv.degree
    n = num_basis(kv)
    if p == 0:
        return 0.5 * (kv.knots[:n] + kv.knots[1 : n + 1])
    return np.array([kv.knots[i + 1 : i + p + 1].mean() for i in range(n)])
