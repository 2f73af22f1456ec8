import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igastab.splines import (
    DomainError,
    KnotVector,
    KnotVectorError,
    collocation_matrix,
    eval_basis,
    eval_basis_in_span,
    find_span,
    greville,
    num_basis,
    open_knot_vector,
)

BERNSTEIN_KV = KnotVector([0, 0, 0, 1, 1, 1], 2)


def bernstein2(x):
    return np.array([(1 - x) ** 2, 2 * x * (1 - x), x**2])


class TestKnotVector:
    def test_open_knot_vector_clamps_ends(self):
        kv = open_knot_vector([0.0, 0.5, 1.0], 2)
        np.testing.assert_array_equal(kv.knots, [0, 0, 0, 0.5, 1, 1, 1])
        assert num_basis(kv) == 4
        np.testing.assert_array_equal(kv.breakpoints(), [0.0, 0.5, 1.0])

    @pytest.mark.parametrize(
        "knots",
        [
            [0, 0, 1, 1, 1],  # left end repeated only twice
            [0, 0, 0, 0.5, 0.4, 1, 1, 1],  # decreasing
            [0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1],  # interior multiplicity > p
            [1, 1, 1, 1, 1, 1],  # zero length
        ],
    )
    def test_rejects_invalid(self, knots):
        with pytest.raises(KnotVectorError):
            KnotVector(knots, 2)

    def test_knots_are_read_only(self):
        with pytest.raises(ValueError):
            BERNSTEIN_KV.knots[0] = 0.3


class TestFindSpan:
    def test_right_endpoint_belongs_to_last_span(self):
        kv = open_knot_vector([0, 0.5, 1], 2)
        assert find_span(kv, 1.0) == num_basis(kv) - 1
        assert find_span(kv, 0.0) == 2
        assert find_span(kv, 0.5) == 3

    @pytest.mark.parametrize("x", [-1e-9, 1.0 + 1e-9, np.nan])
    def test_outside_raises(self, x):
        with pytest.raises(DomainError):
            find_span(BERNSTEIN_KV, x)


class TestBasisValues:
    def test_single_span_is_bernstein(self):
        b = eval_basis(BERNSTEIN_KV, 0.5)
        np.testing.assert_allclose(b.values, [0.25, 0.5, 0.25], atol=1e-15)
        np.testing.assert_allclose(b.d1, [-1, 0, 1], atol=1e-15)
        np.testing.assert_allclose(b.d2, [2, -4, 2], atol=1e-15)

    @pytest.mark.parametrize("x", [0.0, 0.1, 0.37, 0.9, 1.0])
    def test_bernstein_closed_form(self, x):
        b = eval_basis(BERNSTEIN_KV, x)
        np.testing.assert_allclose(b.values, bernstein2(x), atol=1e-15)
        np.testing.assert_allclose(b.d1, [-2 * (1 - x), 2 - 4 * x, 2 * x], atol=1e-14)

    def test_two_spans_at_interior_knot(self):
        # Hand expansion on [0,0,0,1,2,2,2]: at x = 1 the functions B_1, B_2 equal 1/2
        kv = KnotVector([0, 0, 0, 1, 2, 2, 2], 2)
        b = eval_basis(kv, 1.0)
        assert b.first_index == 1
        np.testing.assert_allclose(b.values, [0.5, 0.5, 0.0], atol=1e-15)

    def test_two_spans_hand_expanded(self):
        # B_1 on [0,1] is x(4 - 3x)/2 for knots [0,0,0,1,2,2,2]
        kv = KnotVector([0, 0, 0, 1, 2, 2, 2], 2)
        x = 0.4
        b = eval_basis(kv, x)
        assert b.first_index == 0
        np.testing.assert_allclose(b.values, [(1 - x) ** 2, x * (4 - 3 * x) / 2, x * x / 2], atol=1e-15)
        np.testing.assert_allclose(b.d2, [2, -3, 1], atol=1e-14)

    def test_linear_hats(self):
        kv = open_knot_vector([0, 0.25, 1], 1)
        b = eval_basis(kv, 0.5)
        np.testing.assert_allclose(b.values, [2 / 3, 1 / 3], atol=1e-15)
        np.testing.assert_allclose(b.d2, [0, 0], atol=1e-15)


BREAKS = st.lists(st.floats(0.02, 0.98), min_size=0, max_size=6).map(lambda v: [0.0] + sorted(set(v)) + [1.0])


class TestBasisProperties:
    @settings(max_examples=60, deadline=None)
    @given(BREAKS, st.integers(1, 4), st.floats(0.0, 1.0))
    def test_partition_of_unity(self, breaks, p, x):
        kv = open_knot_vector(breaks, p)
        b = eval_basis(kv, x)
        assert abs(b.values.sum() - 1.0) < 1e-12
        assert abs(b.d1.sum()) < 1e-8 * max(1.0, np.abs(b.d1).max())
        assert np.all(b.values >= -1e-15)

    @settings(max_examples=40, deadline=None)
    @given(BREAKS, st.integers(2, 4), st.floats(0.05, 0.95))
    def test_derivatives_match_finite_differences(self, breaks, p, x):
        kv = open_knot_vector(breaks, p)
        # keep the stencil inside one span so the pieces are polynomials
        lo, hi = kv.knots[find_span(kv, x)], kv.knots[find_span(kv, x) + 1]
        h = 1e-5 * (hi - lo)
        if not (lo + 2 * h < x < hi - 2 * h):
            return
        full = collocation_matrix(kv, [x - h, x, x + h])
        d1 = collocation_matrix(kv, [x], derivative=1)[0]
        d2 = collocation_matrix(kv, [x], derivative=2)[0]
        fd1 = (full[2] - full[0]) / (2 * h)
        fd2 = (full[2] - 2 * full[1] + full[0]) / (h * h)
        scale1 = max(1.0, np.abs(d1).max())
        np.testing.assert_allclose(fd1, d1, atol=1e-5 * scale1)
        # second differences lose about half the digits
        np.testing.assert_allclose(fd2, d2, atol=1e-3 * max(1.0, np.abs(d2).max()))

    def test_local_support(self):
        kv = open_knot_vector(np.linspace(0, 1, 6), 2)
        xs = np.linspace(0, 1, 101)
        m = collocation_matrix(kv, xs)
        t = kv.knots
        for i in range(num_basis(kv)):
            outside = (xs < t[i]) | (xs > t[i + 3])
            assert np.all(m[outside, i] == 0.0)

    def test_span_tables_match_pointwise(self):
        kv = open_knot_vector([0, 0.3, 0.6, 1.0], 2)
        xs = np.array([0.31, 0.45, 0.59])
        tab = eval_basis_in_span(kv, 3, xs)
        assert tab.shape == (3, 3, 3)
        for q, x in enumerate(xs):
            b = eval_basis(kv, x)
            assert b.first_index == 1
            np.testing.assert_allclose(tab[q, 0], b.values, atol=1e-15)
            np.testing.assert_allclose(tab[q, 2], b.d2, atol=1e-12)


class TestGreville:
    def test_values(self):
        kv = open_knot_vector([0, 0.5, 1], 2)
        np.testing.assert_allclose(greville(kv), [0, 0.25, 0.75, 1.0])

    def test_interpolation_reproduces_linears(self):
        # quadratic splines reproduce linear functions with Greville coefficients
        kv = open_knot_vector(np.linspace(0, 1, 5), 2)
        g = greville(kv)
        xs = np.linspace(0, 1, 17)
        np.testing.assert_allclose(collocation_matrix(kv, xs) @ (3 * g - 1), 3 * xs - 1, atol=1e-14)
