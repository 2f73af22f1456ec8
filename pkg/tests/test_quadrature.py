import math

import numpy as np
import pytest

from igastab.meshes import uniform_mesh
from igastab.quadrature import (
    MAX_POINTS,
    default_points,
    element_quadrature,
    element_tables,
    gauss_rule,
    norm_points,
)


class TestGaussRule:
    def test_two_point_nodes(self):
        rule = gauss_rule(2)
        np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-16)
        assert rule.nodes[1] == pytest.approx(0.5773502691896257, abs=1e-16)
        np.testing.assert_allclose(rule.weights, [1.0, 1.0], atol=1e-15)

    def test_three_point_rule(self):
        rule = gauss_rule(3)
        np.testing.assert_allclose(rule.nodes, [-math.sqrt(0.6), 0.0, math.sqrt(0.6)], atol=1e-15)
        np.testing.assert_allclose(rule.weights, [5 / 9, 8 / 9, 5 / 9], atol=1e-15)

    @pytest.mark.parametrize("n", range(1, MAX_POINTS + 1))
    def test_matches_numpy(self, n):
        x, w = np.polynomial.legendre.leggauss(n)
        rule = gauss_rule(n)
        np.testing.assert_allclose(rule.nodes, x, atol=1e-15)
        np.testing.assert_allclose(rule.weights, w, atol=1e-14)

    @pytest.mark.parametrize("n", range(1, MAX_POINTS + 1))
    def test_exact_for_degree_2n_minus_1(self, n):
        rule = gauss_rule(n)
        for k in range(2 * n):
            exact = 0.0 if k % 2 else 2.0 / (k + 1)
            assert rule.weights @ rule.nodes**k == pytest.approx(exact, abs=1e-14)

    @pytest.mark.parametrize("n", [0, MAX_POINTS + 1])
    def test_out_of_range(self, n):
        with pytest.raises(ValueError):
            gauss_rule(n)

    def test_mapped(self):
        xs, ws = gauss_rule(3).mapped(2.0, 5.0)
        assert ws.sum() == pytest.approx(3.0)
        assert xs @ ws / 3.0 == pytest.approx(3.5)


def test_point_counts():
    assert default_points(2) == 4
    assert norm_points(2) == 3


class TestElementQuadrature:
    def test_triples_integrate_monomials(self):
        mesh = uniform_mesh(4, 2)
        total = 0.0
        for el in mesh.elements:
            total += sum(w * x * x * y for x, y, w in element_quadrature(mesh, el, 3))
        assert total == pytest.approx(1 / 6, abs=1e-15)

    def test_tables_partition_of_unity_and_area(self):
        mesh = uniform_mesh(3, 5)
        area = 0.0
        for tab in element_tables(mesh, 4):
            assert tab.basis.shape == (6, 16, 9)
            np.testing.assert_allclose(tab.value.sum(axis=1), 1.0, atol=1e-14)
            for k in range(1, 6):
                np.testing.assert_allclose(tab.basis[k].sum(axis=1), 0.0, atol=1e-10)
            area += tab.weights.sum()
        assert area == pytest.approx(1.0, abs=1e-14)

    def test_table_reproduces_bilinear_function(self):
        # coefficients from Greville points reproduce u = x * y exactly
        from igastab.splines import greville

        mesh = uniform_mesh(3, 2)
        c = np.outer(greville(mesh.kv_y), greville(mesh.kv_x)).ravel()
        for tab in element_tables(mesh, 3):
            local = c[tab.dofs]
            np.testing.assert_allclose(tab.value @ local, tab.x * tab.y, atol=1e-14)
            np.testing.assert_allclose(tab.basis[1] @ local, tab.y, atol=1e-13)
            np.testing.assert_allclose(tab.basis[4] @ local, 1.0, atol=1e-11)
            np.testing.assert_allclose(tab.laplacian @ local, 0.0, atol=1e-10)
