import math

import numpy as np
import pytest
import scipy.linalg

from igastab.analysis import (
    coercivity_threshold,
    error_norms,
    h1_norm_choice_note,
    interior_grams,
    inverse_constant_bound,
    inverse_ratio_max,
    sample_field,
    verify_coercivity,
    verify_inverse_inequality,
    weighted_norm_gram,
)
from igastab.formulations import SolutionField, solve
from igastab.meshes import uniform_mesh
from igastab.problems import manufactured_problem, problem_ej, problem_one
from igastab.splines import greville


def poly_problem():
    def exact(x, y):
        return x * y, y + 0 * x, x + 0 * y

    def hess(x, y):
        z = 0 * x * y
        return z, z + 1.0, z

    return manufactured_problem(1.0, (1.0, 0.0), exact, hess, name="xy")


class TestBounds:
    def test_inverse_constant(self):
        assert inverse_constant_bound(2) == pytest.approx(4.898979485566356, abs=1e-12)
        assert inverse_constant_bound(3) == pytest.approx(8 * math.sqrt(6))
        assert inverse_constant_bound(2, d=3) == pytest.approx(6.0)

    def test_threshold(self):
        h = math.sqrt(0.02)
        assert coercivity_threshold(h, 2) == pytest.approx(h / 48.0)
        assert round(coercivity_threshold(h, 2), 6) == 0.002946


class TestErrorNorms:
    def test_exact_spline_has_zero_error(self):
        mesh = uniform_mesh(4, 3)
        spec = poly_problem()
        c = np.outer(greville(mesh.kv_y), greville(mesh.kv_x)).ravel()
        rep = error_norms(SolutionField(mesh, c), spec)
        assert rep.l2_rel_percent < 1e-12 and rep.h1_rel_percent < 1e-12

    def test_zero_field_is_one_hundred_percent(self):
        mesh = uniform_mesh(4, 4)
        for h1 in ("full", "seminorm"):
            rep = error_norms(SolutionField(mesh, np.zeros(mesh.num_dofs)), problem_one(0.1), h1=h1)
            assert rep.l2_rel_percent == pytest.approx(100.0)
            assert rep.h1_rel_percent == pytest.approx(100.0)
            assert rep.h1_definition == h1

    def test_scaled_field(self):
        # u_h = 0.9 u for a spline u: every relative error is 10 %
        mesh = uniform_mesh(3, 3)
        c = 0.9 * np.outer(greville(mesh.kv_y), greville(mesh.kv_x)).ravel()
        rep = error_norms(SolutionField(mesh, c), poly_problem())
        assert rep.l2_rel_percent == pytest.approx(10.0)
        assert rep.h1_rel_percent == pytest.approx(10.0)

    def test_report_fields(self):
        mesh = uniform_mesh(10, 4)
        spec = problem_ej(0.01)
        rep = error_norms(solve("gls", mesh, spec), spec)
        d = rep.to_dict()
        assert d["problem"] == "ej" and d["method"] == "gls" and d["mesh"] == "uniform:10x4"
        assert d["dofs"] == 40

    def test_unknown_h1(self):
        with pytest.raises(ValueError):
            h1_norm_choice_note("broken")


class TestInverseInequality:
    @pytest.mark.parametrize("n", [3, 5])
    def test_against_scipy(self, n):
        mesh = uniform_mesh(n, n)
        g = interior_grams(mesh)
        lam = scipy.linalg.eigh(g["lap"], g["grad"], eigvals_only=True)[-1]
        assert inverse_ratio_max(mesh) == pytest.approx(math.sqrt(lam), rel=1e-10)

    def test_constant_is_mesh_independent(self):
        values = [verify_inverse_inequality(uniform_mesh(n, n))[0] for n in (3, 4, 6)]
        np.testing.assert_allclose(values, values[0], rtol=1e-9)

    def test_explicit_h(self):
        mesh = uniform_mesh(4, 4)
        obs, bound = verify_inverse_inequality(mesh, h=0.25)
        assert obs == pytest.approx(0.25 * inverse_ratio_max(mesh))
        assert bound == pytest.approx(2 * math.sqrt(6))

    def test_degree_one_rejected(self):
        with pytest.raises(ValueError):
            verify_inverse_inequality(uniform_mesh(3, 3, p=1))


class TestCoercivity:
    def test_identical_forms_give_ratio_one(self):
        mesh = uniform_mesh(5, 5)
        spec = problem_ej(1e-3)
        gram = weighted_norm_gram(mesh, spec)
        rep = verify_coercivity(mesh, spec, form=gram, observed_constant=1.0)
        assert rep.coercivity_min_ratio == pytest.approx(1.0, abs=1e-10)

    def test_report(self):
        mesh = uniform_mesh(10, 10)
        rep = verify_coercivity(mesh, problem_ej(1e-3), observed_constant=1.0)
        assert rep.h == pytest.approx(math.sqrt(0.02))
        assert rep.condition_satisfied
        assert rep.coercivity_min_ratio >= 0.5
        assert rep.to_dict()["beta"] == [1.0, 0.0]

    def test_hypothesis_fails_for_large_eps(self):
        rep = verify_coercivity(uniform_mesh(6, 6), problem_one(0.1), observed_constant=1.0)
        assert not rep.condition_satisfied
        assert rep.coercivity_min_ratio > 0.0


class TestSample:
    def test_counts_and_order(self):
        mesh = uniform_mesh(3, 3)
        field = SolutionField(mesh, np.ones(mesh.num_dofs))
        rows = sample_field(field, 4, 3)
        assert rows.shape == (12, 3)
        np.testing.assert_allclose(rows[:4, 1], 0.0)
        np.testing.assert_allclose(rows[:4, 0], np.linspace(0, 1, 4))
        np.testing.assert_allclose(rows[:, 2], 1.0, atol=1e-14)

    def test_needs_two_points(self):
        mesh = uniform_mesh(2, 2)
        with pytest.raises(ValueError):
            sample_field(SolutionField(mesh, np.ones(mesh.num_dofs)), 1, 5)
