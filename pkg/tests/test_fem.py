"""
유한요소 모듈 단위 테스트
- 균일 세분, P1 디리클레 풀이의 선형 정확성, 노름과 적분 규칙, 점 위치 찾기를 확인합니다.
"""

import math

import numpy as np
import pytest

from cdt.delaunay import constrained_delaunay
from cdt.mesh import MeshError, TriMesh
from experiments.random_domains import regular_octahedron, unit_square
from fem.field import ScalarField, energy_inner, prolongate
from fem.functions import TestFunction
from fem.mesh import TetMesh
from fem.norms import (
    directional_energy, h1_error_seminorm, h1_seminorm, h1_seminorm_analytic, h2_seminorm_analytic, integrate,
    quadrature_rule, segment_energy,
)
from fem.refine import refine_uniform, refine_with_values
from fem.solver import (
    BoundaryData, DirichletSolver, SolverError, SolverSettings, galerkin_residual, solve_dirichlet,
)


@pytest.fixture
def square_mesh():
    """단위 정사각형 CDT 를 3단계 세분한 메쉬 (꼭짓점 81개)."""
    return refine_uniform(constrained_delaunay(unit_square()), 3)


@pytest.fixture
def unit_tet():
    return TetMesh(vertices=np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], dtype=float),
                   tetrahedra=np.array([(0, 1, 2, 3)]))


def nodal(mesh, u: TestFunction) -> ScalarField:
    return ScalarField(mesh=mesh, coefficients=u(mesh.vertices))


def dirichlet_data(mesh, u: TestFunction) -> BoundaryData:
    boundary = mesh.boundary_vertices()
    return BoundaryData(indices=boundary, values=u(mesh.vertices[boundary]))


class TestRefine:
    """균일 세분: 셀 수, 측도 보존, 방향."""

    def test_triangle_counts(self):
        base = constrained_delaunay(unit_square())
        once = refine_uniform(base, 1)
        assert once.n_triangles == 8
        assert once.n_vertices == 9
        assert refine_uniform(base, 3).n_vertices == 81
        assert float(np.sum(once.signed_areas)) == pytest.approx(1.0)
        assert refine_uniform(base, 0) is base

    def test_tetrahedron_counts(self, unit_tet):
        # When: 2단계 세분
        mesh = refine_uniform(unit_tet, 2)
        # Then: 사면체 64개, 격자점 35개 (내부 점 1개), 부피 보존
        assert mesh.n_tetrahedra == 64
        assert mesh.n_vertices == 35
        assert len(mesh.boundary_vertices()) == 34
        assert mesh.volume == pytest.approx(1.0 / 6.0)
        assert np.all(mesh.signed_volumes > 0)
        mesh.validate()

    def test_boundary_faces_after_refinement(self, unit_tet):
        assert len(refine_uniform(unit_tet, 1).boundary_faces) == 16

    def test_negative_levels(self, unit_tet):
        with pytest.raises(ValueError):
            refine_uniform(unit_tet, -1)
        with pytest.raises(ValueError):
            refine_with_values(unit_tet, np.zeros(4), -1)

    def test_values_follow_refinement(self):
        base = constrained_delaunay(unit_square())
        u = TestFunction.affine([2.0, -1.0], 0.5)
        mesh, values = refine_with_values(base, u(base.vertices), 2)
        assert values == pytest.approx(u(mesh.vertices))


class TestFunctions:
    """이차 시험 함수의 값, 기울기, 헤시안."""

    def test_x_squared(self):
        u = TestFunction.x_squared()
        assert u(np.array([(3.0, 4.0)])) == pytest.approx([9.0])
        assert u.gradient(np.array([(3.0, 4.0)])) == pytest.approx([[6.0, 0.0]])
        assert u.hessian_square_sum == pytest.approx(4.0)
        assert not u.is_linear

    def test_radial_squared(self):
        u = TestFunction.radial_squared()
        assert u.dim == 3
        assert u.hessian_square_sum == pytest.approx(8.0)

    def test_affine(self):
        u = TestFunction.affine([1.0, 2.0, 3.0], constant=-1.0)
        assert u.is_linear
        assert u(np.array([(1.0, 1.0, 1.0)])) == pytest.approx([5.0])

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            TestFunction(quadratic=np.zeros((4, 4)))


class TestDirichletSolver:
    """이산 조화 확장: 일차 함수 재현, 솔버 방식 일치, 오류 경로."""

    @pytest.mark.parametrize("method", ["direct", "cg"])
    def test_affine_reproduced_exactly_2d(self, square_mesh, method):
        # Given: 경계 위 일차 함수 값
        u = TestFunction.affine([1.0, -2.0], 0.5)
        # When
        field = solve_dirichlet(square_mesh, dirichlet_data(square_mesh, u),
                                settings=SolverSettings(tol=1e-12, method=method))
        # Then: 내부 값도 일차 함수와 일치해야 합니다
        assert field.coefficients == pytest.approx(u(square_mesh.vertices), abs=1e-9)
        assert galerkin_residual(field) < 1e-9

    def test_affine_reproduced_exactly_3d(self, unit_tet):
        mesh = refine_uniform(unit_tet, 2)
        u = TestFunction.affine([1.0, 2.0, -3.0])
        field = solve_dirichlet(mesh, dirichlet_data(mesh, u))
        assert field.coefficients == pytest.approx(u(mesh.vertices), abs=1e-10)

    def test_direct_and_cg_agree(self, square_mesh):
        data = dirichlet_data(square_mesh, TestFunction.x_squared())
        direct = solve_dirichlet(square_mesh, data, settings=SolverSettings(tol=1e-12))
        iterative = solve_dirichlet(square_mesh, data, settings=SolverSettings(tol=1e-12, method="cg"))
        assert iterative.coefficients == pytest.approx(direct.coefficients, abs=1e-8)

    def test_solution_minimizes_energy(self, square_mesh):
        """해는 같은 경계 값을 갖는 모든 P1 함수 중 에너지 최소입니다."""
        u = TestFunction.x_squared()
        harmonic = solve_dirichlet(square_mesh, dirichlet_data(square_mesh, u))
        interpolant = nodal(square_mesh, u)
        assert energy_inner(harmonic, harmonic) <= energy_inner(interpolant, interpolant) + 1e-12

    def test_natural_boundary(self, square_mesh):
        # Given: x = 0, x = 1 변에만 디리클레 값, 나머지는 자연 경계
        boundary = square_mesh.boundary_vertices()
        x = square_mesh.vertices[boundary, 0]
        sides = boundary[(x == 0.0) | (x == 1.0)]
        solver = DirichletSolver(square_mesh, sides, natural_boundary=True)
        # When
        field = solver.solve(BoundaryData(indices=sides, values=square_mesh.vertices[sides, 0]))
        # Then: 해는 f = x
        assert field.coefficients == pytest.approx(square_mesh.vertices[:, 0], abs=1e-10)

    def test_missing_boundary_values(self, square_mesh):
        boundary = square_mesh.boundary_vertices()
        with pytest.raises(SolverError):
            DirichletSolver(square_mesh, boundary[:-1])

    def test_data_must_cover_boundary(self, square_mesh):
        solver = DirichletSolver(square_mesh)
        boundary = square_mesh.boundary_vertices()
        with pytest.raises(SolverError):
            solver.solve(BoundaryData(indices=boundary[:-1], values=np.zeros(len(boundary) - 1)))

    def test_boundary_data_validation(self):
        with pytest.raises(ValueError):
            BoundaryData(indices=[0, 1, 2], values=[0.0, 1.0])
        with pytest.raises(ValueError):
            BoundaryData(indices=[0, 1, 1], values=[0.0, 1.0, 2.0])
        data = BoundaryData(indices=[3, 1, 2], values=[30.0, 10.0, 20.0])
        assert list(data.indices) == [1, 2, 3]
        assert list(data.values) == [10.0, 20.0, 30.0]

    @pytest.mark.parametrize("kwargs", [{"tol": 0.0}, {"method": "gmres"}])
    def test_settings_validation(self, kwargs):
        with pytest.raises(ValueError):
            SolverSettings(**kwargs)


class TestNorms:
    """노름, 적분, 방향 에너지의 닫힌 형태 값."""

    def test_quadrature_weights(self):
        for dim in (2, 3):
            bary, weights = quadrature_rule(dim)
            assert weights.sum() == pytest.approx(1.0)
            assert bary.sum(axis=1) == pytest.approx(np.ones(len(bary)))

    def test_integrate_quadratic_exactly(self, square_mesh, unit_tet):
        assert integrate(square_mesh, lambda p: p[:, 0] ** 2) == pytest.approx(1.0 / 3.0)
        # 단위 사면체 위 ∫ x² = 1/60
        tet = refine_uniform(unit_tet, 1)
        assert integrate(tet, lambda p: p[:, 0] ** 2) == pytest.approx(1.0 / 60.0)

    def test_h1_seminorm_affine(self, square_mesh):
        field = nodal(square_mesh, TestFunction.affine([1.0, 2.0]))
        assert h1_seminorm(field) == pytest.approx(math.sqrt(5.0))
        assert h1_error_seminorm(field, TestFunction.affine([1.0, 2.0])) == pytest.approx(0.0, abs=1e-12)

    def test_h1_seminorm_analytic(self, square_mesh):
        # ∫ (2x)² = 4/3
        assert h1_seminorm_analytic(TestFunction.x_squared(), square_mesh) == pytest.approx(math.sqrt(4.0 / 3.0))

    def test_interpolation_error_halves(self):
        """이차 함수의 보간 오차는 균일 세분마다 정확히 절반이 됩니다."""
        base = constrained_delaunay(unit_square())
        u = TestFunction.x_squared()
        errors = [h1_error_seminorm(nodal(refine_uniform(base, k), u), u) for k in (2, 3, 4)]
        assert errors[0] / errors[1] == pytest.approx(2.0, rel=1e-8)
        assert errors[1] / errors[2] == pytest.approx(2.0, rel=1e-8)

    def test_h2_seminorm_analytic(self):
        assert h2_seminorm_analytic(TestFunction.x_squared(), unit_square()) == pytest.approx(2.0)
        octahedron = regular_octahedron()
        assert h2_seminorm_analytic(TestFunction.radial_squared(), octahedron) == pytest.approx(
            math.sqrt(8.0 * 4.0 / 3.0))
        assert h2_seminorm_analytic(TestFunction.x_squared(), 0.25) == pytest.approx(1.0)

    def test_directional_energy(self, square_mesh):
        field = nodal(square_mesh, TestFunction.affine([1.0, 2.0]))
        everywhere = directional_energy(field, (0.0, 1.0), lambda p: np.ones(len(p), dtype=bool))
        left_half = directional_energy(field, (0.0, 3.0), lambda p: p[:, 0] <= 0.5)
        assert everywhere == pytest.approx(4.0)
        assert left_half == pytest.approx(2.0)
        with pytest.raises(ValueError):
            directional_energy(field, (0.0, 0.0), lambda p: np.ones(len(p), dtype=bool))

    def test_segment_energy(self, square_mesh):
        field = nodal(square_mesh, TestFunction.affine([1.0, 0.0]))
        assert segment_energy(field, (0.0, 0.0), (1.0, 0.0)) == pytest.approx(1.0)
        assert segment_energy(field, (0.0, 0.0), (0.0, 1.0)) == pytest.approx(0.0)
        with pytest.raises(ValueError):
            segment_energy(field, (0.0, 0.0), (0.0, 0.0))

    def test_segment_energy_requires_mesh_edges(self):
        # Given: 대각선 0-2 로 나눈 정사각형, 다른 대각선 1-3 은 메쉬 변이 아님
        mesh = TriMesh(vertices=np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float),
                       triangles=np.array([(0, 1, 2), (0, 2, 3)]))
        field = nodal(mesh, TestFunction.affine([1.0, 0.0]))
        # Then: 메쉬 변인 대각선은 통과, 아닌 대각선은 MeshError
        assert segment_energy(field, (0.0, 0.0), (1.0, 1.0)) == pytest.approx(1.0 / math.sqrt(2.0))
        with pytest.raises(MeshError):
            segment_energy(field, (1.0, 0.0), (0.0, 1.0))


class TestScalarField:
    """P1 함수의 점 평가, 세분 이동, 산술."""

    def test_evaluate_affine_and_outside(self, square_mesh):
        u = TestFunction.affine([1.0, -1.0], 2.0)
        field = nodal(square_mesh, u)
        points = np.random.default_rng(0).uniform(0.0, 1.0, size=(50, 2))
        assert field.evaluate(points) == pytest.approx(u(points), abs=1e-12)
        assert np.isnan(field.evaluate(np.array([(1.5, 0.5)]))[0])

    def test_evaluate_in_3d(self, unit_tet):
        mesh = refine_uniform(unit_tet, 1)
        u = TestFunction.affine([1.0, 2.0, 3.0])
        field = nodal(mesh, u)
        points = np.array([(0.1, 0.1, 0.1), (0.25, 0.25, 0.25)])
        assert field.evaluate(points) == pytest.approx(u(points))

    def test_prolongate_keeps_function(self, square_mesh):
        field = nodal(square_mesh, TestFunction.x_squared())
        fine = prolongate(field, 1)
        assert fine.mesh.n_triangles == 4 * square_mesh.n_triangles
        assert h1_seminorm(fine) == pytest.approx(h1_seminorm(field))
        points = np.random.default_rng(1).uniform(0.05, 0.95, size=(20, 2))
        assert fine.evaluate(points) == pytest.approx(field.evaluate(points), abs=1e-12)

    def test_arithmetic_requires_same_mesh(self, square_mesh):
        a = nodal(square_mesh, TestFunction.x_squared())
        b = prolongate(a, 1)
        assert (a - a).max_abs() == 0.0
        assert (a + a).coefficients == pytest.approx(2.0 * a.coefficients)
        with pytest.raises(ValueError):
            a - b

    def test_coefficient_count_checked(self, square_mesh):
        with pytest.raises(ValueError):
            ScalarField(mesh=square_mesh, coefficients=np.zeros(3))
