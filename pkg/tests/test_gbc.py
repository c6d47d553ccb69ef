"""
조화 좌표 모듈 단위 테스트
- 경계 자취, 좌표 함수 계산, 공리 검사, 디리클레 에너지 최소성을 확인합니다.
"""

import numpy as np
import pytest

from cdt.delaunay import constrained_delaunay
from cdt.mesh import MeshError
from experiments.families import dented_box, nonconvex2d_polygon
from experiments.random_domains import random_convex_polygon, random_star_polygon, unit_square
from fem.functions import TestFunction
from fem.norms import h1_error_seminorm, h1_seminorm
from fem.solver import SolverSettings
from gbc.axioms import AxiomReport, axiom_check, invariance_violation
from gbc.boundary import BoundaryDataError, boundary_hat, boundary_trace, trace_values
from gbc.coordinates import (
    coordinate_mesh, harmonic_coordinates, harmonic_interpolant, triangulation_interpolant, worker_count,
)
from gbc.dirichlet import (
    compare_quadrilateral_triangulations, dirichlet_compare, near_straight_quadrilateral, perturbation_energies,
)
from geometry.shapes import Polygon


@pytest.fixture
def triangle():
    return Polygon(vertices=[(0.0, 0.0), (1.0, 0.2), (0.3, 0.9)])


def barycentric(polygon: Polygon, points: np.ndarray) -> np.ndarray:
    a, b, c = polygon.points
    basis = np.column_stack([b - a, c - a])
    st = np.linalg.solve(basis, (points - a).T).T
    return np.column_stack([1.0 - st.sum(axis=1), st[:, 0], st[:, 1]])


class TestBoundaryTrace:
    """경계 자취 g: 변 위 선형 보간, 꼭짓점 값, 경계 밖 점 거부."""

    def test_polygon_edge_midpoints(self):
        square = unit_square()
        values = [0.0, 1.0, 2.0, 3.0]
        points = np.array([(0.5, 0.0), (1.0, 0.5), (0.0, 0.25), (1.0, 1.0)])
        assert trace_values(square, values, points) == pytest.approx([0.5, 1.5, 0.75, 2.0])

    def test_off_boundary_point_rejected(self):
        with pytest.raises(BoundaryDataError):
            trace_values(unit_square(), [0.0, 1.0, 2.0, 3.0], np.array([(0.5, 0.5)]))

    def test_value_count_checked(self):
        with pytest.raises(ValueError):
            trace_values(unit_square(), [0.0, 1.0], np.array([(0.5, 0.0)]))

    def test_quad_face_is_bilinear(self):
        # Given: 파인 상자의 밑면 (사각형 면) 중심
        box = dented_box(0.5)
        values = np.arange(box.n_vertices, dtype=float)
        base = next(face for face in box.faces if len(face) == 4)
        center = box.points[list(base)].mean(axis=0)
        # Then: 쌍선형 보간은 중심에서 네 꼭짓점 값의 평균
        assert trace_values(box, values, center[None, :]) == pytest.approx([values[list(base)].mean()])

    def test_boundary_hat(self):
        square = unit_square()
        mesh = coordinate_mesh(square, 2)
        data = boundary_hat(square, 2, mesh)
        corner = int(np.argmin(np.linalg.norm(mesh.vertices[data.indices] - (1.0, 1.0), axis=1)))
        assert data.values[corner] == 1.0
        assert data.values.min() == 0.0
        with pytest.raises(IndexError):
            boundary_hat(square, 4, mesh)

    def test_trace_rejects_foreign_mesh(self):
        mesh = coordinate_mesh(unit_square(), 1)
        shifted = Polygon(vertices=[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)])
        with pytest.raises(BoundaryDataError):
            boundary_trace(shifted, [0.0, 0.0, 0.0, 0.0], mesh)


class TestHarmonicCoordinates:
    """조화 좌표 계산: 삼각형에서의 정확성, 병렬 실행, 평가."""

    def test_triangle_coordinates_are_barycentric(self, triangle):
        coords = harmonic_coordinates(triangle, level=3)
        points = np.array([(0.4, 0.3), (0.2, 0.2), (0.5, 0.5)])
        assert coords.evaluate(points) == pytest.approx(barycentric(triangle, points), abs=1e-10)
        assert len(coords) == 3
        assert coords.matrix.shape == (3, coords.mesh.n_vertices)

    def test_threads_give_same_result(self):
        polygon = nonconvex2d_polygon(0.3)
        serial = harmonic_coordinates(polygon, level=2, threads=1)
        parallel = harmonic_coordinates(polygon, level=2, threads=3)
        assert np.array_equal(serial.matrix, parallel.matrix)

    def test_outside_points_are_nan(self):
        coords = harmonic_coordinates(unit_square(), level=2)
        values = coords.evaluate(np.array([(2.0, 2.0), (0.5, 0.5)]))
        assert np.all(np.isnan(values[0]))
        assert values[1].sum() == pytest.approx(1.0)

    def test_interpolate_reproduces_linear(self):
        polygon = nonconvex2d_polygon(0.2, scaled=False)
        coords = harmonic_coordinates(polygon, level=3)
        u = TestFunction.affine([2.0, -1.0], 0.25)
        field = coords.interpolate(u(polygon.points))
        assert field.coefficients == pytest.approx(u(coords.mesh.vertices), abs=1e-9)

    def test_worker_count(self, monkeypatch):
        monkeypatch.setenv("GBCLAB_THREADS", "8")
        assert worker_count() == 1
        assert worker_count(4) == 4
        with pytest.raises(ValueError):
            worker_count(0)

    def test_polyhedron_needs_mesh(self):
        box = dented_box(0.5)
        with pytest.raises(ValueError):
            harmonic_interpolant(box, np.zeros(box.n_vertices))

    def test_triangulation_interpolant_needs_vertex_values(self):
        mesh = constrained_delaunay(unit_square())
        with pytest.raises(MeshError):
            triangulation_interpolant(mesh, [0.0, 1.0, 2.0])
        field = triangulation_interpolant(mesh, [0.0, 1.0, 2.0, 3.0], level=2)
        assert field.mesh.n_vertices == 25


class TestAxioms:
    """여섯 공리 검사 보고서."""

    def test_square_partition_of_unity(self):
        # Given: 단위 정사각형 좌표 (3단계 세분)
        coords = harmonic_coordinates(unit_square(), level=3)
        # When
        report = axiom_check(coords)
        # Then
        assert report.partition_of_unity < 1e-8
        assert report.linear_precision < 1e-8
        assert report.linear_completeness < 1e-8
        assert report.kronecker_delta < 1e-12
        assert report.n_samples == coords.mesh.n_vertices

    def test_triangle_passes_all(self, triangle):
        coords = harmonic_coordinates(triangle, level=2)
        report = axiom_check(coords, seed=3)
        assert report.passed, report.failures()
        assert set(report.violations()) == {"GBC1", "GBC2", "GBC3", "GBC4", "GBC5", "GBC6"}

    def test_outside_samples_dropped(self):
        coords = harmonic_coordinates(unit_square(), level=2)
        samples = np.array([(0.25, 0.25), (0.75, 0.5), (3.0, 3.0)])
        report = axiom_check(coords, samples)
        assert report.n_samples == 2

    def test_non_negativity_is_not_a_failure(self):
        report = AxiomReport(non_negativity=1e-3, linear_completeness=0.0, invariance=0.0,
                             partition_of_unity=0.0, linear_precision=0.0, kronecker_delta=0.0, n_samples=1)
        assert report.passed
        failing = report.model_copy(update={"invariance": 1e-3})
        assert failing.failures() == ["GBC3"]

    @pytest.mark.parametrize("make, count", [(random_convex_polygon, 50), (random_star_polygon, 20)])
    def test_random_polygons_pass(self, make, count):
        # Given: 꼭짓점 10개 이하의 무작위 다각형
        rng = np.random.default_rng(11)
        for k in range(count):
            polygon = make(rng, int(rng.integers(4, 11)))
            coords = harmonic_coordinates(polygon, level=2)
            # When
            report = axiom_check(coords, seed=k)
            # Then
            assert report.partition_of_unity < 1e-8
            assert report.linear_completeness < 1e-8
            assert report.linear_precision < 1e-8
            assert report.kronecker_delta == 0.0
            assert report.passed, (k, report.failures())

    def test_non_negativity_violation_shrinks(self):
        # Given: 거의 평평한 각을 가진 오목 다각형
        polygon = nonconvex2d_polygon(0.1)
        # When
        violations = [axiom_check(harmonic_coordinates(polygon, level=level)).non_negativity for level in (2, 3, 4)]
        # Then
        assert violations[-1] <= violations[0] + 1e-12
        assert violations[-1] < 1e-2

    @pytest.mark.parametrize("seed", range(5))
    def test_invariance_under_random_similarity(self, seed):
        rng = np.random.default_rng(seed)
        coords = harmonic_coordinates(random_star_polygon(rng, 7), level=2)
        centroids = coords.mesh.vertices[coords.mesh.cells].mean(axis=1)
        assert invariance_violation(coords, centroids, seed=seed) < 1e-6

    def test_regular_hexagon_center(self):
        # Given
        angles = np.arange(6) * np.pi / 3.0
        hexagon = Polygon(vertices=np.column_stack([np.cos(angles), np.sin(angles)]))
        # When
        values = harmonic_coordinates(hexagon, level=4).evaluate(np.array([(0.0, 0.0)]))[0]
        # Then: 대칭이므로 모든 좌표가 1/6
        assert values == pytest.approx([1.0 / 6.0] * 6, abs=5e-3)
        assert values.sum() == pytest.approx(1.0)

    def test_energy_decreases_with_refinement(self):
        """같은 조각별 선형 경계 자료에서 세분 공간은 포함 관계라 에너지가 늘지 않습니다."""
        polygon = nonconvex2d_polygon(0.3)
        energies = np.array([[h1_seminorm(field) for field in harmonic_coordinates(polygon, level=level).fields]
                             for level in (1, 2, 3, 4)])
        assert np.all(np.diff(energies, axis=0) <= 1e-9)


class TestDirichletEnergy:
    """조화 보간의 이산 디리클레 에너지 최소성과 거의 평평한 사각형 비교."""

    @pytest.mark.parametrize("eps", [0.1, 0.5])
    def test_minimality_gap(self, eps):
        comparison = dirichlet_compare(nonconvex2d_polygon(eps), TestFunction.x_squared(), level=3)
        assert comparison.minimality_gap >= -1e-10

    def test_perturbations_do_not_beat_harmonic(self):
        polygon = nonconvex2d_polygon(0.3)
        u = TestFunction.x_squared()
        comparison = dirichlet_compare(polygon, u, level=3, settings=SolverSettings(tol=1e-12))
        energies = perturbation_energies(polygon, u, level=3, count=5, seed=1)
        assert energies.shape == (5,)
        assert energies.min() >= comparison.harmonic_energy - 1e-10

    def test_harmonic_interpolant_on_affine_data(self):
        polygon = nonconvex2d_polygon(0.4, scaled=False)
        u = TestFunction.affine([1.0, 3.0])
        field = harmonic_interpolant(polygon, u(polygon.points), level=2)
        assert h1_error_seminorm(field, u) == pytest.approx(0.0, abs=1e-9)

    def test_minimality_on_random_polygons(self):
        # Given: 무작위 볼록/별 모양 다각형 100개와 u = x²
        rng = np.random.default_rng(5)
        u = TestFunction.x_squared()
        for k in range(100):
            make = random_convex_polygon if k % 2 == 0 else random_star_polygon
            polygon = make(rng, int(rng.integers(4, 11)))
            # When
            comparison = dirichlet_compare(polygon, u, level=2)
            energies = perturbation_energies(polygon, u, level=2, count=10, seed=k)
            # Then: 조화 보간이 CDT 보간과 모든 교란보다 에너지가 작음
            assert comparison.minimality_gap >= -1e-10, k
            assert energies.min() >= comparison.harmonic_energy - 1e-10, k

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.1])
    def test_quadrilateral_delta_range(self, delta):
        with pytest.raises(ValueError):
            near_straight_quadrilateral(delta)

    def test_bad_diagonal_has_larger_error(self):
        """거의 180° 인 각을 가로지르는 대각선은 오차가 δ 가 줄수록 커집니다."""
        bad_1, good_1 = compare_quadrilateral_triangulations(0.05)
        bad_2, good_2 = compare_quadrilateral_triangulations(0.01)
        assert bad_1 > good_1
        assert bad_2 > bad_1
        assert good_2 == pytest.approx(good_1, rel=0.2)

    def test_cdt_picks_good_diagonal(self):
        polygon, _, good = near_straight_quadrilateral(0.05)
        cdt = constrained_delaunay(polygon)
        assert sorted(cdt.edges()) == sorted(good.edges())
