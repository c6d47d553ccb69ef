"""
삼각분할 모듈 단위 테스트
- Delaunay / 구속 Delaunay 구성, 변 뒤집기, 외접원 반지름 품질 보고서와 두 보조 명제 검사를 확인합니다.
"""

import math

import numpy as np
import pytest

from cdt.delaunay import constrained_delaunay, delaunay, empty_circumdisk_violations, flip_edge, min_angle
from cdt.mesh import MeshError, TriMesh, edge_key
from cdt.quality import circumradii, quality_report, verify_adjacent_circumradius, verify_walk_lemma
from experiments.families import nonconvex2d_polygon
from experiments.random_domains import random_convex_polygon, random_delaunay_mesh, random_star_polygon, unit_square
from experiments.verifiers import flipped_counterexample_mesh
from geometry.metrics import GeometryError


class TestDelaunay:
    """점 집합 Delaunay 삼각분할: 빈 외접원 성질과 퇴화 입력."""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_random_points_have_empty_circumdisks(self, seed):
        # Given: [-1, 1]² 안의 무작위 점 30개
        mesh = random_delaunay_mesh(np.random.default_rng(seed), 30)
        # Then: 어떤 삼각형의 열린 외접원에도 다른 점이 없어야 합니다
        assert empty_circumdisk_violations(mesh) == []
        assert np.all(mesh.signed_areas > 0)

    def test_grid_points_with_cocircular_ties(self):
        """격자 점은 모든 칸이 공원점이지만 여전히 유효한 Delaunay 삼각분할이어야 합니다."""
        xs, ys = np.meshgrid(np.arange(4.0), np.arange(4.0))
        mesh = delaunay(np.column_stack([xs.ravel(), ys.ravel()]))
        assert mesh.n_triangles == 18
        assert empty_circumdisk_violations(mesh) == []
        assert float(np.sum(mesh.signed_areas)) == pytest.approx(9.0)

    def test_too_few_points(self):
        with pytest.raises(GeometryError):
            delaunay([(0.0, 0.0), (1.0, 0.0)])

    def test_equilateral_min_angle(self):
        mesh = delaunay([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0)])
        assert min_angle(mesh) == pytest.approx(math.pi / 3.0)


class TestConstrainedDelaunay:
    """다각형 CDT: 경계 변 보존, 넓이 보존, Steiner 점 없음."""

    def test_unit_square(self):
        mesh = constrained_delaunay(unit_square())
        assert mesh.n_vertices == 4
        assert mesh.n_triangles == 2
        assert mesh.boundary_edges() == [(0, 1), (0, 3), (1, 2), (2, 3)]
        mesh.validate(unit_square())

    @pytest.mark.parametrize("eps", [0.1, 0.5, 0.9])
    def test_nonconvex_pentagon(self, eps):
        # Given: 오목 꼭짓점 (0, ε) 를 갖는 오각형
        polygon = nonconvex2d_polygon(eps, scaled=False)
        # When
        mesh = constrained_delaunay(polygon)
        # Then: 삼각형 3개, 넓이 1 + ε, 모든 경계 변이 구속 변
        assert mesh.n_triangles == 3
        assert float(np.sum(mesh.signed_areas)) == pytest.approx(1.0 + eps)
        assert mesh.constrained_edges == frozenset(edge_key(a, b) for a, b in polygon.edges())
        mesh.validate(polygon)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_star_polygons(self, seed):
        rng = np.random.default_rng(seed)
        polygon = random_star_polygon(rng, 10)
        mesh = constrained_delaunay(polygon)
        assert mesh.n_triangles == polygon.n_vertices - 2
        assert float(np.sum(mesh.signed_areas)) == pytest.approx(polygon.area)
        mesh.validate(polygon)


class TestFlipEdge:
    """변 뒤집기와 그 오류 경로."""

    def test_constrained_edge_cannot_flip(self):
        mesh = constrained_delaunay(unit_square())
        with pytest.raises(MeshError):
            flip_edge(mesh, (0, 1))

    def test_boundary_edge_of_free_mesh_cannot_flip(self):
        mesh = delaunay([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        with pytest.raises(MeshError):
            flip_edge(mesh, (0, 1))

    def test_flip_interior_diagonal(self):
        mesh = delaunay([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        (diagonal,) = [e for e in mesh.edges() if len(mesh.edge_map[e]) == 2]
        flipped = flip_edge(mesh, diagonal)
        assert diagonal not in flipped.edge_map
        assert float(np.sum(flipped.signed_areas)) == pytest.approx(1.0)

    def test_nonconvex_quad_cannot_flip(self):
        # Given: 가운데 점이 오목하게 들어간 사각형의 대각선
        mesh = TriMesh(
            vertices=np.array([(0.0, 0.0), (2.0, 0.0), (1.0, 0.2), (1.0, 3.0)]),
            triangles=np.array([(0, 1, 2), (0, 2, 3), (1, 3, 2)]),
        )
        with pytest.raises(MeshError):
            flip_edge(mesh, (2, 3))


class TestQualityReport:
    """외접원 반지름 품질 보고서의 닫힌 형태 값."""

    def test_unit_square_ratio(self):
        report = quality_report(constrained_delaunay(unit_square()), unit_square())
        assert report.diameter == pytest.approx(math.sqrt(2.0))
        assert report.max_circumradius == pytest.approx(math.sqrt(2.0) / 2.0)
        assert report.ratio == pytest.approx(0.5)
        assert not report.longest_edge_on_boundary

    def test_unscaled_pentagon_circumradius(self):
        """밑변 (-1,0)-(1,0) 과 (0, 0.1) 로 이루어진 삼각형: R = (1 + 0.01) / 0.2 = 5.05."""
        polygon = nonconvex2d_polygon(0.1, scaled=False)
        report = quality_report(constrained_delaunay(polygon), polygon)
        assert report.max_circumradius == pytest.approx(5.05, rel=1e-12)
        assert report.diameter == pytest.approx(math.sqrt(5.0))
        assert report.longest_edge_on_boundary

    def test_circumradii_shape(self):
        mesh = random_delaunay_mesh(np.random.default_rng(7), 12)
        assert circumradii(mesh).shape == (mesh.n_triangles,)


class TestLemmaChecks:
    """최장변 경계 보조 명제와 인접 외접원 반지름 보조 명제."""

    @pytest.mark.parametrize("seed", range(10))
    def test_walk_lemma_on_random_polygons(self, seed):
        rng = np.random.default_rng(seed)
        for polygon in (random_star_polygon(rng, 9), random_convex_polygon(rng, 9)):
            check = verify_walk_lemma(constrained_delaunay(polygon), polygon)
            assert check, check.detail

    def test_walk_lemma_on_thin_pentagon(self):
        polygon = nonconvex2d_polygon(0.01, scaled=False)
        assert verify_walk_lemma(constrained_delaunay(polygon), polygon)

    @pytest.mark.parametrize("seed", range(10))
    def test_adjacent_circumradius_on_delaunay(self, seed):
        mesh = random_delaunay_mesh(np.random.default_rng(seed), 25)
        check = verify_adjacent_circumradius(mesh)
        assert check.ok, check.detail

    def test_adjacent_circumradius_detects_flipped_mesh(self):
        """Delaunay 가 아닌 메쉬에서는 둔각 삼각형의 이웃 반지름이 더 작을 수 있습니다."""
        # Given: R = 2.6 인 둔각 삼각형과 R = 5/3 인 이웃
        mesh = flipped_counterexample_mesh()
        # When
        check = verify_adjacent_circumradius(mesh)
        # Then
        assert not check
        assert check.counterexample is not None and len(check.counterexample) == 2
        t, n = check.counterexample
        radii = circumradii(mesh)
        assert radii[t] == pytest.approx(2.6)
        assert radii[n] == pytest.approx(5.0 / 3.0)

    def test_adjacent_circumradius_accepts_cocircular_tie(self):
        """네 꼭짓점이 한 원 위에 있으면 둔각 삼각형과 이웃의 외접원이 같아 반지름이 같습니다."""
        # Given: 단위원 위의 네 점, 삼각형 0 은 (0, 1) 에서 둔각이고 최장변 0-1 을 이웃과 공유
        mesh = TriMesh(vertices=np.array([(-0.8, 0.6), (0.8, 0.6), (0.0, 1.0), (0.0, -1.0)]),
                       triangles=np.array([(0, 1, 2), (1, 0, 3)]))
        radii = circumradii(mesh)
        assert radii == pytest.approx([1.0, 1.0])
        # When
        check = verify_adjacent_circumradius(mesh)
        # Then: 동률은 반례가 아님
        assert check.ok, check.detail
