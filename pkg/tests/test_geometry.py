"""
기하 모듈 단위 테스트
- 판정 함수의 부호 규약과 정확 연산 경로, 측도 함수의 닫힌 형태 값, 영역 스키마 검증을 확인합니다.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError
from scipy.spatial.transform import Rotation

from experiments.families import dented_box, hexagonal_pyramid, nonconvex2d_polygon
from experiments.random_domains import regular_octahedron, regular_tetrahedron, unit_square
from geometry.metrics import (
    DegenerateSimplexError, NonConvexError, circumcircle, diameter, inradius_convex, tet_aspect_ratios,
    tet_quality, tet_volume, triangle_area, triangle_quality,
)
from geometry.predicates import dot_sign_exact, incircle, orient2d, orient3d, segments_cross
from geometry.shapes import Polygon, Polyhedron

coordinate = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
point2 = st.tuples(coordinate, coordinate)
point3 = st.tuples(coordinate, coordinate, coordinate)


class TestPredicates:
    """판정 함수: 부호 규약, 대칭성, 거의 퇴화된 입력에서의 정확 연산."""

    def test_orient2d_signs(self):
        assert orient2d((0, 0), (1, 0), (0, 1)) == 1
        assert orient2d((0, 0), (0, 1), (1, 0)) == -1
        assert orient2d((0, 0), (1, 1), (2, 2)) == 0

    def test_orient2d_exact_on_near_collinear(self):
        """부동소수점 필터로 판정할 수 없는 일직선 입력도 정확히 0 이어야 합니다."""
        # Given: 이진 표현으로 정확히 일직선인 세 점
        a, b, c = (0.5, 0.5), (12.0, 12.0), (24.0, 24.0)
        # When / Then
        assert orient2d(a, b, c) == 0
        assert orient2d((0.1, 0.1), (0.2, 0.2), (0.3, 0.30000000000000004)) == 1

    @given(point2, point2, point2)
    @settings(max_examples=200, deadline=None)
    def test_orient2d_antisymmetric(self, a, b, c):
        assert orient2d(a, b, c) == -orient2d(b, a, c)
        assert orient2d(a, b, c) == orient2d(b, c, a)

    def test_incircle_signs(self):
        a, b, c = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)
        assert incircle(a, b, c, (0.5, 0.5)) == 1
        assert incircle(a, b, c, (2.0, 2.0)) == -1
        # 정사각형의 네 번째 꼭짓점은 외접원 위
        assert incircle(a, b, c, (1.0, 1.0)) == 0

    @given(point2, point2, point2, point2)
    @settings(max_examples=200, deadline=None)
    def test_incircle_swap_antisymmetric(self, a, b, c, d):
        assert incircle(a, b, c, d) == -incircle(b, a, c, d)

    def test_orient3d_signs(self):
        o = (0.0, 0.0, 0.0)
        assert orient3d(o, (1, 0, 0), (0, 1, 0), (0, 0, 1)) == 1
        assert orient3d(o, (0, 1, 0), (1, 0, 0), (0, 0, 1)) == -1
        assert orient3d(o, (1, 0, 0), (0, 1, 0), (1, 1, 0)) == 0

    @given(point3, point3, point3, point3)
    @settings(max_examples=100, deadline=None)
    def test_orient3d_swap_antisymmetric(self, a, b, c, d):
        assert orient3d(a, b, c, d) == -orient3d(b, a, c, d)

    def test_segments_cross_excludes_touching(self):
        assert segments_cross((0, 0), (1, 1), (0, 1), (1, 0))
        assert not segments_cross((0, 0), (1, 0), (1, 0), (2, 1))

    def test_dot_sign_exact(self):
        assert dot_sign_exact((1.0, 0.0), (0.0, 1.0)) == 0
        assert dot_sign_exact((1.0, 1e-300), (-1e-300, 1.0)) == 0
        assert dot_sign_exact((1.0, 2.0), (-3.0, 1.0)) == -1


class TestMetrics:
    """측도 함수: 외접원, 지름, 품질 지표, 체비셰프 내접 반지름."""

    def test_circumcircle_of_obtuse_triangle(self):
        # Given: 밑변 2, 높이 0.2 인 둔각 삼각형
        center, radius = circumcircle([(-1.0, 0.0), (1.0, 0.0), (0.0, 0.2)])
        # Then: R = (1 + 0.04) / 0.4 = 2.6, 중심은 (0, -2.4)
        assert radius == pytest.approx(2.6, rel=1e-12)
        assert center == pytest.approx([0.0, -2.4], abs=1e-12)

    def test_circumcircle_rejects_collinear(self):
        with pytest.raises(DegenerateSimplexError):
            circumcircle([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])

    def test_diameter(self):
        assert diameter(unit_square().points) == pytest.approx(math.sqrt(2.0))

    def test_triangle_area_2d_and_3d(self):
        assert triangle_area([(0, 0), (1, 0), (0, 1)]) == pytest.approx(0.5)
        assert triangle_area([(0, 0, 0), (1, 0, 0), (0, 1, 0)]) == pytest.approx(0.5)

    def test_equilateral_triangle_quality(self):
        tri = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0)]
        quality = triangle_quality(tri)
        assert quality.diameter == pytest.approx(1.0)
        assert quality.circumradius == pytest.approx(1.0 / math.sqrt(3.0))
        assert quality.inradius == pytest.approx(1.0 / (2.0 * math.sqrt(3.0)))
        assert quality.aspect_ratio == pytest.approx(2.0 * math.sqrt(3.0))

    def test_tet_volume_sign(self):
        tet = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
        assert tet_volume(tet) == pytest.approx(1.0 / 6.0)
        assert tet_volume([tet[0], tet[2], tet[1], tet[3]]) == pytest.approx(-1.0 / 6.0)

    def test_regular_tet_quality_matches_batch(self):
        """정사면체: ρ = a/(2√6), R = a√6/4, 일괄 계산과 단일 계산이 같아야 합니다."""
        tet = regular_tetrahedron().points
        quality = tet_quality(tet)
        assert quality.inradius == pytest.approx(1.0 / (2.0 * math.sqrt(6.0)))
        assert quality.circumradius == pytest.approx(math.sqrt(6.0) / 4.0)
        batch = tet_aspect_ratios(np.stack([tet, tet]))
        assert batch == pytest.approx([quality.aspect_ratio] * 2)

    @given(offsets=st.lists(st.floats(min_value=-0.3, max_value=0.3), min_size=12, max_size=12),
           rotvec=st.tuples(*[st.floats(min_value=-math.pi, max_value=math.pi)] * 3),
           scale=st.floats(min_value=1e-2, max_value=1e2),
           shift=st.tuples(*[st.floats(min_value=-1e2, max_value=1e2)] * 3))
    @settings(max_examples=100, deadline=None)
    def test_tet_quality_invariant_under_similarity(self, offsets, rotvec, scale, shift):
        # Given: 정사면체를 조금 흔든 사면체와 닮음 변환 x -> s·Rx + t
        tet = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], dtype=float)
        tet = tet + np.reshape(offsets, (4, 3))
        moved = scale * Rotation.from_rotvec(rotvec).apply(tet) + np.asarray(shift)
        # When
        before, after = tet_quality(tet), tet_quality(moved)
        # Then: 종횡비는 그대로, 길이 양은 s 배
        assert after.aspect_ratio == pytest.approx(before.aspect_ratio, rel=1e-7)
        assert after.inradius == pytest.approx(scale * before.inradius, rel=1e-7)
        assert after.diameter == pytest.approx(scale * before.diameter, rel=1e-7)
        assert tet_aspect_ratios(moved[None])[0] == pytest.approx(after.aspect_ratio, rel=1e-12)

    def test_degenerate_tet_has_infinite_ratio(self):
        flat = np.array([[(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)]], dtype=float)
        assert np.isinf(tet_aspect_ratios(flat)[0])
        with pytest.raises(DegenerateSimplexError):
            tet_quality(flat[0])

    def test_inradius_of_square_and_octahedron(self):
        center, radius = inradius_convex(unit_square())
        assert radius == pytest.approx(0.5)
        assert center == pytest.approx([0.5, 0.5], abs=1e-9)
        _, rho = inradius_convex(regular_octahedron())
        assert rho == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-9)

    def test_inradius_rejects_nonconvex(self):
        with pytest.raises(NonConvexError):
            inradius_convex(nonconvex2d_polygon(0.3))


class TestPolygon:
    """다각형 스키마: 단순성, 방향, 넓이, 볼록성."""

    def test_square_properties(self):
        square = unit_square()
        assert square.area == pytest.approx(1.0)
        assert square.is_convex()
        assert square.edges() == [(0, 1), (1, 2), (2, 3), (3, 0)]
        assert list(square.contains(np.array([(0.5, 0.5), (1.0, 0.5), (1.5, 0.5)]))) == [True, True, False]

    @pytest.mark.parametrize("vertices", [
        [(0, 0), (1, 1), (1, 0), (0, 1)],          # 자기 교차 (나비 모양)
        [(0, 0), (0, 1), (1, 1), (1, 0)],          # 시계 방향
        [(0, 0), (1, 0), (1, 0), (0, 1)],          # 연속 중복
        [(0, 0), (1, 0)],                          # 꼭짓점 부족
    ])
    def test_invalid_polygons_rejected(self, vertices):
        with pytest.raises(ValidationError):
            Polygon(vertices=vertices)

    def test_collinear_consecutive_vertices_allowed(self):
        polygon = Polygon(vertices=[(0, 0), (0.5, 0), (1, 0), (1, 1), (0, 1)])
        assert polygon.n_vertices == 5
        assert polygon.area == pytest.approx(1.0)

    def test_nonconvex_pentagon(self):
        """오목 꼭짓점 (0, ε) 을 갖는 오각형의 넓이는 1 + ε 입니다."""
        polygon = nonconvex2d_polygon(0.25, scaled=False)
        assert not polygon.is_convex()
        assert polygon.area == pytest.approx(1.25)
        assert nonconvex2d_polygon(0.25).area == pytest.approx(1.25 / 5.0)

    def test_transformed_keeps_orientation(self):
        rotation = np.array([[0.0, -1.0], [1.0, 0.0]])
        moved = unit_square().transformed(2.0 * rotation, np.array([1.0, 1.0]))
        assert moved.area == pytest.approx(4.0)


class TestPolyhedron:
    """다면체 스키마: 닫힌 곡면, 바깥 방향, 부피, 사각형 면."""

    def test_octahedron(self):
        octahedron = regular_octahedron()
        assert octahedron.volume == pytest.approx(4.0 / 3.0)
        assert octahedron.is_convex()
        assert octahedron.is_triangulated
        assert octahedron.face_inradius(0) == pytest.approx(math.sqrt(2.0) / (2.0 * math.sqrt(3.0)))

    def test_regular_tetrahedron_unit_edge(self):
        tetra = regular_tetrahedron()
        assert diameter(tetra.points) == pytest.approx(1.0)
        assert tetra.volume == pytest.approx(1.0 / (6.0 * math.sqrt(2.0)))

    def test_inward_faces_rejected(self):
        tetra = regular_tetrahedron()
        flipped = [tuple(reversed(face)) for face in tetra.faces]
        with pytest.raises(ValidationError):
            Polyhedron(vertices=tetra.vertices, faces=flipped)

    def test_open_surface_rejected(self):
        tetra = regular_tetrahedron()
        with pytest.raises(ValidationError):
            Polyhedron(vertices=tetra.vertices, faces=tetra.faces[:3] + tetra.faces[:1])

    def test_hexagonal_pyramid_volume(self):
        """밑면 넓이 (3√3/2)R², 부피 = 밑면 넓이 · d / 3."""
        pyramid = hexagonal_pyramid(0.5)
        assert pyramid.volume == pytest.approx(math.sqrt(3.0) / 2.0 * 0.25 * 0.5)
        assert pyramid.is_convex()
        assert diameter(pyramid.points) == pytest.approx(1.0)

    @pytest.mark.parametrize("eps", [0.1, 0.5, 0.9])
    def test_dented_box_volume(self, eps):
        """상자 2×2×1 에서 마름모 위 파인 부분 (1-ε)·2/3 을 뺀 부피 (1/3 배 축소 전)."""
        box = dented_box(eps, scaled=False)
        assert not box.is_triangulated
        assert not box.is_convex()
        assert box.volume == pytest.approx(4.0 - (1.0 - eps) * 2.0 / 3.0)
        assert dented_box(eps).volume == pytest.approx(box.volume / 27.0)
        assert len(box.triangles()) == 22
