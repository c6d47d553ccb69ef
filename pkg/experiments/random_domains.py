"""
무작위 영역과 고정 예제 (Random Domains & Fixtures)
- 별 모양 단순 다각형, 볼록 다각형 (무작위 점의 볼록 껍질), 구면 위 점의 볼록 다면체.
- 모든 생성기는 numpy Generator 를 받아 결정적으로 동작합니다.
"""

import numpy as np
from scipy.spatial import ConvexHull

from cdt.delaunay import delaunay
from cdt.mesh import TriMesh
from geometry.metrics import diameter
from geometry.shapes import Polygon, Polyhedron

# 별 모양 다각형 반지름 범위
STAR_RADII = (0.3, 1.0)


def random_star_polygon(rng: np.random.Generator, n: int) -> Polygon:
    """원점 기준 각도 순으로 정렬한 n 꼭짓점 별 모양 다각형 (각 간격 < π)."""
    if n < 3:
        raise ValueError(f"꼭짓점은 3개 이상이어야 합니다: {n}")
    while True:
        angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=n))
        gaps = np.diff(np.append(angles, angles[0] + 2.0 * np.pi))
        if gaps.max() < 0.9 * np.pi and gaps.min() > 1e-3:
            break
    radii = rng.uniform(*STAR_RADII, size=n)
    return Polygon(vertices=np.column_stack([radii * np.cos(angles), radii * np.sin(angles)]))


def random_convex_polygon(rng: np.random.Generator, n: int) -> Polygon:
    """단위 원판 안 점들의 볼록 껍질. 꼭짓점 수는 최대 n 입니다."""
    if n < 3:
        raise ValueError(f"꼭짓점은 3개 이상이어야 합니다: {n}")
    while True:
        radius = np.sqrt(rng.uniform(0.0, 1.0, size=n))
        angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
        pts = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
        hull = ConvexHull(pts)
        if len(hull.vertices) >= 3 and hull.volume > 1e-3:
            # 2차원 ConvexHull 의 꼭짓점은 반시계 순서입니다
            return Polygon(vertices=pts[hull.vertices])


def random_triangle(rng: np.random.Generator, min_area: float = 1e-2) -> Polygon:
    while True:
        pts = rng.uniform(-1.0, 1.0, size=(3, 2))
        ba, ca = pts[1] - pts[0], pts[2] - pts[0]
        signed = 0.5 * (ba[0] * ca[1] - ba[1] * ca[0])
        if abs(signed) >= min_area:
            return Polygon(vertices=pts if signed > 0 else pts[::-1])


def random_delaunay_mesh(rng: np.random.Generator, n: int) -> TriMesh:
    return delaunay(rng.uniform(-1.0, 1.0, size=(n, 2)))


def _outward_faces(points: np.ndarray, simplices: np.ndarray) -> list:
    center = points.mean(axis=0)
    faces = []
    for a, b, c in simplices.tolist():
        normal = np.cross(points[b] - points[a], points[c] - points[a])
        faces.append((a, b, c) if normal @ (points[a] - center) > 0 else (a, c, b))
    return faces


def random_convex_polyhedron(rng: np.random.Generator, n: int) -> Polyhedron:
    """단위 구면 위 n 점의 볼록 껍질 (지름 1 로 정규화)."""
    if n < 4:
        raise ValueError(f"꼭짓점은 4개 이상이어야 합니다: {n}")
    pts = rng.normal(size=(n, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    hull = ConvexHull(pts)
    used = np.unique(hull.simplices)
    remap = -np.ones(n, dtype=int)
    remap[used] = np.arange(len(used))
    points = pts[used]
    points = points / diameter(points)
    return Polyhedron(vertices=points, faces=_outward_faces(points, remap[hull.simplices]))


def regular_octahedron(unit_diameter: bool = False) -> Polyhedron:
    vertices = np.array([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)], dtype=float)
    faces = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4), (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    polyhedron = Polyhedron(vertices=vertices, faces=faces)
    return polyhedron.scaled(0.5) if unit_diameter else polyhedron


def regular_tetrahedron() -> Polyhedron:
    """변 길이 1 (지름 1) 정사면체."""
    vertices = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], dtype=float) / (2.0 * np.sqrt(2.0))
    faces = [(1, 3, 2), (0, 2, 3), (0, 3, 1), (0, 1, 2)]
    return Polyhedron(vertices=vertices, faces=faces)


def unit_square() -> Polygon:
    return Polygon(vertices=[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
