"""
영역(Domain) 스키마 정의
- Polygon / Polyhedron 을 Pydantic 모델로 정의하여 로딩 시점에 기하 불변식을 검증합니다.
- 검증 실패는 ValueError 로 올라가며, Pydantic 이 필드 경로가 포함된 ValidationError 로 감쌉니다.
"""

from typing import Any, List, Optional, Tuple

import numpy as np
import shapely
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from shapely.geometry import LinearRing, Polygon as ShapelyPolygon

from geometry.predicates import orient2d, orient3d

# 사각형 면의 평면성 허용 오차 (영역 크기 대비 상대값)
PLANARITY_TOLERANCE = 1e-12


def _as_point_tuples(value: Any, dim: int) -> Tuple[Tuple[float, ...], ...]:
    array = np.asarray(value, dtype=float)
    if array.ndim != 2 or array.shape[1] != dim:
        raise ValueError(f"좌표는 (n, {dim}) 형태여야 합니다. 입력 형태: {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError("좌표에 NaN 또는 무한대 값이 포함되어 있습니다.")
    return tuple(tuple(float(x) for x in row) for row in array)


class Polygon(BaseModel):
    """
    반시계 방향으로 정렬된 단순 다각형입니다.
    일직선 위의 연속 꼭짓점은 허용되며, 각 선분은 독립된 변으로 취급됩니다.
    """
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[Tuple[float, float], ...] = Field(..., min_length=3, description="반시계 방향 꼭짓점 목록")

    @field_validator('vertices', mode='before')
    @classmethod
    def coerce_vertices(cls, v: Any) -> Tuple[Tuple[float, ...], ...]:
        """numpy 배열이나 리스트 입력을 실수 튜플로 정규화합니다."""
        return _as_point_tuples(v, 2)

    @model_validator(mode='after')
    def validate_simple_ccw(self) -> 'Polygon':
        """연속 꼭짓점 중복, 자기 교차, 방향(반시계)을 검사합니다."""
        pts = self.points
        n = len(pts)
        for i in range(n):
            if np.array_equal(pts[i], pts[(i + 1) % n]):
                raise ValueError(f"연속된 꼭짓점 {i}, {(i + 1) % n} 이(가) 같은 위치에 있습니다.")
        if not LinearRing(pts).is_simple:
            raise ValueError("다각형이 자기 교차합니다 (단순 다각형이 아님).")
        if self.signed_area <= 0.0:
            raise ValueError("꼭짓점이 반시계 방향이 아니거나 넓이가 0입니다.")
        return self

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def signed_area(self) -> float:
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    def edges(self) -> List[Tuple[int, int]]:
        n = self.n_vertices
        return [(i, (i + 1) % n) for i in range(n)]

    def is_convex(self) -> bool:
        """모든 꼭짓점에서 좌회전(또는 일직선)이면 볼록입니다."""
        v = self.vertices
        n = len(v)
        return all(orient2d(v[i - 1], v[i], v[(i + 1) % n]) >= 0 for i in range(n))

    def to_shapely(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.vertices)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """닫힌 다각형(경계 포함) 안에 있는 점들의 마스크를 반환합니다."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.asarray(shapely.intersects_xy(self.to_shapely(), pts[:, 0], pts[:, 1]), dtype=bool)

    def transformed(self, matrix: np.ndarray, shift: Optional[np.ndarray] = None) -> 'Polygon':
        """x -> A x + b 변환을 적용합니다. det(A) > 0 이어야 방향이 유지됩니다."""
        pts = self.points @ np.asarray(matrix, dtype=float).T
        if shift is not None:
            pts = pts + np.asarray(shift, dtype=float)
        return Polygon(vertices=pts)

    def scaled(self, factor: float) -> 'Polygon':
        return Polygon(vertices=self.points * factor)


class Polyhedron(BaseModel):
    """
    바깥쪽 방향으로 정렬된 면을 갖는 닫힌 다면체입니다.
    면은 삼각형이며, 사각형 면은 최대 하나까지 허용됩니다 (정사각형 밑면을 갖는 비볼록 예제용).
    """
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[Tuple[float, float, float], ...] = Field(..., min_length=4, description="꼭짓점 좌표")
    faces: Tuple[Tuple[int, ...], ...] = Field(..., min_length=4, description="바깥 방향 면 (꼭짓점 인덱스)")

    @field_validator('vertices', mode='before')
    @classmethod
    def coerce_vertices(cls, v: Any) -> Tuple[Tuple[float, ...], ...]:
        return _as_point_tuples(v, 3)

    @field_validator('faces', mode='before')
    @classmethod
    def coerce_faces(cls, v: Any) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(int(i) for i in face) for face in v)

    @model_validator(mode='after')
    def validate_closed_surface(self) -> 'Polyhedron':
        """닫힌 방향 2-다양체, 오일러 공식, 바깥 방향(부피 > 0)을 검사합니다."""
        n = len(self.vertices)
        quads = 0
        directed = set()
        for k, face in enumerate(self.faces):
            if len(face) == 4:
                quads += 1
            elif len(face) != 3:
                raise ValueError(f"면 {k}: 삼각형 또는 사각형만 허용됩니다 (꼭짓점 {len(face)}개).")
            if len(set(face)) != len(face):
                raise ValueError(f"면 {k}: 중복된 꼭짓점 인덱스가 있습니다.")
            if min(face) < 0 or max(face) >= n:
                raise ValueError(f"면 {k}: 꼭짓점 인덱스가 범위를 벗어났습니다.")
            for a, b in zip(face, face[1:] + face[:1]):
                if (a, b) in directed:
                    raise ValueError(f"변 ({a}, {b}) 이(가) 같은 방향으로 두 번 사용되었습니다 (방향 불일치).")
                directed.add((a, b))
        if quads > 1:
            raise ValueError("사각형 면은 하나까지만 허용됩니다.")
        for a, b in directed:
            if (b, a) not in directed:
                raise ValueError(f"변 ({a}, {b}) 의 반대쪽 면이 없습니다 (열린 곡면).")
        used = {i for face in self.faces for i in face}
        if len(used) != n:
            raise ValueError("어떤 면에도 속하지 않는 꼭짓점이 있습니다.")
        n_edges = len(directed) // 2
        if n - n_edges + len(self.faces) != 2:
            raise ValueError(f"오일러 공식 위반: V - E + F = {n - n_edges + len(self.faces)}")
        pts = self.points
        scale = float(np.ptp(pts, axis=0).max())
        for k, face in enumerate(self.faces):
            if len(face) == 4:
                normal = np.cross(pts[face[1]] - pts[face[0]], pts[face[2]] - pts[face[0]])
                offset = abs(np.dot(normal / np.linalg.norm(normal), pts[face[3]] - pts[face[0]]))
                if offset > PLANARITY_TOLERANCE * scale:
                    raise ValueError(f"면 {k}: 사각형 면이 평면이 아닙니다.")
        if self.volume <= 0.0:
            raise ValueError("면 방향이 안쪽을 향하거나 부피가 0입니다.")
        return self

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def is_triangulated(self) -> bool:
        return all(len(face) == 3 for face in self.faces)

    def triangles(self) -> np.ndarray:
        """사각형 면은 대각선 (0, 2) 로 나누어 삼각형 배열 (k, 3)을 반환합니다."""
        tris = []
        for face in self.faces:
            tris.append(face[:3])
            if len(face) == 4:
                tris.append((face[0], face[2], face[3]))
        return np.asarray(tris, dtype=int)

    @property
    def volume(self) -> float:
        pts = self.points
        tris = self.triangles()
        a, b, c = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
        return float(np.einsum('ij,ij->i', a, np.cross(b, c)).sum() / 6.0)

    @property
    def surface_area(self) -> float:
        pts = self.points
        tris = self.triangles()
        cross = np.cross(pts[tris[:, 1]] - pts[tris[:, 0]], pts[tris[:, 2]] - pts[tris[:, 0]])
        return float(0.5 * np.linalg.norm(cross, axis=1).sum())

    def face_planes(self) -> Tuple[np.ndarray, np.ndarray]:
        """면마다 바깥 단위 법선 n 과 오프셋 d (n·x <= d) 를 반환합니다."""
        pts = self.points
        normals, offsets = [], []
        for face in self.faces:
            normal = np.cross(pts[face[1]] - pts[face[0]], pts[face[2]] - pts[face[0]])
            normal = normal / np.linalg.norm(normal)
            normals.append(normal)
            offsets.append(float(np.dot(normal, pts[face[0]])))
        return np.asarray(normals), np.asarray(offsets)

    def is_convex(self) -> bool:
        """모든 꼭짓점이 각 면 평면의 안쪽(또는 평면 위)에 있으면 볼록입니다."""
        v = self.vertices
        for face in self.faces:
            a, b, c = v[face[0]], v[face[1]], v[face[2]]
            if any(orient3d(a, b, c, p) > 0 for p in v):
                return False
        return True

    def face_inradius(self, k: int) -> float:
        """삼각형 면 k 의 내접원 반지름 (2·넓이 / 둘레)."""
        face = self.faces[k]
        if len(face) != 3:
            raise ValueError(f"면 {k} 은(는) 삼각형이 아닙니다.")
        a, b, c = (self.points[i] for i in face)
        area = 0.5 * np.linalg.norm(np.cross(b - a, c - a))
        perimeter = np.linalg.norm(b - a) + np.linalg.norm(c - b) + np.linalg.norm(a - c)
        return float(2.0 * area / perimeter)

    def scaled(self, factor: float) -> 'Polyhedron':
        return Polyhedron(vertices=self.points * factor, faces=self.faces)

