"""
퇴화 예제 가정 검사기 (Assumption Checks)
- 평면 예제: 지름 1, 표시된 변이 x 축 위, 표시된 꼭짓점이 양의 y 축 위, 지지선 조건,
  비퇴화 거리 c_v, 꼭짓점-변 간격, 원점까지의 선분 포함 여부를 이름 붙은 불리언 맵으로 돌려줍니다.
- 공간 예제: 지름 1, 표시된 면이 xy 평면 위, 꼭짓점이 양의 z 축 위, 면 경계까지 거리 c_v.
- c_v 는 가정에 나오는 거리들의 최솟값으로 계산하며, 가정은 c_v 이상인지로 판정합니다.
"""

from dataclasses import dataclass
from typing import Dict

import numpy as np
from shapely.geometry import LineString, Point
from shapely.geometry import Polygon as ShapelyPolygon

from geometry.metrics import diameter
from geometry.shapes import Polygon, Polyhedron

# 좌표 비교 허용 오차 (지름 1 기준)
ASSUMPTION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AssumptionResult:
    """가정 이름 → 만족 여부, 그리고 계산된 c_v 와 dist."""
    flags: Dict[str, bool]
    c_v: float
    dist: float

    @property
    def failed(self) -> list:
        return [name for name, ok in self.flags.items() if not ok]


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    v = b - a
    t = float(np.clip((p - a) @ v / (v @ v), 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * v)))


def supporting_slope_exists(points: np.ndarray, apex: np.ndarray) -> bool:
    """apex 를 지나고 기울기가 0 이상인 직선 아래에 모든 점이 놓이는지 (가능한 기울기 구간 검사)."""
    lower, upper = 0.0, np.inf
    for p in points:
        dx, dy = p[0] - apex[0], p[1] - apex[1]
        if abs(dx) <= ASSUMPTION_TOLERANCE:
            if dy > ASSUMPTION_TOLERANCE:
                return False
            continue
        slope = dy / dx
        if dx > 0:
            lower = max(lower, slope)
        else:
            upper = min(upper, slope)
    return lower <= upper + ASSUMPTION_TOLERANCE


def planar_assumptions(polygon: Polygon, vertex: int, edge: int, convex: bool) -> AssumptionResult:
    """
    convex=True 이면 A1-A6 (c_v 는 변 끝점 거리),
    False 이면 A1-A3, A5-A9 (c_v 는 끝점, 다른 꼭짓점, 비인접 변 거리의 최솟값) 을 검사합니다.
    """
    pts = polygon.points
    n = polygon.n_vertices
    v = pts[vertex]
    a, b = polygon.edges()[edge]
    pa, pb = pts[a], pts[b]
    tol = ASSUMPTION_TOLERANCE

    endpoint_dist = min(float(np.linalg.norm(pa)), float(np.linalg.norm(pb)))
    dist = _point_segment_distance(v, pa, pb)
    incident = {(vertex - 1) % n, vertex}
    others = [j for j in range(n) if j not in (vertex, a, b)]
    vertex_gap = min((float(np.linalg.norm(v - pts[j])) for j in others), default=np.inf)
    edge_gap = min(
        (_point_segment_distance(v, pts[i], pts[j]) for k, (i, j) in enumerate(polygon.edges())
         if k != edge and k not in incident),
        default=np.inf,
    )
    c_v = endpoint_dist if convex else min(endpoint_dist, vertex_gap, edge_gap)

    flags = {
        "A1": abs(diameter(pts) - 1.0) <= 1e-12,
        "A2": abs(pa[1]) <= tol and abs(pb[1]) <= tol and min(pa[0], pb[0]) < 0.0 < max(pa[0], pb[0]),
        "A3": abs(v[0]) <= tol and v[1] > 0.0,
    }
    if convex:
        flags["A4"] = supporting_slope_exists(pts, v)
    flags["A5"] = c_v > 0.0 and endpoint_dist >= c_v - tol
    flags["A6"] = dist > 0.0
    if not convex:
        flags["A7"] = vertex_gap >= c_v - tol
        flags["A8"] = edge_gap >= c_v - tol
        flags["A9"] = polygon.to_shapely().covers(LineString([tuple(v), (0.0, 0.0)]))
    return AssumptionResult(flags=flags, c_v=c_v, dist=dist)


def spatial_assumptions(polyhedron: Polyhedron, vertex: int, face: int) -> AssumptionResult:
    """B1-B5. c_v 는 원점에서 표시된 면 경계까지의 거리입니다."""
    pts = polyhedron.points
    v = pts[vertex]
    corners = pts[list(polyhedron.faces[face])]
    tol = ASSUMPTION_TOLERANCE
    outline = ShapelyPolygon(corners[:, :2])
    origin = Point(0.0, 0.0)
    c_v = float(outline.exterior.distance(origin)) if outline.covers(origin) else 0.0

    flags = {
        "B1": abs(diameter(pts) - 1.0) <= 1e-12,
        "B2": bool(np.all(np.abs(corners[:, 2]) <= tol)),
        "B3": abs(v[0]) <= tol and abs(v[1]) <= tol and v[2] > 0.0,
        "B4": c_v > 0.0 and outline.contains(origin),
        "B5": v[2] > 0.0,
    }
    return AssumptionResult(flags=flags, c_v=c_v, dist=float(v[2]))
