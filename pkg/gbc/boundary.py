"""
경계 데이터 생성 (Boundary Traces)
- 다각형 꼭짓점 값을 각 변을 따라 선형 보간해 메쉬 경계 꼭짓점 값을 만듭니다.
- 같은 직선 위에 놓인 연속 꼭짓점도 각자 독립된 변을 이룹니다.
- 다면체는 삼각형 면에서 무게중심 보간, 평행사변형 면에서 쌍선형 보간을 사용합니다.
"""

from typing import Sequence, Tuple, Union

import numpy as np

from cdt.mesh import MeshError
from fem.mesh import Mesh
from fem.solver import BoundaryData
from geometry.metrics import diameter
from geometry.shapes import Polygon, Polyhedron

# 경계 꼭짓점이 도메인 경계 위에 있다고 보는 상대 거리 (지름 대비)
ON_BOUNDARY_TOLERANCE = 1e-9

Domain = Union[Polygon, Polyhedron]


class BoundaryDataError(MeshError):
    """메쉬 경계 꼭짓점이 도메인의 어떤 변/면 위에도 있지 않습니다."""
    pass


def _snap_domain_vertices(points: np.ndarray, corners: np.ndarray, corner_values: np.ndarray,
                          values: np.ndarray, tol: float) -> None:
    """도메인 꼭짓점과 겹치는 점에는 보간 대신 정확한 값을 넣습니다."""
    for j, corner in enumerate(corners):
        hit = np.linalg.norm(points - corner, axis=1) <= tol
        values[hit] = corner_values[j]


def _polygon_scores(polygon: Polygon, values: np.ndarray, pts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    corners = polygon.points
    best = np.full(len(pts), np.inf)
    trace = np.zeros(len(pts))
    for a, b in polygon.edges():
        pa, pb = corners[a], corners[b]
        v = pb - pa
        t = np.clip((pts - pa) @ v / (v @ v), 0.0, 1.0)
        dist = np.linalg.norm(pts - (pa + np.outer(t, v)), axis=1)
        better = dist < best
        best[better] = dist[better]
        trace[better] = ((1.0 - t) * values[a] + t * values[b])[better]
    return best, trace


def _face_trace(face: Sequence[int], corners: np.ndarray, values: np.ndarray, pts: np.ndarray, tol: float):
    """면 하나에 대한 (거리 점수, 보간 값). 점수는 평면 거리와 면 밖으로 벗어난 정도의 합입니다."""
    p = corners[list(face)]
    if len(face) == 3:
        e1, e2 = p[1] - p[0], p[2] - p[0]
        normal = np.cross(e1, e2)
        normal /= np.linalg.norm(normal)
        rel = pts - p[0]
        plane = np.abs(rel @ normal)
        st, *_ = np.linalg.lstsq(np.column_stack([e1, e2]), rel.T, rcond=None)
        s, t = st
        lam = np.column_stack([1.0 - s - t, s, t])
        outside = np.maximum(0.0, -lam.min(axis=1)) * np.linalg.norm(e1)
        return plane + outside, lam @ values[list(face)]

    # 평행사변형 면: p = p0 + s(p1-p0) + t(p3-p0)
    if np.linalg.norm(p[0] + p[2] - p[1] - p[3]) > tol:
        raise BoundaryDataError(f"쌍선형 경계 보간은 평행사변형 면에서만 지원합니다: 면 {list(face)}")
    e1, e2 = p[1] - p[0], p[3] - p[0]
    normal = np.cross(e1, e2)
    normal /= np.linalg.norm(normal)
    rel = pts - p[0]
    plane = np.abs(rel @ normal)
    st, *_ = np.linalg.lstsq(np.column_stack([e1, e2]), rel.T, rcond=None)
    s, t = st
    outside = (np.maximum(0.0, -s) + np.maximum(0.0, s - 1.0) + np.maximum(0.0, -t) + np.maximum(0.0, t - 1.0))
    outside = outside * max(np.linalg.norm(e1), np.linalg.norm(e2))
    g = values[list(face)]
    bilinear = (1 - s) * (1 - t) * g[0] + s * (1 - t) * g[1] + s * t * g[2] + (1 - s) * t * g[3]
    return plane + outside, bilinear


def _polyhedron_scores(polyhedron: Polyhedron, values: np.ndarray, pts: np.ndarray,
                       tol: float) -> Tuple[np.ndarray, np.ndarray]:
    corners = polyhedron.points
    best = np.full(len(pts), np.inf)
    trace = np.zeros(len(pts))
    for face in polyhedron.faces:
        score, face_values = _face_trace(face, corners, values, pts, tol)
        better = score < best
        best[better] = score[better]
        trace[better] = face_values[better]
    return best, trace


def _check_values(domain: Domain, values: Sequence[float]) -> np.ndarray:
    values = np.asarray(values, dtype=float).ravel()
    if len(values) != domain.n_vertices:
        raise ValueError(f"꼭짓점 값 개수({len(values)})가 도메인 꼭짓점 수({domain.n_vertices})와 다릅니다.")
    return values


def trace_values(domain: Domain, values: Sequence[float], points: np.ndarray) -> np.ndarray:
    """
    도메인 경계 위의 임의 점들에서 조각별 선형 경계 자취 g 의 값을 구합니다.
    어떤 점이 경계에서 벗어나 있으면 BoundaryDataError 를 던집니다.
    """
    values = _check_values(domain, values)
    corners = domain.points
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tol = ON_BOUNDARY_TOLERANCE * diameter(corners)
    if isinstance(domain, Polygon):
        best, trace = _polygon_scores(domain, values, pts)
    else:
        best, trace = _polyhedron_scores(domain, values, pts, tol)

    off = np.flatnonzero(best > tol)
    if len(off):
        raise BoundaryDataError(
            f"점 {pts[off[0]].tolist()} 이(가) 도메인의 어떤 변/면 위에도 없습니다 (거리 {best[off[0]]:.3e})."
        )
    _snap_domain_vertices(pts, corners, values, trace, tol)
    return trace


def boundary_trace(domain: Domain, values: Sequence[float], mesh: Mesh) -> BoundaryData:
    """도메인 꼭짓점 값 values 로부터 메쉬 경계 꼭짓점 위의 디리클레 데이터 g 를 만듭니다."""
    idx = mesh.boundary_vertices()
    try:
        trace = trace_values(domain, values, mesh.vertices[idx])
    except BoundaryDataError as e:
        raise BoundaryDataError(f"메쉬 경계 꼭짓점 오류: {e}") from e
    return BoundaryData(indices=idx, values=trace)


def boundary_hat(domain: Domain, i: int, mesh: Mesh) -> BoundaryData:
    """꼭짓점 i 에서 1, 다른 꼭짓점에서 0 인 모자(hat) 경계 데이터."""
    if not 0 <= i < domain.n_vertices:
        raise IndexError(f"꼭짓점 인덱스 범위를 벗어났습니다: {i}")
    values = np.zeros(domain.n_vertices)
    values[i] = 1.0
    return boundary_trace(domain, values, mesh)
