"""
단체(Simplex) 및 볼록체 계량 함수
- 외접원, 지름, 내접 반지름(체비셰프 중심 LP), 삼각형/사면체 품질 지표를 계산합니다.
- 계량값은 부동소수점으로 계산하며, 퇴화 판정만 견고한 predicate 를 사용합니다.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog
from scipy.spatial.distance import pdist

from geometry.predicates import orient2d, orient3d
from geometry.shapes import Polygon, Polyhedron


class GeometryError(Exception):
    """기하 계산의 전제 조건이 깨졌을 때 발생하는 최상위 예외입니다."""
    pass


class DegenerateSimplexError(GeometryError):
    """넓이/부피가 0인 퇴화 삼각형 또는 사면체입니다."""
    pass


class NonConvexError(GeometryError):
    """볼록체에서만 정의되는 연산에 비볼록 입력이 들어왔습니다."""
    pass


@dataclass(frozen=True)
class SimplexQuality:
    """삼각형/사면체 하나의 크기 및 형상 지표입니다."""
    diameter: float       # 가장 긴 변의 길이
    circumradius: float   # 외접원(구) 반지름 R
    inradius: float       # 내접원(구) 반지름 rho
    aspect_ratio: float   # gamma = diameter / rho


def circumcircle(tri: Sequence[Sequence[float]]) -> Tuple[np.ndarray, float]:
    """삼각형의 외심과 외접원 반지름을 반환합니다."""
    a, b, c = (np.asarray(p, dtype=float) for p in tri)
    if orient2d(a, b, c) == 0:
        raise DegenerateSimplexError(f"일직선 위의 세 점으로는 외접원을 정의할 수 없습니다: {a}, {b}, {c}")
    ba, ca = b - a, c - a
    d = 2.0 * (ba[0] * ca[1] - ba[1] * ca[0])
    ba2, ca2 = ba @ ba, ca @ ca
    offset = np.array([ca[1] * ba2 - ba[1] * ca2, ba[0] * ca2 - ca[0] * ba2]) / d
    return a + offset, float(np.hypot(offset[0], offset[1]))


def diameter(points: Union[Sequence[Sequence[float]], np.ndarray]) -> float:
    """점 집합의 최대 쌍 거리 (전수 탐색)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < 2:
        raise GeometryError("지름 계산에는 최소 2개의 점이 필요합니다.")
    return float(pdist(pts).max())


def triangle_area(tri: Sequence[Sequence[float]]) -> float:
    a, b, c = (np.asarray(p, dtype=float) for p in tri)
    ba, ca = b - a, c - a
    if len(a) == 2:
        return 0.5 * abs(ba[0] * ca[1] - ba[1] * ca[0])
    return 0.5 * float(np.linalg.norm(np.cross(ba, ca)))


def triangle_quality(tri: Sequence[Sequence[float]]) -> SimplexQuality:
    """삼각형 품질: 최장변, 외접원 반지름, 내접원 반지름(2A/둘레), 종횡비."""
    pts = np.asarray(tri, dtype=float)
    _, radius = circumcircle(pts)
    lengths = pdist(pts)
    rho = 2.0 * triangle_area(pts) / lengths.sum()
    diam = float(lengths.max())
    return SimplexQuality(diameter=diam, circumradius=radius, inradius=rho, aspect_ratio=diam / rho)


def tet_volume(t: Sequence[Sequence[float]]) -> float:
    """부호 있는 사면체 부피 det[b-a, c-a, d-a] / 6."""
    a, b, c, d = (np.asarray(p, dtype=float) for p in t)
    return float(np.linalg.det(np.stack([b - a, c - a, d - a])) / 6.0)


def tet_circumradius(t: Sequence[Sequence[float]]) -> float:
    pts = np.asarray(t, dtype=float)
    lhs = 2.0 * (pts[1:] - pts[0])
    rhs = (pts[1:] ** 2).sum(axis=1) - (pts[0] ** 2).sum()
    center = np.linalg.solve(lhs, rhs)
    return float(np.linalg.norm(center - pts[0]))


def tet_quality(t: Sequence[Sequence[float]]) -> SimplexQuality:
    """
    사면체 품질을 계산합니다.
    rho = 3V / (면 넓이 합), gamma = 최장변 / rho.
    """
    pts = np.asarray(t, dtype=float)
    if orient3d(*pts) == 0:
        raise DegenerateSimplexError("부피가 0인 사면체입니다.")
    ratios, rho, diam = _tet_metrics(pts[None, :, :])
    return SimplexQuality(
        diameter=float(diam[0]),
        circumradius=tet_circumradius(pts),
        inradius=float(rho[0]),
        aspect_ratio=float(ratios[0]),
    )


def _tet_metrics(tets: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    a, b, c, d = tets[:, 0], tets[:, 1], tets[:, 2], tets[:, 3]
    volume = np.abs(np.einsum('ij,ij->i', b - a, np.cross(c - a, d - a))) / 6.0
    faces = ((b, c, d), (a, c, d), (a, b, d), (a, b, c))
    area = sum(0.5 * np.linalg.norm(np.cross(q - p, r - p), axis=1) for p, q, r in faces)
    rho = 3.0 * volume / area
    pairs = ((a, b), (a, c), (a, d), (b, c), (b, d), (c, d))
    diam = np.max(np.stack([np.linalg.norm(q - p, axis=1) for p, q in pairs]), axis=0)
    with np.errstate(divide='ignore'):
        ratios = np.where(rho > 0.0, diam / np.where(rho > 0.0, rho, 1.0), np.inf)
    return ratios, rho, diam


def tet_aspect_ratios(tets: np.ndarray) -> np.ndarray:
    """(n, 4, 3) 배열의 사면체 종횡비를 한 번에 계산합니다. 퇴화 사면체는 inf."""
    ratios, _, _ = _tet_metrics(np.asarray(tets, dtype=float))
    return ratios


def _half_spaces(body: Union[Polygon, Polyhedron]) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(body, Polygon):
        pts = body.points
        edge = np.roll(pts, -1, axis=0) - pts
        normals = np.column_stack([edge[:, 1], -edge[:, 0]])
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        return normals, np.einsum('ij,ij->i', normals, pts)
    return body.face_planes()


def inradius_convex(body: Union[Polygon, Polyhedron]) -> Tuple[np.ndarray, float]:
    """
    볼록 다각형/다면체의 체비셰프 중심과 내접 반지름을 구합니다.
    max r  s.t.  a_i·x + ||a_i|| r <= b_i,  r >= 0  (HiGHS LP)
    """
    if not body.is_convex():
        raise NonConvexError("내접 반지름은 볼록체에서만 계산합니다.")
    normals, offsets = _half_spaces(body)
    m, dim = normals.shape
    cost = np.zeros(dim + 1)
    cost[dim] = -1.0
    a_ub = np.empty((m, dim + 1))
    a_ub[:, :dim] = normals
    a_ub[:, dim] = np.linalg.norm(normals, axis=1)
    bounds = [(None, None)] * dim + [(0, None)]
    result = linprog(cost, A_ub=a_ub, b_ub=offsets, bounds=bounds, method='highs')
    if result.status != 0:
        raise GeometryError(f"체비셰프 중심 LP 풀이 실패: {result.message}")
    return np.asarray(result.x[:dim]), float(result.x[dim])
