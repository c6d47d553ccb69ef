"""
3차원 계열 메쉬 (Family Tet Meshes)
- convex3d: 꼭대기와 밑면 삼각형 4개를 잇는 사면체 4개를 균일 세분합니다.
- nonconvex3d: 정사각형을 16개 삼각형으로 나눈 평면 분할 위에 수직 프리즘 기둥을 세우고,
  각 프리즘을 최소 인덱스 대각선 규칙으로 사면체 3개로 나눈 뒤 균일 세분합니다.
  안쪽 마름모 고리가 파인 꼭짓점 근처의 격자를 한 단계 촘촘하게 만듭니다.
- 모든 조립 사면체는 열린 사분면 하나에 들어가므로 1/4 영역은 사면체의 합집합입니다.
"""

from typing import Tuple

import numpy as np
from loguru import logger

from experiments.families import NONCONVEX3D_SCALE, FamilyInstance, FamilyKind
from fem.field import ScalarField
from fem.functions import TestFunction
from fem.mesh import TetMesh
from fem.refine import orient_positive, refine_uniform
from gbc.boundary import trace_values

# 안쪽 마름모 고리의 반지름 (변 중점 반지름 대비)
INNER_RING = 0.25

# 프리즘 (V0..V5) 를 최소 꼭짓점이 V0 에 오도록 돌리는 표
PRISM_ROTATIONS = (
    (0, 1, 2, 3, 4, 5),
    (1, 2, 0, 4, 5, 3),
    (2, 0, 1, 5, 3, 4),
    (3, 5, 4, 0, 2, 1),
    (4, 3, 5, 1, 0, 2),
    (5, 4, 3, 2, 1, 0),
)

# 평면 분할 꼭짓점: 모서리 0-3, 변 중점 4-7, 안쪽 고리 8-11, 원점 12
_CORNERS = ((1, 1), (-1, 1), (1, -1), (-1, -1))
_MIDPOINTS = ((1, 0), (0, 1), (-1, 0), (0, -1))
# 사분면마다 (안쪽, 사다리꼴 2개, 모서리) 삼각형
_PARTITION = (
    (12, 8, 9), (8, 4, 5), (8, 5, 9), (4, 0, 5),
    (12, 9, 10), (9, 5, 6), (9, 6, 10), (5, 1, 6),
    (12, 10, 11), (10, 6, 7), (10, 7, 11), (6, 3, 7),
    (12, 11, 8), (11, 7, 4), (11, 4, 8), (7, 2, 4),
)


def pyramid_mesh(instance: FamilyInstance, level: int = 3) -> TetMesh:
    """convex3d 인스턴스의 꼭대기-밑면 부채꼴 메쉬."""
    if instance.kind is not FamilyKind.CONVEX3D:
        raise ValueError(f"convex3d 인스턴스가 아닙니다: {instance.kind.value}")
    vertices = instance.domain.points
    tets = np.array([(0, 2, 4, 6), (0, 1, 2, 6), (2, 3, 4, 6), (4, 5, 0, 6)])
    coarse = TetMesh(vertices=vertices, tetrahedra=orient_positive(vertices, tets))
    return refine_uniform(coarse, level)


def _partition_points() -> np.ndarray:
    mids = np.asarray(_MIDPOINTS, dtype=float)
    return np.vstack([np.asarray(_CORNERS, dtype=float), mids, INNER_RING * mids, [[0.0, 0.0]]])


def upper_surface(eps: float, xy: np.ndarray) -> np.ndarray:
    """원래 좌표계에서 윗면 높이: 마름모 |x|+|y| <= 1 안은 파인 면, 밖은 z = 1."""
    l1 = np.abs(xy[:, 0]) + np.abs(xy[:, 1])
    return np.where(l1 <= 1.0, eps + (1.0 - eps) * l1, 1.0)


def split_prism(prism: Tuple[int, ...]) -> list:
    """아래 (a,b,c), 위 (a',b',c') 프리즘을 이웃과 맞물리는 사면체 3개로 나눕니다."""
    imin = int(np.argmin(prism))
    v = [prism[k] for k in PRISM_ROTATIONS[imin]]
    if min(v[1], v[5]) < min(v[2], v[4]):
        return [(v[0], v[1], v[2], v[5]), (v[0], v[1], v[5], v[4]), (v[0], v[4], v[5], v[3])]
    return [(v[0], v[1], v[2], v[4]), (v[0], v[4], v[2], v[5]), (v[0], v[4], v[5], v[3])]


def dented_box_coarse_mesh(eps: float) -> TetMesh:
    """프리즘 16개 → 사면체 48개. 아래 꼭짓점이 위 꼭짓점보다 먼저 번호 매겨집니다."""
    xy = _partition_points()
    n = len(xy)
    bottom = np.column_stack([xy, np.zeros(n)])
    top = np.column_stack([xy, upper_surface(eps, xy)])
    vertices = np.vstack([bottom, top]) * NONCONVEX3D_SCALE
    tets = []
    for a, b, c in _PARTITION:
        tets.extend(split_prism((a, b, c, a + n, b + n, c + n)))
    tets = orient_positive(vertices, np.asarray(tets))
    mesh = TetMesh(vertices=vertices, tetrahedra=tets)
    mesh.validate()
    return mesh


def dented_box_mesh(instance: FamilyInstance, level: int = 3) -> TetMesh:
    if instance.kind is not FamilyKind.NONCONVEX3D:
        raise ValueError(f"nonconvex3d 인스턴스가 아닙니다: {instance.kind.value}")
    mesh = refine_uniform(dented_box_coarse_mesh(instance.param), level)
    logger.debug(f"nonconvex3d({instance.param}) 메쉬: 사면체 {mesh.n_tetrahedra}개, 꼭짓점 {mesh.n_vertices}개")
    return mesh


def family_mesh(instance: FamilyInstance, level: int = 3) -> TetMesh:
    if instance.kind is FamilyKind.CONVEX3D:
        return pyramid_mesh(instance, level)
    return dented_box_mesh(instance, level)


def quarter_domain(mesh: TetMesh) -> TetMesh:
    """무게중심이 열린 사분면 x > 0, y > 0 에 있는 사면체만 모은 메쉬 (꼭짓점 번호 압축)."""
    centroids = mesh.vertices[mesh.tetrahedra].mean(axis=1)
    keep = mesh.tetrahedra[(centroids[:, 0] > 0.0) & (centroids[:, 1] > 0.0)]
    used, inverse = np.unique(keep, return_inverse=True)
    return TetMesh(vertices=mesh.vertices[used], tetrahedra=inverse.reshape(-1, 4))


def competitor_field(instance: FamilyInstance, mesh: TetMesh, u: TestFunction) -> ScalarField:
    """
    경계에서는 g_u 와 같고 내부에서는 윗면 자료와 밑면 자료를 높이 비율 t = z/top(x,y) 로
    섞은 함수 w = t·G_top + (1-t)·g_base. 이산 조화 보간 에너지의 위쪽 경계로 씁니다.
    """
    polyhedron = instance.domain
    values = u(polyhedron.points)
    coefficients = np.empty(mesh.n_vertices)

    boundary = mesh.boundary_vertices()
    coefficients[boundary] = trace_values(polyhedron, values, mesh.vertices[boundary])

    mask = np.ones(mesh.n_vertices, dtype=bool)
    mask[boundary] = False
    inner = mesh.vertices[mask]
    xy = inner[:, :2]
    height = upper_surface(instance.param, xy / NONCONVEX3D_SCALE) * NONCONVEX3D_SCALE
    g_top = trace_values(polyhedron, values, np.column_stack([xy, height]))
    g_base = trace_values(polyhedron, values, np.column_stack([xy, np.zeros(len(xy))]))
    t = inner[:, 2] / height
    coefficients[mask] = t * g_top + (1.0 - t) * g_base
    return ScalarField(mesh=mesh, coefficients=coefficients)
