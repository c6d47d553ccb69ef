"""
소볼레프 세미노름과 방향 에너지 (Norms & Quadrature)
- 조각별 선형 함수의 H¹ 세미노름은 셀별 상수 기울기로 정확히 계산합니다.
- 이차 시험 함수와의 오차는 2차까지 정확한 적분 규칙(삼각형 변 중점 3점 / 사면체 4점)을 씁니다.
- 합산은 셀 순서대로 고정되어 있어 결과가 결정적입니다.
"""

from typing import Callable, Tuple, Union

import numpy as np

from cdt.mesh import MeshError, edge_key
from fem.assembly import cell_gradients
from fem.field import ScalarField
from fem.functions import TestFunction
from fem.mesh import Mesh
from geometry.shapes import Polygon, Polyhedron

# 사면체 4점 규칙 (2차 정확) 의 무게중심 좌표 상수
TET_RULE_A = 0.5854101966249685
TET_RULE_B = 0.1381966011250105
# 선분 위 꼭짓점 판정 상대 허용 오차
SEGMENT_TOLERANCE = 1e-10


def quadrature_rule(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """(q, d+1) 무게중심 좌표와 합이 1인 가중치."""
    if dim == 2:
        bary = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
        return bary, np.full(3, 1.0 / 3.0)
    a, b = TET_RULE_A, TET_RULE_B
    bary = np.array([[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]])
    return bary, np.full(4, 0.25)


def h1_seminorm(field: ScalarField) -> float:
    """√(Σ_T |∇f|²·|T|)."""
    _, measures = cell_gradients(field.mesh)
    return float(np.sqrt(np.sum(np.einsum('ed,ed->e', field.gradients, field.gradients) * measures)))


def h1_error_seminorm(field: ScalarField, u: TestFunction) -> float:
    """√(∫ |∇u − ∇f|²), 셀별 2차 정확 적분."""
    mesh = field.mesh
    _, measures = cell_gradients(mesh)
    bary, weights = quadrature_rule(mesh.dim)
    corners = mesh.vertices[mesh.cells]
    total = np.zeros(len(mesh.cells))
    for lam, w in zip(bary, weights):
        points = np.einsum('k,ekd->ed', lam, corners)
        diff = u.gradient(points) - field.gradients
        total += w * np.einsum('ed,ed->e', diff, diff)
    return float(np.sqrt(np.sum(total * measures)))


def _domain_measure(domain: Union[Polygon, Polyhedron, Mesh, float]) -> float:
    if isinstance(domain, Polygon):
        return domain.area
    if isinstance(domain, Polyhedron):
        return domain.volume
    if hasattr(domain, 'cells'):
        _, measures = cell_gradients(domain)
        return float(measures.sum())
    return float(domain)


def h2_seminorm_analytic(u: TestFunction, domain: Union[Polygon, Polyhedron, Mesh, float]) -> float:
    """√(Σ (D^α u)² · |domain|). 이차 함수의 헤시안이 상수이므로 정확합니다."""
    return float(np.sqrt(u.hessian_square_sum * _domain_measure(domain)))


def h1_seminorm_analytic(u: TestFunction, mesh: Mesh) -> float:
    """√(∫|∇u|²) 를 메쉬 위 2차 정확 적분으로 계산합니다."""
    zero = ScalarField(mesh=mesh, coefficients=np.zeros(mesh.n_vertices))
    return h1_error_seminorm(zero, u)


def directional_energy(field: ScalarField, direction, region: Callable[[np.ndarray], np.ndarray]) -> float:
    """
    ∫_region (∂f/∂direction)².
    region 은 (n, d) 점 배열에 대한 불리언 판정이며, 꼭짓점이 모두 안에 있는 셀만 포함합니다.
    """
    mesh = field.mesh
    direction = np.asarray(direction, dtype=float).ravel()
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        raise ValueError("방향 벡터가 0입니다.")
    direction = direction / norm
    _, measures = cell_gradients(mesh)
    inside_vertex = np.asarray(region(mesh.vertices), dtype=bool)
    selected = np.all(inside_vertex[mesh.cells], axis=1)
    slope = field.gradients[selected] @ direction
    return float(np.sum(slope ** 2 * measures[selected]))


def mesh_edges(mesh: Mesh) -> set:
    """셀의 모든 꼭짓점 쌍에서 모은 무방향 변 집합 (삼각형/사면체 공통)."""
    cells = mesh.cells.tolist()
    return {edge_key(u, w) for cell in cells for k, u in enumerate(cell) for w in cell[k + 1:]}


def segment_energy(field: ScalarField, a, b) -> float:
    """
    메쉬 변들로 이루어진 선분 a-b 위로 제한한 1차원 디리클레 에너지 Σ (Δf)²/길이.
    a, b 는 메쉬 꼭짓점이어야 하고, 선분 위 연속한 꼭짓점 쌍은 모두 메쉬 변이어야 합니다 (아니면 MeshError).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    v = b - a
    length = float(np.linalg.norm(v))
    if length == 0.0:
        raise ValueError("선분의 길이가 0입니다.")
    rel = field.mesh.vertices - a
    t = rel @ v / length ** 2
    offset = np.linalg.norm(rel - np.outer(t, v), axis=1)
    on_segment = (offset <= SEGMENT_TOLERANCE * length) & (t >= -SEGMENT_TOLERANCE) & (t <= 1.0 + SEGMENT_TOLERANCE)
    idx = np.flatnonzero(on_segment)
    idx = idx[np.argsort(t[idx], kind='stable')]
    if len(idx) < 2 or t[idx[0]] > SEGMENT_TOLERANCE or t[idx[-1]] < 1.0 - SEGMENT_TOLERANCE:
        raise ValueError("선분 양 끝이 메쉬 꼭짓점이 아닙니다.")
    values = field.coefficients[idx]
    steps = np.diff(t[idx]) * length
    keep = steps > 0.0
    edges = mesh_edges(field.mesh)
    for u, w in zip(idx[:-1][keep].tolist(), idx[1:][keep].tolist()):
        if edge_key(u, w) not in edges:
            raise MeshError(f"선분 위 꼭짓점 {u}-{w} 가 메쉬 변으로 이어져 있지 않습니다.")
    return float(np.sum(np.diff(values)[keep] ** 2 / steps[keep]))


def integrate(mesh: Mesh, fn: Callable[[np.ndarray], np.ndarray]) -> float:
    """∫ fn 를 2차 정확 규칙으로 계산합니다."""
    _, measures = cell_gradients(mesh)
    bary, weights = quadrature_rule(mesh.dim)
    corners = mesh.vertices[mesh.cells]
    total = np.zeros(len(mesh.cells))
    for lam, w in zip(bary, weights):
        total += w * np.asarray(fn(np.einsum('k,ekd->ed', lam, corners)), dtype=float)
    return float(np.sum(total * measures))
