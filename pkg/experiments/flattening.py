"""
오목 예제의 경계 평탄화와 반쪽 영역 대칭 (Flattening & Half-domain Symmetry)
- 원점 중심의 회전 좌표 x̂ = (x - 2y)/√5, ŷ = (2x + y)/√5 에서 Q_ε 경계를 b(x̂) 로 씁니다.
  세 조각의 기울기 {2, 1/2, |(3-ε)/(2ε-1)|} 는 ε < 1/4 에서 11/2 미만으로 균일하게 유계입니다.
- P_ε 의 x ≥ 0 쪽 절반 Q_ε 에서 x = 0 위를 자연 경계로 둔 풀이의 에너지는
  대칭 메쉬 위 P_ε 조화 보간 에너지의 정확히 절반입니다.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from cdt.delaunay import constrained_delaunay
from cdt.mesh import TriMesh, edge_key
from experiments.families import FamilyParameterError, nonconvex2d_polygon
from fem.functions import TestFunction
from fem.norms import h1_seminorm
from fem.solver import BoundaryData, DirichletSolver, SolverSettings
from gbc.boundary import boundary_trace, trace_values
from gbc.coordinates import DEFAULT_LEVEL_2D, harmonic_interpolant, triangulation_interpolant
from geometry.shapes import Polygon

# 평탄화 정리가 성립하는 ε 상한과 기울기 상한
FLATTENING_MAX_EPS = 0.25
SLOPE_CEILING = 5.5


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < FLATTENING_MAX_EPS:
        raise FamilyParameterError(f"평탄화 검사는 0 < ε < 1/4 에서만 정의됩니다: {eps}")


def flattening_slopes(eps: float) -> np.ndarray:
    _check_eps(eps)
    return np.array([2.0, 0.5, abs((3.0 - eps) / (2.0 * eps - 1.0))])


def flattening_map(eps: float, x_hat: Sequence[float]) -> np.ndarray:
    """원점 패치에서 Q_ε 경계의 높이 함수 b(x̂)."""
    _check_eps(eps)
    x = np.asarray(x_hat, dtype=float)
    knee = -2.0 / np.sqrt(5.0) * eps
    far = (3.0 - eps) / (2.0 * eps - 1.0) * x + np.sqrt(5.0) * eps / (2.0 * eps - 1.0)
    return np.where(x > 0.0, 2.0 * x, np.where(x >= knee, -0.5 * x, far))


def flattening_check(eps: float, samples: Optional[Sequence[float]] = None) -> float:
    """
    sup |b'| 를 돌려줍니다. samples 가 주어지면 그 점들 사이 차분 기울기도 포함합니다
    (조각 경계를 가로지르는 차분은 두 기울기 사이 값이므로 상한을 넘지 않습니다).
    """
    sup = float(flattening_slopes(eps).max())
    if samples is not None and len(samples) > 1:
        x = np.sort(np.asarray(samples, dtype=float))
        y = flattening_map(eps, x)
        steps = np.diff(x)
        keep = steps > 0
        if np.any(keep):
            sup = max(sup, float(np.max(np.abs(np.diff(y)[keep] / steps[keep]))))
    return sup


def half_polygon(eps: float) -> Polygon:
    """Q_ε: (0,0), (1,0), (1,1), (0,ε)."""
    return Polygon(vertices=[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, eps)])


def mirrored_mesh(half: TriMesh) -> TriMesh:
    """x = 0 에 대한 거울상을 붙여 대칭 메쉬를 만듭니다. x = 0 위 꼭짓점은 공유합니다."""
    vertices = half.vertices
    on_axis = vertices[:, 0] == 0.0
    n = len(vertices)
    mirror_index = np.where(on_axis, np.arange(n), n + np.cumsum(~on_axis) - 1)
    mirrored = vertices[~on_axis] * np.array([-1.0, 1.0])
    all_vertices = np.vstack([vertices, mirrored])
    # 거울상은 방향이 뒤집히므로 두 꼭짓점을 바꿉니다
    flipped = mirror_index[half.triangles][:, [0, 2, 1]]
    triangles = np.vstack([half.triangles, flipped])
    edges = {}
    for tri in triangles.tolist():
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = edge_key(a, b)
            edges[key] = edges.get(key, 0) + 1
    boundary = frozenset(k for k, count in edges.items() if count == 1)
    return TriMesh(vertices=all_vertices, triangles=triangles, constrained_edges=boundary)


@dataclass(frozen=True)
class HalfDomainReport:
    """전체 에너지, 자연 경계 반쪽 에너지, 반쪽 비교 함수(CDT 보간) 에너지. 모두 제곱 세미노름."""
    full_energy: float
    half_energy: float
    competitor_energy: float

    @property
    def symmetry_gap(self) -> float:
        return abs(self.full_energy - 2.0 * self.half_energy)

    @property
    def minimality_gap(self) -> float:
        return self.competitor_energy - self.half_energy


def half_domain_symmetry(eps: float, level: int = DEFAULT_LEVEL_2D, u: Optional[TestFunction] = None,
                         settings: Optional[SolverSettings] = None) -> HalfDomainReport:
    """축소 전 좌표의 P_ε 와 Q_ε 에서 대칭 관계와 반쪽 디리클레 최소성을 확인합니다."""
    if not 0.0 < eps < 1.0:
        raise FamilyParameterError(f"ε 는 (0, 1) 범위여야 합니다: {eps}")
    u = u or TestFunction.x_squared()
    settings = settings or SolverSettings()
    full_polygon = nonconvex2d_polygon(eps, scaled=False)
    half = half_polygon(eps)

    # Q_ε 꼭짓점 값은 P_ε 경계 자취 g 의 값 (원점은 P_ε 밑변 위의 점)
    full_values = u(full_polygon.points)
    corner_values = trace_values(full_polygon, full_values, half.points)
    competitor = triangulation_interpolant(constrained_delaunay(half), corner_values, level)
    mesh = competitor.mesh
    full_field = harmonic_interpolant(full_polygon, full_values, settings=settings, mesh=mirrored_mesh(mesh))

    data = boundary_trace(half, corner_values, mesh)
    pts = mesh.vertices[data.indices]
    free = (pts[:, 0] == 0.0) & (pts[:, 1] > 0.0) & (pts[:, 1] < eps)
    dirichlet = BoundaryData(indices=data.indices[~free], values=data.values[~free])
    solver = DirichletSolver(mesh, dirichlet.indices, settings, natural_boundary=True)
    half_field = solver.solve(dirichlet)

    return HalfDomainReport(
        full_energy=h1_seminorm(full_field) ** 2,
        half_energy=h1_seminorm(half_field) ** 2,
        competitor_energy=h1_seminorm(competitor) ** 2,
    )
