"""
이산 디리클레 원리 비교기 (Dirichlet Comparator)
- 조화 보간은 같은 경계 계수를 갖는 모든 FEM 함수 중 H¹ 에너지가 최소입니다.
- CDT 를 세분한 메쉬에서는 CDT 보간도 같은 FEM 공간에 있으므로 두 에너지를 직접 비교할 수 있습니다.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from cdt.delaunay import constrained_delaunay
from cdt.mesh import TriMesh
from fem.field import ScalarField
from fem.functions import TestFunction
from fem.norms import h1_error_seminorm, h1_seminorm
from fem.solver import DEFAULT_TOL, SolverSettings
from gbc.coordinates import DEFAULT_LEVEL_2D, harmonic_interpolant, triangulation_interpolant
from geometry.shapes import Polygon

# 무작위 교란 크기 (꼭짓점 값 범위 대비)
PERTURBATION_SCALE = 0.1


@dataclass(frozen=True)
class EnergyComparison:
    """같은 FEM 메쉬 위의 조화 보간과 CDT 보간 비교 결과 (에너지는 제곱 세미노름)."""
    harmonic_energy: float
    triangulation_energy: float
    harmonic_error: float
    triangulation_error: float

    @property
    def minimality_gap(self) -> float:
        """CDT 에너지 - 조화 에너지. 이산 최소성에 의해 음수가 아니어야 합니다."""
        return self.triangulation_energy - self.harmonic_energy


def _fine_pair(polygon: Polygon, u: TestFunction, level: int, settings: SolverSettings
               ) -> Tuple[ScalarField, ScalarField]:
    values = u(polygon.points)
    cdt_field = triangulation_interpolant(constrained_delaunay(polygon), values, level)
    harmonic = harmonic_interpolant(polygon, values, settings=settings, mesh=cdt_field.mesh)
    return harmonic, cdt_field


def dirichlet_compare(polygon: Polygon, u: TestFunction, level: int = DEFAULT_LEVEL_2D,
                      tol: float = DEFAULT_TOL, settings: Optional[SolverSettings] = None) -> EnergyComparison:
    settings = settings or SolverSettings(tol=tol)
    harmonic, cdt_field = _fine_pair(polygon, u, level, settings)
    result = EnergyComparison(
        harmonic_energy=h1_seminorm(harmonic) ** 2,
        triangulation_energy=h1_seminorm(cdt_field) ** 2,
        harmonic_error=h1_error_seminorm(harmonic, u),
        triangulation_error=h1_error_seminorm(cdt_field, u),
    )
    if result.minimality_gap < -1e-10:
        logger.warning(f"디리클레 최소성 위반: 조화 {result.harmonic_energy:.12g} > CDT {result.triangulation_energy:.12g}")
    return result


def perturbation_energies(polygon: Polygon, u: TestFunction, level: int = DEFAULT_LEVEL_2D, count: int = 10,
                          seed: int = 0, scale: float = PERTURBATION_SCALE) -> np.ndarray:
    """CDT 보간의 내부 계수만 무작위로 흔든 함수들의 H¹ 에너지 (경계 계수는 그대로)."""
    values = u(polygon.points)
    base = triangulation_interpolant(constrained_delaunay(polygon), values, level)
    interior = np.setdiff1d(np.arange(base.mesh.n_vertices), base.mesh.boundary_vertices())
    amplitude = scale * max(float(np.ptp(values)), 1.0)
    rng = np.random.default_rng(seed)
    energies = np.empty(count)
    for k in range(count):
        coefficients = base.coefficients.copy()
        coefficients[interior] += amplitude * rng.standard_normal(len(interior))
        energies[k] = h1_seminorm(base.with_coefficients(coefficients)) ** 2
    return energies


def near_straight_quadrilateral(delta: float) -> Tuple[Polygon, TriMesh, TriMesh]:
    """
    (-1,0), (0,-δ), (1,0), (0,1) 사각형과 두 삼각분할을 반환합니다.
    bad 는 거의 180° 인 각을 가로지르는 대각선 (-1,0)-(1,0), good 은 CDT 대각선 (0,-δ)-(0,1) 입니다.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"δ 는 (0, 1) 범위여야 합니다: {delta}")
    polygon = Polygon(vertices=[(-1.0, 0.0), (0.0, -delta), (1.0, 0.0), (0.0, 1.0)])
    boundary = frozenset(polygon.edges())
    bad = TriMesh(vertices=polygon.points, triangles=[(0, 1, 2), (0, 2, 3)], constrained_edges=boundary)
    good = TriMesh(vertices=polygon.points, triangles=[(0, 1, 3), (1, 2, 3)], constrained_edges=boundary)
    return polygon, bad, good


def compare_quadrilateral_triangulations(delta: float, u: Optional[TestFunction] = None,
                                         level: int = 0) -> Tuple[float, float]:
    """(bad 삼각분할 보간 오차, good 삼각분할 보간 오차) H¹ 세미노름."""
    u = u or TestFunction.x_squared()
    polygon, bad, good = near_straight_quadrilateral(delta)
    values = u(polygon.points)
    bad_error = h1_error_seminorm(triangulation_interpolant(bad, values, level), u)
    good_error = h1_error_seminorm(triangulation_interpolant(good, values, level), u)
    return bad_error, good_error
