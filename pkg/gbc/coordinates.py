"""
조화 좌표와 보간 (Harmonic & Triangulation Coordinates)
- 조화 좌표 λ_i: 다각형의 CDT 를 균일 세분한 메쉬 위에서 모자 경계 데이터의 이산 조화 확장입니다.
- 조화 보간 I_P u: 꼭짓점 값의 경계 자취 g_u 에 대한 한 번의 디리클레 풀이입니다.
- 삼각분할 보간 I_T u: 보조 꼭짓점 없는 삼각분할 위의 조각별 선형 함수입니다.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from cdt.delaunay import constrained_delaunay
from cdt.mesh import MeshError, TriMesh
from fem.field import PointLocator, ScalarField
from fem.mesh import Mesh
from fem.refine import refine_uniform, refine_with_values
from fem.solver import DEFAULT_TOL, DirichletSolver, SolverSettings
from gbc.boundary import boundary_hat, boundary_trace
from geometry.shapes import Polygon, Polyhedron

# 2차원 기본 세분 단계
DEFAULT_LEVEL_2D = 5


def worker_count(threads: Optional[int] = None) -> int:
    """좌표 풀이에 사용할 스레드 수. 인자가 없으면 1 (상한은 호출하는 쪽 설정에서 넘깁니다)."""
    if threads is None:
        threads = 1
    if threads < 1:
        raise ValueError(f"스레드 수는 1 이상이어야 합니다: {threads}")
    return threads


def coordinate_mesh(polygon: Polygon, level: int = DEFAULT_LEVEL_2D) -> TriMesh:
    """다각형 CDT 를 level 번 균일 세분한 FEM 메쉬."""
    return refine_uniform(constrained_delaunay(polygon), level)


@dataclass(frozen=True, eq=False)
class HarmonicCoordinateSet:
    """다각형 꼭짓점마다 하나씩의 이산 조화 좌표 함수."""
    domain: Polygon
    fields: Tuple[ScalarField, ...]
    level: int = DEFAULT_LEVEL_2D
    settings: Optional[SolverSettings] = None

    @property
    def mesh(self) -> Mesh:
        return self.fields[0].mesh

    def __len__(self) -> int:
        return len(self.fields)

    def __getitem__(self, i: int) -> ScalarField:
        return self.fields[i]

    @cached_property
    def matrix(self) -> np.ndarray:
        """(좌표 수, 메쉬 꼭짓점 수) 계수 행렬."""
        result = np.vstack([f.coefficients for f in self.fields])
        result.setflags(write=False)
        return result

    @cached_property
    def locator(self) -> PointLocator:
        return PointLocator(self.mesh)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """(점 수, 좌표 수) 배열. 영역 밖의 점은 NaN 입니다."""
        cells, bary = self.locator.locate(points)
        out = np.full((len(cells), len(self.fields)), np.nan)
        inside = cells >= 0
        nodes = self.mesh.cells[cells[inside]]
        out[inside] = np.einsum('nk,cnk->nc', bary[inside], self.matrix[:, nodes])
        return out

    def interpolate(self, values: Sequence[float]) -> ScalarField:
        """Σ values_i·λ_i."""
        values = np.asarray(values, dtype=float)
        return ScalarField(mesh=self.mesh, coefficients=values @ self.matrix)


def harmonic_coordinates(polygon: Polygon, level: int = DEFAULT_LEVEL_2D, tol: float = DEFAULT_TOL,
                         settings: Optional[SolverSettings] = None, threads: Optional[int] = None,
                         mesh: Optional[Mesh] = None) -> HarmonicCoordinateSet:
    """다각형의 조화 좌표를 계산합니다. 좌표별 풀이는 서로 독립이라 스레드 풀에서 실행됩니다."""
    mesh = mesh if mesh is not None else coordinate_mesh(polygon, level)
    settings = settings or SolverSettings(tol=tol)
    solver = DirichletSolver(mesh, settings=settings)
    hats = [boundary_hat(polygon, i, mesh) for i in range(polygon.n_vertices)]

    workers = min(worker_count(threads), len(hats))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fields = tuple(pool.map(solver.solve, hats))
    else:
        fields = tuple(solver.solve(h) for h in hats)

    logger.debug(f"조화 좌표 {len(fields)}개 계산 완료 (꼭짓점 {mesh.n_vertices}개, 스레드 {workers})")
    return HarmonicCoordinateSet(domain=polygon, fields=fields, level=level, settings=settings)


def harmonic_interpolant(domain, values: Sequence[float], level: int = DEFAULT_LEVEL_2D, tol: float = DEFAULT_TOL,
                         settings: Optional[SolverSettings] = None, mesh: Optional[Mesh] = None) -> ScalarField:
    """
    꼭짓점 값의 조각별 선형 경계 자취를 조화 확장한 보간 함수.
    다면체는 메쉬를 직접 넘겨야 합니다 (일반 3차원 메쉬 생성은 지원하지 않음).
    """
    if mesh is None:
        if isinstance(domain, Polyhedron):
            raise ValueError("다면체의 조화 보간에는 사면체 메쉬가 필요합니다.")
        mesh = coordinate_mesh(domain, level)
    data = boundary_trace(domain, values, mesh)
    solver = DirichletSolver(mesh, data.indices, settings or SolverSettings(tol=tol))
    return solver.solve(data)


def triangulation_interpolant(mesh: TriMesh, values: Sequence[float], level: int = 0) -> ScalarField:
    """
    보조 꼭짓점 없는 삼각분할 위의 조각별 선형 보간.
    level > 0 이면 같은 함수를 세분 메쉬 위로 옮겨 FEM 공간의 원소로 돌려줍니다.
    """
    values = np.asarray(values, dtype=float).ravel()
    if len(values) != mesh.n_vertices:
        raise MeshError(
            f"삼각분할에 다각형 꼭짓점 외의 보조 꼭짓점이 있습니다 (꼭짓점 {mesh.n_vertices}개, 값 {len(values)}개)."
        )
    fine, coefficients = refine_with_values(mesh, values, level)
    return ScalarField(mesh=fine, coefficients=coefficients)
