"""
계열 실행기 (Family Runner)
- 매개변수마다 영역 생성 → 메쉬 → 조화 보간 → 오차/세미노름/하한/방향 에너지 계산을 수행합니다.
- 한 행의 실패는 기록만 하고 계열 전체를 중단하지 않습니다.
- 행들은 서로 독립이라 스레드 풀에서 계산하되, 결과는 매개변수 순서대로 모읍니다.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, model_validator

from cdt.delaunay import constrained_delaunay
from cdt.mesh import MeshError
from cdt.quality import quality_report
from experiments.bounds import (
    RECORDED_H1_SQUARED_P1, RECORDED_H2_SQUARED_P0, NoLowerBoundError, convex2d_exact_error_squared,
    convex3d_exact_error_squared, nonconvex2d_exact_h2_squared, paper_lower_bound,
)
from experiments.families import FamilyInstance, FamilyKind, FamilyParameterError, FamilySpec, generate
from experiments.meshes3d import competitor_field, family_mesh
from fem.functions import TestFunction
from fem.norms import directional_energy, h1_error_seminorm, h1_seminorm, h2_seminorm_analytic
from fem.solver import DEFAULT_TOL, SolverError, SolverSettings
from gbc.coordinates import DEFAULT_LEVEL_2D, coordinate_mesh, harmonic_interpolant, worker_count
from geometry.metrics import GeometryError

# 하한 비교 여유 (FEM 이산화 오차)
BOUND_SLACK = 1e-6

# 3차원 기본 세분 단계
DEFAULT_LEVEL_3D = 3

NAN = float("nan")


class ExperimentRow(BaseModel):
    """계열 매개변수 하나에 대한 측정 결과 (실패 행은 수치가 NaN 이고 error 가 채워집니다)."""
    family: str = Field(..., description="계열 이름")
    param: float = Field(..., description="h, d 또는 ε")
    dist: float = Field(NAN, description="표시된 꼭짓점과 변/면 사이 거리")
    h1_error: float = Field(NAN, description="|u - I u|_{H¹}")
    h2_seminorm: float = Field(NAN, description="|u|_{H²}")
    ratio: float = Field(NAN, description="|u - I u|_{H¹} / |u|_{H²}")
    paper_bound: float = Field(NAN, description="오차 제곱의 닫힌 형태 하한")
    max_circumradius: float = Field(NAN, description="CDT 의 R_* (2차원만)")
    squared_ratio: float = Field(NAN, description="|u - I u|²_{H¹} / |u|_{H²}")
    directional_energy: float = Field(NAN, description="하한 증명에 쓰이는 영역의 방향 에너지")
    competitor_energy: float = Field(NAN, description="명시적 비교 함수의 H¹ 에너지 (nonconvex3d)")
    exact_error_squared: float = Field(NAN, description="해석적 오차 제곱 (볼록 계열, 기본 시험 함수)")
    recorded_area_constant: float = Field(NAN, description="기록된 |u|²_{H²(P_0)} 상수 (nonconvex2d)")
    recorded_p1_constant: float = Field(NAN, description="기록된 |u|²_{H¹(P_1)} 상수 (nonconvex2d)")
    exact_area_constant: float = Field(NAN, description="축소 전 P_ε 의 정확한 |u|²_{H²} = 4(1 + ε) (nonconvex2d)")
    error: Optional[str] = Field(None, description="실패 사유")

    @model_validator(mode='after')
    def check_non_negative(self) -> 'ExperimentRow':
        for name in ("dist", "h1_error", "h2_seminorm", "ratio", "paper_bound"):
            value = getattr(self, name)
            if math.isfinite(value) and value < 0:
                logger.warning(f"{self.family}({self.param}): {name} 가 음수입니다 ({value})")
        return self

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def error_squared(self) -> float:
        return self.h1_error ** 2

    @property
    def bound_satisfied(self) -> bool:
        if not math.isfinite(self.paper_bound):
            return True
        return self.error_squared >= self.paper_bound - BOUND_SLACK


@dataclass
class FamilyStats:
    """계열 실행 통계"""
    total_rows: int = 0
    failed_rows: int = 0
    bound_violations: int = 0

    def to_dict(self) -> dict:
        return {
            'total_rows': self.total_rows,
            'failed_rows': self.failed_rows,
            'bound_violations': self.bound_violations,
        }

    def print_summary(self, family: str):
        logger.info("=" * 60)
        logger.info(f"{family} 계열 실행 리포트")
        logger.info("-" * 60)
        logger.info(f"처리 행: {self.total_rows}개 (실패: {self.failed_rows}개)")
        logger.info(f"하한 위반: {self.bound_violations}개")
        logger.info("=" * 60)


def _is_default(u: TestFunction, default: TestFunction) -> bool:
    return (np.array_equal(u.quadratic, default.quadratic) and not np.any(u.linear)
            and u.constant == 0.0)


class FamilyRunner:
    """
    계열 실행을 지휘하는 클래스입니다.
    세분 단계를 주지 않으면 차원별 기본값, 2차원은 level_2d / 3차원은 level_3d 를 씁니다.
    """

    def __init__(self, level: Optional[int] = None, tol: Optional[float] = None,
                 solver: Optional[SolverSettings] = None, threads: Optional[int] = None,
                 level_2d: int = DEFAULT_LEVEL_2D, level_3d: int = DEFAULT_LEVEL_3D):
        self.level = level
        self.level_2d = level_2d
        self.level_3d = level_3d
        self.solver = solver or SolverSettings(tol=tol or DEFAULT_TOL)
        self.threads = threads
        self.stats = FamilyStats()

    def _level(self, kind: FamilyKind) -> int:
        if self.level is not None:
            return self.level
        return self.level_2d if kind.dim == 2 else self.level_3d

    def measure(self, instance: FamilyInstance, u: TestFunction) -> ExperimentRow:
        """인스턴스 하나를 풀고 측정합니다."""
        kind = instance.kind
        level = self._level(kind)
        domain = instance.domain
        values = u(domain.points)
        extras = {}

        if kind.dim == 2:
            mesh = coordinate_mesh(domain, level)
            extras['max_circumradius'] = quality_report(constrained_delaunay(domain), domain).max_circumradius
        else:
            mesh = family_mesh(instance, level)
        field = harmonic_interpolant(domain, values, settings=self.solver, mesh=mesh)

        error = h1_error_seminorm(field, u)
        h2 = h2_seminorm_analytic(u, domain)
        try:
            extras['paper_bound'] = paper_lower_bound(instance)
        except NoLowerBoundError:
            pass
        if instance.probe is not None:
            extras['directional_energy'] = directional_energy(field, instance.probe.direction, instance.probe.region)
        if kind is FamilyKind.NONCONVEX3D:
            extras['competitor_energy'] = h1_seminorm(competitor_field(instance, mesh, u)) ** 2
        if kind is FamilyKind.NONCONVEX2D:
            extras['recorded_area_constant'] = RECORDED_H2_SQUARED_P0
            extras['recorded_p1_constant'] = RECORDED_H1_SQUARED_P1
            extras['exact_area_constant'] = nonconvex2d_exact_h2_squared(instance.param)
        if kind is FamilyKind.CONVEX2D and _is_default(u, TestFunction.x_squared()):
            extras['exact_error_squared'] = convex2d_exact_error_squared(instance.param)
        if kind is FamilyKind.CONVEX3D and _is_default(u, TestFunction.radial_squared()):
            extras['exact_error_squared'] = convex3d_exact_error_squared(instance.param)

        return ExperimentRow(
            family=kind.value,
            param=instance.param,
            dist=instance.dist,
            h1_error=error,
            h2_seminorm=h2,
            ratio=error / h2,
            squared_ratio=error ** 2 / h2,
            **extras,
        )

    def _run_one(self, kind: FamilyKind, param: float, u: TestFunction) -> ExperimentRow:
        try:
            return self.measure(generate(kind, param), u)
        except (FamilyParameterError, SolverError, GeometryError, MeshError, ValueError) as e:
            logger.error(f"{kind.value}({param}) 실패: {e}")
            return ExperimentRow(family=kind.value, param=param, error=str(e))

    def run(self, spec: FamilySpec) -> List[ExperimentRow]:
        logger.info("=" * 60)
        logger.info(f"{spec.kind.value} 계열 실행 시작 (매개변수 {len(spec.params)}개, 세분 {self._level(spec.kind)}단계)")
        logger.info("=" * 60)
        self.stats = FamilyStats()

        workers = min(worker_count(self.threads), len(spec.params))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(lambda p: self._run_one(spec.kind, p, spec.u), spec.params))
        else:
            rows = [self._run_one(spec.kind, p, spec.u) for p in spec.params]

        for idx, row in enumerate(rows, 1):
            self.stats.total_rows += 1
            if row.failed:
                self.stats.failed_rows += 1
                continue
            if not row.bound_satisfied:
                self.stats.bound_violations += 1
                logger.warning(f"{row.family}({row.param}): 오차 제곱 {row.error_squared:.6g} < 하한 {row.paper_bound:.6g}")
            logger.success(
                f"[{idx}/{len(rows)}] {row.family}({row.param:g}) dist={row.dist:.6g} "
                f"error={row.h1_error:.6g} ratio={row.ratio:.6g}"
            )
        self.stats.print_summary(spec.kind.value)
        return rows


def run_family(spec: FamilySpec, level: Optional[int] = None, tol: Optional[float] = None,
               threads: Optional[int] = None, solver: Optional[SolverSettings] = None,
               level_2d: int = DEFAULT_LEVEL_2D, level_3d: int = DEFAULT_LEVEL_3D) -> List[ExperimentRow]:
    """FamilyRunner 를 만들어 계열 하나를 실행합니다."""
    runner = FamilyRunner(level=level, tol=tol, solver=solver, threads=threads, level_2d=level_2d, level_3d=level_3d)
    return runner.run(spec)
