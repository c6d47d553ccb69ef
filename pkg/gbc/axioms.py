"""
일반화 무게중심 좌표 공리 검사기 (GBC Axiom Checker)
- 비음수성, 선형 완전성, 닮음 변환 불변성, 단위 분할, 선형 정밀도, 크로네커 델타를
  각각 독립적으로 표본 점에서 측정합니다.
- 비음수성은 이산화 오차로 미세하게 깨질 수 있으므로 보고만 하고 판정에는 넣지 않습니다.
"""

from typing import Dict, List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, model_validator

from cdt.delaunay import constrained_delaunay
from gbc.coordinates import HarmonicCoordinateSet, harmonic_coordinates

# 기본 공리 판정 허용치
AXIOM_TOLERANCE = 1e-8
# 불변성 검사용 무작위 배율 범위
SCALE_RANGE = (0.5, 2.0)


class AxiomReport(BaseModel):
    """공리별 최대 위반 크기와 판정 결과"""
    non_negativity: float = Field(..., ge=0, description="GBC1: max(0, -min λ_i)")
    linear_completeness: float = Field(..., ge=0, description="GBC2: 기저 {1, x, y} 재현 오차")
    invariance: float = Field(..., ge=0, description="GBC3: 닮음 변환 후 재계산 값과의 차이")
    partition_of_unity: float = Field(..., ge=0, description="GBC4: max |Σλ_i - 1|")
    linear_precision: float = Field(..., ge=0, description="GBC5: max |Σ v_i λ_i - x|")
    kronecker_delta: float = Field(..., ge=0, description="GBC6: max |λ_i(v_j) - δ_ij|")
    tolerance: float = Field(AXIOM_TOLERANCE, gt=0, description="판정 허용치")
    n_samples: int = Field(..., ge=0, description="표본 점 수")

    @model_validator(mode='after')
    def report_undershoot(self) -> 'AxiomReport':
        if self.non_negativity > self.tolerance:
            logger.warning(f"GBC1 비음수성 위반 {self.non_negativity:.3e} (이산화 오차, 판정 제외)")
        return self

    def violations(self) -> Dict[str, float]:
        return {
            "GBC1": self.non_negativity,
            "GBC2": self.linear_completeness,
            "GBC3": self.invariance,
            "GBC4": self.partition_of_unity,
            "GBC5": self.linear_precision,
            "GBC6": self.kronecker_delta,
        }

    def failures(self, invariance_tolerance: float = 1e-6) -> List[str]:
        """허용치를 넘은 공리 이름 (GBC1 제외). 불변성은 별도 허용치로 판정합니다."""
        failed = []
        for name, value in self.violations().items():
            if name == "GBC1":
                continue
            limit = invariance_tolerance if name == "GBC3" else self.tolerance
            if value > limit:
                failed.append(name)
        return failed

    @property
    def passed(self) -> bool:
        return not self.failures()


def _random_similarity(rng: np.random.Generator):
    angle = rng.uniform(0.0, 2.0 * np.pi)
    scale = rng.uniform(*SCALE_RANGE)
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    return scale * rotation, rng.uniform(-1.0, 1.0, size=2)


def _vertex_rows(coords: HarmonicCoordinateSet) -> np.ndarray:
    """각 다각형 꼭짓점과 겹치는 메쉬 꼭짓점 인덱스."""
    mesh_points = coords.mesh.vertices
    rows = []
    for v in coords.domain.points:
        rows.append(int(np.argmin(np.linalg.norm(mesh_points - v, axis=1))))
    return np.asarray(rows)


def invariance_violation(coords: HarmonicCoordinateSet, samples: np.ndarray, seed: int = 0) -> float:
    """무작위 회전·평행이동·배율 변환한 다각형에서 다시 계산한 좌표와의 최대 차이."""
    rng = np.random.default_rng(seed)
    matrix, shift = _random_similarity(rng)
    moved = coords.domain.transformed(matrix, shift)

    original = constrained_delaunay(coords.domain).triangles
    recomputed = constrained_delaunay(moved).triangles
    if original.shape != recomputed.shape or np.any(original != recomputed):
        logger.warning("닮음 변환 후 CDT 가 달라졌습니다 (공원점 동률 처리 차이).")

    other = harmonic_coordinates(moved, level=coords.level, settings=coords.settings, threads=1)
    before = coords.evaluate(samples)
    after = other.evaluate(samples @ matrix.T + shift)
    diff = np.abs(before - after)
    if np.all(np.isnan(diff)):
        return float("inf")
    return float(np.nanmax(diff))


def axiom_check(coords: HarmonicCoordinateSet, samples: Optional[np.ndarray] = None,
                tol: float = AXIOM_TOLERANCE, seed: int = 0) -> AxiomReport:
    """
    표본 점에서 여섯 공리의 위반 크기를 측정합니다.
    samples 가 없으면 FEM 메쉬 꼭짓점을 사용합니다.
    """
    vertices = coords.domain.points
    if samples is None:
        samples = coords.mesh.vertices
        lam = coords.matrix.T
    else:
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        lam = coords.evaluate(samples)
        keep = ~np.any(np.isnan(lam), axis=1)
        if not np.all(keep):
            logger.warning(f"다각형 밖 표본 {int(np.sum(~keep))}개를 제외합니다.")
        samples, lam = samples[keep], lam[keep]

    # GBC2: 기저 {1, x, y} 각각의 재현 오차
    basis_at_vertices = np.column_stack([np.ones(len(vertices)), vertices])
    basis_at_samples = np.column_stack([np.ones(len(samples)), samples])
    completeness = np.abs(lam @ basis_at_vertices - basis_at_samples)

    rows = _vertex_rows(coords)
    delta = np.abs(coords.matrix[:, rows] - np.eye(len(vertices)))

    report = AxiomReport(
        non_negativity=max(0.0, -float(lam.min())) if lam.size else 0.0,
        linear_completeness=float(completeness.max()) if completeness.size else 0.0,
        invariance=invariance_violation(coords, samples, seed),
        partition_of_unity=float(np.abs(lam.sum(axis=1) - 1.0).max()) if lam.size else 0.0,
        linear_precision=float(np.linalg.norm(lam @ vertices - samples, axis=1).max()) if lam.size else 0.0,
        kronecker_delta=float(delta.max()),
        tolerance=tol,
        n_samples=len(samples),
    )
    logger.debug(f"공리 검사 완료: {report.violations()}")
    return report
