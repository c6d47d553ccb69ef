"""
무작위 검증 스위트 (Randomized Verifier Suites)
- walk: 무작위 단순 다각형의 CDT 에서 경계 보행 성질
- adjacent: 무작위 점 집합 들로네 메쉬의 인접 외접원 반지름 성질 (+ 뒤집힌 메쉬 반례 확인)
- tetquality: 사면체 종횡비 상한의 유한성과 재현성
- flattening: ε ∈ (0, 1/4) 격자에서 평탄화 기울기 상한
- classP: 유계 종횡비 볼록 다면체 클래스의 개수/오일러 관계
모든 스위트는 시드가 고정된 numpy Generator 로 결정적으로 동작합니다.
"""

import math
from typing import Callable, Dict, List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from cdt.delaunay import constrained_delaunay, delaunay, flip_edge
from cdt.mesh import TriMesh
from cdt.quality import verify_adjacent_circumradius, verify_walk_lemma
from experiments.class_p import class_P_check
from experiments.flattening import FLATTENING_MAX_EPS, SLOPE_CEILING, flattening_check
from experiments.random_domains import (
    random_convex_polygon, random_convex_polyhedron, random_delaunay_mesh, random_star_polygon, regular_octahedron,
)
from experiments.tet_sampler import tet_quality_sample

SUITES = ("walk", "adjacent", "tetquality", "flattening", "classP")

# 스위트별 기본 사례 수
DEFAULT_CASES = {
    "walk": 500,
    "adjacent": 1000,
    "tetquality": 10_000,  # 사면체 표본 수
    "flattening": 100,
    "classP": 50,
}

# 사면체 품질 스위트 매개변수
TET_R_STAR = 0.2
TET_H_STAR = 0.2
# 클래스 검사 기준 γ*
CLASS_GAMMA_STAR = 10.0
# 반례로 남길 최대 개수
MAX_COUNTEREXAMPLES = 10


class SuiteResult(BaseModel):
    """검증 스위트 실행 결과"""
    name: str = Field(..., description="스위트 이름")
    cases: int = Field(0, ge=0, description="검사한 사례 수")
    failures: int = Field(0, ge=0, description="반례 수")
    counterexamples: List[str] = Field(default_factory=list, description="반례 설명 (최대 10개)")

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, description: str) -> None:
        self.cases += 1
        if ok:
            logger.debug(f"[{self.name}] #{self.cases} 통과: {description}")
            return
        self.failures += 1
        logger.error(f"[{self.name}] #{self.cases} 반례: {description}")
        if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
            self.counterexamples.append(description)


def flipped_counterexample_mesh() -> TriMesh:
    """
    들로네 삼각분할에서 변 (2, 3) 을 뒤집어 만든 비들로네 메쉬.
    둔각 삼각형 (−1,0),(1,0),(0,0.2) 의 외접원 반지름 2.6 이 이웃의 5/3 보다 큽니다.
    """
    points = np.array([(-1.0, 0.0), (1.0, 0.0), (0.0, 0.2), (0.0, -3.0)])
    return flip_edge(delaunay(points), (2, 3))


def walk_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    result = SuiteResult(name="walk")
    for k in range(cases):
        n = int(rng.integers(4, 13))
        polygon = random_star_polygon(rng, n) if k % 2 == 0 else random_convex_polygon(rng, n)
        check = verify_walk_lemma(constrained_delaunay(polygon), polygon)
        result.record(check.ok, f"다각형 {polygon.n_vertices}각형, {check.detail or 'ok'}"
                      if check.ok else f"{polygon.points.tolist()} 삼각형 {check.counterexample}")
    return result


def adjacent_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    result = SuiteResult(name="adjacent")
    for _ in range(cases):
        n = int(rng.integers(4, 41))
        mesh = random_delaunay_mesh(rng, n)
        check = verify_adjacent_circumradius(mesh)
        result.record(check.ok, f"점 {n}개" if check.ok
                      else f"점 {n}개, 삼각형 쌍 {check.counterexample}: {check.detail}")

    # 뒤집힌 메쉬에서는 반드시 거짓이어야 합니다
    check = verify_adjacent_circumradius(flipped_counterexample_mesh())
    result.record(not check.ok, "뒤집힌 메쉬에서 거짓 판정" if not check.ok
                  else "뒤집힌 비들로네 메쉬를 참으로 판정함")
    return result


def tetquality_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    result = SuiteResult(name="tetquality")
    seed = int(rng.integers(0, 2 ** 31))
    first = tet_quality_sample(TET_R_STAR, TET_H_STAR, cases, seed=seed)
    result.record(math.isfinite(first), f"r*=h*={TET_R_STAR}, n={cases}, 최대 종횡비 {first:.6g}")
    second = tet_quality_sample(TET_R_STAR, TET_H_STAR, cases, seed=seed)
    result.record(first == second, f"같은 시드 재실행: {first!r} vs {second!r}")
    return result


def flattening_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    result = SuiteResult(name="flattening")
    grid = np.linspace(0.0, FLATTENING_MAX_EPS, cases + 2)[1:-1]
    for eps in grid.tolist():
        samples = rng.uniform(-1.0, 1.0, size=64)
        sup = flattening_check(eps, samples)
        result.record(sup < SLOPE_CEILING, f"ε={eps:.6g}: sup|b'|={sup:.6g}")
    return result


def classP_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    """
    정팔면체는 γ*=10 에서 구성원이어야 하고,
    무작위 볼록 다면체 중 구성원은 개수 상한과 오일러 관계를 만족해야 합니다.
    """
    result = SuiteResult(name="classP")
    octahedron = class_P_check(regular_octahedron(), CLASS_GAMMA_STAR)
    result.record(octahedron.member and octahedron.counts_ok and octahedron.euler_ok,
                  f"정팔면체: member={octahedron.member}, γ={octahedron.gamma:.6g}, "
                  f"면 {octahedron.n_faces} / 꼭짓점 {octahedron.n_vertices} < n*={octahedron.n_star:.6g}")
    members = 0
    for _ in range(max(cases - 1, 0)):
        n = int(rng.integers(6, 21))
        membership = class_P_check(random_convex_polyhedron(rng, n), CLASS_GAMMA_STAR)
        if not membership.member:
            result.record(True, f"점 {n}개 비구성원: {'; '.join(membership.reasons)}")
            continue
        members += 1
        result.record(membership.counts_ok and membership.euler_ok,
                      f"점 {n}개 구성원: 면 {membership.n_faces}, 꼭짓점 {membership.n_vertices}, "
                      f"euler_ok={membership.euler_ok}")
    logger.info(f"[classP] 무작위 다면체 중 구성원 {members}개")
    return result


SUITE_RUNNERS: Dict[str, Callable[[np.random.Generator, int], SuiteResult]] = {
    "walk": walk_suite,
    "adjacent": adjacent_suite,
    "tetquality": tetquality_suite,
    "flattening": flattening_suite,
    "classP": classP_suite,
}


def run_suite(name: str, seed: int = 0, cases: Optional[int] = None) -> SuiteResult:
    """이름으로 스위트를 실행합니다. 모르는 이름이면 ValueError."""
    if name not in SUITE_RUNNERS:
        raise ValueError(f"알 수 없는 스위트: {name} (가능: {', '.join(SUITES)}, all)")
    cases = DEFAULT_CASES[name] if cases is None else cases
    if cases < 1:
        raise ValueError(f"사례 수는 1 이상이어야 합니다: {cases}")

    logger.info("=" * 60)
    logger.info(f"검증 스위트 '{name}' 시작 (사례 {cases}, 시드 {seed})")
    logger.info("=" * 60)
    result = SUITE_RUNNERS[name](np.random.default_rng(seed), cases)
    if result.passed:
        logger.success(f"[{name}] {result.cases}개 사례 모두 통과")
    else:
        logger.error(f"[{name}] {result.cases}개 중 반례 {result.failures}개")
    return result


def run_all(seed: int = 0, cases: Optional[int] = None) -> List[SuiteResult]:
    results = [run_suite(name, seed=seed, cases=cases) for name in SUITES]
    logger.info("=" * 60)
    logger.info("검증 스위트 요약")
    logger.info("-" * 60)
    for result in results:
        logger.info(f"{result.name:<12} 사례 {result.cases:>6}  반례 {result.failures}")
    logger.info("=" * 60)
    return results
