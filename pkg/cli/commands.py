"""
명령 구현 (Commands)
- coords: 조화 좌표를 격자에서 표본 추출해 CSV 로, 공리 보고서를 JSON 으로 저장
- audit: CDT 품질 보고서와 경계 보행 성질 판정을 JSON 으로 출력
- family: 계열 실행 결과를 CSV/JSON 으로 저장하고 기울기 요약을 출력
- verify: 무작위 검증 스위트 실행
표준 출력에는 결과(JSON, 요약 줄)만 쓰고 진행 로그는 loguru 로 표준 에러에 씁니다.
각 명령은 종료 코드를 돌려주고, 예외를 종료 코드로 바꾸는 일은 main.py 가 맡습니다.
"""

import json
from pathlib import Path
from typing import Optional, Union

import numpy as np
from loguru import logger

from cdt.delaunay import constrained_delaunay
from cdt.quality import quality_report, verify_walk_lemma
from cli.domain_file import DomainFileError, load_domain
from cli.settings import get_settings
from cli.storage import save_grid_csv, save_json, save_rows_csv, save_rows_json
from experiments.analysis import fit_log_growth, fit_loglog_slope, ratio_spread
from experiments.families import FamilyKind, FamilyParameterError, FamilySpec, parse_params
from experiments.runner import run_family
from experiments.verifiers import SUITES, run_all, run_suite
from fem.solver import SolverSettings
from gbc.axioms import axiom_check
from gbc.coordinates import harmonic_coordinates
from geometry.shapes import Polygon

# 종료 코드
EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

# 좌표 표본 격자의 축당 기본 점 수
DEFAULT_GRID = 41

# class_P 는 매개변수 계열이 아니므로 family 명령에서 제외
FAMILY_CHOICES = tuple(k.value for k in FamilyKind if k is not FamilyKind.CLASS_P)


class UsageError(Exception):
    """명령 인자가 잘못되었습니다."""
    pass


def _load_polygon(path: Union[str, Path]) -> Polygon:
    domain = load_domain(path)
    if not isinstance(domain, Polygon):
        raise DomainFileError(f"{path}: 이 명령은 다각형 파일만 받습니다 (kind=polygon).")
    return domain


def solver_settings(tol: Optional[float] = None) -> SolverSettings:
    """LabSettings 의 허용치와 솔버 방식을 담은 풀이 설정. tol 인자가 있으면 그 값이 우선합니다."""
    settings = get_settings()
    return SolverSettings(tol=tol or settings.tol, method=settings.solver)


def grid_samples(polygon: Polygon, grid: int = DEFAULT_GRID) -> np.ndarray:
    """경계 상자 위 grid × grid 격자 중 다각형(경계 포함) 안의 점."""
    if grid < 2:
        raise UsageError(f"--grid 는 2 이상이어야 합니다: {grid}")
    lo, hi = polygon.points.min(axis=0), polygon.points.max(axis=0)
    xs, ys = np.linspace(lo[0], hi[0], grid), np.linspace(lo[1], hi[1], grid)
    mesh = np.stack(np.meshgrid(xs, ys, indexing='xy'), axis=-1).reshape(-1, 2)
    return mesh[polygon.contains(mesh)]


def cmd_coords(domain: Union[str, Path], vertex: Optional[int] = None, level: Optional[int] = None,
               tol: Optional[float] = None, out: Union[str, Path] = "coords", grid: int = DEFAULT_GRID,
               seed: Optional[int] = None) -> int:
    """조화 좌표 λ_i 를 표본 추출합니다. vertex 가 없으면 모든 꼭짓점의 좌표를 씁니다."""
    settings = get_settings()
    polygon = _load_polygon(domain)
    if vertex is not None and not 0 <= vertex < polygon.n_vertices:
        raise UsageError(f"꼭짓점 인덱스 {vertex} 가 범위 [0, {polygon.n_vertices}) 밖입니다.")
    samples = grid_samples(polygon, grid)

    coords = harmonic_coordinates(polygon, level=settings.level_2d if level is None else level,
                                  settings=solver_settings(tol), threads=settings.threads)
    values = coords.evaluate(samples)
    located = ~np.any(np.isnan(values), axis=1)
    if not np.all(located):
        logger.warning(f"위치를 찾지 못한 표본 {int(np.sum(~located))}개를 제외합니다.")
    samples, values = samples[located], values[located]
    report = axiom_check(coords, samples=samples, seed=settings.seed if seed is None else seed)

    out = Path(out)
    indices = range(polygon.n_vertices) if vertex is None else [vertex]
    for i in indices:
        save_grid_csv(samples, values[:, i], out / f"lambda_{i}.csv")
    save_json(report.model_dump(), out / "axioms.json")

    if report.passed:
        logger.success(f"좌표 {len(indices)}개 저장 완료 ({len(samples)}점): {out}")
    else:
        logger.warning(f"공리 허용치 초과: {', '.join(report.failures())}")
    return EXIT_OK


def audit_document(polygon: Polygon) -> dict:
    mesh = constrained_delaunay(polygon)
    document = quality_report(mesh, polygon).model_dump()
    document['walk_lemma_ok'] = verify_walk_lemma(mesh, polygon).ok
    return document


def cmd_audit(domain: Union[str, Path], out: Optional[Union[str, Path]] = None) -> int:
    document = audit_document(_load_polygon(domain))
    print(json.dumps(document, indent=2))
    if out is not None:
        save_json(document, out)
    return EXIT_OK


def family_summary(family: str, rows) -> str:
    """요약 한 줄: 유효 행 수, 로그-로그 기울기, 마지막 세 행의 비율 분산."""
    valid = [r for r in rows if not r.failed]
    parts = [f"family={family}", f"rows={len(rows)}", f"failed={len(rows) - len(valid)}"]
    try:
        parts.append(f"slope={fit_loglog_slope(valid):.6g}")
    except ValueError:
        parts.append("slope=nan")
    if family == FamilyKind.NONCONVEX2D.value:
        try:
            growth, _, r_squared = fit_log_growth(valid)
            parts.append(f"log_growth={growth:.6g} (R²={r_squared:.4f})")
        except ValueError:
            parts.append("log_growth=nan")
    try:
        spread = ratio_spread(valid, last=3)
        parts.append(f"ratio_spread={100.0 * (spread - 1.0):.3g}%")
    except ValueError:
        parts.append("ratio_spread=nan")
    return " ".join(parts)


def cmd_family(family: str, params: str, level: Optional[int] = None, tol: Optional[float] = None,
               out: Union[str, Path] = "results.csv", threads: Optional[int] = None) -> int:
    """계열을 실행해 CSV 와 <csv>.json 을 씁니다. 모든 행이 실패하면 수치 실패로 봅니다."""
    if family not in FAMILY_CHOICES:
        raise UsageError(f"알 수 없는 계열: {family} (가능: {', '.join(FAMILY_CHOICES)})")
    try:
        spec = FamilySpec(kind=FamilyKind(family), params=parse_params(params))
    except FamilyParameterError as e:
        raise UsageError(str(e)) from e

    settings = get_settings()
    rows = run_family(spec, level=level, solver=solver_settings(tol),
                      threads=settings.threads if threads is None else threads,
                      level_2d=settings.level_2d, level_3d=settings.level_3d)
    out = Path(out)
    save_rows_csv(rows, out)
    save_rows_json(rows, out.with_name(out.name + ".json"))
    print(family_summary(family, rows))
    if all(r.failed for r in rows):
        logger.error(f"{family}: 모든 행이 실패했습니다.")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_verify(suite: str, seed: Optional[int] = None, cases: Optional[int] = None) -> int:
    if suite != "all" and suite not in SUITES:
        raise UsageError(f"알 수 없는 스위트: {suite} (가능: {', '.join(SUITES)}, all)")
    if cases is not None and cases < 1:
        raise UsageError(f"--cases 는 1 이상이어야 합니다: {cases}")
    seed = get_settings().seed if seed is None else seed
    results = run_all(seed=seed, cases=cases) if suite == "all" else [run_suite(suite, seed=seed, cases=cases)]

    failed = [r for r in results if not r.passed]
    for result in failed:
        for description in result.counterexamples:
            print(f"[{result.name}] 반례: {description}")
    return EXIT_COUNTEREXAMPLE if failed else EXIT_OK
