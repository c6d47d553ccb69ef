"""
사면체 품질 표본 추출 (Tet Quality Sampler)
- xy 평면 위 내접원 반지름 ≥ r*, 지름 ≤ 1 인 삼각형 (단위 원판 안에서 무작위 위치) 과
  원기둥 {x²+y² ≤ 1, h* ≤ z ≤ 1} 의 꼭대기로 사면체를 만들어 종횡비 최댓값을 관찰합니다.
- 삼각형은 내접원에 접하는 세 직선으로 만들고 지름 조건은 기각 표본 추출로 맞춥니다.
"""

from typing import Tuple

import numpy as np
from loguru import logger

from geometry.metrics import tet_aspect_ratios, triangle_area

# 지름 1 삼각형이 가질 수 있는 최대 내접원 반지름 (정삼각형)
MAX_INRADIUS = 1.0 / (2.0 * np.sqrt(3.0))
# 기각 표본 추출 반복 상한
MAX_ROUNDS = 200


def _check_range(r_star: float, h_star: float, n: int) -> None:
    if not 0.0 < r_star <= 1.0:
        raise ValueError(f"r* 는 (0, 1] 범위여야 합니다: {r_star}")
    if r_star > MAX_INRADIUS:
        raise ValueError(f"지름 1 이하 삼각형의 내접원 반지름은 {MAX_INRADIUS:.6g} 를 넘을 수 없습니다: {r_star}")
    if not 0.0 < h_star <= 1.0:
        raise ValueError(f"h* 는 (0, 1] 범위여야 합니다: {h_star}")
    if n < 1:
        raise ValueError(f"표본 수는 1 이상이어야 합니다: {n}")


def _tangent_triangles(rng: np.random.Generator, r_star: float, count: int) -> np.ndarray:
    """반지름 r ∈ [r*, MAX_INRADIUS] 인 원에 외접하는 삼각형 (count, 3, 2) 후보."""
    radius = rng.uniform(r_star, MAX_INRADIUS, size=count)
    start = rng.uniform(0.0, 2.0 * np.pi, size=count)
    gaps = rng.uniform(np.pi / 3.0, np.pi, size=(count, 2))
    last = 2.0 * np.pi - gaps.sum(axis=1)
    valid = (last > 0.0) & (last < np.pi)
    angles = np.column_stack([start, start + gaps[:, 0], start + gaps[:, 0] + gaps[:, 1]])[valid]
    radius = radius[valid]
    # 이웃한 두 접선의 교점: 중간 방향으로 r / cos(간격/2)
    nxt = np.roll(angles, -1, axis=1)
    nxt[:, -1] += 2.0 * np.pi
    half = 0.5 * (nxt - angles)
    mid = 0.5 * (nxt + angles)
    dist = radius[:, None] / np.cos(half)
    return np.stack([dist * np.cos(mid), dist * np.sin(mid)], axis=-1)


def sample_triangles(rng: np.random.Generator, r_star: float, n: int) -> np.ndarray:
    accepted = []
    total = 0
    for _ in range(MAX_ROUNDS):
        cand = _tangent_triangles(rng, r_star, max(4 * (n - total), 64))
        edges = np.linalg.norm(cand - np.roll(cand, -1, axis=1), axis=2)
        keep = cand[edges.max(axis=1) <= 1.0]
        accepted.append(keep)
        total += len(keep)
        if total >= n:
            break
    else:
        raise RuntimeError(f"{MAX_ROUNDS}회 안에 조건을 만족하는 삼각형 {n}개를 얻지 못했습니다.")
    return np.concatenate(accepted)[:n]


def offset_triangles(rng: np.random.Generator, triangles: np.ndarray) -> np.ndarray:
    """
    내심이 원점인 삼각형을 xy 평면에서 무작위로 평행이동합니다.
    이동 거리는 꼭짓점이 단위 원판 (꼭대기 원기둥의 밑면) 밖으로 나가지 않는 범위에서 고릅니다.
    """
    reach = np.linalg.norm(triangles, axis=2).max(axis=1)
    room = np.clip(1.0 - reach, 0.0, None)
    radius = room * np.sqrt(rng.uniform(0.0, 1.0, size=len(triangles)))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=len(triangles))
    shift = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    return triangles + shift[:, None, :]


def sample_apexes(rng: np.random.Generator, h_star: float, n: int) -> np.ndarray:
    radius = np.sqrt(rng.uniform(0.0, 1.0, size=n))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    height = rng.uniform(h_star, 1.0, size=n)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle), height])


def sample_tetrahedra(r_star: float, h_star: float, n: int, seed: int = 0) -> np.ndarray:
    """(n, 4, 3) 사면체 표본. 같은 시드면 같은 결과입니다."""
    _check_range(r_star, h_star, n)
    rng = np.random.default_rng(seed)
    triangles = offset_triangles(rng, sample_triangles(rng, r_star, n))
    base = np.concatenate([triangles, np.zeros((n, 3, 1))], axis=2)
    apex = sample_apexes(rng, h_star, n)
    return np.concatenate([base, apex[:, None, :]], axis=1)


def tet_quality_sample(r_star: float, h_star: float, n: int, seed: int = 0) -> float:
    """관찰된 최대 종횡비."""
    ratios = tet_aspect_ratios(sample_tetrahedra(r_star, h_star, n, seed))
    ceiling = float(ratios.max())
    logger.debug(f"사면체 품질 표본: r*={r_star}, h*={h_star}, n={n} → 최대 종횡비 {ceiling:.6g}")
    return ceiling


def apex_over_incenter(triangle: np.ndarray, height: float) -> Tuple[np.ndarray, float]:
    """내심 바로 위 높이 height 의 꼭대기를 얹은 사면체와 그 부피 (밑면 넓이 · 높이 / 3)."""
    tri = np.asarray(triangle, dtype=float)
    lengths = np.linalg.norm(np.roll(tri, -1, axis=0) - np.roll(tri, 1, axis=0), axis=1)
    incenter = lengths @ tri / lengths.sum()
    area = triangle_area(tri)
    tet = np.vstack([np.column_stack([tri, np.zeros(3)]), [incenter[0], incenter[1], height]])
    return tet, float(area * height / 3.0)
