"""
삼각분할 품질 감사 및 구조 보조정리 검증기
- 최대 외접원 반지름 R_* 와 그 삼각형의 최장변이 경계 위에 있는지 보고합니다.
- 경계 보행(walk) 성질과 인접 외접원 반지름 성질을 그대로 코드로 옮겨 속성 테스트의 오라클로 사용합니다.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from cdt.mesh import TriMesh, edge_key
from geometry.metrics import circumcircle, diameter
from geometry.predicates import dot_sign_exact
from geometry.shapes import Polygon

# 직각 근처 판정에서 정확 연산으로 넘어가는 상대 임계값
RIGHT_ANGLE_TOLERANCE = 1e-12
# R_* 동률 판정 상대 허용 오차
TIE_TOLERANCE = 1e-12


class QualityReport(BaseModel):
    """삼각분할의 외접원 반지름 기반 품질 보고서입니다."""
    diameter: float = Field(..., gt=0, description="다각형 지름")
    max_circumradius: float = Field(..., gt=0, description="R_* = 최대 외접원 반지름")
    ratio: float = Field(..., gt=0, description="R_* / 지름")
    argmax_triangle: int = Field(..., ge=0, description="R_* 를 갖는 (가장 앞선) 삼각형 인덱스")
    longest_edge_on_boundary: bool = Field(..., description="argmax 삼각형의 최장변이 경계 위에 있는지 여부")


@dataclass(frozen=True)
class LemmaCheck:
    """검증 결과. 실패 시 반례 삼각형 쌍(또는 삼각형 하나)을 담습니다."""
    ok: bool
    counterexample: Optional[Tuple[int, ...]] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def circumradii(mesh: TriMesh) -> np.ndarray:
    return np.array([circumcircle(mesh.triangle_points(t))[1] for t in range(mesh.n_triangles)])


def longest_edge(mesh: TriMesh, t: int) -> Tuple[int, int]:
    """삼각형 t 의 최장변 (같은 길이면 앞선 변)."""
    a, b, c = mesh.triangles[t].tolist()
    candidates = ((a, b), (b, c), (c, a))
    lengths = [np.linalg.norm(mesh.vertices[u] - mesh.vertices[v]) for u, v in candidates]
    return candidates[int(np.argmax(lengths))]


def quality_report(mesh: TriMesh, polygon: Polygon) -> QualityReport:
    radii = circumradii(mesh)
    argmax = int(np.argmax(radii))
    r_star = float(radii[argmax])
    diam = diameter(polygon.points)
    u, v = longest_edge(mesh, argmax)
    return QualityReport(
        diameter=diam,
        max_circumradius=r_star,
        ratio=r_star / diam,
        argmax_triangle=argmax,
        longest_edge_on_boundary=mesh.is_boundary_edge(u, v),
    )


def verify_walk_lemma(mesh: TriMesh, polygon: Polygon) -> LemmaCheck:
    """
    R_* <= diam(P) 이거나, R_* 를 갖는 어떤 삼각형의 최장변이 경계 위에 있으면 성립합니다.
    """
    radii = circumradii(mesh)
    r_star = float(radii.max())
    diam = diameter(polygon.points)
    if r_star <= diam * (1.0 + TIE_TOLERANCE):
        return LemmaCheck(ok=True, detail=f"R_*={r_star:.6g} <= diam={diam:.6g}")
    attaining = np.flatnonzero(radii >= r_star * (1.0 - TIE_TOLERANCE))
    for t in attaining.tolist():
        if mesh.is_boundary_edge(*longest_edge(mesh, t)):
            return LemmaCheck(ok=True, detail=f"삼각형 {t} 의 최장변이 경계 위에 있음")
    return LemmaCheck(ok=False, counterexample=tuple(attaining.tolist()),
                      detail=f"R_*={r_star:.6g} > diam={diam:.6g} 이고 최장변이 모두 내부 변")


def _is_obtuse(mesh: TriMesh, t: int, edge: Tuple[int, int]) -> bool:
    """최장변 맞은편 꼭짓점의 각이 둔각인지 판정합니다 (직각 근처는 정확 연산)."""
    a, b = edge
    (c,) = set(mesh.triangles[t].tolist()) - {a, b}
    e1 = mesh.vertices[a] - mesh.vertices[c]
    e2 = mesh.vertices[b] - mesh.vertices[c]
    dot = float(e1 @ e2)
    if abs(dot) > RIGHT_ANGLE_TOLERANCE * float(np.linalg.norm(e1) * np.linalg.norm(e2)):
        return dot < 0.0
    return dot_sign_exact(e1.tolist(), e2.tolist()) < 0


def verify_adjacent_circumradius(mesh: TriMesh) -> LemmaCheck:
    """
    둔각 삼각형의 최장변이 구속되지 않은 내부 변이면,
    그 변 너머 이웃 삼각형의 외접원 반지름이 더 커야 합니다.
    비교는 엄격한 부등식이지만, 두 삼각형의 네 꼭짓점이 한 원 위에 있으면 외접원이 같아
    반지름도 같으므로 이 동률은 TIE_TOLERANCE 안에서 통과로 봅니다.
    """
    radii = circumradii(mesh)
    for t in range(mesh.n_triangles):
        u, v = longest_edge(mesh, t)
        key = edge_key(u, v)
        if key in mesh.constrained_edges or not _is_obtuse(mesh, t, (u, v)):
            continue
        neighbors = [n for n in mesh.edge_map[key] if n != t]
        if not neighbors:
            continue
        n = neighbors[0]
        if radii[n] < radii[t] * (1.0 - TIE_TOLERANCE):
            return LemmaCheck(ok=False, counterexample=(t, n),
                              detail=f"R({t})={radii[t]:.6g} >= R({n})={radii[n]:.6g}")
    return LemmaCheck(ok=True)
