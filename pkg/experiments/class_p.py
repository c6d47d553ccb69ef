"""
유계 종횡비 볼록 다면체 클래스 검사 (Class-P Membership)
- 볼록, 삼각형 면, γ(P) = diam/ρ < γ*, 모든 면의 내접원 반지름 > diam/γ* 이면 구성원입니다.
- 구성원은 면/꼭짓점 수가 π·γ*² 보다 작고 n_v = n_t/2 + 2 를 만족해야 합니다.
- 내심 별 메쉬: 체비셰프 중심과 각 면을 잇는 사면체 하나씩.
"""

from typing import List

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from fem.mesh import TetMesh
from geometry.metrics import diameter, inradius_convex, tet_aspect_ratios
from geometry.shapes import Polyhedron


class ClassMembership(BaseModel):
    """클래스 구성원 판정 결과"""
    member: bool = Field(..., description="구성원 여부")
    gamma: float = Field(..., description="γ(P) = diam / ρ (볼록이 아니면 inf)")
    gamma_star: float = Field(..., gt=0, description="γ*")
    n_faces: int = Field(..., ge=0, description="면 수")
    n_vertices: int = Field(..., ge=0, description="꼭짓점 수")
    n_star: float = Field(..., description="π·γ*²")
    counts_ok: bool = Field(..., description="면과 꼭짓점 수가 n* 미만인지")
    euler_ok: bool = Field(..., description="n_v = n_t/2 + 2 성립 여부")
    reasons: List[str] = Field(default_factory=list, description="비구성원 사유")


def class_P_check(polyhedron: Polyhedron, gamma_star: float) -> ClassMembership:
    if not gamma_star > 0:
        raise ValueError(f"γ* 는 양수여야 합니다: {gamma_star}")
    reasons = []
    n_faces, n_vertices = len(polyhedron.faces), polyhedron.n_vertices
    diam = diameter(polyhedron.points)

    gamma = float("inf")
    if not polyhedron.is_convex():
        reasons.append("볼록이 아님")
    else:
        _, rho = inradius_convex(polyhedron)
        gamma = diam / rho if rho > 0 else float("inf")
        if not gamma < gamma_star:
            reasons.append(f"γ(P)={gamma:.6g} >= γ*={gamma_star:.6g}")
    if not polyhedron.is_triangulated:
        reasons.append("삼각형이 아닌 면이 있음")
    else:
        thin = [k for k in range(n_faces) if not polyhedron.face_inradius(k) > diam / gamma_star]
        if thin:
            reasons.append(f"면 내접원 반지름이 diam/γ* 이하인 면 {len(thin)}개 (예: {thin[0]})")

    n_star = float(np.pi * gamma_star ** 2)
    result = ClassMembership(
        member=not reasons,
        gamma=gamma,
        gamma_star=gamma_star,
        n_faces=n_faces,
        n_vertices=n_vertices,
        n_star=n_star,
        counts_ok=n_faces < n_star and n_vertices < n_star,
        euler_ok=2 * n_vertices == n_faces + 4,
        reasons=reasons,
    )
    if result.member and not (result.counts_ok and result.euler_ok):
        logger.error(f"구성원인데 개수 조건이 깨졌습니다: 면 {n_faces}, 꼭짓점 {n_vertices}, n*={n_star:.6g}")
    return result


def incenter_star_mesh(polyhedron: Polyhedron, gamma_star: float) -> TetMesh:
    """체비셰프 중심을 꼭대기로 하는 면당 사면체 하나. 구성원이 아니면 ValueError."""
    membership = class_P_check(polyhedron, gamma_star)
    if not membership.member:
        raise ValueError(f"클래스 구성원이 아닙니다: {'; '.join(membership.reasons)}")
    center, _ = inradius_convex(polyhedron)
    n = polyhedron.n_vertices
    vertices = np.vstack([polyhedron.points, center])
    tets = np.array([(n, a, b, c) for a, b, c in polyhedron.faces])
    mesh = TetMesh(vertices=vertices, tetrahedra=tets)
    mesh.validate()
    ratios = tet_aspect_ratios(vertices[tets])
    logger.debug(f"내심 별 메쉬: 사면체 {len(tets)}개, 최대 종횡비 {float(ratios.max()):.6g}")
    return mesh
