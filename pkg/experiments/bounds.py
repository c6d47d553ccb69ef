"""
닫힌 형태 하한과 해석적 기준값 (Closed-form Bounds)
- 하한은 모두 오차 제곱 |u - I u|²_{H¹} 에 대한 값입니다.
- nonconvex3d 는 유계성 계열이라 하한이 정의되지 않습니다.
"""

import numpy as np

from experiments.families import HEXAGON_RADIUS, FamilyInstance, FamilyKind, FamilyParameterError


class NoLowerBoundError(FamilyParameterError):
    """닫힌 형태 하한이 없는 계열입니다."""
    pass


def convex2d_bound(c_v: float, dist: float) -> float:
    return c_v ** 8 / (8.0 * dist)


def nonconvex2d_bound(c_v: float, dist: float) -> float:
    shifted = dist / np.sqrt(2.0)
    return c_v ** 4 / 8.0 * (np.log(shifted + c_v ** 2 / 2.0) - np.log(shifted))


def convex3d_bound(c_v: float, dist: float) -> float:
    return np.pi * c_v ** 4 / 8.0 * ((1.0 - 1.0 / np.sqrt(2.0)) * c_v ** 2) ** 2 / dist


def paper_lower_bound(instance: FamilyInstance) -> float:
    """인스턴스의 c_v, dist 로 계열별 오차 제곱 하한을 계산합니다."""
    if instance.dist <= 0.0:
        raise FamilyParameterError(f"dist 는 양수여야 합니다: {instance.dist}")
    kind = instance.kind
    if kind is FamilyKind.CONVEX2D:
        return convex2d_bound(instance.c_v, instance.dist)
    if kind is FamilyKind.NONCONVEX2D:
        return float(nonconvex2d_bound(instance.c_v, instance.dist))
    if kind is FamilyKind.CONVEX3D:
        return float(convex3d_bound(instance.c_v, instance.dist))
    raise NoLowerBoundError(f"{kind.value} 계열에는 닫힌 형태 하한이 없습니다.")


def convex2d_exact_error_squared(h: float) -> float:
    """
    삼각형 (-1/2,0), (1/2,0), (0,h) 와 u = x². 보간은 (1/4)(1 - y/h) 이므로
    ∫4x² = h/12, ∫(1/(4h))² = 1/(32h).
    """
    return 1.0 / (32.0 * h) + h / 12.0


def convex3d_exact_error_squared(d: float, radius: float = HEXAGON_RADIUS) -> float:
    """
    정육각형 피라미드와 u = x² + y². 보간은 (R²)(1 - z/d) 인 일차 함수입니다.
    ∫4(x²+y²) = (√3/2) R⁴ d,  |P|·(R²/d)² = (√3/2) R² d · R⁴/d².
    """
    volume = np.sqrt(3.0) / 2.0 * radius ** 2 * d
    return float(np.sqrt(3.0) / 2.0 * radius ** 4 * d + volume * (radius ** 2 / d) ** 2)


# 원래 유도에서 기록된 면적 상수 (정확한 값과 나란히 보고)
RECORDED_H2_SQUARED_P0 = 4.0
RECORDED_H1_SQUARED_P1 = 8.0 / 3.0


def nonconvex2d_exact_h2_squared(eps: float) -> float:
    """축소 전 P_ε 에서 u = x² 의 |u|²_{H²} = 4·|P_ε| = 4(1 + ε)."""
    return 4.0 * (1.0 + eps)
