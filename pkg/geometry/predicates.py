"""
견고한 기하 판정 함수 (Robust Predicates)
- 부동소수점 필터로 먼저 부호를 판정하고, 오차 한계 안에 들어오면 유리수(Fraction)로 정확히 재계산합니다.
- Delaunay/CDT의 모든 조합적 결정(방향, 외접원 포함)은 이 모듈만 사용합니다.
"""

from fractions import Fraction
from typing import Sequence

import numpy as np

# 배정밀도 반올림 단위 (2^-53)
EPSILON = float(np.finfo(float).eps) / 2.0

# 필터 단계 오차 한계 계수
CCW_ERRBOUND = (3.0 + 16.0 * EPSILON) * EPSILON
ICC_ERRBOUND = (10.0 + 96.0 * EPSILON) * EPSILON
O3D_ERRBOUND = (7.0 + 56.0 * EPSILON) * EPSILON


def _sign(value) -> int:
    return int(value > 0) - int(value < 0)


def orient2d(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> int:
    """
    세 점의 회전 방향을 반환합니다.
    +1: 반시계, -1: 시계, 0: 일직선
    """
    acx, acy = a[0] - c[0], a[1] - c[1]
    bcx, bcy = b[0] - c[0], b[1] - c[1]
    left = acx * bcy
    right = acy * bcx
    det = left - right
    if abs(det) > CCW_ERRBOUND * (abs(left) + abs(right)):
        return _sign(det)
    return _orient2d_exact(a, b, c)


def _orient2d_exact(a, b, c) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle(a: Sequence[float], b: Sequence[float], c: Sequence[float], d: Sequence[float]) -> int:
    """
    반시계 삼각형 (a, b, c)의 외접원에 대한 d의 위치를 반환합니다.
    +1: 원 내부, -1: 원 외부, 0: 원 위 (공원점)
    """
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]

    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    alift = adx * adx + ady * ady
    cdxady, adxcdy = cdx * ady, adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = (alift * (bdxcdy - cdxbdy)
           + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if abs(det) > ICC_ERRBOUND * permanent:
        return _sign(det)
    return _incircle_exact(a, b, c, d)


def _incircle_exact(a, b, c, d) -> int:
    dx, dy = Fraction(d[0]), Fraction(d[1])
    rows = []
    for p in (a, b, c):
        px, py = Fraction(p[0]) - dx, Fraction(p[1]) - dy
        rows.append((px, py, px * px + py * py))
    (ax, ay, al), (bx, by, bl), (cx, cy, cl) = rows
    det = (al * (bx * cy - cx * by)
           + bl * (cx * ay - ax * cy)
           + cl * (ax * by - bx * ay))
    return _sign(det)


def orient3d(a: Sequence[float], b: Sequence[float], c: Sequence[float], d: Sequence[float]) -> int:
    """
    det[b-a, c-a, d-a]의 부호를 반환합니다.
    법선 (b-a)×(c-a)가 가리키는 쪽에 d가 있으면 +1입니다.
    """
    u = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
    v = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
    w = (d[0] - a[0], d[1] - a[1], d[2] - a[2])
    t1 = u[0] * (v[1] * w[2] - v[2] * w[1])
    t2 = u[1] * (v[2] * w[0] - v[0] * w[2])
    t3 = u[2] * (v[0] * w[1] - v[1] * w[0])
    det = t1 + t2 + t3
    permanent = (abs(u[0]) * (abs(v[1] * w[2]) + abs(v[2] * w[1]))
                 + abs(u[1]) * (abs(v[2] * w[0]) + abs(v[0] * w[2]))
                 + abs(u[2]) * (abs(v[0] * w[1]) + abs(v[1] * w[0])))
    if abs(det) > O3D_ERRBOUND * permanent:
        return _sign(det)
    return _orient3d_exact(a, b, c, d)


def _orient3d_exact(a, b, c, d) -> int:
    fa = [Fraction(x) for x in a]
    u = [Fraction(x) - y for x, y in zip(b, fa)]
    v = [Fraction(x) - y for x, y in zip(c, fa)]
    w = [Fraction(x) - y for x, y in zip(d, fa)]
    det = (u[0] * (v[1] * w[2] - v[2] * w[1])
           + u[1] * (v[2] * w[0] - v[0] * w[2])
           + u[2] * (v[0] * w[1] - v[1] * w[0]))
    return _sign(det)


def segments_cross(p: Sequence[float], q: Sequence[float], a: Sequence[float], b: Sequence[float]) -> bool:
    """선분 pq와 ab가 내부에서 진짜로 교차하는지(끝점 접촉 제외) 판정합니다."""
    o1, o2 = orient2d(a, b, p), orient2d(a, b, q)
    o3, o4 = orient2d(p, q, a), orient2d(p, q, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def dot_sign_exact(u: Sequence[float], v: Sequence[float]) -> int:
    """두 벡터 내적의 부호를 정확히 계산합니다 (직각 근처 판정용)."""
    return _sign(sum(Fraction(x) * Fraction(y) for x, y in zip(u, v)))
