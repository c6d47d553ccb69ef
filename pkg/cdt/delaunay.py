"""
Delaunay / 구속 Delaunay 삼각분할 (CDT)
- 사전식 정렬 스윕으로 초기 삼각분할을 만든 뒤, Lawson 변 뒤집기로 Delaunay 조건을 맞춥니다.
- 다각형 경계는 교차 변 뒤집기로 강제 삽입하고, 패리티 탐색으로 외부 삼각형을 제거합니다.
- 공원점(cocircular) 동률은 가장 작은 꼭짓점 인덱스에 닿는 대각선을 선택하여 결정적으로 처리합니다.
"""

from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from loguru import logger

from cdt.mesh import Edge, MeshError, TriMesh, edge_key
from geometry.metrics import GeometryError
from geometry.predicates import incircle, orient2d, segments_cross
from geometry.shapes import Polygon


class _Triangulation:
    """
    방향 변 (u, v) -> 반시계 삼각형 (u, v, w) 의 세 번째 꼭짓점 w 를 저장하는 작업용 구조입니다.
    각 삼각형은 회전된 세 방향 변으로 세 번 기록됩니다.
    """

    def __init__(self, points: Sequence[Tuple[float, float]]):
        self.points = points
        self.opp: Dict[Edge, int] = {}

    def add(self, a: int, b: int, c: int) -> None:
        self.opp[(a, b)] = c
        self.opp[(b, c)] = a
        self.opp[(c, a)] = b

    def remove(self, a: int, b: int, c: int) -> None:
        del self.opp[(a, b)]
        del self.opp[(b, c)]
        del self.opp[(c, a)]

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.opp or (b, a) in self.opp

    def interior_edges(self) -> List[Edge]:
        return sorted((u, v) for (u, v) in self.opp if u < v and (v, u) in self.opp)

    def triangles(self) -> List[Tuple[int, int, int]]:
        seen = set()
        for (u, v), w in self.opp.items():
            tri = (u, v, w)
            k = tri.index(min(tri))
            seen.add(tri[k:] + tri[:k])
        return sorted(seen)

    def flippable(self, u: int, v: int) -> bool:
        """(u, v) 양쪽 삼각형이 이루는 사각형이 엄격히 볼록이면 True."""
        w, x = self.opp[(u, v)], self.opp[(v, u)]
        p = self.points
        return orient2d(p[u], p[x], p[w]) > 0 and orient2d(p[x], p[v], p[w]) > 0

    def flip(self, u: int, v: int) -> Edge:
        """대각선 (u, v) 를 (x, w) 로 바꾸고 새 대각선을 반환합니다."""
        w, x = self.opp[(u, v)], self.opp[(v, u)]
        self.remove(u, v, w)
        self.remove(v, u, x)
        self.add(u, x, w)
        self.add(x, v, w)
        return x, w

    def is_locally_delaunay(self, u: int, v: int) -> bool:
        w, x = self.opp[(u, v)], self.opp[(v, u)]
        p = self.points
        s = incircle(p[u], p[v], p[w], p[x])
        if s > 0:
            return False
        if s == 0 and min(w, x) < min(u, v):
            return not self.flippable(u, v)
        return True

    def legalize(self, constrained: FrozenSet[Edge], seeds: Optional[Iterable[Edge]] = None) -> int:
        """구속되지 않은 변에 Lawson 뒤집기를 반복 적용합니다. 뒤집기 횟수를 반환합니다."""
        stack = list(seeds) if seeds is not None else self.interior_edges()
        flips = 0
        while stack:
            u, v = stack.pop()
            if edge_key(u, v) in constrained or (u, v) not in self.opp or (v, u) not in self.opp:
                continue
            if self.is_locally_delaunay(u, v) or not self.flippable(u, v):
                continue
            w, x = self.opp[(u, v)], self.opp[(v, u)]
            self.flip(u, v)
            flips += 1
            stack.extend([(u, x), (x, v), (v, w), (w, u)])
        return flips


def _sweep(points: Sequence[Tuple[float, float]]) -> _Triangulation:
    """사전식 순서로 점을 추가하며 볼록 껍질 바깥쪽에 부채꼴 삼각형을 붙입니다."""
    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1]))
    for i, j in zip(order, order[1:]):
        if points[i] == points[j]:
            raise GeometryError(f"중복된 점이 있습니다: 인덱스 {i}, {j}")

    # 첫 비공선 점 찾기
    k = 2
    while k < len(order) and orient2d(points[order[0]], points[order[1]], points[order[k]]) == 0:
        k += 1
    if k == len(order):
        raise GeometryError("모든 점이 한 직선 위에 있어 삼각분할할 수 없습니다.")

    tri = _Triangulation(points)
    chain, apex = order[:k], order[k]
    if orient2d(points[chain[0]], points[chain[1]], points[apex]) > 0:
        for a, b in zip(chain, chain[1:]):
            tri.add(a, b, apex)
        hull = list(chain) + [apex]
    else:
        for a, b in zip(chain, chain[1:]):
            tri.add(b, a, apex)
        hull = list(reversed(chain)) + [apex]

    for p in order[k + 1:]:
        h = len(hull)
        visible = [orient2d(points[hull[i]], points[hull[(i + 1) % h]], points[p]) < 0 for i in range(h)]
        start = next(i for i in range(h) if visible[i] and not visible[i - 1])
        count = 0
        while visible[(start + count) % h]:
            u, v = hull[(start + count) % h], hull[(start + count + 1) % h]
            tri.add(v, u, p)
            count += 1
        end = (start + count) % h
        hull = [hull[(end + j) % h] for j in range(h - count + 1)] + [p]
    return tri


def _to_mesh(tri: _Triangulation, points: Sequence[Tuple[float, float]], constrained: FrozenSet[Edge],
             triangles: Optional[List[Tuple[int, int, int]]] = None) -> TriMesh:
    tris = triangles if triangles is not None else tri.triangles()
    return TriMesh(vertices=np.asarray(points, dtype=float), triangles=np.asarray(tris, dtype=np.int64),
                   constrained_edges=constrained)


def delaunay(points: Sequence[Sequence[float]]) -> TriMesh:
    """점 집합의 Delaunay 삼각분할 (최소 인덱스 대각선 우선 동률 처리)."""
    pts = [(float(x), float(y)) for x, y in np.asarray(points, dtype=float)]
    if len(pts) < 3:
        raise GeometryError("Delaunay 삼각분할에는 최소 3개의 점이 필요합니다.")
    tri = _sweep(pts)
    flips = tri.legalize(frozenset())
    logger.debug(f"Delaunay: 점 {len(pts)}개, 뒤집기 {flips}회")
    return _to_mesh(tri, pts, frozenset())


def _insert_segment(tri: _Triangulation, a: int, b: int) -> None:
    """교차하는 변을 차례로 뒤집어 선분 ab 를 메쉬 변으로 만듭니다."""
    p = tri.points
    queue = deque((u, v) for (u, v) in tri.interior_edges() if segments_cross(p[u], p[v], p[a], p[b]))
    stalled = 0
    while queue:
        u, v = queue.popleft()
        if (u, v) not in tri.opp or (v, u) not in tri.opp:
            continue
        if not tri.flippable(u, v):
            queue.append((u, v))
            stalled += 1
            if stalled > 4 * len(queue) + 16:
                raise MeshError(f"구속 변 ({a}, {b}) 삽입이 진행되지 않습니다.")
            continue
        stalled = 0
        x, w = tri.flip(u, v)
        if segments_cross(p[x], p[w], p[a], p[b]):
            queue.append((x, w))
    if not tri.has_edge(a, b):
        raise MeshError(f"구속 변 ({a}, {b}) 삽입에 실패했습니다.")


def _interior_triangles(tri: _Triangulation, constrained: FrozenSet[Edge]) -> List[Tuple[int, int, int]]:
    """껍질에서 출발해 구속 변을 넘을 때마다 패리티를 바꾸며 내부 삼각형만 고릅니다."""
    triangles = tri.triangles()
    index = {t: i for i, t in enumerate(triangles)}

    def canonical(u: int, v: int) -> Tuple[int, int, int]:
        t = (u, v, tri.opp[(u, v)])
        k = t.index(min(t))
        return t[k:] + t[:k]

    parity: Dict[int, int] = {}
    queue = deque()
    for (u, v) in tri.opp:
        if (v, u) not in tri.opp:
            t = index[canonical(u, v)]
            value = 1 if edge_key(u, v) in constrained else 0
            if t not in parity:
                parity[t] = value
                queue.append(t)
    while queue:
        t = queue.popleft()
        a, b, c = triangles[t]
        for u, v in ((a, b), (b, c), (c, a)):
            if (v, u) not in tri.opp:
                continue
            n = index[canonical(v, u)]
            value = parity[t] ^ (1 if edge_key(u, v) in constrained else 0)
            if n not in parity:
                parity[n] = value
                queue.append(n)
    return [t for i, t in enumerate(triangles) if parity.get(i) == 1]


def constrained_delaunay(polygon: Polygon) -> TriMesh:
    """
    단순 다각형의 구속 Delaunay 삼각분할을 만듭니다.
    모든 경계 변이 구속 변으로 포함되며 Steiner 점은 추가하지 않습니다.
    """
    pts = [tuple(v) for v in polygon.vertices]
    constrained = frozenset(edge_key(a, b) for a, b in polygon.edges())
    tri = _sweep(pts)
    tri.legalize(frozenset())
    for a, b in polygon.edges():
        if not tri.has_edge(a, b):
            _insert_segment(tri, a, b)
    flips = tri.legalize(constrained)
    kept = _interior_triangles(tri, constrained)
    mesh = _to_mesh(tri, pts, constrained, kept)
    logger.debug(f"CDT: 꼭짓점 {len(pts)}개, 삼각형 {mesh.n_triangles}개, 복원 뒤집기 {flips}회")
    return mesh


def flip_edge(mesh: TriMesh, edge: Edge) -> TriMesh:
    """
    내부의 비구속 변 하나를 뒤집은 새 메쉬를 반환합니다.
    두 삼각형이 이루는 사각형이 엄격히 볼록이어야 합니다.
    """
    u, v = edge
    if edge_key(u, v) in mesh.constrained_edges:
        raise MeshError(f"구속 변 {edge} 은(는) 뒤집을 수 없습니다.")
    pts = [tuple(p) for p in mesh.vertices.tolist()]
    tri = _Triangulation(pts)
    for a, b, c in mesh.triangles.tolist():
        tri.add(a, b, c)
    if (u, v) not in tri.opp or (v, u) not in tri.opp:
        raise MeshError(f"변 {edge} 은(는) 내부 변이 아닙니다.")
    if not tri.flippable(u, v):
        raise MeshError(f"변 {edge} 주변 사각형이 볼록하지 않아 뒤집을 수 없습니다.")
    tri.flip(u, v)
    return _to_mesh(tri, pts, mesh.constrained_edges)


def min_angle(mesh: TriMesh) -> float:
    """메쉬 전체의 최소 내각 (라디안)."""
    p = mesh.vertices[mesh.triangles]
    smallest = np.inf
    for k in range(3):
        e1 = p[:, (k + 1) % 3] - p[:, k]
        e2 = p[:, (k + 2) % 3] - p[:, k]
        cos = np.einsum('ij,ij->i', e1, e2) / (np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1))
        smallest = min(smallest, float(np.arccos(np.clip(cos, -1.0, 1.0)).min()))
    return smallest


def empty_circumdisk_violations(mesh: TriMesh, candidates: Optional[Set[int]] = None) -> List[Tuple[int, int]]:
    """각 삼각형의 열린 외접원 안에 들어가는 (삼각형, 점) 쌍을 전수 탐색합니다 (테스트 오라클)."""
    pts = [tuple(p) for p in mesh.vertices.tolist()]
    indices = range(len(pts)) if candidates is None else sorted(candidates)
    violations = []
    for t, (a, b, c) in enumerate(mesh.triangles.tolist()):
        for i in indices:
            if i in (a, b, c):
                continue
            if incircle(pts[a], pts[b], pts[c], pts[i]) > 0:
                violations.append((t, i))
    return violations
