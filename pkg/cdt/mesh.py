"""
삼각형 메쉬 자료구조 (TriMesh)
- 꼭짓점/삼각형 배열과 구속 변 집합을 보관하는 불변 객체입니다.
- 인접 관계, 경계 변 등 파생 정보는 처음 요청될 때 계산되어 캐시됩니다.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from geometry.shapes import Polygon

# 넓이 합 검증 상대 허용 오차
AREA_TOLERANCE = 1e-12

Edge = Tuple[int, int]


class MeshError(Exception):
    """메쉬 불변식 위반 또는 잘못된 메쉬 연산입니다."""
    pass


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True, eq=False)
class TriMesh:
    """
    양의 방향 삼각형으로 구성된 평면 메쉬입니다.
    constrained_edges 는 반드시 메쉬에 존재해야 하는 변(다각형 경계 등)입니다.
    """
    vertices: np.ndarray
    triangles: np.ndarray
    constrained_edges: FrozenSet[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        vertices = np.ascontiguousarray(self.vertices, dtype=float)
        triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        vertices.setflags(write=False)
        triangles.setflags(write=False)
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'triangles', triangles)
        object.__setattr__(self, 'constrained_edges',
                           frozenset(edge_key(int(a), int(b)) for a, b in self.constrained_edges))

    # FEM 공통 인터페이스 (TetMesh 와 동일한 이름)
    @property
    def cells(self) -> np.ndarray:
        return self.triangles

    @property
    def dim(self) -> int:
        return 2

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def signed_areas(self) -> np.ndarray:
        p = self.vertices
        a, b, c = p[self.triangles[:, 0]], p[self.triangles[:, 1]], p[self.triangles[:, 2]]
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))

    @cached_property
    def edge_map(self) -> Dict[Edge, List[int]]:
        """무방향 변 -> 그 변을 공유하는 삼각형 인덱스 목록."""
        result: Dict[Edge, List[int]] = {}
        for t, (a, b, c) in enumerate(self.triangles.tolist()):
            for u, v in ((a, b), (b, c), (c, a)):
                result.setdefault(edge_key(u, v), []).append(t)
        return result

    @cached_property
    def adjacency(self) -> np.ndarray:
        """adjacency[t, k] = 꼭짓점 k 맞은편 변 너머의 삼각형 (없으면 -1)."""
        adj = -np.ones((self.n_triangles, 3), dtype=np.int64)
        for t, tri in enumerate(self.triangles.tolist()):
            for k in range(3):
                key = edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3])
                for other in self.edge_map[key]:
                    if other != t:
                        adj[t, k] = other
        adj.setflags(write=False)
        return adj

    def edges(self) -> List[Edge]:
        return sorted(self.edge_map)

    def boundary_edges(self) -> List[Edge]:
        return sorted(e for e, ts in self.edge_map.items() if len(ts) == 1)

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(np.asarray(self.boundary_edges(), dtype=np.int64).ravel())

    def is_boundary_edge(self, a: int, b: int) -> bool:
        key = edge_key(a, b)
        return key in self.constrained_edges or len(self.edge_map.get(key, ())) == 1

    def triangle_points(self, t: int) -> np.ndarray:
        return self.vertices[self.triangles[t]]

    def validate(self, polygon: Optional[Polygon] = None) -> None:
        """방향, 구속 변 존재, 인접 대칭성, 넓이 합(다각형 대비)을 검사합니다."""
        if np.any(self.signed_areas <= 0.0):
            bad = int(np.argmin(self.signed_areas))
            raise MeshError(f"삼각형 {bad} 의 방향이 음수이거나 넓이가 0입니다.")
        for e in self.constrained_edges:
            if e not in self.edge_map:
                raise MeshError(f"구속 변 {e} 이(가) 메쉬에 없습니다.")
        for e, ts in self.edge_map.items():
            if len(ts) > 2:
                raise MeshError(f"변 {e} 을(를) 세 개 이상의 삼각형이 공유합니다.")
        adj = self.adjacency
        for t in range(self.n_triangles):
            for other in adj[t]:
                if other >= 0 and t not in adj[other]:
                    raise MeshError(f"인접 관계가 대칭이 아닙니다: {t} -> {other}")
        if polygon is not None:
            total = float(self.signed_areas.sum())
            if abs(total - polygon.area) > AREA_TOLERANCE * max(polygon.area, 1.0) * max(self.n_triangles, 1):
                raise MeshError(f"넓이 합 {total} 이(가) 다각형 넓이 {polygon.area} 와 다릅니다.")
