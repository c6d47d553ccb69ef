"""
균일 세분 (Uniform Refinement)
- 삼각형은 변 중점으로 4분할, 사면체는 8분할(red refinement)합니다.
- 사면체 가운데 팔면체는 세 대각선 중 가장 짧은 것으로 나눕니다.
- 기존 꼭짓점 번호는 유지되고, 새 중점은 정렬된 변 순서대로 뒤에 붙습니다.
"""

from typing import Tuple

import numpy as np
from loguru import logger

from cdt.mesh import TriMesh, edge_key
from fem.mesh import Mesh, TetMesh

# 사면체 로컬 변 순서: m01, m12, m02, m03, m13, m23
TET_EDGES = ((0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3))
TRI_EDGES = ((0, 1), (1, 2), (2, 0))

# 팔면체 대각선 (로컬 변 인덱스 쌍) 과 그 둘레 순환
OCTAHEDRON_SPLITS = (
    ((2, 4), (0, 1, 5, 3)),
    ((1, 3), (0, 2, 5, 4)),
    ((0, 5), (2, 3, 4, 1)),
)


def _edge_midpoints(cells: np.ndarray, local_edges, n_vertices: int) -> Tuple[np.ndarray, np.ndarray]:
    """셀별 로컬 변 -> 새 중점 번호 (cells, k) 와 정렬된 고유 변 배열을 반환합니다."""
    pairs = np.stack([np.sort(cells[:, [a, b]], axis=1) for a, b in local_edges], axis=1)
    unique, inverse = np.unique(pairs.reshape(-1, 2), axis=0, return_inverse=True)
    return n_vertices + inverse.reshape(len(cells), len(local_edges)), unique


def _refine_triangles(mesh: TriMesh) -> TriMesh:
    t = mesh.triangles
    mid, edges = _edge_midpoints(t, TRI_EDGES, mesh.n_vertices)
    vertices = np.vstack([mesh.vertices, 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])])
    m01, m12, m20 = mid[:, 0], mid[:, 1], mid[:, 2]
    triangles = np.vstack([
        np.column_stack([t[:, 0], m01, m20]),
        np.column_stack([m01, t[:, 1], m12]),
        np.column_stack([m20, m12, t[:, 2]]),
        np.column_stack([m01, m12, m20]),
    ])
    lookup = {(int(a), int(b)): mesh.n_vertices + k for k, (a, b) in enumerate(edges.tolist())}
    constrained = set()
    for a, b in mesh.constrained_edges:
        m = lookup[edge_key(a, b)]
        constrained.add(edge_key(a, m))
        constrained.add(edge_key(m, b))
    return TriMesh(vertices=vertices, triangles=triangles, constrained_edges=frozenset(constrained))


def _refine_tetrahedra(mesh: TetMesh) -> TetMesh:
    t = mesh.tetrahedra
    mid, edges = _edge_midpoints(t, TET_EDGES, mesh.n_vertices)
    vertices = np.vstack([mesh.vertices, 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])])

    corners = [
        np.column_stack([t[:, 0], mid[:, 0], mid[:, 2], mid[:, 3]]),
        np.column_stack([t[:, 1], mid[:, 0], mid[:, 1], mid[:, 4]]),
        np.column_stack([t[:, 2], mid[:, 1], mid[:, 2], mid[:, 5]]),
        np.column_stack([t[:, 3], mid[:, 3], mid[:, 4], mid[:, 5]]),
    ]
    lengths = np.stack([
        np.linalg.norm(vertices[mid[:, a]] - vertices[mid[:, b]], axis=1)
        for (a, b), _ in OCTAHEDRON_SPLITS
    ], axis=1)
    choice = np.argmin(lengths, axis=1)
    inner = []
    for case, ((a, b), ring) in enumerate(OCTAHEDRON_SPLITS):
        sel = choice == case
        if not np.any(sel):
            continue
        m = mid[sel]
        for k in range(4):
            inner.append(np.column_stack([m[:, a], m[:, b], m[:, ring[k]], m[:, ring[(k + 1) % 4]]]))
    tets = np.vstack(corners + inner)
    return TetMesh(vertices=vertices, tetrahedra=orient_positive(vertices, tets))


def orient_positive(vertices: np.ndarray, tets: np.ndarray) -> np.ndarray:
    """음의 부피 사면체는 마지막 두 꼭짓점을 바꿔 양의 방향으로 맞춥니다."""
    tets = np.array(tets, dtype=np.int64)
    p = vertices[tets]
    vol = np.einsum('ij,ij->i', p[:, 1] - p[:, 0], np.cross(p[:, 2] - p[:, 0], p[:, 3] - p[:, 0]))
    flip = vol < 0.0
    tets[flip, 2], tets[flip, 3] = tets[flip, 3].copy(), tets[flip, 2].copy()
    return tets


def refine_uniform(mesh: Mesh, levels: int = 1) -> Mesh:
    """메쉬를 levels 번 균일 세분합니다. levels=0 이면 그대로 반환합니다."""
    if levels < 0:
        raise ValueError(f"세분 단계는 0 이상이어야 합니다: {levels}")
    for _ in range(levels):
        mesh = _refine_triangles(mesh) if isinstance(mesh, TriMesh) else _refine_tetrahedra(mesh)
    if levels:
        logger.debug(f"균일 세분 {levels}단계 완료: 꼭짓점 {mesh.n_vertices}개, 셀 {len(mesh.cells)}개")
    return mesh


def refine_with_values(mesh: Mesh, values: np.ndarray, levels: int = 1) -> Tuple[Mesh, np.ndarray]:
    """
    메쉬를 세분하면서 조각별 선형 함수의 절점값도 함께 옮깁니다.
    새 중점 값은 양 끝값의 평균이므로 함수 자체는 변하지 않습니다.
    """
    if levels < 0:
        raise ValueError(f"세분 단계는 0 이상이어야 합니다: {levels}")
    values = np.asarray(values, dtype=float)
    local_edges = TRI_EDGES if isinstance(mesh, TriMesh) else TET_EDGES
    for _ in range(levels):
        _, edges = _edge_midpoints(mesh.cells, local_edges, mesh.n_vertices)
        values = np.concatenate([values, 0.5 * (values[edges[:, 0]] + values[edges[:, 1]])])
        mesh = refine_uniform(mesh, 1)
    return mesh, values
