"""
P1 유한요소 조립 (Stiffness Assembly)
- 셀별 기저함수 기울기와 측도(넓이/부피)를 한 번에 계산합니다.
- 강성 행렬은 요소 행렬을 COO 로 모은 뒤 CSR 로 변환해 중복 항을 합산합니다.
"""

from math import factorial
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from fem.mesh import Mesh


def cell_gradients(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray]:
    """
    셀별 P1 기저함수 기울기와 측도를 반환합니다.

    Returns:
        grads: (n_cells, d+1, d) 배열, grads[e, k] = 셀 e 의 로컬 꼭짓점 k 기저함수 기울기
        measures: (n_cells,) 셀 넓이 또는 부피
    """
    p = mesh.vertices[mesh.cells]
    jac = np.transpose(p[:, 1:] - p[:, :1], (0, 2, 1))
    det = np.linalg.det(jac)
    inv = np.linalg.inv(jac)
    grads = np.concatenate([-inv.sum(axis=1, keepdims=True), inv], axis=1)
    return grads, np.abs(det) / factorial(mesh.dim)


def stiffness_matrix(mesh: Mesh) -> sp.csr_matrix:
    """K_ij = ∫ ∇φ_i·∇φ_j 를 조립합니다. 대칭이고 행 합은 0입니다."""
    grads, measures = cell_gradients(mesh)
    local = np.einsum('eid,ejd->eij', grads, grads) * measures[:, None, None]
    cells = mesh.cells
    n_local = cells.shape[1]
    rows = np.repeat(cells, n_local, axis=1).ravel()
    cols = np.tile(cells, (1, n_local)).ravel()
    n = mesh.n_vertices
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def field_gradients(mesh: Mesh, coefficients: np.ndarray) -> np.ndarray:
    """조각별 선형 함수의 셀별 (상수) 기울기, (n_cells, d) 배열."""
    grads, _ = cell_gradients(mesh)
    return np.einsum('ekd,ek->ed', grads, np.asarray(coefficients, dtype=float)[mesh.cells])
