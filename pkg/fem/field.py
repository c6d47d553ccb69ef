"""
조각별 선형 유한요소 함수 (ScalarField)
- 메쉬 꼭짓점마다 계수 하나를 갖는 P1 함수입니다.
- 임의 점에서의 값은 KD-트리로 후보 셀을 좁힌 뒤 무게중심 좌표로 계산합니다.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from fem.assembly import cell_gradients, field_gradients
from fem.mesh import Mesh
from fem.refine import refine_with_values

# 점이 셀 안에 있다고 보는 무게중심 좌표 하한
LOCATE_TOLERANCE = 1e-10
# KD-트리에서 가져올 후보 셀 수
CANDIDATE_CELLS = 12


class PointLocator:
    """점이 속한 셀과 그 셀 안에서의 무게중심 좌표를 찾습니다."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        p = mesh.vertices[mesh.cells]
        self._origin = p[:, 0]
        jac = np.transpose(p[:, 1:] - p[:, :1], (0, 2, 1))
        self._inverse = np.linalg.inv(jac)
        self._tree = cKDTree(p.mean(axis=1))

    def _barycentric(self, cells: np.ndarray, points: np.ndarray) -> np.ndarray:
        local = np.einsum('nij,nj->ni', self._inverse[cells], points - self._origin[cells])
        return np.concatenate([1.0 - local.sum(axis=1, keepdims=True), local], axis=1)

    def locate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns:
            cells: 셀 인덱스 (영역 밖이면 -1)
            bary: (n, d+1) 무게중심 좌표
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n, d = points.shape
        n_cells = len(self.mesh.cells)
        cells = -np.ones(n, dtype=np.int64)
        bary = np.zeros((n, d + 1))

        k = min(CANDIDATE_CELLS, n_cells)
        _, candidates = self._tree.query(points, k=k)
        candidates = np.asarray(candidates).reshape(n, k)
        best = np.full(n, -np.inf)
        for j in range(k):
            lam = self._barycentric(candidates[:, j], points)
            score = lam.min(axis=1)
            better = score > best
            best[better] = score[better]
            cells[better] = candidates[better, j]
            bary[better] = lam[better]

        # 후보 안에서 못 찾은 점은 전체 셀을 훑습니다
        for i in np.flatnonzero(best < -LOCATE_TOLERANCE).tolist():
            all_cells = np.arange(n_cells)
            lam = self._barycentric(all_cells, np.repeat(points[i:i + 1], n_cells, axis=0))
            score = lam.min(axis=1)
            j = int(np.argmax(score))
            best[i] = score[j]
            cells[i] = j
            bary[i] = lam[j]

        cells[best < -LOCATE_TOLERANCE] = -1
        return cells, bary


@dataclass(frozen=True, eq=False)
class ScalarField:
    """P1 유한요소 함수. coefficients[i] 는 꼭짓점 i 에서의 값입니다."""
    mesh: Mesh
    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=float).ravel()
        if len(coefficients) != self.mesh.n_vertices:
            raise ValueError(
                f"계수 개수({len(coefficients)})가 꼭짓점 수({self.mesh.n_vertices})와 다릅니다."
            )
        coefficients.setflags(write=False)
        object.__setattr__(self, 'coefficients', coefficients)

    @cached_property
    def gradients(self) -> np.ndarray:
        """셀별 상수 기울기, (n_cells, d)."""
        return field_gradients(self.mesh, self.coefficients)

    @cached_property
    def locator(self) -> PointLocator:
        return PointLocator(self.mesh)

    def evaluate(self, points: np.ndarray, locator: Optional[PointLocator] = None) -> np.ndarray:
        """점들에서의 값. 영역 밖의 점은 NaN 입니다."""
        locator = locator or self.locator
        cells, bary = locator.locate(points)
        inside = cells >= 0
        values = np.full(len(cells), np.nan)
        values[inside] = np.einsum('nk,nk->n', bary[inside], self.coefficients[self.mesh.cells[cells[inside]]])
        return values

    def with_coefficients(self, coefficients: np.ndarray) -> 'ScalarField':
        return ScalarField(mesh=self.mesh, coefficients=coefficients)

    def __sub__(self, other: 'ScalarField') -> 'ScalarField':
        _require_same_mesh(self, other)
        return self.with_coefficients(self.coefficients - other.coefficients)

    def __add__(self, other: 'ScalarField') -> 'ScalarField':
        _require_same_mesh(self, other)
        return self.with_coefficients(self.coefficients + other.coefficients)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coefficients)))


def _require_same_mesh(a: ScalarField, b: ScalarField) -> None:
    if a.mesh is not b.mesh:
        raise ValueError("서로 다른 메쉬 위의 함수끼리는 연산할 수 없습니다.")


def energy_inner(a: ScalarField, b: ScalarField) -> float:
    """에너지 내적 ∫ ∇a·∇b (같은 메쉬 위의 두 함수)."""
    _require_same_mesh(a, b)
    _, measures = cell_gradients(a.mesh)
    return float(np.sum(np.einsum('ed,ed->e', a.gradients, b.gradients) * measures))


def prolongate(field: ScalarField, levels: int = 1) -> ScalarField:
    """함수를 바꾸지 않고 levels 번 균일 세분한 메쉬 위로 옮깁니다."""
    mesh, values = refine_with_values(field.mesh, field.coefficients, levels)
    return ScalarField(mesh=mesh, coefficients=values)
