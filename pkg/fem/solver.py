"""
디리클레 문제 솔버 (Discrete Harmonic Extension)
- 경계 꼭짓점 값이 주어졌을 때 내부 꼭짓점에 대한 축소 시스템 K_II u = -K_IB g 를 풉니다.
- 기본은 희소 LU 분해(한 번 분해 후 여러 우변 재사용), 선택적으로 대각 전처리 CG 를 사용합니다.
- 이산 최대 원리 위반은 경고로만 기록합니다.
"""

import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from loguru import logger
from scipy.sparse.linalg import cg, splu

from fem.assembly import stiffness_matrix
from fem.field import ScalarField
from fem.mesh import Mesh

# 솔버 정책 상수
DEFAULT_TOL = 1e-10            # 축소 시스템 상대 잔차 허용치
CG_ITERATION_FACTOR = 50       # CG 반복 상한 = 계수 * sqrt(미지수)
RESIDUAL_SLACK = 10.0          # 잔차 검사 시 허용치에 곱하는 여유
SOLVER_METHODS = ("direct", "cg")


class SolverError(Exception):
    """선형 시스템 구성 또는 풀이 과정의 최상위 예외입니다."""
    pass


class ConvergenceError(SolverError):
    """반복 상한 안에 잔차 허용치에 도달하지 못했습니다."""
    pass


@dataclass
class SolverSettings:
    """디리클레 풀이 설정 값 객체"""
    tol: float = DEFAULT_TOL
    method: str = "direct"
    check_maximum_principle: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol 은 양수여야 합니다.")
        if self.method not in SOLVER_METHODS:
            raise ValueError(f"지원하지 않는 솔버입니다: {self.method} (가능: {', '.join(SOLVER_METHODS)})")


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """메쉬 경계 꼭짓점 인덱스와 그 위의 디리클레 값입니다."""
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=float).ravel()
        if len(indices) != len(values):
            raise ValueError(f"인덱스({len(indices)})와 값({len(values)})의 개수가 다릅니다.")
        if len(np.unique(indices)) != len(indices):
            raise ValueError("경계 인덱스가 중복되었습니다.")
        order = np.argsort(indices)
        indices, values = indices[order], values[order]
        indices.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, 'indices', indices)
        object.__setattr__(self, 'values', values)


class DirichletSolver:
    """
    한 메쉬와 경계 분할에 대해 내부 블록을 한 번만 준비하고,
    여러 경계 데이터(좌표 함수마다 하나)에 재사용합니다.
    natural_boundary=True 이면 값이 없는 경계 꼭짓점은 자연(노이만) 경계 조건을 따릅니다.
    """

    def __init__(self, mesh: Mesh, boundary: Optional[np.ndarray] = None,
                 settings: Optional[SolverSettings] = None, natural_boundary: bool = False):
        self.mesh = mesh
        self.settings = settings or SolverSettings()
        self.stiffness = stiffness_matrix(mesh)

        mesh_boundary = mesh.boundary_vertices()
        self.boundary = np.unique(mesh_boundary if boundary is None else np.asarray(boundary, dtype=np.int64))
        missing = np.setdiff1d(mesh_boundary, self.boundary)
        if len(missing) and not natural_boundary:
            raise SolverError(f"경계 꼭짓점 {len(missing)}개에 디리클레 값이 없습니다 (예: {int(missing[0])}).")
        mask = np.ones(mesh.n_vertices, dtype=bool)
        mask[self.boundary] = False
        self.interior = np.flatnonzero(mask)

        k_i = self.stiffness[self.interior]
        self._k_ii = k_i[:, self.interior].tocsc()
        self._k_ib = k_i[:, self.boundary].tocsr()
        self._lu = None
        self._lock = threading.Lock()

        logger.debug(
            f"DirichletSolver 준비: 내부 {len(self.interior)}개, 경계 {len(self.boundary)}개, "
            f"방식={self.settings.method}"
        )

    def _solve_direct(self, rhs: np.ndarray) -> np.ndarray:
        with self._lock:
            if self._lu is None:
                try:
                    self._lu = splu(self._k_ii)
                except RuntimeError as e:
                    raise SolverError(f"내부 블록 분해 실패 (특이 행렬): {e}") from e
        return self._lu.solve(rhs)

    def _solve_cg(self, rhs: np.ndarray) -> np.ndarray:
        n = len(rhs)
        diagonal = self._k_ii.diagonal()
        if np.any(diagonal <= 0.0):
            raise SolverError("내부 블록 대각 성분이 양수가 아닙니다.")
        preconditioner = sp.diags(1.0 / diagonal)
        max_iter = max(1, int(CG_ITERATION_FACTOR * np.sqrt(n)))
        solution, info = cg(self._k_ii, rhs, rtol=self.settings.tol, atol=0.0,
                            maxiter=max_iter, M=preconditioner)
        if info > 0:
            raise ConvergenceError(f"CG 가 {max_iter}회 반복 안에 수렴하지 않았습니다.")
        if info < 0:
            raise SolverError(f"CG 입력 오류 (info={info})")
        return solution

    def solve(self, data: BoundaryData) -> ScalarField:
        if len(data.indices) != len(self.boundary) or np.any(data.indices != self.boundary):
            raise SolverError("경계 데이터가 메쉬의 모든 경계 꼭짓점을 정확히 덮지 않습니다.")

        coefficients = np.zeros(self.mesh.n_vertices)
        coefficients[self.boundary] = data.values
        if len(self.interior) == 0:
            logger.debug("내부 꼭짓점이 없어 경계 보간을 그대로 반환합니다.")
            return ScalarField(mesh=self.mesh, coefficients=coefficients)

        rhs = -(self._k_ib @ data.values)
        if self.settings.method == "direct":
            solution = self._solve_direct(rhs)
        else:
            solution = self._solve_cg(rhs)

        residual = np.linalg.norm(self._k_ii @ solution - rhs)
        scale = max(np.linalg.norm(rhs), np.finfo(float).tiny)
        if residual > RESIDUAL_SLACK * self.settings.tol * scale:
            raise ConvergenceError(f"축소 시스템 상대 잔차 {residual / scale:.3e} 가 허용치를 넘었습니다.")

        coefficients[self.interior] = solution
        if self.settings.check_maximum_principle:
            _check_maximum_principle(data.values, solution, self.settings.tol)
        return ScalarField(mesh=self.mesh, coefficients=coefficients)


def _check_maximum_principle(boundary_values: np.ndarray, interior: np.ndarray, tol: float) -> None:
    lo, hi = float(boundary_values.min()), float(boundary_values.max())
    slack = tol * max(1.0, hi - lo)
    overshoot = max(lo - float(interior.min()), float(interior.max()) - hi, 0.0)
    if overshoot > slack:
        logger.warning(f"이산 최대 원리 위반: 경계 범위 [{lo:.6g}, {hi:.6g}] 밖으로 {overshoot:.3e}")


def solve_dirichlet(mesh: Mesh, data: BoundaryData, tol: float = DEFAULT_TOL,
                    settings: Optional[SolverSettings] = None) -> ScalarField:
    """경계 데이터의 이산 조화 확장(Galerkin P1 해)을 반환합니다."""
    settings = settings or SolverSettings(tol=tol)
    return DirichletSolver(mesh, data.indices, settings).solve(data)


def galerkin_residual(field: ScalarField, boundary: Optional[np.ndarray] = None) -> float:
    """내부 절점 기저함수에 대한 에너지 내적의 최댓값 max_i |(K f)_i|."""
    mesh = field.mesh
    boundary = mesh.boundary_vertices() if boundary is None else np.asarray(boundary)
    mask = np.ones(mesh.n_vertices, dtype=bool)
    mask[boundary] = False
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs((stiffness_matrix(mesh) @ field.coefficients)[mask])))
