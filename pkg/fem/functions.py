"""
해석적 이차 시험 함수 (TestFunction)
- u(x) = xᵀAx + b·x + c 형태로 기울기와 (상수) 헤시안을 정확히 제공합니다.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class TestFunction:
    """이차 다항식 u(x) = xᵀAx + b·x + c. A 는 대칭 행렬로 정규화됩니다."""
    quadratic: np.ndarray
    linear: Optional[np.ndarray] = None
    constant: float = 0.0
    name: str = field(default="u")

    # pytest 가 클래스 이름 때문에 수집하지 않도록 표시
    __test__ = False

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.quadratic, dtype=float))
        if a.shape[0] != a.shape[1] or a.shape[0] not in (2, 3):
            raise ValueError(f"이차 계수 행렬은 2x2 또는 3x3 이어야 합니다: {a.shape}")
        a = 0.5 * (a + a.T)
        b = np.zeros(a.shape[0]) if self.linear is None else np.asarray(self.linear, dtype=float).ravel()
        if b.shape != (a.shape[0],):
            raise ValueError(f"일차 계수의 차원이 맞지 않습니다: {b.shape}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, 'quadratic', a)
        object.__setattr__(self, 'linear', b)
        object.__setattr__(self, 'constant', float(self.constant))

    @property
    def dim(self) -> int:
        return self.quadratic.shape[0]

    @property
    def hessian(self) -> np.ndarray:
        return 2.0 * self.quadratic

    @property
    def hessian_square_sum(self) -> float:
        """Σ_{i,j} (∂_i∂_j u)². 혼합 도함수는 두 번 세어집니다."""
        return float(np.sum(self.hessian ** 2))

    @property
    def is_linear(self) -> bool:
        return not np.any(self.quadratic)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        return np.einsum('ni,ij,nj->n', x, self.quadratic, x) + x @ self.linear + self.constant

    def gradient(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        return 2.0 * x @ self.quadratic + self.linear

    @classmethod
    def x_squared(cls, dim: int = 2) -> 'TestFunction':
        a = np.zeros((dim, dim))
        a[0, 0] = 1.0
        return cls(quadratic=a, name="x^2")

    @classmethod
    def radial_squared(cls) -> 'TestFunction':
        """3차원에서 u = x² + y²."""
        return cls(quadratic=np.diag([1.0, 1.0, 0.0]), name="x^2+y^2")

    @classmethod
    def affine(cls, gradient, constant: float = 0.0) -> 'TestFunction':
        g = np.asarray(gradient, dtype=float).ravel()
        return cls(quadratic=np.zeros((len(g), len(g))), linear=g, constant=constant, name="affine")
