"""
퇴화 예제 계열 생성기 (Degeneracy Families)
- convex2d: 밑변 (-1/2,0)-(1/2,0), 꼭짓점 (0,h) 인 삼각형. h → 0 이면 오차 비율이 1/dist 로 발산합니다.
- nonconvex2d: 오목 꼭짓점 (0,ε) 을 갖는 오각형 P_ε (지름 1 로 1/√5 배). 오차 제곱이 ln(1/dist) 로 자랍니다.
- convex3d: 정육각형 밑면 위 높이 d 인 피라미드. 꼭짓점이 밑면 중앙 삼각형에 가까워집니다.
- nonconvex3d: 13 꼭짓점 다면체 (정사각형 밑면, 윗면 가운데가 (0,0,ε) 까지 파인 형태). 비율이 유계로 남습니다.
- 각 인스턴스는 가정 검사 결과와 방향 에너지 측정 영역을 함께 갖습니다.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import shapely
from loguru import logger
from shapely.geometry import Polygon as ShapelyPolygon

from experiments.assumptions import AssumptionResult, planar_assumptions, spatial_assumptions
from fem.functions import TestFunction
from geometry.shapes import Polygon, Polyhedron

# 계열별 매개변수 범위
CONVEX2D_MAX_HEIGHT = np.sqrt(3.0) / 2.0
CONVEX3D_MAX_HEIGHT = 0.5
NONCONVEX2D_SCALE = 1.0 / np.sqrt(5.0)
NONCONVEX3D_SCALE = 1.0 / 3.0
HEXAGON_RADIUS = 0.5
# D_i 포함 판정 여유 (지름 대비)
REGION_SLACK = 1e-12


class FamilyParameterError(ValueError):
    """계열 매개변수가 범위를 벗어났거나 생성된 영역이 가정을 만족하지 않습니다."""
    pass


class FamilyKind(str, Enum):
    CONVEX2D = "convex2d"
    NONCONVEX2D = "nonconvex2d"
    CONVEX3D = "convex3d"
    NONCONVEX3D = "nonconvex3d"
    CLASS_P = "class_P"

    @property
    def dim(self) -> int:
        return 2 if self in (FamilyKind.CONVEX2D, FamilyKind.NONCONVEX2D) else 3

    @property
    def is_convex(self) -> bool:
        return self in (FamilyKind.CONVEX2D, FamilyKind.CONVEX3D)


@dataclass(frozen=True, eq=False)
class EnergyProbe:
    """∫_region (∂_direction I u)² 를 측정할 방향과 영역 판정 함수."""
    direction: np.ndarray
    region: Callable[[np.ndarray], np.ndarray]
    label: str = ""


@dataclass(frozen=True, eq=False)
class FamilyInstance:
    """계열의 매개변수 하나에 해당하는 영역과 표시된 꼭짓점/변(면)."""
    kind: FamilyKind
    param: float
    domain: Union[Polygon, Polyhedron]
    vertex: int
    element: int
    assumptions: AssumptionResult
    probe: Optional[EnergyProbe] = None
    region: Optional[Polygon] = None

    @property
    def c_v(self) -> float:
        return self.assumptions.c_v

    @property
    def dist(self) -> float:
        return self.assumptions.dist


@dataclass
class FamilySpec:
    """
    계열 실행 설정 객체입니다.
    매개변수는 양수이고 엄격히 감소해야 하며, 시험 함수가 없으면 계열 기본값을 씁니다.
    """
    kind: FamilyKind
    params: List[float]
    u: Optional[TestFunction] = None

    def __post_init__(self):
        self.kind = FamilyKind(self.kind)
        self.params = [float(p) for p in self.params]
        if self.kind is FamilyKind.CLASS_P:
            raise FamilyParameterError("class_P 는 매개변수 계열이 아닙니다 (class_P_check 를 사용하세요).")
        if not self.params:
            raise FamilyParameterError("매개변수 목록이 비어 있습니다.")
        if any(p <= 0 for p in self.params):
            raise FamilyParameterError(f"매개변수는 모두 양수여야 합니다: {self.params}")
        if any(b >= a for a, b in zip(self.params, self.params[1:])):
            raise FamilyParameterError(f"매개변수는 엄격히 감소해야 합니다: {self.params}")
        if self.u is None:
            self.u = TestFunction.x_squared() if self.kind.dim == 2 else TestFunction.radial_squared()
        if self.u.dim != self.kind.dim:
            raise FamilyParameterError(f"시험 함수 차원({self.u.dim})이 계열 차원({self.kind.dim})과 다릅니다.")


def _require(result: AssumptionResult, kind: FamilyKind, param: float) -> None:
    if result.failed:
        raise FamilyParameterError(f"{kind.value}({param}) 가정 위반: {', '.join(result.failed)}")


def gen_convex2d(h: float) -> FamilyInstance:
    """꼭짓점 2 (0,h), 변 0 (밑변). c_v = 1/2."""
    if not 0.0 < h <= CONVEX2D_MAX_HEIGHT:
        raise FamilyParameterError(f"h 는 (0, √3/2] 범위여야 합니다: {h}")
    polygon = Polygon(vertices=[(-0.5, 0.0), (0.5, 0.0), (0.0, h)])
    result = planar_assumptions(polygon, vertex=2, edge=0, convex=True)
    _require(result, FamilyKind.CONVEX2D, h)

    half_width = result.c_v ** 2 / 2.0

    def strip(points: np.ndarray) -> np.ndarray:
        x = points[:, 0]
        return (x >= -half_width - REGION_SLACK) & (x <= REGION_SLACK)

    probe = EnergyProbe(direction=np.array([0.0, 1.0]), region=strip, label="strip x∈[-c²/2,0], ∂/∂y")
    return FamilyInstance(FamilyKind.CONVEX2D, h, polygon, 2, 0, result, probe)


def nonconvex2d_polygon(eps: float, scaled: bool = True) -> Polygon:
    """P_ε: (-1,0), (1,0), (1,1), (0,ε), (-1,1) 반시계 순서. 오목 꼭짓점은 3, 밑변은 변 0."""
    pts = np.array([(-1.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, eps), (-1.0, 1.0)])
    return Polygon(vertices=pts * NONCONVEX2D_SCALE if scaled else pts)


def notch_region(polygon: Polygon, c_v: float) -> Polygon:
    """
    오목 꼭짓점 v 중심의 45° 회전 좌표에서 x̂ ∈ [-c²/2, 0] 이고
    밑변과 v 에서 왼쪽 위 꼭짓점으로 가는 변 사이에 놓인 사각형 D.
    """
    pts = polygon.points
    v, upper_left = pts[3], pts[4]
    x_hat = np.array([1.0, -1.0]) / np.sqrt(2.0)
    width = c_v ** 2 / 2.0
    # 밑변 (y = 0) 위에서 x̂ = 0, x̂ = -width 인 점
    bottom_right = np.array([v[0] - v[1], 0.0])
    bottom_left = bottom_right - np.array([width * np.sqrt(2.0), 0.0])
    # v → 왼쪽 위 꼭짓점 변 위에서 x̂ = -width 인 점
    direction = upper_left - v
    t = -width / float(direction @ x_hat)
    top_left = v + t * direction
    return Polygon(vertices=[bottom_left, bottom_right, v, top_left])


def gen_nonconvex2d(eps: float, scaled: bool = True) -> FamilyInstance:
    """
    꼭짓점 3 (0,ε), 변 0 (밑변). 가정은 항상 1/√5 배 인스턴스에서 검사합니다.
    D ⊄ P_ε 인 매개변수는 거부합니다.
    """
    if not 0.0 < eps < 1.0:
        raise FamilyParameterError(f"ε 는 (0, 1) 범위여야 합니다: {eps}")
    normalized = nonconvex2d_polygon(eps, scaled=True)
    result = planar_assumptions(normalized, vertex=3, edge=0, convex=False)
    _require(result, FamilyKind.NONCONVEX2D, eps)

    region = notch_region(normalized, result.c_v)
    shape = normalized.to_shapely().buffer(REGION_SLACK)
    if not shape.covers(region.to_shapely()):
        raise FamilyParameterError(f"nonconvex2d({eps}): 영역 D 가 P_ε 안에 들어가지 않습니다.")

    if not scaled:
        polygon = nonconvex2d_polygon(eps, scaled=False)
        unscaled = planar_assumptions(polygon, vertex=3, edge=0, convex=False)
        result = AssumptionResult(flags=result.flags, c_v=unscaled.c_v, dist=unscaled.dist)
        return FamilyInstance(FamilyKind.NONCONVEX2D, eps, polygon, 3, 0, result)

    covered = ShapelyPolygon(region.vertices).buffer(REGION_SLACK)

    def inside_d(points: np.ndarray) -> np.ndarray:
        return np.asarray(shapely.intersects_xy(covered, points[:, 0], points[:, 1]), dtype=bool)

    probe = EnergyProbe(direction=np.array([1.0, 1.0]) / np.sqrt(2.0), region=inside_d, label="D, ∂/∂ŷ")
    return FamilyInstance(FamilyKind.NONCONVEX2D, eps, normalized, 3, 0, result, probe, region)


def hexagonal_pyramid(d: float) -> Polyhedron:
    """외접 반지름 1/2 정육각형 밑면 (꼭짓점 0-5) 과 꼭대기 6 = (0,0,d). 면 0 이 중앙 삼각형 (0,2,4)."""
    angles = np.arange(6) * np.pi / 3.0
    base = np.column_stack([HEXAGON_RADIUS * np.cos(angles), HEXAGON_RADIUS * np.sin(angles), np.zeros(6)])
    vertices = np.vstack([base, [0.0, 0.0, d]])
    faces = [(0, 4, 2), (0, 2, 1), (2, 4, 3), (4, 0, 5)]
    faces += [(k, (k + 1) % 6, 6) for k in range(6)]
    return Polyhedron(vertices=vertices, faces=faces)


def gen_convex3d(d: float) -> FamilyInstance:
    """꼭짓점 6 (꼭대기), 면 0 (밑면 중앙 삼각형). c_v = 1/4."""
    if not 0.0 < d <= CONVEX3D_MAX_HEIGHT:
        raise FamilyParameterError(f"d 는 (0, 1/2] 범위여야 합니다: {d}")
    polyhedron = hexagonal_pyramid(d)
    result = spatial_assumptions(polyhedron, vertex=6, face=0)
    _require(result, FamilyKind.CONVEX3D, d)
    radius = result.c_v

    def column(points: np.ndarray) -> np.ndarray:
        return points[:, 0] ** 2 + points[:, 1] ** 2 <= radius ** 2 * (1.0 + REGION_SLACK)

    probe = EnergyProbe(direction=np.array([0.0, 0.0, 1.0]), region=column, label="column r<=c_v, ∂/∂z")
    return FamilyInstance(FamilyKind.CONVEX3D, d, polyhedron, 6, 0, result, probe)


# 13 꼭짓점: 밑면 0-3, 윗면 모서리 4-7, 윗면 변 중점 8-11, 파인 꼭짓점 12
DENTED_BOX_VERTICES = (
    (1, 1, 0), (-1, 1, 0), (1, -1, 0), (-1, -1, 0),
    (1, 1, 1), (-1, 1, 1), (1, -1, 1), (-1, -1, 1),
    (1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1),
)
DENTED_BOX_FACES = (
    (0, 2, 3, 1),                                           # 정사각형 밑면
    (8, 4, 9), (9, 5, 10), (10, 7, 11), (11, 6, 8),         # 윗면 모서리 삼각형
    (8, 9, 12), (9, 10, 12), (10, 11, 12), (11, 8, 12),     # 파인 부분
    (2, 0, 8), (0, 4, 8), (2, 8, 6),                        # x = 1 옆면
    (0, 1, 9), (1, 5, 9), (0, 9, 4),                        # y = 1 옆면
    (1, 3, 10), (3, 7, 10), (1, 10, 5),                     # x = -1 옆면
    (3, 2, 11), (2, 6, 11), (3, 11, 7),                     # y = -1 옆면
)


def dented_box(eps: float, scaled: bool = True) -> Polyhedron:
    vertices = np.vstack([np.asarray(DENTED_BOX_VERTICES, dtype=float), [0.0, 0.0, eps]])
    if scaled:
        vertices = vertices * NONCONVEX3D_SCALE
    return Polyhedron(vertices=vertices, faces=DENTED_BOX_FACES)


def gen_nonconvex3d(eps: float) -> FamilyInstance:
    """꼭짓점 12 (0,0,ε), 면 0 (정사각형 밑면). 지름 3 → 1 로 정규화합니다."""
    if not 0.0 < eps < 1.0:
        raise FamilyParameterError(f"ε 는 (0, 1) 범위여야 합니다: {eps}")
    polyhedron = dented_box(eps)
    result = spatial_assumptions(polyhedron, vertex=12, face=0)
    _require(result, FamilyKind.NONCONVEX3D, eps)
    return FamilyInstance(FamilyKind.NONCONVEX3D, eps, polyhedron, 12, 0, result)


GENERATORS: Dict[FamilyKind, Callable[[float], FamilyInstance]] = {
    FamilyKind.CONVEX2D: gen_convex2d,
    FamilyKind.NONCONVEX2D: gen_nonconvex2d,
    FamilyKind.CONVEX3D: gen_convex3d,
    FamilyKind.NONCONVEX3D: gen_nonconvex3d,
}


def generate(kind: Union[FamilyKind, str], param: float) -> FamilyInstance:
    kind = FamilyKind(kind)
    if kind not in GENERATORS:
        raise FamilyParameterError(f"생성기가 없는 계열입니다: {kind.value}")
    instance = GENERATORS[kind](param)
    logger.debug(f"{kind.value}({param}): dist={instance.dist:.6g}, c_v={instance.c_v:.6g}")
    return instance


def generate_all(spec: FamilySpec) -> List[FamilyInstance]:
    return [generate(spec.kind, p) for p in spec.params]


def parse_params(text: Union[str, Sequence[float]]) -> List[float]:
    """'0.2,0.1,0.05' 형식 문자열 또는 실수 목록을 매개변수 목록으로 바꿉니다."""
    if isinstance(text, str):
        items = [s.strip() for s in text.split(",") if s.strip()]
        try:
            return [float(s) for s in items]
        except ValueError as e:
            raise FamilyParameterError(f"매개변수 형식 오류: {text!r}") from e
    return [float(p) for p in text]
