"""
계열 결과 분석 (Rate Fitting)
"""

from typing import Sequence, Tuple

import numpy as np


def _column(rows: Sequence, name: str) -> np.ndarray:
    return np.array([getattr(r, name) if not isinstance(r, dict) else r[name] for r in rows], dtype=float)


def _finite_rows(rows: Sequence, *names: str) -> list:
    keep = []
    for r in rows:
        values = [getattr(r, n) if not isinstance(r, dict) else r[n] for n in names]
        if all(np.isfinite(v) for v in values):
            keep.append(r)
    return keep


def fit_loglog_slope(rows: Sequence, x_field: str = "dist", y_field: str = "h1_error") -> float:
    """log y 대 log x 의 최소제곱 기울기. 실패 행(NaN)은 건너뜁니다."""
    rows = _finite_rows(rows, x_field, y_field)
    if len(rows) < 3:
        raise ValueError(f"기울기 추정에는 유효한 행이 3개 이상 필요합니다: {len(rows)}개")
    x, y = _column(rows, x_field), _column(rows, y_field)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("로그 기울기는 양수 데이터에서만 계산합니다.")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def fit_log_growth(rows: Sequence, x_field: str = "dist", y_field: str = "h1_error") -> Tuple[float, float, float]:
    """
    y² 를 ln(1/x) 에 대해 직선 회귀합니다.
    (기울기, 절편, 결정계수 R²) 를 반환합니다.
    """
    rows = _finite_rows(rows, x_field, y_field)
    if len(rows) < 3:
        raise ValueError(f"회귀에는 유효한 행이 3개 이상 필요합니다: {len(rows)}개")
    x, y = _column(rows, x_field), _column(rows, y_field)
    if np.any(x <= 0):
        raise ValueError("x 는 양수여야 합니다.")
    t, energy = np.log(1.0 / x), y ** 2
    slope, intercept = np.polyfit(t, energy, 1)
    residual = energy - (slope * t + intercept)
    spread = np.sum((energy - energy.mean()) ** 2)
    r_squared = 1.0 - np.sum(residual ** 2) / spread if spread > 0 else 1.0
    return float(slope), float(intercept), float(r_squared)


def coefficient_of_variation(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if len(values) == 0:
        raise ValueError("유효한 값이 없습니다.")
    mean = values.mean()
    if mean == 0:
        raise ValueError("평균이 0이라 변동계수를 정의할 수 없습니다.")
    return float(values.std() / abs(mean))


def ratio_spread(rows: Sequence, last: int = 3, field: str = "ratio") -> float:
    """마지막 last 개 행에서 max/min."""
    values = _column(_finite_rows(rows, field), field)[-last:]
    if len(values) == 0 or np.any(values <= 0):
        raise ValueError("양수 비율 값이 필요합니다.")
    return float(values.max() / values.min())
