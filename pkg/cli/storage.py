"""
결과 저장 (Result Storage)
- 계열 결과 CSV: 고정 헤더, 매개변수 내림차순, 실수는 유효숫자 17자리 (double 을 그대로 복원).
- 전체 행(보조 필드 포함)과 각종 보고서는 JSON 으로 저장합니다.
- 같은 입력이면 바이트 단위로 같은 파일을 씁니다.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import numpy as np
from loguru import logger

from experiments.runner import ExperimentRow

CSV_COLUMNS = ("family", "param", "dist", "h1_error", "h2_seminorm", "ratio", "paper_bound", "max_circumradius")


def format_float(value: float) -> str:
    return format(float(value), '.17g')


def _json_safe(value: Any) -> Any:
    """NaN/inf 는 JSON 표준에 없으므로 문자열로 바꿉니다."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _prepare(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def save_rows_csv(rows: Sequence[ExperimentRow], path: Union[str, Path]) -> Path:
    path = _prepare(path)
    ordered = sorted(rows, key=lambda r: r.param, reverse=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for row in ordered:
            writer.writerow([row.family] + [format_float(getattr(row, c)) for c in CSV_COLUMNS[1:]])
    logger.info(f"결과 저장 완료: {path} ({len(ordered)}행)")
    return path


def save_rows_json(rows: Sequence[ExperimentRow], path: Union[str, Path]) -> Path:
    path = _prepare(path)
    ordered = sorted(rows, key=lambda r: r.param, reverse=True)
    save_json([row.model_dump() for row in ordered], path)
    return path


def load_rows_csv(path: Union[str, Path]) -> List[dict]:
    """CSV 를 다시 읽어 family 외 열은 실수로 바꾼 dict 목록을 돌려줍니다."""
    with open(path, 'r', encoding='utf-8', newline='') as f:
        reader = csv.DictReader(f)
        return [{k: (v if k == "family" else float(v)) for k, v in record.items()} for record in reader]


def save_json(document: Any, path: Union[str, Path]) -> Path:
    path = _prepare(path)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(_json_safe(document), f, ensure_ascii=False, indent=2)
    logger.debug(f"JSON 저장: {path}")
    return path


def save_grid_csv(points: np.ndarray, values: Iterable[float], path: Union[str, Path]) -> Path:
    """좌표 함수 표본 (x, y, value)."""
    path = _prepare(path)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(("x", "y", "value"))
        for (x, y), value in zip(np.asarray(points, dtype=float).tolist(), values):
            writer.writerow((format_float(x), format_float(y), format_float(value)))
    return path
