"""
영역 파일 입출력 (Domain File)
- {"kind": "polygon", "vertices": [[x, y], ...]}
- {"kind": "polyhedron", "vertices": [[x, y, z], ...], "faces": [[i, j, k], ...]}
- json 모듈은 실수를 repr 로 쓰므로 저장 후 다시 읽으면 좌표가 비트 단위로 같습니다.
"""

import json
from pathlib import Path
from typing import List, Literal, Optional, Union

from loguru import logger
from pydantic import BaseModel, Field, ValidationError, model_validator

from geometry.shapes import Polygon, Polyhedron

Domain = Union[Polygon, Polyhedron]


class DomainFileError(Exception):
    """영역 파일을 읽거나 해석할 수 없습니다 (JSON 문법, 스키마, 기하 불변식)."""
    pass


class DomainFile(BaseModel):
    """영역 파일 스키마"""
    kind: Literal["polygon", "polyhedron"] = Field(..., description="영역 종류")
    vertices: List[List[float]] = Field(..., min_length=3, description="꼭짓점 좌표")
    faces: Optional[List[List[int]]] = Field(None, description="면 꼭짓점 인덱스 (다면체만)")

    @model_validator(mode='after')
    def check_faces(self) -> 'DomainFile':
        if self.kind == "polyhedron" and not self.faces:
            raise ValueError("다면체에는 faces 가 필요합니다.")
        if self.kind == "polygon" and self.faces is not None:
            raise ValueError("다각형에는 faces 를 쓰지 않습니다.")
        return self

    def to_domain(self) -> Domain:
        if self.kind == "polygon":
            return Polygon(vertices=self.vertices)
        return Polyhedron(vertices=self.vertices, faces=self.faces)

    @classmethod
    def from_domain(cls, domain: Domain) -> 'DomainFile':
        vertices = [list(p) for p in domain.vertices]
        if isinstance(domain, Polyhedron):
            return cls(kind="polyhedron", vertices=vertices, faces=[list(f) for f in domain.faces])
        return cls(kind="polygon", vertices=vertices)


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        path = ".".join(str(p) for p in item['loc']) or "(root)"
        parts.append(f"{path}: {item['msg']}")
    return "; ".join(parts)


def parse_domain(text: str, source: str = "<string>") -> Domain:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise DomainFileError(f"{source}:{e.lineno}:{e.colno}: JSON 문법 오류 ({e.msg})") from e
    try:
        return DomainFile.model_validate(raw).to_domain()
    except ValidationError as e:
        raise DomainFileError(f"{source}: {_describe(e)}") from e


def load_domain(path: Union[str, Path]) -> Domain:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise DomainFileError(f"영역 파일을 읽을 수 없습니다: {path} ({e})") from e
    domain = parse_domain(text, source=str(path))
    logger.debug(f"영역 파일 로드: {path} ({type(domain).__name__}, 꼭짓점 {len(domain.vertices)}개)")
    return domain


def save_domain(domain: Domain, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = DomainFile.from_domain(domain).model_dump(exclude_none=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(document, f, indent=2)
    logger.info(f"영역 파일 저장 완료: {path}")
    return path
