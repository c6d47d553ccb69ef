"""
실행 환경 설정 (Lab Settings)
- GBCLAB_ 접두사 환경 변수와 .env 파일에서 값을 읽습니다.
- 명령행 플래그가 주어지면 override_settings 로 덮어씁니다.
"""

from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_settings: Optional['LabSettings'] = None


class LabSettings(BaseSettings):
    """수치 실험실 전역 설정"""
    model_config = SettingsConfigDict(env_prefix="GBCLAB_", env_file=".env", extra="ignore")

    threads: Optional[int] = Field(None, ge=1, description="내부 병렬 작업 스레드 상한")
    log_level: str = Field("INFO", description="로그 레벨")
    level_2d: int = Field(5, ge=0, description="2차원 균일 세분 단계")
    level_3d: int = Field(3, ge=0, description="3차원 균일 세분 단계")
    tol: float = Field(1e-10, gt=0, description="선형 시스템 상대 잔차 허용치")
    solver: Literal["direct", "cg"] = Field("direct", description="디리클레 솔버 방식")
    seed: int = Field(0, ge=0, description="무작위 검증 시드")

    @field_validator('log_level', mode='before')
    @classmethod
    def normalize_level(cls, v: str) -> str:
        return str(v).strip().upper()


def get_settings() -> LabSettings:
    global _settings
    if _settings is None:
        _settings = LabSettings()
    return _settings


def override_settings(**overrides) -> LabSettings:
    """None 이 아닌 값만 반영한 새 설정으로 교체합니다."""
    global _settings
    current = get_settings()
    updates = {k: v for k, v in overrides.items() if v is not None}
    _settings = LabSettings(**{**current.model_dump(), **updates})
    return _settings
