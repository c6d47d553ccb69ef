import os
import sys

import pytest

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if BASE_DIR not in sys.path:
    sys.path.insert(0, BASE_DIR)

import cli.settings as settings_module  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 인수 기준 규모의 느린 실행 (-m 'not slow' 로 제외)")


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """테스트마다 환경 변수와 전역 설정을 초기화합니다."""
    for key in list(os.environ):
        if key.startswith("GBCLAB_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.setattr(settings_module, "_settings", None)
    yield
