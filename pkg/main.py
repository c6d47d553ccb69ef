import argparse
import sys

from loguru import logger

from cdt.mesh import MeshError
from cli.commands import (
    DEFAULT_GRID, EXIT_NUMERICAL, EXIT_USAGE, FAMILY_CHOICES, UsageError, cmd_audit, cmd_coords, cmd_family,
    cmd_verify,
)
from cli.domain_file import DomainFileError
from cli.settings import get_settings, override_settings
from experiments.verifiers import SUITES
from fem.solver import SolverError
from geometry.metrics import GeometryError

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <level>{message}</level>"


def configure_logging(level: str) -> None:
    """로깅 설정: 시간 | 레벨 | 메시지만 표준 에러로 출력"""
    logger.remove()
    logger.add(sys.stderr, format=LOG_FORMAT, level=level)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="조화 일반화 무게중심 좌표 수치 실험 도구")

    # 전역 옵션 (환경 변수 GBCLAB_* 보다 우선)
    parser.add_argument("--seed", type=int, default=None, help="무작위 검증 시드")
    parser.add_argument("--log-level", default=None, help="로그 레벨 (기본: INFO)")
    parser.add_argument("--threads", type=int, default=None, help="내부 병렬 스레드 상한")

    sub = parser.add_subparsers(dest="command", required=True)

    coords = sub.add_parser("coords", help="조화 좌표 표본 추출")
    coords.add_argument("domain", help="다각형 영역 파일 (JSON)")
    coords.add_argument("vertex", type=int, nargs="?", default=None, help="꼭짓점 인덱스 (생략 시 전체)")
    coords.add_argument("--level", type=int, default=None, help="균일 세분 단계")
    coords.add_argument("--tol", type=float, default=None, help="솔버 허용치")
    coords.add_argument("--out", default="coords", help="출력 디렉토리")
    coords.add_argument("--grid", type=int, default=DEFAULT_GRID, help="축당 표본 점 수")

    audit = sub.add_parser("audit", help="CDT 품질 감사")
    audit.add_argument("domain", help="다각형 영역 파일 (JSON)")
    audit.add_argument("--out", default=None, help="보고서 저장 경로 (선택)")

    family = sub.add_parser("family", help="퇴화 계열 실험")
    family.add_argument("--family", required=True, choices=FAMILY_CHOICES, help="계열 이름")
    family.add_argument("--params", required=True, help="감소하는 매개변수 목록 (예: 0.2,0.1,0.05)")
    family.add_argument("--level", type=int, default=None, help="균일 세분 단계")
    family.add_argument("--tol", type=float, default=None, help="솔버 허용치")
    family.add_argument("--out", default="results.csv", help="결과 CSV 경로")

    verify = sub.add_parser("verify", help="무작위 검증 스위트")
    verify.add_argument("--suite", default="all", choices=SUITES + ("all",), help="스위트 이름")
    verify.add_argument("--cases", type=int, default=None, help="사례 수 (기본: 스위트별)")
    return parser


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "coords":
        return cmd_coords(args.domain, args.vertex, level=args.level, tol=args.tol, out=args.out,
                          grid=args.grid, seed=args.seed)
    if args.command == "audit":
        return cmd_audit(args.domain, out=args.out)
    if args.command == "family":
        return cmd_family(args.family, args.params, level=args.level, tol=args.tol, out=args.out,
                          threads=args.threads)
    return cmd_verify(args.suite, seed=args.seed, cases=args.cases)


def main(argv=None) -> int:
    """메인 엔트리 포인트. 종료 코드: 0 성공, 1 반례, 2 사용법/파싱 오류, 3 수치 실패."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = override_settings(seed=args.seed, log_level=args.log_level, threads=args.threads)
    except ValueError as e:
        configure_logging(get_settings().log_level)
        logger.error(f"설정 오류: {e}")
        return EXIT_USAGE
    configure_logging(settings.log_level)

    try:
        return dispatch(args)
    except (DomainFileError, UsageError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except (SolverError, GeometryError, MeshError) as e:
        logger.error(f"수치 계산 실패: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
