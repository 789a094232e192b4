import argparse
import sys

from .frontend import run


def main() -> int:
    parser = argparse.ArgumentParser(prog="python3 -m pamp.minismt")
    parser.add_argument(
        "--timeout",
        type=float,
        default=None,
        help="per check-sat budget in seconds; exceeded checks answer unknown",
    )
    args = parser.parse_args()
    return run(sys.stdin, sys.stdout, timeout=args.timeout)


if __name__ == "__main__":
    raise SystemExit(main())
