#!/usr/bin/env python3
"""
Run the qresilience acceptance suite.

Prints PASS/FAIL per criterion; exit status 0 only when every criterion passes.
"""

import argparse
import logging
import sys

from qresilience.acceptance import CRITERIA, main as run_suite


def main():
    parser = argparse.ArgumentParser(
        description="Run the acceptance suite",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python3 run_acceptance.py
  python3 run_acceptance.py --only 1,2,3
        """,
    )
    parser.add_argument("--only", help="Comma-separated criterion ids")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    args = parser.parse_args()

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    only = None
    if args.only:
        known = {criterion_id for criterion_id, _, _ in CRITERIA}
        try:
            only = {int(v) for v in args.only.split(",")}
        except ValueError:
            print(f"[-] cannot parse --only {args.only!r}", file=sys.stderr)
            return 2
        if not only <= known:
            print(f"[-] unknown criteria: {sorted(only - known)}", file=sys.stderr)
            return 2
    return run_suite(only=only)


if __name__ == "__main__":
    sys.exit(main())
