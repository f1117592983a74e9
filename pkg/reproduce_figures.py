#!/usr/bin/env python3
"""
Regenerate every result table and plot script into results/.

Each step is one CLI invocation; a failing step is reported and the
remaining steps still run.
"""

import sys
from datetime import datetime

from qresilience.cli import main as cli_main
from qresilience.config import RESULTS_DIR

STEPS = [
    ("Grover n=2", ["grover-scan", "--n", "2", "--out", str(RESULTS_DIR / "grover_n2.csv")]),
    ("Grover n=3", ["grover-scan", "--n", "3", "--out", str(RESULTS_DIR / "grover_n3.csv")]),
    ("Grover n=4", ["grover-scan", "--n", "4", "--out", str(RESULTS_DIR / "grover_n4.csv")]),
    ("Average, original variant", ["average-run", "--variant", "original", "--swap"]),
    ("Average, ruler variant", ["average-run", "--variant", "ruler", "--swap"]),
    ("Resilience threshold", ["tolerance-scan"]),
    ("Negativity, traced ruler", ["negativity-scan", "--mode", "traced-ruler"]),
    ("Negativity, traced register", ["negativity-scan", "--mode", "traced-register"]),
    ("Negativity, non-traced", ["negativity-scan", "--mode", "nontraced"]),
    ("White noise", ["white-noise"]),
    ("Theta halving", ["theta-halving", "--values", "0.0625,0.0625,0.0625"]),
    ("Distributed run", ["distributed", "--alpha", "2000"]),
]


def main():
    print("=" * 60)
    print("qresilience - Figure Reproduction")
    print("=" * 60)
    print(f"Date: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print(f"Output: {RESULTS_DIR}\n")

    failed = []
    for name, argv in STEPS:
        print(f"\n--- {name} ---")
        if cli_main(argv) != 0:
            failed.append(name)

    print("\n" + "=" * 60)
    if failed:
        print(f"[-] {len(failed)}/{len(STEPS)} steps failed: {', '.join(failed)}")
        return 1
    print(f"[+] All {len(STEPS)} steps completed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
