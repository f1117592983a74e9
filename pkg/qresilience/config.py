"""
Configuration for the noise-resilience harness.

Numeric tolerances live in one frozen record; run defaults are plain
module constants, the same way the collection runners keep BASE_DIR and
friends at module level.
"""

import os
from dataclasses import dataclass
from pathlib import Path

TOOL_VERSION = "1.0.0"

BASE_DIR = Path(__file__).resolve().parent.parent
RESULTS_DIR = Path(os.environ.get("QRESILIENCE_RESULTS_DIR", BASE_DIR / "results"))

MAX_QUBITS = 12
DEFAULT_SEED = 20080101
DEFAULT_LAMBDA_POINTS = 101

# theta-halving loop
THETA_START = 0.5
THETA_DIVISOR = 2.0
HALVING_GUARD = 64
RATIO_ACCEPT = 0.5

# parameter set used throughout the fidelity / distance-ratio figures
REFERENCE_VALUES = (-0.775, 0.25, 0.675)
REFERENCE_THETA = 0.0625

CSV_FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    trace: float = 1e-12
    psd_floor: float = -1e-9
    normalization: float = 1e-12
    unitary: float = 1e-12
    branch_floor: float = 1e-14
    probability_slack: float = 1e-9
    decomposable: float = 1e-8
    degenerate_ideal: float = 1e-12
    flat_curve: float = 1e-12


TOLERANCES = Tolerances()
