"""
qresilience: density-matrix reproduction harness for the noise resilience
of Grover search and the GHZ-based quantum average algorithm.
"""

from .config import TOOL_VERSION as __version__
from .errors import (
    ChannelDropError,
    DegenerateConfigError,
    DomainError,
    NumericError,
    QResilienceError,
    UsageError,
)

__all__ = [
    "__version__",
    "ChannelDropError",
    "DegenerateConfigError",
    "DomainError",
    "NumericError",
    "QResilienceError",
    "UsageError",
]
