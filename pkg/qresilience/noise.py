"""
Noisy register preparation.

Static noise prepares qubit j in diag(lambda_j, 1 - lambda_j): lambda_j is
the probability that the qubit starts in |0> as intended. White noise mixes
the GHZ projector with the maximally mixed state.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_LAMBDA_POINTS
from .errors import DomainError
from .qstate import DensityMatrix, PureState

logger = logging.getLogger(__name__)


def _check_probability(value, field):
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{field} must lie in [0, 1], got {value}", field=field)
    return float(value)


@dataclass(frozen=True)
class StaticNoiseSpec:
    lambdas: tuple

    def __post_init__(self):
        lambdas = tuple(_check_probability(float(v), "lambda") for v in self.lambdas)
        if not lambdas:
            raise DomainError("at least one lambda is required", field="lambdas")
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def n(self):
        return len(self.lambdas)

    @classmethod
    def symmetric(cls, lam, n):
        return cls((lam,) * n)

    @classmethod
    def from_purity(cls, tau, n):
        """Symmetric noise with purity tau, taking the lambda >= 1/2 root."""
        return cls.symmetric(lambda_from_purity(tau), n)

    def swapped(self, i, j):
        lambdas = list(self.lambdas)
        lambdas[i], lambdas[j] = lambdas[j], lambdas[i]
        return StaticNoiseSpec(tuple(lambdas))


@dataclass(frozen=True)
class WhiteNoiseSpec:
    tau_tilde: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "tau_tilde", _check_probability(float(self.tau_tilde), "tau_tilde"))
        if self.n < 1:
            raise DomainError(f"white noise needs at least one qubit, got {self.n}", field="n")


@dataclass(frozen=True)
class PurityParameter:
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "tau", _check_probability(float(self.tau), "tau"))


def static_qubit(lam):
    lam = _check_probability(lam, "lambda")
    return DensityMatrix(1, np.diag([lam, 1.0 - lam]))


def static_populations(spec):
    """Diagonal of the static register: p_b = prod lambda_j^(1-b_j) (1-lambda_j)^b_j."""
    populations = np.ones(1)
    for lam in spec.lambdas:
        populations = np.kron(populations, [lam, 1.0 - lam])
    return populations


def static_register(spec):
    return DensityMatrix(spec.n, np.diag(static_populations(spec)).astype(complex))


def purity_from_lambda(lam):
    lam = _check_probability(lam, "lambda")
    return PurityParameter(abs(2.0 * lam - 1.0))


def lambda_from_purity(tau):
    tau = tau.tau if isinstance(tau, PurityParameter) else _check_probability(tau, "tau")
    return (1.0 + tau) / 2.0


def ghz_state(n):
    """(|0...0> + |1...1>)/sqrt(2) on n qubits."""
    amplitudes = np.zeros(2 ** n, dtype=complex)
    amplitudes[0] = amplitudes[-1] = 1 / np.sqrt(2)
    return PureState(n, amplitudes)


def white_noise_ghz(spec):
    """tau~ |GHZ><GHZ| + (1 - tau~) I / 2^n."""
    psi = ghz_state(spec.n).amplitudes
    dim = 2 ** spec.n
    elements = spec.tau_tilde * np.outer(psi, psi.conj()) + (1.0 - spec.tau_tilde) * np.eye(dim) / dim
    return DensityMatrix(spec.n, elements)


def lambda_grid(points=DEFAULT_LAMBDA_POINTS, start=0.0, stop=1.0):
    if points < 1:
        raise DomainError(f"grid needs at least one point, got {points}", field="points")
    return np.linspace(start, stop, points)
