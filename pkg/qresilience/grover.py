"""
Grover search on a statically noisy register.

The register is prepared as H^n rho_static H^n and evolved with the
iterate G = D O, where O flips the sign of the searched index and D is the
inversion about the mean. P(m) = <s|rho_m|s>.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import MAX_QUBITS, TOLERANCES
from .errors import DegenerateConfigError, DomainError
from .noise import StaticNoiseSpec, static_register
from .qstate import DensityMatrix, PureState, Unitary, apply_local, hadamard_all

logger = logging.getLogger(__name__)

# argmax marker for curves with no oscillation (maximally mixed input)
UNDEFINED_ARGMAX = -1


@dataclass(frozen=True)
class GroverConfig:
    n: int
    searched: int
    noise: StaticNoiseSpec
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise DomainError(f"n must be in [1, {MAX_QUBITS}], got {self.n}", field="n")
        if not 0 <= self.searched < 2 ** self.n:
            raise DomainError(
                f"searched index {self.searched} out of range for {self.n} qubits", field="searched"
            )
        if self.noise.n != self.n:
            raise DomainError(
                f"noise describes {self.noise.n} qubits, register has {self.n}", field="noise"
            )
        if self.max_iterations is None:
            object.__setattr__(self, "max_iterations", default_max_iterations(self.n))
        elif self.max_iterations < 0:
            raise DomainError("max_iterations must be non-negative", field="max_iterations")

    @property
    def size(self):
        return 2 ** self.n


@dataclass(frozen=True, eq=False)
class GroverCurve:
    probabilities: np.ndarray
    first_max_iteration: int
    p_ideal_at_r: Optional[float]
    final_state: DensityMatrix


def uniform_superposition(n):
    if not 1 <= n <= MAX_QUBITS:
        raise DomainError(f"n must be in [1, {MAX_QUBITS}], got {n}", field="n")
    return PureState(n, np.full(2 ** n, 1 / np.sqrt(2 ** n), dtype=complex))


def oracle_operator(n, searched):
    if not 0 <= searched < 2 ** n:
        raise DomainError(f"searched index {searched} out of range", field="searched")
    diagonal = np.ones(2 ** n)
    diagonal[searched] = -1.0
    return Unitary(n, np.diag(diagonal))


def diffusion_operator(n):
    """2|0~><0~| - I."""
    mean = uniform_superposition(n).amplitudes
    return Unitary(n, 2 * np.outer(mean, mean.conj()) - np.eye(2 ** n))


def optimal_iterations(size):
    """Closest integer to arccos(sqrt(1/L)) / (2 arccos(sqrt((L-1)/L)))."""
    if size < 2 or size & (size - 1):
        raise DomainError(f"database size must be a power of two >= 2, got {size}", field="size")
    x = np.arccos(np.sqrt(1 / size)) / (2 * np.arccos(np.sqrt((size - 1) / size)))
    return int(np.floor(x + 0.5))


def default_max_iterations(n):
    # a full oscillation of the success probability
    return 2 * (2 * optimal_iterations(2 ** n) + 1)


def first_local_maximum(probabilities, tol=TOLERANCES.flat_curve):
    """Index of the first strict local maximum, or UNDEFINED_ARGMAX for a flat curve."""
    probabilities = np.asarray(probabilities)
    if probabilities.size == 0 or np.ptp(probabilities) < tol:
        return UNDEFINED_ARGMAX
    for m in range(probabilities.size - 1):
        if probabilities[m + 1] < probabilities[m] - tol:
            return m
    return int(probabilities.size - 1)


def prepared_register(noise):
    """H^n rho_static H^n."""
    rho = static_register(noise)
    return apply_local(rho, hadamard_all(noise.n), range(1, noise.n + 1))


def grover_iterate(n, searched):
    return Unitary(n, diffusion_operator(n).elements @ oracle_operator(n, searched).elements)


def _curve(config):
    rho = prepared_register(config.noise)
    g = grover_iterate(config.n, config.searched).elements
    g_dag = g.conj().T
    elements = rho.elements
    probabilities = [elements[config.searched, config.searched].real]
    for _ in range(config.max_iterations):
        elements = g @ elements @ g_dag
        probabilities.append(elements[config.searched, config.searched].real)
    return np.array(probabilities), DensityMatrix(config.n, (elements + elements.conj().T) / 2)


def run_grover(config):
    probabilities, final_state = _curve(config)
    r_obs = first_local_maximum(probabilities)
    p_ideal = None
    if r_obs != UNDEFINED_ARGMAX:
        p_ideal = float(closed_form_probability(config.n, (1.0,) * config.n, r_obs))
    logger.debug(
        "grover n=%d s=%d lambdas=%s: first max at m=%s", config.n, config.searched,
        config.noise.lambdas, r_obs,
    )
    return GroverCurve(probabilities, r_obs, p_ideal, final_state)


def closed_form_probability(n, lambdas, m):
    """
    P(m) = A sin^2((2m+1) t) + B cos^2((2m+1) t), sin t = 1/sqrt(L).

    A is the all-zeros population prod(lambda_j); the rest of the mixture
    sits orthogonal to the uniform superposition and contributes through
    B = (1 - A)/(L - 1) independently of the searched index.
    """
    size = 2 ** n
    a = float(np.prod(lambdas))
    b = (1.0 - a) / (size - 1)
    angle = (2 * np.asarray(m) + 1) * np.arcsin(1 / np.sqrt(size))
    return a * np.sin(angle) ** 2 + b * np.cos(angle) ** 2


def _ideal_first_maximum(n, searched):
    ideal = run_grover(GroverConfig(n, searched, StaticNoiseSpec.symmetric(1.0, n)))
    if ideal.first_max_iteration == UNDEFINED_ARGMAX:
        raise DegenerateConfigError(f"ideal curve for n={n} has no maximum")
    m = ideal.first_max_iteration
    return m, float(ideal.probabilities[m])


def normalized_probability(n, searched, noise):
    """P / P_ideal, both at the first maximum of the noiseless curve."""
    m, p_ideal = _ideal_first_maximum(n, searched)
    if p_ideal < TOLERANCES.degenerate_ideal:
        raise DegenerateConfigError(f"ideal probability {p_ideal:.3e} at m={m} is degenerate")
    curve = run_grover(GroverConfig(n, searched, noise, max_iterations=m))
    return float(curve.probabilities[m]) / p_ideal


def normalized_probability_table(n, lambda_grid, searched=0):
    """Rows (lambda, P_norm, lambda^n) for symmetric noise."""
    rows = []
    for lam in lambda_grid:
        value = normalized_probability(n, searched, StaticNoiseSpec.symmetric(float(lam), n))
        rows.append((float(lam), value, float(lam) ** n))
    return rows


def period_invariance_scan(n, searched, lambda_grid, max_iterations=None):
    """
    Rows (lambda, argmax m) over the first oscillation m in [0, 2R].

    Curves with no oscillation report UNDEFINED_ARGMAX.
    """
    window = 2 * optimal_iterations(2 ** n)
    rows = []
    for lam in lambda_grid:
        lam = float(lam)
        if not 0.0 < lam <= 1.0:
            raise DomainError(f"lambda grid must lie in (0, 1], got {lam}", field="lambda_grid")
        config = GroverConfig(n, searched, StaticNoiseSpec.symmetric(lam, n),
                              max_iterations=max(window, max_iterations or 0))
        probabilities = run_grover(config).probabilities[: window + 1]
        if np.ptp(probabilities) < TOLERANCES.flat_curve:
            rows.append((lam, UNDEFINED_ARGMAX))
        else:
            rows.append((lam, int(np.argmax(probabilities))))
    logger.info("period scan n=%d: %d lambda points", n, len(rows))
    return rows


def grover_scan_rows(n, searched, lambda_grid, max_iterations=None):
    """Long-format rows (lambda, m, P) for the probability surface."""
    rows = []
    for lam in lambda_grid:
        config = GroverConfig(n, searched, StaticNoiseSpec.symmetric(float(lam), n), max_iterations)
        for m, p in enumerate(run_grover(config).probabilities):
            rows.append((float(lam), m, float(p)))
    return rows
