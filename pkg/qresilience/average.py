"""
The quantum average algorithm on a noisy GHZ resource.

Pipeline: GHZ preparation (H on qubit 1, CNOT fan-out), per-qubit phase
shifts R(nu_j / (N theta)), sigma_x measurement of every qubit but the
first, parity byproduct correction R(pi) on qubit 1, and a final H
readout of that qubit. The "original" variant phase-shifts all N qubits
including qubit 1; the "ruler" variant adds a pure, unshifted qubit 1 in
front of the N register qubits.

Exact mode carries the full branch-weighted mixture. Sampled mode draws
alpha trajectories from one numpy Generator, consuming for every round one
uniform per measured qubit (ascending qubit order) and one for the ruler
readout. The distributed harness replays the same stream.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .config import (
    DEFAULT_SEED,
    HALVING_GUARD,
    RATIO_ACCEPT,
    THETA_DIVISOR,
    THETA_START,
    TOLERANCES,
)
from .errors import DomainError, NumericError
from .noise import (
    PurityParameter,
    StaticNoiseSpec,
    WhiteNoiseSpec,
    static_qubit,
    static_register,
    white_noise_ghz,
)
from .qstate import (
    CNOT,
    HADAMARD,
    DensityMatrix,
    PureState,
    apply_gate,
    apply_local,
    apply_local_matrix,
    fidelity_with_pure,
    phase_gate,
    tensor,
)

logger = logging.getLogger(__name__)

ORIGINAL = "original"
RULER = "ruler"
VARIANTS = (ORIGINAL, RULER)

# R(pi) = diag(-1, 1)
BYPRODUCT = phase_gate(np.pi)


@dataclass(frozen=True)
class SampledMode:
    alpha: int
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.alpha < 1:
            raise DomainError(f"alpha must be >= 1, got {self.alpha}", field="alpha")


@dataclass(frozen=True)
class AverageConfig:
    values: tuple
    theta: float
    variant: str = RULER
    noise: Optional[Union[StaticNoiseSpec, WhiteNoiseSpec]] = None
    mode: Optional[SampledMode] = None  # None means exact

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise DomainError("at least one value is required", field="values")
        for v in values:
            if not -1.0 <= v <= 1.0:
                raise DomainError(f"values must lie in [-1, 1], got {v}", field="values")
        if not self.theta > 0:
            raise DomainError(f"theta must be positive, got {self.theta}", field="theta")
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}", field="variant")
        if self.variant == ORIGINAL and len(values) < 2:
            raise DomainError("original variant needs at least two values", field="values")
        if self.noise is None:
            object.__setattr__(self, "noise", StaticNoiseSpec.symmetric(1.0, len(values)))
        expected = self.total_qubits if isinstance(self.noise, WhiteNoiseSpec) else len(values)
        if self.noise.n != expected:
            raise DomainError(
                f"noise describes {self.noise.n} qubits, expected {expected}", field="noise"
            )

    @property
    def n_values(self):
        return len(self.values)

    @property
    def total_qubits(self):
        return self.n_values + (1 if self.variant == RULER else 0)

    @property
    def mu(self):
        return float(np.mean(self.values))

    @property
    def true_ratio(self):
        return abs(self.mu) / self.theta

    @property
    def sampled(self):
        return self.mode is not None


@dataclass(frozen=True, eq=False)
class AverageReport:
    p_zero: float
    ratio_estimate: float
    fidelity: float
    distance_ratio: float
    byproduct_parity_histogram: Optional[dict] = None
    ruler_state: Optional[DensityMatrix] = field(default=None, repr=False)


@dataclass(frozen=True)
class SymmetricSum:
    l: int
    m: int
    value: float


@dataclass(frozen=True, eq=False)
class BranchTable:
    """
    Joint distribution of the sigma_x outcomes with the corrected ruler p0.

    Branch index k encodes the measured bits with the lowest measured qubit
    as the most significant bit. conditional_zero[j][prefix] is the
    probability that measurement j+1 yields 0 (|+>) given the first j bits.
    """

    measured: tuple
    probabilities: np.ndarray
    p_zero: np.ndarray
    conditional_zero: tuple
    p_zero_miscorrected: np.ndarray

    @property
    def width(self):
        return len(self.measured)

    def exact_p_zero(self):
        return float(np.dot(self.probabilities, self.p_zero))

    def next_outcome(self, prefix, depth, u):
        """Outcome of the measurement after `depth` bits with value `prefix`."""
        return 0 if u < self.conditional_zero[depth][prefix] else 1

    def ruler_outcome(self, branch, u, corrected=True):
        """Readout for branch `branch`; corrected=False means the wrong byproduct was applied."""
        p_zero = self.p_zero if corrected else self.p_zero_miscorrected
        return 0 if u < p_zero[branch] else 1


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    outcomes: np.ndarray  # (alpha, width) uint8, 1 means |->
    ruler: np.ndarray  # (alpha,) uint8

    @property
    def parities(self):
        return (self.outcomes.sum(axis=1) % 2).astype(np.uint8)

    @property
    def alpha(self):
        return int(self.ruler.size)

    def p_zero(self):
        return float(np.mean(self.ruler == 0))

    def parity_histogram(self):
        parities = self.parities
        return {0: int(np.sum(parities == 0)), 1: int(np.sum(parities == 1))}


@dataclass(frozen=True)
class HalvingResult:
    theta: float
    applications: int
    estimate: float
    converged: bool


@dataclass(frozen=True)
class WorstCase:
    n: int
    taus: tuple
    argmaxes: tuple

    @property
    def argument(self):
        """Per-index phase nu/(N theta) maximizing the deviation at the last tau."""
        return self.argmaxes[-1]

    @property
    def spread(self):
        return float(max(self.argmaxes) - min(self.argmaxes))

    def nu_tilde(self, theta):
        return self.argument * self.n * theta


@dataclass(frozen=True, eq=False)
class ToleranceCurve:
    n: int
    taus: np.ndarray
    max_distance: np.ndarray
    arguments: np.ndarray
    threshold: Optional[float]

    @property
    def monotone(self):
        return bool(np.all(np.diff(self.max_distance) <= TOLERANCES.probability_slack))


# Circuit stages

def ghz_prepare(rho):
    if rho.n < 2:
        raise DomainError(f"GHZ preparation needs >= 2 qubits, got {rho.n}", field="input")
    rho = apply_local(rho, HADAMARD, [1])
    for j in range(2, rho.n + 1):
        rho = apply_local(rho, CNOT, [1, j])
    return rho


def phase_targets(n_values, variant):
    first = 1 if variant == ORIGINAL else 2
    return list(range(first, first + n_values))


def phase_angle(value, n_values, theta):
    return value / (n_values * theta)


def phase_angles(values, theta):
    return [phase_angle(v, len(values), theta) for v in values]


def phase_shift_stage(rho, values, theta, variant):
    if variant not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r}", field="variant")
    expected = len(values) + (1 if variant == RULER else 0)
    if rho.n != expected:
        raise DomainError(
            f"{len(values)} values need a {expected}-qubit register, got {rho.n}", field="values"
        )
    for qubit, angle in zip(phase_targets(len(values), variant), phase_angles(values, theta)):
        rho = apply_local(rho, phase_gate(angle), [qubit])
    return rho


def _project_out(elements, m, position, bit):
    """Block of an m-qubit raw matrix with qubit `position` (0-based) fixed to `bit`."""
    view = np.asarray(elements).reshape((2,) * (2 * m))
    block = np.take(np.take(view, bit, axis=m + position), bit, axis=position)
    half = 2 ** (m - 1)
    return block.reshape(half, half)


def _corrected(block, parity):
    if parity:
        return apply_local_matrix(block, 1, BYPRODUCT, [1])
    return block


def measure_and_correct(rho, order=None, correct=True):
    """
    Exact-mode sigma_x measurement of qubits 2..n with parity correction.

    Outcomes are folded into two unnormalized accumulators keyed by the
    running parity of |-> results; the odd one gets R(pi) on qubit 1.
    """
    if rho.n < 2:
        raise DomainError(f"need at least 2 qubits, got {rho.n}", field="rho")
    order = list(range(2, rho.n + 1)) if order is None else [int(q) for q in order]
    if sorted(order) != list(range(2, rho.n + 1)):
        raise DomainError(f"order must be a permutation of 2..{rho.n}", field="order")

    remaining = list(range(1, rho.n + 1))
    accumulators = {0: rho.elements}
    for qubit in order:
        m = len(remaining)
        position = remaining.index(qubit)
        updated = {}
        for parity, elements in accumulators.items():
            rotated = apply_local_matrix(elements, m, HADAMARD, [position + 1])
            for bit in (0, 1):
                block = _project_out(rotated, m, position, bit)
                key = parity ^ bit
                updated[key] = updated[key] + block if key in updated else block
        accumulators = updated
        remaining.remove(qubit)

    ruler = np.zeros((2, 2), dtype=complex)
    for parity, block in accumulators.items():
        ruler = ruler + (_corrected(block, parity) if correct else block)
    return DensityMatrix(1, (ruler + ruler.conj().T) / 2)


def ruler_readout(rho_ruler):
    if rho_ruler.n != 1:
        raise DomainError(f"ruler must be a single qubit, got {rho_ruler.n}", field="rho_ruler")
    return apply_local(rho_ruler, HADAMARD, [1]).probability(0)


def _ruler_p_zero(block):
    """<0|H block H|0> for a raw 2x2 block."""
    return float(0.5 * (block[0, 0] + block[1, 1] + 2 * block[0, 1].real).real)


def estimate_ratio(p_zero):
    """2 arccos(sqrt(p0)), principal branch in [0, pi]."""
    slack = TOLERANCES.probability_slack
    if not -slack <= p_zero <= 1 + slack:
        raise DomainError(f"p_zero {p_zero!r} is not a probability", field="p_zero")
    p_zero = min(max(p_zero, 0.0), 1.0)
    return float(2 * np.arccos(np.sqrt(p_zero)))


def ideal_ruler_state(values, theta):
    """(e^{i mu/theta}|0> + |1>)/sqrt(2)."""
    phase = np.mean(values) / theta
    return PureState.from_unnormalized(1, [np.exp(1j * phase), 1.0])


def prepared_state(config):
    """Noisy register after GHZ preparation, before the phase shifts."""
    if isinstance(config.noise, WhiteNoiseSpec):
        return white_noise_ghz(config.noise)
    rho = static_register(config.noise)
    if config.variant == RULER:
        rho = tensor(static_qubit(1.0), rho)
    return ghz_prepare(rho)


def shifted_state(config):
    return phase_shift_stage(prepared_state(config), config.values, config.theta, config.variant)


# Branch enumeration shared by sampled mode and the distributed backplane

def branch_table(config):
    return branch_table_from_state(shifted_state(config))


def branch_table_from_state(rho):
    n = rho.n
    measured = tuple(range(2, n + 1))
    branches = [rho.elements]
    for m in range(n, 1, -1):
        # the next measured qubit is always at position 1 of what is left
        split = []
        for elements in branches:
            rotated = apply_local_matrix(elements, m, HADAMARD, [2])
            split.append(_project_out(rotated, m, 1, 0))
            split.append(_project_out(rotated, m, 1, 1))
        branches = split

    probabilities = np.array([max(float(np.trace(b).real), 0.0) for b in branches])
    p_zero = np.full(probabilities.size, 0.5)
    p_zero_miscorrected = np.full(probabilities.size, 0.5)
    for index, block in enumerate(branches):
        weight = probabilities[index]
        if weight < TOLERANCES.branch_floor:
            continue
        parity = bin(index).count("1") % 2
        p_zero[index] = np.clip(_ruler_p_zero(_corrected(block, parity)) / weight, 0.0, 1.0)
        p_zero_miscorrected[index] = np.clip(_ruler_p_zero(_corrected(block, 1 - parity)) / weight, 0.0, 1.0)

    width = len(measured)
    conditional = []
    for depth in range(width):
        prefix_mass = probabilities.reshape(2 ** depth, -1).sum(axis=1)
        zero_mass = probabilities.reshape(2 ** (depth + 1), -1).sum(axis=1)[0::2]
        ratio = np.divide(zero_mass, prefix_mass, out=np.ones_like(zero_mass), where=prefix_mass > 0)
        conditional.append(np.clip(ratio, 0.0, 1.0))
    return BranchTable(measured, probabilities, p_zero, tuple(conditional), p_zero_miscorrected)


def sample_trajectories(config, table=None):
    if config.mode is None:
        raise DomainError("trajectory sampling needs a sampled mode", field="mode")
    table = branch_table(config) if table is None else table
    rng = np.random.default_rng(config.mode.seed)
    uniforms = rng.random((config.mode.alpha, table.width + 1))

    prefix = np.zeros(config.mode.alpha, dtype=np.int64)
    outcomes = np.zeros((config.mode.alpha, table.width), dtype=np.uint8)
    for depth in range(table.width):
        bits = (uniforms[:, depth] >= table.conditional_zero[depth][prefix]).astype(np.uint8)
        outcomes[:, depth] = bits
        prefix = 2 * prefix + bits
    ruler = (uniforms[:, -1] >= table.p_zero[prefix]).astype(np.uint8)
    return TrajectoryBatch(outcomes, ruler)


# Reports

def report_from_p_zero(config, p_zero, ruler_state, histogram=None):
    ratio = estimate_ratio(p_zero)
    reference = apply_gate(ideal_ruler_state(config.values, config.theta), HADAMARD, [1])
    fidelity = fidelity_with_pure(apply_local(ruler_state, HADAMARD, [1]), reference)
    return AverageReport(
        p_zero=p_zero,
        ratio_estimate=ratio,
        fidelity=fidelity,
        distance_ratio=ratio - config.true_ratio,
        byproduct_parity_histogram=histogram,
        ruler_state=ruler_state,
    )


def run_average(config):
    ruler = measure_and_correct(shifted_state(config))
    if not config.sampled:
        report = report_from_p_zero(config, ruler_readout(ruler), ruler)
    else:
        batch = sample_trajectories(config)
        report = report_from_p_zero(config, batch.p_zero(), ruler, batch.parity_histogram())
    logger.debug(
        "average %s N=%d theta=%g: p0=%.6f ratio=%.6f D=%.6f", config.variant,
        config.n_values, config.theta, report.p_zero, report.ratio_estimate, report.distance_ratio,
    )
    return report


def lambda_scan(values, theta, variant, lambda_grid):
    """Rows (lambda, F, ratio, D) for symmetric static noise."""
    rows = []
    for lam in lambda_grid:
        noise = StaticNoiseSpec.symmetric(float(lam), len(values))
        report = run_average(AverageConfig(tuple(values), theta, variant, noise))
        rows.append((float(lam), report.fidelity, report.ratio_estimate, report.distance_ratio))
    return rows


def swapped(values, i=0, j=1):
    values = list(values)
    values[i], values[j] = values[j], values[i]
    return tuple(values)


def theta_halving(values, precision_target=RATIO_ACCEPT, mode=None, variant=RULER, noise=None):
    """
    Halve theta from THETA_START until the estimated |mu|/theta is O(1).

    A zero average never reaches the target; after HALVING_GUARD
    applications the loop gives up with a zero estimate.
    """
    theta = THETA_START
    for applications in range(1, HALVING_GUARD + 1):
        report = run_average(AverageConfig(tuple(values), theta, variant, noise, mode))
        if report.ratio_estimate >= precision_target - TOLERANCES.probability_slack:
            logger.info("theta halving converged: theta=%g after %d runs", theta, applications)
            return HalvingResult(theta, applications, report.ratio_estimate * theta, True)
        theta /= THETA_DIVISOR
    logger.warning("theta halving hit the %d-run guard; reporting a zero average", HALVING_GUARD)
    return HalvingResult(theta * THETA_DIVISOR, HALVING_GUARD, 0.0, False)


# Closed forms for the ruler variant

def symmetric_sum(l, values, theta):
    """Sum over l-subsets S of prod_{S} sin(x_j) prod_{not S} cos(x_k), x_j = nu_j/(N theta)."""
    n = len(values)
    if not 0 <= l <= n:
        raise DomainError(f"sine count {l} out of range 0..{n}", field="l")
    x = np.array(phase_angles(values, theta))
    sines, cosines = np.sin(x), np.cos(x)
    total = 0.0
    for subset in combinations(range(n), l):
        mask = np.zeros(n, dtype=bool)
        mask[list(subset)] = True
        total += float(np.prod(sines[mask]) * np.prod(cosines[~mask]))
    return SymmetricSum(l, n - l, total)


def _coherence_series(tau, values, theta):
    n = len(values)
    return sum(
        (-1) ** i * tau ** (2 * i) * symmetric_sum(2 * i, values, theta).value
        for i in range(n // 2 + 1)
    )


def analytic_p_zero(tau, values, theta):
    """p0 for N register qubits at common purity tau, ruler pure."""
    tau = tau.tau if isinstance(tau, PurityParameter) else float(tau)
    return 0.5 * (1.0 + _coherence_series(tau, values, theta))


def analytic_p_zero_lambdas(lambdas, values, theta, variant=RULER):
    """
    Per-qubit form 0.5 (1 + Re prod(cos x_j + i t_j sin x_j)), t_j = 2 lambda_j - 1.

    In the original variant qubit 1 is both phase-shifted and read out, so
    its factor becomes t_1 e^{i x_1}.
    """
    x = np.array(phase_angles(values, theta))
    signed = 2 * np.asarray(lambdas, dtype=float) - 1
    factors = np.cos(x) + 1j * signed * np.sin(x)
    if variant == ORIGINAL:
        factors[0] = signed[0] * np.exp(1j * x[0])
    return float(0.5 * (1.0 + np.prod(factors).real))


# Worst-case configuration and resilience threshold

def _coherence_equal(x, tau, n):
    """Re (cos x + i tau sin x)^N, the series with every x_j equal to x."""
    return np.real((np.cos(x) + 1j * tau * np.sin(x)) ** n)


def _deviation(x, tau, n):
    return np.abs(_coherence_equal(x, tau, n) - _coherence_equal(x, 1.0, n))


def _worst_argument(n, tau, grid_points=2049, max_steps=200):
    # N x stays on the principal arccos branch, |mu|/theta <= pi
    upper = np.pi / n
    grid = np.linspace(0.0, upper, grid_points)
    objective = _deviation(grid, tau, n)
    peak = float(objective.max())
    if peak == 0.0:
        return 0.0
    best = int(np.flatnonzero(objective >= peak * (1 - 1e-9))[0])
    step = grid[1] - grid[0]
    lo, hi = max(grid[best] - step, 0.0), min(grid[best] + step, upper)
    result = minimize_scalar(
        lambda x: -_deviation(x, tau, n), bounds=(lo, hi), method="bounded",
        options={"maxiter": max_steps, "xatol": 1e-12},
    )
    if not result.success:
        raise NumericError(f"worst-case refinement for N={n}, tau={tau} did not converge")
    return float(result.x) if -result.fun >= objective[best] else float(grid[best])


def worst_case_values(n, taus=(0.3, 0.6, 0.9)):
    if not 3 <= n <= 8:
        raise DomainError(f"N must be in [3, 8], got {n}", field="n")
    argmaxes = tuple(_worst_argument(n, float(t)) for t in taus)
    worst = WorstCase(n, tuple(float(t) for t in taus), argmaxes)
    if worst.spread > 1e-6:
        logger.info("worst-case argument for N=%d drifts with tau (spread %.3g)", n, worst.spread)
    return worst


def max_distance(n, tau):
    """max |D| over common per-index phases; returns (|D|, argument)."""
    x = _worst_argument(n, tau)
    c_noisy = np.clip(_coherence_equal(x, tau, n), -1.0, 1.0)
    c_ideal = np.clip(_coherence_equal(x, 1.0, n), -1.0, 1.0)
    return float(abs(np.arccos(c_noisy) - np.arccos(c_ideal))), x


def _threshold(n, taus, distances, level=0.5):
    for i in range(len(taus) - 1):
        if distances[i] >= level > distances[i + 1]:
            return float(brentq(lambda t: max_distance(n, t)[0] - level, taus[i], taus[i + 1]))
    return None


def tolerance_scan(n_range, tau_grid):
    curves = []
    taus = np.asarray(tau_grid, dtype=float)
    for n in n_range:
        if not 3 <= n <= 8:
            raise DomainError(f"N must be in [3, 8], got {n}", field="n_range")
        pairs = [max_distance(n, t) for t in taus]
        distances = np.array([p[0] for p in pairs])
        arguments = np.array([p[1] for p in pairs])
        curve = ToleranceCurve(n, taus, distances, arguments, _threshold(n, taus, distances))
        logger.info("tolerance curve N=%d: threshold %s", n, curve.threshold)
        curves.append(curve)
    return curves
