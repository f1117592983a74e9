"""
Acceptance suite: every headline number and structural property, checked
against fixed limits and reported PASS/FAIL per criterion.
"""

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .average import (
    ORIGINAL,
    RULER,
    AverageConfig,
    SampledMode,
    analytic_p_zero,
    branch_table,
    lambda_scan,
    prepared_state,
    run_average,
    sample_trajectories,
    swapped,
    theta_halving,
    tolerance_scan,
    worst_case_values,
)
from .config import DEFAULT_SEED, REFERENCE_THETA, REFERENCE_VALUES
from .distributed import StarNetwork
from .entanglement import (
    NEGATIVITY_MODES,
    NONTRACED,
    ensemble_decomposition,
    is_decomposable,
    negativity_scan,
    ruler_resource,
    white_noise_contrast,
)
from .errors import QResilienceError
from .grover import (
    GroverConfig,
    UNDEFINED_ARGMAX,
    normalized_probability,
    optimal_iterations,
    run_grover,
)
from .noise import StaticNoiseSpec, WhiteNoiseSpec, ghz_state, lambda_grid, white_noise_ghz
from .qstate import PAULI_X, apply_gate, pure_to_density

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AcceptanceLimits:
    exact: float = 1e-12
    lambda_power: float = 0.02
    headline: float = 0.02
    # the lambda=0.1 point is compared against the published reading with a wider band
    headline_noisy: float = 0.06
    swap_gap: float = 0.05
    ruler_zero: float = 1e-9
    analytic: float = 1e-9
    boundary: float = 1e-10
    threshold_window: tuple = (0.88, 0.92)
    negativity_floor: float = 1e-10
    reconstruction: float = 1e-11
    white_edge: float = 0.1
    sampled_alpha: int = 100_000
    sampled_seeds: int = 20
    distributed_alpha: int = 200


@dataclass(frozen=True)
class CriterionResult:
    id: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _grover_period(limits):
    lambdas = (0.6, 0.7, 0.8, 0.9, 1.0)
    found = {}
    for n in (2, 3, 4):
        found[n] = {
            run_grover(GroverConfig(n, 0, StaticNoiseSpec.symmetric(lam, n))).first_max_iteration
            for lam in lambdas
        }
    passed = all(len(v) == 1 and UNDEFINED_ARGMAX not in v for v in found.values())
    return passed, ", ".join(f"n={n}: m={sorted(v)}" for n, v in found.items())


def _lambda_power(limits):
    rng = np.random.default_rng(DEFAULT_SEED)
    worst_exact = 0.0
    for lam1, lam2 in rng.uniform(0.6, 1.0, size=(20, 2)):
        value = normalized_probability(2, 0, StaticNoiseSpec((lam1, lam2)))
        worst_exact = max(worst_exact, abs(value - lam1 * lam2))
    worst = {}
    for n in (3, 4):
        worst[n] = 0.0
        for lambdas in rng.uniform(0.6, 1.0, size=(100, n)):
            value = normalized_probability(n, 0, StaticNoiseSpec(tuple(lambdas)))
            worst[n] = max(worst[n], abs(value - float(np.prod(lambdas))))
    passed = worst_exact <= limits.exact and all(w <= limits.lambda_power for w in worst.values())
    detail = f"n=2 max err {worst_exact:.2e}; " + ", ".join(
        f"n={n} max err {w:.4f}" for n, w in worst.items()
    )
    return passed, detail


def _optimal_iterations(limits):
    small = (optimal_iterations(4), optimal_iterations(16))
    gaps = [abs(optimal_iterations(2 ** k) - round(math.pi / 4 * math.sqrt(2 ** k))) for k in (10, 12)]
    return small == (1, 3) and max(gaps) <= 1, f"R(4)={small[0]} R(16)={small[1]} gaps={gaps}"


def _reference_reports():
    reports = {}
    for lam in (0.0, 0.1):
        noise = StaticNoiseSpec.symmetric(lam, len(REFERENCE_VALUES))
        reports[lam] = run_average(AverageConfig(REFERENCE_VALUES, REFERENCE_THETA, ORIGINAL, noise))
    return reports


def _headline(limits):
    reports = _reference_reports()
    clean, noisy = reports[0.0], reports[0.1]
    passed = (
        abs(clean.fidelity - 0.95) <= limits.headline
        and abs(clean.ratio_estimate - 0.36) <= limits.headline
        and abs(noisy.fidelity - 0.77) <= limits.headline_noisy
        and abs(noisy.ratio_estimate - 0.94) <= limits.headline_noisy
    )
    detail = (
        f"lambda=0: F={clean.fidelity:.4f} ratio={clean.ratio_estimate:.4f}; "
        f"lambda=0.1: F={noisy.fidelity:.4f} ratio={noisy.ratio_estimate:.4f}"
    )
    return passed, detail


def _ranking_inversion(limits):
    reports = _reference_reports()
    clean, noisy = reports[0.0], reports[0.1]
    passed = (
        clean.fidelity > noisy.fidelity
        and abs(clean.distance_ratio) > abs(noisy.distance_ratio)
    )
    detail = (
        f"F {clean.fidelity:.4f} > {noisy.fidelity:.4f}, "
        f"|D| {abs(clean.distance_ratio):.4f} > {abs(noisy.distance_ratio):.4f}"
    )
    return passed, detail


def _swap_sensitivity(limits):
    grid = lambda_grid(21)

    def d_column(values, variant):
        return np.array([row[3] for row in lambda_scan(values, REFERENCE_THETA, variant, grid)])

    original_gap = float(np.max(np.abs(
        d_column(REFERENCE_VALUES, ORIGINAL) - d_column(swapped(REFERENCE_VALUES), ORIGINAL)
    )))
    ruler_gap = float(np.max(np.abs(
        d_column(REFERENCE_VALUES, RULER) - d_column(swapped(REFERENCE_VALUES), RULER)
    )))
    passed = original_gap > limits.swap_gap and ruler_gap <= limits.exact
    return passed, f"original max|dD|={original_gap:.4f}, ruler max|dD|={ruler_gap:.2e}"


def _ruler_exactness(limits):
    n = len(REFERENCE_VALUES)
    distances = []
    for lam in (0.0, 1.0):
        noise = StaticNoiseSpec.symmetric(lam, n)
        distances.append(run_average(AverageConfig(REFERENCE_VALUES, REFERENCE_THETA, RULER, noise)).distance_ratio)
    flipped = prepared_state(AverageConfig(REFERENCE_VALUES, REFERENCE_THETA, RULER, StaticNoiseSpec.symmetric(0.0, n)))
    expected = pure_to_density(apply_gate(ghz_state(n + 1), PAULI_X, [1]))
    state_gap = float(np.max(np.abs(flipped.elements - expected.elements)))
    passed = max(abs(d) for d in distances) <= limits.ruler_zero and state_gap <= limits.exact
    return passed, f"D(0)={distances[0]:.2e} D(1)={distances[1]:.2e} |Psi'-X1 Psi|={state_gap:.2e}"


def _analytic(limits):
    rng = np.random.default_rng(DEFAULT_SEED + 8)
    theta = 0.25
    worst = 0.0
    for n in range(3, 7):
        for values in rng.uniform(-1.0, 1.0, size=(20, n)):
            values = tuple(values)
            for tau in (0.0, 0.25, 0.5, 0.75, 1.0):
                noise = StaticNoiseSpec.from_purity(tau, n)
                simulated = run_average(AverageConfig(values, theta, RULER, noise)).p_zero
                worst = max(worst, abs(simulated - analytic_p_zero(tau, values, theta)))
    boundary = 0.0
    for n in range(3, 9):
        values = tuple(rng.uniform(-1.0, 1.0, size=n))
        mu = float(np.mean(values))
        boundary = max(boundary, abs(analytic_p_zero(1.0, values, theta) - math.cos(mu / (2 * theta)) ** 2))
    passed = worst <= limits.analytic and boundary <= limits.boundary
    return passed, f"max |sim - analytic|={worst:.2e}, boundary err={boundary:.2e}"


def _threshold(limits):
    curves = tolerance_scan(range(3, 9), np.linspace(0.0, 1.0, 51))
    three = next(c for c in curves if c.n == 3)
    lo, hi = limits.threshold_window
    passed = (
        three.threshold is not None
        and lo <= three.threshold <= hi
        and all(c.monotone and c.max_distance[-1] == 0.0 for c in curves)
    )
    parts = []
    for curve in curves:
        threshold = "none" if curve.threshold is None else f"{curve.threshold:.3f}"
        parts.append(f"N={curve.n}:{threshold}{'' if curve.monotone else '*'}")
    return passed, "tau* " + " ".join(parts)


def _entanglement(limits):
    grid = np.round(np.arange(0.0, 1.0 + 1e-9, 0.05), 12)
    traced = max(
        row[2] for mode in NEGATIVITY_MODES if mode != NONTRACED for row in negativity_scan(2, grid, mode)
    )
    rows = negativity_scan(2, grid, NONTRACED)
    at_zero = max(row[2] for row in rows if row[0] == 0.0)
    positive = min(row[2] for row in rows if row[0] >= 0.05)
    rng = np.random.default_rng(DEFAULT_SEED + 10)
    reconstruction = 0.0
    for n in (2, 3):
        for lambdas in rng.uniform(0.0, 1.0, size=(10, n)):
            direct = ruler_resource(tuple(lambdas)).elements
            ensemble = ensemble_decomposition(tuple(lambdas)).density().elements
            reconstruction = max(reconstruction, float(np.max(np.abs(direct - ensemble))))
    passed = (
        traced < limits.negativity_floor
        and at_zero <= limits.negativity_floor
        and positive > 0.0
        and reconstruction <= limits.reconstruction
    )
    detail = (
        f"traced max={traced:.2e}, nontraced(0)={at_zero:.2e}, "
        f"nontraced min(tau>=0.05)={positive:.4f}, reconstruction={reconstruction:.2e}"
    )
    return passed, detail


def _white_noise(limits):
    n, theta = 3, 0.25
    structural = (
        not is_decomposable(white_noise_ghz(WhiteNoiseSpec(0.9, n + 1)))
        and is_decomposable(ruler_resource((0.95,) * n))
    )
    edge_values = (math.pi / 4,) * n
    edge = run_average(AverageConfig(edge_values, theta, RULER, WhiteNoiseSpec(0.99, n + 1)))
    worst = (worst_case_values(n).nu_tilde(theta),) * n
    _, d_white, _, d_static = white_noise_contrast(worst, theta, [0.9])[0]
    passed = structural and abs(edge.distance_ratio) >= limits.white_edge
    detail = (
        f"ensemble structure {'broken' if structural else 'INTACT'}, "
        f"edge |D|={abs(edge.distance_ratio):.4f}, worst case at 0.9: "
        f"D_white={d_white:+.4f} D_static={d_static:+.4f}"
    )
    return passed, detail


def _sampled(limits):
    alpha = limits.sampled_alpha
    noise = StaticNoiseSpec.symmetric(0.9, len(REFERENCE_VALUES))
    exact_config = AverageConfig(REFERENCE_VALUES, REFERENCE_THETA, RULER, noise)
    table = branch_table(exact_config)
    exact = table.exact_p_zero()
    band = 4 / math.sqrt(alpha)
    misses = 0
    for k in range(limits.sampled_seeds):
        config = AverageConfig(REFERENCE_VALUES, REFERENCE_THETA, RULER, noise, SampledMode(alpha, DEFAULT_SEED + k))
        if abs(sample_trajectories(config, table).p_zero() - exact) > band:
            misses += 1
    tail = binom.cdf(math.ceil(alpha * (exact - band)) - 1, alpha, exact) + binom.sf(
        math.floor(alpha * (exact + band)), alpha, exact
    )
    expected = limits.sampled_seeds * float(tail)
    return misses <= 1, f"{misses}/{limits.sampled_seeds} seeds outside 4/sqrt(alpha) (expected {expected:.2e})"


def _distributed(limits):
    alpha = limits.distributed_alpha
    cases = {3: (0.3, -0.1, 0.45), 5: (0.1, -0.3, 0.5, 0.2, -0.4)}
    mismatches, traffic_ok = [], True
    for n, values in cases.items():
        theta, seed = 0.125, DEFAULT_SEED + n
        noise = StaticNoiseSpec.symmetric(0.85, n)
        batch = sample_trajectories(AverageConfig(values, theta, RULER, noise, SampledMode(alpha, seed)))
        network = StarNetwork(values, theta, noise, seed)
        for row in range(alpha):
            transcript = network.run_round()
            if (transcript.outcome_bits != tuple(int(b) for b in batch.outcomes[row])
                    or transcript.ruler_bit != int(batch.ruler[row])):
                mismatches.append((n, row))
                break
        traffic_ok = traffic_ok and network.bits_transmitted == alpha * n
    return not mismatches and traffic_ok, f"mismatches={mismatches or 'none'}, traffic={'alpha*N' if traffic_ok else 'WRONG'}"


def _theta_halving(limits):
    details, passed = [], True
    for k in (2, 4, 6):
        mu = 2.0 ** -k
        result = theta_halving((mu,) * 3)
        bound = math.ceil(math.log2(0.5 / mu)) + 1
        passed = passed and result.converged and result.applications <= bound
        details.append(f"mu=2^-{k}: {result.applications}<={bound}")
    return passed, ", ".join(details)


CRITERIA = (
    (1, "Grover period invariance", _grover_period),
    (2, "lambda^n fragility law", _lambda_power),
    (3, "optimal iteration count", _optimal_iterations),
    (4, "average algorithm headline numbers", _headline),
    (5, "fidelity / distance ranking inversion", _ranking_inversion),
    (6, "swap sensitivity", _swap_sensitivity),
    (7, "ruler-variant exactness", _ruler_exactness),
    (8, "analytic p0 cross-check", _analytic),
    (9, "resilience threshold", _threshold),
    (10, "entanglement structure", _entanglement),
    (11, "white-noise fragility", _white_noise),
    (12, "sampled-mode consistency", _sampled),
    (13, "distributed equivalence", _distributed),
    (14, "theta halving", _theta_halving),
)


def run_acceptance(limits=None, only=None):
    """Evaluate the criteria (all, or the ids in `only`) and return CriterionResults."""
    limits = limits or AcceptanceLimits()
    results = []
    for criterion_id, name, check in CRITERIA:
        if only is not None and criterion_id not in only:
            continue
        started = time.perf_counter()
        try:
            passed, detail = check(limits)
        except QResilienceError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - started
        logger.debug("criterion %d finished in %.2fs", criterion_id, elapsed)
        results.append(CriterionResult(criterion_id, name, bool(passed), detail, elapsed))
    return results


def print_report(results):
    print("=" * 60)
    print("Acceptance Suite")
    print("=" * 60)
    for r in results:
        marker = "[+] PASS" if r.passed else "[-] FAIL"
        print(f"{marker} {r.id:2d} {r.name} ({r.seconds:.1f}s)")
        print(f"         {r.detail}")
    failed = [r for r in results if not r.passed]
    print("=" * 60)
    if failed:
        print(f"[-] {len(failed)} criteria failed: " + ", ".join(f"{r.id} ({r.name})" for r in failed))
    else:
        print(f"[+] ALL {len(results)} CRITERIA PASSED")
    print("=" * 60)


def main(limits=None, only=None):
    results = run_acceptance(limits, only)
    print_report(results)
    return 0 if all(r.passed for r in results) else 1
