import numpy as np
import pytest

from conftest import grover_reference
from qresilience.errors import DegenerateConfigError, DomainError
from qresilience.grover import (
    UNDEFINED_ARGMAX,
    GroverConfig,
    closed_form_probability,
    default_max_iterations,
    diffusion_operator,
    first_local_maximum,
    grover_scan_rows,
    normalized_probability,
    normalized_probability_table,
    optimal_iterations,
    oracle_operator,
    period_invariance_scan,
    run_grover,
    uniform_superposition,
)
from qresilience.noise import StaticNoiseSpec


def test_curve_matches_explicit_matrices():
    lambdas = (0.9, 0.7, 0.8)
    curve = run_grover(GroverConfig(3, 5, StaticNoiseSpec(lambdas), max_iterations=8))
    assert np.allclose(curve.probabilities, grover_reference(3, lambdas, 5, 8), atol=1e-12)


@pytest.mark.parametrize("searched", [0, 3, 6])
def test_closed_form_for_asymmetric_noise(searched):
    lambdas = (0.95, 0.65, 0.8)
    curve = run_grover(GroverConfig(3, searched, StaticNoiseSpec(lambdas), max_iterations=10))
    expected = closed_form_probability(3, lambdas, np.arange(11))
    assert np.allclose(curve.probabilities, expected, atol=1e-12)


def test_two_qubit_search_is_exact():
    curve = run_grover(GroverConfig(2, 2, StaticNoiseSpec.symmetric(1.0, 2)))
    assert curve.probabilities[1] == pytest.approx(1.0, abs=1e-12)
    noisy = run_grover(GroverConfig(2, 2, StaticNoiseSpec((0.9, 0.7))))
    assert noisy.probabilities[1] == pytest.approx(0.63, abs=1e-12)


@pytest.mark.parametrize("n,first_max", [(2, 1), (3, 2), (4, 3)])
def test_first_maximum_of_ideal_curve(n, first_max):
    curve = run_grover(GroverConfig(n, 0, StaticNoiseSpec.symmetric(1.0, n)))
    assert curve.first_max_iteration == first_max
    assert curve.p_ideal_at_r == pytest.approx(curve.probabilities[first_max])


def test_optimal_iterations():
    assert optimal_iterations(4) == 1
    assert optimal_iterations(16) == 3
    assert abs(optimal_iterations(2 ** 10) - round(np.pi / 4 * 32)) <= 1
    with pytest.raises(DomainError):
        optimal_iterations(12)
    assert default_max_iterations(4) == 14


def test_operators():
    mean = uniform_superposition(3).amplitudes
    assert np.allclose(diffusion_operator(3).elements @ mean, mean)
    oracle = oracle_operator(3, 4).elements
    assert oracle[4, 4] == -1 and np.trace(oracle).real == pytest.approx(6)
    with pytest.raises(DomainError):
        oracle_operator(2, 4)


def test_diffusion_operator_decomposition():
    n = 3
    h = np.array([[1.0]])
    for _ in range(n):
        h = np.kron(h, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    reflection = -np.eye(2 ** n)
    reflection[0, 0] = 1.0
    assert np.allclose(diffusion_operator(n).elements, h @ reflection @ h, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_normalized_probability_ignores_searched_index(n):
    noise = StaticNoiseSpec((0.95, 0.85, 0.75, 0.9)[:n])
    values = [normalized_probability(n, s, noise) for s in range(2 ** n)]
    assert np.allclose(values, values[0], atol=1e-10)


def test_config_validation():
    with pytest.raises(DomainError):
        GroverConfig(2, 4, StaticNoiseSpec.symmetric(1.0, 2))
    with pytest.raises(DomainError) as info:
        GroverConfig(3, 0, StaticNoiseSpec.symmetric(1.0, 2))
    assert info.value.field == "noise"


def test_first_local_maximum():
    assert first_local_maximum([0.1, 0.5, 0.2, 0.6]) == 1
    assert first_local_maximum([0.25, 0.25, 0.25]) == UNDEFINED_ARGMAX
    assert first_local_maximum([0.1, 0.2, 0.3]) == 2


def test_normalized_probability_is_product_for_two_qubits():
    assert normalized_probability(2, 1, StaticNoiseSpec((0.8, 0.65))) == pytest.approx(0.52, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4])
def test_normalized_probability_tracks_lambda_power(n, rng):
    for lambdas in rng.uniform(0.6, 1.0, size=(10, n)):
        value = normalized_probability(n, 0, StaticNoiseSpec(tuple(lambdas)))
        assert abs(value - np.prod(lambdas)) <= 0.02


def test_normalized_probability_degenerate_single_qubit():
    with pytest.raises(DegenerateConfigError):
        normalized_probability(1, 0, StaticNoiseSpec((0.9,)))


def test_normalized_table_columns():
    rows = normalized_probability_table(2, [0.5, 1.0])
    assert rows[0] == pytest.approx((0.5, 0.25, 0.25))
    assert rows[1] == pytest.approx((1.0, 1.0, 1.0))


def test_period_scan_is_lambda_independent():
    rows = period_invariance_scan(3, 0, [0.6, 0.7, 0.8, 0.9, 1.0])
    assert {m for _, m in rows} == {2}


def test_period_scan_flat_curve_and_domain():
    assert period_invariance_scan(3, 0, [0.5]) == [(0.5, UNDEFINED_ARGMAX)]
    with pytest.raises(DomainError):
        period_invariance_scan(3, 0, [0.0])


def test_scan_rows_shape():
    rows = grover_scan_rows(2, 0, [0.5, 1.0], max_iterations=4)
    assert len(rows) == 10
    assert rows[6] == pytest.approx((1.0, 1, 1.0))
