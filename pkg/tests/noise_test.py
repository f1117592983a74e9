import numpy as np
import pytest

from qresilience.errors import DomainError
from qresilience.noise import (
    PurityParameter,
    StaticNoiseSpec,
    WhiteNoiseSpec,
    ghz_state,
    lambda_from_purity,
    lambda_grid,
    purity_from_lambda,
    static_populations,
    static_qubit,
    static_register,
    white_noise_ghz,
)


def test_static_qubit_is_diagonal():
    rho = static_qubit(0.8)
    assert np.allclose(rho.elements, np.diag([0.8, 0.2]))


@pytest.mark.parametrize("bad", [-0.1, 1.2])
def test_lambda_out_of_range(bad):
    with pytest.raises(DomainError) as info:
        StaticNoiseSpec((0.5, bad))
    assert info.value.field == "lambda"


def test_empty_spec_rejected():
    with pytest.raises(DomainError):
        StaticNoiseSpec(())


def test_register_populations_are_products():
    spec = StaticNoiseSpec((0.9, 0.6))
    assert static_populations(spec) == pytest.approx([0.54, 0.36, 0.06, 0.04])
    rho = static_register(spec)
    assert np.trace(rho.elements).real == pytest.approx(1.0)
    assert rho.probability(0) == pytest.approx(0.54)


def test_purity_round_trip_and_symmetry():
    assert purity_from_lambda(0.25).tau == pytest.approx(0.5)
    assert purity_from_lambda(0.75).tau == pytest.approx(0.5)
    assert lambda_from_purity(0.5) == pytest.approx(0.75)
    assert lambda_from_purity(PurityParameter(1.0)) == 1.0
    assert lambda_from_purity(0.0) == 0.5


def test_from_purity_takes_upper_root():
    assert StaticNoiseSpec.from_purity(0.8, 3).lambdas == pytest.approx((0.9, 0.9, 0.9))


def test_swapped_spec():
    assert StaticNoiseSpec((0.1, 0.2, 0.3)).swapped(0, 2).lambdas == (0.3, 0.2, 0.1)


def test_white_noise_limits():
    pure = white_noise_ghz(WhiteNoiseSpec(1.0, 3))
    psi = ghz_state(3).amplitudes
    assert np.allclose(pure.elements, np.outer(psi, psi.conj()))
    mixed = white_noise_ghz(WhiteNoiseSpec(0.0, 3))
    assert np.allclose(mixed.elements, np.eye(8) / 8)


def test_white_noise_validation():
    with pytest.raises(DomainError):
        WhiteNoiseSpec(1.5, 3)
    with pytest.raises(DomainError):
        WhiteNoiseSpec(0.5, 0)


def test_lambda_grid():
    grid = lambda_grid(11)
    assert grid[0] == 0.0 and grid[-1] == 1.0 and grid.size == 11
    with pytest.raises(DomainError):
        lambda_grid(0)


@pytest.mark.parametrize("i,j", [(0, 1), (0, 2), (1, 2)])
def test_static_register_is_permutation_covariant(i, j):
    spec = StaticNoiseSpec((0.9, 0.7, 0.6))
    order = list(range(3))
    order[i], order[j] = order[j], order[i]
    relabelled = (
        static_register(spec).elements
        .reshape((2,) * 6)
        .transpose(order + [k + 3 for k in order])
        .reshape(8, 8)
    )
    assert np.allclose(static_register(spec.swapped(i, j)).elements, relabelled, atol=1e-15)


def test_white_noise_half_purity_entries():
    rho = white_noise_ghz(WhiteNoiseSpec(0.5, 3)).elements
    assert rho[0, 0] == pytest.approx(1 / 16 + 1 / 4)
    assert rho[7, 7] == pytest.approx(1 / 16 + 1 / 4)
    assert rho[0, 7] == pytest.approx(1 / 4)
    assert rho[7, 0] == pytest.approx(1 / 4)
    assert np.allclose(np.diag(rho)[1:7], 1 / 16)
