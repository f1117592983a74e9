"""Shared fixtures and independent oracles for the qresilience tests."""

import numpy as np
import pytest

from qresilience.config import REFERENCE_THETA, REFERENCE_VALUES
from qresilience.qstate import PureState


@pytest.fixture
def reference_values():
    return REFERENCE_VALUES, REFERENCE_THETA


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def bell_state():
    return PureState(2, np.array([1, 0, 0, 1]) / np.sqrt(2))


@pytest.fixture
def ghz3():
    amplitudes = np.zeros(8)
    amplitudes[0] = amplitudes[7] = 1 / np.sqrt(2)
    return PureState(3, amplitudes)


@pytest.fixture
def results_dir(tmp_path, monkeypatch):
    monkeypatch.setattr("qresilience.cli.RESULTS_DIR", tmp_path)
    return tmp_path


def full_operator(gate, target, n):
    """Reference kron embedding of a single-qubit gate; qubit 1 is leftmost."""
    ops = [np.eye(2)] * n
    ops[target - 1] = np.asarray(gate)
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def grover_reference(n, lambdas, searched, iterations):
    """P(m) from explicit matrices, built without the library's contractions."""
    size = 2 ** n
    rho = np.array([[1.0 + 0j]])
    for lam in lambdas:
        rho = np.kron(rho, np.diag([lam, 1 - lam]))
    h = np.array([[1.0]])
    for _ in range(n):
        h = np.kron(h, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    rho = h @ rho @ h.T
    oracle = np.eye(size)
    oracle[searched, searched] = -1
    diffusion = 2 * np.full((size, size), 1 / size) - np.eye(size)
    g = diffusion @ oracle
    out = [rho[searched, searched].real]
    for _ in range(iterations):
        rho = g @ rho @ g.T
        out.append(rho[searched, searched].real)
    return np.array(out)
