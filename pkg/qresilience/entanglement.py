"""
Entanglement structure of the ruler-variant resource.

A statically noisy register fed through the GHZ preparation becomes a
mixture of the GHZ-like family (|0 a> + |1 a_bar>)/sqrt(2), one member per
register bit string a. Negativity of the partial transpose is the
entanglement detector; like any PPT test it is sufficient, not necessary.
"""

import logging
from dataclasses import dataclass
from itertools import product

import numpy as np

from .average import RULER, AverageConfig, ghz_prepare, run_average
from .config import TOLERANCES
from .errors import DomainError
from .noise import (
    StaticNoiseSpec,
    WhiteNoiseSpec,
    lambda_from_purity,
    static_qubit,
    static_register,
    white_noise_ghz,
)
from .qstate import Bipartition, DensityMatrix, PureState, negativity, partial_trace, tensor

logger = logging.getLogger(__name__)

TRACED_RULER = "traced-ruler"
TRACED_REGISTER = "traced-register"
NONTRACED = "nontraced"
NEGATIVITY_MODES = (TRACED_RULER, TRACED_REGISTER, NONTRACED)


@dataclass(frozen=True)
class GhzLabel:
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits or any(b not in (0, 1) for b in bits):
            raise DomainError(f"label must be a non-empty bit string, got {self.bits}", field="bits")
        object.__setattr__(self, "bits", bits)

    @property
    def n(self):
        return len(self.bits)

    def __str__(self):
        return "".join(map(str, self.bits))

    @classmethod
    def from_index(cls, index, n):
        return cls(tuple((index >> (n - 1 - k)) & 1 for k in range(n)))


@dataclass(frozen=True)
class GhzEnsemble:
    terms: tuple  # (coefficient, GhzLabel)

    @property
    def n(self):
        return self.terms[0][1].n

    def total_weight(self):
        return sum(c for c, _ in self.terms)

    def density(self):
        """Sum of C_a |GHZ_a><GHZ_a| on N+1 qubits."""
        dim = 2 ** (self.n + 1)
        elements = np.zeros((dim, dim), dtype=complex)
        for coefficient, label in self.terms:
            psi = ghz_family_state(label).amplitudes
            elements += coefficient * np.outer(psi, psi.conj())
        return DensityMatrix(self.n + 1, elements)


def ghz_family_state(label):
    n = label.n
    zero_branch = int(str(label), 2)
    one_branch = (1 << n) | (~zero_branch & ((1 << n) - 1))
    amplitudes = np.zeros(2 ** (n + 1), dtype=complex)
    amplitudes[zero_branch] = amplitudes[one_branch] = 1 / np.sqrt(2)
    return PureState(n + 1, amplitudes)


def ensemble_coefficient(label, lambdas):
    """C_a = prod lambda_i^(1 - a_i) (1 - lambda_i)^a_i."""
    return float(np.prod([lam if a == 0 else 1.0 - lam for a, lam in zip(label.bits, lambdas)]))


def ensemble_decomposition(lambdas, drop_zero=True):
    lambdas = StaticNoiseSpec(tuple(lambdas)).lambdas
    terms = []
    for bits in product((0, 1), repeat=len(lambdas)):
        label = GhzLabel(bits)
        coefficient = ensemble_coefficient(label, lambdas)
        if coefficient > 0 or not drop_zero:
            terms.append((coefficient, label))
    return GhzEnsemble(tuple(terms))


def ruler_resource(lambdas):
    """GHZ preparation applied to a pure ruler and a statically noisy register."""
    return ghz_prepare(tensor(static_qubit(1.0), static_register(StaticNoiseSpec(tuple(lambdas)))))


def modified_average_from_label(label, values):
    """mu~ = (1/N) sum (-1)^a_j nu_j, the average a GHZ_a member actually encodes."""
    if label.n != len(values):
        raise DomainError(f"label has {label.n} bits for {len(values)} values", field="values")
    signs = np.array([(-1) ** a for a in label.bits])
    return float(np.dot(signs, values) / len(values))


def ghz_projector_span(n):
    """The 2^N projectors |GHZ_a><GHZ_a| on N+1 qubits, in label order."""
    projectors = []
    for index in range(2 ** n):
        psi = ghz_family_state(GhzLabel.from_index(index, n)).amplitudes
        projectors.append(np.outer(psi, psi.conj()))
    return projectors


def decomposability_residual(rho):
    """
    Frobenius residual of the least-squares fit of rho onto the GHZ family.

    Returns (residual, coefficients).
    """
    if rho.n < 2:
        raise DomainError("need a ruler and at least one register qubit", field="rho")
    basis = np.array([p.reshape(-1) for p in ghz_projector_span(rho.n - 1)]).T
    target = rho.elements.reshape(-1)
    coefficients, *_ = np.linalg.lstsq(basis, target, rcond=None)
    residual = float(np.linalg.norm(basis @ coefficients - target))
    return residual, coefficients.real


def is_decomposable(rho, tol=TOLERANCES.decomposable):
    residual, coefficients = decomposability_residual(rho)
    return residual <= tol and bool(np.all(coefficients >= -tol))


def _cuts(n):
    return [Bipartition.single(q, n) for q in range(1, n + 1)] if n > 2 else [Bipartition.single(1, 2)]


def negativity_rows(rho, mode):
    """(bipartition label, negativity) pairs for one resource state."""
    n = rho.n
    if mode == NONTRACED:
        return [(cut.label, negativity(rho, cut)) for cut in _cuts(n)]
    if mode == TRACED_RULER:
        traced = [1]
    elif mode == TRACED_REGISTER:
        traced = list(range(2, n + 1))
    else:
        raise DomainError(f"unknown negativity mode {mode!r}", field="mode")

    rows = []
    for gone in traced:
        keep = [q for q in range(1, n + 1) if q != gone]
        reduced = partial_trace(rho, keep)
        for cut in _cuts(reduced.n):
            # relabel the cut with the original qubit numbers
            left = "".join(str(keep[q - 1]) for q in sorted(cut.left))
            right = "".join(str(keep[q - 1]) for q in sorted(cut.right))
            rows.append((f"{left}|{right}/tr{gone}", negativity(reduced, cut)))
    return rows


def negativity_scan(n, tau_grid, mode):
    """Rows (tau, bipartition, negativity) for N register qubits at symmetric purity tau."""
    if n < 2:
        raise DomainError(f"need at least two register qubits, got {n}", field="n")
    if mode not in NEGATIVITY_MODES:
        raise DomainError(f"unknown negativity mode {mode!r}", field="mode")
    rows = []
    for tau in tau_grid:
        rho = ruler_resource([lambda_from_purity(float(tau))] * n)
        for label, value in negativity_rows(rho, mode):
            rows.append((float(tau), label, value))
    logger.info("negativity scan %s N=%d: %d rows", mode, n, len(rows))
    return rows


def white_noise_contrast(values, theta, tau_tilde_grid):
    """
    Rows (tau~, D_white, decomposable, D_static).

    D_static is the ruler-variant distance ratio for symmetric static noise
    at purity tau = tau~, computed for the same values.
    """
    values = tuple(values)
    n = len(values)
    rows = []
    for tau_tilde in tau_tilde_grid:
        tau_tilde = float(tau_tilde)
        white = WhiteNoiseSpec(tau_tilde, n + 1)
        d_white = run_average(AverageConfig(values, theta, RULER, white)).distance_ratio
        static = StaticNoiseSpec.from_purity(tau_tilde, n)
        d_static = run_average(AverageConfig(values, theta, RULER, static)).distance_ratio
        decomposable = is_decomposable(white_noise_ghz(white))
        rows.append((tau_tilde, d_white, decomposable, d_static))
    return rows
