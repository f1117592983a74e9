"""
Dense multi-qubit states and the operations the simulators are built from.

Convention: qubit 1 is the most significant bit of the basis index, so
|0...0101> is index 5. Density matrices are stored as full 2^n x 2^n
complex arrays; local gates are applied by contracting against the
(2,)*2n tensor view instead of building the full-register operator.
"""

import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import eigvalsh

from .config import MAX_QUBITS, TOLERANCES
from .errors import DomainError

logger = logging.getLogger(__name__)


def _frozen(array):
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def _check_qubit_count(n, field="n"):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise DomainError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}", field=field)


def _check_targets(targets, n):
    targets = tuple(int(q) for q in targets)
    if len(set(targets)) != len(targets):
        raise DomainError(f"repeated target qubit in {targets}", field="targets")
    for q in targets:
        if not 1 <= q <= n:
            raise DomainError(f"qubit {q} out of range 1..{n}", field="targets")
    return targets


@dataclass(frozen=True, eq=False)
class PureState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_qubit_count(self.n)
        amplitudes = _frozen(self.amplitudes).reshape(-1)
        if amplitudes.shape != (2 ** self.n,):
            raise DomainError(
                f"expected {2 ** self.n} amplitudes, got {amplitudes.size}", field="amplitudes"
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > TOLERANCES.normalization:
            raise DomainError(f"state norm {norm!r} is not 1", field="amplitudes")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_unnormalized(cls, n, amplitudes):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        return cls(n, amplitudes / np.linalg.norm(amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n: int
    elements: np.ndarray

    def __post_init__(self):
        _check_qubit_count(self.n)
        dim = 2 ** self.n
        elements = _frozen(self.elements)
        if elements.shape != (dim, dim):
            raise DomainError(
                f"expected a {dim}x{dim} matrix, got shape {elements.shape}", field="elements"
            )
        skew = float(np.max(np.abs(elements - elements.conj().T)))
        if skew > TOLERANCES.hermitian:
            raise DomainError(f"matrix is not Hermitian (max skew {skew:.3e})", field="elements")
        trace = float(np.trace(elements).real)
        if abs(trace - 1.0) > TOLERANCES.trace:
            raise DomainError(f"trace {trace!r} is not 1", field="elements")
        lowest = float(hermitian_eigenvalues(elements)[0])
        if lowest < TOLERANCES.psd_floor:
            raise DomainError(
                f"matrix is not positive semidefinite (lowest eigenvalue {lowest:.3e})",
                field="elements",
            )
        object.__setattr__(self, "elements", elements)

    @property
    def dim(self):
        return 2 ** self.n

    def is_psd(self, floor=TOLERANCES.psd_floor):
        return bool(spectrum(self)[0] >= floor)

    def probability(self, index):
        """Population of computational basis state `index`."""
        return float(self.elements[index, index].real)


@dataclass(frozen=True, eq=False)
class Unitary:
    k: int
    elements: np.ndarray

    def __post_init__(self):
        _check_qubit_count(self.k, field="k")
        dim = 2 ** self.k
        elements = _frozen(self.elements)
        if elements.shape != (dim, dim):
            raise DomainError(
                f"expected a {dim}x{dim} gate, got shape {elements.shape}", field="elements"
            )
        defect = float(np.max(np.abs(elements @ elements.conj().T - np.eye(dim))))
        if defect > TOLERANCES.unitary:
            raise DomainError(f"gate is not unitary (defect {defect:.3e})", field="elements")
        object.__setattr__(self, "elements", elements)

    @property
    def dim(self):
        return 2 ** self.k


@dataclass(frozen=True)
class Bipartition:
    left: frozenset
    right: frozenset

    def __post_init__(self):
        left = frozenset(int(q) for q in self.left)
        right = frozenset(int(q) for q in self.right)
        if not left or not right:
            raise DomainError("both sides of a bipartition must be non-empty", field="left")
        if left & right:
            raise DomainError(f"qubits {sorted(left & right)} appear on both sides", field="right")
        n = len(left) + len(right)
        if left | right != set(range(1, n + 1)):
            raise DomainError(
                f"bipartition {sorted(left)}|{sorted(right)} does not cover 1..{n}", field="right"
            )
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def n(self):
        return len(self.left) + len(self.right)

    @property
    def label(self):
        return "".join(map(str, sorted(self.left))) + "|" + "".join(map(str, sorted(self.right)))

    @classmethod
    def single(cls, qubit, n):
        """The 1-vs-rest cut that isolates `qubit`."""
        return cls(frozenset({qubit}), frozenset(range(1, n + 1)) - {qubit})


@dataclass(frozen=True)
class MeasurementBranch:
    outcome: str
    probability: float
    state: DensityMatrix


# Standard gates

HADAMARD = Unitary(1, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
PAULI_X = Unitary(1, [[0, 1], [1, 0]])
PAULI_Z = Unitary(1, [[1, 0], [0, -1]])
IDENTITY = Unitary(1, np.eye(2))
CNOT = Unitary(2, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def phase_gate(alpha):
    """R(alpha) = e^{i alpha}|0><0| + |1><1|."""
    return Unitary(1, np.diag([np.exp(1j * alpha), 1.0]))


def hadamard_all(n):
    _check_qubit_count(n)
    return reduce(tensor, [HADAMARD] * n)


# Constructors

def basis_state(n, index):
    _check_qubit_count(n)
    if not 0 <= index < 2 ** n:
        raise DomainError(f"basis index {index} out of range for {n} qubits", field="index")
    amplitudes = np.zeros(2 ** n, dtype=complex)
    amplitudes[index] = 1.0
    return PureState(n, amplitudes)


def pure_to_density(psi):
    return DensityMatrix(psi.n, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def tensor(a, b):
    """Kronecker product with the left operand on the most significant qubits."""
    if type(a) is not type(b):
        raise DomainError(
            f"cannot tensor {type(a).__name__} with {type(b).__name__}", field="b"
        )
    if isinstance(a, PureState):
        return PureState(a.n + b.n, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix):
        return DensityMatrix(a.n + b.n, np.kron(a.elements, b.elements))
    if isinstance(a, Unitary):
        return Unitary(a.k + b.k, np.kron(a.elements, b.elements))
    raise DomainError(f"unsupported operand {type(a).__name__}", field="a")


# Tensor contractions

def _contract(tensor_view, gate_tensor, axes):
    """Apply a k-qubit gate tensor (shape (2,)*2k) to the given axes."""
    k = len(axes)
    out = np.tensordot(gate_tensor, tensor_view, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _gate_tensor(gate, conjugate=False):
    elements = gate.elements.conj() if conjugate else gate.elements
    return elements.reshape((2,) * (2 * gate.k))


def apply_local_matrix(elements, n, gate, targets):
    """U rho U^dagger on a raw 2^n x 2^n array; no invariant checks."""
    rows = [q - 1 for q in targets]
    view = np.asarray(elements).reshape((2,) * (2 * n))
    view = _contract(view, _gate_tensor(gate), rows)
    view = _contract(view, _gate_tensor(gate, conjugate=True), [n + r for r in rows])
    return view.reshape(2 ** n, 2 ** n)


def apply_local(rho, gate, targets):
    targets = _check_targets(targets, rho.n)
    if gate.k != len(targets):
        raise DomainError(
            f"{gate.k}-qubit gate cannot act on {len(targets)} targets", field="targets"
        )
    return DensityMatrix(rho.n, apply_local_matrix(rho.elements, rho.n, gate, targets))


def apply_gate(psi, gate, targets):
    """State-vector counterpart of apply_local."""
    targets = _check_targets(targets, psi.n)
    if gate.k != len(targets):
        raise DomainError(
            f"{gate.k}-qubit gate cannot act on {len(targets)} targets", field="targets"
        )
    view = psi.amplitudes.reshape((2,) * psi.n)
    view = _contract(view, _gate_tensor(gate), [q - 1 for q in targets])
    return PureState(psi.n, view.reshape(-1))


def embed(gate, targets, n):
    """Full-register operator of a local gate."""
    _check_qubit_count(n)
    targets = _check_targets(targets, n)
    if gate.k != len(targets):
        raise DomainError(
            f"{gate.k}-qubit gate cannot act on {len(targets)} targets", field="targets"
        )
    view = np.eye(2 ** n, dtype=complex).reshape((2,) * n + (2 ** n,))
    view = _contract(view, _gate_tensor(gate), [q - 1 for q in targets])
    return Unitary(n, view.reshape(2 ** n, 2 ** n))


def partial_trace_matrix(elements, n, keep):
    """Reduced raw array on the `keep` qubits (ascending order)."""
    keep = sorted(keep)
    traced = [q for q in range(1, n + 1) if q not in keep]
    order = [q - 1 for q in keep] + [q - 1 for q in traced]
    view = np.asarray(elements).reshape((2,) * (2 * n))
    view = view.transpose(order + [n + axis for axis in order])
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    return np.einsum("ijkj->ik", view.reshape(dk, dt, dk, dt))


def partial_trace(rho, keep):
    keep = set(_check_targets(keep, rho.n))
    if not keep or len(keep) == rho.n:
        raise DomainError("keep set must be a non-empty proper subset", field="keep")
    return DensityMatrix(len(keep), partial_trace_matrix(rho.elements, rho.n, keep))


def partial_transpose(rho, part):
    """Transpose on the qubits of part.right; returns a plain array."""
    if part.n != rho.n:
        raise DomainError(
            f"bipartition covers {part.n} qubits, state has {rho.n}", field="part"
        )
    n = rho.n
    axes = list(range(2 * n))
    for q in part.right:
        axes[q - 1], axes[n + q - 1] = axes[n + q - 1], axes[q - 1]
    view = rho.elements.reshape((2,) * (2 * n)).transpose(axes)
    return view.reshape(2 ** n, 2 ** n)


def hermitian_eigenvalues(matrix):
    """Ascending eigenvalues of the symmetrized matrix (M + M^dagger)/2."""
    matrix = np.asarray(matrix)
    return eigvalsh((matrix + matrix.conj().T) / 2)


def spectrum(rho):
    return hermitian_eigenvalues(rho.elements)


def purity(rho):
    return float(np.real(np.vdot(rho.elements, rho.elements)))


def negativity(rho, part):
    eigenvalues = hermitian_eigenvalues(partial_transpose(rho, part))
    return float(-eigenvalues[eigenvalues < 0].sum())


def measure_projective(rho, qubit, basis="z"):
    """
    Measure one qubit and return every branch with non-negligible weight.

    In the x basis the qubit is rotated with H, projected in z and rotated
    back, so the post-measurement state holds |+> or |->.
    """
    (qubit,) = _check_targets([qubit], rho.n)
    if basis not in ("z", "x"):
        raise DomainError(f"unknown basis {basis!r}", field="basis")

    n = rho.n
    elements = rho.elements
    if basis == "x":
        elements = apply_local_matrix(elements, n, HADAMARD, [qubit])
    labels = ("0", "1") if basis == "z" else ("+", "-")

    branches = []
    for bit, label in enumerate(labels):
        mask = np.array([((i >> (n - qubit)) & 1) == bit for i in range(2 ** n)])
        projected = np.where(np.outer(mask, mask), elements, 0)
        probability = float(np.trace(projected).real)
        if probability < TOLERANCES.branch_floor:
            logger.debug("dropping outcome %s on qubit %d (p=%.3e)", label, qubit, probability)
            continue
        if basis == "x":
            projected = apply_local_matrix(projected, n, HADAMARD, [qubit])
        branches.append(MeasurementBranch(label, probability, DensityMatrix(n, projected / probability)))
    return branches


def fidelity_with_pure(rho, psi):
    if rho.n != psi.n:
        raise DomainError(f"state has {rho.n} qubits, reference has {psi.n}", field="psi")
    value = np.vdot(psi.amplitudes, rho.elements @ psi.amplitudes)
    return float(value.real)
