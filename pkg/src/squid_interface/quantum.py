"""Finite-dimensional state-vector algebra.

Conventions used throughout the package:

* Tensor products are row-major: in ``tensor(a, b)`` the first factor is the
  slow index, so amplitude ``(i, j)`` sits at flat index ``i * b.dim + j``.
* Every sampling operation takes an explicit integer ``seed`` and draws from
  ``numpy.random.default_rng(seed)`` (the PCG64 bit generator).  One uniform
  deviate is drawn per measurement and mapped to an outcome by inverse-CDF
  lookup over the Born probabilities in basis order.
* A basis passed to :func:`measure` is a unitary whose *rows* are the
  measurement kets, i.e. row ``n`` holds the components of ``|b_n>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidArgument, InvalidState

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state over ``dim`` basis kets.

    Amplitudes whose norm is within ``NORM_TOL`` of one are renormalized
    silently; anything further off raises :class:`InvalidState`.  Use
    :func:`make_state` to normalize arbitrary nonzero input.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise InvalidState("state vector must have dim >= 1")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "amplitudes", _frozen(amps / norm))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __repr__(self):
        return f"StateVector(dim={self.dim}, amplitudes={np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    entries: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.entries, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] == 0:
            raise DimensionError(f"unitary must be a nonempty square matrix, got shape {U.shape}")
        residual = unitarity_residual(U)
        if residual >= UNITARY_TOL:
            raise InvalidArgument(f"matrix is not unitary (max |U^dag U - I| = {residual:.3e})")
        object.__setattr__(self, "entries", _frozen(U))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> UnitaryMatrix:
        return UnitaryMatrix(self.entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, UnitaryMatrix):
            return UnitaryMatrix(self.entries @ other.entries)
        if isinstance(other, StateVector):
            return apply_unitary(self, other)
        return NotImplemented

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Outcome of a projective measurement.

    ``post_state`` is the measured ket for a full-system measurement, and the
    conditional state of the unmeasured subsystems for
    :func:`measure_subsystem`.
    """

    outcome: int
    probability: float
    post_state: StateVector


def unitarity_residual(U) -> float:
    """Max-norm of ``U^dag U - I``."""
    U = np.asarray(U, dtype=complex)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def make_state(amplitudes: Sequence[complex] | np.ndarray) -> StateVector:
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.size == 0:
        raise InvalidState("state vector must have dim >= 1")
    norm = np.linalg.norm(amps)
    if not np.isfinite(norm) or norm == 0:
        raise InvalidState("cannot normalize a zero-norm (or non-finite) amplitude array")
    return StateVector(amps / norm)


def basis_state(dim: int, index: int) -> StateVector:
    if dim < 1:
        raise InvalidArgument("dim must be >= 1")
    if not 0 <= index < dim:
        raise InvalidArgument(f"basis index {index} out of range for dim {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def _as_unitary(U) -> UnitaryMatrix:
    return U if isinstance(U, UnitaryMatrix) else UnitaryMatrix(U)


def apply_unitary(U: UnitaryMatrix, s: StateVector) -> StateVector:
    U = _as_unitary(U)
    if U.dim != s.dim:
        raise DimensionError(f"unitary dim {U.dim} does not match state dim {s.dim}")
    return StateVector(U.entries @ s.amplitudes)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Row-major Kronecker product: index ``i * b.dim + j``."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """Squared overlap ``|<a|b>|^2``; insensitive to global phase.

    Clipped to 1 so rounding on unit-norm inputs never reports more than 1.
    """
    if a.dim != b.dim:
        raise DimensionError(f"cannot compare states of dim {a.dim} and {b.dim}")
    return min(1.0, float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def dft_matrix(N: int) -> UnitaryMatrix:
    """Unitary DFT with entry ``(s, k) = exp(2 pi i k s / N) / sqrt(N)``."""
    if N < 1:
        raise InvalidArgument("DFT size must be >= 1")
    k = np.arange(N)
    # reduce the exponent mod N first so large N keeps full phase accuracy
    phase = 2 * np.pi * (np.outer(k, k) % N) / N
    return UnitaryMatrix(np.exp(1j * phase) / np.sqrt(N))


def born_probabilities(s: StateVector, basis: UnitaryMatrix) -> np.ndarray:
    basis = _as_unitary(basis)
    if basis.dim != s.dim:
        raise DimensionError(f"basis dim {basis.dim} does not match state dim {s.dim}")
    return np.abs(basis.entries.conj() @ s.amplitudes) ** 2


def sample_outcome(probabilities: np.ndarray, seed: int) -> int:
    """Inverse-CDF draw of one index from ``probabilities`` using PCG64(seed)."""
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(probabilities)
    u = rng.random() * cdf[-1]
    idx = int(np.searchsorted(cdf, u, side="right"))
    idx = min(idx, len(cdf) - 1)
    # never land on a zero-probability outcome through round-off at the top end
    while probabilities[idx] == 0 and idx > 0:
        idx -= 1
    return idx


def _check_forced(outcome: int, probs: np.ndarray) -> None:
    if not 0 <= outcome < probs.size:
        raise InvalidArgument(f"forced outcome {outcome} out of range [0, {probs.size})")
    if probs[outcome] == 0:
        raise InvalidArgument(f"forced outcome {outcome} has zero probability")


def measure(s: StateVector, basis: UnitaryMatrix, seed: int, outcome: int | None = None) -> MeasurementRecord:
    """Projective measurement of the whole state onto the rows of ``basis``.

    Pass ``outcome`` to force a particular result (exhaustive testing); the
    reported probability is still the Born probability of that outcome.
    """
    basis = _as_unitary(basis)
    probs = born_probabilities(s, basis)
    if outcome is None:
        outcome = sample_outcome(probs, seed)
    else:
        _check_forced(outcome, probs)
    return MeasurementRecord(int(outcome), float(probs[outcome]), StateVector(basis.entries[outcome]))


def measure_subsystem(
    s: StateVector,
    dims: Sequence[int],
    which: int,
    basis: UnitaryMatrix,
    seed: int,
    outcome: int | None = None,
) -> MeasurementRecord:
    """Measure factor ``which`` of a row-major multipartite state.

    ``post_state`` is the normalized conditional state of the remaining
    factors, kept in their original order.
    """
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != s.dim:
        raise DimensionError(f"subsystem dims {dims} do not multiply to state dim {s.dim}")
    if not 0 <= which < len(dims):
        raise InvalidArgument(f"subsystem index {which} out of range")
    basis = _as_unitary(basis)
    if basis.dim != dims[which]:
        raise DimensionError(f"basis dim {basis.dim} does not match subsystem dim {dims[which]}")

    before = int(np.prod(dims[:which]))
    after = int(np.prod(dims[which + 1:]))
    psi = s.amplitudes.reshape(before, dims[which], after)
    # projected[n, a, b] = <b_n| psi[a, :, b]
    projected = np.einsum("nk,akb->nab", basis.entries.conj(), psi)
    probs = np.sum(np.abs(projected) ** 2, axis=(1, 2))
    if outcome is None:
        outcome = sample_outcome(probs, seed)
    else:
        _check_forced(outcome, probs)
    return MeasurementRecord(int(outcome), float(probs[outcome]), make_state(projected[outcome].reshape(-1)))
