"""State transfer between a flying electron and an rf-SQUID qubit array.

The array is kept in its single-excitation subspace: ``|k>_A`` means only
qubit ``k`` has flipped to ``|a>_q``.  Electron pixel states ``|k>`` and array
states ``|k>_A`` therefore both live in an N-dimensional space.  Joint states
are row-major with the electron first, then the array, then the register.

On a 2D lattice pixels are flattened in raster order ``k = k_x + N_x k_y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidArgument
from .quantum import (
    StateVector,
    UnitaryMatrix,
    dft_matrix,
    fidelity,
    measure_subsystem,
)


@dataclass(frozen=True)
class Lattice2D:
    N_x: int
    N_y: int

    def __post_init__(self):
        if self.N_x < 1 or self.N_y < 1:
            raise InvalidArgument(f"lattice sides must be >= 1, got {self.N_x} x {self.N_y}")

    @property
    def N(self) -> int:
        return self.N_x * self.N_y

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """``(k_x, k_y)`` arrays for every flat index ``0..N-1``."""
        k = np.arange(self.N)
        return k % self.N_x, k // self.N_x


def raster_index(k_x: int, k_y: int, lat: Lattice2D) -> int:
    if not (0 <= k_x < lat.N_x and 0 <= k_y < lat.N_y):
        raise InvalidArgument(f"pixel ({k_x}, {k_y}) outside {lat.N_x} x {lat.N_y} lattice")
    return k_x + lat.N_x * k_y


def raster_coords(k: int, lat: Lattice2D) -> tuple[int, int]:
    if not 0 <= k < lat.N:
        raise InvalidArgument(f"flat index {k} outside [0, {lat.N})")
    return k % lat.N_x, k // lat.N_x


def _far_field(N: int, lattice: Lattice2D | None) -> np.ndarray:
    if lattice is None:
        return dft_matrix(N).entries
    if lattice.N != N:
        raise DimensionError(f"lattice has {lattice.N} pixels but the phase map has {N}")
    # raster order makes y the slow index
    return np.kron(dft_matrix(lattice.N_y).entries, dft_matrix(lattice.N_x).entries)


@dataclass(frozen=True, eq=False)
class DetectorPhaseMap:
    """Pixel phases ``theta_k`` of the far-field detector basis.

    The full basis is completed as ``A = F diag(exp(i theta))`` with ``F``
    the (1D or raster-2D) DFT, so row 0 is ``exp(i theta_k)/sqrt(N)`` and
    row ``s`` carries ``theta_k`` plus the far-field ramp (see
    :meth:`row_phases`).  Only the detected row matters for the protocol.
    """

    theta: np.ndarray
    lattice: Lattice2D | None = None

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float).reshape(-1)
        if theta.size == 0:
            raise InvalidArgument("phase map needs at least one pixel")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        _far_field(theta.size, self.lattice)

    @classmethod
    def flat(cls, N: int, lattice: Lattice2D | None = None) -> DetectorPhaseMap:
        return cls(np.zeros(N), lattice)

    @property
    def N(self) -> int:
        return self.theta.size

    def matrix(self) -> UnitaryMatrix:
        return UnitaryMatrix(_far_field(self.N, self.lattice) * np.exp(1j * self.theta)[None, :])

    def row_phases(self, s: int) -> np.ndarray:
        """Phases of ``|D_s>``, i.e. ``A[s, k] = exp(i row_phases(s)[k]) / sqrt(N)``."""
        if not 0 <= s < self.N:
            raise InvalidArgument(f"detector pixel {s} out of range")
        if self.lattice is None:
            k = np.arange(self.N)
            ramp = 2 * np.pi * ((k * s) % self.N) / self.N
        else:
            kx, ky = self.lattice.coords()
            sx, sy = raster_coords(s, self.lattice)
            ramp = 2 * np.pi * (((kx * sx) % self.lattice.N_x) / self.lattice.N_x
                                + ((ky * sy) % self.lattice.N_y) / self.lattice.N_y)
        return self.theta + ramp

    def for_outcome(self, s: int) -> DetectorPhaseMap:
        return DetectorPhaseMap(self.row_phases(s), self.lattice)


@dataclass(frozen=True)
class BellOutcome:
    n: int
    m: int

    def flat(self, N: int) -> int:
        self.check(N)
        return self.n * N + self.m

    @classmethod
    def from_flat(cls, index: int, N: int) -> BellOutcome:
        n, m = divmod(int(index), N)
        return cls(n, m).check(N)

    def check(self, N: int) -> BellOutcome:
        if not (0 <= self.n < N and 0 <= self.m < N):
            raise InvalidArgument(f"Bell outcome ({self.n}, {self.m}) out of range for N = {N}")
        return self


@dataclass(frozen=True, eq=False)
class TransferResult:
    outcome: int
    probability: float
    array_state: StateVector
    #: phases of the detected row; feed to :func:`phase_correct_image`
    row_phases: DetectorPhaseMap


@dataclass(frozen=True, eq=False)
class TeleportResult:
    outcome: BellOutcome
    probability: float
    electron_state: StateVector
    corrected: StateVector
    outcome_probabilities: np.ndarray


# -- electron -> array ------------------------------------------------------


def forward_transfer(
    c: StateVector,
    phases: DetectorPhaseMap | None = None,
    seed: int = 0,
    outcome: int | None = None,
) -> TransferResult:
    """Send the electron through the array and detect it in the far field.

    Builds ``sum_k c_k |k>|k>_A``, measures the electron in the detector basis
    and returns the detected pixel together with the collapsed array state
    ``~ sum_k c_k exp(-i theta_k) |k>_A`` for that pixel's phases.
    """
    N = c.dim
    if phases is None:
        phases = DetectorPhaseMap.flat(N)
    if phases.N != N:
        raise DimensionError(f"electron has {N} pixels but the phase map has {phases.N}")
    joint = np.zeros((N, N), dtype=complex)
    joint[np.arange(N), np.arange(N)] = c.amplitudes
    rec = measure_subsystem(StateVector(joint.reshape(-1)), (N, N), 0, phases.matrix(), seed, outcome)
    return TransferResult(rec.outcome, rec.probability, rec.post_state, phases.for_outcome(rec.outcome))


def phase_correct_image(state: StateVector, phases: DetectorPhaseMap) -> StateVector:
    """Pixelwise ``exp(+i theta_k)`` on the array qubits."""
    if phases.N != state.dim:
        raise DimensionError(f"state dim {state.dim} does not match phase map size {phases.N}")
    return StateVector(state.amplitudes * np.exp(1j * phases.theta))


# -- array -> electron ------------------------------------------------------


def bell_basis(N: int) -> UnitaryMatrix:
    """Qudit Bell basis; row ``n*N + m`` is ``|psi_{n,m}>`` over columns ``k*N + k'``.

    ``|psi_{n,m}> = N^{-1/2} sum_k exp(2 pi i k n/N) |k>_A |(k+m) mod N>_R``.
    """
    if N < 1:
        raise InvalidArgument("Bell basis needs N >= 1")
    B = np.zeros((N * N, N * N), dtype=complex)
    k = np.arange(N)
    for n in range(N):
        row_phase = np.exp(2j * np.pi * ((k * n) % N) / N) / math.sqrt(N)
        for m in range(N):
            B[n * N + m, k * N + (k + m) % N] = row_phase
    return UnitaryMatrix(B)


def teleport_state(d: StateVector) -> StateVector:
    """Electron (x) array (x) register state ``N^{-1/2} sum_{k,k'} d_k' |k>|k>_A|k'>_R``."""
    N = d.dim
    joint = np.zeros((N, N, N), dtype=complex)
    joint[np.arange(N), np.arange(N), :] = d.amplitudes[None, :] / math.sqrt(N)
    return StateVector(joint.reshape(-1))


def raw_electron_state(d: StateVector, o: BellOutcome) -> StateVector:
    """Closed form of the electron after Bell outcome ``(n, m)``.

    ``sum_k' exp(-2 pi i (k'-m) n/N) d_k' |(k'-m) mod N>``.
    """
    N = d.dim
    o.check(N)
    kp = np.arange(N)
    j = (kp - o.m) % N
    out = np.zeros(N, dtype=complex)
    out[j] = np.exp(-2j * np.pi * (((kp - o.m) * o.n) % N) / N) * d.amplitudes
    return StateVector(out)


def image_plane_correction(raw: StateVector, n: int) -> StateVector:
    """Undo the ``exp(-2 pi i j n / N)`` pixel phases."""
    N = raw.dim
    j = np.arange(N)
    return StateVector(raw.amplitudes * np.exp(2j * np.pi * ((j * n) % N) / N))


def cyclic_shift_operator(N: int, m: int) -> np.ndarray:
    """``F^dag diag(exp(2 pi i m s/N)) F``: maps ``|j>`` to ``|(j+m) mod N>``."""
    F = dft_matrix(N).entries
    s = np.arange(N)
    return F.conj().T @ np.diag(np.exp(2j * np.pi * ((m * s) % N) / N)) @ F


def apply_corrections_1d(raw: StateVector, o: BellOutcome) -> StateVector:
    """Image-plane phase fix, then the diffraction-plane cyclic shift by ``m``."""
    N = raw.dim
    o.check(N)
    fixed = image_plane_correction(raw, o.n)
    return StateVector(cyclic_shift_operator(N, o.m) @ fixed.amplitudes)


def _check_lattice(raw: StateVector, lat: Lattice2D) -> None:
    if raw.dim != lat.N:
        raise DimensionError(f"state dim {raw.dim} does not match {lat.N_x} x {lat.N_y} lattice")


def image_plane_correction_2d(raw: StateVector, n: int, lat: Lattice2D) -> StateVector:
    """Row phases ``2 pi n k_x/N`` followed by column phases ``2 pi n k_y/N_y``."""
    _check_lattice(raw, lat)
    kx, ky = lat.coords()
    rows = np.exp(2j * np.pi * ((n * kx) % lat.N) / lat.N)
    cols = np.exp(2j * np.pi * ((n * ky) % lat.N_y) / lat.N_y)
    return StateVector(cols * (rows * raw.amplitudes))


def apply_corrections_2d(
    raw: StateVector,
    o: BellOutcome,
    lat: Lattice2D,
    carry_compensation: bool = True,
) -> StateVector:
    """2D version of :func:`apply_corrections_1d` with separable optics.

    The diffraction-plane stage conjugates by the 2D DFT and applies
    ``2 pi m_x s_x/N_x`` and ``2 pi m_y s_y/N_y``.  That is a shift on the
    torus ``Z_Nx x Z_Ny``; the raster shift by ``m`` additionally carries one
    row whenever ``k_x + m_x >= N_x``.  The carry is removed in a mixed plane
    (Fourier along y only) by the phase ``2 pi s_y/N_y`` on the columns with
    ``x < m_x``.  With ``carry_compensation=False`` only the two separable
    stages run, which is exact only for ``m_x = 0``.
    """
    _check_lattice(raw, lat)
    o.check(lat.N)
    Nx, Ny = lat.N_x, lat.N_y
    m_x, m_y = raster_coords(o.m, lat)
    psi = image_plane_correction_2d(raw, o.n, lat).amplitudes.reshape(Ny, Nx)

    Fx, Fy = dft_matrix(Nx).entries, dft_matrix(Ny).entries
    sx, sy = np.arange(Nx), np.arange(Ny)
    far = Fy @ psi @ Fx.T
    far = far * np.exp(2j * np.pi * ((m_x * sx) % Nx) / Nx)[None, :]
    far = far * np.exp(2j * np.pi * ((m_y * sy) % Ny) / Ny)[:, None]
    psi = Fy.conj().T @ far @ Fx.conj()

    if carry_compensation and m_x:
        mixed = Fy @ psi
        carried = np.arange(Nx) < m_x
        mixed[:, carried] *= np.exp(2j * np.pi * sy / Ny)[:, None]
        psi = Fy.conj().T @ mixed
    return StateVector(psi.reshape(-1))


def teleport_reverse(
    d: StateVector,
    seed: int = 0,
    outcome: BellOutcome | None = None,
    lattice: Lattice2D | None = None,
) -> TeleportResult:
    """Teleport the register state ``d`` onto a plane-wave electron.

    The Bell measurement on array (x) register is sampled with ``seed`` (or
    forced with ``outcome``); the electron is then corrected with the 1D
    optics, or the separable 2D optics when ``lattice`` is given.
    """
    N = d.dim
    if lattice is not None and lattice.N != N:
        raise DimensionError(f"register dim {N} does not match {lattice.N_x} x {lattice.N_y} lattice")
    joint = teleport_state(d)
    B = bell_basis(N)
    # outcome probabilities of the AR pair, marginalised over the electron
    psi = joint.amplitudes.reshape(N, N * N)
    probs = np.sum(np.abs(psi @ B.entries.conj().T) ** 2, axis=0)
    forced = None if outcome is None else outcome.flat(N)
    rec = measure_subsystem(joint, (N, N * N), 1, B, seed, forced)
    o = BellOutcome.from_flat(rec.outcome, N)
    if lattice is None:
        corrected = apply_corrections_1d(rec.post_state, o)
    else:
        corrected = apply_corrections_2d(rec.post_state, o, lattice)
    return TeleportResult(o, rec.probability, rec.post_state, corrected, probs)


def transfer_fidelities(c: StateVector, phases: DetectorPhaseMap | None = None) -> np.ndarray:
    """Corrected forward-transfer fidelity for every detector pixel.

    Every row of the detector basis has modulus ``1/sqrt(N)``, so each pixel
    fires with probability ``1/N`` whatever ``c`` is.
    """
    out = []
    for s in range(c.dim):
        res = forward_transfer(c, phases, outcome=s)
        out.append(fidelity(phase_correct_image(res.array_state, res.row_phases), c))
    return np.array(out)
