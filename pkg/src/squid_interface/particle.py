"""Single particle / single rf-SQUID interaction.

The joint state is a dim-4 :class:`StateVector`, particle first (row-major):

    index 0: |s>|0>_q   index 1: |s>|1>_q   index 2: |a>|0>_q   index 3: |a>|1>_q

``|s>`` is the particle wave passing outside the ring and ``|a>`` the wave
threading the bore.  In the particle's logical basis ``|0> = (|s>+|a>)/sqrt2``
and ``|1> = (|s>-|a>)/sqrt2``; the qubit's ``|s>_q, |a>_q`` are defined the
same way from ``|0>_q, |1>_q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .quantum import (
    MeasurementRecord,
    StateVector,
    UnitaryMatrix,
    apply_unitary,
    measure_subsystem,
    tensor,
)

SQRT_HALF = 1 / math.sqrt(2)

# particle kets in the {|s>, |a>} coordinates of the joint basis
PARTICLE_S = StateVector([1, 0])
PARTICLE_A = StateVector([0, 1])
PARTICLE_0 = StateVector([SQRT_HALF, SQRT_HALF])
PARTICLE_1 = StateVector([SQRT_HALF, -SQRT_HALF])

# qubit kets in the {|0>_q, |1>_q} coordinates
QUBIT_0 = StateVector([1, 0])
QUBIT_1 = StateVector([0, 1])
QUBIT_S = StateVector([SQRT_HALF, SQRT_HALF])
QUBIT_A = StateVector([SQRT_HALF, -SQRT_HALF])

#: readout basis {|s>_q, |a>_q}; outcome 1 (|a>_q) is a click
READOUT_BASIS = UnitaryMatrix(np.array([[1, 1], [1, -1]]) * SQRT_HALF)

_HADAMARD = np.array([[1, 1], [1, -1]]) * SQRT_HALF


@dataclass(frozen=True)
class InteractionParams:
    """Phase deficits of one passage.

    ``delta`` comes from vector potential outside the bore and ``epsilon``
    from the shifted well minima.  They add to first order, so the phase
    difference between the two qubit states is ``pi - delta - epsilon``.
    """

    delta: float = 0.0
    epsilon: float = 0.0
    charge_sign: int = -1

    def __post_init__(self):
        for name in ("delta", "epsilon"):
            value = getattr(self, name)
            if not 0 <= value < math.pi / 2:
                raise InvalidArgument(f"{name} must lie in [0, pi/2), got {value!r}")
        if self.charge_sign not in (-1, 1):
            raise InvalidArgument("charge_sign must be -1 or +1")

    @property
    def delta_theta(self) -> float:
        return math.pi - self.delta - self.epsilon


def joint_state(particle: StateVector, qubit: StateVector) -> StateVector:
    return tensor(particle, qubit)


def interaction_matrix(ip: InteractionParams) -> UnitaryMatrix:
    """Diagonal AB-phase unitary in the joint ``{s,a} x {0_q,1_q}`` basis."""
    half = ip.charge_sign * ip.delta_theta / 2
    return UnitaryMatrix(np.diag([1, 1, np.exp(1j * half), np.exp(-1j * half)]))


def shifter_matrix() -> UnitaryMatrix:
    return UnitaryMatrix(np.diag([1, 1, 1j, 1j]))


def interact(j: StateVector, ip: InteractionParams) -> StateVector:
    return apply_unitary(interaction_matrix(ip), j)


def pi_half_shifter(j: StateVector) -> StateVector:
    """Classical optics element: ``|a> -> i|a>``, ``|s>`` untouched."""
    return apply_unitary(shifter_matrix(), j)


def composite_cnot(ip: InteractionParams) -> UnitaryMatrix:
    """Shifter followed by the ring, in the particle-logical x qubit basis.

    Rows/columns are ordered ``|p>|q>`` with ``p`` the particle's logical bit.
    At ``delta = epsilon = 0`` this is a CNOT with the qubit as control.
    """
    U = interaction_matrix(ip).entries @ shifter_matrix().entries
    T = np.kron(_HADAMARD, np.eye(2))
    return UnitaryMatrix(T @ U @ T)


def click_probability(ip: InteractionParams, particle_present: bool) -> float:
    """Closed form ``cos^2((delta + epsilon)/2)`` when a particle passes, else 0."""
    if not particle_present:
        return 0.0
    return math.cos((ip.delta + ip.epsilon) / 2) ** 2


def _detector_state(ip: InteractionParams, particle_present: bool) -> StateVector:
    particle = PARTICLE_A if particle_present else PARTICLE_S
    return interact(joint_state(particle, QUBIT_S), ip)


def detect_particle(
    ip: InteractionParams,
    particle_present: bool,
    seed: int,
    outcome: int | None = None,
) -> MeasurementRecord:
    """Prepare ``|s>_q``, let the particle pass, read the qubit in ``{|s>_q, |a>_q}``.

    An absent particle is modelled as a wave that misses the bore.  Outcome 1
    is a click; ``post_state`` is the particle's state afterwards.
    """
    return measure_subsystem(_detector_state(ip, particle_present), (2, 2), 1, READOUT_BASIS, seed, outcome)


def simulate_detections(ip: InteractionParams, particle_present: bool, trials: int, seed: int) -> np.ndarray:
    """Boolean click record for ``trials`` independent passages.

    The pre-measurement state is the same every trial, so the Born click
    probability is computed once and all trials share one PCG64 stream.
    """
    if trials < 0:
        raise InvalidArgument("trials must be >= 0")
    psi = _detector_state(ip, particle_present).amplitudes.reshape(2, 2)
    # rows of psi are particle components; project the qubit factor onto |a>_q
    p_click = float(np.sum(np.abs(psi @ READOUT_BASIS.entries[1].conj()) ** 2))
    rng = np.random.default_rng(seed)
    return rng.random(trials) < p_click
