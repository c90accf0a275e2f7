"""Simulator for an rf-SQUID qubit used as a quantum interface to flying charged particles."""

from .errors import DimensionError, InvalidArgument, InvalidState, MonostableError, QuantumInterfaceError
from .particle import InteractionParams, composite_cnot, detect_particle, interact, pi_half_shifter
from .protocols import (
    BellOutcome,
    DetectorPhaseMap,
    Lattice2D,
    apply_corrections_1d,
    apply_corrections_2d,
    bell_basis,
    forward_transfer,
    phase_correct_image,
    raster_coords,
    raster_index,
    teleport_reverse,
)
from .quantum import (
    MeasurementRecord,
    StateVector,
    UnitaryMatrix,
    apply_unitary,
    dft_matrix,
    fidelity,
    make_state,
    measure,
    tensor,
)
from .squid import (
    BoreGeometry,
    SquidParams,
    backaction,
    biased_potential,
    detection_error_budget,
    dissipation,
    effective_inductance,
    find_minima_numeric,
    geometric_delta,
    leakage_probability,
    potential,
    solve_epsilon,
)

__version__ = "0.1.0"
