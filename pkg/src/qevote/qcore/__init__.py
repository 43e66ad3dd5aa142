"""Dense state-vector simulation of small qudit registers."""

from .state import (
    AMPLITUDE_BUDGET,
    MeasurementRecord,
    PureState,
    apply_unitary,
    basis_state,
    bitflip_matrix,
    fourier_matrix,
    ghz_phase_state,
    measure_computational,
    measure_difference,
    measure_fourier,
    phase_matrix,
    product_state,
    shift_matrix,
    y_flip_matrix,
)
from .povm import phase_povm_density, phase_povm_table, sample_phase_povm

__all__ = [
    "AMPLITUDE_BUDGET",
    "MeasurementRecord",
    "PureState",
    "apply_unitary",
    "basis_state",
    "bitflip_matrix",
    "fourier_matrix",
    "ghz_phase_state",
    "measure_computational",
    "measure_difference",
    "measure_fourier",
    "phase_matrix",
    "phase_povm_density",
    "phase_povm_table",
    "product_state",
    "sample_phase_povm",
    "shift_matrix",
    "y_flip_matrix",
]
