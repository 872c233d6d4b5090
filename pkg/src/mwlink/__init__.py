"""Microwave-interconnect entanglement toolkit.

Gaussian CV entanglement swap between transduction cavities, closed-form
rate bounds, a time-bin benchmark, and hybrid variational distillation to
transmon Bell pairs.
"""

from .gaussian import (
    TransducerParams,
    TwoModeGaussian,
    UVWTriple,
    apply_optical_loss,
    cv_swap,
    mo_state,
    teleport_swap,
    transducer_covariance,
)
from .measures import (
    bell_fidelity,
    g_func,
    gaussian_eof_symmetric,
    gaussian_rci,
    h_func,
    qubit_eof,
    rci_general,
    symplectic_eigenvalues,
)
from .timebin import fock_probabilities, heralded_state, timebin_rate, timebin_rci
from .fock import DensityMatrix, FockOperator, displacement_matrix, gaussian_to_fock
from .hybrid import (
    HybridCircuitParams,
    HybridEvaluator,
    ProtocolResult,
    direct_swap,
    run_protocol,
)
from .dv import DVCircuitParams, dejmps, dv_lvqc, two_copy_pipeline
from .training import TrainConfig, TrainRecord, adam_train
from .frontier import ProtocolPoint, extrapolate, interpolate, pareto

__version__ = "0.1.0"
