"""Majorization toolkit for density-matrix ensembles and entanglement transformation.

The package decides which probability vectors can appear as the weights of a
pure-state mixture of a given density matrix, constructs explicit realizing
ensembles, rewrites bipartite pure states with prescribed weight vectors, and
simulates an exact measure-and-correct LOCC conversion of maximal entanglement
into an arbitrary target state.
"""

from .numkernel import (
    DensityMatrix,
    DomainError,
    Spectrum,
    ValidationError,
    frobenius_distance,
    hermitian_eig,
    random_density,
    random_unitary,
    validate_density,
)
from .majorize import (
    HornWitness,
    MajorizationError,
    SchurReport,
    TChain,
    TTransform,
    apply_t_chain,
    check_schur_inequalities,
    horn_orthogonal,
    is_majorized_by,
    schur_value,
    t_transform_chain,
    unitary_to_stochastic,
)
from .ensembles import (
    Ensemble,
    EnsembleAudit,
    EntropyReport,
    density_from_ensemble,
    entropy_report,
    is_compatible,
    synthesize_ensemble,
    uniform_ensemble,
    verify_ensemble,
)
from .bipartite import (
    BipartiteState,
    Cor4Decomposition,
    SchmidtDecomposition,
    corollary4_decompose,
    purify,
    reduced_density,
    relate_purifications,
    schmidt,
)
from .protocol import (
    CommCost,
    MeasurementSet,
    ProtocolTranscript,
    WeylPair,
    build_measurement,
    clock_op,
    comm_cost,
    enumerate_protocol,
    outcome_distribution,
    run_protocol,
    shift_op,
    weyl_op,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteState",
    "CommCost",
    "Cor4Decomposition",
    "DensityMatrix",
    "DomainError",
    "Ensemble",
    "EnsembleAudit",
    "EntropyReport",
    "HornWitness",
    "MajorizationError",
    "MeasurementSet",
    "ProtocolTranscript",
    "SchmidtDecomposition",
    "SchurReport",
    "Spectrum",
    "TChain",
    "TTransform",
    "ValidationError",
    "WeylPair",
    "apply_t_chain",
    "build_measurement",
    "check_schur_inequalities",
    "clock_op",
    "comm_cost",
    "corollary4_decompose",
    "density_from_ensemble",
    "entropy_report",
    "enumerate_protocol",
    "frobenius_distance",
    "hermitian_eig",
    "horn_orthogonal",
    "is_compatible",
    "is_majorized_by",
    "outcome_distribution",
    "purify",
    "random_density",
    "random_unitary",
    "reduced_density",
    "relate_purifications",
    "run_protocol",
    "schmidt",
    "schur_value",
    "shift_op",
    "synthesize_ensemble",
    "t_transform_chain",
    "uniform_ensemble",
    "unitary_to_stochastic",
    "validate_density",
    "verify_ensemble",
    "weyl_op",
]
