"""Anomaly scores for graph vertices from continuous- and discrete-time quantum walks."""

from .analysis import comparison_table, kl_divergence, spectrum_energy_trace, sym_kl
from .classical import classical_anomaly_score, merw_transition, transition_matrix
from .config import RestartPolicy, ScoreReport, StartPolicy, WalkConfig
from .ctqw import (
    amplitude_encode,
    asymmetric_anomaly_score,
    ctqw_anomaly_score,
    estimate_mixing_time,
    estimate_sampling_time,
    evolve_chunked,
    limiting_distribution,
    measure_frequencies,
)
from .dtqw import coined_walk_operator, dtqw_anomaly_score, grover_coin, postselect, unitarize, weighted_coin
from .errors import InputError, NumericalError, QWalkError, ResonanceWarning
from .graph import (
    Graph,
    GeneratorKind,
    GeneratorMatrix,
    Kind,
    build_generator,
    dump_graph,
    hermitian_adjacency,
    laplacian,
    load_graph,
    mea_matrix,
    symmetrized_average,
)
from .spectral import (
    check_gamma_bound,
    check_laplacian_adjacency_bound,
    eigendecompose,
    hamiltonian_step,
    operator_norm,
)

__all__ = [
    "GeneratorKind",
    "GeneratorMatrix",
    "Graph",
    "InputError",
    "Kind",
    "NumericalError",
    "QWalkError",
    "ResonanceWarning",
    "RestartPolicy",
    "ScoreReport",
    "StartPolicy",
    "WalkConfig",
    "amplitude_encode",
    "asymmetric_anomaly_score",
    "build_generator",
    "check_gamma_bound",
    "check_laplacian_adjacency_bound",
    "classical_anomaly_score",
    "coined_walk_operator",
    "comparison_table",
    "ctqw_anomaly_score",
    "dtqw_anomaly_score",
    "dump_graph",
    "eigendecompose",
    "estimate_mixing_time",
    "estimate_sampling_time",
    "evolve_chunked",
    "grover_coin",
    "hamiltonian_step",
    "hermitian_adjacency",
    "kl_divergence",
    "laplacian",
    "limiting_distribution",
    "load_graph",
    "mea_matrix",
    "measure_frequencies",
    "merw_transition",
    "operator_norm",
    "postselect",
    "spectrum_energy_trace",
    "sym_kl",
    "symmetrized_average",
    "transition_matrix",
    "unitarize",
    "weighted_coin",
]

__version__ = "0.1.0"
