"""Desk-scale simulator of a hybrid machine: small quantum nodes driven by
a classical orchestrator, with exact operation-count accounting.

Two pipelines are provided.  The transform pipeline evaluates a real
signal's discrete Fourier transform by decimating it onto quantum-node
leaves (amplitude encoding, ancilla-controlled transform circuit, a
projection/measurement schedule, classical sign rebuilding) and combining
the leaf spectra through classical butterfly levels.  The search pipeline
partitions the index domain into sublists and amplifies each sublist's
solutions on a node with classical verification.  Every operation charges
fixed integer costs to a ledger that can be compared, exactly, with
closed-form forecasts.
"""

from .core import (
    ControlledPhase,
    GateOp,
    Hadamard,
    MeasurementEffect,
    PhaseShift,
    ResourceLimitError,
    StateVector,
    Swap,
    apply_controlled_circuit,
    apply_gate,
    build_qft_circuit,
    effect_probability,
    new_basis_state,
    project_data_register,
    sample_effect,
)
from .costs import (
    CostForecast,
    CostLedger,
    fit_scaling_exponent,
    merge_ledgers,
    predict_dft_cost,
    predict_search_cost,
)
from .hybrid_fft import (
    FftPlan,
    RealSignal,
    SpectrumVector,
    TwiddleTable,
    butterfly_combine,
    classical_fft,
    decimate_leaves,
    direct_dft,
    hybrid_dft,
)
from .readout import (
    BlockVector,
    ReadoutRecord,
    ReadoutSchedule,
    SpectrumEstimate,
    build_schedule,
    execute_schedule,
    prepare_block_state,
    rebuild_phases,
    rescale_to_dft,
)
from .search import (
    GroverOutcome,
    SearchGeometry,
    SearchOracle,
    SublistPartition,
    grover_operator_apply,
    partition_search,
    plan_iterations,
    search_node,
)

__version__ = "0.1.0"

__all__ = [
    "ControlledPhase", "GateOp", "Hadamard", "MeasurementEffect", "PhaseShift",
    "ResourceLimitError", "StateVector", "Swap", "apply_controlled_circuit",
    "apply_gate", "build_qft_circuit", "effect_probability", "new_basis_state",
    "project_data_register", "sample_effect",
    "CostForecast", "CostLedger", "fit_scaling_exponent", "merge_ledgers",
    "predict_dft_cost", "predict_search_cost",
    "FftPlan", "RealSignal", "SpectrumVector", "TwiddleTable",
    "butterfly_combine", "classical_fft", "decimate_leaves", "direct_dft",
    "hybrid_dft",
    "BlockVector", "ReadoutRecord", "ReadoutSchedule", "SpectrumEstimate",
    "build_schedule", "execute_schedule", "prepare_block_state",
    "rebuild_phases", "rescale_to_dft",
    "GroverOutcome", "SearchGeometry", "SearchOracle", "SublistPartition",
    "grover_operator_apply", "partition_search", "plan_iterations",
    "search_node",
]
