"""Task definitions, reductions, the measurement lemma, oracle circuits and collisions."""

from .circuits import (
    AdversaryCircuit,
    ClassicalOracle,
    FixedUnitary,
    OracleCall,
    oracle_swap_check,
    query_magnitude,
    run_circuit,
    z_clone_as_indicator,
)
from .collisions import collision_experiment, exact_state_reconstructor
from .lemma import lemma_bound
from .tasks import (
    Reconstructor,
    TelegraphProtocol,
    clone_via_telegraph,
    constraint_violations,
    is_orthogonal_with_duplication,
    noised_protocol,
    perfect_telegraph_for_orthogonal,
    reconstructor_via_telegraph,
)

__all__ = [
    "AdversaryCircuit",
    "ClassicalOracle",
    "FixedUnitary",
    "OracleCall",
    "Reconstructor",
    "TelegraphProtocol",
    "clone_via_telegraph",
    "collision_experiment",
    "constraint_violations",
    "exact_state_reconstructor",
    "is_orthogonal_with_duplication",
    "lemma_bound",
    "noised_protocol",
    "oracle_swap_check",
    "perfect_telegraph_for_orthogonal",
    "query_magnitude",
    "reconstructor_via_telegraph",
    "run_circuit",
    "z_clone_as_indicator",
]
