"""Gate-by-gate majorization checks for the QFT in phase estimation and for Grover search."""

__version__ = "0.1.0"

from .errors import DomainError, InvariantError, QmajError, ValidationError  # noqa: E402
from .statevec import (  # noqa: E402
    Circuit,
    ControlledPhase,
    Generic,
    Hadamard,
    Permutation,
    PhaseKick,
    StateVector,
    apply_controlled_phase,
    apply_gate,
    apply_generic,
    apply_hadamard,
    apply_phase_kick,
    entanglement_entropy,
    new_basis_state,
    probabilities,
    run_circuit,
)
from .distmaj import (  # noqa: E402
    MajorizationVerdict,
    Relation,
    apply_doubly_stochastic,
    compare,
    hadamard_mixture_witness,
    is_doubly_stochastic,
    lorenz_points,
)
from .circuits import (  # noqa: E402
    Phase,
    build_pea_register_state,
    final_probabilities_closed_form,
    grover_initial,
    grover_kernel,
    qft_canonical,
    qft_double,
    run_grover,
)
from .analysis import (  # noqa: E402
    hpair_pairing,
    hpair_propagation_check,
    hpair_report,
    interference_residuals,
    pair_interference_vanishes,
)
from .tracer import (  # noqa: E402
    Trace,
    TraceOptions,
    run_grover_traced,
    run_pea_traced,
    run_qft_traced,
    run_traced,
)
