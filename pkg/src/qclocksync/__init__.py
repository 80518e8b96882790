"""Simulation and estimation toolkit for multiparty quantum clock synchronization."""
from .estimator import amplitude, comparison_table, invert_probability, k_opt, monte_carlo_std
from .hamiltonian import (
    IdealClockSpec,
    MoleculeSpec,
    build_paper_echo_sequence,
    design_refocusing_sequence,
    sequence_unitary,
    sign_table,
    verify_echo,
)
from .protocol import (
    ProtocolConfig,
    analytic_probability,
    measure_dual_basis,
    run_protocol_exact,
    sample_shots,
    sweep,
)
from .qsim import StateVector
from .states import EntangledStateKind, prepare_bell, prepare_dicke, prepare_w

__version__ = "0.1.0"
