"""Depolarizing channels in a superposition of cyclic causal orders.

Exact and count-level simulation of a quantum switch: Kraus-level switch
evolution with post-selection of the control, the closed-form effective
channel, Pauli-configuration emulation of the experiment, six-state
tomography and bootstrap error bars.
"""

from .channels import (
    DensityMatrix,
    KrausChannel,
    apply_channel,
    compose,
    depolarizing_channel,
    named_ket,
    pauli,
    unitary_basis,
    unitary_channel,
)
from .exceptions import DimensionError, InsufficientDataError, QSwitchError, ValidationError
from .experiment import (
    FidelityEstimate,
    MeasurementBasis,
    TomographyDataset,
    accumulate_configs,
    config_outcome,
    enumerate_configs,
    monte_carlo_fidelity,
    run_sampled,
    simulate_counts,
    tomography_reconstruct,
    uhlmann_fidelity,
)
from .qmath import eig_herm, herm_sqrt, partial_trace_control, tensor
from .switch import (
    ConditionalOutcome,
    OrderSet,
    SwitchSpec,
    cyclic_orders,
    effective_channel_prediction,
    fixed_order,
    full_orders,
    plus_state,
    run_switch,
    success_probability,
    switch_kraus,
)

__version__ = "0.1.0"
