"""Dark-path pulse synthesis and open-system simulation of holonomic
controlled gates on blockaded Rydberg atoms."""

from .linalg import (
    DensityMatrix,
    Ket,
    Operator,
    basis_state,
    dagger,
    embed,
    expectation,
    hermitian_eigen,
    kron,
    outer,
)
from .pulses import (
    GateSpec,
    LoopShape,
    PhasePlan,
    PulseSample,
    PulseSchedule,
    dark_path_D2,
    dark_state_D1,
    make_schedule,
    peak_envelope,
    phase_plan,
    rabi_at,
    tau_for_peak,
    uv_at,
)
from .hamiltonians import (
    ChainSpec,
    DriveErrors,
    HamiltonianFn,
    LindbladChannel,
    NoiseSpec,
    ThreeAtomSpec,
    TwoAtomSpec,
    channels_2,
    channels_3,
    channels_N,
    h_eff_2,
    h_eff_3,
    h_eff_N,
    h_full_2,
    h_full_3,
    h_full_N,
    h_rot_2,
    h_rot_3,
    product_basis,
    vdw_strength,
)
from .dynamics import (
    EvolveReport,
    IntegrationError,
    StepPolicy,
    lindblad_evolve,
    propagate_ket,
    propagator,
)
from .gates import (
    BenchmarkSet,
    FidelityReport,
    average_fidelity,
    benchmark_states,
    holonomy_check,
    ideal_controlled_gate,
    ideal_rotation,
)

__version__ = "0.1.0"
