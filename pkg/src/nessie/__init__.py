"""Nonequilibrium steady states of two coupled qubits.

Core pipeline: SystemParams + two BathSpecs -> Bloch-Redfield generator ->
steady state -> correlation measures (concurrence, CHSH and three-setting
Bell violations) and transport quantities (currents, entropy production,
rectification), with a sweep engine and a batch CLI on top.
"""

__version__ = "0.1.0"

from .correlations import (
    BellResult,
    Observable,
    XState,
    bell_operator_3322,
    bell_operator_chsh,
    chsh_max,
    concurrence,
    correlation_data,
    horodecki_m,
    i2_value,
    i3322_max,
)
from .eigensystem import (
    CouplingRegime,
    EigenSystem,
    build_eigensystem,
    build_hamiltonian,
    detuning_angle,
    to_energy_basis,
    to_local_basis,
)
from .errors import (
    ConfigError,
    DegenerateCoupling,
    DegenerateSteadyState,
    FermionTemperatureMismatch,
    MixedStatistics,
    NessieError,
    NonPhysical,
    NonPositiveBosonFrequency,
    StepFailure,
    StructureViolation,
    ZeroCurrent,
)
from .liouvillian import (
    Liouvillian,
    Rates,
    apply_dissipator,
    build_dissipator,
    build_liouvillian,
    occupation,
    transition_rates,
    unvec,
    vec,
)
from .params import BathSpec, Statistics, SystemParams
from .scan import (
    Axis,
    CntdEntry,
    FixedParams,
    SweepResult,
    SweepSpec,
    cntd_cancellation_map,
    evaluate_point,
    find_cntd,
    run_sweep,
)
from .steady_state import (
    SteadyState,
    equilibrium_steady_state,
    gibbs_state,
    propagate,
    solve_steady_state,
    trace_distance,
)
from .thermodynamics import (
    CurrentReport,
    current_report,
    entropy_production,
    heat_current,
    particle_current,
    rectification_ratio,
)
