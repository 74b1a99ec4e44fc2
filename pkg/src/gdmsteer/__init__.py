"""EPR steering of the quantum phases of an impurity-doped cavity-BEC Dicke model."""

from .model import (
    EffectiveFrequencies,
    GdmParams,
    ImpurityRawParams,
    MeanField,
    ModelError,
    PhaseLabel,
    SuperradiantCoeffs,
    UnstableModeError,
    classify_phase,
    critical_coupling,
    effective_frequencies,
    impurity_couplings,
    mean_fields,
    superradiant_coeffs,
)
from .steering import (
    Direction,
    SteeringClass,
    SteeringMode,
    SteeringPair,
    WitnessReport,
    classify,
    find_threshold,
    qpt_witness,
    steering_at,
    steering_closed_form,
    steering_from_moments,
)
from .supermode import (
    Branch,
    CriticalPointError,
    Displacements,
    GaussianMoments,
    QuadraticModeProblem,
    SupermodeSpectrum,
    build_normal_problem,
    build_superradiant_problem,
    diagonalize,
    displacements,
    ground_state_branch,
    ground_state_moments,
)

__version__ = "0.1.0"
