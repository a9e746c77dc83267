"""Mixtures, hermeticity and which-path distinguishability on finite-dimensional states."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .correlation import (
    Classification,
    CorrelatedForm,
    chi_vectors,
    classify,
    classify_gram,
    conditional_prob,
    conditional_state,
    fully_distinguishable,
    hermetic_residual,
    indistinguishable,
    is_hermetic,
    sampled_indistinguishability,
)
from .errors import (
    ArgumentError,
    DegenerateFormError,
    DimensionError,
    GramSpecError,
    HermeticError,
    ImpossibleOutcomeError,
    InconclusiveWarning,
    InvalidStateError,
    LayoutError,
    MismatchedMarginalError,
    NormalizationError,
    NullDescriptorWarning,
    NullEventError,
    SpanError,
)
from .mixing import (
    GramSpec,
    MixResult,
    PhaseModel,
    mix_distinguishable,
    mix_general,
    mix_indistinguishable,
    mix_with_environment,
    phase_average,
    phase_average_monte_carlo,
    purify,
    steer_ensemble,
)
from .scenarios import (
    EstimatorState,
    Screen,
    ScreenPattern,
    SlitScenario,
    build_slit_scenario,
    condition_on,
    double_slit_env_mixture,
    estimator_update,
    screen_intensity,
    simulate_preparation_run,
    visibility,
)
from .states import (
    DensityOp,
    DescriptorSet,
    Ket,
    SystemLayout,
    described_by,
    is_pure,
    prob,
    purity,
    support_basis,
)
from .tolerances import DEFAULT, Tolerances
from .verifier import SuiteConfig, SuiteReport, run_suite

__all__ = [
    "__version__",
    "ArgumentError",
    "BACKEND",
    "Classification",
    "CorrelatedForm",
    "DEFAULT",
    "DegenerateFormError",
    "DensityOp",
    "DescriptorSet",
    "DimensionError",
    "EstimatorState",
    "GramSpec",
    "GramSpecError",
    "HermeticError",
    "ImpossibleOutcomeError",
    "InconclusiveWarning",
    "InvalidStateError",
    "Ket",
    "LayoutError",
    "MismatchedMarginalError",
    "MixResult",
    "NormalizationError",
    "NullDescriptorWarning",
    "NullEventError",
    "PhaseModel",
    "Screen",
    "ScreenPattern",
    "SlitScenario",
    "SpanError",
    "SuiteConfig",
    "SuiteReport",
    "SystemLayout",
    "Tolerances",
    "build_slit_scenario",
    "chi_vectors",
    "classify",
    "classify_gram",
    "condition_on",
    "conditional_prob",
    "conditional_state",
    "described_by",
    "double_slit_env_mixture",
    "estimator_update",
    "fully_distinguishable",
    "hermetic_residual",
    "indistinguishable",
    "is_hermetic",
    "is_pure",
    "mix_distinguishable",
    "mix_general",
    "mix_indistinguishable",
    "mix_with_environment",
    "phase_average",
    "phase_average_monte_carlo",
    "prob",
    "purify",
    "purity",
    "run_suite",
    "sampled_indistinguishability",
    "screen_intensity",
    "simulate_preparation_run",
    "steer_ensemble",
    "support_basis",
    "visibility",
]
