"""AxioQuad: axiomatic definite integration as an executable library.

Definite integrals are characterized by two properties: additivity over
adjacent intervals and first-order local asymptotics to the integrand.
This package evaluates integrals by antiderivative differences or by
certified Darboux brackets, verifies the two properties numerically for
arbitrary candidate integral functions, and derives geometric quantities
(area, arclength, shell volume) by extracting asymptotic coefficients
from local Euclidean models instead of assuming integral formulas.
"""

from .asymptotics import (
    DEFAULT_SCHEDULE,
    CoefficientExtraction,
    HSchedule,
    LimitEstimate,
    LittleODecision,
    OrderFit,
    check_increment_theorem,
    estimate_limit,
    extract_coefficient,
    fit_order,
    is_little_o,
)
from .darboux import (
    DarbouxBracket,
    IntegralResult,
    Partition,
    darboux_integral,
    lower_sum,
    refine_until,
    upper_sum,
)
from .errors import (
    AsymmetryError,
    AxioquadError,
    BadAntiderivativeError,
    DomainError,
    EvaluationError,
    InsufficientDataError,
    NoConvergenceError,
    NonFiniteError,
    NotC1Error,
    ParseError,
    PreconditionError,
    UnknownIdentifierError,
    VerificationError,
)
from .expr import (
    BinOp,
    Call,
    Const,
    Expression,
    Function,
    Neg,
    Var,
    differentiate,
    evaluate,
    parse,
    to_source,
)
from .geometry import (
    GeometricResult,
    LocalModel,
    accumulate_local_model,
    arclength,
    area_under_curve,
    chord_model,
    rectangle_model,
    shell_model,
    verify_geometric_axioms,
    volume_of_revolution_shells,
)
from .integral import (
    AxiomReport,
    AxiomTrial,
    CandidateIntegral,
    UniquenessCrosscheck,
    darboux_candidate,
    integrate,
    uniqueness_crosscheck,
    verify_additivity,
    verify_asymptotic,
)

__version__ = "0.1.0"
