"""jointfeas: exact joint-distribution feasibility and hidden variables.

Decides, in exact rational arithmetic, whether observables with given
moments admit a joint probability distribution (equivalently, a
factoring hidden variable), constructs and verifies the hidden
variable, and evaluates the classical moment inequalities (three-
observable bounds, Bell's original inequality, CHSH, spin-1 variants,
GHZ-type product-moment systems, Gaussian correlation criteria) with
exact slacks cross-checked against the LP engine.
"""

__version__ = "0.1.0"

from .errors import (
    ConstraintMismatchError,
    InfeasibleMatrixError,
    JointfeasError,
    SizeCapError,
    UnsupportedNumberError,
    ValidationError,
)
from .algebraic import ExactNumber, Surd, as_fraction, make_surd, sqrt_fraction
from .probability import (
    Atom,
    Event,
    FiniteRandomVariable,
    JointDistribution,
    LemmaReport,
    check_certainty_lemma,
    conditional_probability,
    correlation,
    covariance,
    distribution_from_values,
    event_product,
    event_value,
    event_where,
    expectation,
    pm_one,
    point_mass,
    pushforward,
    uniform_distribution,
    variance,
)
from .feasibility import (
    DEFAULT_ATOM_CAP,
    ORACLE_ATOM_CAP,
    FeasibilityResult,
    MomentConstraint,
    MomentProblem,
    ReduceThenTestResult,
    brute_force_oracle,
    decide,
    reduce_then_test,
    verify_certificate,
)
from .hidden_variable import (
    ExchangeableConstruction,
    ExchangeableCriterion,
    FactorizationReport,
    HiddenVariableModel,
    LambdaPoint,
    construct_deterministic,
    exchangeable_symmetric_construct,
    exchangeable_symmetric_criterion,
    verify_factorization,
    verify_noncontextuality,
)
from .inequalities import (
    InequalityReport,
    eval_bell_original,
    eval_chsh,
    eval_spin1_strengthened,
    eval_triple_lower_bound_with_means,
    eval_triple_moment_bounds,
)
from .ghz import (
    DEFAULT_QUADRUPLES,
    GHZ_VARIABLE_ORDER,
    ChainReport,
    GHZConfig,
    build_ghz_problem,
    drop_constraints,
    minimal_infeasible_subsets,
    prove_ghz_infeasible,
    replay_certainty_chain,
    subset_feasibility_map,
)
from .gaussian import (
    CompletionResult,
    EigenReport,
    GaussianSpec,
    PartialCorrelationMatrix,
    complete_correlations,
    det_inequality_3var,
    eigenvalue_feasible,
    factoring_certificate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
