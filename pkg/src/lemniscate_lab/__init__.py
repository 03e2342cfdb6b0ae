"""lemniscate-lab: exact and asymptotic free energies of lemniscate
Coulomb-gas ensembles at beta = 2.

The package computes log Z_n for the d-fold symmetric potential
|z|^{2d} - t(z^d + conj(z)^d) with an optional point charge at the origin,
by three independent exact routes (multi-fold decomposition, Gram
determinant, t = 0 closed form), evaluates every coefficient of the
n -> infinity expansion in both phases of the droplet, and verifies the
expansions numerically, including the oscillatory constant term and the
1/N correction series of Ginibre characteristic-polynomial moments.
"""

from .asympt import (
    BasisFit,
    ExpansionCoefficients,
    FunctionalSet,
    a1_asymptotic,
    a2_asymptotic,
    a3_asymptotic,
    coefficients,
    conjectured_log_coefficient,
    deano_simm_rhs,
    expansion_value,
    fit_expansion_basis,
    functionals,
    oscillation_cancellation,
)
from .convergence import (
    ConvergenceReport,
    OscillationReport,
    extract_oscillation,
    fit_remainder_exponent,
    run_convergence,
)
from .errors import (
    AccuracyError,
    CriticalRegimeError,
    DomainError,
    LemniscateError,
    PrecisionEscalationError,
    RegimeError,
    SingularInputError,
    UnsupportedParameterError,
)
from .exactz import (
    LogValue,
    OrthoNormTable,
    ReducedParams,
    lemniscate_moment,
    lemniscate_moment_quad,
    log_Z_dual_potential,
    log_Z_ginibre,
    log_Z_gram,
    log_Z_lemniscate,
    log_Z_radial,
    map_parameters,
    norm_c1_incomplete_gamma,
    ortho_norms,
    planar_moment,
    prefactor_log_cNdm,
)
from .ginibre_moments import (
    MomentQuery,
    correction_coefficient,
    log_moment_a0_closed,
    log_moment_asymptotic_bulk,
    log_moment_asymptotic_outside,
    log_moment_exact,
    log_moment_unified_bulk,
    norm_asymptotic,
    subleading_coefficient,
)
from .model import (
    EnergyReport,
    LemniscateParams,
    Regime,
    critical_t,
    droplet_boundary,
    droplet_contains,
    entropy_integral,
    equilibrium_density,
    equilibrium_energy,
    euler_characteristic,
    potential_value,
    regime,
    regularized_conformal_integral,
)
from .precision import DEFAULT_BITS
from .sampling import (
    EmpiricalStats,
    SampleCloud,
    empirical_vs_equilibrium,
    sample_equilibrium,
    sample_gas,
)
from .specfun import (
    barnes_asymptotic_series,
    bernoulli,
    gamma_asymptotic_series,
    log_barnes_g,
    log_gamma,
    regularized_gamma_p,
    regularized_gamma_q,
    zeta_prime_minus_one,
)

__version__ = "0.1.0"
