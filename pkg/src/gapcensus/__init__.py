"""Census of gaps between residues coprime to a square-free modulus.

The package counts how often a given pattern of offsets occurs among the
elements of U(n) (or any explicit subset of Z/nZ) and, for primorial moduli,
evaluates closed-form gap counts whose coefficients are computed once and
reused for every sufficiently large prime.
"""

from .configurations import (
    Configuration,
    SparseSubsetError,
    SubsetExplosionError,
    consecutive_core,
    core,
    induced_configuration,
    kappa_direct,
    kappa_inclusion_exclusion,
    nu_direct,
)
from .gaps import (
    EnumerationBudgetError,
    FormulaRangeError,
    GapCensus,
    GapCoefficientListing,
    ListingCache,
    coefficient_sum,
    direct_gap_count,
    format_listing,
    gap_census,
    gap_coefficients,
    gap_count,
    max_gap,
    p_star,
    parse_listing,
)
from .primes import is_prime, next_prime_after, primes_upto, primorial
from .rings import (
    ResidueSubset,
    RingContext,
    canonical,
    circle_distance,
    consecutive_pairs,
    is_consecutive_set,
    unit_group,
)
from .sieve import (
    FormulaOracleReport,
    SieveConfig,
    enumerate_coprime_gaps,
    verify_formula_against_oracle,
)
from .totients import (
    SquareFreeModulus,
    configuration_mod,
    euler_phi,
    generalized_totient,
    kappa_crt,
    nagell_theta,
    nu_crt,
    primorial_modulus,
)

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "EnumerationBudgetError",
    "FormulaOracleReport",
    "FormulaRangeError",
    "GapCensus",
    "GapCoefficientListing",
    "ListingCache",
    "ResidueSubset",
    "RingContext",
    "SieveConfig",
    "SparseSubsetError",
    "SquareFreeModulus",
    "SubsetExplosionError",
    "canonical",
    "circle_distance",
    "coefficient_sum",
    "configuration_mod",
    "consecutive_core",
    "consecutive_pairs",
    "core",
    "direct_gap_count",
    "enumerate_coprime_gaps",
    "euler_phi",
    "format_listing",
    "gap_census",
    "gap_coefficients",
    "gap_count",
    "generalized_totient",
    "induced_configuration",
    "is_consecutive_set",
    "is_prime",
    "kappa_crt",
    "kappa_direct",
    "kappa_inclusion_exclusion",
    "max_gap",
    "nagell_theta",
    "next_prime_after",
    "nu_crt",
    "nu_direct",
    "p_star",
    "parse_listing",
    "primes_upto",
    "primorial",
    "primorial_modulus",
    "unit_group",
    "verify_formula_against_oracle",
]
