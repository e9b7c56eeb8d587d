//! Truncated Dirichlet series and Euler products over restricted prime
//! classes: exact identities for the `l_γ` series, numerical probes of
//! singularity exponents, Tauberian predictions and inverse fits of
//! partial-sum asymptotics.

mod euler;
mod fit;
mod lseries;
mod series;
mod tauberian;

pub use euler::{
    default_ladder, evaluate, evaluate_with_primes, expand, exp_integral_e1, exponent_probe, exponent_probe_with,
    EulerEvaluation, EulerProductSpec, ExponentProbe, LocalFactor, PrimeClass, EULER_PRIME_BOUND, MAX_FACTOR_DEGREE,
};
pub use fit::{asymptotic_fit, geometric_grid, linear_fit, Exponent, FitModel, FitResult, Line, MAX_CONDITION};
pub use lseries::{l_series, l_series_direct, l_series_recurrence, MAX_GAMMA};
pub use series::{CoeffSeries, Evaluation, Mode, Rational, MAX_TRUNCATION};
pub use tauberian::{gamma, tauberian_predict, AsymptoticShape};
