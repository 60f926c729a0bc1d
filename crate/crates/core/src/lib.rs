//! Exact computation of the resolvent-trace coefficients of real symmetric
//! tensors.
//!
//! The pipeline: enumerate perfect matchings of `[pk]` and glue them into
//! p-regular multigraphs ([`matchings`]), contract each isomorphism class
//! against a sparse tensor to get the invariants `M_k` and `M_k^conn`
//! ([`contraction`]), cross-check through Gaussian moments and cumulants of
//! the scalar `<T, g^(x)p>` ([`gaussian`]), normalize into the coefficient
//! sequence `alpha_k` and test Hamburger moment-sequence feasibility with
//! exact Hankel certificates ([`spectral`]). The explicit cubic family with
//! `alpha_4 < 0` lives in [`counterexample`], and [`montecarlo`] validates
//! the underlying partition-function definitions numerically on the
//! imaginary axis.
//!
//! All core arithmetic is exact (arbitrary-precision rationals); floating
//! point appears only in the explicitly float contraction paths, the
//! truncated series evaluator, and Monte Carlo.

mod combinatorics;

pub mod contraction;
pub mod counterexample;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod matchings;
pub mod montecarlo;
pub mod rational;
pub mod spectral;
pub mod tensor;

pub use contraction::{
    contract_network, contract_network_f64, invariant_m_k, invariant_m_k_conn,
    invariant_m_k_conn_f64, invariant_m_k_f64, plan_contraction, ContractionPlan, MergeStep,
};
pub use counterexample::{
    build_counterexample_tensor, counterexample_spec, f_closed_form, kappa4_of_counterexample,
    kappa4_quadratic_family, minimal_negative_parameter, CounterexampleSpec, Kappa4Backend,
};
pub use error::{Error, Result};
pub use gaussian::{
    cumulants_to_moments, enumerate_set_partitions, gaussian_monomial_moment,
    moments_to_cumulants, poly_cumulant, poly_cumulant_with_cap, poly_moment,
    poly_moment_with_cap, tensor_to_polynomial, GaussianPolynomial, SetPartition,
};
pub use io::{parse_sequence, parse_tensor, write_tensor};
pub use matchings::{
    build_multigraph, enumerate_connected, enumerate_matchings, is_connected,
    isomorphism_classes, ContractionGraph, Edge, IsoClass, Matching,
};
pub use montecarlo::{
    estimate_partition_function, estimate_resolvent, estimate_scalar_moment,
    verify_resolvent_identity, IdentityReport, McConfig, MomentEstimate, ResolventEstimate,
};
pub use rational::{double_factorial, format_rational, int, parse_rational, rat, to_f64, Rational};
pub use spectral::{
    check_moment_sequence, connected_invariants, matrix_recovery_check,
    normalized_coefficients, normalized_coefficients_f64, truncated_resolvent_series, Backend,
    Certificate, CoefficientValues, MatrixRecoveryReport, MomentProblemReport, MomentSequence,
    ResolventSeries, Verdict,
};
pub use tensor::SymmetricTensor;
