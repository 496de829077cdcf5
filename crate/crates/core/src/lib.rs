//! Affine sieve workbench for orbits of `SO_Q(Z)` subgroups on the cone
//! `x² + y² − z² = 0`.
//!
//! Integer code is generic over [`scalar::Int`] (`i64`, `i128`, `BigInt`)
//! and numeric code over [`scalar::Real`] (`f32`, `f64`). The aliases below
//! fix the types used by the shipped pipelines.

pub mod arith;
pub mod census;
pub mod congruence;
pub mod dhr;
pub mod error;
pub mod lattice;
pub mod orbit;
pub mod presets;
pub mod scalar;

pub use error::{Error, Result};
pub use lattice::{act, eval_f, spin_lift, uv_param, validate_generator, SievePolynomial};
pub use orbit::{count_ball, enumerate_orbit, fit_exponent, EnumParams, GroupPresentation};
pub use scalar::{ExactInt, Int, Real};

/// Exact orbit point.
pub type BigTriple = lattice::Triple<num_bigint::BigInt>;
pub type BigMat2 = lattice::Mat2<num_bigint::BigInt>;
pub type BigMat3 = lattice::Mat3<num_bigint::BigInt>;
/// Machine-word point; overflow is reported through the `checked_*` methods.
pub type Triple64 = lattice::Triple<i64>;
pub type Mat3x64 = lattice::Mat3<i64>;

/// Exact local density `g(q)`.
pub type Density = num_rational::BigRational;

pub type Fit64 = orbit::PowerLawFit<f64>;
pub type SieveConstants64 = dhr::SieveConstants<f64>;
pub type SieveFunctionGrid64 = dhr::SieveFunctionGrid<f64>;
pub type RBound64 = dhr::RBound<f64>;
