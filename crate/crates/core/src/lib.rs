//! Curvature of webs of curves: prolongation of the abelian-relation system,
//! tautological connection, and maximal-rank certification.

pub mod certify;
pub mod connection;
pub mod error;
pub mod expr;
pub mod flat;
pub mod linalg;
pub mod multiindex;
pub mod prolong;
pub mod scalar;
pub mod web;

pub use error::{Error, Result};
pub use scalar::{DiffScalar, RationalFunction, VariableContext};

/// Prime field with the default modulus `2^61 - 1`.
pub type Fp61 = scalar::Fp<{ scalar::DEFAULT_PRIME }>;
/// Jets over exact rationals.
pub type RationalJet = scalar::Jet<num_rational::BigRational>;
/// Jets over the default prime field.
pub type ModJet = scalar::Jet<Fp61>;
