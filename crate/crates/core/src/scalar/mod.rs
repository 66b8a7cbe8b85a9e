//! Differential-field scalars: exact rational functions and truncated jets.

pub mod backend;
pub mod field;
pub mod gcd;
pub mod jet;
pub mod monomial;
pub mod poly;
pub mod ratfunc;

use std::fmt::Debug;

use crate::error::Result;

pub use backend::{Backend, JetBackend, Symbolic};
pub use field::{Field, Fp, Ring, DEFAULT_PRIME};
pub use jet::{Jet, JetSpace};
pub use poly::{IntPoly, Poly, RatPoly};
pub use ratfunc::{RationalFunction, VariableContext};

/// Element of a differential field with partial derivatives along the coordinates.
///
/// Binary operations fail with `BackendMismatch` when the operands do not share
/// a variable context (symbolic) or a jet space (jets).
pub trait DiffScalar: Clone + Debug + PartialEq + Send + Sync {
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn mul(&self, o: &Self) -> Result<Self>;
    fn div(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Invertible in the backend. For jets this means a nonzero value at the base point,
    /// which is what makes jet-backend ranks "ranks at the point".
    fn is_unit(&self) -> bool;
    /// Derivative along coordinate `k` (0-based).
    fn partial(&self, k: usize) -> Result<Self>;
    fn render(&self) -> String;
}

impl DiffScalar for RationalFunction {
    fn add(&self, o: &Self) -> Result<Self> {
        self.try_add(o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        self.try_sub(o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        self.try_mul(o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.try_div(o)
    }
    fn neg(&self) -> Self {
        RationalFunction::neg(self)
    }
    fn zero_like(&self) -> Self {
        RationalFunction::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        RationalFunction::one(self.ctx())
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        !RationalFunction::is_zero(self)
    }
    fn partial(&self, k: usize) -> Result<Self> {
        RationalFunction::partial(self, k)
    }
    fn render(&self) -> String {
        RationalFunction::render(self)
    }
}

impl<C: Field> DiffScalar for Jet<C> {
    fn add(&self, o: &Self) -> Result<Self> {
        self.try_add(o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        self.try_sub(o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        self.try_mul(o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.try_div(o)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn zero_like(&self) -> Self {
        Jet::zero(self.space(), self.order())
    }
    fn one_like(&self) -> Self {
        Jet::constant(self.space(), self.order(), C::one())
    }
    fn is_zero(&self) -> bool {
        Jet::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        Jet::is_unit(self)
    }
    fn partial(&self, k: usize) -> Result<Self> {
        Jet::partial(self, k)
    }
    fn render(&self) -> String {
        self.value().to_string()
    }
}
