//! Backends turn the symbolic input of a web into the scalars a pipeline runs on.

use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};

use super::field::Field;
use super::jet::{Jet, JetSpace};
use super::poly::IntPoly;
use super::ratfunc::{RationalFunction, VariableContext};
use super::DiffScalar;

pub trait Backend: Send + Sync {
    type Scalar: DiffScalar;

    fn lift(&self, f: &RationalFunction) -> Result<Self::Scalar>;

    fn name(&self) -> &'static str;
}

/// Exact rational functions; identities certified as identities.
#[derive(Debug, Clone, Copy, Default)]
pub struct Symbolic;

impl Backend for Symbolic {
    type Scalar = RationalFunction;

    fn lift(&self, f: &RationalFunction) -> Result<RationalFunction> {
        Ok(f.clone())
    }

    fn name(&self) -> &'static str {
        "symbolic"
    }
}

/// Truncated Taylor expansions at a fixed point, coefficients in `C`.
///
/// Parameters are frozen at the point's values; only coordinates carry jets.
#[derive(Debug, Clone)]
pub struct JetBackend<C> {
    ctx: Arc<VariableContext>,
    space: Arc<JetSpace>,
    order: usize,
    point: Vec<C>,
}

impl<C: Field> JetBackend<C> {
    /// `point` lists a value for each coordinate, then each parameter.
    pub fn new(ctx: &Arc<VariableContext>, point: &[BigRational], order: usize) -> Result<Self> {
        if point.len() != ctx.nvars() {
            return Err(Error::InvalidInput(format!(
                "point has {} values, context has {} variables",
                point.len(),
                ctx.nvars()
            )));
        }
        let point = point.iter().map(|q| C::from_rational(q).ok_or(Error::SingularPoint)).collect::<Result<_>>()?;
        Ok(JetBackend { ctx: ctx.clone(), space: JetSpace::new(ctx.n(), order), order, point })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn point(&self) -> &[C] {
        &self.point
    }

    fn lift_poly(&self, p: &IntPoly) -> Result<Jet<C>> {
        let n = self.ctx.n();
        let coords: Vec<Jet<C>> =
            (0..n).map(|k| Jet::coordinate(&self.space, self.order, k, self.point[k].clone())).collect();
        // powers[k][e] = x_k^e, grown on demand
        let mut powers: Vec<Vec<Jet<C>>> = coords.iter().map(|x| vec![x.one_like(), x.clone()]).collect();
        let mut acc = Jet::zero(&self.space, self.order);
        for (m, c) in p.terms() {
            let mut coef = C::from_rational(&BigRational::from_integer(c.clone())).ok_or(Error::SingularPoint)?;
            for v in n..self.ctx.nvars() {
                for _ in 0..m.exponent(v) {
                    coef = coef * self.point[v].clone();
                }
            }
            if coef.is_zero() {
                continue;
            }
            let mut term: Option<Jet<C>> = None;
            for k in 0..n {
                let e = m.exponent(k) as usize;
                if e == 0 {
                    continue;
                }
                while powers[k].len() <= e {
                    let next = powers[k].last().unwrap().try_mul(&coords[k])?;
                    powers[k].push(next);
                }
                term = Some(match term {
                    None => powers[k][e].clone(),
                    Some(t) => t.try_mul(&powers[k][e])?,
                });
            }
            let term = match term {
                None => Jet::constant(&self.space, self.order, coef),
                Some(t) => t.scale(&coef),
            };
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }
}

impl<C: Field> Backend for JetBackend<C> {
    type Scalar = Jet<C>;

    fn lift(&self, f: &RationalFunction) -> Result<Jet<C>> {
        if !Arc::ptr_eq(f.ctx(), &self.ctx) && **f.ctx() != *self.ctx {
            return Err(Error::BackendMismatch);
        }
        let den = self.lift_poly(f.denominator())?;
        if !den.is_unit() {
            return Err(Error::SingularPoint);
        }
        self.lift_poly(f.numerator())?.try_div(&den)
    }

    fn name(&self) -> &'static str {
        "point"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::field::{Fp, DEFAULT_PRIME};
    use num_bigint::BigInt;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn geometric_series_lift() {
        let ctx = VariableContext::standard(2, &[]).unwrap();
        let one = RationalFunction::one(&ctx);
        let f = one.try_div(&one.try_add(&RationalFunction::var(&ctx, 0)).unwrap()).unwrap();
        let b = JetBackend::<BigRational>::new(&ctx, &[q(0), q(0)], 2).unwrap();
        let j = b.lift(&f).unwrap();
        assert_eq!(j.coeff(&[0, 0]), q(1));
        assert_eq!(j.coeff(&[1, 0]), q(-1));
        assert_eq!(j.coeff(&[2, 0]), q(1));
        assert_eq!(j.coeff(&[0, 1]), q(0));
    }

    #[test]
    fn singular_and_parameter_lift() {
        let ctx = VariableContext::standard(3, &["c"]).unwrap();
        let x1 = RationalFunction::var(&ctx, 0);
        let c = RationalFunction::var(&ctx, 3);
        let f = x1.try_div(&c).unwrap();
        let at_zero = JetBackend::<Fp<DEFAULT_PRIME>>::new(&ctx, &[q(1), q(2), q(3), q(0)], 2).unwrap();
        assert_eq!(at_zero.lift(&f).unwrap_err(), Error::SingularPoint);
        let b = JetBackend::<BigRational>::new(&ctx, &[q(1), q(2), q(3), q(4)], 2).unwrap();
        let j = b.lift(&f).unwrap();
        assert_eq!(j.coeff(&[1, 0, 0]), BigRational::new(BigInt::from(1), BigInt::from(4)));
        assert_eq!(b.lift(&RationalFunction::from_integer(&ctx, 7)).unwrap().coeff(&[0, 0, 0]), q(7));
    }
}
