//! Exact multivariate rational functions over Q.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::{gcd, gcd_cofactors};
use super::poly::{render_poly, IntPoly, RatPoly};
use crate::error::{Error, Result};

/// Ordered coordinate symbols `x1..xn` followed by extra parameter symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableContext {
    coordinates: Vec<String>,
    parameters: Vec<String>,
}

impl VariableContext {
    pub fn new(coordinates: Vec<String>, parameters: Vec<String>) -> Result<Arc<Self>> {
        if coordinates.len() < 2 {
            return Err(Error::InvalidInput("at least two coordinates are required".into()));
        }
        let total = coordinates.len() + parameters.len();
        if total > super::monomial::MAX_VARS {
            return Err(Error::InvalidInput(format!(
                "at most {} coordinates and parameters in total",
                super::monomial::MAX_VARS
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in coordinates.iter().chain(parameters.iter()) {
            if !is_identifier(name) {
                return Err(Error::InvalidInput(format!("`{name}` is not a valid identifier")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidInput(format!("duplicate variable name `{name}`")));
            }
        }
        Ok(Arc::new(VariableContext { coordinates, parameters }))
    }

    /// Coordinates named `x1..xn` plus the given parameters.
    pub fn standard(n: usize, parameters: &[&str]) -> Result<Arc<Self>> {
        VariableContext::new(
            (1..=n).map(|i| format!("x{i}")).collect(),
            parameters.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.coordinates.len()
    }

    pub fn nvars(&self) -> usize {
        self.coordinates.len() + self.parameters.len()
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn names(&self) -> Vec<String> {
        self.coordinates.iter().chain(self.parameters.iter()).cloned().collect()
    }

    /// Variable index of a symbol (coordinates first, then parameters).
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coordinates
            .iter()
            .chain(self.parameters.iter())
            .position(|s| s == name)
    }

    pub fn parameter_index(&self, name: &str) -> Option<usize> {
        self.parameters.iter().position(|s| s == name).map(|p| p + self.n())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `num / den` in lowest terms: no common polynomial factor, joint integer content 1,
/// positive leading coefficient of `den`.
#[derive(Clone)]
pub struct RationalFunction {
    ctx: Arc<VariableContext>,
    num: IntPoly,
    den: IntPoly,
}

impl RationalFunction {
    pub fn zero(ctx: &Arc<VariableContext>) -> Self {
        let nv = ctx.nvars();
        RationalFunction { ctx: ctx.clone(), num: IntPoly::zero(nv), den: IntPoly::one(nv) }
    }

    pub fn one(ctx: &Arc<VariableContext>) -> Self {
        RationalFunction::from_integer(ctx, 1)
    }

    pub fn from_integer(ctx: &Arc<VariableContext>, v: i64) -> Self {
        let nv = ctx.nvars();
        RationalFunction { ctx: ctx.clone(), num: IntPoly::constant(nv, BigInt::from(v)), den: IntPoly::one(nv) }
    }

    pub fn from_rational(ctx: &Arc<VariableContext>, q: &BigRational) -> Self {
        let nv = ctx.nvars();
        RationalFunction {
            ctx: ctx.clone(),
            num: IntPoly::constant(nv, q.numer().clone()),
            den: IntPoly::constant(nv, q.denom().clone()),
        }
    }

    /// The variable with index `v` (coordinates first, then parameters).
    pub fn var(ctx: &Arc<VariableContext>, v: usize) -> Self {
        let nv = ctx.nvars();
        RationalFunction { ctx: ctx.clone(), num: IntPoly::var(nv, v), den: IntPoly::one(nv) }
    }

    pub fn from_poly(ctx: &Arc<VariableContext>, p: IntPoly) -> Self {
        assert_eq!(p.nvars(), ctx.nvars());
        let nv = ctx.nvars();
        RationalFunction::normalized_content(ctx.clone(), p, IntPoly::one(nv))
    }

    /// Builds `num / den`, cancelling common factors.
    pub fn new(ctx: &Arc<VariableContext>, num: IntPoly, den: IntPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let r = gcd_cofactors(&num, &den);
        Ok(RationalFunction::normalized_content(ctx.clone(), r.abar, r.bbar))
    }

    /// Only integer content and sign are normalized; caller guarantees coprimality.
    fn normalized_content(ctx: Arc<VariableContext>, num: IntPoly, den: IntPoly) -> Self {
        if num.is_zero() {
            return RationalFunction::zero(&ctx);
        }
        let mut g = num.content().gcd(&den.content());
        if den.leading_coeff().is_negative() {
            g = -g;
        }
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_integer(&g), den.div_integer(&g)) };
        RationalFunction { ctx, num, den }
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_constant() && self.num == self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        self.is_constant()
            .then(|| BigRational::new(self.num.constant_term(), self.den.constant_term()))
    }

    pub fn same_context(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &o.ctx) || *self.ctx == *o.ctx
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.same_context(o) {
            Ok(())
        } else {
            Err(Error::BackendMismatch)
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.add_sub(o, false))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.add_sub(o, true))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.mul_unchecked(o))
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let inv = o.inverse()?;
        Ok(self.mul_unchecked(&inv))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RationalFunction::normalized_content(self.ctx.clone(), self.den.clone(), self.num.clone()))
    }

    pub fn neg(&self) -> Self {
        RationalFunction { ctx: self.ctx.clone(), num: self.num.neg(), den: self.den.clone() }
    }

    fn add_sub(&self, o: &Self, negate: bool) -> Self {
        let onum = if negate { o.num.neg() } else { o.num.clone() };
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return RationalFunction { ctx: self.ctx.clone(), num: onum, den: o.den.clone() };
        }
        if self.den == o.den {
            let num = self.num.add(&onum);
            if self.den.is_constant() {
                return RationalFunction::normalized_content(self.ctx.clone(), num, self.den.clone());
            }
            let r = gcd_cofactors(&num, &self.den);
            return RationalFunction::normalized_content(self.ctx.clone(), r.abar, r.bbar);
        }
        if self.den.is_constant() && o.den.is_constant() {
            let num = self.num.mul(&o.den).add(&onum.mul(&self.den));
            return RationalFunction::normalized_content(self.ctx.clone(), num, self.den.mul(&o.den));
        }
        let g = gcd_cofactors(&self.den, &o.den);
        // self.den = g * b1, o.den = g * d1
        let num = self.num.mul(&g.bbar).add(&onum.mul(&g.abar));
        if num.is_zero() {
            return RationalFunction::zero(&self.ctx);
        }
        let den = g.abar.mul(&o.den);
        if g.gcd.is_constant() {
            return RationalFunction::normalized_content(self.ctx.clone(), num, den);
        }
        let h = gcd(&num, &g.gcd);
        if h.is_constant() {
            return RationalFunction::normalized_content(self.ctx.clone(), num, den);
        }
        let num = num.div_exact(&h).expect("gcd divides");
        let den = den.div_exact(&h).expect("gcd divides");
        RationalFunction::normalized_content(self.ctx.clone(), num, den)
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero(&self.ctx);
        }
        let (a, b, c, d) = (&self.num, &self.den, &o.num, &o.den);
        let (a1, d1) = cancel(a, d);
        let (c1, b1) = cancel(c, b);
        RationalFunction::normalized_content(self.ctx.clone(), a1.mul(&c1), b1.mul(&d1))
    }

    /// Partial derivative with respect to variable `v` (a coordinate or a parameter).
    pub fn derivative(&self, v: usize) -> Self {
        let da = self.num.derivative(v);
        let db = self.den.derivative(v);
        if db.is_zero() {
            return RationalFunction::normalized_content(self.ctx.clone(), da, self.den.clone());
        }
        // (a/b)' = (a' b - a b') / b^2 ; with g = gcd(b, b'), b = g b1, b' = g b2:
        // (a' b1 - a b2) / (b b1), then cancel against b.
        let g = gcd_cofactors(&self.den, &db);
        let num = da.mul(&g.abar).sub(&self.num.mul(&g.bbar));
        if num.is_zero() {
            return RationalFunction::zero(&self.ctx);
        }
        let den = self.den.mul(&g.abar);
        let r = gcd_cofactors(&num, &den);
        RationalFunction::normalized_content(self.ctx.clone(), r.abar, r.bbar)
    }

    /// Partial derivative with respect to coordinate `k` (0-based).
    pub fn partial(&self, k: usize) -> Result<Self> {
        if k >= self.ctx.n() {
            return Err(Error::InvalidInput(format!("coordinate index {} out of range", k + 1)));
        }
        Ok(self.derivative(k))
    }

    /// Substitutes a rational constant for variable `v`.
    pub fn substitute(&self, v: usize, value: &BigRational) -> Result<Self> {
        let (num, mn) = IntPoly::from_rational(&self.num.to_rational().substitute(v, value));
        let (den, md) = IntPoly::from_rational(&self.den.to_rational().substitute(v, value));
        if den.is_zero() {
            return Err(Error::SingularPoint);
        }
        // num/mn / (den/md) = (num * md) / (den * mn)
        let num = num.scale(&md);
        let den = den.scale(&mn);
        RationalFunction::new(&self.ctx, num, den)
    }

    /// Re-expresses in another context that contains every symbol this function involves.
    pub fn embed(&self, target: &Arc<VariableContext>) -> Result<Self> {
        let names = self.ctx.names();
        let map: Vec<Option<usize>> = names
            .iter()
            .enumerate()
            .map(|(v, s)| match target.index_of(s) {
                Some(j) => Ok(Some(j)),
                None if self.num.involves(v) || self.den.involves(v) => Err(Error::UnknownIdentifier(s.clone())),
                None => Ok(None),
            })
            .collect::<Result<_>>()?;
        let remap = |p: &IntPoly| -> IntPoly {
            IntPoly::from_terms(
                target.nvars(),
                p.terms().iter().map(|(m, c)| {
                    let mut e = vec![0u32; target.nvars()];
                    for (i, j) in map.iter().enumerate() {
                        if let Some(j) = j {
                            e[*j] = m.exponent(i);
                        }
                    }
                    (super::monomial::Monomial::from_exponents(&e), c.clone())
                }),
            )
        };
        Ok(RationalFunction { ctx: target.clone(), num: remap(&self.num), den: remap(&self.den) })
    }

    /// Exact value at a point given for every variable.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational> {
        let d = self.den.to_rational().eval(point);
        if d.is_zero() {
            return Err(Error::SingularPoint);
        }
        Ok(self.num.to_rational().eval(point) / d)
    }

    /// `v`-adic valuation: exponent of the lowest power of variable `v` dividing the
    /// function (negative for a pole along `v = 0`). `None` for zero.
    pub fn valuation(&self, v: usize) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.num.valuation_in(v) as i64 - self.den.valuation_in(v) as i64)
    }

    /// Same function with cross-multiplication equality, exposed for tests.
    pub fn equals(&self, o: &Self) -> bool {
        self.same_context(o) && self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    /// Renders in the input expression grammar.
    pub fn render(&self) -> String {
        let names = self.ctx.names();
        let num = render_poly(&self.num, &names);
        if self.den.is_one() {
            return num;
        }
        let den = render_poly(&self.den, &names);
        let num = if self.num.len() > 1 { format!("({num})") } else { num };
        let (m, c) = &self.den.terms()[0];
        let atomic = self.den.len() == 1
            && ((c.is_one() && (0..self.ctx.nvars()).filter(|&v| m.exponent(v) > 0).count() == 1)
                || m.is_one());
        let den = if atomic { den } else { format!("({den})") };
        format!("{num}/{den}")
    }

    /// Total size (number of terms), a rough complexity measure.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn as_rational_poly_pair(&self) -> (RatPoly, RatPoly) {
        (self.num.to_rational(), self.den.to_rational())
    }
}

/// Cancels the gcd of `a` and `b`.
fn cancel(a: &IntPoly, b: &IntPoly) -> (IntPoly, IntPoly) {
    if b.is_constant() || a.is_constant() {
        return (a.clone(), b.clone());
    }
    let r = gcd_cofactors(a, b);
    (r.abar, r.bbar)
}

impl PartialEq for RationalFunction {
    fn eq(&self, o: &Self) -> bool {
        self.equals(o)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<VariableContext> {
        VariableContext::standard(3, &["c"]).unwrap()
    }

    fn x(c: &Arc<VariableContext>, v: usize) -> RationalFunction {
        RationalFunction::var(c, v)
    }

    #[test]
    fn cancellation() {
        let c = ctx();
        let q = x(&c, 0).try_div(&x(&c, 2)).unwrap();
        let back = q.try_mul(&x(&c, 2)).unwrap();
        assert_eq!(back, x(&c, 0));
        assert!(back.denominator().is_one());
    }

    #[test]
    fn identical_difference_is_zero() {
        let c = ctx();
        let f = x(&c, 0).try_add(&x(&c, 3)).unwrap().try_div(&x(&c, 2).try_add(&x(&c, 3)).unwrap()).unwrap();
        let z = f.try_sub(&f).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn quotient_rule() {
        let c = ctx();
        let f = x(&c, 0).try_add(&x(&c, 3)).unwrap().try_div(&x(&c, 2).try_add(&x(&c, 3)).unwrap()).unwrap();
        let d = f.partial(0).unwrap();
        let want = RationalFunction::one(&c).try_div(&x(&c, 2).try_add(&x(&c, 3)).unwrap()).unwrap();
        assert_eq!(d, want);
        let prod = x(&c, 0).try_mul(&x(&c, 1)).unwrap();
        assert!(prod.partial(2).unwrap().is_zero());
        assert!(f.partial(3).is_err());
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let c = ctx();
        let z = RationalFunction::zero(&c);
        assert_eq!(x(&c, 0).try_div(&z), Err(Error::DivisionByZero));
        let other = VariableContext::standard(2, &[]).unwrap();
        assert_eq!(x(&c, 0).try_add(&RationalFunction::var(&other, 0)), Err(Error::BackendMismatch));
    }

    #[test]
    fn canonical_content_and_sign() {
        let c = ctx();
        let nv = c.nvars();
        let num = IntPoly::var(nv, 0).scale(&BigInt::from(6));
        let den = IntPoly::var(nv, 1).scale(&BigInt::from(-4));
        let f = RationalFunction::new(&c, num, den).unwrap();
        assert_eq!(f.numerator(), &IntPoly::var(nv, 0).scale(&BigInt::from(-3)));
        assert_eq!(f.denominator(), &IntPoly::var(nv, 1).scale(&BigInt::from(2)));
        assert_eq!(f.render(), "-3*x1/(2*x2)");
    }

    #[test]
    fn substitution_and_valuation() {
        let c = ctx();
        let cvar = x(&c, 3);
        let f = cvar.try_mul(&x(&c, 0)).unwrap().try_div(&x(&c, 2).try_add(&cvar).unwrap()).unwrap();
        assert_eq!(f.valuation(3), Some(1));
        let g = f.substitute(3, &BigRational::from_integer(BigInt::from(0))).unwrap();
        assert!(g.is_zero());
    }
}
