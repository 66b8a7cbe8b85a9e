//! Sparse multivariate polynomials over a coefficient ring.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{Field, Ring};
use super::monomial::{Monomial, MAX_VARS};

/// Terms are kept sorted by strictly decreasing monomial (lex order) with no zero
/// coefficient, so every polynomial has exactly one representation.
#[derive(Clone, PartialEq)]
pub struct Poly<C> {
    nvars: usize,
    terms: Vec<(Monomial, C)>,
}

pub type IntPoly = Poly<BigInt>;
pub type RatPoly = Poly<BigRational>;

impl<C: Ring> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables supported");
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.push((Monomial::ONE, c));
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, C::one())
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        assert!(v < nvars);
        Poly { nvars, terms: vec![(Monomial::var(v), C::one())] }
    }

    /// Builds from arbitrary (possibly repeated, unsorted, zero) terms.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut v: Vec<(Monomial, C)> = terms.into_iter().collect();
        v.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { nvars, terms: merge_sorted(v) }
    }

    /// Caller guarantees the canonical-form invariant.
    pub(crate) fn from_sorted_unchecked(nvars: usize, terms: Vec<(Monomial, C)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|t| !t.1.is_zero()));
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, C)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn constant_term(&self) -> C {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => C::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, C)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> C {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(C::zero)
    }

    pub fn coeff(&self, m: Monomial) -> C {
        self.terms
            .binary_search_by(|t| m.cmp(&t.0))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| C::zero())
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exponent(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.total_degree()).max().unwrap_or(0)
    }

    /// Lowest exponent of `v` over all terms (the `v`-adic valuation); 0 for the zero polynomial.
    pub fn valuation_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exponent(v)).min().unwrap_or(0)
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.iter().any(|t| t.0.exponent(v) > 0)
    }

    /// Component-wise minimum of all monomials.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::ONE,
            Some(first) => it.fold(first.0, |acc, t| acc.gcd(t.0)),
        }
    }

    pub fn neg(&self) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    fn combine(&self, o: &Self, negate: bool) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &o.terms);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 > b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i >= a.len() || b[j].0 > a[i].0 {
                let c = if negate { -b[j].1.clone() } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            } else {
                let c = if negate {
                    a[i].1.clone() - b[j].1.clone()
                } else {
                    a[i].1.clone() + b[j].1.clone()
                };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Poly { nvars: self.nvars, terms: out }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.nvars);
        }
        if self.terms.len() == 1 {
            return o.mul_term(self.terms[0].0, &self.terms[0].1);
        }
        if o.terms.len() == 1 {
            return self.mul_term(o.terms[0].0, &o.terms[0].1);
        }
        let mut acc: Vec<(Monomial, C)> = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                acc.push((ma.mul(*mb), ca.clone() * cb.clone()));
            }
        }
        acc.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { nvars: self.nvars, terms: merge_sorted(acc) }
    }

    pub fn mul_term(&self, m: Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(mm, cc)| {
                let p = cc.clone() * c.clone();
                (!p.is_zero()).then(|| (mm.mul(m), p))
            })
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.mul_term(Monomial::ONE, c)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exponent(v);
                if e == 0 {
                    return None;
                }
                let nc = c.clone() * C::from_i64(e as i64);
                (!nc.is_zero()).then(|| (m.with_exponent(v, e - 1), nc))
            })
            .collect::<Vec<_>>();
        // Lowering one exponent preserves the relative lex order of the surviving terms.
        Poly { nvars: self.nvars, terms }
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !dm.divides(*m) {
                    return None;
                }
                terms.push((m.div(*dm), c.try_divide(dc)?));
            }
            return Some(Poly { nvars: self.nvars, terms });
        }
        let (lm, lc) = d.terms[0].clone();
        // Quick degree rejection.
        for v in 0..self.nvars {
            if d.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let mut rem: BTreeMap<Monomial, C> = self.terms.iter().cloned().collect();
        let mut q = Vec::new();
        while let Some((&m, c)) = rem.iter().next_back() {
            if !lm.divides(m) {
                return None;
            }
            let qc = c.try_divide(&lc)?;
            let qm = m.div(lm);
            for (dm, dc) in &d.terms {
                let key = qm.mul(*dm);
                let delta = qc.clone() * dc.clone();
                match rem.get_mut(&key) {
                    Some(slot) => {
                        let nv = slot.clone() - delta;
                        if nv.is_zero() {
                            rem.remove(&key);
                        } else {
                            *slot = nv;
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            q.push((qm, qc));
        }
        Some(Poly { nvars: self.nvars, terms: q })
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Re-embeds into a ring with more variables (new ones appended).
    pub fn with_nvars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        Poly { nvars, terms: self.terms.clone() }
    }
}

impl<C: Field> Poly<C> {
    /// Substitutes the constant `value` for variable `v`.
    pub fn substitute(&self, v: usize, value: &C) -> Self {
        let maxd = self.degree_in(v) as usize;
        let mut pows = vec![C::one()];
        for i in 1..=maxd {
            let next = pows[i - 1].clone() * value.clone();
            pows.push(next);
        }
        Poly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|(m, c)| (m.with_exponent(v, 0), c.clone() * pows[m.exponent(v) as usize].clone())),
        )
    }

    /// Evaluates at a point given for all variables.
    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars);
        let mut powers: Vec<Vec<C>> = Vec::with_capacity(self.nvars);
        for (v, x) in point.iter().enumerate() {
            let maxd = self.degree_in(v) as usize;
            let mut row = vec![C::one()];
            for i in 1..=maxd {
                let next = row[i - 1].clone() * x.clone();
                row.push(next);
            }
            powers.push(row);
        }
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, row) in powers.iter().enumerate() {
                let e = m.exponent(v) as usize;
                if e > 0 {
                    t = t * row[e].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }
}

impl IntPoly {
    /// Gcd of all integer coefficients (nonnegative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_integer(&self, g: &BigInt) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, c / g)).collect(),
        }
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading_coeff().is_negative() {
            g = -g;
        }
        self.div_integer(&g)
    }

    pub fn to_rational(&self) -> RatPoly {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }

    /// Clears denominators: returns `(p, m)` with `self_rational = p / m`, `m > 0`.
    pub fn from_rational(r: &RatPoly) -> (IntPoly, BigInt) {
        let mut l = BigInt::one();
        for (_, c) in r.terms() {
            l = l.lcm(c.denom());
        }
        let p = Poly::from_sorted_unchecked(
            r.nvars(),
            r.terms()
                .iter()
                .map(|(m, c)| (*m, c.numer() * (&l / c.denom())))
                .collect(),
        );
        (p, l)
    }
}

fn merge_sorted<C: Ring>(v: Vec<(Monomial, C)>) -> Vec<(Monomial, C)> {
    let mut out: Vec<(Monomial, C)> = Vec::with_capacity(v.len());
    for (m, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == m => {
                last.1 = last.1.clone() + c;
            }
            _ => {
                if let Some(last) = out.last() {
                    if last.1.is_zero() {
                        out.pop();
                    }
                }
                out.push((m, c));
            }
        }
    }
    if let Some(last) = out.last() {
        if last.1.is_zero() {
            out.pop();
        }
    }
    out
}

/// Renders with the given variable names, e.g. `3*x1^2*c - 1/2`.
pub fn render_poly<C: Ring>(p: &Poly<C>, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (idx, (m, c)) in p.terms().iter().enumerate() {
        let mut coeff = c.to_string();
        let negative = coeff.starts_with('-');
        if negative {
            coeff.remove(0);
        }
        if idx == 0 {
            if negative {
                s.push('-');
            }
        } else {
            s.push_str(if negative { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        for v in 0..p.nvars() {
            match m.exponent(v) {
                0 => {}
                1 => factors.push(names[v].clone()),
                e => factors.push(format!("{}^{}", names[v], e)),
            }
        }
        if factors.is_empty() {
            s.push_str(&coeff);
        } else {
            if coeff != "1" {
                s.push_str(&coeff);
                s.push('*');
            }
            s.push_str(&factors.join("*"));
        }
    }
    s
}

impl<C: Ring> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", render_poly(self, &names))
    }
}
