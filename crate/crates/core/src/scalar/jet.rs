//! Truncated multivariate Taylor expansions at a fixed base point.
//!
//! Coefficients follow the Taylor convention: the entry for multi-index `I` is
//! `D^I f / I!`. Storage is dense, indexed by the graded positions of
//! [`IndexTable`], so the coefficients of a lower-order jet are a prefix of those
//! of a higher-order jet.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::multiindex::IndexTable;

use super::field::Field;

/// Shared indexing data for jets in `n` coordinates up to order `max_order`.
#[derive(Debug)]
pub struct JetSpace {
    table: IndexTable,
    /// For each position `i`: pairs `(j, k)` with `LL(i) + LL(j) = LL(k)`, sorted by `j`.
    products: Vec<Vec<(u32, u32)>>,
}

impl JetSpace {
    pub fn new(n: usize, max_order: usize) -> Arc<Self> {
        let table = IndexTable::build(n, max_order);
        let mut products = vec![Vec::new(); table.len()];
        for i in 0..table.len() {
            for j in 0..table.len() {
                if table.order(i) + table.order(j) > max_order {
                    continue;
                }
                let sum: Vec<u32> = table.ll(i).iter().zip(table.ll(j)).map(|(a, b)| a + b).collect();
                let k = table.ill(&sum).expect("sum within table");
                products[i].push((j as u32, k as u32));
            }
        }
        Arc::new(JetSpace { table, products })
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn max_order(&self) -> usize {
        self.table.h_max()
    }

    pub fn table(&self) -> &IndexTable {
        &self.table
    }

    pub fn len_upto(&self, order: usize) -> usize {
        self.table.count_upto(order)
    }
}

#[derive(Clone)]
pub struct Jet<C> {
    space: Arc<JetSpace>,
    order: usize,
    coeffs: Vec<C>,
}

impl<C: Field> Jet<C> {
    pub fn constant(space: &Arc<JetSpace>, order: usize, c: C) -> Self {
        assert!(order <= space.max_order());
        let mut coeffs = vec![C::zero(); space.len_upto(order)];
        coeffs[0] = c;
        Jet { space: space.clone(), order, coeffs }
    }

    pub fn zero(space: &Arc<JetSpace>, order: usize) -> Self {
        Jet::constant(space, order, C::zero())
    }

    /// The coordinate function `x_k` expanded at a point whose `k`-th coordinate is `at`.
    pub fn coordinate(space: &Arc<JetSpace>, order: usize, k: usize, at: C) -> Self {
        let mut j = Jet::constant(space, order, at);
        if order >= 1 {
            j.coeffs[1 + k] = C::one();
        }
        j
    }

    pub fn from_coeffs(space: &Arc<JetSpace>, order: usize, coeffs: Vec<C>) -> Self {
        assert_eq!(coeffs.len(), space.len_upto(order));
        Jet { space: space.clone(), order, coeffs }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Taylor coefficient at the multi-index `idx` (zero beyond the order budget).
    pub fn coeff(&self, idx: &[u32]) -> C {
        match self.space.table.ill(idx) {
            Some(p) if p < self.coeffs.len() => self.coeffs[p].clone(),
            _ => C::zero(),
        }
    }

    pub fn value(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &o.space) {
            Ok(())
        } else {
            Err(Error::BackendMismatch)
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet { space: self.space.clone(), order, coeffs: self.coeffs[..self.space.len_upto(order)].to_vec() }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let order = self.order.min(o.order);
        let len = self.space.len_upto(order);
        let coeffs = (0..len).map(|i| self.coeffs[i].clone() + o.coeffs[i].clone()).collect();
        Ok(Jet { space: self.space.clone(), order, coeffs })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let order = self.order.min(o.order);
        let len = self.space.len_upto(order);
        let coeffs = (0..len).map(|i| self.coeffs[i].clone() - o.coeffs[i].clone()).collect();
        Ok(Jet { space: self.space.clone(), order, coeffs })
    }

    pub fn neg(&self) -> Self {
        Jet { space: self.space.clone(), order: self.order, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        Jet {
            space: self.space.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let order = self.order.min(o.order);
        let len = self.space.len_upto(order);
        let mut out = vec![C::zero(); len];
        for i in 0..len {
            let a = &self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            for &(j, k) in &self.space.products[i] {
                let (j, k) = (j as usize, k as usize);
                if k >= len {
                    continue;
                }
                let b = &o.coeffs[j];
                if !b.is_zero() {
                    out[k] = out[k].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(Jet { space: self.space.clone(), order, coeffs: out })
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let inv0 = o.coeffs[0].inverse().ok_or(Error::DivisionByZero)?;
        let order = self.order.min(o.order);
        let len = self.space.len_upto(order);
        // q * o = self, solved position by position in graded order.
        let mut q: Vec<C> = Vec::with_capacity(len);
        let mut acc = self.coeffs[..len].to_vec();
        for i in 0..len {
            let qi = acc[i].clone() * inv0.clone();
            if !qi.is_zero() {
                for &(j, k) in &self.space.products[i] {
                    let (j, k) = (j as usize, k as usize);
                    if j == 0 || k >= len {
                        continue;
                    }
                    let b = &o.coeffs[j];
                    if !b.is_zero() {
                        acc[k] = acc[k].clone() - qi.clone() * b.clone();
                    }
                }
            }
            q.push(qi);
        }
        Ok(Jet { space: self.space.clone(), order, coeffs: q })
    }

    /// Partial derivative in coordinate `k` (0-based); lowers the order by one.
    pub fn partial(&self, k: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::JetOrderExhausted);
        }
        let table = &self.space.table;
        let order = self.order - 1;
        let len = self.space.len_upto(order);
        let coeffs = (0..len)
            .map(|p| {
                let up = table.ad(k, p).expect("within table");
                let factor = C::from_i64(table.ll(p)[k] as i64 + 1);
                self.coeffs[up].clone() * factor
            })
            .collect();
        Ok(Jet { space: self.space.clone(), order, coeffs })
    }
}

impl<C: Field> PartialEq for Jet<C> {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.space, &o.space) && self.order == o.order && self.coeffs == o.coeffs
    }
}

impl<C: Field> fmt::Debug for Jet<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(order {}; ", self.order)?;
        for (p, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, "{:?}:{} ", self.space.table.ll(p), c)?;
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::field::{Fp, Ring, DEFAULT_PRIME};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    type Q = BigRational;

    fn q(v: i64) -> Q {
        Q::from_integer(BigInt::from(v))
    }

    #[test]
    fn geometric_series() {
        let space = JetSpace::new(1, 2);
        let x = Jet::coordinate(&space, 2, 0, q(0));
        let one = Jet::constant(&space, 2, q(1));
        let inv = one.try_div(&one.try_add(&x).unwrap()).unwrap();
        assert_eq!(inv.coeffs(), &[q(1), q(-1), q(1)]);
    }

    #[test]
    fn product_and_partial() {
        let space = JetSpace::new(2, 3);
        let x1 = Jet::coordinate(&space, 3, 0, q(1));
        let x2 = Jet::coordinate(&space, 3, 1, q(2));
        let p = x1.try_mul(&x2).unwrap();
        assert_eq!(p.coeff(&[0, 0]), q(2));
        assert_eq!(p.coeff(&[1, 0]), q(2));
        assert_eq!(p.coeff(&[0, 1]), q(1));
        assert_eq!(p.coeff(&[1, 1]), q(1));
        let d = p.partial(0).unwrap();
        assert_eq!(d.order(), 2);
        assert_eq!(d.coeff(&[0, 0]), q(2));
        assert_eq!(d.coeff(&[0, 1]), q(1));
        let zero = Jet::<Q>::zero(&space, 0);
        assert_eq!(zero.partial(0).unwrap_err(), Error::JetOrderExhausted);
    }

    #[test]
    fn division_inverts_multiplication_mod_p() {
        type F = Fp<DEFAULT_PRIME>;
        let space = JetSpace::new(3, 4);
        let x: Vec<Jet<F>> = (0..3).map(|k| Jet::coordinate(&space, 4, k, F::from_i64(k as i64 + 2))).collect();
        let a = x[0].try_mul(&x[1]).unwrap().try_add(&x[2]).unwrap();
        let b = x[2].try_mul(&x[2]).unwrap().try_sub(&x[0]).unwrap();
        let r = a.try_div(&b).unwrap().try_mul(&b).unwrap();
        assert_eq!(r, a);
        assert!(F::one() != F::zero());
    }
}
