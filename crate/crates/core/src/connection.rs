//! The tautological connection on `R_{h0-1}` and its curvature.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multiindex::{dim_upto, IndexTable};
use crate::prolong::{build_system, ProlongedSystem};
use crate::scalar::{Backend, DiffScalar};
use crate::web::WebSpec;

/// Pivot columns of `M_{h0-1}` (1-based): `h0*s + 1 + h(s)` for every position `s`
/// of order at most `h0 - 1`, i.e. the unknown `(Y_{n+1+h(s)})'_{LL(s)}`.
pub fn pivot_columns(n: usize, d: usize) -> Vec<usize> {
    let h0 = d - n;
    let table = IndexTable::build(n, h0 - 1);
    (0..table.len()).map(|s| h0 * s + 1 + table.order(s)).collect()
}

#[derive(Clone, Debug)]
pub struct ConnectionData<E> {
    n: usize,
    d: usize,
    /// 0-based pivot rows of `N2`.
    pivots: Vec<usize>,
    system: ProlongedSystem<E>,
    n2: Matrix<E>,
    un2: Matrix<E>,
    dc: Vec<Matrix<E>>,
    a: Vec<Matrix<E>>,
}

/// Builds `N2`, `U·N2`, the covariant derivatives `DC(k)` of the basis sections and
/// the connection matrices `A(k)`.
pub fn build_connection<B: Backend>(w: &WebSpec, backend: &B) -> Result<ConnectionData<B::Scalar>> {
    let (n, d, h0) = (w.n(), w.d(), w.h0());
    let system = build_system(w, backend, h0)?;
    let pivots: Vec<usize> = pivot_columns(n, d).into_iter().map(|p| p - 1).collect();
    let n2 = system.m(h0 - 1).kernel_with_pivots(&pivots)?;
    let rhs = system.q(h0).mul(&n2)?.neg();
    let un2 = system.p(h0).solve_square(&rhs)?;
    let table = system.table().clone();
    let ro = pivots.len();
    let lower = dim_upto(n, h0 - 1);
    let dc = (0..n)
        .into_par_iter()
        .map(|k| -> Result<Matrix<B::Scalar>> {
            let dn2 = n2.entrywise_partial(k)?;
            let mut n3 = Matrix::zeros(n2.rows(), ro, n2.zero_element());
            for s in 0..lower {
                let up = table.ad(k, s)?;
                for v in 0..h0 {
                    let r = v + h0 * s;
                    for j in 0..ro {
                        let e = if table.order(s) + 2 <= h0 {
                            n2.get(v + h0 * up, j)
                        } else {
                            un2.get(v + h0 * (up - lower), j)
                        };
                        n3.set(r, j, e.clone());
                    }
                }
            }
            dn2.sub(&n3)
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<usize> = (0..ro).collect();
    let a = dc.iter().map(|m| m.select(&pivots, &all)).collect();
    Ok(ConnectionData { n, d, pivots, system, n2, un2, dc, a })
}

impl<E: DiffScalar> ConnectionData<E> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Rank of the bundle, the number of pivots.
    pub fn ro(&self) -> usize {
        self.pivots.len()
    }

    /// 1-based pivot columns.
    pub fn pivots(&self) -> Vec<usize> {
        self.pivots.iter().map(|p| p + 1).collect()
    }

    pub fn system(&self) -> &ProlongedSystem<E> {
        &self.system
    }

    pub fn n2(&self) -> &Matrix<E> {
        &self.n2
    }

    /// `U·N2` with `U = -P_{h0}^{-1} Q_{h0}`.
    pub fn un2(&self) -> &Matrix<E> {
        &self.un2
    }

    /// The full prolongation operator `U = -P_{h0}^{-1} Q_{h0}`.
    pub fn prolongation_operator(&self) -> Result<Matrix<E>> {
        let h0 = self.d - self.n;
        self.system.p(h0).solve_square(&self.system.q(h0).neg())
    }

    /// `DC(k) = ∂_k N2 - N3(k)`, `k` 0-based.
    pub fn dc(&self, k: usize) -> &Matrix<E> {
        &self.dc[k]
    }

    /// Connection matrix `A(k)`, `k` 0-based.
    pub fn a(&self, k: usize) -> &Matrix<E> {
        &self.a[k]
    }

    /// `Ko(k,m) = ∂_k A(m) - ∂_m A(k) + A(k)A(m) - A(m)A(k)`, 0-based `k`, `m`.
    pub fn curvature(&self, k: usize, m: usize) -> Result<Matrix<E>> {
        let (ak, am) = (&self.a[k], &self.a[m]);
        let da = am.entrywise_partial(k)?.sub(&ak.entrywise_partial(m)?)?;
        let br = ak.mul(am)?.sub(&am.mul(ak)?)?;
        da.add(&br)
    }

    /// All `Ko(k,m)` with `k < m`, in lexicographic order of `(k,m)`.
    pub fn curvatures(&self) -> Result<Vec<((usize, usize), Matrix<E>)>> {
        let pairs: Vec<(usize, usize)> = (0..self.n).flat_map(|k| (k + 1..self.n).map(move |m| (k, m))).collect();
        pairs.into_par_iter().map(|(k, m)| Ok(((k, m), self.curvature(k, m)?))).collect()
    }
}

/// Leading block comparison between a web and one of its subwebs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingVerdict {
    pub ro: usize,
    pub sub_ro: usize,
    /// `A'(k)` equals the leading `sub_ro × sub_ro` block of `A(k)` for every `k`.
    pub leading_block_matches: bool,
    /// The `(ro - sub_ro) × sub_ro` block below it vanishes for every `k`.
    pub lower_left_zero: bool,
}

impl NestingVerdict {
    pub fn holds(&self) -> bool {
        self.leading_block_matches && self.lower_left_zero
    }
}

pub fn compare_nesting<E: DiffScalar>(full: &ConnectionData<E>, sub: &ConnectionData<E>) -> Result<NestingVerdict> {
    let (ro, sro) = (full.ro(), sub.ro());
    if sro > ro || full.n != sub.n {
        return Err(Error::BadSubset("subweb connection is larger than the ambient one".into()));
    }
    let lead: Vec<usize> = (0..sro).collect();
    let rest: Vec<usize> = (sro..ro).collect();
    let mut matches = true;
    let mut lower = true;
    for k in 0..full.n {
        matches &= full.a(k).select(&lead, &lead) == *sub.a(k);
        lower &= full.a(k).select(&rest, &lead).is_zero();
    }
    Ok(NestingVerdict { ro, sub_ro: sro, leading_block_matches: matches, lower_left_zero: lower })
}

pub fn subweb_nesting_check<B: Backend>(w: &WebSpec, keep: &[usize], backend: &B) -> Result<NestingVerdict> {
    let sub = w.subweb(keep)?;
    let full = build_connection(w, backend)?;
    let part = build_connection(&sub, backend)?;
    compare_nesting(&full, &part)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivot_rule() {
        assert_eq!(pivot_columns(3, 6), vec![1, 5, 8, 11, 15, 18, 21, 24, 27, 30]);
        assert_eq!(pivot_columns(3, 4), vec![1]);
        assert_eq!(pivot_columns(3, 5), vec![1, 4, 6, 8]);
    }
}
