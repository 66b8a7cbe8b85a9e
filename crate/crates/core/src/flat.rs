//! Formal power-series abelian relations grown from their `(h0-1)`-jet.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::connection::pivot_columns;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multiindex::{dim_upto, IndexTable};
use crate::prolong::{build_system, check_abelian_relation, RelationCheck};
use crate::scalar::{Jet, JetBackend};
use crate::web::WebSpec;

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesTerm {
    /// 1-based index `v` of the unknown `Y_{n+v}`.
    pub v: usize,
    pub index: Vec<u32>,
    /// The derivative `(Y_{n+v})'_I` at the base point.
    pub derivative: String,
}

/// Truncated Taylor series of the principal unknowns at a point.
#[derive(Clone, Debug)]
pub struct FlatSectionSeries {
    pub point: Vec<Q>,
    pub order: usize,
    /// `derivatives[v-1][s]` is `(Y_{n+v})'_{LL(s)}` at the point.
    pub derivatives: Vec<Vec<Q>>,
    table: IndexTable,
}

impl FlatSectionSeries {
    pub fn table(&self) -> &IndexTable {
        &self.table
    }

    /// Taylor coefficients (derivative divided by `I!`), as jets over the rationals.
    pub fn jets(&self, backend: &JetBackend<Q>) -> Vec<Jet<Q>> {
        let space = backend.space();
        let len = space.len_upto(self.order);
        self.derivatives
            .iter()
            .map(|ders| {
                let coeffs = (0..len)
                    .map(|p| {
                        let idx = space.table().ll(p);
                        let pos = self.table.ill(idx).expect("same dimension");
                        let fact: BigInt = idx.iter().map(|&e| (1..=e as u64).map(BigInt::from).product::<BigInt>()).product();
                        ders[pos].clone() / Q::from_integer(fact)
                    })
                    .collect();
                Jet::from_coeffs(space, self.order, coeffs)
            })
            .collect()
    }

    pub fn terms(&self) -> Vec<SeriesTerm> {
        let mut out = Vec::new();
        for (v, ders) in self.derivatives.iter().enumerate() {
            for (s, value) in ders.iter().enumerate() {
                out.push(SeriesTerm { v: v + 1, index: self.table.ll(s).clone(), derivative: value.to_string() });
            }
        }
        out
    }

    /// Substitutes the series into the full system; valid to order `order - 1`.
    pub fn check(&self, w: &WebSpec) -> Result<RelationCheck> {
        let backend = JetBackend::<Q>::new(w.ctx(), &self.point, self.order)?;
        check_abelian_relation(w, &backend, &self.jets(&backend))
    }
}

fn point_values(m: &Matrix<Jet<Q>>) -> Matrix<Jet<Q>> {
    m.map(&m.zero_element().truncate(0), |e| e.truncate(0))
}

/// Solves the prolonged systems at `point` order by order, starting from the pivot
/// coordinates `initial` of a section of `R_{h0-1}`.
pub fn formal_flat_section(w: &WebSpec, point: &[Q], initial: &[Q], order: usize) -> Result<FlatSectionSeries> {
    let (n, d, h0) = (w.n(), w.d(), w.h0());
    let pivots: Vec<usize> = pivot_columns(n, d).into_iter().map(|p| p - 1).collect();
    if initial.len() != pivots.len() {
        return Err(Error::InvalidInput(format!("expected {} initial values, got {}", pivots.len(), initial.len())));
    }
    let level = order.max(h0);
    let backend = JetBackend::<Q>::new(w.ctx(), point, level)?;
    let sys = build_system(w, &backend, level)?;
    let zero = sys.zero().truncate(0);
    let init = Matrix::from_fn(initial.len(), 1, &zero, |i, _| Jet::constant(backend.space(), 0, initial[i].clone()));
    let n2 = point_values(&sys.m(h0 - 1)).kernel_with_pivots(&pivots)?;
    let mut z: Vec<Q> = n2.mul(&init)?.entries().iter().map(|e| e.value().clone()).collect();
    for h in h0..=order {
        let known = Matrix::from_fn(z.len(), 1, &zero, |i, _| Jet::constant(backend.space(), 0, z[i].clone()));
        let rhs = point_values(&sys.q(h)).mul(&known)?.neg();
        match point_values(&sys.p(h)).solve_overdetermined(&rhs)? {
            Ok(x) => z.extend(x.entries().iter().map(|e| e.value().clone())),
            Err(row) => {
                let start = (d - 1) * dim_upto(n, h - 1) - (d - 1) * crate::multiindex::dim_homog(n, h - 1);
                let eq = &sys.equations()[start + row];
                return Err(Error::InconsistentProlongation {
                    label: format!("(III_{})' at {:?}", eq.u, sys.table().ll(eq.t)),
                });
            }
        }
    }
    let keep = h0 * dim_upto(n, order);
    z.truncate(keep);
    let table = IndexTable::build(n, order);
    let mut derivatives = vec![vec![Q::zero(); table.len()]; h0];
    for (j, value) in z.into_iter().enumerate() {
        derivatives[j % h0][j / h0] = value;
    }
    Ok(FlatSectionSeries { point: point.to_vec(), order, derivatives, table })
}

/// The `j`-th unit vector of length `len` (0-based `j`).
pub fn unit_initial(len: usize, j: usize) -> Vec<Q> {
    (0..len).map(|i| if i == j { Q::one() } else { Q::zero() }).collect()
}
