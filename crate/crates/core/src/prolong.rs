//! The first-order system satisfied by abelian relations in coordinate gauge and its
//! prolongations.
//!
//! Unknowns are the derivatives `(Y_{n+v})'_K` of the principal unknowns, labelled by
//! `(v, s)` with `v` in `1..=d-n` and `s` the position of `K`. Equations are labelled
//! by `(u, t)`: equation `u` (in `1..d`) differentiated along `LL(t)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multiindex::{dim_homog, dim_upto, IndexTable};
use crate::scalar::{Backend, DiffScalar, RationalFunction};
use crate::web::WebSpec;

/// A linear form in the unknowns `(Y_{n+v})'_{LL(s)}`, keyed by `(v, s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEq<E> {
    pub u: usize,
    pub t: usize,
    pub coeffs: BTreeMap<(usize, usize), E>,
}

impl<E: DiffScalar> LinearEq<E> {
    pub fn coeff(&self, v: usize, s: usize) -> Option<&E> {
        self.coeffs.get(&(v, s))
    }

    fn accumulate(map: &mut BTreeMap<(usize, usize), E>, key: (usize, usize), c: E) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        match map.remove(&key) {
            None => {
                map.insert(key, c);
            }
            Some(old) => {
                let s = old.add(&c)?;
                if !s.is_zero() {
                    map.insert(key, s);
                }
            }
        }
        Ok(())
    }

    /// Derivative along coordinate `k` (0-based), by the Leibniz rule on the linear form.
    pub fn differentiate(&self, k: usize, table: &IndexTable) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (&(v, s), c) in &self.coeffs {
            LinearEq::accumulate(&mut out, (v, table.ad(k, s)?), c.clone())?;
            LinearEq::accumulate(&mut out, (v, s), c.partial(k)?)?;
        }
        Ok(LinearEq { u: self.u, t: table.ad(k, self.t)?, coeffs: out })
    }

    /// Componentwise difference, used to compare linear forms.
    pub fn sub(&self, o: &Self) -> Result<BTreeMap<(usize, usize), E>> {
        let mut out = BTreeMap::new();
        for (&key, c) in &self.coeffs {
            LinearEq::accumulate(&mut out, key, c.clone())?;
        }
        for (&key, c) in &o.coeffs {
            LinearEq::accumulate(&mut out, key, c.neg())?;
        }
        Ok(out)
    }
}

/// The first-order equations at `t = 0`. With `include_last`, the equation for
/// `λ = d`, normally omitted because it depends on the others, is appended.
pub fn base_equations<B: Backend>(w: &WebSpec, backend: &B, include_last: bool) -> Result<Vec<LinearEq<B::Scalar>>> {
    let (n, d) = (w.n(), w.d());
    let mut f = vec![vec![None; d]; n];
    let mut df = vec![vec![None; d]; n];
    for i in 0..n {
        for a in n..d {
            f[i][a] = Some(backend.lift(w.f(i, a))?);
            df[i][a] = Some(backend.lift(&w.f(i, a).partial(i)?)?);
        }
    }
    let get = |m: &Vec<Vec<Option<B::Scalar>>>, i: usize, a: usize| m[i][a].clone().expect("lifted");
    let mut eqs = Vec::with_capacity(d);
    for i in 0..n {
        let mut coeffs = BTreeMap::new();
        for a in n..d {
            let v = a - n + 1;
            LinearEq::accumulate(&mut coeffs, (v, i + 1), get(&f, i, a))?;
            LinearEq::accumulate(&mut coeffs, (v, 0), get(&df, i, a))?;
        }
        eqs.push(LinearEq { u: i + 1, t: 0, coeffs });
    }
    let last = if include_last { d } else { d - 1 };
    for a in n..last {
        let v = a - n + 1;
        let mut coeffs = BTreeMap::new();
        for i in 0..n {
            LinearEq::accumulate(&mut coeffs, (v, i + 1), get(&f, i, a))?;
            LinearEq::accumulate(&mut coeffs, (v, 0), get(&df, i, a))?;
        }
        eqs.push(LinearEq { u: a + 1, t: 0, coeffs });
    }
    Ok(eqs)
}

/// All equations `(u, t)` with `h(t) <= level - 1`, and the matrices they define.
#[derive(Clone, Debug)]
pub struct ProlongedSystem<E> {
    n: usize,
    d: usize,
    level: usize,
    table: Arc<IndexTable>,
    /// Indexed by 0-based row `(u - 1) + (d - 1) t`.
    eqs: Vec<LinearEq<E>>,
    zero: E,
}

/// Builds the system of level `h >= 1`. Each equation `(u, t)` with `t != 0` is the
/// derivative of `(u, dec_k(t))` along the smallest `k` with `LL(t)_k > 0`.
pub fn build_system<B: Backend>(w: &WebSpec, backend: &B, level: usize) -> Result<ProlongedSystem<B::Scalar>> {
    if level == 0 {
        return Err(Error::InvalidInput("system level must be at least 1".into()));
    }
    let (n, d) = (w.n(), w.d());
    let table = Arc::new(IndexTable::build(n, level));
    let zero = backend.lift(&RationalFunction::zero(w.ctx()))?;
    let mut eqs = base_equations(w, backend, false)?;
    for h in 1..level {
        let block: Vec<LinearEq<B::Scalar>> = table
            .positions_of_order(h)
            .collect::<Vec<_>>()
            .par_iter()
            .flat_map_iter(|&t| {
                let k = (0..n).find(|&k| table.ll(t)[k] > 0).expect("order >= 1");
                let parent = table.dec(k, t).expect("positive entry");
                let table = &table;
                let eqs = &eqs;
                (0..d - 1).map(move |u| eqs[u + (d - 1) * parent].differentiate(k, table))
            })
            .collect::<Result<_>>()?;
        eqs.extend(block);
    }
    Ok(ProlongedSystem { n, d, level, table, eqs, zero })
}

impl<E: DiffScalar> ProlongedSystem<E> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn h0(&self) -> usize {
        self.d - self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn table(&self) -> &Arc<IndexTable> {
        &self.table
    }

    pub fn equations(&self) -> &[LinearEq<E>] {
        &self.eqs
    }

    pub fn zero(&self) -> &E {
        &self.zero
    }

    /// Equation `(u, t)`, `u` 1-based.
    pub fn equation(&self, u: usize, t: usize) -> &LinearEq<E> {
        &self.eqs[(u - 1) + (self.d - 1) * t]
    }

    fn column(&self, v: usize, s: usize) -> usize {
        (v - 1) + self.h0() * s
    }

    fn matrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix<E> {
        let mut m = Matrix::zeros(rows.len(), cols.len(), &self.zero);
        for (r, eq) in self.eqs[rows].iter().enumerate() {
            for (&(v, s), c) in &eq.coeffs {
                let j = self.column(v, s);
                if cols.contains(&j) {
                    m.set(r, j - cols.start, c.clone());
                }
            }
        }
        m
    }

    fn rows_upto(&self, h: usize) -> usize {
        (self.d - 1) * dim_upto(self.n, h)
    }

    fn cols_upto(&self, h: usize) -> usize {
        self.h0() * dim_upto(self.n, h)
    }

    /// `M_h` for `h <= level`: rows of order `<= h-1`, columns of order `<= h`.
    /// `M_0` has no rows and the `d-n` columns of `Y` itself.
    pub fn m(&self, h: usize) -> Matrix<E> {
        assert!(h <= self.level);
        let rows = if h == 0 { 0 } else { self.rows_upto(h - 1) };
        self.matrix(0..rows, 0..self.cols_upto(h))
    }

    /// Principal part `P_h`: rows of order `h-1` against columns of order `h`.
    pub fn p(&self, h: usize) -> Matrix<E> {
        assert!((1..=self.level).contains(&h));
        let rows = self.rows_upto(h - 1) - (self.d - 1) * dim_homog(self.n, h - 1)..self.rows_upto(h - 1);
        self.matrix(rows, self.cols_upto(h - 1)..self.cols_upto(h))
    }

    /// `Q_h`: rows of order `h-1` against columns of order `<= h-1`.
    pub fn q(&self, h: usize) -> Matrix<E> {
        assert!((1..=self.level).contains(&h));
        let rows = self.rows_upto(h - 1) - (self.d - 1) * dim_homog(self.n, h - 1)..self.rows_upto(h - 1);
        self.matrix(rows, 0..self.cols_upto(h - 1))
    }
}

/// Checks `rank P_h = min(rows, cols)`; returns the rank.
pub fn rank_certify<B: Backend>(w: &WebSpec, backend: &B, h: usize) -> Result<usize> {
    let sys = build_system(w, backend, h)?;
    let p = sys.p(h);
    let expected = p.rows().min(p.cols());
    let found = p.rank();
    if found != expected {
        return Err(Error::RankDeficient { expected, found });
    }
    Ok(found)
}

/// Ranks of `R_h` for `h = 0..h0-1` (entry `h` is the rank of `R_h`) and the total bound.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RankBoundTable {
    pub n: usize,
    pub d: usize,
    pub h0: usize,
    pub levels: Vec<usize>,
    pub bound: usize,
}

pub fn rank_bound_table(n: usize, d: usize) -> Result<RankBoundTable> {
    if n < 2 || d <= n {
        return Err(Error::InvalidInput(format!("need d > n >= 2, got n = {n}, d = {d}")));
    }
    let h0 = d - n;
    let levels = (0..h0).map(|h| crate::multiindex::rank_r(n, h0, h + 1)).collect();
    Ok(RankBoundTable { n, d, h0, levels, bound: crate::multiindex::rank_bound(n, d) })
}

/// Outcome of substituting candidate principal unknowns into the full system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    /// 1-based `λ` of the equations that fail.
    pub violated: Vec<usize>,
}

impl RelationCheck {
    pub fn valid(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Rebuilds the coefficients `X_{i,λ}` from `Y` (`X_{i,a} = f_{i,a} Y_a`,
/// `X_{i,i} = -Σ_a X_{i,a}`, zero otherwise), as a table `x[i][λ]`.
pub fn full_coefficients<B: Backend>(w: &WebSpec, backend: &B, y: &[B::Scalar]) -> Result<Vec<Vec<B::Scalar>>> {
    let (n, d) = (w.n(), w.d());
    if y.len() != d - n {
        return Err(Error::InvalidInput(format!("expected {} unknowns, got {}", d - n, y.len())));
    }
    let zero = y[0].zero_like();
    let mut x = vec![vec![zero; d]; n];
    for i in 0..n {
        let mut diag = y[0].zero_like();
        for a in n..d {
            let v = backend.lift(w.f(i, a))?.mul(&y[a - n])?;
            diag = diag.sub(&v)?;
            x[i][a] = v;
        }
        x[i][i] = diag;
    }
    Ok(x)
}

/// Verifies the `d` equations `Σ_i ∂_i X_{i,λ} = 0`. For jets the verdict is about the
/// truncated series, one order below the inputs.
pub fn check_abelian_relation<B: Backend>(w: &WebSpec, backend: &B, y: &[B::Scalar]) -> Result<RelationCheck> {
    let x = full_coefficients(w, backend, y)?;
    let mut violated = Vec::new();
    for l in 0..w.d() {
        let mut acc: Option<B::Scalar> = None;
        for (i, row) in x.iter().enumerate() {
            let t = row[l].partial(i)?;
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        if !acc.expect("n >= 2").is_zero() {
            violated.push(l + 1);
        }
    }
    Ok(RelationCheck { violated })
}
