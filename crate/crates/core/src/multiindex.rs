//! Graded numbering of derivation multi-indices and the row/column maps of the
//! prolonged systems.
//!
//! Positions are 0-based: position 0 is the zero multi-index, positions `1..=n`
//! are the unit indices `1_k`, and every order occupies a consecutive block.
//! Within one order, indices follow the graded reverse lexicographic order, which for
//! `n = 3`, order 2 gives `x1^2, x1 x2, x2^2, x1 x3, x2 x3, x3^2`.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type MultiIndex = Vec<u32>;

/// `binomial(n, k)` as `usize`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Dimension of homogeneous polynomials of degree `h` in `n` variables:
/// `(n-1+h)! / ((n-1)! h!)`. Zero when `n == 0` (unless `h == 0`).
pub fn dim_homog(n: usize, h: usize) -> usize {
    if n == 0 {
        return usize::from(h == 0);
    }
    binomial(n - 1 + h, h)
}

/// Number of multi-indices of order at most `h` in `n` variables, i.e. `c(n+1, h)`.
pub fn dim_upto(n: usize, h: usize) -> usize {
    dim_homog(n + 1, h)
}

#[derive(Debug, Clone)]
pub struct IndexTable {
    n: usize,
    h_max: usize,
    ll: Vec<MultiIndex>,
    ill: HashMap<MultiIndex, usize>,
    ord: Vec<usize>,
    ad: Vec<Vec<Option<usize>>>,
    dec: Vec<Vec<Option<usize>>>,
}

fn push_compositions(n: usize, h: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() == n - 1 {
        let used: u32 = prefix.iter().sum();
        let mut idx = prefix.clone();
        idx.push(h - used);
        out.push(idx);
        return;
    }
    let used: u32 = prefix.iter().sum();
    for e in 0..=h - used {
        prefix.push(e);
        push_compositions(n, h, prefix, out);
        prefix.pop();
    }
}

/// Indices of order `h`, sorted by increasing exponent of `x_n`, then of `x_{n-1}`, ...
fn grade(n: usize, h: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    push_compositions(n, h, &mut Vec::with_capacity(n), &mut out);
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

impl IndexTable {
    pub fn build(n: usize, h_max: usize) -> Self {
        assert!(n >= 1, "need at least one coordinate");
        let mut ll = Vec::with_capacity(dim_upto(n, h_max));
        for h in 0..=h_max {
            ll.extend(grade(n, h as u32));
        }
        let ill: HashMap<MultiIndex, usize> = ll.iter().cloned().enumerate().map(|(t, m)| (m, t)).collect();
        let ord: Vec<usize> = ll.iter().map(|m| m.iter().sum::<u32>() as usize).collect();
        let mut ad = vec![vec![None; ll.len()]; n];
        let mut dec = vec![vec![None; ll.len()]; n];
        for (t, m) in ll.iter().enumerate() {
            for k in 0..n {
                let mut up = m.clone();
                up[k] += 1;
                ad[k][t] = ill.get(&up).copied();
                if m[k] > 0 {
                    let mut down = m.clone();
                    down[k] -= 1;
                    dec[k][t] = ill.get(&down).copied();
                }
            }
        }
        IndexTable { n, h_max, ll, ill, ord, ad, dec }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_max(&self) -> usize {
        self.h_max
    }

    pub fn len(&self) -> usize {
        self.ll.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ll.is_empty()
    }

    pub fn ll(&self, t: usize) -> &MultiIndex {
        &self.ll[t]
    }

    pub fn ill(&self, m: &[u32]) -> Option<usize> {
        self.ill.get(m).copied()
    }

    /// Order `h(t)` of the multi-index at position `t`.
    pub fn order(&self, t: usize) -> usize {
        self.ord[t]
    }

    /// Number of positions with order at most `h`.
    pub fn count_upto(&self, h: usize) -> usize {
        dim_upto(self.n, h)
    }

    /// Positions of order exactly `h`.
    pub fn positions_of_order(&self, h: usize) -> std::ops::Range<usize> {
        let start = if h == 0 { 0 } else { dim_upto(self.n, h - 1) };
        start..dim_upto(self.n, h)
    }

    /// Position of `LL(t) + 1_k` (`k` is 0-based).
    pub fn ad(&self, k: usize, t: usize) -> Result<usize> {
        self.ad[k][t].ok_or(Error::OrderOverflow)
    }

    /// Position of `LL(t) - 1_k`, when `LL(t)_k > 0`.
    pub fn dec(&self, k: usize, t: usize) -> Option<usize> {
        self.dec[k][t]
    }
}

/// Row/column numbering of the matrices `M_h`: row `i = u + (d-1) t`,
/// column `j = v + (d-n) s`, everything 1-based except the positions `t`, `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowColMap {
    pub n: usize,
    pub d: usize,
}

impl RowColMap {
    pub fn new(n: usize, d: usize) -> Self {
        assert!(d > n);
        RowColMap { n, d }
    }

    pub fn h0(&self) -> usize {
        self.d - self.n
    }

    pub fn row_encode(&self, u: usize, t: usize) -> usize {
        debug_assert!((1..self.d).contains(&u));
        u + (self.d - 1) * t
    }

    /// `(u, t)` with `1 <= u <= d-1`.
    pub fn row_decode(&self, i: usize) -> (usize, usize) {
        assert!(i >= 1);
        let t = (i + self.d - 2) / (self.d - 1) - 1;
        (i - (self.d - 1) * t, t)
    }

    pub fn col_encode(&self, v: usize, s: usize) -> usize {
        debug_assert!((1..=self.h0()).contains(&v));
        v + self.h0() * s
    }

    /// `(v, s)` with `1 <= v <= d-n`.
    pub fn col_decode(&self, j: usize) -> (usize, usize) {
        assert!(j >= 1);
        let h0 = self.h0();
        let s = (j + h0 - 1) / h0 - 1;
        (j - h0 * s, s)
    }
}

/// Rank of `R_h` for `h <= h0 - 1`: `sum_{j<h} (h0 - j) c(n-1, j)`.
pub fn rank_r(n: usize, h0: usize, h: usize) -> usize {
    (0..h.min(h0)).map(|j| (h0 - j) * dim_homog(n - 1, j)).sum()
}

/// Upper bound on the rank of the web: `sum_{j<h0} (h0 - j) c(n-1, j)`.
pub fn rank_bound(n: usize, d: usize) -> usize {
    rank_r(n, d - n, d - n)
}
