use proptest::prelude::*;

use weavecurv::connection::pivot_columns;
use weavecurv::multiindex::{binomial, dim_homog, dim_upto, rank_bound, rank_r, IndexTable, RowColMap};
use weavecurv::prolong::rank_bound_table;

/// Pascal's triangle, independent of the library's binomial.
fn pascal(n: usize, k: usize) -> i128 {
    let mut row = vec![1i128];
    for _ in 0..n {
        let mut next = vec![1i128; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0)
}

/// Number of monomials of degree `h` in `n` variables, by brute-force enumeration.
fn count_monomials(n: usize, h: usize) -> i128 {
    fn go(n: usize, h: usize) -> i128 {
        if n == 1 {
            return 1;
        }
        (0..=h).map(|e| go(n - 1, h - e)).sum()
    }
    if n == 0 {
        return i128::from(h == 0);
    }
    go(n, h)
}

fn c(n: usize, h: usize) -> i128 {
    pascal(n + h - 1, h)
}

fn bound_oracle(n: usize, h0: usize) -> i128 {
    (0..h0).map(|j| (h0 - j) as i128 * c(n - 1, j)).sum()
}

#[test]
fn dimension_counts_match_enumeration() {
    for n in 1..=6 {
        for h in 0..=8 {
            assert_eq!(dim_homog(n, h) as i128, count_monomials(n, h), "c({n},{h})");
            assert_eq!(dim_homog(n, h) as i128, c(n, h));
            assert_eq!(dim_upto(n, h) as i128, (0..=h).map(|j| count_monomials(n, j)).sum::<i128>());
        }
    }
    for n in 0..20 {
        for k in 0..=n {
            assert_eq!(binomial(n, k) as i128, pascal(n, k));
        }
    }
}

#[test]
fn counting_identities_over_the_full_range() {
    for n in 2..=6 {
        for h0 in 1..=6 {
            let d = n + h0;
            let h0i = h0 as i128;
            for h in 1..=8 {
                assert_eq!(
                    h0i * c(n, h) - (d as i128 - 1) * c(n, h - 1),
                    (h0i - h as i128) * c(n - 1, h),
                    "equation count, n={n} h0={h0} h={h}"
                );
            }
            let bound = bound_oracle(n, h0);
            assert_eq!(bound, h0i * c(n + 1, h0) - (d as i128 - 1) * c(n + 1, h0 - 1));
            assert_eq!(bound, h0i * pascal(d, h0) - (d as i128 - 1) * pascal(d - 1, h0 - 1), "closed form");
            assert_eq!(bound, c(n + 1, h0 - 1), "pivot count");
            assert_eq!(rank_bound(n, d) as i128, bound);
            assert_eq!(pivot_columns(n, d).len() as i128, bound);
        }
    }
}

#[test]
fn rank_bounds() {
    assert_eq!(rank_bound(3, 6), 10);
    assert_eq!(rank_bound(3, 5), 4);
    assert_eq!(rank_bound(3, 4), 1);
    assert_eq!(rank_bound(2, 5), 3 + 2 + 1);
    let t = rank_bound_table(3, 6).unwrap();
    assert_eq!((t.levels.clone(), t.bound), (vec![3, 7, 10], 10));
    assert_eq!(rank_r(3, 3, 1), 3);
    assert!(rank_bound_table(3, 3).is_err());
}

#[test]
fn pivots_for_the_six_web() {
    assert_eq!(pivot_columns(3, 6), vec![1, 5, 8, 11, 15, 18, 21, 24, 27, 30]);
    assert_eq!(pivot_columns(3, 4), vec![1]);
}

#[test]
fn table_order_for_three_variables() {
    let t = IndexTable::build(3, 3);
    assert_eq!(t.len(), 20);
    let grade2: Vec<Vec<u32>> = t.positions_of_order(2).map(|p| t.ll(p).clone()).collect();
    assert_eq!(grade2, vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0], vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 2]]);
    assert_eq!(t.ll(0), &vec![0, 0, 0]);
    for k in 0..3 {
        let mut e = vec![0; 3];
        e[k] = 1;
        assert_eq!(t.ll(k + 1), &e);
    }
    assert!(t.ad(0, t.positions_of_order(3).start).is_err());
}

proptest! {
    #[test]
    fn table_is_a_graded_bijection(n in 1usize..=5, h_max in 0usize..=5) {
        let t = IndexTable::build(n, h_max);
        prop_assert_eq!(t.len(), dim_upto(n, h_max));
        for p in 0..t.len() {
            let idx = t.ll(p);
            prop_assert_eq!(t.ill(idx), Some(p));
            prop_assert_eq!(t.order(p), idx.iter().sum::<u32>() as usize);
            if p > 0 {
                prop_assert!(t.order(p - 1) <= t.order(p));
            }
            for k in 0..n {
                if t.order(p) < h_max {
                    let up = t.ad(k, p).unwrap();
                    prop_assert_eq!(t.ll(up)[k], idx[k] + 1);
                    prop_assert_eq!(t.dec(k, up), Some(p));
                }
                prop_assert_eq!(t.dec(k, p).is_some(), idx[k] > 0);
            }
        }
        for h in 0..=h_max {
            prop_assert_eq!(t.count_upto(h), dim_upto(n, h));
            prop_assert_eq!(t.positions_of_order(h).len(), dim_homog(n, h));
        }
    }

    #[test]
    fn row_col_maps_round_trip(n in 2usize..=5, h0 in 1usize..=4, i in 1usize..500) {
        let m = RowColMap::new(n, n + h0);
        let (u, t) = m.row_decode(i);
        prop_assert!((1..n + h0).contains(&u));
        prop_assert_eq!(m.row_encode(u, t), i);
        let (v, s) = m.col_decode(i);
        prop_assert!((1..=h0).contains(&v));
        prop_assert_eq!(m.col_encode(v, s), i);
    }
}
