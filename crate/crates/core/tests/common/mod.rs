#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use weavecurv::expr::parse_rational;
use weavecurv::scalar::VariableContext;
use weavecurv::RationalFunction;

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ctx3() -> Arc<VariableContext> {
    VariableContext::standard(3, &[]).unwrap()
}

pub fn rf(ctx: &Arc<VariableContext>, text: &str) -> RationalFunction {
    parse_rational(text, ctx).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// A polynomial in `x1..x{nvars}` of degree at most 2 per variable, as source text.
pub fn poly_text(nvars: usize) -> impl Strategy<Value = String> {
    prop::collection::vec((-4i64..=4, prop::collection::vec(0u32..=2, nvars)), 1..4).prop_map(|terms| {
        let parts: Vec<String> = terms
            .iter()
            .map(|(c, exps)| {
                let mut s = format!("({c})");
                for (i, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        s.push_str(&format!("*x{}^{e}", i + 1));
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    })
}

/// Random rational function text in three coordinates. The denominator is a square
/// plus a positive constant, so it has no rational zeros.
pub fn ratfunc_text() -> impl Strategy<Value = String> {
    (poly_text(3), poly_text(3), 1i64..=5).prop_map(|(p, d, c)| format!("({p})/(({d})^2 + {c})"))
}

/// A rational point in three coordinates with small heights.
pub fn point3() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-9i64..=9, 1i64..=7), 3).prop_map(|v| v.into_iter().map(|(a, b)| q(a, b)).collect())
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k as u64).map(BigInt::from).product()
}
