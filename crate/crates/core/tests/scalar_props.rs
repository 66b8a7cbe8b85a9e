mod common;

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use common::*;
use weavecurv::expr::{parse, Expr};
use weavecurv::scalar::{Backend, Field, Jet, JetBackend, VariableContext};
use weavecurv::{DiffScalar, Error, Fp61, ModJet, RationalFunction, RationalJet};

fn lift<C: Field>(ctx: &Arc<VariableContext>, f: &RationalFunction, point: &[BigRational], order: usize) -> Jet<C> {
    JetBackend::<C>::new(ctx, point, order).unwrap().lift(f).unwrap()
}

/// Forward-mode value and `x_k` derivative of a parsed expression, without
/// touching the rational-function machinery.
fn dual(e: &Expr, point: &[BigRational], k: usize) -> (BigRational, BigRational) {
    match e {
        Expr::Int(v) => (BigRational::from_integer(v.clone()), BigRational::zero()),
        Expr::Var(i, _) => (point[*i].clone(), if *i == k { BigRational::one() } else { BigRational::zero() }),
        Expr::Neg(a) => {
            let (v, d) = dual(a, point, k);
            (-v, -d)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let ((va, da), (vb, db)) = (dual(a, point, k), dual(b, point, k));
            if matches!(e, Expr::Add(..)) {
                (va + vb, da + db)
            } else {
                (va - vb, da - db)
            }
        }
        Expr::Mul(a, b) => {
            let ((va, da), (vb, db)) = (dual(a, point, k), dual(b, point, k));
            (&va * &vb, da * &vb + va * db)
        }
        Expr::Div(a, b) => {
            let ((va, da), (vb, db)) = (dual(a, point, k), dual(b, point, k));
            (&va / &vb, (da * &vb - &va * db) / (&vb * &vb))
        }
        Expr::Pow(a, m) => {
            let (v, d) = dual(a, point, k);
            if *m == 0 {
                return (BigRational::one(), BigRational::zero());
            }
            let lower = (0..m - 1).fold(BigRational::one(), |acc, _| acc * &v);
            (&lower * &v, qi(*m as i64) * lower * d)
        }
    }
}

#[test]
fn cancellation_and_identity() {
    let ctx = VariableContext::standard(3, &["c"]).unwrap();
    let a = rf(&ctx, "x1/x3");
    let x3 = rf(&ctx, "x3");
    assert_eq!(a.mul(&x3).unwrap(), rf(&ctx, "x1"));
    let b = rf(&ctx, "(x1+c)/(x3+c)");
    assert!(b.sub(&b).unwrap().is_zero());
    assert!(rf(&ctx, "(x1^2-x1*x1)/x2").is_zero());
    assert!(!rf(&ctx, "x1/x3").is_zero());
}

#[test]
fn quotient_rule_examples() {
    let ctx = VariableContext::standard(3, &["c"]).unwrap();
    assert_eq!(rf(&ctx, "(x1+c)/(x3+c)").partial(0).unwrap(), rf(&ctx, "1/(x3+c)"));
    assert!(rf(&ctx, "x1*x2").partial(2).unwrap().is_zero());
    assert!(matches!(rf(&ctx, "c").partial(3), Err(Error::InvalidInput(_))));
}

#[test]
fn derivative_matches_forward_mode_oracle() {
    let ctx = ctx3();
    let text = "x1*(x1-1)/(x3*(x3-1))";
    let point = [qi(2), qi(3), qi(5)];
    let (_, oracle) = dual(&parse(text, &ctx).unwrap(), &point, 2);
    assert_eq!(rf(&ctx, text).partial(2).unwrap().eval(&point).unwrap(), oracle);
    assert_eq!(oracle, q(-9, 200));
}

#[test]
fn geometric_series_jet() {
    let ctx = VariableContext::standard(2, &[]).unwrap();
    let j: RationalJet = lift(&ctx, &rf(&ctx, "1/(1+x1)"), &[qi(0), qi(0)], 2);
    let coeffs: Vec<BigRational> = (0..=2u32).map(|e| j.coeff(&[e, 0])).collect();
    assert_eq!(coeffs, vec![qi(1), qi(-1), qi(1)]);
}

#[test]
fn small_lifts() {
    let ctx = ctx3();
    let point = [qi(1), qi(2), qi(3)];
    let j: RationalJet = lift(&ctx, &rf(&ctx, "x1*x2"), &point, 2);
    assert_eq!(j.coeff(&[0, 0, 0]), qi(2));
    assert_eq!(j.coeff(&[1, 0, 0]), qi(2));
    assert_eq!(j.coeff(&[0, 1, 0]), qi(1));
    assert_eq!(j.coeff(&[1, 1, 0]), qi(1));
    assert_eq!(j.coeff(&[2, 0, 0]), qi(0));
    let seven: RationalJet = lift(&ctx, &rf(&ctx, "7"), &point, 3);
    assert_eq!(seven.coeffs()[0], qi(7));
    assert!(seven.coeffs()[1..].iter().all(|c| c.is_zero()));
}

#[test]
fn quotient_jet_matches_closed_form() {
    // x1/x3 at (2,3,5): (2+a)/(5+b) = (2+a) * sum_k (-b)^k / 5^(k+1)
    let ctx = ctx3();
    let j: RationalJet = lift(&ctx, &rf(&ctx, "x1/x3"), &[qi(2), qi(3), qi(5)], 4);
    let table = j.space().table().clone();
    for t in 0..j.space().len_upto(4) {
        let idx = table.ll(t).clone();
        let expected = match (idx[0], idx[1]) {
            (i @ 0..=1, 0) => {
                let k = idx[2] as i64;
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let scale = if i == 0 { 2 } else { 1 };
                q(sign * scale, 5i64.pow(k as u32 + 1))
            }
            _ => qi(0),
        };
        assert_eq!(j.coeff(&idx), expected, "coefficient at {idx:?}");
    }
}

#[test]
fn jet_order_exhausted() {
    let ctx = ctx3();
    let j: ModJet = lift(&ctx, &rf(&ctx, "x1"), &[qi(1), qi(1), qi(1)], 0);
    assert!(matches!(j.partial(0), Err(Error::JetOrderExhausted)));
    let zero: ModJet = lift(&ctx, &rf(&ctx, "x1-1"), &[qi(1), qi(1), qi(1)], 2);
    assert!(matches!(zero.div(&zero), Err(Error::DivisionByZero)));
}

#[test]
fn singular_lift_is_reported() {
    let ctx = ctx3();
    let backend = JetBackend::<Fp61>::new(&ctx, &[qi(1), qi(1), qi(0)], 2).unwrap();
    assert!(matches!(backend.lift(&rf(&ctx, "x1/x3")), Err(Error::SingularPoint)));
}

fn field_axioms<E: DiffScalar>(a: &E, b: &E, c: &E) {
    let lhs = a.add(b).unwrap().add(c).unwrap();
    let rhs = a.add(&b.add(c).unwrap()).unwrap();
    assert!(lhs.sub(&rhs).unwrap().is_zero());
    let lhs = a.mul(&b.add(c).unwrap()).unwrap();
    let rhs = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
    assert!(lhs.sub(&rhs).unwrap().is_zero());
    if a.is_unit() {
        let one = a.mul(&a.one_like().div(a).unwrap()).unwrap();
        assert!(one.sub(&a.one_like()).unwrap().is_zero());
    }
}

fn leibniz<E: DiffScalar>(a: &E, b: &E, k: usize) {
    let lhs = a.mul(b).unwrap().partial(k).unwrap();
    let rhs = a.partial(k).unwrap().mul(b).unwrap().add(&a.mul(&b.partial(k).unwrap()).unwrap()).unwrap();
    assert!(lhs.sub(&rhs).unwrap().is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symbolic_field_axioms(a in ratfunc_text(), b in ratfunc_text(), c in ratfunc_text()) {
        let ctx = ctx3();
        field_axioms(&rf(&ctx, &a), &rf(&ctx, &b), &rf(&ctx, &c));
    }

    #[test]
    fn jet_field_axioms(a in ratfunc_text(), b in ratfunc_text(), c in ratfunc_text(), p in point3()) {
        let ctx = ctx3();
        let mb = JetBackend::<Fp61>::new(&ctx, &p, 3).unwrap();
        let l = |t: &str| mb.lift(&rf(&ctx, t)).unwrap();
        field_axioms(&l(&a), &l(&b), &l(&c));
        let rb = JetBackend::<BigRational>::new(&ctx, &p, 3).unwrap();
        let r = |t: &str| rb.lift(&rf(&ctx, t)).unwrap();
        field_axioms(&r(&a), &r(&b), &r(&c));
    }

    #[test]
    fn symbolic_leibniz(a in ratfunc_text(), b in ratfunc_text(), k in 0usize..3) {
        let ctx = ctx3();
        leibniz(&rf(&ctx, &a), &rf(&ctx, &b), k);
    }

    #[test]
    fn jet_leibniz(a in ratfunc_text(), b in ratfunc_text(), k in 0usize..3, p in point3()) {
        let ctx = ctx3();
        let mb = JetBackend::<Fp61>::new(&ctx, &p, 3).unwrap();
        let l = |t: &str| mb.lift(&rf(&ctx, t)).unwrap();
        leibniz(&l(&a), &l(&b), k);
    }

    #[test]
    fn mixed_partials_commute(a in ratfunc_text(), k in 0usize..3, m in 0usize..3) {
        let f = rf(&ctx3(), &a);
        let km = f.partial(m).unwrap().partial(k).unwrap();
        let mk = f.partial(k).unwrap().partial(m).unwrap();
        prop_assert_eq!(km, mk);
    }

    #[test]
    fn lift_commutes_with_partial(a in ratfunc_text(), k in 0usize..3, order in 1usize..=4, p in point3()) {
        let ctx = ctx3();
        let f = rf(&ctx, &a);
        let lower: RationalJet = lift(&ctx, &f.partial(k).unwrap(), &p, order - 1);
        let upper: RationalJet = lift(&ctx, &f, &p, order);
        let dj = upper.partial(k).unwrap();
        prop_assert_eq!(dj.order(), order - 1);
        let table = lower.space().table().clone();
        for t in 0..lower.space().len_upto(order - 1) {
            prop_assert_eq!(lower.coeff(table.ll(t)), dj.coeff(table.ll(t)));
        }
    }

    #[test]
    fn prime_field_jets_see_symbolic_zeros(a in ratfunc_text(), b in ratfunc_text(), p in point3()) {
        // (a+b)^2 - a^2 - 2ab - b^2 and (a*b)/b - a, evaluated in jet arithmetic.
        let ctx = ctx3();
        let (fa, fb) = (rf(&ctx, &a), rf(&ctx, &b));
        let mb = JetBackend::<Fp61>::new(&ctx, &p, 3).unwrap();
        let (ja, jb) = (mb.lift(&fa).unwrap(), mb.lift(&fb).unwrap());
        let s = ja.add(&jb).unwrap();
        let two = ja.one_like().add(&ja.one_like()).unwrap();
        let expanded = s.mul(&s).unwrap()
            .sub(&ja.mul(&ja).unwrap()).unwrap()
            .sub(&two.mul(&ja).unwrap().mul(&jb).unwrap()).unwrap()
            .sub(&jb.mul(&jb).unwrap()).unwrap();
        prop_assert!(expanded.is_zero());
        if jb.is_unit() {
            prop_assert!(ja.mul(&jb).unwrap().div(&jb).unwrap().sub(&ja).unwrap().is_zero());
        }
        // A symbolically zero combination lifts to the zero jet.
        let z = fa.mul(&fb).unwrap().sub(&fb.mul(&fa).unwrap()).unwrap();
        prop_assert!(z.is_zero());
        let jz: ModJet = lift(&ctx, &z, &p, 3);
        prop_assert!(jz.is_zero());
    }

    #[test]
    fn lift_is_a_ring_map(a in ratfunc_text(), b in ratfunc_text(), p in point3()) {
        let ctx = ctx3();
        let (fa, fb) = (rf(&ctx, &a), rf(&ctx, &b));
        let backend = JetBackend::<Fp61>::new(&ctx, &p, 3).unwrap();
        let l = |f: &RationalFunction| backend.lift(f).unwrap();
        prop_assert_eq!(l(&fa.mul(&fb).unwrap()), l(&fa).mul(&l(&fb)).unwrap());
        prop_assert_eq!(l(&fa.sub(&fb).unwrap()), l(&fa).sub(&l(&fb)).unwrap());
    }
}
