//! Multivariate polynomial gcd over the integers.
//!
//! Images are computed modulo 62-bit primes by recursive evaluation and Newton
//! interpolation (Brown's dense modular algorithm), combined by Chinese
//! remaindering, and accepted only after exact trial division over Z. A wrong
//! answer is therefore impossible; unlucky primes or points only cost time.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{is_prime_u64, symmetric_mod};
use super::monomial::Monomial;
use super::poly::IntPoly;

type ModPoly = Vec<(Monomial, u64)>;
type Dense = Vec<u64>;

#[derive(Clone, Copy)]
struct Zp(u64);

impl Zp {
    fn add(self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.0 as u128) as u64
    }
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.0 - (b - a)
        }
    }
    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }
    fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }
    fn pow(self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }
    fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.0 - 2)
    }

    // ---- dense univariate ----

    fn trim(self, mut a: Dense) -> Dense {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn ueval(self, a: &Dense, x: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    fn umonic(self, a: Dense) -> Dense {
        match a.last() {
            None => a,
            Some(&lc) => {
                let inv = self.inv(lc);
                a.into_iter().map(|c| self.mul(c, inv)).collect()
            }
        }
    }

    /// Quotient and remainder.
    fn udivrem(self, a: &Dense, b: &Dense) -> (Dense, Dense) {
        let mut r = a.clone();
        if b.is_empty() || r.len() < b.len() {
            return (Vec::new(), r);
        }
        let inv = self.inv(*b.last().unwrap());
        let mut q = vec![0; r.len() - b.len() + 1];
        for i in (0..q.len()).rev() {
            let c = self.mul(r[i + b.len() - 1], inv);
            q[i] = c;
            if c != 0 {
                for (j, &bc) in b.iter().enumerate() {
                    r[i + j] = self.sub(r[i + j], self.mul(c, bc));
                }
            }
        }
        r.truncate(b.len() - 1);
        (q, self.trim(r))
    }

    fn ugcd(self, a: &Dense, b: &Dense) -> Dense {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_empty() {
            let (_, r) = self.udivrem(&x, &y);
            x = y;
            y = r;
        }
        self.umonic(x)
    }

    fn umul(self, a: &Dense, b: &Dense) -> Dense {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        self.trim(out)
    }

    // ---- sparse multivariate ----

    fn normalize(self, mut v: Vec<(Monomial, u64)>) -> ModPoly {
        v.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: ModPoly = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = self.add(last.1, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        out
    }

    fn mp_sub(self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        let mut v = a.clone();
        v.extend(b.iter().map(|&(m, c)| (m, self.neg(c))));
        self.normalize(v)
    }

    fn mp_add(self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        let mut v = a.clone();
        v.extend_from_slice(b);
        self.normalize(v)
    }

    fn mp_scale(self, a: &ModPoly, c: u64) -> ModPoly {
        if c == 0 {
            return Vec::new();
        }
        a.iter().map(|&(m, x)| (m, self.mul(x, c))).collect()
    }

    fn mp_monic(self, a: ModPoly) -> ModPoly {
        match a.first() {
            None => a,
            Some(&(_, lc)) => {
                let inv = self.inv(lc);
                self.mp_scale(&a, inv)
            }
        }
    }

    fn mp_mul(self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        let mut v = Vec::with_capacity(a.len() * b.len());
        for &(ma, ca) in a {
            for &(mb, cb) in b {
                v.push((ma.mul(mb), self.mul(ca, cb)));
            }
        }
        self.normalize(v)
    }

    /// Multiplies by a univariate polynomial in variable `x`.
    fn mp_mul_uni(self, a: &ModPoly, u: &Dense, x: usize) -> ModPoly {
        let mut v = Vec::with_capacity(a.len() * u.len());
        for &(m, c) in a {
            for (e, &uc) in u.iter().enumerate() {
                if uc != 0 {
                    let nm = m.with_exponent(x, m.exponent(x) + e as u32);
                    v.push((nm, self.mul(c, uc)));
                }
            }
        }
        self.normalize(v)
    }

    fn mp_eval(self, a: &ModPoly, x: usize, alpha: u64) -> ModPoly {
        let v = a
            .iter()
            .map(|&(m, c)| {
                let e = m.exponent(x) as u64;
                (m.with_exponent(x, 0), self.mul(c, self.pow(alpha, e)))
            })
            .collect();
        self.normalize(v)
    }

    fn mp_div_exact(self, a: &ModPoly, d: &ModPoly) -> Option<ModPoly> {
        let (lm, lc) = *d.first()?;
        let inv = self.inv(lc);
        let mut rem: BTreeMap<Monomial, u64> = a.iter().cloned().collect();
        let mut q = Vec::new();
        while let Some((&m, &c)) = rem.iter().next_back() {
            if !lm.divides(m) {
                return None;
            }
            let qc = self.mul(c, inv);
            let qm = m.div(lm);
            for &(dm, dc) in d {
                let key = qm.mul(dm);
                let delta = self.mul(qc, dc);
                let slot = rem.entry(key).or_insert(0);
                *slot = self.sub(*slot, delta);
                if *slot == 0 {
                    rem.remove(&key);
                }
            }
            q.push((qm, qc));
        }
        Some(q)
    }

    /// Coefficients in Z_p[x] grouped by the monomial in the remaining variables.
    fn groups(self, a: &ModPoly, x: usize) -> BTreeMap<Monomial, Dense> {
        let mut g: BTreeMap<Monomial, Dense> = BTreeMap::new();
        for &(m, c) in a {
            let e = m.exponent(x) as usize;
            let slot = g.entry(m.with_exponent(x, 0)).or_default();
            if slot.len() <= e {
                slot.resize(e + 1, 0);
            }
            slot[e] = self.add(slot[e], c);
        }
        g
    }

    fn content_in(self, a: &ModPoly, x: usize) -> Dense {
        let mut acc: Dense = Vec::new();
        for (_, u) in self.groups(a, x) {
            acc = self.ugcd(&acc, &u);
            if acc.len() == 1 {
                break;
            }
        }
        acc
    }

    fn div_by_uni(self, a: &ModPoly, u: &Dense, x: usize) -> ModPoly {
        if u.len() == 1 {
            return self.mp_scale(a, self.inv(u[0]));
        }
        let mut v = Vec::new();
        for (m, g) in self.groups(a, x) {
            let (q, r) = self.udivrem(&g, u);
            debug_assert!(r.is_empty());
            for (e, c) in q.into_iter().enumerate() {
                if c != 0 {
                    v.push((m.with_exponent(x, e as u32), c));
                }
            }
        }
        self.normalize(v)
    }

    fn from_dense(self, u: &Dense, x: usize) -> ModPoly {
        let v = u
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| (Monomial::ONE.with_exponent(x, e as u32), c))
            .collect();
        self.normalize(v)
    }

    fn monomial_content(a: &ModPoly) -> Monomial {
        let mut it = a.iter();
        let first = it.next().map(|t| t.0).unwrap_or(Monomial::ONE);
        it.fold(first, |acc, t| acc.gcd(t.0))
    }

    /// Monic gcd of `a` and `b` in Z_p[vars]; `None` if the evaluation budget ran out.
    fn gcd(self, a: &ModPoly, b: &ModPoly, vars: &[usize]) -> Option<ModPoly> {
        if a.is_empty() {
            return Some(self.mp_monic(b.clone()));
        }
        if b.is_empty() {
            return Some(self.mp_monic(a.clone()));
        }
        let vars: Vec<usize> = vars
            .iter()
            .copied()
            .filter(|&v| a.iter().chain(b.iter()).any(|t| t.0.exponent(v) > 0))
            .collect();
        let one = vec![(Monomial::ONE, 1u64)];
        if vars.is_empty() {
            return Some(one);
        }
        let (mca, mcb) = (Self::monomial_content(a), Self::monomial_content(b));
        let mg = mca.gcd(mcb);
        let strip = |p: &ModPoly, m: Monomial| -> ModPoly {
            if m.is_one() {
                p.clone()
            } else {
                p.iter().map(|&(t, c)| (t.div(m), c)).collect()
            }
        };
        let (a, b) = (strip(a, mca), strip(b, mcb));
        let attach = |p: ModPoly| -> ModPoly {
            if mg.is_one() {
                p
            } else {
                p.into_iter().map(|(t, c)| (t.mul(mg), c)).collect()
            }
        };
        if a.len() == 1 || b.len() == 1 {
            // One side is a monomial times a constant: only the monomial part is shared.
            return Some(attach(one));
        }
        if vars.len() == 1 {
            let x = vars[0];
            let da = self.to_dense(&a, x);
            let db = self.to_dense(&b, x);
            return Some(attach(self.from_dense(&self.ugcd(&da, &db), x)));
        }
        let x = *vars.last().unwrap();
        let rest = &vars[..vars.len() - 1];

        let ca = self.content_in(&a, x);
        let cb = self.content_in(&b, x);
        let c = self.ugcd(&ca, &cb);
        let a1 = self.div_by_uni(&a, &ca, x);
        let b1 = self.div_by_uni(&b, &cb, x);
        let cpoly = self.from_dense(&c, x);
        let in_rest = |p: &ModPoly| p.iter().any(|t| rest.iter().any(|&v| t.0.exponent(v) > 0));
        if !in_rest(&a1) || !in_rest(&b1) {
            return Some(attach(cpoly));
        }
        let ga = self.groups(&a1, x);
        let gb = self.groups(&b1, x);
        let la = ga.iter().next_back().unwrap().1.clone();
        let lb = gb.iter().next_back().unwrap().1.clone();
        let g = self.ugcd(&la, &lb);
        let dega = a1.iter().map(|t| t.0.exponent(x)).max().unwrap_or(0) as usize;
        let degb = b1.iter().map(|t| t.0.exponent(x)).max().unwrap_or(0) as usize;
        let bound = g.len().saturating_sub(1) + dega.min(degb);

        let mut h: Option<(ModPoly, Monomial)> = None;
        let mut q: Dense = vec![1];
        let mut npts = 0usize;
        let mut tried = 0usize;
        let mut alpha = 0u64;
        let budget = 4 * bound + 64;
        while tried < budget {
            alpha += 1;
            if alpha >= self.0 {
                return None;
            }
            if self.ueval(&la, alpha) == 0 || self.ueval(&lb, alpha) == 0 {
                continue;
            }
            tried += 1;
            let aa = self.mp_eval(&a1, x, alpha);
            let ba = self.mp_eval(&b1, x, alpha);
            let ci = self.gcd(&aa, &ba, rest)?;
            if ci.len() == 1 && ci[0].0.is_one() {
                // a1, b1 are primitive over Z_p[x]; a trivial image certifies a trivial gcd.
                return Some(attach(cpoly));
            }
            let ci = self.mp_scale(&ci, self.ueval(&g, alpha));
            let lm = ci[0].0;
            let mut stable = false;
            match &mut h {
                Some((hp, hlm)) if lm == *hlm => {
                    let hv = self.mp_eval(hp, x, alpha);
                    let diff = self.mp_sub(&ci, &hv);
                    if diff.is_empty() {
                        stable = true;
                    } else {
                        let qa = self.ueval(&q, alpha);
                        let scaled = self.mp_scale(&diff, self.inv(qa));
                        *hp = self.mp_add(hp, &self.mp_mul_uni(&scaled, &q, x));
                    }
                    q = self.umul(&q, &vec![self.neg(alpha), 1]);
                    npts += 1;
                }
                Some((_, hlm)) if lm > *hlm => continue,
                _ => {
                    h = Some((ci, lm));
                    q = vec![self.neg(alpha), 1];
                    npts = 1;
                }
            }
            if stable || npts > bound {
                let (hp, _) = h.as_ref().unwrap();
                let hc = self.content_in(hp, x);
                let cand = self.div_by_uni(hp, &hc, x);
                if self.mp_div_exact(&a1, &cand).is_some() && self.mp_div_exact(&b1, &cand).is_some() {
                    let full = self.mp_mul(&cand, &cpoly);
                    return Some(attach(self.mp_monic(full)));
                }
                if npts > bound {
                    h = None;
                }
            }
        }
        None
    }

    fn to_dense(self, a: &ModPoly, x: usize) -> Dense {
        let deg = a.iter().map(|t| t.0.exponent(x)).max().unwrap_or(0) as usize;
        let mut d = vec![0; deg + 1];
        for &(m, c) in a {
            let e = m.exponent(x) as usize;
            d[e] = self.add(d[e], c);
        }
        self.trim(d)
    }

    fn reduce(self, a: &IntPoly) -> ModPoly {
        let m = BigInt::from(self.0);
        let v = a
            .terms()
            .iter()
            .map(|(mm, c)| {
                let r = c.mod_floor(&m);
                (*mm, r.iter_u64_digits().next().unwrap_or(0))
            })
            .collect();
        self.normalize(v)
    }
}

/// Successive primes below 2^62.
struct Primes {
    next: u64,
}

impl Primes {
    fn new() -> Self {
        Primes { next: (1u64 << 62) - 1 }
    }
}

impl Iterator for Primes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.next > 3 {
            let c = self.next;
            self.next -= 2;
            if is_prime_u64(c) {
                return Some(c);
            }
        }
        None
    }
}

/// Result of [`gcd_cofactors`]: `a = g * abar`, `b = g * bbar`.
pub struct GcdCofactors {
    pub gcd: IntPoly,
    pub abar: IntPoly,
    pub bbar: IntPoly,
}

/// Gcd over Z[x] with positive leading coefficient, together with both cofactors.
///
/// `gcd(0, 0)` is defined as 0 with zero cofactors.
pub fn gcd_cofactors(a: &IntPoly, b: &IntPoly) -> GcdCofactors {
    let nv = a.nvars();
    if a.is_zero() && b.is_zero() {
        return GcdCofactors { gcd: IntPoly::zero(nv), abar: IntPoly::zero(nv), bbar: IntPoly::zero(nv) };
    }
    if a.is_zero() {
        let g = normalize_sign(b.clone());
        let bbar = b.div_exact(&g).expect("self division");
        return GcdCofactors { gcd: g, abar: IntPoly::zero(nv), bbar };
    }
    if b.is_zero() {
        let g = normalize_sign(a.clone());
        let abar = a.div_exact(&g).expect("self division");
        return GcdCofactors { gcd: g, abar, bbar: IntPoly::zero(nv) };
    }
    let g = gcd(a, b);
    let abar = a.div_exact(&g).expect("gcd divides a");
    let bbar = b.div_exact(&g).expect("gcd divides b");
    GcdCofactors { gcd: g, abar, bbar }
}

fn normalize_sign(p: IntPoly) -> IntPoly {
    if p.leading_coeff().is_negative() {
        p.neg()
    } else {
        p
    }
}

/// Gcd over Z[x] with positive leading coefficient.
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let nv = a.nvars();
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    let (ca, cb) = (a.content(), b.content());
    let cg = ca.gcd(&cb);
    let (mca, mcb) = (a.monomial_content(), b.monomial_content());
    let mg = mca.gcd(mcb);
    let finish = |core: IntPoly| -> IntPoly { core.mul_term(mg, &cg) };
    if a.len() == 1 || b.len() == 1 {
        return finish(IntPoly::one(nv));
    }
    let strip = |p: &IntPoly, c: &BigInt, m: Monomial| -> IntPoly {
        IntPoly::from_sorted_unchecked(nv, p.terms().iter().map(|(t, x)| (t.div(m), x / c)).collect())
    };
    let a1 = strip(a, &ca, mca);
    let b1 = strip(b, &cb, mcb);
    if a1.is_constant() || b1.is_constant() {
        return finish(IntPoly::one(nv));
    }
    // Cheap exact-division shortcut: one side divides the other.
    let (small, large) = if a1.len() <= b1.len() { (&a1, &b1) } else { (&b1, &a1) };
    if large.div_exact(small).is_some() {
        return finish(normalize_sign(small.clone()));
    }
    let vars: Vec<usize> = (0..nv).filter(|&v| a1.involves(v) || b1.involves(v)).collect();
    let gamma = a1.leading_coeff().gcd(&b1.leading_coeff());
    let lcprod = a1.leading_coeff() * b1.leading_coeff();

    let mut acc: Option<(BTreeMap<Monomial, BigInt>, Monomial, BigInt)> = None;
    for p in Primes::new() {
        if (&lcprod % BigInt::from(p)).is_zero() {
            continue;
        }
        let zp = Zp(p);
        let ap = zp.reduce(&a1);
        let bp = zp.reduce(&b1);
        let Some(gp) = zp.gcd(&ap, &bp, &vars) else { continue };
        if gp.len() == 1 && gp[0].0.is_one() {
            return finish(IntPoly::one(nv));
        }
        let gam = {
            let r = gamma.mod_floor(&BigInt::from(p));
            r.iter_u64_digits().next().unwrap_or(0)
        };
        let gp = zp.mp_scale(&gp, gam);
        let lm = gp[0].0;
        let pb = BigInt::from(p);
        match &mut acc {
            Some((coeffs, alm, modulus)) if *alm == lm => {
                let gpm: BTreeMap<Monomial, u64> = gp.into_iter().collect();
                let keys: Vec<Monomial> = coeffs.keys().chain(gpm.keys()).copied().collect();
                let inv_m = {
                    let mm = modulus.mod_floor(&pb).iter_u64_digits().next().unwrap_or(0);
                    zp.inv(mm)
                };
                let new_mod = &*modulus * &pb;
                let mut next = BTreeMap::new();
                for k in keys {
                    if next.contains_key(&k) {
                        continue;
                    }
                    let old = coeffs.get(&k).cloned().unwrap_or_default();
                    let r = gpm.get(&k).copied().unwrap_or(0);
                    // x = old + M * ((r - old) / M mod p)
                    let oldp = old.mod_floor(&pb).iter_u64_digits().next().unwrap_or(0);
                    let t = zp.mul(zp.sub(r, oldp), inv_m);
                    let x = symmetric_mod(&(&old + &*modulus * BigInt::from(t)), &new_mod);
                    if !x.is_zero() {
                        next.insert(k, x);
                    }
                }
                *coeffs = next;
                *modulus = new_mod;
            }
            Some((_, alm, _)) if lm > *alm => continue,
            _ => {
                let coeffs: BTreeMap<Monomial, BigInt> = gp
                    .into_iter()
                    .map(|(m, c)| (m, symmetric_mod(&BigInt::from(c), &pb)))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                acc = Some((coeffs, lm, pb));
            }
        }
        let (coeffs, _, _) = acc.as_ref().unwrap();
        let cand = IntPoly::from_terms(nv, coeffs.iter().map(|(m, c)| (*m, c.clone()))).primitive_part();
        if cand.is_zero() {
            continue;
        }
        if a1.div_exact(&cand).is_some() && b1.div_exact(&cand).is_some() {
            return finish(cand);
        }
    }
    unreachable!("prime supply exhausted")
}

/// Least common multiple with positive leading coefficient.
pub fn lcm(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() || b.is_zero() {
        return IntPoly::zero(a.nvars());
    }
    let g = gcd(a, b);
    let r = a.div_exact(&g).expect("gcd divides").mul(b);
    normalize_sign(r)
}

#[allow(dead_code)]
fn is_unit(p: &IntPoly) -> bool {
    p.is_constant() && p.constant_term().abs().is_one()
}
