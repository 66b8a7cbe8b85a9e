//! Coefficient rings: arbitrary-precision integers and rationals, and prime fields.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// A commutative ring with exact (partial) division, used as a polynomial coefficient.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;

    /// `Some(q)` with `q * other == self` when such a `q` exists.
    fn try_divide(&self, other: &Self) -> Option<Self>;
}

/// A field of characteristic zero or a large prime.
pub trait Field: Ring + Div<Output = Self> {
    fn inverse(&self) -> Option<Self>;

    /// Image of an exact rational; `None` when the denominator is not invertible.
    fn from_rational(q: &BigRational) -> Option<Self>;
}

impl Ring for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn try_divide(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(other);
        r.is_zero().then_some(q)
    }
}

impl Ring for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn try_divide(&self, other: &Self) -> Option<Self> {
        (!other.is_zero()).then(|| self / other)
    }
}

impl Field for BigRational {
    fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
}

/// Default modulus for probabilistic checks: the Mersenne prime 2^61 - 1.
pub const DEFAULT_PRIME: u64 = 2_305_843_009_213_693_951;

/// Element of the prime field Z/PZ. `P` must be an odd prime below 2^63.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub const MODULUS: u64 = P;

    pub fn new(v: u64) -> Self {
        Fp(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let m = BigInt::from(P);
        let r = v.mod_floor(&m);
        Fp(r.to_u64().expect("residue fits in u64"))
    }
}

impl<const P: u64> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let s = self.0 as u128 + o.0 as u128;
        Fp((s % P as u128) as u64)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        if self.0 >= o.0 {
            Fp(self.0 - o.0)
        } else {
            Fp(P - (o.0 - self.0))
        }
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(((self.0 as u128 * o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Fp(P - self.0)
        }
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.inverse().expect("division by zero in prime field")
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1)
    }
}

impl<const P: u64> Ring for Fp<P> {
    fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Fp::new(v as u64)
        } else {
            -Fp::new(v.unsigned_abs())
        }
    }

    fn try_divide(&self, other: &Self) -> Option<Self> {
        other.inverse().map(|inv| *self * inv)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn inverse(&self) -> Option<Self> {
        (self.0 != 0).then(|| self.pow(P - 2))
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        let num = Fp::from_bigint(q.numer());
        let den = Fp::from_bigint(q.denom());
        den.inverse().map(|d| num * d)
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Symmetric residue of `v` modulo `m`, in `(-m/2, m/2]`.
pub(crate) fn symmetric_mod(v: &BigInt, m: &BigInt) -> BigInt {
    let r = v.mod_floor(m);
    let half: BigInt = m >> 1;
    if r > half {
        r - m
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = Fp<DEFAULT_PRIME>;

    #[test]
    fn default_prime_is_prime_and_large() {
        assert!(is_prime_u64(DEFAULT_PRIME));
        assert!(DEFAULT_PRIME > 1 << 40);
        assert!(!is_prime_u64(DEFAULT_PRIME - 2));
    }

    #[test]
    fn inverse_and_negatives() {
        let a = F::from_i64(-3);
        assert_eq!(a + F::from_i64(3), F::zero());
        let inv = a.inverse().unwrap();
        assert_eq!(a * inv, F::one());
        assert!(F::zero().inverse().is_none());
    }

    #[test]
    fn rational_image() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = F::from_rational(&q).unwrap();
        assert_eq!(x * F::from_i64(3), F::one());
        let bad = BigRational::new(BigInt::from(1), BigInt::from(DEFAULT_PRIME));
        assert!(F::from_rational(&bad).is_none());
    }

    #[test]
    fn bigint_exact_division() {
        let a = BigInt::from(12);
        assert_eq!(a.try_divide(&BigInt::from(4)), Some(BigInt::from(3)));
        assert_eq!(a.try_divide(&BigInt::from(5)), None);
        assert_eq!(a.try_divide(&BigInt::zero()), None);
    }
}
