//! Exponent vectors packed into a single `u128`.
//!
//! Variable 0 occupies the most significant 16 bits, so the integer order on the
//! packed word is exactly the lexicographic monomial order with x0 > x1 > ...

use std::fmt;

pub const MAX_VARS: usize = 8;
const LANE_BITS: u32 = 16;
const LANE_MASK: u128 = 0xFFFF;
const CARRY_GUARD: u128 = 0x8000_8000_8000_8000_8000_8000_8000_8000;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(u128);

fn shift(var: usize) -> u32 {
    debug_assert!(var < MAX_VARS);
    (MAX_VARS - 1 - var) as u32 * LANE_BITS
}

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(v: usize) -> Self {
        Monomial(1u128 << shift(v))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut w = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e < 1 << 15, "exponent too large");
            w |= (e as u128) << shift(i);
        }
        Monomial(w)
    }

    pub fn exponent(self, v: usize) -> u32 {
        ((self.0 >> shift(v)) & LANE_MASK) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.exponent(v)).collect()
    }

    pub fn with_exponent(self, v: usize, e: u32) -> Self {
        let cleared = self.0 & !(LANE_MASK << shift(v));
        Monomial(cleared | ((e as u128) << shift(v)))
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn total_degree(self) -> u32 {
        (0..MAX_VARS).map(|v| self.exponent(v)).sum()
    }

    pub fn mul(self, o: Monomial) -> Monomial {
        let w = self.0 + o.0;
        debug_assert!(w & CARRY_GUARD == 0, "exponent overflow");
        Monomial(w)
    }

    /// True when every exponent of `self` is at most the matching one of `o`.
    pub fn divides(self, o: Monomial) -> bool {
        // Per-lane subtraction with a guard bit: a lane borrows iff self > o there.
        let diff = (o.0 | CARRY_GUARD).wrapping_sub(self.0);
        diff & CARRY_GUARD == CARRY_GUARD
    }

    pub fn div(self, o: Monomial) -> Monomial {
        debug_assert!(o.divides(self));
        Monomial(self.0 - o.0)
    }

    /// Component-wise minimum.
    pub fn gcd(self, o: Monomial) -> Monomial {
        let mut w = 0u128;
        for v in 0..MAX_VARS {
            w |= (self.exponent(v).min(o.exponent(v)) as u128) << shift(v);
        }
        Monomial(w)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents(MAX_VARS))
    }
}
