//! Exact non-negative dyadic rationals `num / 2^exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// Largest denominator exponent supported; sums of up to 2^64 terms with
/// this exponent still fit the numerator.
pub const MAX_EXP: u32 = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: u128, exp: u32) -> Self {
        assert!(exp <= MAX_EXP, "dyadic exponent {exp} too large");
        Self { num, exp }.normalized()
    }

    pub fn from_int(v: u64) -> Self {
        Self { num: v as u128, exp: 0 }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Self::new(1, k)
    }

    /// `1 - 2^-k`.
    pub fn one_minus_pow2_neg(k: u32) -> Self {
        Self::new((1u128 << k) - 1, k)
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn ceil(&self) -> u128 {
        let d = 1u128 << self.exp;
        self.num.div_ceil(d)
    }

    pub fn floor(&self) -> u128 {
        self.num >> self.exp
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (2f64).powi(self.exp as i32)
    }

    /// `self * k / 2^shift`, exact.
    pub fn scale(&self, k: u64, shift: u32) -> Self {
        Self::new(self.num * k as u128, self.exp + shift)
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            return Self::ZERO;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
        self
    }

    fn aligned(&self, exp: u32) -> u128 {
        self.num << (exp - self.exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        Dyadic::new(self.aligned(exp) + rhs.aligned(exp), exp)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.aligned(exp).cmp(&other.aligned(exp))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.exp)
        }
    }
}
