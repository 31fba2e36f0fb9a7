//! Directed-rounding intervals of large nonnegative reals.
//!
//! A [`Wide`] is `mant · 2^exp` with a 128-bit mantissa, normalised so that
//! the top bit is set (or the value is zero). [`WideInterval`] keeps a lower
//! end rounded down and an upper end rounded up through every operation, so
//! the true value always stays inside.

use num_bigint::BigUint;
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wide {
    mant: u128,
    exp: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

impl Wide {
    pub const ZERO: Wide = Wide { mant: 0, exp: 0 };

    pub fn from_u128(x: u128) -> Wide {
        Wide::normalise(x, 0)
    }

    fn normalise(mant: u128, exp: i64) -> Wide {
        if mant == 0 {
            return Wide::ZERO;
        }
        let z = mant.leading_zeros();
        Wide {
            mant: mant << z,
            exp: exp - z as i64,
        }
    }

    pub fn is_zero(self) -> bool {
        self.mant == 0
    }

    /// Natural logarithm to double precision; `-∞` for zero.
    pub fn ln(self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        // value = (mant / 2^127) · 2^(exp + 127) with the first factor in [1, 2)
        let frac = (self.mant >> 75) as f64 / (1u64 << 52) as f64;
        frac.ln() + (self.exp + 127) as f64 * std::f64::consts::LN_2
    }

    fn from_big(x: &BigUint, round: Round) -> Wide {
        let bits = x.bits();
        if bits <= 128 {
            let mut digits = x.iter_u64_digits();
            let lo = digits.next().unwrap_or(0) as u128;
            let hi = digits.next().unwrap_or(0) as u128;
            return Wide::from_u128(lo | (hi << 64));
        }
        let shift = bits - 128;
        let top: BigUint = x >> shift;
        let mut digits = top.iter_u64_digits();
        let lo = digits.next().unwrap_or(0) as u128;
        let hi = digits.next().unwrap_or(0) as u128;
        let mut mant = lo | (hi << 64);
        let exact = x.trailing_zeros().is_some_and(|t| t >= shift);
        let mut exp = shift as i64;
        if round == Round::Up && !exact {
            let (m, carry) = mant.overflowing_add(1);
            mant = m;
            if carry {
                mant = 1u128 << 127;
                exp += 1;
            }
        }
        Wide::normalise(mant, exp)
    }

    fn mul(self, other: Wide, round: Round) -> Wide {
        if self.is_zero() || other.is_zero() {
            return Wide::ZERO;
        }
        let (hi, lo) = mul_128(self.mant, other.mant);
        // hi has its top bit in position 126 or 127
        let z = hi.leading_zeros();
        let (mant, dropped) = if z == 0 {
            (hi, lo != 0)
        } else {
            ((hi << z) | (lo >> (128 - z)), (lo << z) != 0)
        };
        let exp = self.exp + other.exp + 128 - z as i64;
        bump(mant, exp, dropped && round == Round::Up)
    }

    fn add(self, other: Wide, round: Round) -> Wide {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (big.exp - small.exp) as u64;
        let (aligned, lost) = if shift >= 128 {
            (0u128, true)
        } else {
            (small.mant >> shift, shift > 0 && (small.mant << (128 - shift)) != 0)
        };
        let (sum, carry) = big.mant.overflowing_add(aligned);
        let (mant, exp, lost) = if carry {
            ((sum >> 1) | (1u128 << 127), big.exp + 1, lost || sum & 1 == 1)
        } else {
            (sum, big.exp, lost)
        };
        bump(mant, exp, lost && round == Round::Up)
    }

    pub fn cmp_value(self, other: Wide) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.exp.cmp(&other.exp).then(self.mant.cmp(&other.mant)),
        }
    }
}

fn bump(mant: u128, exp: i64, up: bool) -> Wide {
    if !up {
        return Wide::normalise(mant, exp);
    }
    match mant.checked_add(1) {
        Some(m) => Wide::normalise(m, exp),
        None => Wide::normalise(1u128 << 127, exp + 1),
    }
}

/// Full 256-bit product as (high, low) halves.
fn mul_128(a: u128, b: u128) -> (u128, u128) {
    let mask = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & mask);
    let (b1, b0) = (b >> 64, b & mask);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    let lo = (p00 & mask) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Closed interval `[lo, hi]` of nonnegative reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WideInterval {
    pub lo: Wide,
    pub hi: Wide,
}

impl WideInterval {
    pub fn exact_u128(x: u128) -> Self {
        let w = Wide::from_u128(x);
        WideInterval { lo: w, hi: w }
    }

    pub fn from_big(x: &BigUint) -> Self {
        WideInterval {
            lo: Wide::from_big(x, Round::Down),
            hi: Wide::from_big(x, Round::Up),
        }
    }

    pub fn mul(self, other: Self) -> Self {
        WideInterval {
            lo: self.lo.mul(other.lo, Round::Down),
            hi: self.hi.mul(other.hi, Round::Up),
        }
    }

    pub fn add(self, other: Self) -> Self {
        WideInterval {
            lo: self.lo.add(other.lo, Round::Down),
            hi: self.hi.add(other.hi, Round::Up),
        }
    }

    /// Outward-rounded natural logarithm of both ends.
    pub fn ln(self) -> (f64, f64) {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (widen_down(a), widen_up(b))
    }
}

/// A few ulps of slack absorb the rounding of `ln` and of the final sum.
fn slack(x: f64) -> f64 {
    (x.abs() + 1.0) * 8.0 * f64::EPSILON
}

pub(crate) fn widen_down(x: f64) -> f64 {
    if x.is_finite() {
        x - slack(x)
    } else {
        x
    }
}

pub(crate) fn widen_up(x: f64) -> f64 {
    if x.is_finite() {
        x + slack(x)
    } else {
        x
    }
}
