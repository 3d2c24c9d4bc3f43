//! Integer money and ratio types.
//!
//! Every consensus-relevant value is an [`Amount`] of satoshi and every ratio
//! is a [`Ppm`]. Multiplication by a ratio always floors; callers that need
//! exact conservation take the complement instead of multiplying twice.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};

use crate::error::Error;

/// Satoshi per bitcoin.
pub const SATS_PER_BTC: u64 = 100_000_000;

/// One whole in parts-per-million.
pub const PPM_ONE: u32 = 1_000_000;

/// A non-negative amount of satoshi.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Amount(u64);

impl Amount {
    pub const ZERO: Amount = Amount(0);

    pub const fn from_sat(sat: u64) -> Self {
        Amount(sat)
    }

    pub const fn from_btc(btc: u64) -> Self {
        Amount(btc * SATS_PER_BTC)
    }

    pub const fn sat(self) -> u64 {
        self.0
    }

    pub fn checked_sub(self, rhs: Amount) -> Option<Amount> {
        self.0.checked_sub(rhs.0).map(Amount)
    }

    pub fn saturating_sub(self, rhs: Amount) -> Amount {
        Amount(self.0.saturating_sub(rhs.0))
    }

    /// `floor(self * ratio)`.
    pub fn mul_ppm(self, ratio: Ppm) -> Amount {
        Amount((self.0 as u128 * ratio.0 as u128 / PPM_ONE as u128) as u64)
    }

    /// `floor(self / divisor)`. Panics on a zero divisor.
    pub fn div_floor(self, divisor: u64) -> Amount {
        Amount(self.0 / divisor)
    }

    /// `floor(self * num / den)` computed without intermediate overflow.
    pub fn mul_div_floor(self, num: u64, den: u64) -> Amount {
        Amount((self.0 as u128 * num as u128 / den as u128) as u64)
    }
}

impl Add for Amount {
    type Output = Amount;

    fn add(self, rhs: Amount) -> Amount {
        Amount(self.0.checked_add(rhs.0).expect("amount overflow"))
    }
}

impl AddAssign for Amount {
    fn add_assign(&mut self, rhs: Amount) {
        *self = *self + rhs;
    }
}

impl Sub for Amount {
    type Output = Amount;

    fn sub(self, rhs: Amount) -> Amount {
        Amount(self.0.checked_sub(rhs.0).expect("amount underflow"))
    }
}

impl Sum for Amount {
    fn sum<I: Iterator<Item = Amount>>(iter: I) -> Amount {
        iter.fold(Amount::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Amount> for Amount {
    fn sum<I: Iterator<Item = &'a Amount>>(iter: I) -> Amount {
        iter.copied().sum()
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A ratio in parts-per-million, always within `[0, 1_000_000]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ppm(u32);

impl Ppm {
    pub const ZERO: Ppm = Ppm(0);
    pub const ONE: Ppm = Ppm(PPM_ONE);

    pub fn new(value: u32) -> Result<Self, Error> {
        if value > PPM_ONE {
            return Err(Error::PpmOutOfRange(value as u64));
        }
        Ok(Ppm(value))
    }

    /// Const constructor for literals known to be in range.
    pub const fn from_const(value: u32) -> Self {
        assert!(value <= PPM_ONE, "ppm out of range");
        Ppm(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub fn complement(self) -> Ppm {
        Ppm(PPM_ONE - self.0)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / PPM_ONE as f64
    }
}

impl fmt::Display for Ppm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / PPM_ONE, self.0 % PPM_ONE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_rejects_above_one() {
        assert!(Ppm::new(1_000_001).is_err());
        assert_eq!(Ppm::new(1_000_000).unwrap(), Ppm::ONE);
    }

    #[test]
    fn mul_ppm_floors() {
        assert_eq!(
            Amount::from_sat(7).mul_ppm(Ppm::from_const(500_000)),
            Amount::from_sat(3)
        );
        assert_eq!(Amount::from_btc(2).mul_ppm(Ppm::from_const(600_000)).sat(), 120_000_000);
    }

    #[test]
    fn mul_ppm_does_not_overflow_on_large_values() {
        let big = Amount::from_sat(u64::MAX / 2);
        assert_eq!(big.mul_ppm(Ppm::ONE), big);
    }

    #[test]
    fn ppm_display() {
        assert_eq!(Ppm::from_const(70_000).to_string(), "0.070000");
        assert_eq!(Ppm::ONE.to_string(), "1.000000");
    }
}
