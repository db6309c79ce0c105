//! Floating-point scalar abstraction shared by scoring, metrics and reports.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// floating point: f32 or f64
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Name echoed in report configuration blocks.
    const NAME: &'static str;

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in a float")
    }

    /// `num / den` computed from exact integer counts.
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn from_exact(r: &Ratio<u64>) -> Self {
        Self::ratio(*r.numer(), *r.denom())
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";
}

/// Neumaier-compensated sum. The result does not depend on how the input
/// was produced, only on its order, so repeated runs are bit-identical.
pub fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

/// Percentage rounded to one decimal, the precision used in every table.
pub fn percent_1dp<T: Scalar>(fraction: T) -> f64 {
    let p = fraction.to_f64().unwrap_or(f64::NAN) * 100.0;
    (p * 10.0).round() / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let xs = [1.0e16_f64, 1.0, -1.0e16];
        assert_eq!(compensated_sum(xs), 1.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn exact_ratio_to_float() {
        let r = Ratio::new(13_u64, 36);
        assert!((f64::from_exact(&r) - 13.0 / 36.0).abs() < 1e-15);
        assert!((f32::from_exact(&r) - 13.0 / 36.0).abs() < 1e-6);
    }

    #[test]
    fn percent_rounding() {
        assert_eq!(percent_1dp(2.0_f64 / 3.0), 66.7);
        assert_eq!(percent_1dp(1.0_f32), 100.0);
        assert_eq!(percent_1dp(0.0_f64), 0.0);
    }
}
