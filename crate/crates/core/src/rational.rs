//! Exact rationals and their textual renderings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `base^-exp`.
pub fn inv_pow(base: u32, exp: u32) -> Rational {
    Rational::new(
        BigInt::one(),
        num_traits::pow(BigInt::from(base), exp as usize),
    )
}

/// Renders as `"num/den"`; integers keep the `/1`.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_fraction(s: &str) -> Option<Rational> {
    let (n, d) = s.trim().split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Decimal rendering rounded half away from zero to `places` digits.
pub fn to_decimal_string(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = r * Rational::from_integer(scale.clone());
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    let (q, rem) = abs.numer().div_rem(abs.denom());
    let rounded = if rem * BigInt::from(2) >= *abs.denom() {
        q + 1
    } else {
        q
    };
    let (whole, frac) = rounded.div_rem(&scale);
    let mut out = String::new();
    if neg && !rounded_is_zero(&whole, &frac) {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if places > 0 {
        out.push('.');
        out.push_str(&format!("{:0>width$}", frac.to_string(), width = places));
    }
    out
}

fn rounded_is_zero(whole: &BigInt, frac: &BigInt) -> bool {
    whole.is_zero() && frac.is_zero()
}

/// Lossy conversion for thresholds in tests and summaries.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
