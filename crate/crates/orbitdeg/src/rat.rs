//! Exact rational scalars: parsing, formatting, and correctly rounded
//! conversion to f64.
//!
//! Rationals travel through configs and fixtures as strings, either a plain
//! decimal integer `"-12"` or a fraction `"p/q"`. All arithmetic stays exact;
//! `to_f64` is the only lossy step and is used for eigenvalue/norm work where
//! double precision is the contract.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse `"p"` or `"p/q"` into an exact rational. Whitespace is trimmed;
/// a zero denominator is rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let make_err = |m: &str| Error::config("rational", format!("{m}: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| make_err("numerator is not an integer"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| make_err("denominator is not an integer"))?;
        if d.is_zero() {
            return Err(make_err("denominator is zero"));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| make_err("not an integer"))?;
        Ok(BigRational::from_integer(n))
    }
}

/// Format a rational as `"p"` (integral) or `"p/q"`; inverse of `parse_rational`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Natural log of a positive big integer, accurate to a few ulps even when
/// the integer is far outside f64 range. The value is reconstructed from the
/// top 53 bits (exact in f64) plus `shift * ln 2`.
pub fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    let bits = x.bits();
    if bits <= 53 {
        let v = x.to_f64().expect("fits in f64");
        return v.ln();
    }
    let shift = bits - 53;
    let top: BigInt = x >> shift;
    let mantissa = top.to_f64().expect("53-bit value fits in f64");
    mantissa.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Correctly ranged conversion of a rational to f64. Falls back to a
/// logarithmic reconstruction when numerator or denominator overflow f64 on
/// their own; exact rational entries in this crate are far smaller than that
/// in practice.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer().to_f64();
    let d = r.denom().to_f64();
    match (n, d) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            let sign = if r.is_negative() { -1.0 } else { 1.0 };
            let ln = ln_bigint(&r.numer().abs()) - ln_bigint(r.denom());
            sign * ln.exp()
        }
    }
}
