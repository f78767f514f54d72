//! Exact projective points and Weil heights.
//!
//! A point of P^N is stored as integer coordinates in canonical form: gcd of
//! all coordinates 1, first nonzero coordinate positive. Points of products
//! P^{N_1} x ... x P^{N_r} are lists of such factors. Canonical form makes
//! equality, ordering, and hashing structural, which the orbit machinery
//! relies on for dedup and deterministic iteration.
//!
//! Heights are the only lossy quantity: h(P) = log max |x_i| on canonical
//! coordinates, computed to full double accuracy even when coordinates have
//! tens of thousands of digits (see `rat::ln_bigint`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::ln_bigint;

/// Real-valued height; always finite, >= 0 for canonical points.
pub type HeightValue = f64;

/// A point of P^N in canonical integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

/// A point of a finite product of projective spaces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiProjPoint {
    factors: Vec<ProjPoint>,
}

/// Real coefficients pairing a height with each factor of a product space.
/// At least one coefficient must be nonzero; "ample" usage requires all > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorCoeffs(pub Vec<f64>);

impl DivisorCoeffs {
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().all(|c| *c == 0.0) {
            return Err(Error::ZeroDivisor);
        }
        Ok(())
    }

    pub fn is_ample(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|c| *c > 0.0)
    }
}

/// Canonicalize integer coordinates: reject all-zero, divide by the gcd, and
/// flip signs so the first nonzero coordinate is positive.
pub fn normalize(coords: Vec<BigInt>) -> Result<ProjPoint> {
    if coords.iter().all(Zero::is_zero) {
        return Err(Error::ZeroPoint);
    }
    let mut g = BigInt::zero();
    for c in &coords {
        g = g.gcd(c);
    }
    let mut coords: Vec<BigInt> = coords.into_iter().map(|c| c / &g).collect();
    let flip = coords
        .iter()
        .find(|c| !c.is_zero())
        .map(Signed::is_negative)
        .unwrap_or(false);
    if flip {
        for c in &mut coords {
            *c = -std::mem::take(c);
        }
    }
    Ok(ProjPoint { coords })
}

/// Canonicalize rational coordinates: clear denominators by their lcm, then
/// normalize as integers. The projective class is unchanged.
pub fn normalize_rationals(coords: Vec<BigRational>) -> Result<ProjPoint> {
    let mut lcm = BigInt::from(1);
    for c in &coords {
        lcm = lcm.lcm(c.denom());
    }
    let ints = coords
        .into_iter()
        .map(|c| {
            let scaled = c * BigRational::from_integer(lcm.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer()
        })
        .collect();
    normalize(ints)
}

impl ProjPoint {
    /// Canonicalizing constructor; see `normalize`.
    pub fn new(coords: Vec<BigInt>) -> Result<Self> {
        normalize(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        normalize(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Ambient dimension N (coordinate count minus one).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Bit length of the largest-magnitude coordinate.
    pub fn max_coord_bits(&self) -> u64 {
        self.coords.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Upper bound on the decimal digit count of the largest coordinate.
    pub fn max_coord_digits(&self) -> usize {
        // bits * log10(2), rounded up, plus one for safety on short values.
        (self.max_coord_bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
    }
}

impl MultiProjPoint {
    pub fn new(factors: Vec<ProjPoint>) -> Self {
        MultiProjPoint { factors }
    }

    pub fn single(p: ProjPoint) -> Self {
        MultiProjPoint { factors: vec![p] }
    }

    pub fn factors(&self) -> &[ProjPoint] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &ProjPoint {
        &self.factors[i]
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn expect_factors(&self, expected: usize) -> Result<()> {
        if self.factors.len() != expected {
            return Err(Error::FactorCount {
                expected,
                got: self.factors.len(),
            });
        }
        Ok(())
    }

    pub fn max_coord_digits(&self) -> usize {
        self.factors
            .iter()
            .map(ProjPoint::max_coord_digits)
            .max()
            .unwrap_or(0)
    }
}

/// Absolute logarithmic Weil height h(P) = log max |x_i| on canonical
/// coordinates. Always >= 0; zero exactly when every coordinate is -1, 0 or 1.
pub fn weil_height(p: &ProjPoint) -> HeightValue {
    let max = p
        .coords
        .iter()
        .map(Signed::abs)
        .max()
        .expect("canonical point is nonempty");
    debug_assert!(max.is_positive());
    ln_bigint(&max)
}

/// Height against a weighted divisor: sum of c_i * h(factor_i).
pub fn multi_height(p: &MultiProjPoint, coeffs: &DivisorCoeffs) -> Result<HeightValue> {
    if coeffs.0.len() != p.factors.len() {
        return Err(Error::CoeffLenMismatch {
            coeffs: coeffs.0.len(),
            factors: p.factors.len(),
        });
    }
    Ok(p.factors
        .iter()
        .zip(&coeffs.0)
        .map(|(f, c)| c * weil_height(f))
        .sum())
}

/// h^+ = max(1, h); keeps roots and logarithms of height sums well defined.
pub fn height_plus(h: HeightValue) -> HeightValue {
    h.max(1.0)
}
