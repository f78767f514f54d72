//! Self-morphisms of P^N over Q, given as tuples of homogeneous integer
//! polynomials of a common degree.
//!
//! A tuple (F_0, ..., F_N) of degree-d forms with no common nontrivial zero
//! defines a morphism of P^N whose pullback multiplies the hyperplane class
//! by d, so on the rank-1 Neron-Severi space the map is just the 1x1 matrix
//! [d]. The no-common-zero condition is asserted by the caller, not checked
//! (a resultant computation is out of scope); if it fails, evaluation at a
//! common zero reports the point as indeterminate.
//!
//! Coefficients are canonicalized on construction: one global scalar clears
//! denominators and divides out the content (projectively irrelevant), terms
//! with equal exponent vectors merge, zero terms drop, and terms sort by
//! exponent vector, so equal maps compare equal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::nsr::NsMatrix;
use crate::points::{normalize, ProjPoint};

/// One monomial: coefficient times prod x_i^{exponents[i]}.
type Term = (BigInt, Vec<u32>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PnMorphism {
    degree: u32,
    /// N+1 coordinate polynomials over N+1 variables, canonically sorted.
    polys: Vec<Vec<Term>>,
}

impl PnMorphism {
    /// Build from rational terms. The number of polynomials fixes the
    /// ambient dimension (N+1 polynomials in N+1 variables); every exponent
    /// vector must have that length and sum to `degree`.
    pub fn new(degree: u32, polys: Vec<Vec<(BigRational, Vec<u32>)>>) -> Result<Self> {
        if polys.is_empty() || polys.iter().all(|p| p.iter().all(|(c, _)| c.is_zero())) {
            return Err(Error::ZeroMorphism);
        }
        let vars = polys.len();
        for (i, poly) in polys.iter().enumerate() {
            for (_, exps) in poly {
                if exps.len() != vars || exps.iter().sum::<u32>() != degree {
                    return Err(Error::NotHomogeneous {
                        poly: i,
                        degree,
                        monomial: exps.clone(),
                    });
                }
            }
        }

        // One global scalar: lcm of denominators, then the content out.
        let mut lcm = BigInt::from(1);
        for (c, _) in polys.iter().flatten() {
            lcm = lcm.lcm(c.denom());
        }
        let mut int_polys: Vec<Vec<Term>> = polys
            .into_iter()
            .map(|poly| {
                let mut terms: Vec<Term> = poly
                    .into_iter()
                    .map(|(c, e)| ((c * BigRational::from_integer(lcm.clone())).to_integer(), e))
                    .filter(|(c, _)| !c.is_zero())
                    .collect();
                terms.sort_by(|a, b| a.1.cmp(&b.1));
                // Merge equal exponent vectors.
                let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
                for (c, e) in terms {
                    match merged.last_mut() {
                        Some((lc, le)) if *le == e => *lc += c,
                        _ => merged.push((c, e)),
                    }
                }
                merged.retain(|(c, _)| !c.is_zero());
                merged
            })
            .collect();
        let mut content = BigInt::zero();
        for (c, _) in int_polys.iter().flatten() {
            content = content.gcd(c);
        }
        if content.is_zero() {
            // Rational cancellation zeroed everything out.
            return Err(Error::ZeroMorphism);
        }
        let flip = int_polys
            .iter()
            .flatten()
            .next()
            .map(|(c, _)| c.is_negative())
            .unwrap_or(false);
        for (c, _) in int_polys.iter_mut().flatten() {
            *c = &*c / &content;
            if flip {
                *c = -std::mem::take(c);
            }
        }
        Ok(PnMorphism {
            degree,
            polys: int_polys,
        })
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_terms(degree: u32, polys: &[&[(i64, &[u32])]]) -> Result<Self> {
        let rat = polys
            .iter()
            .map(|poly| {
                poly.iter()
                    .map(|&(c, e)| (BigRational::from_integer(c.into()), e.to_vec()))
                    .collect()
            })
            .collect();
        Self::new(degree, rat)
    }

    /// The coordinatewise power map (x_0^d, ..., x_N^d) on P^N.
    pub fn power_map(n: usize, d: u32) -> Self {
        let vars = n + 1;
        let polys = (0..vars)
            .map(|i| {
                let mut e = vec![0u32; vars];
                e[i] = d;
                vec![(BigInt::from(1), e)]
            })
            .collect();
        PnMorphism { degree: d, polys }
    }

    /// Ambient dimension N of P^N.
    pub fn ambient_dim(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn polys(&self) -> &[Vec<Term>] {
        &self.polys
    }

    /// Exact evaluation followed by normalization. A common zero of all
    /// coordinate polynomials reports the point as indeterminate.
    pub fn evaluate(&self, p: &ProjPoint) -> Result<ProjPoint> {
        let vars = self.polys.len();
        if p.dim() + 1 != vars {
            return Err(Error::WrongAmbientDim {
                factor: 0,
                expected: vars - 1,
                got: p.dim(),
            });
        }
        let x = p.coords();
        let image: Vec<BigInt> = self
            .polys
            .iter()
            .map(|poly| {
                let mut acc = BigInt::zero();
                for (c, exps) in poly {
                    let mut mon = c.clone();
                    for (xi, &e) in x.iter().zip(exps) {
                        if e > 0 {
                            mon *= Pow::pow(xi, e);
                        }
                    }
                    acc += mon;
                }
                acc
            })
            .collect();
        if image.iter().all(Zero::is_zero) {
            return Err(Error::Indeterminate { point: x.to_vec() });
        }
        normalize(image)
    }

    /// Pullback on the hyperplane class: the 1x1 matrix [d].
    pub fn ns_matrix(&self) -> NsMatrix {
        NsMatrix::from_i64_rows(&[&[i64::from(self.degree)]])
            .expect("1x1 integer matrix is always well formed")
    }
}
