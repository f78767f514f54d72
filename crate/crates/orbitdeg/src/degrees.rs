//! Orbit levels, arithmetic degree traces, canonical heights, counting
//! functions, and the empirical checks built on them.
//!
//! A dynamical system here is a finite family f_1, ..., f_k of self-maps
//! acting on exact rational points, together with the family's pullback
//! matrices on the Neron-Severi space and an ample weight vector defining
//! the height h_X. Level n of the orbit of P is the multiset of k^n images
//! w(P) over all length-n words w in the maps; heavy word collapse (for
//! involution families almost everything cancels) is handled by storing
//! distinct points with arbitrary-precision multiplicities.
//!
//! The quantities computed from the levels:
//!
//! - alpha trace: alpha_n = (1/k) (sum over level n of h_X^+)^(1/n), the
//!   finite-level stand-in for the arithmetic degree, with limsup/liminf
//!   approximated by the max/min over a short tail window;
//! - canonical height: stage_n = beta^(-n) (sum over level n of h_D) for an
//!   eigendivisor D with sum_i f_i^* D = beta D, iterated until the stage
//!   increments fall under a tolerance;
//! - counting function, orbit point counts, preperiodicity decisions, the
//!   growth bound, and the comparison checks, each mirroring one statement
//!   proved for these systems.
//!
//! Everything is sequential and deterministic: levels are ordered maps, so
//! sums are evaluated in a fixed point order regardless of insertion order.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::nsr::{self, GeneratorSet, Word};
use crate::pn::PnMorphism;
use crate::points::{height_plus, multi_height, DivisorCoeffs, MultiProjPoint};
use crate::wheler::WhelerSurface;

/// Stage-increment tolerance used when an operation needs a canonical
/// height but takes no explicit tolerance.
pub const DEFAULT_CANONICAL_TOL: f64 = 1e-9;

/// Largest coordinate size (decimal digits) an orbit expansion may produce
/// before it refuses to continue.
pub const DEFAULT_DIGIT_CAP: usize = 200_000;

/// How many trailing trace values stand in for the limsup/liminf.
pub const TAIL_WINDOW: usize = 3;

/// Additive slack for the finite-level comparison checks (alpha vs delta,
/// monotonicity under a word).
pub const DEFAULT_CHECK_SLACK: f64 = 0.1;

/// Multiplicative slack allowed between consecutive running maxima in the
/// growth bound check.
pub const DEFAULT_GROWTH_SLACK: f64 = 1.05;

/// Relative slack for the orbit-count lower bound comparison.
pub const DEFAULT_BOUND_SLACK: f64 = 0.1;

/// Word length used when an operation needs a dynamical-degree upper bound
/// internally.
pub const DELTA_SCAN_LEN: usize = 12;

/// Eigendivisor data: a divisor class D (coefficients in the same basis as
/// the ample weights) with sum_i f_i^* D = beta D.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub beta: f64,
    pub d_coeffs: DivisorCoeffs,
}

/// Truncation and budget limits for orbit work.
#[derive(Clone, Debug)]
pub struct Limits {
    pub n_max: usize,
    pub word_budget: u64,
    pub digit_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            n_max: 8,
            word_budget: nsr::DEFAULT_WORD_BUDGET,
            digit_cap: DEFAULT_DIGIT_CAP,
        }
    }
}

/// The point-level action of the family.
#[derive(Clone, Debug)]
pub enum SystemMaps {
    /// Pullback matrices only; operations needing point orbits error out.
    MatrixOnly,
    /// The two fiber involutions of a surface in P^2 x P^2; k = 2.
    Wheler(WhelerSurface),
    /// Morphisms of P^N acting on single-factor points; k = the tuple size.
    Projective(Vec<PnMorphism>),
}

/// A finite family of self-maps with its Neron-Severi data.
#[derive(Clone, Debug)]
pub struct DynamicalSystem {
    maps: SystemMaps,
    generators: GeneratorSet,
    ample: DivisorCoeffs,
    eigen: Option<EigenData>,
    limits: Limits,
}

impl DynamicalSystem {
    pub fn new(
        maps: SystemMaps,
        generators: GeneratorSet,
        ample: DivisorCoeffs,
        eigen: Option<EigenData>,
        limits: Limits,
    ) -> Result<Self> {
        let k = match &maps {
            SystemMaps::MatrixOnly => generators.k(),
            SystemMaps::Wheler(_) => 2,
            SystemMaps::Projective(ms) => ms.len(),
        };
        if generators.k() != k {
            return Err(Error::FactorCount {
                expected: k,
                got: generators.k(),
            });
        }
        ample.validate()?;
        if !ample.is_ample() {
            return Err(Error::NotAmple);
        }
        if ample.0.len() != generators.dim() {
            return Err(Error::CoeffLenMismatch {
                coeffs: ample.0.len(),
                factors: generators.dim(),
            });
        }
        if let Some(e) = &eigen {
            e.d_coeffs.validate()?;
            if e.d_coeffs.0.len() != generators.dim() {
                return Err(Error::CoeffLenMismatch {
                    coeffs: e.d_coeffs.0.len(),
                    factors: generators.dim(),
                });
            }
            if e.beta <= k as f64 {
                return Err(Error::BetaNotAboveK { beta: e.beta, k });
            }
        }
        Ok(DynamicalSystem {
            maps,
            generators,
            ample,
            eigen,
            limits,
        })
    }

    /// Number of maps in the family.
    pub fn k(&self) -> usize {
        match &self.maps {
            SystemMaps::MatrixOnly => self.generators.k(),
            SystemMaps::Wheler(_) => 2,
            SystemMaps::Projective(ms) => ms.len(),
        }
    }

    pub fn maps(&self) -> &SystemMaps {
        &self.maps
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn ample(&self) -> &DivisorCoeffs {
        &self.ample
    }

    pub fn eigen(&self) -> Option<&EigenData> {
        self.eigen.as_ref()
    }

    pub fn require_eigen(&self) -> Result<&EigenData> {
        self.eigen.as_ref().ok_or(Error::EigenDataMissing)
    }

    pub fn set_n_max(&mut self, n_max: usize) {
        self.limits.n_max = n_max;
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn has_point_dynamics(&self) -> bool {
        !matches!(self.maps, SystemMaps::MatrixOnly)
    }

    /// Apply map i (1-based, matching word letters) to a point, exactly.
    pub fn apply(&self, i: usize, p: &MultiProjPoint) -> Result<MultiProjPoint> {
        let k = self.k();
        if i == 0 || i > k {
            return Err(Error::WordIndexOutOfRange { index: i, k });
        }
        match &self.maps {
            SystemMaps::MatrixOnly => Err(Error::NoPointDynamics),
            SystemMaps::Wheler(s) => s.sigma(p, i),
            SystemMaps::Projective(ms) => {
                p.expect_factors(1)?;
                Ok(MultiProjPoint::single(ms[i - 1].evaluate(p.factor(0))?))
            }
        }
    }

    /// Apply the composite map named by a word: letters compose left to
    /// right as functions, so the rightmost letter acts first.
    pub fn apply_word(&self, word: &Word, p: &MultiProjPoint) -> Result<MultiProjPoint> {
        word.validate(self.k())?;
        let mut q = p.clone();
        for &i in word.0.iter().rev() {
            q = self.apply(i, &q)?;
        }
        Ok(q)
    }
}

/// One orbit level: the k^n images of the start point under all length-n
/// words, stored as distinct points with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitLevel {
    pub n: usize,
    pub entries: BTreeMap<MultiProjPoint, BigUint>,
}

impl OrbitLevel {
    /// Level 0: the start point with multiplicity 1.
    pub fn initial(p: MultiProjPoint) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(p, BigUint::one());
        OrbitLevel { n: 0, entries }
    }

    /// Sum of multiplicities; equals k^n for a valid level.
    pub fn multiplicity_total(&self) -> BigUint {
        self.entries.values().sum()
    }

    pub fn distinct_count(&self) -> usize {
        self.entries.len()
    }
}

/// One breadth step: apply every map to every point of the previous level,
/// carrying multiplicities. Point identity is by normalized coordinates, so
/// the result is independent of evaluation order.
pub fn expand_level(sys: &DynamicalSystem, prev: &OrbitLevel) -> Result<OrbitLevel> {
    let n = prev.n + 1;
    let cap = sys.limits().digit_cap;
    let mut entries: BTreeMap<MultiProjPoint, BigUint> = BTreeMap::new();
    for (q, m) in &prev.entries {
        for i in 1..=sys.k() {
            let image = sys.apply(i, q)?;
            let digits = image.max_coord_digits();
            if digits > cap {
                return Err(Error::DigitCapExceeded {
                    digits,
                    cap,
                    level: n,
                });
            }
            *entries.entry(image).or_default() += m;
        }
    }
    Ok(OrbitLevel { n, entries })
}

/// Levels 0..=n_max of the orbit of p.
pub fn orbit_levels(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    n_max: usize,
) -> Result<Vec<OrbitLevel>> {
    let mut levels = Vec::with_capacity(n_max + 1);
    levels.push(OrbitLevel::initial(p.clone()));
    for _ in 0..n_max {
        let next = expand_level(sys, levels.last().expect("nonempty by construction"))?;
        levels.push(next);
    }
    Ok(levels)
}

/// Multiplicity-weighted height sum over one level: sum of m * h (or h^+
/// when `plus`) with h the coeffs-weighted multi-factor height.
pub fn level_height_sum(level: &OrbitLevel, coeffs: &DivisorCoeffs, plus: bool) -> Result<f64> {
    let mut acc = 0.0;
    for (p, m) in &level.entries {
        let mut h = multi_height(p, coeffs)?;
        if plus {
            h = height_plus(h);
        }
        acc += m.to_f64().unwrap_or(f64::INFINITY) * h;
    }
    Ok(acc)
}

/// The finite arithmetic-degree trace alpha_n = (1/k) (sum_n h^+)^(1/n).
#[derive(Clone, Debug)]
pub struct AlphaTrace {
    /// alpha_n for n = 1..=n_max.
    pub values: Vec<f64>,
    /// The plus-height sums the values were taken from, same indexing.
    pub height_sums: Vec<f64>,
}

impl AlphaTrace {
    /// Stand-in for the upper arithmetic degree: max over the last
    /// TAIL_WINDOW trace values.
    pub fn tail_max(&self) -> f64 {
        self.tail().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Stand-in for the lower arithmetic degree.
    pub fn tail_min(&self) -> f64 {
        self.tail().iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn tail(&self) -> &[f64] {
        let start = self.values.len().saturating_sub(TAIL_WINDOW);
        &self.values[start..]
    }
}

/// Trace of alpha_n for n = 1..=n_max over the orbit of p.
///
/// Panics if n_max is 0; the trace starts at level 1.
pub fn alpha_estimate(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    n_max: usize,
) -> Result<AlphaTrace> {
    assert!(n_max >= 1, "alpha trace needs at least one level");
    let k = sys.k() as f64;
    let mut values = Vec::with_capacity(n_max);
    let mut height_sums = Vec::with_capacity(n_max);
    let mut level = OrbitLevel::initial(p.clone());
    for n in 1..=n_max {
        level = expand_level(sys, &level)?;
        let sum = level_height_sum(&level, sys.ample(), true)?;
        height_sums.push(sum);
        values.push(sum.powf(1.0 / n as f64) / k);
    }
    Ok(AlphaTrace {
        values,
        height_sums,
    })
}

#[derive(Clone, Debug)]
pub struct CanonicalHeightResult {
    pub value: f64,
    /// Truncation level the value was taken at.
    pub level: usize,
    /// |stage_level - stage_{level-1}|.
    pub cauchy_residual: f64,
    pub beta: f64,
}

/// stage_n = beta^(-n) * (sum over level n of h_D), the n-th canonical
/// height approximant.
pub fn canonical_height_stage(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    level: usize,
) -> Result<f64> {
    let eigen = sys.require_eigen()?;
    let levels = orbit_levels(sys, p, level)?;
    let sum = level_height_sum(&levels[level], &eigen.d_coeffs, false)?;
    Ok(sum / eigen.beta.powi(level as i32))
}

/// Iterate canonical height stages until the increment falls to `tol` or
/// `n_max` is reached; returns the last stage with its residual.
pub fn canonical_height(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    n_max: usize,
    tol: f64,
) -> Result<CanonicalHeightResult> {
    assert!(n_max >= 1, "canonical height needs at least one level");
    let eigen = sys.require_eigen()?;
    let beta = eigen.beta;
    let d_coeffs = eigen.d_coeffs.clone();
    let mut level = OrbitLevel::initial(p.clone());
    let mut prev_stage = level_height_sum(&level, &d_coeffs, false)?;
    let mut stage = prev_stage;
    let mut residual = f64::INFINITY;
    let mut reached = 0usize;
    for n in 1..=n_max {
        level = expand_level(sys, &level)?;
        stage = level_height_sum(&level, &d_coeffs, false)? / beta.powi(n as i32);
        residual = (stage - prev_stage).abs();
        reached = n;
        if residual <= tol {
            break;
        }
        prev_stage = stage;
    }
    Ok(CanonicalHeightResult {
        value: stage,
        level: reached,
        cauchy_residual: residual,
        beta,
    })
}

/// |sum_i hhat(f_i P) - beta * hhat(P)| with every canonical height
/// truncated at the same level n_max.
pub fn functional_equation_residual(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    n_max: usize,
) -> Result<f64> {
    let eigen = sys.require_eigen()?;
    let beta = eigen.beta;
    let mut lhs = 0.0;
    for i in 1..=sys.k() {
        let image = sys.apply(i, p)?;
        lhs += canonical_height_stage(sys, &image, n_max)?;
    }
    let rhs = beta * canonical_height_stage(sys, p, n_max)?;
    Ok((lhs - rhs).abs())
}

/// Max over the samples of |hhat - h_D| / sqrt(h_X^+): the empirical
/// constant in the quasi-comparison of canonical and naive heights.
pub fn quasi_comparison_check(
    sys: &DynamicalSystem,
    samples: &[MultiProjPoint],
) -> Result<f64> {
    let eigen = sys.require_eigen()?;
    let n_max = sys.limits().n_max;
    let mut worst = 0.0f64;
    for p in samples {
        let hhat = canonical_height(sys, p, n_max, DEFAULT_CANONICAL_TOL)?.value;
        let hd = multi_height(p, &eigen.d_coeffs)?;
        let hx_plus = height_plus(multi_height(p, sys.ample())?);
        worst = worst.max((hhat - hd).abs() / hx_plus.sqrt());
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct CountRow {
    pub bound: f64,
    /// #{ n <= n_max : sum over level n of h_X <= bound }.
    pub count: usize,
    /// (count - 1) / log bound; tends to the reciprocal log growth rate.
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct CountReport {
    pub rows: Vec<CountRow>,
    /// 1 / log(k * alpha_tail), the growth rate the ratios are compared to.
    pub target: f64,
}

/// For each height budget B: how many levels have total height within B.
///
/// The level count c(B) grows like log B / log(k alpha), so c(B)-1 over
/// log B is the finite-B ratio converging to 1/log(k alpha) (the -1 removes
/// the constant level-0 offset, which otherwise dominates at small B).
pub fn counting_function(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    b_grid: &[f64],
) -> Result<CountReport> {
    let n_max = sys.limits().n_max;
    let levels = orbit_levels(sys, p, n_max)?;
    let mut plain_sums = Vec::with_capacity(n_max + 1);
    let mut plus_sums = Vec::with_capacity(n_max + 1);
    for level in &levels {
        plain_sums.push(level_height_sum(level, sys.ample(), false)?);
        plus_sums.push(level_height_sum(level, sys.ample(), true)?);
    }
    // Tail alpha from the same expansion, for the comparison target.
    let k = sys.k() as f64;
    let tail_alpha = (1..=n_max)
        .skip(n_max.saturating_sub(TAIL_WINDOW))
        .map(|n| plus_sums[n].powf(1.0 / n as f64) / k)
        .fold(f64::NEG_INFINITY, f64::max);
    let target = 1.0 / (k * tail_alpha).ln();
    let rows = b_grid
        .iter()
        .map(|&b| {
            let count = plain_sums.iter().filter(|&&s| s <= b).count();
            let ratio = if b > 1.0 {
                count.saturating_sub(1) as f64 / b.ln()
            } else {
                f64::NAN
            };
            CountRow {
                bound: b,
                count,
                ratio,
            }
        })
        .collect();
    Ok(CountReport { rows, target })
}

#[derive(Clone, Debug)]
pub struct OrbitCountReport {
    /// Distinct orbit points with h_X <= bound, discovered up to n_max.
    pub count: usize,
    /// count^(1 / log bound).
    pub exponent_lhs: f64,
    /// k^(1 / log(k * alpha_tail)), the claimed asymptotic lower bound.
    pub exponent_rhs: f64,
    /// lhs >= rhs * (1 - DEFAULT_BOUND_SLACK). An asymptotic claim; finite
    /// truncations of heavily collapsing orbits can genuinely fail it.
    pub satisfied: bool,
}

/// Count distinct orbit points of height at most `bound` seen up to level
/// n_max, and compare the growth exponent against its lower bound.
pub fn orbit_point_count(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    bound: f64,
    n_max: usize,
) -> Result<OrbitCountReport> {
    let levels = orbit_levels(sys, p, n_max)?;
    let mut seen: BTreeMap<&MultiProjPoint, ()> = BTreeMap::new();
    let mut count = 0usize;
    for level in &levels {
        for q in level.entries.keys() {
            if seen.insert(q, ()).is_none() && multi_height(q, sys.ample())? <= bound {
                count += 1;
            }
        }
    }
    let k = sys.k() as f64;
    let tail_alpha = if n_max >= 1 {
        alpha_from_levels(sys, &levels)?
    } else {
        f64::NAN
    };
    let (lhs, rhs) = if bound > 1.0 && count > 0 {
        (
            (count as f64).powf(1.0 / bound.ln()),
            k.powf(1.0 / (k * tail_alpha).ln()),
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(OrbitCountReport {
        count,
        exponent_lhs: lhs,
        exponent_rhs: rhs,
        satisfied: lhs >= rhs * (1.0 - DEFAULT_BOUND_SLACK),
    })
}

/// Tail alpha from already-computed levels.
fn alpha_from_levels(sys: &DynamicalSystem, levels: &[OrbitLevel]) -> Result<f64> {
    let k = sys.k() as f64;
    let n_max = levels.len() - 1;
    let mut best = f64::NEG_INFINITY;
    for n in (1..=n_max).skip(n_max.saturating_sub(TAIL_WINDOW)) {
        let sum = level_height_sum(&levels[n], sys.ample(), true)?;
        best = best.max(sum.powf(1.0 / n as f64) / k);
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preperiodicity {
    Preperiodic,
    NotPreperiodic,
    Inconclusive,
}

impl Preperiodicity {
    pub fn as_str(self) -> &'static str {
        match self {
            Preperiodicity::Preperiodic => "preperiodic",
            Preperiodicity::NotPreperiodic => "not_preperiodic",
            Preperiodicity::Inconclusive => "inconclusive",
        }
    }
}

/// Decide preperiodicity by breadth-first orbit closure, with a canonical
/// height threshold and a height-growth cap as negative certificates.
///
/// "Preperiodic" is sound: it means no level up to n_max produced a point
/// outside the visited set, so the orbit is literally finite.
/// "NotPreperiodic" rests on hhat > 10 * DEFAULT_CANONICAL_TOL (positive
/// canonical height, sound up to numerical error) or on heights strictly
/// climbing past height_cap. Anything else is inconclusive.
pub fn is_preperiodic(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    n_max: usize,
    height_cap: f64,
) -> Result<Preperiodicity> {
    let mut visited: BTreeMap<MultiProjPoint, ()> = BTreeMap::new();
    visited.insert(p.clone(), ());
    let mut level = OrbitLevel::initial(p.clone());
    let mut max_heights = vec![multi_height(p, sys.ample())?];
    let mut closed = false;
    for _ in 1..=n_max {
        level = expand_level(sys, &level)?;
        let mut fresh = false;
        let mut level_max = 0.0f64;
        for q in level.entries.keys() {
            level_max = level_max.max(multi_height(q, sys.ample())?);
            if visited.insert(q.clone(), ()).is_none() {
                fresh = true;
            }
        }
        max_heights.push(level_max);
        if !fresh {
            closed = true;
            break;
        }
    }
    if closed {
        return Ok(Preperiodicity::Preperiodic);
    }
    if sys.eigen().is_some() {
        let hhat = canonical_height(sys, p, n_max, DEFAULT_CANONICAL_TOL)?.value;
        if hhat > 10.0 * DEFAULT_CANONICAL_TOL {
            return Ok(Preperiodicity::NotPreperiodic);
        }
    }
    let climbing = max_heights.windows(2).all(|w| w[1] > w[0]);
    if climbing && max_heights.last().copied().unwrap_or(0.0) > height_cap {
        return Ok(Preperiodicity::NotPreperiodic);
    }
    Ok(Preperiodicity::Inconclusive)
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    /// Max over n of sum_n h^+ / (k^n (delta_upper + eps)^n h^+(P)).
    pub fitted_c: f64,
    /// The per-level ratios, n = 0..=n_max.
    pub ratios: Vec<f64>,
    pub delta_upper: f64,
}

impl GrowthReport {
    /// True when the running maximum of the ratios grows by at most
    /// DEFAULT_GROWTH_SLACK per step from level `from` on; a bounded C
    /// fitted on a prefix then keeps working for the rest.
    pub fn running_max_stable(&self, from: usize) -> bool {
        let mut running = 0.0f64;
        let mut prev = 0.0f64;
        for (n, &r) in self.ratios.iter().enumerate() {
            running = running.max(r);
            if n >= from && n > 0 && running > prev * DEFAULT_GROWTH_SLACK {
                return false;
            }
            prev = running;
        }
        true
    }
}

/// Fit the constant in the height growth bound
/// sum_n h^+ <= C k^n (delta + eps)^n h^+(P), using the certified upper
/// bound for delta.
pub fn growth_bound_check(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    n_max: usize,
    epsilon: f64,
) -> Result<GrowthReport> {
    assert!(epsilon > 0.0, "growth bound needs a positive epsilon");
    let delta_upper = nsr::delta_upper_with_budget(
        sys.generators(),
        DELTA_SCAN_LEN,
        sys.limits().word_budget,
    )?
    .value;
    let k = sys.k() as f64;
    let base = k * (delta_upper + epsilon);
    let h0_plus = height_plus(multi_height(p, sys.ample())?);
    let levels = orbit_levels(sys, p, n_max)?;
    let ratios: Vec<f64> = levels
        .iter()
        .enumerate()
        .map(|(n, level)| {
            Ok(level_height_sum(level, sys.ample(), true)? / (base.powi(n as i32) * h0_plus))
        })
        .collect::<Result<_>>()?;
    let fitted_c = ratios.iter().copied().fold(0.0, f64::max);
    Ok(GrowthReport {
        fitted_c,
        ratios,
        delta_upper,
    })
}

#[derive(Clone, Debug)]
pub struct AlphaDeltaReport {
    pub alpha_tail_max: f64,
    pub delta_upper: f64,
    pub ok: bool,
}

/// Check the upper arithmetic degree against the dynamical degree:
/// tail max of the alpha trace <= delta_upper + slack.
pub fn alpha_leq_delta_check(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    n_max: usize,
) -> Result<AlphaDeltaReport> {
    let trace = alpha_estimate(sys, p, n_max)?;
    let delta_upper = nsr::delta_upper_with_budget(
        sys.generators(),
        DELTA_SCAN_LEN,
        sys.limits().word_budget,
    )?
    .value;
    let alpha_tail_max = trace.tail_max();
    Ok(AlphaDeltaReport {
        alpha_tail_max,
        delta_upper,
        ok: alpha_tail_max <= delta_upper + DEFAULT_CHECK_SLACK,
    })
}

/// |alpha_n_max under the ample weights - alpha_n_max under alt weights|.
/// The trace limit does not depend on the (positive) weights; the finite
/// difference shrinks like 1/n_max.
pub fn height_independence_check(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    n_max: usize,
    alt: &DivisorCoeffs,
) -> Result<f64> {
    assert!(n_max >= 1, "independence check needs at least one level");
    if !alt.is_ample() {
        return Err(Error::NotAmple);
    }
    if alt.0.len() != sys.generators().dim() {
        return Err(Error::CoeffLenMismatch {
            coeffs: alt.0.len(),
            factors: sys.generators().dim(),
        });
    }
    let levels = orbit_levels(sys, p, n_max)?;
    let k = sys.k() as f64;
    let exponent = 1.0 / n_max as f64;
    let last = &levels[n_max];
    let a_main = level_height_sum(last, sys.ample(), true)?.powf(exponent) / k;
    let a_alt = level_height_sum(last, alt, true)?.powf(exponent) / k;
    Ok((a_main - a_alt).abs())
}

#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub alpha_at_point: f64,
    pub alpha_at_image: f64,
    pub ok: bool,
}

/// Check that applying a fixed word does not raise the upper arithmetic
/// degree: tail max at g(P) <= tail max at P + slack.
pub fn orbit_monotonicity_check(
    sys: &DynamicalSystem,
    p: &MultiProjPoint,
    g_word: &Word,
    n_max: usize,
) -> Result<MonotonicityReport> {
    let image = sys.apply_word(g_word, p)?;
    let alpha_at_point = alpha_estimate(sys, p, n_max)?.tail_max();
    let alpha_at_image = alpha_estimate(sys, &image, n_max)?.tail_max();
    Ok(MonotonicityReport {
        alpha_at_point,
        alpha_at_image,
        ok: alpha_at_image <= alpha_at_point + DEFAULT_CHECK_SLACK,
    })
}
