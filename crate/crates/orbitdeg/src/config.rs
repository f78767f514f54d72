//! JSON system descriptions, validated into a `DynamicalSystem` plus run
//! parameters.
//!
//! Exact quantities (matrix entries, form coefficients, point coordinates,
//! beta, divisor coefficients) are decimal or `p/q` strings so nothing is
//! lost to float parsing; tolerances and height budgets are plain numbers.
//! Validation is eager: every matrix is checked square, every point is
//! checked against the surface, and errors carry the offending field path.

use std::fs;
use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::degrees::{self, DynamicalSystem, EigenData, Limits, SystemMaps};
use crate::error::{Error, Result};
use crate::nsr::{self, GeneratorSet, NsMatrix};
use crate::pn::PnMorphism;
use crate::points::{normalize_rationals, DivisorCoeffs, MultiProjPoint, ProjPoint};
use crate::rat::{parse_rational, rational_to_f64};
use crate::wheler::{self, WhelerSurface};

/// The one surface model with exact point involutions wired up.
pub const K3_MODEL: &str = "(1,1)+(2,2)";

/// On-disk schema. Most fields are optional so validation can emit
/// field-path messages instead of serde's; unknown keys are rejected to
/// catch typos early.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub kind: String,
    /// matrix_only: row-major rational matrices, one per generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// k3_wheler: the defining forms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<RawSurface>,
    /// pn_morphisms: coordinate polynomials, one morphism per entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphisms: Option<Vec<RawMorphism>>,
    /// Start points: outer list over points, then factors, then coordinates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen: Option<RawEigen>,
    pub ample_coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<RawLimits>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<RawTolerances>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSurface {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// 3x3, entry [i][j] multiplying x_i y_j.
    pub bilinear: Vec<Vec<String>>,
    /// 6x6 over the degree-two monomial basis on each factor.
    pub biquadratic: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMorphism {
    pub degree: u32,
    /// One coordinate polynomial per entry; terms are (coeff, exponents).
    pub polys: Vec<Vec<RawTerm>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub coeff: String,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEigen {
    pub beta: String,
    pub d_coeffs: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLimits {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digit_cap: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    MatrixOnly,
    K3Wheler,
    PnMorphisms,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::MatrixOnly => "matrix_only",
            SystemKind::K3Wheler => "k3_wheler",
            SystemKind::PnMorphisms => "pn_morphisms",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "matrix_only" => Ok(SystemKind::MatrixOnly),
            "k3_wheler" => Ok(SystemKind::K3Wheler),
            "pn_morphisms" => Ok(SystemKind::PnMorphisms),
            other => Err(Error::config(
                "kind",
                format!("unknown kind {other:?}; expected matrix_only, k3_wheler, or pn_morphisms"),
            )),
        }
    }
}

/// Run-time tolerances and budgets with one default per command that uses
/// them.
#[derive(Clone, Debug)]
pub struct Tolerances {
    /// Canonical-height stage convergence target.
    pub tol: f64,
    /// Epsilon in the (delta + epsilon)^n growth budget.
    pub epsilon: f64,
    /// Relative delta-bracket width treated as converged.
    pub gap_tol: f64,
    /// Height above which a point counts as escaping in preperiodicity runs.
    pub height_cap: f64,
    /// Height budgets B for the counting function.
    pub b_grid: Vec<f64>,
    /// Height budget B for distinct orbit-point counting.
    pub orbit_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol: degrees::DEFAULT_CANONICAL_TOL,
            epsilon: 0.5,
            gap_tol: nsr::DEFAULT_GAP_TOL,
            height_cap: 1e6,
            b_grid: vec![10.0, 100.0, 1e4, 1e6],
            orbit_bound: 1e4,
        }
    }
}

/// A fully validated configuration: the system itself plus everything the
/// command layer needs to run against it.
#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub kind: SystemKind,
    pub system: DynamicalSystem,
    pub points: Vec<MultiProjPoint>,
    pub tolerances: Tolerances,
    /// Hex sha256 of the raw file bytes, echoed in reports.
    pub config_hash: String,
}

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let hash = hex_string(&hasher.finalize());
    let raw: RawConfig = serde_json::from_slice(&bytes)
        .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    validate(raw, hash)
}

/// Validate an in-memory raw config; the hash covers its canonical pretty
/// serialization, matching what `load_config` sees after a round trip.
pub fn from_raw(raw: &RawConfig) -> Result<SystemConfig> {
    let bytes = serde_json::to_vec_pretty(raw)
        .map_err(|e| Error::config("<raw>", e.to_string()))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    validate(raw.clone(), hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

fn parse_at(path: impl Into<String>, s: &str) -> Result<BigRational> {
    parse_rational(s).map_err(|e| match e {
        Error::Config { message, .. } => Error::Config {
            path: path.into(),
            message,
        },
        other => other,
    })
}

fn parse_grid(path: &str, rows: &[Vec<String>], nrows: usize, ncols: usize) -> Result<Vec<Vec<BigRational>>> {
    if rows.len() != nrows {
        return Err(Error::config(
            path,
            format!("expected {nrows} rows, got {}", rows.len()),
        ));
    }
    let mut out = Vec::with_capacity(nrows);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::config(
                format!("{path}[{i}]"),
                format!("expected {ncols} entries, got {}", row.len()),
            ));
        }
        let mut r = Vec::with_capacity(ncols);
        for (j, s) in row.iter().enumerate() {
            r.push(parse_at(format!("{path}[{i}][{j}]"), s)?);
        }
        out.push(r);
    }
    Ok(out)
}

fn parse_point(path: &str, factors: &[Vec<String>]) -> Result<MultiProjPoint> {
    if factors.is_empty() {
        return Err(Error::config(path, "point has no factors"));
    }
    let mut parts: Vec<ProjPoint> = Vec::with_capacity(factors.len());
    for (i, factor) in factors.iter().enumerate() {
        let mut coords = Vec::with_capacity(factor.len());
        for (j, s) in factor.iter().enumerate() {
            coords.push(parse_at(format!("{path}[{i}][{j}]"), s)?);
        }
        let p = normalize_rationals(coords).map_err(|_| {
            Error::config(format!("{path}[{i}]"), "factor is the zero vector")
        })?;
        parts.push(p);
    }
    Ok(MultiProjPoint::new(parts))
}

fn parse_coeffs(path: &str, raw: &[String]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    for (i, s) in raw.iter().enumerate() {
        out.push(rational_to_f64(&parse_at(format!("{path}[{i}]"), s)?));
    }
    Ok(out)
}

fn forbid(
    kind: SystemKind,
    field: &str,
    present: bool,
) -> Result<()> {
    if present {
        return Err(Error::config(
            field,
            format!("not a {} field; remove it", kind.as_str()),
        ));
    }
    Ok(())
}

fn validate(raw: RawConfig, config_hash: String) -> Result<SystemConfig> {
    let kind = SystemKind::parse(&raw.kind)?;

    let limits = {
        let r = raw.limits.clone().unwrap_or_default();
        let d = Limits::default();
        Limits {
            n_max: r.n_max.unwrap_or(d.n_max),
            word_budget: r.word_budget.unwrap_or(d.word_budget),
            digit_cap: r.digit_cap.unwrap_or(d.digit_cap),
        }
    };
    let tolerances = {
        let r = raw.tolerances.clone().unwrap_or_default();
        let d = Tolerances::default();
        Tolerances {
            tol: r.tol.unwrap_or(d.tol),
            epsilon: r.epsilon.unwrap_or(d.epsilon),
            gap_tol: r.gap_tol.unwrap_or(d.gap_tol),
            height_cap: r.height_cap.unwrap_or(d.height_cap),
            b_grid: r.b_grid.unwrap_or(d.b_grid),
            orbit_bound: r.orbit_bound.unwrap_or(d.orbit_bound),
        }
    };
    for (i, b) in tolerances.b_grid.iter().enumerate() {
        if !b.is_finite() || *b <= 1.0 {
            return Err(Error::config(
                format!("tolerances.b_grid[{i}]"),
                "height budgets must be finite and > 1",
            ));
        }
    }

    let (maps, generators) = match kind {
        SystemKind::MatrixOnly => {
            forbid(kind, "surface", raw.surface.is_some())?;
            forbid(kind, "morphisms", raw.morphisms.is_some())?;
            if !raw.points.is_empty() {
                return Err(Error::config(
                    "points",
                    "matrix_only systems have no point action; remove points",
                ));
            }
            let rows = raw.generators.as_ref().ok_or_else(|| {
                Error::config("generators", "matrix_only requires generators")
            })?;
            if rows.is_empty() {
                return Err(Error::config("generators", "at least one generator"));
            }
            let mut mats = Vec::with_capacity(rows.len());
            for (g, m) in rows.iter().enumerate() {
                let n = m.len();
                if n == 0 || m.iter().any(|r| r.len() != n) {
                    return Err(Error::config(
                        format!("generators[{g}]"),
                        format!(
                            "matrix is not square: {n} rows with lengths {:?}",
                            m.iter().map(Vec::len).collect::<Vec<_>>()
                        ),
                    ));
                }
                let grid = parse_grid(&format!("generators[{g}]"), m, n, n)?;
                mats.push(NsMatrix::from_rows(grid)?);
            }
            if let Some(labels) = &raw.labels {
                if labels.len() != mats.len() {
                    return Err(Error::config(
                        "labels",
                        format!("expected {} labels, got {}", mats.len(), labels.len()),
                    ));
                }
            }
            let gens = GeneratorSet::new(mats, raw.labels.clone()).map_err(|e| {
                Error::config("generators", e.to_string())
            })?;
            (SystemMaps::MatrixOnly, gens)
        }
        SystemKind::K3Wheler => {
            forbid(kind, "generators", raw.generators.is_some())?;
            forbid(kind, "morphisms", raw.morphisms.is_some())?;
            let s = raw.surface.as_ref().ok_or_else(|| {
                Error::config("surface", "k3_wheler requires surface")
            })?;
            let model = s.model.as_deref().unwrap_or(K3_MODEL);
            if model != K3_MODEL {
                return Err(Error::config(
                    "surface.model",
                    format!(
                        "only {K3_MODEL:?} has exact point involutions; use matrix_only for other models"
                    ),
                ));
            }
            let bilinear = parse_grid("surface.bilinear", &s.bilinear, 3, 3)?;
            let biquadratic = parse_grid("surface.biquadratic", &s.biquadratic, 6, 6)?;
            let surface = WhelerSurface::new(bilinear, biquadratic).map_err(|e| {
                Error::config("surface", e.to_string())
            })?;
            let gens = wheler::pullback_matrices(model)?;
            (SystemMaps::Wheler(surface), gens)
        }
        SystemKind::PnMorphisms => {
            forbid(kind, "generators", raw.generators.is_some())?;
            forbid(kind, "surface", raw.surface.is_some())?;
            let raw_ms = raw.morphisms.as_ref().ok_or_else(|| {
                Error::config("morphisms", "pn_morphisms requires morphisms")
            })?;
            if raw_ms.is_empty() {
                return Err(Error::config("morphisms", "at least one morphism"));
            }
            let mut ms = Vec::with_capacity(raw_ms.len());
            for (i, rm) in raw_ms.iter().enumerate() {
                let mut polys = Vec::with_capacity(rm.polys.len());
                for (p, terms) in rm.polys.iter().enumerate() {
                    let mut poly = Vec::with_capacity(terms.len());
                    for (t, term) in terms.iter().enumerate() {
                        let c = parse_at(
                            format!("morphisms[{i}].polys[{p}][{t}].coeff"),
                            &term.coeff,
                        )?;
                        poly.push((c, term.exponents.clone()));
                    }
                    polys.push(poly);
                }
                let m = PnMorphism::new(rm.degree, polys).map_err(|e| {
                    Error::config(format!("morphisms[{i}]"), e.to_string())
                })?;
                ms.push(m);
            }
            let n0 = ms[0].ambient_dim();
            for (i, m) in ms.iter().enumerate() {
                if m.ambient_dim() != n0 {
                    return Err(Error::config(
                        format!("morphisms[{i}]"),
                        format!("ambient dimension {} differs from {}", m.ambient_dim(), n0),
                    ));
                }
            }
            let mats: Vec<NsMatrix> = ms.iter().map(|m| m.ns_matrix()).collect();
            let gens = GeneratorSet::new(mats, raw.labels.clone()).map_err(|e| {
                Error::config("labels", e.to_string())
            })?;
            (SystemMaps::Projective(ms), gens)
        }
    };

    let dim = generators.dim();
    let ample_vec = parse_coeffs("ample_coeffs", &raw.ample_coeffs)?;
    if ample_vec.len() != dim {
        return Err(Error::config(
            "ample_coeffs",
            format!("expected {dim} coefficients, got {}", ample_vec.len()),
        ));
    }
    let ample = DivisorCoeffs(ample_vec);
    if !ample.is_ample() {
        return Err(Error::config(
            "ample_coeffs",
            "all coefficients must be positive",
        ));
    }

    let k = generators.k();
    let eigen = match &raw.eigen {
        Some(re) => {
            let beta = rational_to_f64(&parse_at("eigen.beta", &re.beta)?);
            let d_vec = parse_coeffs("eigen.d_coeffs", &re.d_coeffs)?;
            if d_vec.len() != dim {
                return Err(Error::config(
                    "eigen.d_coeffs",
                    format!("expected {dim} coefficients, got {}", d_vec.len()),
                ));
            }
            Some(EigenData {
                beta,
                d_coeffs: DivisorCoeffs(d_vec),
            })
        }
        None => match &maps {
            // Degree-d morphisms pull the hyperplane class back to d times
            // itself, so the sum of pullbacks has the hyperplane class as an
            // eigendivisor with beta = sum of the degrees. Only usable when
            // that sum clears k, i.e. not every map is linear.
            SystemMaps::Projective(ms) => {
                let beta: f64 = ms.iter().map(|m| f64::from(m.degree())).sum();
                if beta > k as f64 {
                    Some(EigenData {
                        beta,
                        d_coeffs: DivisorCoeffs(vec![1.0]),
                    })
                } else {
                    None
                }
            }
            _ => None,
        },
    };

    let mut points = Vec::with_capacity(raw.points.len());
    for (i, factors) in raw.points.iter().enumerate() {
        points.push(parse_point(&format!("points[{i}]"), factors)?);
    }
    match &maps {
        SystemMaps::Wheler(s) => {
            for (i, p) in points.iter().enumerate() {
                p.expect_factors(2).map_err(|_| {
                    Error::config(
                        format!("points[{i}]"),
                        format!("expected 2 factors, got {}", p.factors().len()),
                    )
                })?;
                let on = s.contains(p).map_err(|e| {
                    Error::config(format!("points[{i}]"), e.to_string())
                })?;
                if !on {
                    return Err(Error::config(
                        format!("points[{i}]"),
                        "point does not lie on the surface",
                    ));
                }
            }
        }
        SystemMaps::Projective(ms) => {
            let n = ms[0].ambient_dim();
            for (i, p) in points.iter().enumerate() {
                if p.factors().len() != 1 || p.factor(0).coords().len() != n + 1 {
                    return Err(Error::config(
                        format!("points[{i}]"),
                        format!("expected a single factor with {} coordinates", n + 1),
                    ));
                }
            }
        }
        SystemMaps::MatrixOnly => {}
    }

    let system = DynamicalSystem::new(maps, generators, ample, eigen, limits).map_err(|e| {
        match e {
            Error::BetaNotAboveK { beta, k } => Error::config(
                "eigen.beta",
                format!("beta = {beta} must exceed the family size k = {k}"),
            ),
            other => other,
        }
    })?;

    Ok(SystemConfig {
        kind,
        system,
        points,
        tolerances,
        config_hash,
    })
}
