//! Deterministic fixture generation: ready-to-run configs from a seed.
//!
//! Fixed-content kinds (the matrix families and the doubling map) ignore the
//! seed. The `k3` kind draws two seed points and random small form
//! coefficients, then solves two coefficients of each form exactly so the
//! surface passes through both points; degenerate draws (undefined
//! involutions, fixed seeds, oversized solved coefficients) are rejected and
//! redrawn, bounded by a fixed attempt budget.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::config::{self, RawConfig, RawEigen, RawLimits, RawSurface, SystemConfig};
use crate::degrees::orbit_levels;
use crate::error::{Error, Result};
use crate::points::{MultiProjPoint, ProjPoint};
use crate::wheler::MONOMIAL_PAIRS;

/// Attempt budget for the randomized search.
pub const MAX_ATTEMPTS: usize = 1000;

/// Largest absolute value allowed for a solved form coefficient.
const MAX_SOLVED_COEFF: i64 = 10;

/// Orbit depth each seed point must survive for a draw to be accepted.
const PROBE_DEPTH: usize = 3;

pub const FIXTURE_KINDS: [&str; 5] = [
    "k3",
    "matrix_pair_4",
    "matrix_pair_5",
    "matrix_triple",
    "p1_doubling",
];

/// 64-bit linear congruential generator (Knuth's MMIX multiplier). Only the
/// high bits are used; low LCG bits have short periods.
pub struct Lcg {
    state: u64,
}

const LCG_A: u64 = 6364136223846793005;
const LCG_C: u64 = 1442695040888963407;

impl Lcg {
    pub fn new(seed: u64) -> Self {
        let mut rng = Lcg {
            // Spread nearby seeds before the first draw; an unmixed state of
            // 0 or 1 would otherwise make the first few draws near-constant.
            state: seed ^ 0x9e37_79b9_7f4a_7c15,
        };
        rng.step();
        rng
    }

    fn step(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_A).wrapping_add(LCG_C);
        self.state
    }

    /// Uniform over [lo, hi], both inclusive.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + ((self.step() >> 33) % span) as i64
    }

    pub fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        xs[self.int_in(0, xs.len() as i64 - 1) as usize]
    }
}

/// Build the named fixture. Unknown names list the valid kinds in the error.
pub fn make_fixture(kind: &str, seed: u64) -> Result<RawConfig> {
    match kind {
        "k3" => k3_fixture(seed),
        "matrix_pair_4" => Ok(matrix_pair(4)),
        "matrix_pair_5" => Ok(matrix_pair(5)),
        "matrix_triple" => Ok(matrix_triple()),
        "p1_doubling" => Ok(p1_doubling()),
        other => Err(Error::UnknownFixtureKind(format!(
            "{other}; expected one of {}",
            FIXTURE_KINDS.join(", ")
        ))),
    }
}

fn int_grid(rows: &[&[i64]]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect()
}

fn base_config(kind: &str) -> RawConfig {
    RawConfig {
        kind: kind.into(),
        generators: None,
        labels: None,
        surface: None,
        morphisms: None,
        points: Vec::new(),
        eigen: None,
        ample_coeffs: Vec::new(),
        limits: None,
        tolerances: None,
    }
}

/// The two-involution family with pullbacks [[1,off],[0,-1]], [[-1,0],[off,1]].
fn matrix_pair(off: i64) -> RawConfig {
    let mut cfg = base_config("matrix_only");
    cfg.generators = Some(vec![
        int_grid(&[&[1, off], &[0, -1]]),
        int_grid(&[&[-1, 0], &[off, 1]]),
    ]);
    cfg.labels = Some(vec!["sigma1".into(), "sigma2".into()]);
    cfg.ample_coeffs = vec!["1".into(), "1".into()];
    cfg.limits = Some(RawLimits {
        n_max: Some(12),
        ..RawLimits::default()
    });
    cfg
}

/// Three commuting-factor involutions on a rank-3 lattice; each swaps one
/// factor's class sign and feeds 2 copies into the other two.
fn matrix_triple() -> RawConfig {
    let mut cfg = base_config("matrix_only");
    cfg.generators = Some(vec![
        int_grid(&[&[-1, 0, 0], &[2, 1, 0], &[2, 0, 1]]),
        int_grid(&[&[1, 2, 0], &[0, -1, 0], &[0, 2, 1]]),
        int_grid(&[&[1, 0, 2], &[0, 1, 2], &[0, 0, -1]]),
    ]);
    cfg.labels = Some(vec!["sigma1".into(), "sigma2".into(), "sigma3".into()]);
    cfg.ample_coeffs = vec!["1".into(), "1".into(), "1".into()];
    cfg.limits = Some(RawLimits {
        n_max: Some(8),
        ..RawLimits::default()
    });
    cfg
}

/// Two copies of the squaring map on the projective line, started at 2.
/// Every length-n word lands on the same point 2^(2^n) with multiplicity
/// 2^n, so each level sum is 4^n ln 2 exactly and every height-layer
/// quantity has a closed form to test against.
fn p1_doubling() -> RawConfig {
    let squaring = || crate::config::RawMorphism {
        degree: 2,
        polys: vec![
            vec![crate::config::RawTerm {
                coeff: "1".into(),
                exponents: vec![2, 0],
            }],
            vec![crate::config::RawTerm {
                coeff: "1".into(),
                exponents: vec![0, 2],
            }],
        ],
    };
    let mut cfg = base_config("pn_morphisms");
    cfg.morphisms = Some(vec![squaring(), squaring()]);
    cfg.points = vec![vec![vec!["2".into(), "1".into()]]];
    cfg.eigen = Some(RawEigen {
        beta: "4".into(),
        d_coeffs: vec!["1".into()],
    });
    cfg.ample_coeffs = vec!["1".into()];
    cfg.limits = Some(RawLimits {
        n_max: Some(16),
        ..RawLimits::default()
    });
    cfg
}

/// Values of the bilinear monomials x_i y_j at integer coordinates.
fn bilinear_value(b: &[[i64; 3]; 3], x: &[i64; 3], y: &[i64; 3]) -> i64 {
    let mut acc = 0;
    for i in 0..3 {
        for j in 0..3 {
            acc += b[i][j] * x[i] * y[j];
        }
    }
    acc
}

fn quad_monomials(x: &[i64; 3]) -> [i64; 6] {
    let mut s = [0i64; 6];
    for (a, &(p, q)) in MONOMIAL_PAIRS.iter().enumerate() {
        s[a] = x[p] * x[q];
    }
    s
}

fn biquadratic_value(q: &[[i64; 6]; 6], x: &[i64; 3], y: &[i64; 3]) -> i64 {
    let sx = quad_monomials(x);
    let sy = quad_monomials(y);
    let mut acc = 0;
    for a in 0..6 {
        for b in 0..6 {
            acc += q[a][b] * sx[a] * sy[b];
        }
    }
    acc
}

fn grid_strings_3(b: &[[i64; 3]; 3]) -> Vec<Vec<String>> {
    b.iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect()
}

fn grid_strings_6(q: &[[i64; 6]; 6]) -> Vec<Vec<String>> {
    q.iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect()
}

fn point_strings(x: &[i64; 3], y: &[i64; 3]) -> Vec<Vec<String>> {
    vec![
        x.iter().map(|v| v.to_string()).collect(),
        y.iter().map(|v| v.to_string()).collect(),
    ]
}

fn int_point(x: &[i64; 3], y: &[i64; 3]) -> MultiProjPoint {
    let f = |c: &[i64; 3]| {
        ProjPoint::new(c.iter().map(|&v| BigInt::from(v)).collect()).expect("nonzero coords")
    };
    MultiProjPoint::new(vec![f(x), f(y)])
}

/// Draw a surface through two structured seed points.
///
/// Point shapes make the solve triangular over the integers: P1 has leading
/// coordinate 1 on both factors, P2 has x0 = 0 and trailing coordinate 1 on
/// both factors. The monomials x0 y0 and x0^2 y0^2 then vanish at P2 while
/// x2 y2 and x2^2 y2^2 evaluate to 1 there, so the (2,2)-corner coefficient
/// of each form is solved from P2 first and the (0,0)-corner from P1 second,
/// with no denominators appearing.
fn k3_fixture(seed: u64) -> Result<RawConfig> {
    let mut rng = Lcg::new(seed);
    let nonzero = [-2i64, -1, 1, 2];
    // +1 weight on zero keeps the biquadratic form sparse enough that the
    // solved corner coefficients usually land inside MAX_SOLVED_COEFF.
    let sparse = [-1i64, 0, 0, 0, 0, 0, 1];

    for _ in 0..MAX_ATTEMPTS {
        let x1 = [1, rng.pick(&nonzero), rng.pick(&nonzero)];
        let y1 = [1, rng.pick(&nonzero), rng.pick(&nonzero)];
        let x2 = [0, rng.int_in(-2, 2), 1];
        let y2 = [rng.int_in(-2, 2), rng.int_in(-2, 2), 1];

        let mut b = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if (i, j) != (0, 0) && (i, j) != (2, 2) {
                    b[i][j] = rng.int_in(-1, 1);
                }
            }
        }
        b[2][2] = -bilinear_value(&b, &x2, &y2);
        b[0][0] = -bilinear_value(&b, &x1, &y1);
        if b[2][2].abs() > MAX_SOLVED_COEFF || b[0][0].abs() > MAX_SOLVED_COEFF {
            continue;
        }

        let mut q = [[0i64; 6]; 6];
        for a in 0..6 {
            for c in 0..6 {
                if (a, c) != (0, 0) && (a, c) != (5, 5) {
                    q[a][c] = rng.pick(&sparse);
                }
            }
        }
        q[5][5] = -biquadratic_value(&q, &x2, &y2);
        q[0][0] = -biquadratic_value(&q, &x1, &y1);
        if q[5][5].abs() > MAX_SOLVED_COEFF || q[0][0].abs() > MAX_SOLVED_COEFF {
            continue;
        }

        let mut cfg = base_config("k3_wheler");
        cfg.surface = Some(RawSurface {
            model: None,
            bilinear: grid_strings_3(&b),
            biquadratic: grid_strings_6(&q),
        });
        cfg.points = vec![point_strings(&x1, &y1), point_strings(&x2, &y2)];
        cfg.eigen = Some(RawEigen {
            beta: "4".into(),
            d_coeffs: vec!["1".into(), "1".into()],
        });
        cfg.ample_coeffs = vec!["1".into(), "1".into()];
        cfg.limits = Some(RawLimits {
            n_max: Some(8),
            ..RawLimits::default()
        });

        if k3_draw_viable(&cfg, &[int_point(&x1, &y1), int_point(&x2, &y2)]) {
            return Ok(cfg);
        }
    }
    Err(Error::FixtureSearchExhausted(MAX_ATTEMPTS))
}

/// A draw is viable when it validates as a config, neither involution fixes
/// a seed point, and both orbits expand to PROBE_DEPTH without hitting an
/// indeterminate fiber.
fn k3_draw_viable(cfg: &RawConfig, seeds: &[MultiProjPoint]) -> bool {
    let sys_cfg: SystemConfig = match config::from_raw(cfg) {
        Ok(c) => c,
        Err(_) => return false,
    };
    let sys = &sys_cfg.system;
    for p in seeds {
        for i in 1..=2 {
            match sys.apply(i, p) {
                Ok(image) => {
                    if image == *p {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
        if orbit_levels(sys, p, PROBE_DEPTH).is_err() {
            return false;
        }
    }
    true
}

/// Exact rational view of a drawn form entry, for tests that re-evaluate
/// the forms independently of the surface code.
pub fn rational_grid(rows: &[Vec<String>]) -> Result<Vec<Vec<BigRational>>> {
    rows.iter()
        .map(|r| r.iter().map(|s| crate::rat::parse_rational(s)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degrees::level_height_sum;
    use crate::nsr::{word_matrix, NsMatrix, Word};
    use num_traits::ToPrimitive;

    #[test]
    fn lcg_is_deterministic_and_seed_sensitive() {
        let mut a = Lcg::new(7);
        let mut b = Lcg::new(7);
        let run_a: Vec<i64> = (0..32).map(|_| a.int_in(-5, 5)).collect();
        let run_b: Vec<i64> = (0..32).map(|_| b.int_in(-5, 5)).collect();
        assert_eq!(run_a, run_b);
        let mut c = Lcg::new(8);
        let run_c: Vec<i64> = (0..32).map(|_| c.int_in(-5, 5)).collect();
        assert_ne!(run_a, run_c);
        assert!(run_a.iter().all(|v| (-5..=5).contains(v)));
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let err = make_fixture("nope", 0).unwrap_err();
        assert!(matches!(err, Error::UnknownFixtureKind(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn matrix_fixtures_are_involutions() {
        for kind in ["matrix_pair_4", "matrix_pair_5", "matrix_triple"] {
            let cfg = config::from_raw(&make_fixture(kind, 0).unwrap()).unwrap();
            let gens = cfg.system.generators();
            let dim = gens.dim();
            let id = NsMatrix::identity(dim);
            for i in 1..=gens.k() {
                let sq = word_matrix(gens, &Word(vec![i, i])).unwrap();
                assert_eq!(sq, id, "{kind} generator {i} squared");
            }
        }
    }

    #[test]
    fn matrix_pair_fixture_shape() {
        let cfg = config::from_raw(&make_fixture("matrix_pair_4", 99).unwrap()).unwrap();
        assert_eq!(cfg.system.k(), 2);
        assert_eq!(cfg.system.limits().n_max, 12);
        assert!(!cfg.system.has_point_dynamics());
        let triple = config::from_raw(&make_fixture("matrix_triple", 0).unwrap()).unwrap();
        assert_eq!(triple.system.k(), 3);
        assert_eq!(triple.system.generators().dim(), 3);
    }

    #[test]
    fn doubling_fixture_orbit_squares_coordinates() {
        let cfg = config::from_raw(&make_fixture("p1_doubling", 0).unwrap()).unwrap();
        assert_eq!(cfg.system.k(), 2);
        let levels = orbit_levels(&cfg.system, &cfg.points[0], 2).unwrap();
        // Both maps agree, so the level collapses to one point of
        // multiplicity k^n and the sum is 4^n ln 2.
        assert_eq!(levels[2].entries.len(), 1);
        let (p2, mult) = levels[2].entries.iter().next().unwrap();
        assert_eq!(p2.factor(0).coords()[0], BigInt::from(16));
        assert_eq!(p2.factor(0).coords()[1], BigInt::from(1));
        assert_eq!(mult.to_u64().unwrap(), 4);
        let sum = level_height_sum(&levels[2], cfg.system.ample(), true).unwrap();
        let expect = 16.0 * std::f64::consts::LN_2;
        assert!((sum - expect).abs() < 1e-12);
    }

    #[test]
    fn k3_fixture_is_deterministic_per_seed() {
        let a = make_fixture("k3", 3).unwrap();
        let b = make_fixture("k3", 3).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = make_fixture("k3", 4).unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn k3_fixture_validates_with_live_involutions() {
        let raw = make_fixture("k3", 1).unwrap();
        let cfg = config::from_raw(&raw).unwrap();
        assert_eq!(cfg.points.len(), 2);
        for p in &cfg.points {
            for i in 1..=2 {
                let q = cfg.system.apply(i, p).unwrap();
                assert_ne!(q, *p);
                assert_eq!(cfg.system.apply(i, &q).unwrap(), *p);
            }
        }
    }

    #[test]
    fn k3_solved_coefficients_stay_small() {
        for seed in [0u64, 5, 11] {
            let raw = make_fixture("k3", seed).unwrap();
            let surface = raw.surface.as_ref().unwrap();
            for grid in [&surface.bilinear, &surface.biquadratic] {
                for row in grid.iter() {
                    for cell in row {
                        let v: i64 = cell.parse().unwrap();
                        assert!(v.abs() <= MAX_SOLVED_COEFF);
                    }
                }
            }
        }
    }

    /// Dev tool, not a test: grades candidate seeds for the bundled surface
    /// fixture. Run with `cargo test -p orbitdeg --lib scan_k3 -- --ignored
    /// --nocapture` and freeze the best seed into fixtures/. Grading wants
    /// the canonical height moderate (fast stage convergence without the
    /// alpha trace sagging), both orbits alive and mostly collision-free to
    /// level 9, and the divisor-independence spread small.
    #[test]
    #[ignore]
    fn scan_k3_seed_quality() {
        use crate::degrees::{
            alpha_estimate, canonical_height, functional_equation_residual,
            growth_bound_check, height_independence_check, orbit_levels,
            orbit_monotonicity_check,
        };
        use crate::nsr::Word;
        use crate::points::DivisorCoeffs;
        use std::collections::BTreeSet;

        let range = std::env::var("SCAN_RANGE").unwrap_or_else(|_| "0..60".into());
        let (lo, hi) = range.split_once("..").expect("SCAN_RANGE like 0..60");
        for seed in lo.parse::<u64>().unwrap()..hi.parse::<u64>().unwrap() {
            let raw = match make_fixture("k3", seed) {
                Ok(r) => r,
                Err(e) => {
                    println!("seed {seed:3}: no viable draw ({e})");
                    continue;
                }
            };
            let cfg = config::from_raw(&raw).unwrap();
            let sys = &cfg.system;
            let p = &cfg.points[0];
            let grade = || -> Result<String> {
                let mut distinct: BTreeSet<MultiProjPoint> = BTreeSet::new();
                for q in &cfg.points {
                    orbit_levels(sys, q, 9)?;
                    for level in orbit_levels(sys, q, 7)? {
                        distinct.extend(level.entries.keys().cloned());
                    }
                }
                let hhat = canonical_height(sys, p, 8, 1e-9)?;
                let trace = alpha_estimate(sys, p, 8)?;
                let alpha8 = trace.values[7];
                let resid = functional_equation_residual(sys, p, 7)?;
                let indep =
                    height_independence_check(sys, p, 9, &DivisorCoeffs(vec![2.0, 3.0]))?;
                let mono = orbit_monotonicity_check(sys, p, &Word(vec![1]), 8)?;
                let growth = growth_bound_check(sys, p, 8, 0.5)?;
                let ok = (0.7..=1.4).contains(&hhat.value)
                    && (1.9..=2.1).contains(&alpha8)
                    && resid <= 0.04
                    && indep <= 0.185
                    && mono.ok
                    && growth.fitted_c.is_finite()
                    && growth.running_max_stable(3)
                    && distinct.len() >= 24;
                Ok(format!(
                    "{} hhat={:.3} alpha8={:.3} resid={:.4} indep={:.3} mono={}/{:.3}->{:.3} C={:.3} stable={} distinct={}",
                    if ok { "OK " } else { "   " },
                    hhat.value,
                    alpha8,
                    resid,
                    indep,
                    mono.ok,
                    mono.alpha_at_point,
                    mono.alpha_at_image,
                    growth.fitted_c,
                    growth.running_max_stable(3),
                    distinct.len()
                ))
            };
            match grade() {
                Ok(line) => println!("seed {seed:3}: {line}"),
                Err(e) => println!("seed {seed:3}: orbit dies ({e})"),
            }
        }
    }

    #[test]
    fn k3_form_values_vanish_at_both_seeds() {
        let raw = make_fixture("k3", 2).unwrap();
        let surface = raw.surface.as_ref().unwrap();
        let b = rational_grid(&surface.bilinear).unwrap();
        let parse_pt = |fac: &Vec<String>| -> Vec<i64> {
            fac.iter().map(|s| s.parse().unwrap()).collect()
        };
        for pt in &raw.points {
            let x = parse_pt(&pt[0]);
            let y = parse_pt(&pt[1]);
            let mut acc = BigRational::from_integer(0.into());
            for i in 0..3 {
                for j in 0..3 {
                    acc += &b[i][j] * BigRational::from_integer((x[i] * y[j]).into());
                }
            }
            assert!(acc.to_f64().unwrap().abs() == 0.0);
        }
    }
}
