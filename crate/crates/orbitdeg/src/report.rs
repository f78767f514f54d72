//! Command execution and report emission.
//!
//! A run produces a `RunReport`: the command echo, the config hash, and a
//! list of flat key/value records. Three emitters share it: a human table
//! (the only format carrying timings), per-command CSV traces, and JSONL
//! with one record per line. Floats are written with 15 significant digits,
//! which re-parse to the same f64 and re-emit byte-identically, so repeated
//! runs of the same config diff clean.

use std::time::Instant;

use crate::config::SystemConfig;
use crate::degrees::{
    self, alpha_estimate, canonical_height, counting_function, expand_level, is_preperiodic,
    orbit_levels, orbit_point_count, OrbitLevel,
};
use crate::error::{Error, Result};
use crate::nsr::{
    delta_estimate, find_eigendivisor, scan_words, spectral_radius, word_matrix, Word,
};
use crate::points::MultiProjPoint;

pub const COMMANDS: [&str; 8] = [
    "delta",
    "alpha",
    "canheight",
    "count",
    "orbitcount",
    "preperiodic",
    "eigendiv",
    "check",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Jsonl,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
}

/// One emitted record: ordered fields, the first always "quantity".
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub fields: Vec<(&'static str, Value)>,
}

impl Record {
    pub fn new(quantity: &str) -> Record {
        Record {
            fields: vec![("quantity", Value::Str(quantity.to_string()))],
        }
    }

    pub fn int(mut self, key: &'static str, v: i64) -> Self {
        self.fields.push((key, Value::Int(v)));
        self
    }

    pub fn float(mut self, key: &'static str, v: f64) -> Self {
        self.fields.push((key, Value::Float(v)));
        self
    }

    pub fn str(mut self, key: &'static str, v: impl Into<String>) -> Self {
        self.fields.push((key, Value::Str(v.into())));
        self
    }

    pub fn bool(mut self, key: &'static str, v: bool) -> Self {
        self.fields.push((key, Value::Bool(v)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: String,
    pub config_hash: String,
    pub records: Vec<Record>,
    /// Wall-clock duration; emitted only in table format so machine formats
    /// stay byte-stable across runs.
    pub elapsed_ms: f64,
    /// Some(overall) for pass/fail commands, None for pure computations.
    pub passed: Option<bool>,
}

/// 15 significant digits: enough that format -> parse -> format is a fixed
/// point, few enough that the string is stable across platforms.
pub fn fmt_float(v: f64) -> String {
    if !v.is_finite() {
        // Reports never produce these; guard for JSON validity anyway.
        return "null".to_string();
    }
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.14e}")
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn value_json(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(f) => fmt_float(*f),
        Value::Str(s) => format!("\"{}\"", json_escape(s)),
        Value::Bool(b) => b.to_string(),
    }
}

fn value_plain(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(f) => fmt_float(*f),
        Value::Str(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
    }
}

impl RunReport {
    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Table => self.emit_table(),
            Format::Csv => self.emit_csv(),
            Format::Jsonl => self.emit_jsonl(),
        }
    }

    fn emit_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("config: {}\n", self.config_hash));
        for r in &self.records {
            let mut line = String::new();
            for (i, (k, v)) in r.fields.iter().enumerate() {
                if i == 0 {
                    line.push_str(&value_plain(v));
                } else {
                    line.push_str(&format!("  {k}={}", value_plain(v)));
                }
            }
            out.push_str(&line);
            out.push('\n');
        }
        if let Some(p) = self.passed {
            out.push_str(&format!("result: {}\n", if p { "pass" } else { "fail" }));
        }
        out.push_str(&format!("elapsed_ms: {:.3}\n", self.elapsed_ms));
        out
    }

    fn emit_jsonl(&self) -> String {
        let mut out = String::new();
        let header = Record::new("run")
            .str("command", &self.command)
            .str("config", &self.config_hash);
        for r in std::iter::once(&header).chain(self.records.iter()) {
            out.push('{');
            for (i, (k, v)) in r.fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format!("\"{}\":{}", json_escape(k), value_json(v)));
            }
            out.push_str("}\n");
        }
        if let Some(p) = self.passed {
            out.push_str(&format!(
                "{{\"quantity\":\"result\",\"passed\":{p}}}\n"
            ));
        }
        out
    }

    /// Per-command trace columns; commands without a natural per-level trace
    /// fall back to quantity/n/value/detail with blanks for absent fields.
    fn emit_csv(&self) -> String {
        let columns: &[&str] = match self.command.as_str() {
            "alpha" => &["n", "sum_h", "alpha_n"],
            "canheight" => &["n", "stage_n", "residual"],
            "count" => &["b", "count", "ratio"],
            _ => &["quantity", "n", "value", "detail"],
        };
        let mut out = columns.join(",");
        out.push('\n');
        for r in &self.records {
            // A record contributes a row when it carries at least one
            // non-quantity column.
            let hits = columns
                .iter()
                .filter(|c| **c != "quantity" && r.get(c).is_some())
                .count();
            if hits == 0 {
                continue;
            }
            let row: Vec<String> = columns
                .iter()
                .map(|c| r.get(c).map(|v| value_plain(v)).unwrap_or_default())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// CLI overrides folded into the loaded config before dispatch.
pub fn apply_overrides(
    cfg: &mut SystemConfig,
    n_max: Option<usize>,
    epsilon: Option<f64>,
    tol: Option<f64>,
) {
    if let Some(n) = n_max {
        cfg.system.set_n_max(n);
    }
    if let Some(e) = epsilon {
        cfg.tolerances.epsilon = e;
    }
    if let Some(t) = tol {
        cfg.tolerances.tol = t;
    }
}

fn first_point(cfg: &SystemConfig) -> Result<&MultiProjPoint> {
    cfg.points.first().ok_or_else(|| {
        Error::config("points", "this command requires at least one configured point")
    })
}

pub fn run_command(cmd: &str, cfg: &SystemConfig) -> Result<RunReport> {
    let start = Instant::now();
    let (records, passed) = match cmd {
        "delta" => (cmd_delta(cfg)?, None),
        "alpha" => (cmd_alpha(cfg)?, None),
        "canheight" => (cmd_canheight(cfg)?, None),
        "count" => (cmd_count(cfg)?, None),
        "orbitcount" => (cmd_orbitcount(cfg)?, None),
        "preperiodic" => (cmd_preperiodic(cfg)?, None),
        "eigendiv" => (cmd_eigendiv(cfg)?, None),
        "check" => {
            let rows = cmd_check(cfg)?;
            let all = rows
                .iter()
                .all(|r| r.get("passed") != Some(&Value::Bool(false)));
            (rows, Some(all))
        }
        other => return Err(Error::UnknownCommand(other.to_string())),
    };
    Ok(RunReport {
        command: cmd.to_string(),
        config_hash: cfg.config_hash.clone(),
        records,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        passed,
    })
}

fn cmd_delta(cfg: &SystemConfig) -> Result<Vec<Record>> {
    let limits = cfg.system.limits();
    let bracket = delta_estimate(
        cfg.system.generators(),
        limits.n_max,
        cfg.tolerances.gap_tol,
        limits.word_budget,
    )?;
    Ok(vec![Record::new("delta_bracket")
        .float("lower", bracket.lower)
        .float("upper", bracket.upper)
        .str("witness", bracket.witness.to_string())
        .int("upper_length", bracket.upper_length as i64)
        .int("lengths_used", bracket.lengths_used as i64)
        .bool("converged", bracket.converged)
        .bool("truncated", bracket.truncated)])
}

fn cmd_alpha(cfg: &SystemConfig) -> Result<Vec<Record>> {
    let p = first_point(cfg)?;
    let n_max = cfg.system.limits().n_max;
    let trace = alpha_estimate(&cfg.system, p, n_max)?;
    let mut records = Vec::new();
    for (i, (a, s)) in trace.values.iter().zip(&trace.height_sums).enumerate() {
        records.push(
            Record::new("alpha_n")
                .int("n", (i + 1) as i64)
                .float("alpha_n", *a)
                .float("sum_h", *s),
        );
    }
    records.push(Record::new("alpha_tail_max").float("value", trace.tail_max()));
    records.push(Record::new("alpha_tail_min").float("value", trace.tail_min()));
    Ok(records)
}

fn cmd_canheight(cfg: &SystemConfig) -> Result<Vec<Record>> {
    let p = first_point(cfg)?;
    let n_max = cfg.system.limits().n_max;
    let result = canonical_height(&cfg.system, p, n_max, cfg.tolerances.tol)?;
    let eigen = cfg.system.require_eigen()?;
    let mut records = Vec::new();
    let mut level = OrbitLevel::initial(p.clone());
    let mut prev = degrees::level_height_sum(&level, &eigen.d_coeffs, false)?;
    records.push(Record::new("stage_n").int("n", 0).float("stage_n", prev));
    for n in 1..=result.level {
        level = expand_level(&cfg.system, &level)?;
        let stage = degrees::level_height_sum(&level, &eigen.d_coeffs, false)?
            / eigen.beta.powi(n as i32);
        records.push(
            Record::new("stage_n")
                .int("n", n as i64)
                .float("stage_n", stage)
                .float("residual", (stage - prev).abs()),
        );
        prev = stage;
    }
    records.push(
        Record::new("canonical_height")
            .float("value", result.value)
            .int("level", result.level as i64)
            .float("cauchy_residual", result.cauchy_residual)
            .float("beta", result.beta),
    );
    Ok(records)
}

fn cmd_count(cfg: &SystemConfig) -> Result<Vec<Record>> {
    let p = first_point(cfg)?;
    let report = counting_function(&cfg.system, p, &cfg.tolerances.b_grid)?;
    let mut records = Vec::new();
    for row in &report.rows {
        records.push(
            Record::new("count_row")
                .float("b", row.bound)
                .int("count", row.count as i64)
                .float("ratio", row.ratio),
        );
    }
    records.push(Record::new("count_target").float("value", report.target));
    Ok(records)
}

fn cmd_orbitcount(cfg: &SystemConfig) -> Result<Vec<Record>> {
    let p = first_point(cfg)?;
    let n_max = cfg.system.limits().n_max;
    let report = orbit_point_count(&cfg.system, p, cfg.tolerances.orbit_bound, n_max)?;
    Ok(vec![Record::new("orbit_count")
        .int("count", report.count as i64)
        .float("exponent_lhs", report.exponent_lhs)
        .float("exponent_rhs", report.exponent_rhs)
        .bool("satisfied", report.satisfied)])
}

fn cmd_preperiodic(cfg: &SystemConfig) -> Result<Vec<Record>> {
    let p = first_point(cfg)?;
    let n_max = cfg.system.limits().n_max;
    let decision = is_preperiodic(&cfg.system, p, n_max, cfg.tolerances.height_cap)?;
    Ok(vec![
        Record::new("preperiodic").str("value", decision.as_str())
    ])
}

fn cmd_eigendiv(cfg: &SystemConfig) -> Result<Vec<Record>> {
    let n_max = cfg.system.limits().n_max;
    let eig = find_eigendivisor(cfg.system.generators(), n_max)?;
    let mut records = vec![Record::new("eigendivisor")
        .float("beta", eig.beta)
        .bool("condition_ok", eig.condition_ok)];
    for (i, c) in eig.coeffs.iter().enumerate() {
        records.push(
            Record::new("eigendiv_coeff")
                .int("n", i as i64)
                .float("value", *c),
        );
    }
    Ok(records)
}

fn check_row(name: &str, passed: bool, detail: String) -> Record {
    Record::new("check")
        .str("name", name)
        .bool("passed", passed)
        .str("detail", detail)
}

/// The structural invariant suite: properties that hold for every valid
/// system of the given kind, not analytic estimates.
fn cmd_check(cfg: &SystemConfig) -> Result<Vec<Record>> {
    let sys = &cfg.system;
    let gens = sys.generators();
    let limits = sys.limits();
    let mut rows = Vec::new();

    let bracket = delta_estimate(
        gens,
        limits.n_max.clamp(2, 8),
        cfg.tolerances.gap_tol,
        limits.word_budget,
    )?;
    rows.push(check_row(
        "delta_bracket_ordered",
        bracket.lower <= bracket.upper,
        format!(
            "lower={} upper={}",
            fmt_float(bracket.lower),
            fmt_float(bracket.upper)
        ),
    ));

    // Conjugation leaves the exact characteristic polynomial untouched, so
    // rotating a word must not move its spectral radius at all.
    let mut rot_ok = true;
    let mut rot_detail = String::from("all words of length <= 3");
    'rot: for len in 1..=3usize {
        for idx in 0..gens.k().pow(len as u32) {
            let mut digits = Vec::with_capacity(len);
            let mut rem = idx;
            for _ in 0..len {
                digits.push(rem % gens.k() + 1);
                rem /= gens.k();
            }
            let w = Word(digits);
            let r0 = spectral_radius(&word_matrix(gens, &w)?)?;
            let r1 = spectral_radius(&word_matrix(gens, &w.rotated())?)?;
            if r0 != r1 {
                rot_ok = false;
                rot_detail = format!("word {w} rotates {r0} -> {r1}");
                break 'rot;
            }
        }
    }
    rows.push(check_row("rho_cyclic_invariance", rot_ok, rot_detail));

    // ||M(uv)|| <= ||M(u)|| ||M(v)||: the max operator norm per length is
    // submultiplicative.
    let scan = scan_words(gens, limits.n_max.clamp(2, 6), limits.word_budget)?;
    let mut norms = vec![1.0f64];
    for level in &scan.levels {
        debug_assert_eq!(level.length, norms.len());
        norms.push(level.max_norm);
    }
    let mut sub_ok = true;
    let mut sub_detail = String::from("n,m up to scan length");
    'sub: for n in 1..norms.len() {
        for m in 1..norms.len() {
            if n + m >= norms.len() {
                continue;
            }
            if norms[n + m] > norms[n] * norms[m] * (1.0 + 1e-9) {
                sub_ok = false;
                sub_detail = format!("n={n} m={m}");
                break 'sub;
            }
        }
    }
    rows.push(check_row("log_norm_subadditive", sub_ok, sub_detail));

    if sys.has_point_dynamics() {
        for (pi, p) in cfg.points.iter().enumerate() {
            let depth = limits.n_max.min(4);
            let levels_a = orbit_levels(sys, p, depth)?;
            let levels_b = orbit_levels(sys, p, depth)?;
            let deterministic = levels_a
                .iter()
                .zip(&levels_b)
                .all(|(a, b)| a.entries == b.entries);
            rows.push(check_row(
                "expand_deterministic",
                deterministic,
                format!("point {pi} to depth {depth}"),
            ));

            let mut conserve_ok = true;
            let mut conserve_detail = format!("point {pi}: k^n for n <= {depth}");
            for level in &levels_a {
                let expected = num_bigint::BigUint::from(sys.k()).pow(level.n as u32);
                if level.multiplicity_total() != expected {
                    conserve_ok = false;
                    conserve_detail =
                        format!("point {pi} level {} total != k^n", level.n);
                    break;
                }
            }
            rows.push(check_row(
                "multiplicity_conservation",
                conserve_ok,
                conserve_detail,
            ));
        }
    }

    if let degrees::SystemMaps::Wheler(surface) = sys.maps() {
        for (pi, p) in cfg.points.iter().enumerate() {
            rows.push(check_row(
                "point_on_surface",
                surface.contains(p)?,
                format!("point {pi}"),
            ));
            let mut inv_ok = true;
            let mut inv_detail = format!("point {pi}: sigma_i twice is the identity");
            for i in 1..=2usize {
                let once = sys.apply(i, p)?;
                let twice = sys.apply(i, &once)?;
                if twice != *p {
                    inv_ok = false;
                    inv_detail = format!("point {pi}: sigma_{i} fails to involute");
                    break;
                }
            }
            rows.push(check_row("involution_on_points", inv_ok, inv_detail));
        }
    }

    if sys.has_point_dynamics() && sys.eigen().is_some() && !cfg.points.is_empty() {
        let p = &cfg.points[0];
        let n = limits.n_max.min(6).max(2);
        let report = degrees::alpha_leq_delta_check(sys, p, n)?;
        rows.push(check_row(
            "alpha_leq_delta",
            report.ok,
            format!(
                "alpha_tail={} delta_upper={}",
                fmt_float(report.alpha_tail_max),
                fmt_float(report.delta_upper)
            ),
        ));
    }

    Ok(rows)
}
