//! Pullback matrices on Neron-Severi space and dynamical degree brackets.
//!
//! A finite family f_1, ..., f_k of self-maps acts on NS through integer (or
//! rational) pullback matrices A(f_i). The dynamical degree of the family is
//! the growth rate of the word semigroup they generate:
//!
//!   delta = limsup_n ( max over length-n words w of rho(M(w)) )^(1/n)
//!
//! where M(w) is the exact product of the generator matrices along w. Exact
//! rational products keep long words free of rounding drift; eigenvalues and
//! operator norms are evaluated on double-precision views of the exact
//! matrices.
//!
//! Two one-sided bounds sandwich delta for any truncation length L:
//! - lower: max over words of length n <= L of rho(M(w))^(1/n). Every word
//!   witnesses delta from below, so the running max is always valid.
//! - upper: min over n <= L of ( max over words of length n of ||M(w)||_2
//!   )^(1/n). The 2-norm is submultiplicative and every length-(n+m) word
//!   splits into a length-n and a length-m word, so the max-norm sequence is
//!   submultiplicative and each term of the min is >= delta by Fekete's lemma.
//!   No unknown comparison constant enters.
//!
//! Composition convention, pinned once for the whole crate: pullback reverses
//! composition, A(f o g) = A(g) * A(f). A word (i_1, ..., i_n) denotes the map
//! f_{i_1} o ... o f_{i_n}, so its matrix is A(f_{i_n}) * ... * A(f_{i_1});
//! extending a word on the right left-multiplies by the new generator matrix.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::rational_to_f64;

/// Default cap on exact matrix multiplications in one word scan.
pub const DEFAULT_WORD_BUDGET: u64 = 2_000_000;

/// Default relative gap under which a delta bracket counts as converged.
pub const DEFAULT_GAP_TOL: f64 = 0.1;

/// Square matrix with exact rational entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsMatrix {
    dim: usize,
    entries: Vec<BigRational>,
}

impl NsMatrix {
    pub fn new(dim: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::NotSquare {
                rows: dim,
                cols: if dim == 0 { 0 } else { entries.len() / dim },
            });
        }
        Ok(NsMatrix { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = rows.len();
        for r in &rows {
            if r.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: r.len(),
                });
            }
        }
        Ok(NsMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| BigRational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigRational::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigRational::one();
        }
        NsMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    /// Exact product self * rhs.
    pub fn mul(&self, rhs: &NsMatrix) -> NsMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for l in 0..n {
                    acc += self.entry(i, l) * rhs.entry(l, j);
                }
                entries.push(acc);
            }
        }
        NsMatrix { dim: n, entries }
    }

    /// Exact sum self + rhs.
    pub fn add(&self, rhs: &NsMatrix) -> NsMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        NsMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Double-precision view: each rational entry rounded to nearest f64.
    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.dim, self.dim, self.entries.iter().map(rational_to_f64))
    }
}

/// Ordered family of pullback matrices of equal dimension, 1-indexed by the
/// word alphabet.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    matrices: Vec<NsMatrix>,
    labels: Vec<String>,
}

impl GeneratorSet {
    pub fn new(matrices: Vec<NsMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::EmptyGeneratorSet);
        }
        let dim = matrices[0].dim();
        for (i, m) in matrices.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimMismatch {
                    index: i,
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        let labels = labels.unwrap_or_else(|| {
            (1..=matrices.len()).map(|i| format!("f{i}")).collect()
        });
        Ok(GeneratorSet { matrices, labels })
    }

    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn matrices(&self) -> &[NsMatrix] {
        &self.matrices
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Generator for 1-based word index i.
    pub fn matrix(&self, i: usize) -> &NsMatrix {
        &self.matrices[i - 1]
    }
}

/// A word over the generator alphabet; indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        for &i in &self.0 {
            if i == 0 || i > k {
                return Err(Error::WordIndexOutOfRange { index: i, k });
            }
        }
        Ok(())
    }

    /// Rotate left by one: (i_1, i_2, ..., i_n) -> (i_2, ..., i_n, i_1).
    pub fn rotated(&self) -> Word {
        if self.0.len() <= 1 {
            return self.clone();
        }
        let mut v = self.0[1..].to_vec();
        v.push(self.0[0]);
        Word(v)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{idx}")?;
        }
        write!(f, ")")
    }
}

/// Exact matrix of a word: A(f_{i_n}) * ... * A(f_{i_1}). The empty word maps
/// to the identity.
pub fn word_matrix(gens: &GeneratorSet, word: &Word) -> Result<NsMatrix> {
    word.validate(gens.k())?;
    let mut m = NsMatrix::identity(gens.dim());
    for &i in &word.0 {
        m = gens.matrix(i).mul(&m);
    }
    Ok(m)
}

/// Exact monic characteristic polynomial by Faddeev-LeVerrier: returns
/// [c_1, ..., c_n] with char(l) = l^n + c_1 l^(n-1) + ... + c_n.
///
/// Computing the polynomial exactly (rather than Schur-factoring the matrix)
/// makes quantities that only depend on the polynomial structurally robust:
/// cyclically rotated words share one characteristic polynomial, so their
/// spectral radii agree bit for bit, including at defective (parabolic)
/// eigenvalues where double-precision eigensolvers lose half their digits.
pub fn char_poly(m: &NsMatrix) -> Vec<BigRational> {
    let n = m.dim();
    let trace = |a: &NsMatrix| -> BigRational {
        (0..a.dim()).map(|i| a.entry(i, i).clone()).sum()
    };
    let mut coeffs = Vec::with_capacity(n);
    let mut aux = m.clone();
    let mut c = -trace(&aux);
    coeffs.push(c.clone());
    for k in 2..=n {
        // aux <- A (aux + c I)
        let mut shifted = aux;
        for i in 0..n {
            let e = shifted.entry(i, i).clone() + &c;
            shifted.entries[i * n + i] = e;
        }
        aux = m.mul(&shifted);
        c = -trace(&aux) / BigRational::from_integer(k.into());
        coeffs.push(c.clone());
    }
    coeffs
}

/// All complex roots of a monic polynomial with the given lower-order
/// coefficients [c_1, ..., c_n], via Schur on the companion matrix.
fn companion_roots(coeffs: &[f64]) -> Result<Vec<nalgebra::Complex<f64>>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        // Last column holds -c_n, -c_{n-1}, ..., -c_1 from top to bottom.
        comp[(i, n - 1)] = -coeffs[n - 1 - i];
    }
    complex_eigenvalues(&comp)
}

/// Spectral radius: max |root| of the exact characteristic polynomial,
/// evaluated in double precision.
pub fn spectral_radius(m: &NsMatrix) -> Result<f64> {
    let coeffs: Vec<f64> = char_poly(m).iter().map(rational_to_f64).collect();
    let roots = companion_roots(&coeffs)?;
    Ok(roots.iter().map(|l| l.norm()).fold(0.0, f64::max))
}

pub(crate) fn complex_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<nalgebra::Complex<f64>>> {
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or_else(|| solver_error(m))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Operator 2-norm (largest singular value) of the double-precision view.
pub fn operator_norm(m: &NsMatrix) -> Result<f64> {
    operator_norm_f64(&m.to_f64())
}

pub(crate) fn operator_norm_f64(m: &DMatrix<f64>) -> Result<f64> {
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 100_000)
        .ok_or_else(|| solver_error(m))?;
    Ok(svd.singular_values.iter().copied().fold(0.0, f64::max))
}

fn solver_error(m: &DMatrix<f64>) -> Error {
    Error::EigenSolver {
        dim: m.nrows(),
        entries: m.iter().copied().collect(),
    }
}

/// Per-length maxima collected by a word scan.
#[derive(Clone, Debug)]
pub struct LevelStats {
    /// Word length this row describes.
    pub length: usize,
    /// Max spectral radius over all words of this length.
    pub max_rho: f64,
    /// First word (in generation order) attaining `max_rho`.
    pub max_rho_word: Word,
    /// Max operator 2-norm over all words of this length.
    pub max_norm: f64,
}

/// Full record of a breadth-first word scan.
#[derive(Clone, Debug)]
pub struct WordScan {
    pub levels: Vec<LevelStats>,
    /// True when the multiplication budget stopped the scan before max_len.
    pub truncated: bool,
    /// Exact matrix multiplications spent.
    pub multiplications: u64,
}

impl WordScan {
    pub fn lengths_used(&self) -> usize {
        self.levels.len()
    }
}

/// Enumerate every word of length 1..=max_len in breadth-first lexicographic
/// order, computing exact products level by level (one multiplication per
/// extension). A level is only entered if the budget covers it completely, so
/// reported levels are always exhaustive.
pub fn scan_words(gens: &GeneratorSet, max_len: usize, budget: u64) -> Result<WordScan> {
    let k = gens.k();
    let mut levels = Vec::new();
    let mut multiplications: u64 = 0;
    let mut truncated = false;

    // Level 1 is the generators themselves; no multiplications spent.
    let mut frontier: Vec<(Word, NsMatrix)> = (1..=k)
        .map(|i| (Word(vec![i]), gens.matrix(i).clone()))
        .collect();

    for length in 1..=max_len {
        if length > 1 {
            let needed = frontier.len() as u64 * k as u64;
            if multiplications + needed > budget {
                truncated = true;
                break;
            }
            let mut next = Vec::with_capacity(frontier.len() * k);
            for (word, matrix) in &frontier {
                for i in 1..=k {
                    let mut w = word.0.clone();
                    w.push(i);
                    next.push((Word(w), gens.matrix(i).mul(matrix)));
                }
            }
            multiplications += needed;
            frontier = next;
        }

        let mut stats: Option<LevelStats> = None;
        for (word, matrix) in &frontier {
            let rho = spectral_radius(matrix)?;
            let norm = operator_norm_f64(&matrix.to_f64())?;
            match &mut stats {
                None => {
                    stats = Some(LevelStats {
                        length,
                        max_rho: rho,
                        max_rho_word: word.clone(),
                        max_norm: norm,
                    });
                }
                Some(s) => {
                    if rho > s.max_rho {
                        s.max_rho = rho;
                        s.max_rho_word = word.clone();
                    }
                    if norm > s.max_norm {
                        s.max_norm = norm;
                    }
                }
            }
        }
        levels.push(stats.expect("frontier is nonempty"));
    }

    Ok(WordScan {
        levels,
        truncated,
        multiplications,
    })
}

/// Lower bound on delta with its witness word.
#[derive(Clone, Debug)]
pub struct LowerBound {
    pub value: f64,
    pub witness: Word,
    pub lengths_used: usize,
    pub truncated: bool,
}

/// Upper bound on delta and the length attaining the min.
#[derive(Clone, Debug)]
pub struct UpperBound {
    pub value: f64,
    pub best_length: usize,
    pub lengths_used: usize,
    pub truncated: bool,
}

/// Two-sided bracket around delta.
#[derive(Clone, Debug)]
pub struct DeltaBracket {
    pub lower: f64,
    pub witness: Word,
    pub upper: f64,
    pub upper_length: usize,
    pub lengths_used: usize,
    pub converged: bool,
    pub truncated: bool,
}

fn lower_from_scan(scan: &WordScan) -> LowerBound {
    let mut best = f64::NEG_INFINITY;
    let mut witness = Word(vec![]);
    for s in &scan.levels {
        let v = s.max_rho.powf(1.0 / s.length as f64);
        if v > best {
            best = v;
            witness = s.max_rho_word.clone();
        }
    }
    LowerBound {
        value: best,
        witness,
        lengths_used: scan.lengths_used(),
        truncated: scan.truncated,
    }
}

fn upper_from_scan(scan: &WordScan) -> UpperBound {
    let mut best = f64::INFINITY;
    let mut best_length = 0;
    for s in &scan.levels {
        let v = s.max_norm.powf(1.0 / s.length as f64);
        if v < best {
            best = v;
            best_length = s.length;
        }
    }
    UpperBound {
        value: best,
        best_length,
        lengths_used: scan.lengths_used(),
        truncated: scan.truncated,
    }
}

/// max over words of length <= max_len of rho(M(w))^(1/|w|), with one witness.
pub fn delta_lower(gens: &GeneratorSet, max_len: usize) -> Result<LowerBound> {
    delta_lower_with_budget(gens, max_len, DEFAULT_WORD_BUDGET)
}

pub fn delta_lower_with_budget(gens: &GeneratorSet, max_len: usize, budget: u64) -> Result<LowerBound> {
    Ok(lower_from_scan(&scan_words(gens, max_len, budget)?))
}

/// min over n <= max_len of (max operator 2-norm over length-n words)^(1/n);
/// a certified upper bound for delta at every truncation.
pub fn delta_upper(gens: &GeneratorSet, max_len: usize) -> Result<UpperBound> {
    delta_upper_with_budget(gens, max_len, DEFAULT_WORD_BUDGET)
}

pub fn delta_upper_with_budget(gens: &GeneratorSet, max_len: usize, budget: u64) -> Result<UpperBound> {
    Ok(upper_from_scan(&scan_words(gens, max_len, budget)?))
}

/// Both bounds from a single scan. `converged` when the relative gap
/// (upper - lower) / lower is at most `gap_tol`.
pub fn delta_estimate(gens: &GeneratorSet, max_len: usize, gap_tol: f64, budget: u64) -> Result<DeltaBracket> {
    let scan = scan_words(gens, max_len, budget)?;
    let lower = lower_from_scan(&scan);
    let upper = upper_from_scan(&scan);
    let converged = lower.value > 0.0 && (upper.value - lower.value) <= gap_tol * lower.value;
    Ok(DeltaBracket {
        lower: lower.value,
        witness: lower.witness,
        upper: upper.value,
        upper_length: upper.best_length,
        lengths_used: scan.lengths_used(),
        converged,
        truncated: scan.truncated,
    })
}

/// Exact sum of all generator matrices; the pullback of the family acting on
/// a single divisor class.
pub fn sum_pullback(gens: &GeneratorSet) -> NsMatrix {
    let mut acc = gens.matrices()[0].clone();
    for m in &gens.matrices()[1..] {
        acc = acc.add(m);
    }
    acc
}

/// Perron data of the summed pullback: beta is its spectral radius, coeffs a
/// real eigenvector for a real nonnegative eigenvalue of maximal modulus,
/// scaled so the largest-magnitude entry is +1.
#[derive(Clone, Debug)]
pub struct Eigendivisor {
    pub beta: f64,
    pub coeffs: Vec<f64>,
    /// beta > k * sqrt(delta_lower), the hypothesis under which the canonical
    /// height limit exists.
    pub condition_ok: bool,
}

/// Compute the eigendivisor of a generator family. `delta_len` is the word
/// length at which the condition check evaluates delta_lower.
pub fn find_eigendivisor(gens: &GeneratorSet, delta_len: usize) -> Result<Eigendivisor> {
    let sum = sum_pullback(gens);
    let view = sum.to_f64();
    let coeffs_f64: Vec<f64> = char_poly(&sum).iter().map(rational_to_f64).collect();
    let eigs = companion_roots(&coeffs_f64)?;
    let rho = eigs.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let scale = rho.max(1.0);

    // Among eigenvalues of maximal modulus, demand a real nonnegative one.
    let mut beta = None;
    for l in &eigs {
        if l.norm() >= rho - 1e-9 * scale && l.im.abs() <= 1e-9 * scale && l.re >= -1e-9 * scale {
            beta = Some(l.re.max(0.0));
            break;
        }
    }
    let beta = beta.ok_or_else(|| Error::NoRealDominantEigenvalue {
        candidates: eigs.iter().map(|l| (l.re, l.im)).collect(),
    })?;

    // Eigenvector from the null space of (A - beta I), via the right singular
    // vector for the smallest singular value.
    let dim = sum.dim();
    let shifted = &view - DMatrix::identity(dim, dim) * beta;
    let svd = shifted
        .clone()
        .try_svd(false, true, f64::EPSILON, 100_000)
        .ok_or_else(|| solver_error(&shifted))?;
    let (mut min_idx, mut min_sv) = (0usize, f64::INFINITY);
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < min_sv {
            min_sv = *s;
            min_idx = i;
        }
    }
    if min_sv > 1e-6 * scale {
        return Err(Error::DefectiveDominantEigenvalue { lambda: beta });
    }
    let v_t = svd.v_t.expect("requested V^T");
    let v: Vec<f64> = v_t.row(min_idx).iter().copied().collect();

    // Scale so the largest-magnitude entry is exactly +1.
    let (mut pivot_idx, mut pivot_abs) = (0usize, 0.0f64);
    for (i, x) in v.iter().enumerate() {
        if x.abs() > pivot_abs + 1e-15 {
            pivot_abs = x.abs();
            pivot_idx = i;
        }
    }
    let pivot = v[pivot_idx];
    let coeffs: Vec<f64> = v.iter().map(|x| x / pivot).collect();

    let lower = delta_lower(gens, delta_len)?;
    let condition_ok = beta > gens.k() as f64 * lower.value.max(0.0).sqrt();

    Ok(Eigendivisor {
        beta,
        coeffs,
        condition_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens_2x2(mats: &[[[i64; 2]; 2]]) -> GeneratorSet {
        let matrices = mats
            .iter()
            .map(|m| NsMatrix::from_i64_rows(&[&m[0], &m[1]]).unwrap())
            .collect();
        GeneratorSet::new(matrices, None).unwrap()
    }

    /// Involution pullbacks of the quartic surface family in P^2 x P^2 with a
    /// (1,1) and a (2,2) form; NS rank 2.
    fn wheler_11_22() -> GeneratorSet {
        gens_2x2(&[[[1, 4], [0, -1]], [[-1, 0], [4, 1]]])
    }

    /// Same construction with (1,2) and (2,1) forms; off-diagonal 5s.
    fn wheler_12_21() -> GeneratorSet {
        gens_2x2(&[[[1, 5], [0, -1]], [[-1, 0], [5, 1]]])
    }

    /// Three involutions on a (2,2,2) hypersurface in P^1 x P^1 x P^1:
    /// sigma_i sends L_i to -L_i + 2 L_j + 2 L_k and fixes the other two
    /// classes. Columns are images of basis classes.
    fn triple_cover_gens() -> GeneratorSet {
        let m1 = NsMatrix::from_i64_rows(&[&[-1, 0, 0], &[2, 1, 0], &[2, 0, 1]]).unwrap();
        let m2 = NsMatrix::from_i64_rows(&[&[1, 2, 0], &[0, -1, 0], &[0, 2, 1]]).unwrap();
        let m3 = NsMatrix::from_i64_rows(&[&[1, 0, 2], &[0, 1, 2], &[0, 0, -1]]).unwrap();
        GeneratorSet::new(vec![m1, m2, m3], None).unwrap()
    }

    #[test]
    fn empty_word_is_identity() {
        let g = wheler_11_22();
        let m = word_matrix(&g, &Word(vec![])).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn word_matrix_reverses_products() {
        let g = wheler_11_22();
        // (1,2) denotes f1 o f2, whose pullback is A(f2) * A(f1).
        let m12 = word_matrix(&g, &Word(vec![1, 2])).unwrap();
        let expect = g.matrix(2).mul(g.matrix(1));
        assert_eq!(m12, expect);
        let rows: Vec<i64> = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(i, j)| {
                assert!(m12.entry(i, j).is_integer());
                m12.entry(i, j).numer().try_into().unwrap()
            })
            .collect();
        assert_eq!(rows, [-1, -4, 4, 15]);
    }

    #[test]
    fn length_three_words_match_hand_products() {
        let g = wheler_11_22();
        let m121 = word_matrix(&g, &Word(vec![1, 2, 1])).unwrap();
        assert_eq!(
            m121,
            NsMatrix::from_i64_rows(&[&[15, 56], &[-4, -15]]).unwrap()
        );
        let m212 = word_matrix(&g, &Word(vec![2, 1, 2])).unwrap();
        assert_eq!(
            m212,
            NsMatrix::from_i64_rows(&[&[-15, -4], &[56, 15]]).unwrap()
        );
    }

    #[test]
    fn concatenation_is_reversed_multiplication() {
        let g = triple_cover_gens();
        let w1 = Word(vec![1, 3, 2]);
        let w2 = Word(vec![2, 1]);
        let mut cat = w1.0.clone();
        cat.extend(&w2.0);
        let lhs = word_matrix(&g, &Word(cat)).unwrap();
        let rhs = word_matrix(&g, &w2)
            .unwrap()
            .mul(&word_matrix(&g, &w1).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn word_index_validation() {
        let g = wheler_11_22();
        assert!(word_matrix(&g, &Word(vec![0])).is_err());
        assert!(word_matrix(&g, &Word(vec![3])).is_err());
    }

    #[test]
    fn spectral_radius_of_pinned_matrices() {
        // Pullback of the length-2 composite on the rank-2 family.
        let m = NsMatrix::from_i64_rows(&[&[-1, -4], &[4, 15]]).unwrap();
        let expect = 7.0 + 4.0 * 3f64.sqrt();
        assert!((spectral_radius(&m).unwrap() - expect).abs() < 1e-9);

        // Involutions have spectral radius 1.
        let g = wheler_11_22();
        for i in 1..=2 {
            assert!((spectral_radius(g.matrix(i)).unwrap() - 1.0).abs() < 1e-9);
        }
        let m = NsMatrix::from_i64_rows(&[&[15, 56], &[-4, -15]]).unwrap();
        assert!((spectral_radius(&m).unwrap() - 1.0).abs() < 1e-9);

        // 3x3 composite with characteristic polynomial (x-1)(x^2-18x-7*... ):
        // dominant root 9 + 2 sqrt(22).
        let m = NsMatrix::from_i64_rows(&[&[1, -2, -2], &[2, 3, 10], &[2, 6, 15]]).unwrap();
        let expect = 9.0 + 2.0 * 22f64.sqrt();
        assert!((spectral_radius(&m).unwrap() - expect).abs() < 1e-9);
        assert!((spectral_radius(&m).unwrap() - 18.3808).abs() < 2e-3);
    }

    #[test]
    fn operator_norm_dominates_spectral_radius() {
        let m = NsMatrix::from_i64_rows(&[&[-1, -4], &[4, 15]]).unwrap();
        let rho = spectral_radius(&m).unwrap();
        let norm = operator_norm(&m).unwrap();
        assert!(norm >= rho - 1e-12);
        // ||M||_2^2 is the largest eigenvalue of M^T M = [[17,64],[64,241]],
        // which has trace 258 and determinant det(M)^2 = 1.
        let expect = ((258.0 + (258.0f64 * 258.0 - 4.0).sqrt()) / 2.0).sqrt();
        assert!((norm - expect).abs() < 1e-9);
    }

    #[test]
    fn delta_lower_finds_the_alternating_word() {
        let g = wheler_11_22();
        let lower = delta_lower(&g, 2).unwrap();
        let expect = 2.0 + 3f64.sqrt();
        assert!((lower.value - expect).abs() < 1e-9);
        assert!(
            lower.witness == Word(vec![1, 2]) || lower.witness == Word(vec![2, 1]),
            "witness {:?}",
            lower.witness
        );
        assert!(!lower.truncated);

        // Longer scans cannot beat the true degree here.
        let deeper = delta_lower(&g, 8).unwrap();
        assert!((deeper.value - expect).abs() < 1e-9);
    }

    #[test]
    fn delta_lower_on_the_off_diagonal_five_family() {
        let g = wheler_12_21();
        let lower = delta_lower(&g, 2).unwrap();
        let expect_sq = (23.0 + 5.0 * 21f64.sqrt()) / 2.0;
        assert!((lower.value * lower.value - expect_sq).abs() < 1e-6);
    }

    #[test]
    fn bracket_orders_and_tightens() {
        let g = wheler_11_22();
        let bracket = delta_estimate(&g, 12, DEFAULT_GAP_TOL, DEFAULT_WORD_BUDGET).unwrap();
        let expect = 2.0 + 3f64.sqrt();
        assert!(bracket.lower <= bracket.upper + 1e-9);
        assert!((bracket.lower - expect).abs() < 1e-9);
        assert!(bracket.upper >= expect - 1e-9);
        assert!(bracket.upper <= 1.1 * bracket.lower, "upper {}", bracket.upper);
        assert!(bracket.converged);
        assert!(!bracket.truncated);
    }

    #[test]
    fn commuting_diagonal_family_collapses_the_bracket() {
        let g = gens_2x2(&[[[2, 0], [0, 1]], [[1, 0], [0, 3]]]);
        let bracket = delta_estimate(&g, 6, DEFAULT_GAP_TOL, DEFAULT_WORD_BUDGET).unwrap();
        assert!((bracket.lower - 3.0).abs() < 1e-9);
        assert!((bracket.upper - 3.0).abs() < 1e-9);
        assert!(bracket.converged);
    }

    #[test]
    fn single_generator_reduces_to_plain_spectral_radius() {
        let g = gens_2x2(&[[[2, 1], [1, 1]]]);
        let rho = spectral_radius(g.matrix(1)).unwrap();
        let lower = delta_lower(&g, 5).unwrap();
        // Powers of one matrix: every length gives rho(M^n)^(1/n) = rho(M).
        assert!((lower.value - rho).abs() < 1e-9);
    }

    #[test]
    fn triple_cover_family_length_three_witness() {
        let g = triple_cover_gens();
        // All length-1 and length-2 words are parabolic or elliptic (rho 1);
        // the first expansion shows up at length 3 with rho = 9 + 4 sqrt(5).
        let lower = delta_lower(&g, 3).unwrap();
        let expect = (9.0 + 4.0 * 5f64.sqrt()).powf(1.0 / 3.0);
        assert!((lower.value - expect).abs() < 1e-9, "got {}", lower.value);

        let upper = delta_upper(&g, 9).unwrap();
        assert!(upper.value >= lower.value - 1e-9);
        // The bracket also clears the dominant-root value quoted for the
        // length-3 composite in the source family.
        assert!(upper.value >= 18.3808f64.powf(1.0 / 3.0) - 1e-6);
    }

    #[test]
    fn budget_truncates_cleanly() {
        let g = wheler_11_22();
        // Levels 2 and 3 need 4 + 8 multiplications; a budget of 10 stops
        // before level 3.
        let scan = scan_words(&g, 3, 10).unwrap();
        assert!(scan.truncated);
        assert_eq!(scan.lengths_used(), 2);
        let lower = delta_lower_with_budget(&g, 3, 10).unwrap();
        assert!(lower.truncated);
        assert_eq!(lower.lengths_used, 2);
        assert!((lower.value - (2.0 + 3f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn log_norm_sequence_is_subadditive() {
        for g in [wheler_11_22(), triple_cover_gens()] {
            let scan = scan_words(&g, 6, DEFAULT_WORD_BUDGET).unwrap();
            let a: Vec<f64> = scan.levels.iter().map(|s| s.max_norm.ln()).collect();
            for n in 1..=a.len() {
                for m in 1..=a.len() {
                    if n + m <= a.len() {
                        assert!(
                            a[n + m - 1] <= a[n - 1] + a[m - 1] + 1e-9,
                            "subadditivity failed at ({n},{m})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cyclic_rotation_preserves_spectral_radius() {
        for g in [wheler_11_22(), triple_cover_gens()] {
            let k = g.k();
            let mut words: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..5 {
                words = words
                    .iter()
                    .flat_map(|w| {
                        (1..=k).map(move |i| {
                            let mut v = w.clone();
                            v.push(i);
                            v
                        })
                    })
                    .collect();
                for w in &words {
                    let w = Word(w.clone());
                    let rho = spectral_radius(&word_matrix(&g, &w).unwrap()).unwrap();
                    let rho_rot =
                        spectral_radius(&word_matrix(&g, &w.rotated()).unwrap()).unwrap();
                    assert!(
                        (rho - rho_rot).abs() <= 1e-9 * rho.max(1.0),
                        "rotation changed rho for {w}"
                    );
                }
            }
        }
    }

    #[test]
    fn sum_pullback_of_the_rank_two_families() {
        let g = wheler_11_22();
        let sum = sum_pullback(&g);
        assert_eq!(sum, NsMatrix::from_i64_rows(&[&[0, 4], &[4, 0]]).unwrap());

        let g = wheler_12_21();
        let sum = sum_pullback(&g);
        assert_eq!(sum, NsMatrix::from_i64_rows(&[&[0, 5], &[5, 0]]).unwrap());
    }

    #[test]
    fn eigendivisor_of_the_quartic_family() {
        let g = wheler_11_22();
        let e = find_eigendivisor(&g, 4).unwrap();
        assert!((e.beta - 4.0).abs() < 1e-9);
        assert_eq!(e.coeffs.len(), 2);
        assert!((e.coeffs[0] - 1.0).abs() < 1e-9);
        assert!((e.coeffs[1] - 1.0).abs() < 1e-9);
        // 4 > 2 sqrt(2 + sqrt 3) = 3.8637...
        assert!(e.condition_ok);
    }

    #[test]
    fn eigendivisor_of_the_five_family() {
        let g = wheler_12_21();
        let e = find_eigendivisor(&g, 4).unwrap();
        assert!((e.beta - 5.0).abs() < 1e-9);
        assert!((e.coeffs[0] - 1.0).abs() < 1e-9);
        assert!((e.coeffs[1] - 1.0).abs() < 1e-9);
        assert!(e.condition_ok);
    }

    #[test]
    fn eigendivisor_rejects_rotation_like_sums() {
        // Generators summing to a rotation: dominant eigenvalues are a complex
        // pair, so no real nonnegative eigenvalue exists.
        let g = gens_2x2(&[[[0, -3], [3, 0]]]);
        match find_eigendivisor(&g, 2) {
            Err(Error::NoRealDominantEigenvalue { .. }) => {}
            other => panic!("expected complex-dominant error, got {other:?}"),
        }
    }

    #[test]
    fn generator_set_shape_validation() {
        assert!(matches!(
            GeneratorSet::new(vec![], None),
            Err(Error::EmptyGeneratorSet)
        ));
        let a = NsMatrix::from_i64_rows(&[&[1, 0], &[0, 1]]).unwrap();
        let b = NsMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert!(matches!(
            GeneratorSet::new(vec![a, b], None),
            Err(Error::DimMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn exact_entries_survive_long_words() {
        // The double-precision view must match the exact rational entries of
        // a long word product (entries stay well inside f64 range here).
        let g = wheler_11_22();
        let w = Word(vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2]);
        let m = word_matrix(&g, &w).unwrap();
        let f = m.to_f64();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(f[(i, j)], rational_to_f64(m.entry(i, j)));
            }
        }
    }
}
