//! Cluster data attached to a reduced word of a pair of Weyl group elements:
//! the graph on word positions, the extended exchange matrix, the chamber
//! minors attached to positions, and exact numerical checks in type A.
//!
//! Positions are signed: `-r..=-1` for the prepended letters `i_{-j} = -j`,
//! then `1..=L` for the word itself. Matrix rows and columns of the special
//! linear group are 1-based.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coxeter::{CartanData, CoxeterError, WeylElement};
use crate::linalg;
use crate::poly::LaurentPoly;
use crate::seeds::{ExchangeMatrix, Matrix, Seed, SeedError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruhatError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error("cannot parse word: {0}")]
    Parse(String),
    #[error("letter {letter} out of range for rank {rank}")]
    InvalidLetter { letter: i32, rank: usize },
    #[error("the {0} subword is not reduced")]
    NotReduced(&'static str),
    #[error("minors as row/column subsets exist only in type A")]
    SubsetFormOnlyTypeA,
    #[error("matrix does not have determinant 1")]
    NotUnimodular,
    #[error("no valid sample after {0} attempts")]
    SamplingExhausted(usize),
    #[error("identity failed on sample {sample} at position {position}: {detail}")]
    IdentityFailed { sample: usize, position: i64, detail: String },
    #[error("positivity criterion failed on sample {sample}: {detail}")]
    CriterionFailed { sample: usize, detail: String },
}

/// A word over `±[1,r]`; negative letters belong to the first Weyl group factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DoubleWord(Vec<i32>);

impl DoubleWord {
    pub fn new(letters: Vec<i32>) -> Self {
        DoubleWord(letters)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters of the negative subword, as positive indices.
    pub fn u_word(&self) -> Vec<usize> {
        self.0.iter().filter(|&&l| l < 0).map(|&l| (-l) as usize).collect()
    }

    pub fn v_word(&self) -> Vec<usize> {
        self.0.iter().filter(|&&l| l > 0).map(|&l| l as usize).collect()
    }
}

impl FromStr for DoubleWord {
    type Err = BruhatError;

    /// Space- or comma-separated signed integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i32>()
                    .ok()
                    .filter(|&v| v != 0)
                    .ok_or_else(|| BruhatError::Parse(format!("bad letter `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(DoubleWord)
    }
}

impl fmt::Display for DoubleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A double reduced word with the prepended negative letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedWord {
    rank: usize,
    word: Vec<i32>,
}

impl IndexedWord {
    /// Validates letters and reducedness of both subwords.
    pub fn new(word: &DoubleWord, cartan: &CartanData) -> Result<Self, BruhatError> {
        let rank = cartan.rank();
        if let Some(&l) = word.letters().iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > rank) {
            return Err(BruhatError::InvalidLetter { letter: l, rank });
        }
        if !cartan.is_reduced(&word.u_word())? {
            return Err(BruhatError::NotReduced("negative"));
        }
        if !cartan.is_reduced(&word.v_word())? {
            return Err(BruhatError::NotReduced("positive"));
        }
        Ok(IndexedWord { rank, word: word.letters().to_vec() })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Length `L` of the word without the prepended letters.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> DoubleWord {
        DoubleWord(self.word.clone())
    }

    /// All positions `-r..=-1, 1..=L`.
    pub fn positions(&self) -> Vec<i64> {
        let r = self.rank as i64;
        (-r..=-1).chain(1..=self.len() as i64).collect()
    }

    pub fn letter(&self, k: i64) -> i32 {
        if k < 0 {
            k as i32
        } else {
            self.word[(k - 1) as usize]
        }
    }

    fn sign(&self, k: i64) -> i64 {
        self.letter(k).signum() as i64
    }

    fn index(&self, k: i64) -> usize {
        self.letter(k).unsigned_abs() as usize
    }

    /// Smallest later position with the same index, or `L + 1`.
    pub fn successor(&self, k: i64) -> i64 {
        let idx = self.index(k);
        let start = if k < 0 { 1 } else { k + 1 };
        (start..=self.len() as i64)
            .find(|&l| self.index(l) == idx)
            .unwrap_or(self.len() as i64 + 1)
    }

    pub fn is_exchangeable(&self, k: i64) -> bool {
        k >= 1 && self.successor(k) <= self.len() as i64
    }

    pub fn exchangeable(&self) -> Vec<i64> {
        (1..=self.len() as i64).filter(|&k| self.is_exchangeable(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GammaEdge {
    pub from: i64,
    pub to: i64,
    pub inclined: bool,
}

/// The directed graph on word positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaTilde {
    pub vertices: Vec<i64>,
    pub edges: Vec<GammaEdge>,
}

impl GammaTilde {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph gamma_tilde {\n  rankdir=LR;\n");
        for v in &self.vertices {
            s.push_str(&format!("  \"{v}\";\n"));
        }
        for e in &self.edges {
            let style = if e.inclined { " [style=dashed]" } else { "" };
            s.push_str(&format!("  \"{}\" -> \"{}\"{};\n", e.from, e.to, style));
        }
        s.push_str("}\n");
        s
    }
}

pub fn build_gamma_tilde(iw: &IndexedWord, cartan: &CartanData) -> GammaTilde {
    let pos = iw.positions();
    let mut edges = Vec::new();
    for (a, &k) in pos.iter().enumerate() {
        for &l in &pos[a + 1..] {
            if !iw.is_exchangeable(k) && !iw.is_exchangeable(l) {
                continue;
            }
            let (kp, lp) = (iw.successor(k), iw.successor(l));
            let linked = cartan.entry(iw.index(k), iw.index(l)) < 0;
            let horizontal = l == kp;
            let inclined = !horizontal
                && linked
                && ((l < kp && kp < lp && iw.sign(l) == iw.sign(kp))
                    || (l < lp && lp < kp && iw.sign(l) == -iw.sign(lp)));
            if !horizontal && !inclined {
                continue;
            }
            let forward = if horizontal { iw.sign(l) == 1 } else { iw.sign(l) == -1 };
            let (from, to) = if forward { (k, l) } else { (l, k) };
            edges.push(GammaEdge { from, to, inclined });
        }
    }
    GammaTilde { vertices: pos, edges }
}

/// Extended exchange matrix with rows labeled by all positions and columns by
/// exchangeable positions, both increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BTilde {
    pub rows: Vec<i64>,
    pub cols: Vec<i64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub entries: Matrix,
}

fn serialize_matrix<S: serde::Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
    crate::seeds::matrix_to_json(m).serialize(s)
}

impl BTilde {
    pub fn entry(&self, k: i64, l: i64) -> &BigInt {
        let i = self.rows.iter().position(|&x| x == k).expect("row position");
        let j = self.cols.iter().position(|&x| x == l).expect("column position");
        &self.entries[i][j]
    }

    /// Variable name used for position `k`.
    pub fn label(k: i64) -> String {
        format!("x{k}")
    }

    /// Rows reordered so that the principal part comes first; frozen rows keep their order.
    pub fn seed_row_order(&self) -> Vec<i64> {
        let mut order = self.cols.clone();
        order.extend(self.rows.iter().filter(|k| !self.cols.contains(k)));
        order
    }

    pub fn to_exchange_matrix(&self) -> Result<ExchangeMatrix, SeedError> {
        let order = self.seed_row_order();
        let rows = order
            .iter()
            .map(|&k| {
                let i = self.rows.iter().position(|&x| x == k).unwrap();
                self.entries[i].clone()
            })
            .collect();
        let labels = order.iter().map(|&k| Self::label(k)).collect();
        ExchangeMatrix::new(self.cols.len(), rows, labels)
    }

    pub fn seed(&self) -> Result<Seed, SeedError> {
        Ok(Seed::initial(self.to_exchange_matrix()?))
    }

    /// Principal part in column order.
    pub fn principal(&self) -> Matrix {
        self.cols.iter().map(|&k| self.cols.iter().map(|&l| self.entry(k, l).clone()).collect()).collect()
    }
}

/// Entries from the edges of the position graph.
pub fn build_btilde(iw: &IndexedWord, cartan: &CartanData) -> BTilde {
    let gamma = build_gamma_tilde(iw, cartan);
    let rows = iw.positions();
    let cols = iw.exchangeable();
    let mut entries = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
    let row_of = |k: i64| rows.iter().position(|&x| x == k).unwrap();
    for e in &gamma.edges {
        let magnitude = if e.inclined {
            -cartan.entry(iw.index(e.from), iw.index(e.to))
        } else {
            1
        };
        if let Some(j) = cols.iter().position(|&c| c == e.to) {
            entries[row_of(e.from)][j] = BigInt::from(magnitude);
        }
        if let Some(j) = cols.iter().position(|&c| c == e.from) {
            let back = -cartan.entry(iw.index(e.to), iw.index(e.from));
            let m = if e.inclined { back } else { 1 };
            entries[row_of(e.to)][j] = BigInt::from(-m);
        }
    }
    BTilde { rows, cols, entries }
}

/// Entries from the closed formula in terms of `p = max(k,l)` and `q = min(k+, l+)`.
pub fn btilde_direct(iw: &IndexedWord, cartan: &CartanData) -> BTilde {
    let rows = iw.positions();
    let cols = iw.exchangeable();
    let entries = rows
        .iter()
        .map(|&k| {
            cols.iter()
                .map(|&l| {
                    let p = k.max(l);
                    let (kp, lp) = (iw.successor(k), iw.successor(l));
                    let q = kp.min(lp);
                    let s = (k - l).signum();
                    let v = if p == q {
                        -s * iw.sign(p)
                    } else if p < q && iw.sign(p) * iw.sign(q) * (k - l) * (kp - lp) > 0 {
                        -s * iw.sign(p) * cartan.entry(iw.index(k), iw.index(l))
                    } else {
                        0
                    };
                    BigInt::from(v)
                })
                .collect()
        })
        .collect();
    BTilde { rows, cols, entries }
}

/// `(u_{<=k}, v_{>k})`: ordered products of the reflections of negative letters
/// up to `k` (increasing) and of positive letters after `k` (decreasing).
pub fn partial_products(iw: &IndexedWord, cartan: &CartanData, k: i64) -> Result<(WeylElement, WeylElement), BruhatError> {
    let mut u = cartan.identity();
    for l in 1..=k.max(0) {
        if iw.sign(l) < 0 {
            u = cartan.times_reflection(&u, iw.index(l))?;
        }
    }
    let mut v = cartan.identity();
    for l in (k.max(0) + 1..=iw.len() as i64).rev() {
        if iw.sign(l) > 0 {
            v = cartan.times_reflection(&v, iw.index(l))?;
        }
    }
    Ok((u, v))
}

/// A minor given by 1-based row and column sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MinorSpec {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl MinorSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        assert_eq!(rows.len(), cols.len(), "square minor");
        MinorSpec { rows, cols }
    }

    /// Leading principal minor of size `i`.
    pub fn principal(i: usize) -> Self {
        MinorSpec::new((1..=i).collect(), (1..=i).collect())
    }

    pub fn evaluate(&self, g: &CellSample) -> BigRational {
        evaluate_minor(self, g)
    }
}

/// The minor attached to position `k`.
pub fn minor_spec(iw: &IndexedWord, cartan: &CartanData, k: i64) -> Result<MinorSpec, BruhatError> {
    if !cartan.is_type_a() {
        return Err(BruhatError::SubsetFormOnlyTypeA);
    }
    let (u, v) = partial_products(iw, cartan, k)?;
    let i = iw.index(k);
    Ok(MinorSpec::new(
        cartan.apply_to_fundamental(&u, i)?,
        cartan.apply_to_fundamental(&v, i)?,
    ))
}

pub fn evaluate_minor(spec: &MinorSpec, g: &CellSample) -> BigRational {
    let sub: Vec<Vec<BigRational>> = spec
        .rows
        .iter()
        .map(|&i| spec.cols.iter().map(|&j| g.matrix[i - 1][j - 1].clone()).collect())
        .collect();
    linalg::det(&sub)
}

/// An exact rational matrix of determinant 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSample {
    matrix: Vec<Vec<BigRational>>,
}

impl CellSample {
    pub fn new(matrix: Vec<Vec<BigRational>>) -> Result<Self, BruhatError> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) || !linalg::det(&matrix).is_one() {
            return Err(BruhatError::NotUnimodular);
        }
        Ok(CellSample { matrix })
    }

    pub fn identity(size: usize) -> Self {
        let matrix = (0..size)
            .map(|i| (0..size).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        CellSample { matrix }
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self, BruhatError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect())
    }

    pub fn matrix(&self) -> &[Vec<BigRational>] {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    /// Entry `g_{ij}` with 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.matrix[i - 1][j - 1]
    }
}

/// All `k`-subsets of `1..=n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.iter().map(|i| i + 1).collect());
        if !crate::poly::next_combination(&mut idx, n) {
            break;
        }
    }
    out
}

fn gale_le(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Membership in the double Bruhat cell of `(u, v)` in type A, by the
/// vanishing and nonvanishing pattern of initial row and column minors.
pub fn is_in_cell(g: &CellSample, cartan: &CartanData, u: &WeylElement, v: &WeylElement) -> Result<bool, BruhatError> {
    if !cartan.is_type_a() {
        return Err(BruhatError::SubsetFormOnlyTypeA);
    }
    let r = cartan.rank();
    if g.size() != r + 1 {
        return Ok(false);
    }
    let v_inv = cartan.inverse(v);
    for i in 1..=r {
        let top: Vec<usize> = (1..=i).collect();
        let ui = cartan.apply_to_fundamental(u, i)?;
        let vi = cartan.apply_to_fundamental(&v_inv, i)?;
        for s in subsets(r + 1, i) {
            let col_minor = evaluate_minor(&MinorSpec::new(s.clone(), top.clone()), g);
            let row_minor = evaluate_minor(&MinorSpec::new(top.clone(), s.clone()), g);
            if s == ui && col_minor.is_zero() || !gale_le(&s, &ui) && !col_minor.is_zero() {
                return Ok(false);
            }
            if s == vi && row_minor.is_zero() || !gale_le(&s, &vi) && !row_minor.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn matmul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn random_rational(rng: &mut ChaCha8Rng, positive: bool) -> BigRational {
    let num: i64 = rng.gen_range(1..=4);
    let den: i64 = rng.gen_range(1..=3);
    let sign = if positive || rng.gen_bool(0.5) { 1 } else { -1 };
    BigRational::new((sign * num).into(), den.into())
}

/// `h * x_{i_1}(t_1) * ... * x_{i_L}(t_L)` with `x_i(t) = 1 + t E_{i,i+1}` for
/// positive letters, `1 + t E_{i+1,i}` for negative ones, and `h` diagonal of determinant 1.
pub fn factorized_element(rank: usize, word: &DoubleWord, torus: &[BigRational], params: &[BigRational]) -> CellSample {
    let n = rank + 1;
    let mut m = CellSample::identity(n).matrix;
    let last = torus.iter().fold(BigRational::one(), |acc, t| acc * t).recip();
    for (i, t) in torus.iter().chain(std::iter::once(&last)).enumerate() {
        m[i][i] = t.clone();
    }
    for (&l, t) in word.letters().iter().zip(params) {
        let i = l.unsigned_abs() as usize - 1;
        let mut e = CellSample::identity(n).matrix;
        if l > 0 {
            e[i][i + 1] = t.clone();
        } else {
            e[i + 1][i] = t.clone();
        }
        m = matmul(&m, &e);
    }
    CellSample { matrix: m }
}

const SAMPLE_ATTEMPTS: usize = 100;

fn sample_with(
    iw: &IndexedWord,
    cartan: &CartanData,
    specs: &[MinorSpec],
    rng: &mut ChaCha8Rng,
    positive: bool,
) -> Result<CellSample, BruhatError> {
    let r = cartan.rank();
    for _ in 0..SAMPLE_ATTEMPTS {
        let torus: Vec<BigRational> = (0..r).map(|_| random_rational(rng, positive)).collect();
        let params: Vec<BigRational> = (0..iw.len()).map(|_| random_rational(rng, positive)).collect();
        let g = factorized_element(r, &iw.word(), &torus, &params);
        if specs.iter().all(|s| !evaluate_minor(s, &g).is_zero()) {
            return Ok(g);
        }
    }
    Err(BruhatError::SamplingExhausted(SAMPLE_ATTEMPTS))
}

/// A reproducible random element of the double Bruhat cell of the word, with
/// every minor attached to a position nonzero.
pub fn sample_cell(iw: &IndexedWord, cartan: &CartanData, seed: u64) -> Result<CellSample, BruhatError> {
    let specs = all_minor_specs(iw, cartan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(iw, cartan, &specs, &mut rng, false)
}

/// A reproducible totally positive element of the cell.
pub fn sample_positive(iw: &IndexedWord, cartan: &CartanData, seed: u64) -> Result<CellSample, BruhatError> {
    let specs = all_minor_specs(iw, cartan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(iw, cartan, &specs, &mut rng, true)
}

pub fn all_minor_specs(iw: &IndexedWord, cartan: &CartanData) -> Result<Vec<MinorSpec>, BruhatError> {
    iw.positions().iter().map(|&k| minor_spec(iw, cartan, k)).collect()
}

/// Closed-form value expected for the mutated variable at an exchangeable position.
#[derive(Debug, Clone)]
pub enum ClosedForm {
    Minor(MinorSpec),
    /// Polynomial in the matrix entries; variable `(i-1)(r+1) + (j-1)` is `g_{ij}`.
    Polynomial(LaurentPoly),
}

impl ClosedForm {
    pub fn evaluate(&self, g: &CellSample) -> BigRational {
        match self {
            ClosedForm::Minor(s) => evaluate_minor(s, g),
            ClosedForm::Polynomial(p) => {
                let values: Vec<BigRational> = g.matrix.iter().flatten().cloned().collect();
                p.evaluate(&values).expect("polynomial in matrix entries")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub samples: usize,
    pub exchanges_checked: usize,
    pub closed_forms_checked: usize,
}

/// Value of the exchange polynomial of column `l`, with variables replaced by minors.
fn exchange_value(bt: &BTilde, l: i64, minors: &[(i64, BigRational)]) -> BigRational {
    let mut plus = BigRational::one();
    let mut minus = BigRational::one();
    for (i, (_, value)) in minors.iter().enumerate() {
        let j = bt.cols.iter().position(|&c| c == l).unwrap();
        let b = &bt.entries[i][j];
        let e = i32::try_from(b.abs()).expect("small exponent");
        let p = num_traits::pow::Pow::pow(value, e);
        if b.is_positive() {
            plus *= p;
        } else if b.is_negative() {
            minus *= p;
        }
    }
    plus + minus
}

/// On `samples` reproducible cell elements: every position minor is nonzero,
/// each exchange polynomial in minors divided by the minor of its position is
/// well defined, and it equals the supplied closed forms.
pub fn verify_cell_identities(
    iw: &IndexedWord,
    cartan: &CartanData,
    samples: usize,
    seed: u64,
    closed_forms: &[(i64, ClosedForm)],
) -> Result<CellReport, BruhatError> {
    let bt = build_btilde(iw, cartan);
    let specs = all_minor_specs(iw, cartan)?;
    let positions = iw.positions();
    let results: Vec<Result<(usize, usize), BruhatError>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let g = sample_cell(iw, cartan, seed.wrapping_mul(1_000_003).wrapping_add(s as u64))?;
            let minors: Vec<(i64, BigRational)> =
                positions.iter().zip(&specs).map(|(&k, spec)| (k, evaluate_minor(spec, &g))).collect();
            let mut closed = 0;
            for &l in &bt.cols {
                let denom = &minors.iter().find(|(k, _)| *k == l).unwrap().1;
                if denom.is_zero() {
                    return Err(BruhatError::IdentityFailed { sample: s, position: l, detail: "vanishing minor".into() });
                }
                let value = exchange_value(&bt, l, &minors) / denom;
                for (_, form) in closed_forms.iter().filter(|(k, _)| *k == l) {
                    let expected = form.evaluate(&g);
                    if expected != value {
                        return Err(BruhatError::IdentityFailed {
                            sample: s,
                            position: l,
                            detail: format!("exchange gives {value}, closed form gives {expected}"),
                        });
                    }
                    // Clearing the denominator must reproduce the exchange polynomial exactly.
                    if &expected * denom != exchange_value(&bt, l, &minors) {
                        return Err(BruhatError::IdentityFailed { sample: s, position: l, detail: "denominator".into() });
                    }
                    closed += 1;
                }
            }
            Ok((bt.cols.len(), closed))
        })
        .collect();
    let mut report = CellReport { samples, exchanges_checked: 0, closed_forms_checked: 0 };
    for r in results {
        let (e, c) = r?;
        report.exchanges_checked += e;
        report.closed_forms_checked += c;
    }
    Ok(report)
}

/// Closed forms for the word `(1,2,1,-1,-2,-1)` in type `A2`.
pub fn sl3_closed_forms() -> Vec<(i64, ClosedForm)> {
    let ctx = crate::poly::Context::new((1..=3).flat_map(|i| (1..=3).map(move |j| format!("x{i}{j}"))));
    let e = |pairs: &[(usize, usize)]| {
        let mut v = vec![0i64; 9];
        for &(i, j) in pairs {
            v[(i - 1) * 3 + (j - 1)] += 1;
        }
        v
    };
    let quartic = LaurentPoly::from_terms(
        &ctx,
        [
            (e(&[(1, 2), (2, 1), (3, 3)]), BigInt::from(1)),
            (e(&[(1, 2), (2, 3), (3, 1)]), BigInt::from(-1)),
            (e(&[(1, 3), (2, 1), (3, 2)]), BigInt::from(-1)),
            (e(&[(1, 3), (2, 2), (3, 1)]), BigInt::from(1)),
        ],
    );
    vec![
        (1, ClosedForm::Minor(MinorSpec::new(vec![1, 2], vec![1, 3]))),
        (2, ClosedForm::Polynomial(quartic)),
        (3, ClosedForm::Minor(MinorSpec::new(vec![2], vec![2]))),
        (4, ClosedForm::Minor(MinorSpec::new(vec![1, 3], vec![1, 2]))),
    ]
}

/// For the word `(-1,...,-r,1,...,r)` the mutated variable at position `j` is
/// the leading principal minor of size `j`.
pub fn coxeter_closed_forms(rank: usize) -> Vec<(i64, ClosedForm)> {
    (1..=rank).map(|j| (j as i64, ClosedForm::Minor(MinorSpec::principal(j)))).collect()
}

/// The word `(-1,...,-r,1,...,r)`.
pub fn coxeter_word(rank: usize) -> DoubleWord {
    let r = rank as i32;
    DoubleWord((1..=r).map(|i| -i).chain(1..=r).collect())
}

/// The word `(-1,...,-r,r,...,1)`.
pub fn coxeter_inverse_word(rank: usize) -> DoubleWord {
    let r = rank as i32;
    DoubleWord((1..=r).map(|i| -i).chain((1..=r).rev()).collect())
}

/// All minors of a square matrix are positive (brute force over all row and column sets).
pub fn all_minors_positive(g: &CellSample) -> bool {
    let n = g.size();
    (1..=n).all(|k| {
        let sets = subsets(n, k);
        sets.iter().all(|rows| sets.iter().all(|cols| evaluate_minor(&MinorSpec::new(rows.clone(), cols.clone()), g).is_positive()))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TpReport {
    pub samples: usize,
    pub minors_checked: usize,
    pub clusters_checked: usize,
}

/// Minor values at every position, keyed by position.
pub fn position_minors(iw: &IndexedWord, cartan: &CartanData, g: &CellSample) -> Result<Vec<(i64, BigRational)>, BruhatError> {
    let specs = all_minor_specs(iw, cartan)?;
    Ok(iw.positions().into_iter().zip(specs.iter().map(|s| evaluate_minor(s, g))).collect())
}

/// Evaluates a seed's extended cluster at a cell element, using the minors
/// attached to the positions that name the initial variables.
pub fn evaluate_seed(seed: &Seed, minors: &[(i64, BigRational)]) -> Result<Vec<BigRational>, BruhatError> {
    let values: Vec<BigRational> = seed
        .context()
        .names()
        .iter()
        .map(|name| {
            let k: i64 = name.trim_start_matches('x').parse().map_err(|_| BruhatError::Parse(format!("label `{name}`")))?;
            minors
                .iter()
                .find(|(p, _)| *p == k)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| BruhatError::Parse(format!("no position {k}")))
        })
        .collect::<Result<_, _>>()?;
    seed.extended_cluster()
        .iter()
        .map(|p| p.evaluate(&values).map_err(|e| BruhatError::Seed(e.into())))
        .collect()
}

/// Totally positive samples: all position minors are positive, and on each
/// given seed the cluster and frozen variables are positive with determinant 1.
pub fn tp_criterion_check(
    iw: &IndexedWord,
    cartan: &CartanData,
    samples: usize,
    seed: u64,
    clusters: &[Seed],
) -> Result<TpReport, BruhatError> {
    let results: Vec<Result<usize, BruhatError>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let g = sample_positive(iw, cartan, seed.wrapping_mul(1_000_003).wrapping_add(s as u64))?;
            let minors = position_minors(iw, cartan, &g)?;
            if let Some((k, v)) = minors.iter().find(|(_, v)| !v.is_positive()) {
                return Err(BruhatError::CriterionFailed { sample: s, detail: format!("minor at {k} is {v}") });
            }
            if !linalg::det(g.matrix()).is_positive() {
                return Err(BruhatError::CriterionFailed { sample: s, detail: "determinant".into() });
            }
            for (c, cl) in clusters.iter().enumerate() {
                let vals = evaluate_seed(cl, &minors)?;
                if let Some(v) = vals.iter().find(|v| !v.is_positive()) {
                    return Err(BruhatError::CriterionFailed { sample: s, detail: format!("cluster {c} has value {v}") });
                }
            }
            Ok(minors.len())
        })
        .collect();
    let mut report = TpReport { samples, minors_checked: 0, clusters_checked: clusters.len() * samples };
    for r in results {
        report.minors_checked += r?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::int_matrix;

    fn running() -> (IndexedWord, CartanData) {
        let a2 = CartanData::from_type("A2").unwrap();
        let w: DoubleWord = "1 2 1 -1 -2 -1".parse().unwrap();
        (IndexedWord::new(&w, &a2).unwrap(), a2)
    }

    fn golden_sl3() -> Matrix {
        int_matrix(&[
            [-1, 1, 0, 0],
            [1, 0, 0, 0],
            [0, -1, 1, 0],
            [1, 0, -1, 1],
            [-1, 1, 0, -1],
            [0, -1, 1, 0],
            [0, 1, 0, -1],
            [0, 0, 0, 1],
        ])
    }

    #[test]
    fn successors_and_exchangeable_positions() {
        let (iw, _) = running();
        assert_eq!(iw.positions(), vec![-2, -1, 1, 2, 3, 4, 5, 6]);
        assert_eq!(iw.successor(-1), 1);
        assert_eq!(iw.successor(-2), 2);
        assert_eq!(iw.successor(1), 3);
        assert_eq!(iw.successor(5), 7);
        assert_eq!(iw.exchangeable(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn running_example_matrix() {
        let (iw, a2) = running();
        let b = build_btilde(&iw, &a2);
        assert_eq!(b.rows, vec![-2, -1, 1, 2, 3, 4, 5, 6]);
        assert_eq!(b.entries, golden_sl3());
        assert_eq!(btilde_direct(&iw, &a2), b);
        let g = build_gamma_tilde(&iw, &a2);
        assert!(g.edges.contains(&GammaEdge { from: -1, to: 1, inclined: false }));
        assert!(g.to_dot().starts_with("digraph"));
    }

    #[test]
    fn single_letter_word() {
        let a1 = CartanData::from_type("A1").unwrap();
        let iw = IndexedWord::new(&"1".parse().unwrap(), &a1).unwrap();
        let g = build_gamma_tilde(&iw, &a1);
        assert!(iw.exchangeable().is_empty());
        assert!(g.edges.is_empty());
        assert!(build_btilde(&iw, &a1).cols.is_empty());
    }

    #[test]
    fn coxeter_words() {
        for t in ["A2", "A3", "B3", "G2"] {
            let c = CartanData::from_type(t).unwrap();
            let r = c.rank();
            let iw = IndexedWord::new(&coxeter_word(r), &c).unwrap();
            let b = build_btilde(&iw, &c);
            assert!(b.principal().iter().flatten().all(|v| v.is_zero()), "{t}");
            let iw = IndexedWord::new(&coxeter_inverse_word(r), &c).unwrap();
            let p = build_btilde(&iw, &c).principal();
            for i in 0..r {
                for j in 0..r {
                    let a = c.matrix()[i][j];
                    let expect = match i.cmp(&j) {
                        std::cmp::Ordering::Less => -a,
                        std::cmp::Ordering::Greater => a,
                        std::cmp::Ordering::Equal => 0,
                    };
                    assert_eq!(p[i][j], BigInt::from(expect), "{t} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn invalid_words_are_rejected() {
        let a2 = CartanData::from_type("A2").unwrap();
        assert!(matches!(IndexedWord::new(&"1 1".parse().unwrap(), &a2), Err(BruhatError::NotReduced("positive"))));
        assert!(matches!(IndexedWord::new(&"3".parse().unwrap(), &a2), Err(BruhatError::InvalidLetter { .. })));
        assert!("1 x".parse::<DoubleWord>().is_err());
        assert!("1 0".parse::<DoubleWord>().is_err());
    }

    #[test]
    fn chamber_minors_of_the_running_example() {
        let (iw, a2) = running();
        let (u, v) = partial_products(&iw, &a2, 4).unwrap();
        assert!(v.is_identity());
        assert_eq!(u, a2.element(&[1]).unwrap());
        let expected: [(i64, &[usize], &[usize]); 8] = [
            (-2, &[1, 2], &[2, 3]),
            (-1, &[1], &[3]),
            (1, &[1], &[2]),
            (2, &[1, 2], &[1, 2]),
            (3, &[1], &[1]),
            (4, &[2], &[1]),
            (5, &[2, 3], &[1, 2]),
            (6, &[3], &[1]),
        ];
        for (k, rows, cols) in expected {
            assert_eq!(minor_spec(&iw, &a2, k).unwrap(), MinorSpec::new(rows.to_vec(), cols.to_vec()), "position {k}");
        }
    }

    #[test]
    fn samples_lie_in_the_cell() {
        let (iw, a2) = running();
        let (w0, _) = a2.longest_element();
        for s in 0..5 {
            let g = sample_cell(&iw, &a2, s).unwrap();
            assert!(is_in_cell(&g, &a2, &w0, &w0).unwrap());
            assert!(!is_in_cell(&g, &a2, &a2.identity(), &w0).unwrap());
        }
        let id = CellSample::identity(3);
        assert!(is_in_cell(&id, &a2, &a2.identity(), &a2.identity()).unwrap());
        assert_eq!(CellSample::from_integers(&[vec![1; 3], vec![1; 3], vec![1; 3]]), Err(BruhatError::NotUnimodular));
        let a3 = CartanData::from_type("A3").unwrap();
        let w: DoubleWord = "2 -1 3 -3".parse().unwrap();
        let iw = IndexedWord::new(&w, &a3).unwrap();
        let g = sample_cell(&iw, &a3, 9).unwrap();
        let u = a3.element(&w.u_word()).unwrap();
        let v = a3.element(&w.v_word()).unwrap();
        assert!(is_in_cell(&g, &a3, &u, &v).unwrap());
    }

    #[test]
    fn running_example_closed_forms_hold() {
        let (iw, a2) = running();
        let report = verify_cell_identities(&iw, &a2, 10, 7, &sl3_closed_forms()).unwrap();
        assert_eq!(report.closed_forms_checked, 40);
    }

    #[test]
    fn wrong_closed_form_is_reported() {
        let (iw, a2) = running();
        let wrong = vec![(3, ClosedForm::Minor(MinorSpec::new(vec![1], vec![1])))];
        assert!(matches!(
            verify_cell_identities(&iw, &a2, 3, 1, &wrong),
            Err(BruhatError::IdentityFailed { position: 3, .. })
        ));
    }

    #[test]
    fn positivity_matches_brute_force() {
        let (iw, a2) = running();
        let g = sample_positive(&iw, &a2, 3).unwrap();
        assert!(all_minors_positive(&g));
        let mixed = (0..20).map(|s| sample_cell(&iw, &a2, s).unwrap());
        for g in mixed {
            let minors = position_minors(&iw, &a2, &g).unwrap();
            assert_eq!(minors.iter().all(|(_, v)| v.is_positive()), all_minors_positive(&g));
        }
    }

    fn all_words(c: &CartanData, max_len: usize) -> Vec<IndexedWord> {
        let r = c.rank() as i32;
        let alphabet: Vec<i32> = (1..=r).flat_map(|i| [i, -i]).collect();
        let mut frontier = vec![vec![]];
        let mut out = Vec::new();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for &a in &alphabet {
                    let mut w2: Vec<i32> = w.clone();
                    w2.push(a);
                    if let Ok(iw) = IndexedWord::new(&DoubleWord::new(w2.clone()), c) {
                        out.push(iw);
                        next.push(w2);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn edge_rules_match_direct_formula() {
        for (t, len) in [("A2", 6), ("B2", 8), ("G2", 8)] {
            let c = CartanData::from_type(t).unwrap();
            let words = all_words(&c, len);
            assert!(words.len() > 80, "{t}");
            for iw in words {
                let b = build_btilde(&iw, &c);
                assert_eq!(b, btilde_direct(&iw, &c), "{t} {}", iw.word());
                assert!(b.to_exchange_matrix().is_ok());
            }
        }
    }
}
