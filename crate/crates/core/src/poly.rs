//! Multivariate Laurent polynomials with big-integer coefficients, rational
//! functions built from them, and Newton polytopes of their supports.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration
//! follows the lexicographic order in which `m < m'` when the first nonzero
//! entry of `m' - m` is positive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

/// Exponent vector over the ambient variables (cluster variables first, then frozen ones).
pub type ExponentVector = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operands live in different variable contexts")]
    ContextMismatch,
    #[error("division is not exact in the Laurent ring")]
    NotDivisible,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("malformed polynomial: {0}")]
    Malformed(String),
    #[error("negative power of a non-invertible value")]
    NotInvertible,
}

/// Ordered table of variable names shared by all polynomials of one ambient ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Context {
    names: Vec<String>,
}

impl Context {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Self> {
        Arc::new(Context {
            names: names.into_iter().map(Into::into).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn same_context(a: &Arc<Context>, b: &Arc<Context>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[derive(Clone)]
pub struct LaurentPoly {
    ctx: Arc<Context>,
    terms: BTreeMap<ExponentVector, BigInt>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        same_context(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for LaurentPoly {}

impl std::hash::Hash for LaurentPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on term maps; used only to give sets of polynomials a canonical order.
impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms.iter().cmp(other.terms.iter())
    }
}

impl LaurentPoly {
    pub fn zero(ctx: &Arc<Context>) -> Self {
        LaurentPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<Context>, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(vec![0; ctx.len()], c);
        }
        p
    }

    pub fn one(ctx: &Arc<Context>) -> Self {
        Self::constant(ctx, 1)
    }

    /// `coef * x^exp`.
    pub fn monomial(ctx: &Arc<Context>, exp: ExponentVector, coef: impl Into<BigInt>) -> Self {
        assert_eq!(exp.len(), ctx.len(), "exponent length must match the context");
        let c = coef.into();
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable with index `i`.
    pub fn var(ctx: &Arc<Context>, i: usize) -> Self {
        let mut e = vec![0; ctx.len()];
        e[i] = 1;
        Self::monomial(ctx, e, 1)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms(
        ctx: &Arc<Context>,
        terms: impl IntoIterator<Item = (ExponentVector, BigInt)>,
    ) -> Self {
        let mut p = Self::zero(ctx);
        for (e, c) in terms {
            assert_eq!(e.len(), ctx.len(), "exponent length must match the context");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: ExponentVector, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.ctx.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic order of exponents.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[i64]) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    /// Lexicographically smallest exponent of the support.
    pub fn first_exponent(&self) -> Option<&ExponentVector> {
        self.terms.keys().next()
    }

    /// Lexicographically largest exponent of the support.
    pub fn last_exponent(&self) -> Option<&ExponentVector> {
        self.terms.keys().next_back()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// True when no variable outside `allowed` occurs with a nonzero exponent.
    pub fn only_uses(&self, allowed: impl Fn(usize) -> bool) -> bool {
        self.terms
            .keys()
            .all(|e| e.iter().enumerate().all(|(i, &v)| v == 0 || allowed(i)))
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        linalg::gcd_all(self.terms.values())
    }

    /// Componentwise minimum of the support exponents.
    pub fn min_exponents(&self) -> ExponentVector {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars()];
        };
        let mut m = first.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    /// Componentwise maximum of the support exponents.
    pub fn max_exponents(&self) -> ExponentVector {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars()];
        };
        let mut m = first.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).max(*b);
            }
        }
        m
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(PolyError::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = Self::zero(&self.ctx);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: ExponentVector = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(&self.ctx);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the Laurent monomial `x^shift`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), v.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / den` in the Laurent ring, or `NotDivisible`.
    pub fn divide_exact(&self, den: &Self) -> Result<Self, PolyError> {
        self.check(den)?;
        if den.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.is_zero() {
            return Ok(Self::zero(&self.ctx));
        }
        let a = self.min_exponents();
        let b = den.min_exponents();
        let neg = |v: &[i64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        // Both sides become polynomials without monomial factors; the quotient is then a polynomial.
        let num = self.shift(&neg(&a));
        let d = den.shift(&neg(&b));
        let q = divide_polynomials(&num, &d)?;
        let offset: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        Ok(q.shift(&offset))
    }

    /// Writes `self = sum coeff * x_j^power` with coefficients free of `x_j`,
    /// powers strictly increasing.
    pub fn expand_in_variable(&self, j: usize) -> Vec<(i64, LaurentPoly)> {
        let mut by_power: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let p = rest[j];
            rest[j] = 0;
            by_power
                .entry(p)
                .or_insert_with(|| Self::zero(&self.ctx))
                .add_term(rest, c.clone());
        }
        by_power.into_iter().collect()
    }

    /// Sum of the terms with the smallest power of `x_j`.
    pub fn leading_term_lt1(&self, j: usize) -> Result<Self, PolyError> {
        let lowest = self
            .terms
            .keys()
            .map(|e| e[j])
            .min()
            .ok_or(PolyError::ZeroPolynomial)?;
        Ok(LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[j] == lowest)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        })
    }

    pub fn newton_polytope(&self) -> Result<NewtonPolytope, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let points: Vec<ExponentVector> = self.terms.keys().cloned().collect();
        Ok(NewtonPolytope::hull(&points))
    }

    /// Substitutes `images[i]` for variable `i`. Negative exponents need monomial images.
    pub fn substitute(&self, images: &[LaurentPoly]) -> Result<LaurentPoly, PolyError> {
        assert_eq!(images.len(), self.nvars(), "one image per variable");
        let target = images
            .first()
            .map(|p| p.ctx.clone())
            .unwrap_or_else(|| self.ctx.clone());
        for im in images {
            if !same_context(&im.ctx, &target) {
                return Err(PolyError::ContextMismatch);
            }
        }
        let mut inverses: Vec<Option<LaurentPoly>> = vec![None; images.len()];
        let mut out = LaurentPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut term = LaurentPoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &images[i].pow(k as u32);
                } else if k < 0 {
                    if inverses[i].is_none() {
                        inverses[i] = Some(images[i].monomial_inverse()?);
                    }
                    term = &term * &inverses[i].as_ref().unwrap().pow((-k) as u32);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Inverse of a unit monomial `±x^e`.
    pub fn monomial_inverse(&self) -> Result<LaurentPoly, PolyError> {
        if self.terms.len() != 1 {
            return Err(PolyError::NotInvertible);
        }
        let (e, c) = self.terms.iter().next().unwrap();
        if !c.is_one() && !(-c).is_one() {
            return Err(PolyError::NotInvertible);
        }
        Ok(LaurentPoly::monomial(
            &self.ctx,
            e.iter().map(|v| -v).collect(),
            c.clone(),
        ))
    }

    /// Evaluates at rational values; fails on a negative power of zero.
    pub fn evaluate(&self, values: &[BigRational]) -> Result<BigRational, PolyError> {
        assert_eq!(values.len(), self.nvars(), "one value per variable");
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (v, &k) in values.iter().zip(e) {
                if k == 0 {
                    continue;
                }
                if k < 0 && v.is_zero() {
                    return Err(PolyError::NotInvertible);
                }
                t *= num_traits::pow::Pow::pow(v, k as i32);
            }
            total += t;
        }
        Ok(total)
    }

    /// Re-expresses the polynomial in another context containing all its used variables by name.
    pub fn with_context(&self, ctx: &Arc<Context>) -> Result<LaurentPoly, PolyError> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, name) in self.ctx.names().iter().enumerate() {
            let used = self.terms.keys().any(|e| e[i] != 0);
            match ctx.index_of(name) {
                Some(j) => map.push(Some(j)),
                None if !used => map.push(None),
                None => return Err(PolyError::UnknownVariable(name.clone())),
            }
        }
        let mut out = LaurentPoly::zero(ctx);
        for (e, c) in &self.terms {
            let mut f = vec![0; ctx.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    f[j] += k;
                }
            }
            out.add_term(f, c.clone());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.ctx.names().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    coef: c.to_string(),
                })
                .collect(),
        }
    }

    /// Reads the JSON form; with `ctx` given, variables are matched by name.
    pub fn from_json(json: &PolyJson, ctx: Option<&Arc<Context>>) -> Result<Self, PolyError> {
        let own = Context::new(json.vars.iter().cloned());
        let mut p = LaurentPoly::zero(&own);
        for t in &json.terms {
            if t.exp.len() != own.len() {
                return Err(PolyError::Malformed(format!(
                    "exponent of length {} for {} variables",
                    t.exp.len(),
                    own.len()
                )));
            }
            let c: BigInt = t
                .coef
                .trim()
                .parse()
                .map_err(|_| PolyError::Malformed(format!("bad coefficient `{}`", t.coef)))?;
            p.add_term(t.exp.clone(), c);
        }
        match ctx {
            Some(c) => p.with_context(c),
            None => Ok(p),
        }
    }
}

/// Exact division of polynomials whose supports carry no common monomial factor.
fn divide_polynomials(num: &LaurentPoly, den: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
    let ctx = num.ctx.clone();
    let (lead_e, lead_c) = den.terms.iter().next_back().expect("nonzero divisor");
    let nmax = num.max_exponents();
    let dmax = den.max_exponents();
    let bound: Vec<i64> = nmax.iter().zip(&dmax).map(|(a, b)| a - b).collect();
    if bound.iter().any(|&b| b < 0) {
        return Err(PolyError::NotDivisible);
    }
    let mut rem = num.clone();
    let mut quot = LaurentPoly::zero(&ctx);
    while let Some((e, c)) = rem.terms.iter().next_back() {
        let qe: ExponentVector = e.iter().zip(lead_e).map(|(a, b)| a - b).collect();
        if qe.iter().zip(&bound).any(|(&q, &b)| q < 0 || q > b) {
            return Err(PolyError::NotDivisible);
        }
        let (qc, r) = c.div_rem(lead_c);
        if !r.is_zero() {
            return Err(PolyError::NotDivisible);
        }
        for (de, dc) in &den.terms {
            let te: ExponentVector = de.iter().zip(&qe).map(|(a, b)| a + b).collect();
            rem.add_term(te, -(dc * &qc));
        }
        quot.add_term(qe, qc);
    }
    Ok(quot)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            /// Panics when the operands have different contexts; use the checked form otherwise.
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$checked(rhs).expect("polynomials from different contexts")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(i, &k)| {
                    let name = &self.ctx.names()[i];
                    if k == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (mono.is_empty(), a.is_one()) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{a}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<i64>,
    pub coef: String,
}

pub fn lp_add(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
    a.checked_add(b)
}

pub fn lp_mul(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
    a.checked_mul(b)
}

pub fn lp_neg(a: &LaurentPoly) -> LaurentPoly {
    -a
}

pub fn lp_divide_exact(num: &LaurentPoly, den: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
    num.divide_exact(den)
}

/// A quotient of Laurent polynomials, kept with coprime integer contents and a
/// denominator whose lexicographically largest coefficient is positive.
#[derive(Clone, Debug)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RatFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, PolyError> {
        num.check(&den)?;
        if den.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if let Ok(q) = num.divide_exact(&den) {
            let one = LaurentPoly::one(num.context());
            return Ok(RatFunc { num: q, den: one });
        }
        let g = num.content().gcd(&den.content());
        let mut g = if g.is_zero() { BigInt::one() } else { g };
        if den.terms.values().next_back().unwrap().is_negative() {
            g = -g;
        }
        let div = |p: &LaurentPoly| LaurentPoly {
            ctx: p.ctx.clone(),
            terms: p.terms.iter().map(|(e, c)| (e.clone(), c / &g)).collect(),
        };
        Ok(RatFunc {
            num: div(&num),
            den: div(&den),
        })
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        let one = LaurentPoly::one(p.context());
        RatFunc { num: p, den: one }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    /// The value as a Laurent polynomial, when the division is exact.
    pub fn to_laurent(&self) -> Option<LaurentPoly> {
        self.num.divide_exact(&self.den).ok()
    }

    pub fn mul(&self, other: &RatFunc) -> Result<RatFunc, PolyError> {
        RatFunc::new(
            self.num.checked_mul(&other.num)?,
            self.den.checked_mul(&other.den)?,
        )
    }

    pub fn add(&self, other: &RatFunc) -> Result<RatFunc, PolyError> {
        let n = self
            .num
            .checked_mul(&other.den)?
            .checked_add(&other.num.checked_mul(&self.den)?)?;
        RatFunc::new(n, self.den.checked_mul(&other.den)?)
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, PolyError> {
        if other.num.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        RatFunc::new(
            self.num.checked_mul(&other.den)?,
            self.den.checked_mul(&other.num)?,
        )
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        match (
            self.num.checked_mul(&other.den),
            other.num.checked_mul(&self.den),
        ) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl LaurentPoly {
    fn is_one_poly(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(e, c)| c.is_one() && e.iter().all(|&k| k == 0))
                .unwrap_or(false)
    }
}

/// Extreme points of the convex hull of a finite set of lattice points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolytope {
    pub vertices: BTreeSet<ExponentVector>,
}

impl NewtonPolytope {
    pub fn hull(points: &[ExponentVector]) -> Self {
        let distinct: Vec<ExponentVector> = points
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let vertices = distinct
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                let others: Vec<&ExponentVector> = distinct
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j != i)
                    .map(|(_, q)| q)
                    .collect();
                !in_convex_hull(p, &others)
            })
            .map(|(_, p)| p.clone())
            .collect();
        NewtonPolytope { vertices }
    }

    /// Whether `point` is a convex rational combination of the vertices.
    pub fn contains(&self, point: &[i64]) -> bool {
        let vs: Vec<&ExponentVector> = self.vertices.iter().collect();
        vs.iter().any(|v| v.as_slice() == point) || in_convex_hull(point, &vs)
    }
}

fn to_q(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

/// Exact membership test by Carathéodory: try every affinely independent subset.
fn in_convex_hull(p: &[i64], pts: &[&ExponentVector]) -> bool {
    if pts.is_empty() {
        return false;
    }
    let dim = affine_dimension(pts);
    let max_k = (dim + 1).min(pts.len());
    let mut target = to_q(p);
    target.push(BigRational::one());
    let lifted: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|q| {
            let mut v = to_q(q);
            v.push(BigRational::one());
            v
        })
        .collect();
    for k in 1..=max_k {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let cols: Vec<Vec<BigRational>> = idx.iter().map(|&i| lifted[i].clone()).collect();
            if let Some(lambda) = linalg::solve_unique(&cols, &target) {
                if lambda.iter().all(|l| !l.is_negative()) {
                    return true;
                }
            }
            if !next_combination(&mut idx, pts.len()) {
                break;
            }
        }
    }
    false
}

fn affine_dimension(pts: &[&ExponentVector]) -> usize {
    let base = pts[0];
    let diffs: Vec<Vec<BigInt>> = pts[1..]
        .iter()
        .map(|q| q.iter().zip(base).map(|(a, b)| BigInt::from(a - b)).collect())
        .collect();
    linalg::rank(&diffs)
}

/// Advances `idx` to the next k-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
