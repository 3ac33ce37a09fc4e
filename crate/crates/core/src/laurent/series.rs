use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::SeriesError;
use crate::rational::{self, Rational};

/// How far coefficient queries are allowed to look.
///
/// `horizon` is the highest exponent materialized when printing or comparing
/// to a fixed precision; `depth` bounds the number of coefficients scanned when
/// searching for the leading nonzero term of a generated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionBudget {
    pub horizon: i64,
    pub depth: usize,
}

impl PrecisionBudget {
    pub fn new(horizon: i64, depth: usize) -> Self {
        assert!(depth >= 1, "search depth must be positive");
        Self { horizon, depth }
    }
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        Self {
            horizon: 64,
            depth: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of(value: &Rational) -> Self {
        if value.is_zero() {
            Sign::Zero
        } else if value.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Computes one coefficient of a generated series.
///
/// `earlier[j]` holds the already computed coefficient at exponent
/// `start + j` for every exponent below `index`, which lets recursive
/// definitions (such as a reciprocal) refer to their own prefix.
pub trait CoefficientRule: Send + Sync {
    fn coefficient(&self, index: i64, earlier: &[Rational]) -> Rational;
}

struct IndexRule<F>(F);

impl<F> CoefficientRule for IndexRule<F>
where
    F: Fn(i64) -> Rational + Send + Sync,
{
    fn coefficient(&self, index: i64, _earlier: &[Rational]) -> Rational {
        (self.0)(index)
    }
}

struct PrefixRule<F>(F);

impl<F> CoefficientRule for PrefixRule<F>
where
    F: Fn(i64, &[Rational]) -> Rational + Send + Sync,
{
    fn coefficient(&self, index: i64, earlier: &[Rational]) -> Rational {
        (self.0)(index, earlier)
    }
}

/// Finite support: coefficients from `start`, first and last entries nonzero.
#[derive(Debug)]
struct Poly {
    start: i64,
    coeffs: Vec<Rational>,
}

impl Poly {
    fn coefficient(&self, index: i64) -> Rational {
        if index < self.start {
            return Rational::zero();
        }
        self.coeffs
            .get((index - self.start) as usize)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn degree(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start + self.coeffs.len() as i64 - 1)
        }
    }
}

/// Generated tail with a memoized prefix.
struct Generated {
    start: i64,
    rule: Box<dyn CoefficientRule>,
    memo: Mutex<Vec<Rational>>,
}

impl Generated {
    fn coefficient(&self, index: i64) -> Rational {
        if index < self.start {
            return Rational::zero();
        }
        let offset = (index - self.start) as usize;
        // Rules only read other nodes or the prefix slice, never this node's
        // lock, so holding it while extending cannot deadlock.
        let mut memo = self.memo.lock().expect("coefficient memo poisoned");
        while memo.len() <= offset {
            let next = self.start + memo.len() as i64;
            let value = self.rule.coefficient(next, &memo);
            memo.push(value);
        }
        memo[offset].clone()
    }
}

#[derive(Clone)]
enum Body {
    Poly(Arc<Poly>),
    Generated(Arc<Generated>),
}

/// A formal Laurent series in one variable `x` over the rationals.
///
/// Coefficients below `lower_bound()` are zero. Polynomial series (zero
/// tail) are exact and always normalized; generated series compute
/// coefficients on demand and are normalized lazily, so their lower bound
/// may sit below the true valuation until [`LaurentSeries::normalized`] is
/// called.
///
/// Values are immutable and cheap to clone; generated coefficients are
/// memoized behind a mutex so series can be shared across threads.
#[derive(Clone)]
pub struct LaurentSeries {
    lower: i64,
    body: Body,
}

impl LaurentSeries {
    pub fn zero() -> Self {
        Self::from_poly(0, Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The variable `x`, a positive infinitesimal.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(value: Rational) -> Self {
        Self::monomial(value, 0)
    }

    pub fn monomial(coefficient: Rational, exponent: i64) -> Self {
        Self::from_poly(exponent, vec![coefficient])
    }

    /// Polynomial from `(exponent, coefficient)` pairs; repeated exponents add.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut terms: Vec<(i64, Rational)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Self::zero();
        }
        terms.sort_by_key(|(e, _)| *e);
        let start = terms[0].0;
        let end = terms[terms.len() - 1].0;
        let mut coeffs = vec![Rational::zero(); (end - start + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - start) as usize] += c;
        }
        Self::from_poly(start, coeffs)
    }

    fn from_poly(start: i64, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        let (start, coeffs) = match lead {
            None => (0, Vec::new()),
            Some(0) => (start, coeffs),
            Some(k) => (start + k as i64, coeffs.split_off(k)),
        };
        Self {
            lower: start,
            body: Body::Poly(Arc::new(Poly { start, coeffs })),
        }
    }

    /// Series whose coefficient at exponent `i >= lower` is `rule(i)`.
    pub fn generated<F>(lower: i64, rule: F) -> Self
    where
        F: Fn(i64) -> Rational + Send + Sync + 'static,
    {
        Self::from_rule(lower, Box::new(IndexRule(rule)))
    }

    /// Series defined by a rule that may read its own earlier coefficients.
    pub fn generated_recursive<F>(lower: i64, rule: F) -> Self
    where
        F: Fn(i64, &[Rational]) -> Rational + Send + Sync + 'static,
    {
        Self::from_rule(lower, Box::new(PrefixRule(rule)))
    }

    fn from_rule(lower: i64, rule: Box<dyn CoefficientRule>) -> Self {
        Self {
            lower,
            body: Body::Generated(Arc::new(Generated {
                start: lower,
                rule,
                memo: Mutex::new(Vec::new()),
            })),
        }
    }

    /// `Σ_{i ≥ 0} x^i`, the reciprocal of `1 - x`.
    pub fn geometric() -> Self {
        Self::generated(0, |_| Rational::one())
    }

    pub fn coefficient(&self, index: i64) -> Rational {
        if index < self.lower {
            return Rational::zero();
        }
        match &self.body {
            Body::Poly(p) => p.coefficient(index),
            Body::Generated(g) => g.coefficient(index),
        }
    }

    /// Coefficients for exponents `from..=to`.
    pub fn coefficients(&self, from: i64, to: i64) -> Vec<Rational> {
        (from..=to).map(|i| self.coefficient(i)).collect()
    }

    /// Every exponent below this one has a zero coefficient.
    pub fn lower_bound(&self) -> i64 {
        self.lower
    }

    /// Whether the series is known to have finitely many nonzero terms.
    pub fn is_polynomial(&self) -> bool {
        matches!(self.body, Body::Poly(_))
    }

    pub fn is_provably_zero(&self) -> bool {
        matches!(&self.body, Body::Poly(p) if p.coeffs.is_empty())
    }

    /// Highest exponent with a nonzero coefficient, for polynomial series.
    pub fn degree(&self) -> Option<i64> {
        match &self.body {
            Body::Poly(p) => p.degree(),
            Body::Generated(_) => None,
        }
    }

    /// Leading term `(valuation, coefficient)`, or `None` for the zero series.
    pub fn leading(
        &self,
        budget: &PrecisionBudget,
    ) -> Result<Option<(i64, Rational)>, SeriesError> {
        match &self.body {
            Body::Poly(p) => Ok(p.coeffs.first().map(|c| (p.start, c.clone()))),
            Body::Generated(_) => {
                let to = self.lower + budget.depth as i64 - 1;
                for i in self.lower..=to {
                    let c = self.coefficient(i);
                    if !c.is_zero() {
                        return Ok(Some((i, c)));
                    }
                }
                Err(SeriesError::Undecidable {
                    from: self.lower,
                    to,
                })
            }
        }
    }

    /// Same series with the lower bound raised to the true valuation.
    pub fn normalized(&self, budget: &PrecisionBudget) -> Result<Self, SeriesError> {
        match self.leading(budget)? {
            None => Ok(Self::zero()),
            Some((v, _)) => Ok(Self {
                lower: v,
                body: self.body.clone(),
            }),
        }
    }

    pub fn sign(&self, budget: &PrecisionBudget) -> Result<Sign, SeriesError> {
        Ok(match self.leading(budget)? {
            None => Sign::Zero,
            Some((_, c)) => Sign::of(&c),
        })
    }

    /// Index of the leading nonzero coefficient.
    pub fn valuation(&self, budget: &PrecisionBudget) -> Result<i64, SeriesError> {
        match self.leading(budget)? {
            None => Err(SeriesError::ZeroValuation),
            Some((v, _)) => Ok(v),
        }
    }

    pub fn is_positive(&self, budget: &PrecisionBudget) -> Result<bool, SeriesError> {
        Ok(self.sign(budget)? == Sign::Positive)
    }

    /// Field order: `self` compared with `other`.
    pub fn compare(&self, other: &Self, budget: &PrecisionBudget) -> Result<Ordering, SeriesError> {
        Ok(match (self - other).sign(budget)? {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }

    pub fn less_than(&self, other: &Self, budget: &PrecisionBudget) -> Result<bool, SeriesError> {
        Ok(self.compare(other, budget)? == Ordering::Less)
    }

    pub fn abs(&self, budget: &PrecisionBudget) -> Result<Self, SeriesError> {
        Ok(match self.sign(budget)? {
            Sign::Negative => -self,
            _ => self.clone(),
        })
    }

    /// Larger of the two under the field order; ties keep `self`.
    pub fn max(&self, other: &Self, budget: &PrecisionBudget) -> Result<Self, SeriesError> {
        Ok(if self.compare(other, budget)? == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        })
    }

    /// Coefficient-exact agreement on every exponent `≤ horizon`.
    pub fn agrees_to(&self, other: &Self, horizon: i64) -> bool {
        let from = self.lower.min(other.lower);
        (from..=horizon).all(|i| self.coefficient(i) == other.coefficient(i))
    }

    /// Polynomial keeping only the terms with exponent `≤ max_exponent`.
    pub fn truncate(&self, max_exponent: i64) -> Self {
        match &self.body {
            Body::Poly(p) if p.degree().is_none_or(|d| d <= max_exponent) => self.clone(),
            _ => {
                if max_exponent < self.lower {
                    return Self::zero();
                }
                Self::from_poly(self.lower, self.coefficients(self.lower, max_exponent))
            }
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        match &self.body {
            Body::Poly(p) => {
                Self::from_poly(p.start, p.coeffs.iter().map(|c| c * factor).collect())
            }
            Body::Generated(_) => {
                let inner = self.clone();
                let factor = factor.clone();
                Self::generated(self.lower, move |i| inner.coefficient(i) * &factor)
            }
        }
    }

    pub fn half(&self) -> Self {
        self.scale(&rational::rat(1, 2))
    }

    /// Multiplication by `x^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        match &self.body {
            Body::Poly(p) if p.coeffs.is_empty() => self.clone(),
            Body::Poly(p) => Self::from_poly(p.start + shift, p.coeffs.clone()),
            Body::Generated(_) => {
                let inner = self.clone();
                Self::generated(self.lower + shift, move |i| inner.coefficient(i - shift))
            }
        }
    }

    fn add_series(&self, other: &Self) -> Self {
        if self.is_provably_zero() {
            return other.clone();
        }
        if other.is_provably_zero() {
            return self.clone();
        }
        match (&self.body, &other.body) {
            (Body::Poly(a), Body::Poly(b)) => {
                let start = a.start.min(b.start);
                let end = a.degree().unwrap().max(b.degree().unwrap());
                let coeffs = (start..=end)
                    .map(|i| a.coefficient(i) + b.coefficient(i))
                    .collect();
                Self::from_poly(start, coeffs)
            }
            _ => {
                let (a, b) = (self.clone(), other.clone());
                Self::generated(self.lower.min(other.lower), move |i| {
                    a.coefficient(i) + b.coefficient(i)
                })
            }
        }
    }

    fn same_value(&self, other: &Self) -> bool {
        match (&self.body, &other.body) {
            (Body::Generated(a), Body::Generated(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    fn sub_series(&self, other: &Self) -> Self {
        if self.same_value(other) {
            return Self::zero();
        }
        self.add_series(&other.neg_series())
    }

    fn neg_series(&self) -> Self {
        match &self.body {
            Body::Poly(p) => Self::from_poly(p.start, p.coeffs.iter().map(|c| -c).collect()),
            Body::Generated(_) => {
                let inner = self.clone();
                Self::generated(self.lower, move |i| -inner.coefficient(i))
            }
        }
    }

    fn mul_series(&self, other: &Self) -> Self {
        if self.is_provably_zero() || other.is_provably_zero() {
            return Self::zero();
        }
        match (&self.body, &other.body) {
            (Body::Poly(a), Body::Poly(b)) => {
                let mut coeffs = vec![Rational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
                for (i, ca) in a.coeffs.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    for (j, cb) in b.coeffs.iter().enumerate() {
                        coeffs[i + j] += ca * cb;
                    }
                }
                Self::from_poly(a.start + b.start, coeffs)
            }
            _ => {
                // Put a polynomial factor first so the convolution only walks
                // its finite support.
                let (a, b) = if other.is_polynomial() {
                    (other.clone(), self.clone())
                } else {
                    (self.clone(), other.clone())
                };
                let lower = a.lower + b.lower;
                Self::generated(lower, move |i| {
                    let top = match a.degree() {
                        Some(d) => d.min(i - b.lower),
                        None => i - b.lower,
                    };
                    let mut acc = Rational::zero();
                    for j in a.lower..=top {
                        let ca = a.coefficient(j);
                        if !ca.is_zero() {
                            acc += ca * b.coefficient(i - j);
                        }
                    }
                    acc
                })
            }
        }
    }

    /// Multiplicative inverse, solving for one coefficient at a time.
    ///
    /// Monomials invert exactly; anything else yields a generated series
    /// `b` with `self * b = 1` at every exponent.
    pub fn invert(&self, budget: &PrecisionBudget) -> Result<Self, SeriesError> {
        let (v, lead) = match self.leading(budget) {
            Ok(Some(term)) => term,
            Ok(None) => return Err(SeriesError::ZeroDivisor { provable: true }),
            Err(SeriesError::Undecidable { .. }) => {
                return Err(SeriesError::ZeroDivisor { provable: false })
            }
            Err(e) => return Err(e),
        };
        let inv_lead = lead.recip();
        if let Body::Poly(p) = &self.body {
            if p.coeffs.len() == 1 {
                return Ok(Self::monomial(inv_lead, -v));
            }
        }
        let a = self.normalized(budget)?;
        let top = a.degree().map(|d| d - v);
        Ok(Self::generated_recursive(-v, move |index, earlier| {
            let k = index + v;
            if k == 0 {
                return inv_lead.clone();
            }
            let reach = top.map_or(k, |t| t.min(k));
            let mut acc = Rational::zero();
            for j in 1..=reach {
                let aj = a.coefficient(v + j);
                if !aj.is_zero() {
                    acc += aj * &earlier[(k - j) as usize];
                }
            }
            -(acc * &inv_lead)
        }))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn div(&self, other: &Self, budget: &PrecisionBudget) -> Result<Self, SeriesError> {
        Ok(self * &other.invert(budget)?)
    }

    /// Canonical text, materializing generated series up to `horizon`.
    pub fn display(&self, horizon: i64) -> SeriesDisplay<'_> {
        SeriesDisplay {
            series: self,
            horizon,
        }
    }

    /// Nonzero terms with exponent `≤ horizon` (all terms for polynomials).
    pub fn terms(&self, horizon: i64) -> Vec<(i64, Rational)> {
        match &self.body {
            Body::Poly(p) => p
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (p.start + k as i64, c.clone()))
                .collect(),
            Body::Generated(_) => (self.lower..=horizon)
                .map(|i| (i, self.coefficient(i)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }
}

/// Distance `|a - b|`.
pub fn metric(
    a: &LaurentSeries,
    b: &LaurentSeries,
    budget: &PrecisionBudget,
) -> Result<LaurentSeries, SeriesError> {
    (a - b).abs(budget)
}

pub struct SeriesDisplay<'a> {
    series: &'a LaurentSeries,
    horizon: i64,
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    coefficient: &Rational,
    exponent: i64,
    first: bool,
) -> fmt::Result {
    let negative = coefficient.is_negative();
    let magnitude = coefficient.abs();
    match (first, negative) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    let unit = magnitude.is_one();
    if exponent == 0 {
        return write!(f, "{}", rational::format_rational(&magnitude));
    }
    if !unit {
        write!(f, "{}*", rational::format_rational(&magnitude))?;
    }
    if exponent == 1 {
        write!(f, "x")
    } else {
        write!(f, "x^{exponent}")
    }
}

impl fmt::Display for SeriesDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.series.terms(self.horizon);
        let generated = !self.series.is_polynomial();
        if terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (e, c)) in terms.iter().enumerate() {
            write_term(f, c, *e, k == 0)?;
        }
        if generated {
            write!(f, " + …")?;
        }
        Ok(())
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(PrecisionBudget::default().horizon))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries({})", self.display(self.lower + 8))
    }
}

impl PartialEq for LaurentSeries {
    /// Structural equality, only decidable for polynomials: two generated
    /// series compare equal only when they share storage.
    fn eq(&self, other: &Self) -> bool {
        match (&self.body, &other.body) {
            (Body::Poly(a), Body::Poly(b)) => a.start == b.start && a.coeffs == b.coeffs,
            (Body::Generated(a), Body::Generated(b)) => {
                Arc::ptr_eq(a, b) && self.lower == other.lower
            }
            _ => false,
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&LaurentSeries> for &LaurentSeries {
            type Output = LaurentSeries;
            fn $method(self, rhs: &LaurentSeries) -> LaurentSeries {
                self.$inner(rhs)
            }
        }
        impl $trait<LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $method(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$inner(&rhs)
            }
        }
        impl $trait<&LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $method(self, rhs: &LaurentSeries) -> LaurentSeries {
                (&self).$inner(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_series);
forward_binop!(Sub, sub, sub_series);
forward_binop!(Mul, mul, mul_series);

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.neg_series()
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.neg_series()
    }
}

impl From<Rational> for LaurentSeries {
    fn from(value: Rational) -> Self {
        Self::constant(value)
    }
}

impl From<i64> for LaurentSeries {
    fn from(value: i64) -> Self {
        Self::constant(rational::int(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn budget() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    #[test]
    fn zero_is_canonical() {
        let z = LaurentSeries::from_terms([(3, int(1)), (3, int(-1))]);
        assert!(z.is_provably_zero());
        assert_eq!(z, LaurentSeries::zero());
        assert_eq!(z.lower_bound(), 0);
        assert_eq!(z.sign(&budget()).unwrap(), Sign::Zero);
    }

    #[test]
    fn cancellation_and_like_terms() {
        let one_minus_x = LaurentSeries::from_terms([(0, int(1)), (1, int(-1))]);
        assert_eq!(&one_minus_x + &LaurentSeries::x(), LaurentSeries::one());
        let inv_x = LaurentSeries::monomial(int(1), -1);
        assert_eq!(&inv_x + &inv_x, LaurentSeries::monomial(int(2), -1));
    }

    #[test]
    fn monomial_products() {
        let inv_x = LaurentSeries::monomial(int(1), -1);
        assert_eq!(&LaurentSeries::x() * &inv_x, LaurentSeries::one());
    }

    #[test]
    fn geometric_times_one_minus_x() {
        let one_minus_x = LaurentSeries::from_terms([(0, int(1)), (1, int(-1))]);
        let product = &one_minus_x * &LaurentSeries::geometric();
        assert!(product.agrees_to(&LaurentSeries::one(), 64));
        assert!(!product.is_polynomial());
    }

    #[test]
    fn invert_cases() {
        let b = budget();
        let one_minus_x = LaurentSeries::from_terms([(0, int(1)), (1, int(-1))]);
        let inv = one_minus_x.invert(&b).unwrap();
        assert!(inv.agrees_to(&LaurentSeries::geometric(), 64));
        assert_eq!(
            LaurentSeries::x().invert(&b).unwrap(),
            LaurentSeries::monomial(int(1), -1)
        );
        assert_eq!(
            LaurentSeries::from(2).invert(&b).unwrap(),
            LaurentSeries::constant(rat(1, 2))
        );
        assert_eq!(
            LaurentSeries::zero().invert(&b).unwrap_err(),
            SeriesError::ZeroDivisor { provable: true }
        );
        let hidden_zero = LaurentSeries::generated(0, |_| int(0));
        assert_eq!(
            hidden_zero.invert(&b).unwrap_err(),
            SeriesError::ZeroDivisor { provable: false }
        );
    }

    #[test]
    fn invert_with_negative_valuation() {
        let b = budget();
        // x^-2 * (3 + x), reciprocal x^2/(3 + x)
        let a = LaurentSeries::from_terms([(-2, int(3)), (-1, int(1))]);
        let inv = a.invert(&b).unwrap();
        assert_eq!(inv.valuation(&b).unwrap(), 2);
        assert!((&a * &inv).agrees_to(&LaurentSeries::one(), 64));
    }

    #[test]
    fn signs_follow_leading_coefficient() {
        let b = budget();
        assert_eq!(LaurentSeries::x().sign(&b).unwrap(), Sign::Positive);
        let s = LaurentSeries::from_terms([(-3, int(-1)), (1, int(100))]);
        assert_eq!(s.sign(&b).unwrap(), Sign::Negative);
        let late = LaurentSeries::generated(0, |i| if i == 70 { int(1) } else { int(0) });
        assert!(matches!(
            late.sign(&b),
            Err(SeriesError::Undecidable { .. })
        ));
        assert_eq!(
            late.sign(&PrecisionBudget::new(64, 128)).unwrap(),
            Sign::Positive
        );
    }

    #[test]
    fn valuations() {
        let b = budget();
        let s = LaurentSeries::from_terms([(2, int(1)), (5, int(1))]);
        assert_eq!(s.valuation(&b).unwrap(), 2);
        assert_eq!(LaurentSeries::constant(rat(3, 4)).valuation(&b).unwrap(), 0);
        let one_minus_x = LaurentSeries::from_terms([(0, int(1)), (1, int(-1))]);
        let prod = &LaurentSeries::monomial(int(1), -1) * &one_minus_x;
        assert_eq!(prod.valuation(&b).unwrap(), -1);
        assert_eq!(
            LaurentSeries::zero().valuation(&b).unwrap_err(),
            SeriesError::ZeroValuation
        );
    }

    #[test]
    fn metric_examples() {
        let b = budget();
        let s = LaurentSeries::geometric();
        assert!(metric(&s, &s, &b).unwrap().is_provably_zero());
        assert_eq!(
            metric(&LaurentSeries::zero(), &-LaurentSeries::x(), &b).unwrap(),
            LaurentSeries::x()
        );
        let d = metric(&LaurentSeries::one(), &LaurentSeries::x(), &b).unwrap();
        assert_eq!(d, LaurentSeries::from_terms([(0, int(1)), (1, int(-1))]));
    }

    #[test]
    fn infinitesimal_below_every_positive_rational() {
        let b = budget();
        for m in 1..6 {
            let xm = LaurentSeries::monomial(int(1), m);
            assert!(xm
                .less_than(&LaurentSeries::constant(rat(1, 1_000_000)), &b)
                .unwrap());
        }
    }

    #[test]
    fn generated_series_normalize_lazily() {
        let b = budget();
        let s = LaurentSeries::generated(-5, |i| if i >= 2 { int(i) } else { int(0) });
        assert_eq!(s.lower_bound(), -5);
        let n = s.normalized(&b).unwrap();
        assert_eq!(n.lower_bound(), 2);
        assert_eq!(n.coefficient(3), int(3));
    }

    #[test]
    fn display_forms() {
        let s = LaurentSeries::from_terms([(-2, int(1)), (1, rat(3, 2))]);
        assert_eq!(s.to_string(), "x^-2 + 3/2*x");
        let t = LaurentSeries::from_terms([(-3, int(-1)), (0, int(-7)), (1, int(100))]);
        assert_eq!(t.to_string(), "-x^-3 - 7 + 100*x");
        assert_eq!(
            LaurentSeries::geometric().display(3).to_string(),
            "1 + x + x^2 + x^3 + …"
        );
    }

    #[test]
    fn truncation_keeps_prefix() {
        let g = LaurentSeries::geometric().truncate(4);
        assert!(g.is_polynomial());
        assert_eq!(g.degree(), Some(4));
        assert!(g.agrees_to(&LaurentSeries::geometric(), 4));
    }

    #[test]
    fn shared_across_threads() {
        let s = LaurentSeries::one().invert(&budget()).unwrap();
        let inv = (LaurentSeries::one() - LaurentSeries::x())
            .invert(&budget())
            .unwrap();
        let handles: Vec<_> = (0..4)
            .map(|t| {
                let inv = inv.clone();
                std::thread::spawn(move || inv.coefficient(10 + t))
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), int(1));
        }
        assert_eq!(s, LaurentSeries::one());
    }
}
