//! Seeded generators for rationals and Laurent series.

use num_traits::{One, Zero};
use rand::Rng;

use crate::laurent::{LaurentSeries, PrecisionBudget};
use crate::rational::{int, rat, Rational};

/// `n/d` with `|n| ≤ max_numer` and `1 ≤ d ≤ max_denom`.
pub fn rational<R: Rng>(rng: &mut R, max_numer: i64, max_denom: i64) -> Rational {
    rat(
        rng.gen_range(-max_numer..=max_numer),
        rng.gen_range(1..=max_denom),
    )
}

pub fn nonzero_rational<R: Rng>(rng: &mut R, max_numer: i64, max_denom: i64) -> Rational {
    loop {
        let q = rational(rng, max_numer, max_denom);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Rational in the open interval `(-1, 1)`.
pub fn unit_rational<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.gen_range(2..=12);
    rat(rng.gen_range(-(d - 1)..=d - 1), d)
}

/// Polynomial with up to `max_terms` terms and exponents in `lo..=hi`.
pub fn polynomial<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_terms: usize) -> LaurentSeries {
    let count = rng.gen_range(1..=max_terms);
    LaurentSeries::from_terms(
        (0..count).map(|_| (rng.gen_range(lo..=hi), nonzero_rational(rng, 9, 6))),
    )
}

/// Nonzero polynomial.
pub fn nonzero_polynomial<R: Rng>(
    rng: &mut R,
    lo: i64,
    hi: i64,
    max_terms: usize,
) -> LaurentSeries {
    loop {
        let p = polynomial(rng, lo, hi, max_terms);
        if !p.is_provably_zero() {
            return p;
        }
    }
}

/// Positive polynomial, used as a radius.
pub fn positive_polynomial<R: Rng>(
    rng: &mut R,
    lo: i64,
    hi: i64,
    max_terms: usize,
) -> LaurentSeries {
    nonzero_polynomial(rng, lo, hi, max_terms)
        .abs(&PrecisionBudget::default())
        .expect("polynomial signs are decidable")
}

/// Series with an infinite, eventually periodic tail of coefficients.
pub fn periodic<R: Rng>(rng: &mut R, lo: i64) -> LaurentSeries {
    let period = rng.gen_range(1..=4usize);
    let pattern: Vec<Rational> = (0..period).map(|_| rational(rng, 5, 4)).collect();
    let head = nonzero_rational(rng, 5, 3);
    LaurentSeries::generated(lo, move |i| {
        if i == lo {
            head.clone()
        } else {
            pattern[(i - lo) as usize % period].clone()
        }
    })
}

/// Mixture of polynomials and periodic series with exponents near `lo..=hi`.
pub fn series<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> LaurentSeries {
    if rng.gen_bool(0.25) {
        let start = rng.gen_range(lo..=hi);
        periodic(rng, start)
    } else {
        polynomial(rng, lo, hi, 5)
    }
}

/// Multiplier `u` with `|u| < 1`: standard, near-boundary or infinitesimal.
pub fn unit_multiplier<R: Rng>(rng: &mut R) -> LaurentSeries {
    let sign = if rng.gen_bool(0.5) { int(1) } else { int(-1) };
    match rng.gen_range(0..6) {
        0 => LaurentSeries::constant(unit_rational(rng)),
        1 => {
            let k = rat(rng.gen_range(1..=9), rng.gen_range(1..=4));
            let j = rng.gen_range(1..=4);
            (LaurentSeries::one() - LaurentSeries::monomial(k, j)).scale(&sign)
        }
        2 => LaurentSeries::constant(unit_rational(rng)) + polynomial(rng, 1, 6, 3),
        3 => polynomial(rng, 1, 8, 3),
        4 => (LaurentSeries::one() - LaurentSeries::x() * LaurentSeries::geometric()).scale(&sign),
        _ => LaurentSeries::zero(),
    }
}

/// Rational multiplier `u` with `|u| < 1`, biased towards the boundary.
pub fn unit_rational_multiplier<R: Rng>(rng: &mut R) -> Rational {
    if rng.gen_bool(0.5) {
        unit_rational(rng)
    } else {
        let j = rng.gen_range(1..=20u32);
        let near = Rational::one() - Rational::new(1.into(), num_bigint::BigInt::from(2).pow(j));
        if rng.gen_bool(0.5) {
            near
        } else {
            -near
        }
    }
}
