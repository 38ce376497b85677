//! Polynomial and rational approximant forms.
//!
//! Evaluation order is fixed to Horner's scheme so that every evaluation is
//! bit-reproducible.

use crate::error::{Error, Result};

/// Denominator magnitudes below this are treated as a pole.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;

/// Dense polynomial `a_0 + a_1 x + ... + a_n x^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients.
    ///
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        eval_poly(&self.coeffs, x)
    }

    /// Multiplies every coefficient by `k`.
    pub fn scaled(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }
}

/// Horner evaluation of ascending coefficients.
#[inline]
pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Ratio of two polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl Rational {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Self {
        Rational { numerator, denominator }
    }

    /// Checked evaluation; fails when the denominator is (numerically) zero.
    pub fn eval(&self, x: f64) -> Result<f64> {
        eval_rational(self, x)
    }

    /// Unchecked evaluation for hot loops where the denominator is known to be
    /// bounded away from zero on the domain.
    #[inline]
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        self.numerator.eval(x) / self.denominator.eval(x)
    }
}

pub fn eval_rational(r: &Rational, x: f64) -> Result<f64> {
    let q = r.denominator.eval(x);
    if q.abs() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator { x, value: q });
    }
    Ok(r.numerator.eval(x) / q)
}

/// Either approximant shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Polynomial(Polynomial),
    Rational(Rational),
}

impl Form {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Form::Polynomial(p) => p.eval(x),
            Form::Rational(r) => r.eval_unchecked(x),
        }
    }

    /// `(numerator degree, denominator degree)`; polynomials report `None`.
    pub fn degrees(&self) -> (usize, Option<usize>) {
        match self {
            Form::Polynomial(p) => (p.degree(), None),
            Form::Rational(r) => (r.numerator.degree(), Some(r.denominator.degree())),
        }
    }
}
