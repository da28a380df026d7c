//! Euler factors, finite products of them, and their complex evaluation.
//!
//! A factor `(p, alpha, a)` stands for `(1 - alpha * p^{-<a, s>})^{-1}` with
//! `s = sigma + i t` in two complex variables.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{EulerError, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    p: u64,
    alpha: Rational64,
    a: [u32; 2],
}

impl Factor {
    pub fn new(p: u64, alpha: Rational64, a: [u32; 2]) -> Result<Self> {
        if !is_prime(p) {
            return Err(EulerError::NotPrime(p));
        }
        if alpha.abs() > Rational64::one() {
            return Err(EulerError::AlphaOutOfRange(alpha.to_string()));
        }
        if a == [0, 0] {
            return Err(EulerError::ZeroDirection);
        }
        Ok(Self { p, alpha, a })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn alpha(&self) -> Rational64 {
        self.alpha
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64().unwrap_or(f64::NAN)
    }

    pub fn direction(&self) -> [u32; 2] {
        self.a
    }

    /// `<a, v>` for a real pair `v`.
    pub fn pair(&self, v: [f64; 2]) -> f64 {
        f64::from(self.a[0]) * v[0] + f64::from(self.a[1]) * v[1]
    }

    /// `p^{-<a, sigma>}`, the modulus scale of the factor's variable.
    pub fn lambda(&self, sigma: [f64; 2]) -> f64 {
        (-self.pair(sigma) * (self.p as f64).ln()).exp()
    }

    /// Canonical sort key: prime, then direction, then alpha.
    pub(crate) fn sort_key(&self) -> (u64, [u32; 2], Rational64) {
        (self.p, self.a, self.alpha)
    }

    fn check_domain(&self, sigma: [f64; 2]) -> Result<()> {
        let s = self.pair(sigma);
        if !(s > 0.0) || !s.is_finite() {
            return Err(EulerError::DomainViolation(format!(
                "<a, sigma> = {s} <= 0 for factor {self}"
            )));
        }
        Ok(())
    }

    /// `(1 - alpha p^{-<a, sigma>} p^{-i<a, t>})^{-1}`.
    pub fn eval(&self, point: &EvalPoint) -> Result<Complex64> {
        self.check_domain(point.sigma)?;
        let lambda = self.lambda(point.sigma);
        let phase = -self.pair(point.t) * (self.p as f64).ln();
        let denom = Complex64::new(1.0, 0.0) - Complex64::from_polar(self.alpha_f64() * lambda, phase);
        if denom.is_zero() {
            return Err(EulerError::PoleHit(self.p));
        }
        Ok(denom.inv())
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "factor(p={}, alpha={}, a=[{},{}])",
            self.p, self.alpha, self.a[0], self.a[1]
        )
    }
}

/// The named two-variable families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Gsharp,
    Gstar,
    F,
    G,
    H,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Gsharp, Family::Gstar, Family::F, Family::G, Family::H];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gsharp => "Gsharp",
            Family::Gstar => "Gstar",
            Family::F => "F",
            Family::G => "G",
            Family::H => "H",
        }
    }

    /// `(alpha, direction)` pairs of the family, independent of the prime.
    pub fn shape(self) -> &'static [(i64, [u32; 2])] {
        match self {
            Family::Gsharp => &[(1, [1, 0]), (1, [0, 1])],
            Family::Gstar => &[(-1, [1, 1])],
            Family::F => &[(1, [1, 1])],
            Family::G => &[(1, [1, 0]), (1, [0, 1]), (-1, [1, 1])],
            Family::H => &[(-1, [1, 0]), (-1, [0, 1]), (1, [1, 1])],
        }
    }

    pub fn factors(self, p: u64) -> Result<Vec<Factor>> {
        self.shape()
            .iter()
            .map(|&(alpha, a)| Factor::new(p, Rational64::from_integer(alpha), a))
            .collect()
    }
}

impl FromStr for Family {
    type Err = EulerError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| EulerError::UnknownName(s.to_string()))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite multiset of Euler factors. Equality ignores factor order.
#[derive(Debug, Clone, Default)]
pub struct Product {
    factors: Vec<Factor>,
}

impl Product {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn named(family: Family, p: u64) -> Result<Self> {
        Ok(Self::new(family.factors(p)?))
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// Multiset union.
    pub fn times(&self, other: &Product) -> Product {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Product { factors }
    }

    /// Distinct primes, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.factors.iter().map(|f| f.p).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    pub fn sorted_factors(&self) -> Vec<Factor> {
        let mut fs = self.factors.clone();
        fs.sort_by_key(Factor::sort_key);
        fs
    }

    pub fn check_domain(&self, sigma: [f64; 2]) -> Result<()> {
        self.factors.iter().try_for_each(|f| f.check_domain(sigma))
    }

    pub fn eval(&self, point: &EvalPoint) -> Result<Complex64> {
        self.factors
            .iter()
            .try_fold(Complex64::one(), |acc, f| Ok(acc * f.eval(point)?))
    }

    /// `eval(sigma + i t) / eval(sigma)`.
    pub fn normalize(&self, point: &EvalPoint) -> Result<Complex64> {
        let base = self.eval(&EvalPoint::new(point.sigma, [0.0, 0.0]))?;
        if point.t == [0.0, 0.0] {
            return Ok(Complex64::one());
        }
        Ok(self.eval(point)? / base)
    }
}

impl PartialEq for Product {
    fn eq(&self, other: &Self) -> bool {
        self.sorted_factors() == other.sorted_factors()
    }
}

impl Eq for Product {}

impl FromIterator<Factor> for Product {
    fn from_iter<I: IntoIterator<Item = Factor>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub sigma: [f64; 2],
    pub t: [f64; 2],
}

impl EvalPoint {
    pub fn new(sigma: [f64; 2], t: [f64; 2]) -> Self {
        Self { sigma, t }
    }
}

/// Normalized product at a fixed sigma, prepared for many evaluations in `t`.
///
/// Each factor contributes `(1 - alpha*lambda) / (1 - alpha*lambda*e^{-i<a,t> log p})`.
#[derive(Debug, Clone)]
pub struct NormalizedFn {
    terms: Vec<(f64, [f64; 2], f64)>,
}

impl NormalizedFn {
    pub fn new(product: &Product, sigma: [f64; 2]) -> Result<Self> {
        product.check_domain(sigma)?;
        let terms = product
            .factors()
            .iter()
            .filter(|f| !f.alpha().is_zero())
            .map(|f| {
                let al = f.alpha_f64() * f.lambda(sigma);
                let a = [f64::from(f.a[0]), f64::from(f.a[1])];
                (al, a, (f.p as f64).ln())
            })
            .collect();
        Ok(Self { terms })
    }

    pub fn at(&self, t: [f64; 2]) -> Complex64 {
        self.terms.iter().fold(Complex64::one(), |acc, &(al, a, lp)| {
            let phase = -(a[0] * t[0] + a[1] * t[1]) * lp;
            let num = 1.0 - al;
            acc * (num / (Complex64::one() - Complex64::from_polar(al, phase)))
        })
    }

    pub fn modulus(&self, t: [f64; 2]) -> f64 {
        self.terms.iter().fold(1.0, |acc, &(al, a, lp)| {
            let phase = -(a[0] * t[0] + a[1] * t[1]) * lp;
            let (s, c) = phase.sin_cos();
            let re = 1.0 - al * c;
            let im = al * s;
            acc * (1.0 - al).abs() / (re * re + im * im).sqrt()
        })
    }
}
