//! Log-series expansion of normalized products into signed atomic measures.
//!
//! For a factor `(p, alpha, a)`,
//! `log((1 - alpha*lambda) / (1 - alpha*lambda*e^{-i<a,t> log p}))
//!   = sum_r alpha^r/r * lambda^r * (e^{-i r <a,t> log p} - 1)` with `lambda = p^{-<a,sigma>}`.
//! Atoms are stored at `x = -r log p * a` so the kernel is `e^{i<t,x>}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{EulerError, Result};
use crate::euler::Product;
use crate::fmt17;

/// Default ceiling for the automatic truncation order.
pub const MAX_TRUNCATION: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomKey {
    pub p: u64,
    pub r: u32,
    pub a: [u32; 2],
}

impl AtomKey {
    pub fn location(&self) -> [f64; 2] {
        let s = -f64::from(self.r) * (self.p as f64).ln();
        [s * f64::from(self.a[0]), s * f64::from(self.a[1])]
    }

    /// `p^{-r<a, sigma>}`.
    pub fn scale(&self, sigma: [f64; 2]) -> f64 {
        let pair = f64::from(self.a[0]) * sigma[0] + f64::from(self.a[1]) * sigma[1];
        (-f64::from(self.r) * pair * (self.p as f64).ln()).exp()
    }
}

pub type Coefficients = BTreeMap<AtomKey, BigRational>;

fn big(r: num_rational::Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Exact `sum alpha^r / r` per key `(p, r, a)` for `1 <= r <= order`; zero entries dropped.
pub fn merged_coefficients(product: &Product, order: usize) -> Coefficients {
    let mut out = Coefficients::new();
    for f in product.factors() {
        let alpha = big(f.alpha());
        if alpha.is_zero() {
            continue;
        }
        let mut power = BigRational::one();
        for r in 1..=order {
            power *= &alpha;
            let key = AtomKey { p: f.p(), r: r as u32, a: f.direction() };
            *out.entry(key).or_insert_with(BigRational::zero) +=
                &power / BigRational::from_integer(BigInt::from(r));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Sum over factors of `lambda^{R+1} / ((R+1)(1 - lambda))`, which dominates the
/// discarded `sum_{r>R} |alpha|^r/r * lambda^r`.
pub fn tail_bound(product: &Product, sigma: [f64; 2], order: usize) -> Result<f64> {
    product.check_domain(sigma)?;
    let n = (order + 1) as f64;
    Ok(product
        .factors()
        .iter()
        .filter(|f| !f.alpha().is_zero())
        .map(|f| {
            let lambda = f.lambda(sigma);
            lambda.powf(n) / (n * (1.0 - lambda))
        })
        .sum())
}

/// Smallest order `R >= 1` with `tail_bound < target`, at most `cap`.
pub fn choose_order(product: &Product, sigma: [f64; 2], target: f64, cap: usize) -> Result<usize> {
    for order in 1..=cap {
        if tail_bound(product, sigma, order)? < target {
            return Ok(order);
        }
    }
    Err(EulerError::TruncationCap { cap, target })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub key: AtomKey,
    #[serde(with = "rational_str")]
    pub coeff: BigRational,
    pub weight: f64,
    pub location: [f64; 2],
}

/// A finite signed measure `sum weight * delta_location`, realized at `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedAtomicMeasure {
    pub atoms: Vec<Atom>,
    pub sigma: [f64; 2],
    pub order: usize,
    pub tail_bound: f64,
}

impl SignedAtomicMeasure {
    /// Realizes exact coefficients at `sigma`. `tail_bound` is carried as given.
    pub fn realize(coeffs: &Coefficients, sigma: [f64; 2], order: usize, tail_bound: f64) -> Result<Self> {
        let atoms = coeffs
            .iter()
            .map(|(key, coeff)| {
                let pair = f64::from(key.a[0]) * sigma[0] + f64::from(key.a[1]) * sigma[1];
                if !(pair > 0.0) || !pair.is_finite() {
                    return Err(EulerError::DomainViolation(format!(
                        "<a, sigma> = {pair} <= 0 for atom key {key:?}"
                    )));
                }
                let c = coeff.to_f64().unwrap_or(f64::NAN);
                Ok(Atom { key: *key, coeff: coeff.clone(), weight: c * key.scale(sigma), location: key.location() })
            })
            .collect::<Result<_>>()?;
        Ok(Self { atoms, sigma, order, tail_bound })
    }

    /// Full expansion of `product` truncated at `order`.
    pub fn expand(product: &Product, sigma: [f64; 2], order: usize) -> Result<Self> {
        if order == 0 {
            return Err(EulerError::InvalidArgument("truncation order must be >= 1".into()));
        }
        let tail = tail_bound(product, sigma, order)?;
        Self::realize(&merged_coefficients(product, order), sigma, order, tail)
    }

    /// Expansion with the order picked so that `tail_bound < target`.
    pub fn expand_to(product: &Product, sigma: [f64; 2], target: f64) -> Result<Self> {
        let order = choose_order(product, sigma, target, MAX_TRUNCATION)?;
        Self::expand(product, sigma, order)
    }

    pub fn has_negative(&self) -> bool {
        self.atoms.iter().any(|a| a.coeff.is_negative())
    }

    pub fn negative_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.coeff.is_negative())
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).sum()
    }

    /// `exp(sum weight * (e^{i<t,x>} - 1))`.
    pub fn lk_eval(&self, t: [f64; 2]) -> Complex64 {
        let exponent: Complex64 = self
            .atoms
            .iter()
            .map(|a| {
                let phase = t[0] * a.location[0] + t[1] * a.location[1];
                let (s, c) = phase.sin_cos();
                Complex64::new(a.weight * (c - 1.0), a.weight * s)
            })
            .sum();
        exponent.exp()
    }

    /// CSV with header `p,r,a1,a2,coeff_num,coeff_den,weight,x1,x2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,r,a1,a2,coeff_num,coeff_den,weight,x1,x2\n");
        for a in &self.atoms {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                a.key.p,
                a.key.r,
                a.key.a[0],
                a.key.a[1],
                a.coeff.numer(),
                a.coeff.denom(),
                fmt17(a.weight),
                fmt17(a.location[0]),
                fmt17(a.location[1]),
            );
        }
        out
    }
}

pub(crate) mod rational_str {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}
