//! Truncated two-variable Dirichlet-series coefficients per prime, and the
//! discrete (Shintani zeta) law they induce when nonnegative.
//!
//! At prime `p`, with `X = p^{-s1}` and `Y = p^{-s2}`, the factors at `p`
//! multiply to a rational function whose power series `sum c(i,j) X^i Y^j`
//! is what [`CoeffLattice`] holds.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{EulerError, Result};
use crate::euler::{EvalPoint, Factor, Product};
use crate::fmt17;

/// Default lattice degree used by the classifier.
pub const DEFAULT_SERIES_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffLattice {
    p: u64,
    degree: usize,
    factors: Vec<Factor>,
    c: Vec<BigRational>,
}

fn big(r: num_rational::Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl CoeffLattice {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.degree + 1) + j
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.c[self.idx(i, j)]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &BigRational)> + '_ {
        let n = self.degree + 1;
        self.c.iter().enumerate().map(move |(k, v)| ((k / n, k % n), v))
    }

    /// First negative entry in row-major order.
    pub fn first_negative(&self) -> Option<(usize, usize)> {
        self.iter().find(|(_, v)| v.is_negative()).map(|(ij, _)| ij)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.first_negative().is_none()
    }

    /// Multiplies the series back by every denominator `(1 - alpha X^a1 Y^a2)` and
    /// checks that the result is the constant 1 through the lattice degree.
    pub fn check_denominator(&self) -> bool {
        let n = self.degree + 1;
        let mut cur = self.c.clone();
        for f in &self.factors {
            let alpha = big(f.alpha());
            let [a1, a2] = f.direction().map(|v| v as usize);
            let mut next = cur.clone();
            for i in a1..n {
                for j in a2..n {
                    let prev = &cur[(i - a1) * n + (j - a2)];
                    if !prev.is_zero() {
                        next[i * n + j] -= &alpha * prev;
                    }
                }
            }
            cur = next;
        }
        cur.iter()
            .enumerate()
            .all(|(k, v)| if k == 0 { v.is_one() } else { v.is_zero() })
    }

    /// CSV with header `i,j,num,den`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,num,den\n");
        for ((i, j), v) in self.iter() {
            let _ = writeln!(out, "{i},{j},{},{}", v.numer(), v.denom());
        }
        out
    }
}

/// Series coefficients through degree `degree` in each variable of the factors at `p`.
///
/// Dividing by `(1 - alpha X^a1 Y^a2)` is the in-place recurrence
/// `c(i,j) += alpha * c(i-a1, j-a2)` swept in increasing order.
pub fn coeff_lattice(product: &Product, p: u64, degree: usize) -> CoeffLattice {
    let n = degree + 1;
    let factors: Vec<Factor> = product.factors().iter().filter(|f| f.p() == p).copied().collect();
    let mut c = vec![BigRational::zero(); n * n];
    c[0] = BigRational::one();
    for f in &factors {
        let alpha = big(f.alpha());
        if alpha.is_zero() {
            continue;
        }
        let [a1, a2] = f.direction().map(|v| v as usize);
        for i in a1..n {
            for j in a2..n {
                let src = (i - a1) * n + (j - a2);
                if !c[src].is_zero() {
                    let add = &alpha * &c[src];
                    c[i * n + j] += add;
                }
            }
        }
    }
    CoeffLattice { p, degree, factors, c }
}

/// The part of the law contributed by one prime: masses at lattice points `(i, j)`,
/// located at `-(i log p, j log p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeComponent {
    pub p: u64,
    pub points: Vec<([usize; 2], f64)>,
    /// Normalizer of this prime's factors, `prod (1 - alpha p^{-<a,sigma>})^{-1}`.
    pub normalizer: f64,
    /// Rigorous upper bound on the mass lost to truncation at this prime.
    pub deficit_bound: f64,
}

impl PrimeComponent {
    pub fn location(&self, ij: [usize; 2]) -> [f64; 2] {
        let lp = (self.p as f64).ln();
        [-(ij[0] as f64) * lp, -(ij[1] as f64) * lp]
    }

    pub fn mass(&self) -> f64 {
        self.points.iter().map(|(_, m)| m).sum()
    }

    pub fn cf(&self, t: [f64; 2]) -> Complex64 {
        let lp = (self.p as f64).ln();
        self.points
            .iter()
            .map(|&(ij, m)| {
                let phase = -(t[0] * ij[0] as f64 + t[1] * ij[1] as f64) * lp;
                Complex64::from_polar(m, phase)
            })
            .sum()
    }
}

/// Discrete law with masses proportional to `c(i,j) p^{-i sigma1 - j sigma2}`, one
/// independent component per prime.
#[derive(Debug, Clone, PartialEq)]
pub struct ShintaniDistribution {
    pub components: Vec<PrimeComponent>,
    pub normalizer: f64,
    pub sigma: [f64; 2],
    pub degree: usize,
    /// `1 - sum of masses`: mass beyond the truncation degree.
    pub mass_deficit: f64,
}

impl ShintaniDistribution {
    /// Enumerates the combined support. Its size is the product of the per-prime sizes.
    pub fn support(&self) -> Vec<([f64; 2], f64)> {
        let mut out = vec![([0.0, 0.0], 1.0)];
        for comp in &self.components {
            let mut next = Vec::with_capacity(out.len() * comp.points.len());
            for &(x, m) in &out {
                for &(ij, mc) in &comp.points {
                    let y = comp.location(ij);
                    next.push(([x[0] + y[0], x[1] + y[1]], m * mc));
                }
            }
            out = next;
        }
        out
    }

    /// Exact-index support keys `(p, i, j)` per prime, in combination order.
    pub fn support_keys(&self) -> Vec<(Vec<(u64, [usize; 2])>, f64)> {
        let mut out = vec![(Vec::new(), 1.0)];
        for comp in &self.components {
            let mut next = Vec::with_capacity(out.len() * comp.points.len());
            for (k, m) in &out {
                for &(ij, mc) in &comp.points {
                    let mut key: Vec<(u64, [usize; 2])> = k.clone();
                    key.push((comp.p, ij));
                    next.push((key, m * mc));
                }
            }
            out = next;
        }
        out
    }

    pub fn total_mass(&self) -> f64 {
        self.components.iter().map(PrimeComponent::mass).product()
    }

    /// Upper bound on the truncated mass from geometric domination.
    pub fn deficit_bound(&self) -> f64 {
        1.0 - self
            .components
            .iter()
            .map(|c| (1.0 - c.deficit_bound).max(0.0))
            .product::<f64>()
    }

    /// `sum mass * e^{i<t, x>}` over the support. Distinct primes are independent,
    /// so this is the product of the per-prime sums.
    pub fn cf_oracle(&self, t: [f64; 2]) -> Complex64 {
        self.components.iter().map(|c| c.cf(t)).product()
    }

    /// CSV with header `x1,x2,mass` over the full combined support.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x1,x2,mass\n");
        for (x, m) in self.support() {
            let _ = writeln!(out, "{},{},{}", fmt17(x[0]), fmt17(x[1]), fmt17(m));
        }
        out
    }
}

fn component(product: &Product, p: u64, sigma: [f64; 2], degree: usize) -> Result<PrimeComponent> {
    let lattice = coeff_lattice(product, p, degree);
    if let Some((i, j)) = lattice.first_negative() {
        return Err(EulerError::NotADistribution { p, i, j });
    }
    let at_p: Product = lattice.factors.iter().copied().collect();
    let normalizer = at_p.eval(&EvalPoint::new(sigma, [0.0, 0.0]))?.re;
    let lp = (p as f64).ln();
    let scale = |i: usize, j: usize| (-(i as f64 * sigma[0] + j as f64 * sigma[1]) * lp).exp();
    let points: Vec<_> = lattice
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((i, j), c)| ([i, j], c.to_f64().unwrap_or(f64::NAN) * scale(i, j) / normalizer))
        .collect();

    // |c| is dominated by the series of prod (1 - |alpha| X^a1 Y^a2)^{-1}.
    let dominating: Product = lattice
        .factors
        .iter()
        .map(|f| Factor::new(f.p(), f.alpha().abs(), f.direction()).expect("valid factor"))
        .collect();
    let dom_lattice = coeff_lattice(&dominating, p, degree);
    let dom_total = dominating.eval(&EvalPoint::new(sigma, [0.0, 0.0]))?.re;
    let dom_partial: f64 = dom_lattice
        .iter()
        .map(|((i, j), c)| c.to_f64().unwrap_or(f64::NAN) * scale(i, j))
        .sum();
    let deficit_bound = ((dom_total - dom_partial) / normalizer).max(0.0);
    Ok(PrimeComponent { p, points, normalizer, deficit_bound })
}

pub fn shintani_distribution(product: &Product, sigma: [f64; 2], degree: usize) -> Result<ShintaniDistribution> {
    product.check_domain(sigma)?;
    let lattice_domain = sigma.iter().all(|s| *s > 0.0);
    if !lattice_domain && !product.is_empty() {
        return Err(EulerError::DomainViolation(
            "lattice masses need sigma1 > 0 and sigma2 > 0".into(),
        ));
    }
    let components = product
        .primes()
        .into_iter()
        .map(|p| component(product, p, sigma, degree))
        .collect::<Result<Vec<_>>>()?;
    let normalizer = product.eval(&EvalPoint::new(sigma, [0.0, 0.0]))?.re;
    let total: f64 = components.iter().map(PrimeComponent::mass).product();
    Ok(ShintaniDistribution {
        components,
        normalizer,
        sigma,
        degree,
        mass_deficit: (1.0 - total).max(0.0),
    })
}
