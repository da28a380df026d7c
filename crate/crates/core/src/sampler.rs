//! Compound-Poisson sampling from a nonnegative atomic measure.
//!
//! Each point is `sum_{j<=N} x_{c_j}` with `N ~ Poisson(total mass)` and `c_j`
//! drawn with probability `weight / total mass`. The random source is ChaCha8
//! seeded through `SeedableRng::seed_from_u64`, so batches are reproducible
//! across platforms for a fixed `(measure, n, seed)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{EulerError, Result};
use crate::expansion::SignedAtomicMeasure;
use crate::fmt17;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub points: Vec<[f64; 2]>,
    pub seed: u64,
    pub n: usize,
}

impl SampleBatch {
    /// `(1/n) sum e^{i<t, x>}`.
    pub fn empirical_cf(&self, t: [f64; 2]) -> Result<Complex64> {
        if self.points.is_empty() {
            return Err(EulerError::EmptyBatch);
        }
        let sum: Complex64 = self
            .points
            .iter()
            .map(|x| Complex64::from_polar(1.0, t[0] * x[0] + t[1] * x[1]))
            .sum();
        Ok(sum / self.points.len() as f64)
    }

    pub fn mean(&self) -> [f64; 2] {
        let n = self.points.len().max(1) as f64;
        let s = self.points.iter().fold([0.0, 0.0], |acc, x| [acc[0] + x[0], acc[1] + x[1]]);
        [s[0] / n, s[1] / n]
    }

    /// CSV with header `x1,x2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x1,x2\n");
        for x in &self.points {
            let _ = writeln!(out, "{},{}", fmt17(x[0]), fmt17(x[1]));
        }
        out
    }
}

pub fn sample(measure: &SignedAtomicMeasure, n: usize, seed: u64) -> Result<SampleBatch> {
    if measure.atoms.iter().any(|a| a.weight < 0.0) {
        return Err(EulerError::SignedMeasure);
    }
    let atoms: Vec<_> = measure.atoms.iter().filter(|a| a.weight > 0.0).collect();
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    if atoms.is_empty() || !(total > 0.0) {
        // Degenerate law: point mass at the origin.
        return Ok(SampleBatch { points: vec![[0.0, 0.0]; n], seed, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = Poisson::new(total).map_err(|e| EulerError::InvalidArgument(e.to_string()))?;
    let pick = WeightedIndex::new(atoms.iter().map(|a| a.weight))
        .map_err(|e| EulerError::InvalidArgument(e.to_string()))?;
    let points = (0..n)
        .map(|_| {
            let jumps = count.sample(&mut rng) as u64;
            let mut x = [0.0, 0.0];
            for _ in 0..jumps {
                let loc = atoms[pick.sample(&mut rng)].location;
                x[0] += loc[0];
                x[1] += loc[1];
            }
            x
        })
        .collect();
    Ok(SampleBatch { points, seed, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{EvalPoint, Family, Product};
    use crate::expansion::{Atom, AtomKey};
    use num_rational::BigRational;

    fn single_atom(weight: f64, location: [f64; 2]) -> SignedAtomicMeasure {
        SignedAtomicMeasure {
            atoms: vec![Atom {
                key: AtomKey { p: 2, r: 1, a: [1, 0] },
                coeff: BigRational::from_integer(1.into()),
                weight,
                location,
            }],
            sigma: [1.0, 1.0],
            order: 1,
            tail_bound: 0.0,
        }
    }

    #[test]
    fn single_atom_law() {
        let x = [-0.5, 0.25];
        let b = sample(&single_atom(1.5, x), 50_000, 7).unwrap();
        for p in &b.points {
            let k = p[0] / x[0];
            assert!((k - k.round()).abs() < 1e-9 && k >= -1e-12);
            assert!((p[1] - k * x[1]).abs() < 1e-9);
        }
        let m = b.mean();
        assert!((m[0] - 1.5 * x[0]).abs() < 0.02);
        assert!((m[1] - 1.5 * x[1]).abs() < 0.01);
    }

    #[test]
    fn reproducible() {
        let m = SignedAtomicMeasure::expand(&Product::named(Family::Gsharp, 3).unwrap(), [1.0, 0.5], 30).unwrap();
        let a = sample(&m, 1000, 42).unwrap();
        let b = sample(&m, 1000, 42).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_ne!(a.points, sample(&m, 1000, 43).unwrap().points);
    }

    #[test]
    fn signed_measure_rejected() {
        let m = SignedAtomicMeasure::expand(&Product::named(Family::Gstar, 2).unwrap(), [1.0, 1.0], 10).unwrap();
        assert_eq!(sample(&m, 10, 0), Err(EulerError::SignedMeasure));
    }

    #[test]
    fn empty_measure_gives_origin() {
        let m = SignedAtomicMeasure::expand(&Product::empty(), [1.0, 1.0], 5).unwrap();
        let b = sample(&m, 4, 0).unwrap();
        assert_eq!(b.points, vec![[0.0, 0.0]; 4]);
        assert_eq!(b.empirical_cf([3.0, -1.0]).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn empirical_cf_basics() {
        let m = SignedAtomicMeasure::expand(&Product::named(Family::F, 2).unwrap(), [1.0, 1.0], 40).unwrap();
        let b = sample(&m, 100_000, 0).unwrap();
        assert_eq!(b.empirical_cf([0.0, 0.0]).unwrap(), Complex64::new(1.0, 0.0));
        let t = [2.0, 1.0];
        let want = Product::named(Family::F, 2).unwrap().normalize(&EvalPoint::new([1.0, 1.0], t)).unwrap();
        let got = b.empirical_cf(t).unwrap();
        assert!((got - want).norm() < 5.0 / (1e5f64).sqrt());
        assert!(got.norm() <= 1.0 + 1e-12);
        let empty = SampleBatch { points: vec![], seed: 0, n: 0 };
        assert_eq!(empty.empirical_cf(t), Err(EulerError::EmptyBatch));
    }
}
