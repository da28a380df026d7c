//! Simultaneous approximation `t*theta_k - phi_k ~ 0 (mod 1)` for frequencies
//! `theta_k = log p_k / (2 pi)`.

use std::f64::consts::PI;

use crate::error::{EulerError, Result};

/// Default number of candidates scanned by [`kronecker_t`] from the witness search.
pub const DEFAULT_KRONECKER_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerQuery {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub epsilon: f64,
    pub budget: usize,
}

impl KroneckerQuery {
    /// Frequencies `log p / (2 pi)` for the given primes.
    pub fn for_primes(primes: &[u64], phis: Vec<f64>, epsilon: f64, budget: usize) -> Self {
        let thetas = primes.iter().map(|&p| (p as f64).ln() / (2.0 * PI)).collect();
        Self { thetas, phis, epsilon, budget }
    }

    fn validate(&self) -> Result<()> {
        if self.thetas.is_empty() || self.thetas.len() != self.phis.len() {
            return Err(EulerError::InvalidArgument(
                "thetas and phis must be nonempty and of equal length".into(),
            ));
        }
        if !(self.epsilon > 0.0) {
            return Err(EulerError::InvalidArgument("epsilon must be positive".into()));
        }
        if self.thetas.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(EulerError::InvalidArgument("thetas must be positive".into()));
        }
        for (i, a) in self.thetas.iter().enumerate() {
            if self.thetas[..i].contains(a) {
                return Err(EulerError::InvalidArgument("thetas must be pairwise distinct".into()));
            }
        }
        Ok(())
    }

    /// Largest distance of `t*theta_k - phi_k` to the integers.
    pub fn max_error(&self, t: f64) -> f64 {
        self.thetas
            .iter()
            .zip(&self.phis)
            .map(|(&th, &ph)| dist_to_integer(t * th - ph))
            .fold(0.0, f64::max)
    }
}

pub fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Finds `t > 0` with every `t*theta_k - phi_k` within `epsilon` of an integer.
///
/// One frequency is solved exactly. With a phase of exactly 1/2 present, the search
/// runs over `t = (m + 1/2) / theta_k` for that index, which pins `p_k^{it} = -1`.
/// Otherwise it scans the grid `j * epsilon / (2 max theta)`.
pub fn kronecker_t(query: &KroneckerQuery) -> Result<f64> {
    query.validate()?;
    let phis: Vec<f64> = query.phis.iter().map(|p| p.rem_euclid(1.0)).collect();
    if query.thetas.len() == 1 {
        let (th, ph) = (query.thetas[0], phis[0]);
        return Ok(if ph > 0.0 { ph / th } else { 1.0 / th });
    }
    if let Some(k) = phis.iter().position(|&p| p == 0.5) {
        let th = query.thetas[k];
        for m in 0..query.budget {
            let t = (m as f64 + 0.5) / th;
            if query.max_error(t) < query.epsilon {
                return Ok(t);
            }
        }
        return Err(EulerError::BudgetExhausted(query.budget));
    }
    let max_theta = query.thetas.iter().copied().fold(0.0, f64::max);
    let delta = query.epsilon / (2.0 * max_theta);
    for j in 1..=query.budget {
        let t = j as f64 * delta;
        if query.max_error(t) < query.epsilon {
            return Ok(t);
        }
    }
    Err(EulerError::BudgetExhausted(query.budget))
}
