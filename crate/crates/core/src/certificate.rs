//! Checker for the explicit lower bounds behind the Kronecker-type ND witnesses of
//! `G_p H_q` and `F_p H_q` on the diagonal `t = (t0, t0)`.
//!
//! With `R` the half truncation order, `eps` bounding every tail
//! `sum_{r>2R} r^{-1} x^{-r s}` (x in {p, q}, s in {sigma1, sigma2, sigma1+sigma2}),
//! and `eps'` bounding `|p^{it0} - 1|` and `|q^{it0} + 1|`:
//!
//! ```text
//! 2 log|G_p| > -12 eps - 4R eps' Sp_axes - 8R eps' Sp_diag
//! 2 log|F_p| >  -4 eps - 8R eps' Sp_diag
//! 2 log|H_q| > -12 eps - 8R eps' Sq_diag + (4 - 4R eps') Sq_odd - 4R eps' Sq_even
//! ```
//!
//! and the sum for the products, with `C = 4 Sq_odd` and
//! `C' = Sp_axes + 2 Sp_diag + 2 Sq_diag + Sq_odd + Sq_even`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::euler::{EvalPoint, Family, Product};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartnerFamily {
    G,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        self.lhs > self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateCertificate {
    pub partner: PartnerFamily,
    pub p: u64,
    pub q: u64,
    pub sigma: [f64; 2],
    pub half_order: usize,
    pub eps: f64,
    pub eps_prime: f64,
    pub t0: f64,
    /// Largest tail `sum_{r>2R} r^{-1} x^{-r s}` bound; must be `< eps`.
    pub max_tail: f64,
    /// `max(|p^{it0} - 1|, |q^{it0} + 1|)`; must be `< eps'`.
    pub phase_error: f64,
    pub partner_bound: Inequality,
    pub h_bound: Inequality,
    pub c: f64,
    pub c_prime: f64,
    /// `2 log|partner_p * H_q|` against the summed right-hand sides.
    pub combined: Inequality,
}

impl EstimateCertificate {
    pub fn preconditions_hold(&self) -> bool {
        self.max_tail < self.eps && self.phase_error < self.eps_prime
    }

    /// Preconditions hold, every displayed inequality holds, and the combined
    /// lower bound is positive, which certifies `|partner_p H_q (t0, t0)| > 1`.
    pub fn certifies_nd(&self) -> bool {
        self.preconditions_hold()
            && self.partner_bound.holds()
            && self.h_bound.holds()
            && self.combined.holds()
            && self.combined.rhs > 0.0
    }
}

fn geometric_tail(lambda: f64, from: usize) -> f64 {
    let n = from as f64;
    lambda.powf(n) / (n * (1.0 - lambda))
}

fn sum_over(range: impl Iterator<Item = usize>, x: u64, s: f64) -> f64 {
    let lx = (x as f64).ln();
    range.map(|r| (-(r as f64) * s * lx).exp() / r as f64).sum()
}

/// Evaluates the bounds for given `R`, `eps`, `eps'` and `t0`.
#[allow(clippy::too_many_arguments)]
pub fn check_estimates(
    partner: PartnerFamily,
    p: u64,
    q: u64,
    sigma: [f64; 2],
    half_order: usize,
    eps: f64,
    eps_prime: f64,
    t0: f64,
) -> Result<EstimateCertificate> {
    let partner_family = match partner {
        PartnerFamily::G => Family::G,
        PartnerFamily::F => Family::F,
    };
    let pp = Product::named(partner_family, p)?;
    let hq = Product::named(Family::H, q)?;
    let point = EvalPoint::new(sigma, [t0, t0]);
    let log2 = |v: f64| 2.0 * v.ln();
    let lhs_partner = log2(pp.normalize(&point)?.norm());
    let lhs_h = log2(hq.normalize(&point)?.norm());

    let [s1, s2] = sigma;
    let sd = s1 + s2;
    let two_r = 2 * half_order;
    let rr = half_order as f64;

    let max_tail = [p, q]
        .iter()
        .flat_map(|&x| [s1, s2, sd].map(|s| geometric_tail((-(s) * (x as f64).ln()).exp(), two_r + 1)))
        .fold(0.0, f64::max);
    let ip = (p as f64).ln() * t0;
    let iq = (q as f64).ln() * t0;
    let phase_error = f64::max(
        (Complex64::from_polar(1.0, ip) - 1.0).norm(),
        (Complex64::from_polar(1.0, iq) + 1.0).norm(),
    );

    let sp_axes = sum_over(1..=two_r, p, s1) + sum_over(1..=two_r, p, s2);
    let sp_diag = sum_over(1..=two_r, p, sd);
    let sq_diag = sum_over(1..=two_r, q, sd);
    let odd = || (1..=half_order).map(|k| 2 * k - 1);
    let even = || (1..=half_order).map(|k| 2 * k);
    let sq_odd = sum_over(odd(), q, s1) + sum_over(odd(), q, s2);
    let sq_even = sum_over(even(), q, s1) + sum_over(even(), q, s2);

    let rhs_partner = match partner {
        PartnerFamily::G => -12.0 * eps - 4.0 * rr * eps_prime * sp_axes - 8.0 * rr * eps_prime * sp_diag,
        PartnerFamily::F => -4.0 * eps - 8.0 * rr * eps_prime * sp_diag,
    };
    let rhs_h = -12.0 * eps - 8.0 * rr * eps_prime * sq_diag + (4.0 - 4.0 * rr * eps_prime) * sq_odd
        - 4.0 * rr * eps_prime * sq_even;
    let c = 4.0 * sq_odd;
    let c_prime = match partner {
        PartnerFamily::G => sp_axes + 2.0 * sp_diag + 2.0 * sq_diag + sq_odd + sq_even,
        PartnerFamily::F => 2.0 * sp_diag + 2.0 * sq_diag + sq_odd + sq_even,
    };
    let eps_terms = match partner {
        PartnerFamily::G => 24.0,
        PartnerFamily::F => 16.0,
    };

    Ok(EstimateCertificate {
        partner,
        p,
        q,
        sigma,
        half_order,
        eps,
        eps_prime,
        t0,
        max_tail,
        phase_error,
        partner_bound: Inequality { lhs: lhs_partner, rhs: rhs_partner },
        h_bound: Inequality { lhs: lhs_h, rhs: rhs_h },
        c,
        c_prime,
        combined: Inequality {
            lhs: lhs_partner + lhs_h,
            rhs: -eps_terms * eps - 4.0 * rr * c_prime * eps_prime + c,
        },
    })
}

/// Picks `eps` and `eps'` just above their measured lower limits for each
/// `R <= max_half_order` and returns the certificate with the largest combined bound.
pub fn best_certificate(
    partner: PartnerFamily,
    p: u64,
    q: u64,
    sigma: [f64; 2],
    t0: f64,
    max_half_order: usize,
) -> Result<EstimateCertificate> {
    let mut best: Option<EstimateCertificate> = None;
    for half_order in 1..=max_half_order.max(1) {
        let probe = check_estimates(partner, p, q, sigma, half_order, 1.0, 1.0, t0)?;
        let eps = probe.max_tail * (1.0 + 1e-9) + f64::MIN_POSITIVE;
        let eps_prime = probe.phase_error * (1.0 + 1e-9) + 1e-15;
        let cert = check_estimates(partner, p, q, sigma, half_order, eps, eps_prime, t0)?;
        if best.as_ref().is_none_or(|b| cert.combined.rhs > b.combined.rhs) {
            best = Some(cert);
        }
    }
    Ok(best.expect("at least one order"))
}
