//! ID / QID / ND classification of normalized products.
//!
//! The pipeline is a semi-decision procedure:
//! 1. expand the log into atoms; no negative coefficient means ID (compound Poisson),
//! 2. otherwise look for `t0` with `|f(t0)| > 1`, which rules out any characteristic function,
//! 3. otherwise certify nonnegative series coefficients to a finite order (QID),
//! 4. otherwise give up with INCONCLUSIVE.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::euler::{EvalPoint, NormalizedFn, Product};
use crate::expansion::{choose_order, Atom, SignedAtomicMeasure, MAX_TRUNCATION};
use crate::kronecker::{kronecker_t, KroneckerQuery, DEFAULT_KRONECKER_BUDGET};
use crate::series::{coeff_lattice, DEFAULT_SERIES_ORDER};

/// A witness must exceed this modulus.
pub const ND_THRESHOLD: f64 = 1.0 + 1e-6;
pub const DEFAULT_WITNESS_BUDGET: usize = 1_000_000;
pub const DEFAULT_TRUNCATION_TARGET: f64 = 1e-10;

const KRONECKER_EPSILONS: [f64; 7] = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001];
const ASCENT_STARTS: usize = 8;
const ASCENT_MAX_STEPS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "ID")]
    Id,
    #[serde(rename = "QID")]
    Qid,
    #[serde(rename = "ND")]
    Nd,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Id => "ID",
            Verdict::Qid => "QID",
            Verdict::Nd => "ND",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStage {
    ClosedForm,
    Kronecker,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: [f64; 2],
    pub modulus: f64,
    pub stage: SearchStage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    NonnegativeAtoms {
        truncation_order: usize,
        tail_bound: f64,
        atoms: Vec<Atom>,
    },
    SignedAtomsPlusCf {
        truncation_order: usize,
        tail_bound: f64,
        series_order: usize,
        negative_atoms: Vec<Atom>,
        atoms: Vec<Atom>,
    },
    Witness {
        t: [f64; 2],
        modulus: f64,
        stage: SearchStage,
        negative_atoms: Vec<Atom>,
    },
    Exhausted {
        witness_budget: usize,
        series_order: usize,
        /// `(p, i, j)` of the first negative series coefficient.
        negative_coefficient: (u64, usize, usize),
        negative_atoms: Vec<Atom>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub sigma: [f64; 2],
    pub evidence: Evidence,
    pub series_order: usize,
    pub witness: Option<Witness>,
}

impl Classification {
    /// `QID (CF verified to order K)` for QID, the bare verdict otherwise.
    pub fn label(&self) -> String {
        match self.verdict {
            Verdict::Qid => format!("QID (CF verified to order {})", self.series_order),
            v => v.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub series_order: usize,
    pub witness_budget: usize,
    pub kronecker_budget: usize,
    pub truncation_target: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            series_order: DEFAULT_SERIES_ORDER,
            witness_budget: DEFAULT_WITNESS_BUDGET,
            kronecker_budget: DEFAULT_KRONECKER_BUDGET,
            truncation_target: DEFAULT_TRUNCATION_TARGET,
        }
    }
}

pub fn classify(product: &Product, sigma: [f64; 2], opts: &ClassifyOptions) -> Result<Classification> {
    product.check_domain(sigma)?;
    let order = choose_order(product, sigma, opts.truncation_target, MAX_TRUNCATION)?;
    let measure = SignedAtomicMeasure::expand(product, sigma, order)?;
    let done = |verdict, evidence, witness| Classification {
        verdict,
        sigma,
        evidence,
        series_order: opts.series_order,
        witness,
    };

    if !measure.has_negative() {
        let evidence = Evidence::NonnegativeAtoms {
            truncation_order: order,
            tail_bound: measure.tail_bound,
            atoms: measure.atoms,
        };
        return Ok(done(Verdict::Id, evidence, None));
    }
    let negative_atoms: Vec<Atom> = measure.negative_atoms().cloned().collect();

    if let Some(w) = find_nd_witness_with(product, sigma, opts.witness_budget, opts.kronecker_budget)? {
        let evidence = Evidence::Witness { t: w.t, modulus: w.modulus, stage: w.stage, negative_atoms };
        return Ok(done(Verdict::Nd, evidence, Some(w)));
    }

    let negative_coefficient = product.primes().into_iter().find_map(|p| {
        coeff_lattice(product, p, opts.series_order)
            .first_negative()
            .map(|(i, j)| (p, i, j))
    });
    match negative_coefficient {
        None => {
            let evidence = Evidence::SignedAtomsPlusCf {
                truncation_order: order,
                tail_bound: measure.tail_bound,
                series_order: opts.series_order,
                negative_atoms,
                atoms: measure.atoms,
            };
            Ok(done(Verdict::Qid, evidence, None))
        }
        Some(negative_coefficient) => {
            let evidence = Evidence::Exhausted {
                witness_budget: opts.witness_budget,
                series_order: opts.series_order,
                negative_coefficient,
                negative_atoms,
            };
            Ok(done(Verdict::Inconclusive, evidence, None))
        }
    }
}

pub fn find_nd_witness(product: &Product, sigma: [f64; 2], budget: usize) -> Result<Option<Witness>> {
    find_nd_witness_with(product, sigma, budget, DEFAULT_KRONECKER_BUDGET)
}

/// Closed-form candidates, then Kronecker-aligned diagonal points for every prime
/// pair, then a grid with local ascent. The first point whose modulus exceeds
/// [`ND_THRESHOLD`] under direct re-evaluation wins.
pub fn find_nd_witness_with(
    product: &Product,
    sigma: [f64; 2],
    budget: usize,
    kronecker_budget: usize,
) -> Result<Option<Witness>> {
    let f = NormalizedFn::new(product, sigma)?;
    let primes = product.primes();
    if primes.is_empty() {
        return Ok(None);
    }
    let verify = |t: [f64; 2], stage| -> Result<Option<Witness>> {
        if f.modulus(t) <= ND_THRESHOLD {
            return Ok(None);
        }
        let modulus = product.normalize(&EvalPoint::new(sigma, t))?.norm();
        Ok((modulus > ND_THRESHOLD).then_some(Witness { t, modulus, stage }))
    };

    // Diagonal candidates for every prime first, then the axis variants.
    let taus: Vec<f64> = primes
        .iter()
        .flat_map(|&p| [1.0, 2.0].map(|m| PI / (m * (p as f64).ln())))
        .collect();
    let diagonal = taus.iter().map(|&tau| [tau, tau]);
    let axes = taus.iter().flat_map(|&tau| [[tau, 0.0], [0.0, tau]]);
    for t in diagonal.chain(axes) {
        if let Some(w) = verify(t, SearchStage::ClosedForm)? {
            return Ok(Some(w));
        }
    }

    for (i, &p) in primes.iter().enumerate() {
        for &q in &primes[i + 1..] {
            for phis in [[0.0, 0.5], [0.5, 0.0]] {
                for eps in KRONECKER_EPSILONS {
                    let query = KroneckerQuery::for_primes(&[p, q], phis.to_vec(), eps, kronecker_budget);
                    let Ok(t) = kronecker_t(&query) else { continue };
                    if let Some(w) = verify([t, t], SearchStage::Kronecker)? {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }

    if budget == 0 {
        return Ok(None);
    }
    let side = ((budget as f64).sqrt().floor() as usize).max(1);
    let min_log = (primes[0] as f64).ln();
    let t_max = 2.0 * PI * (budget as f64).sqrt() / min_log;
    let step = t_max / side as f64;
    let coord = |k: usize| k as f64 * step;
    let moduli: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map(|k| f.modulus([coord(k / side), coord(k % side)]))
        .collect();

    // Lexicographically smallest qualifying grid index.
    if let Some(k) = moduli.iter().position(|&m| m > ND_THRESHOLD) {
        if let Some(w) = verify([coord(k / side), coord(k % side)], SearchStage::Grid)? {
            return Ok(Some(w));
        }
    }

    let mut order: Vec<usize> = (0..moduli.len()).collect();
    order.sort_by(|&a, &b| moduli[b].total_cmp(&moduli[a]).then(a.cmp(&b)));
    for &k in order.iter().take(ASCENT_STARTS) {
        let t = ascend(&f, [coord(k / side), coord(k % side)], step / 2.0);
        if let Some(w) = verify(t, SearchStage::Grid)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Compass search on `|f|` with step halving.
fn ascend(f: &NormalizedFn, start: [f64; 2], mut step: f64) -> [f64; 2] {
    const DIRS: [[f64; 2]; 8] = [
        [1.0, 0.0],
        [-1.0, 0.0],
        [0.0, 1.0],
        [0.0, -1.0],
        [1.0, 1.0],
        [-1.0, -1.0],
        [1.0, -1.0],
        [-1.0, 1.0],
    ];
    let mut t = start;
    let mut best = f.modulus(t);
    for _ in 0..ASCENT_MAX_STEPS {
        if best > ND_THRESHOLD || step < 1e-9 {
            break;
        }
        let mut moved = false;
        for d in DIRS {
            let cand = [t[0] + step * d[0], t[1] + step * d[1]];
            let m = f.modulus(cand);
            if m > best {
                best = m;
                t = cand;
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    t
}
