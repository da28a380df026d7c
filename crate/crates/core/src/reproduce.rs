//! The verdict table for the eleven product families over a sweep of primes and sigmas.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, Classification, ClassifyOptions, Verdict};
use crate::error::{EulerError, Result};
use crate::euler::{Family, Product};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableFamily {
    Gsharp,
    Gstar,
    G,
    F,
    H,
    FG,
    GH,
    HF,
    FpGq,
    GpHq,
    HpFq,
}

impl TableFamily {
    pub const ALL: [TableFamily; 11] = [
        TableFamily::Gsharp,
        TableFamily::Gstar,
        TableFamily::G,
        TableFamily::F,
        TableFamily::H,
        TableFamily::FG,
        TableFamily::GH,
        TableFamily::HF,
        TableFamily::FpGq,
        TableFamily::GpHq,
        TableFamily::HpFq,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TableFamily::Gsharp => "Gsharp(p)",
            TableFamily::Gstar => "Gstar(p)",
            TableFamily::G => "G(p)",
            TableFamily::F => "F(p)",
            TableFamily::H => "H(p)",
            TableFamily::FG => "F(p)*G(p)",
            TableFamily::GH => "G(p)*H(p)",
            TableFamily::HF => "H(p)*F(p)",
            TableFamily::FpGq => "F(p)*G(q)",
            TableFamily::GpHq => "G(p)*H(q)",
            TableFamily::HpFq => "H(p)*F(q)",
        }
    }

    pub fn expected(self) -> Verdict {
        use TableFamily::*;
        match self {
            Gsharp | F | FG | GH => Verdict::Id,
            G | FpGq => Verdict::Qid,
            Gstar | H | HF | GpHq | HpFq => Verdict::Nd,
        }
    }

    pub fn product(self, p: u64, q: u64) -> Result<Product> {
        use TableFamily::*;
        let (a, pa, b) = match self {
            Gsharp => return Product::named(Family::Gsharp, p),
            Gstar => return Product::named(Family::Gstar, p),
            G => return Product::named(Family::G, p),
            F => return Product::named(Family::F, p),
            H => return Product::named(Family::H, p),
            FG => (Family::F, Family::G, p),
            GH => (Family::G, Family::H, p),
            HF => (Family::H, Family::F, p),
            FpGq => (Family::F, Family::G, q),
            GpHq => (Family::G, Family::H, q),
            HpFq => (Family::H, Family::F, q),
        };
        Ok(Product::named(a, p)?.times(&Product::named(pa, b)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub family: TableFamily,
    pub p: u64,
    pub q: u64,
    pub sigma: [f64; 2],
    pub expected: Verdict,
    pub classification: Classification,
}

impl TableRow {
    pub fn passed(&self) -> bool {
        self.classification.verdict == self.expected
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.rows.len()
    }

    pub fn summary(&self) -> String {
        let status = if self.all_passed() { "PASS" } else { "FAIL" };
        format!("{status}: {}/{} rows match the expected verdicts", self.passed(), self.rows.len())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<12} {:>3} {:>3} {:>7} {:>7} {:>8} {:>8} {}\n",
            "family", "p", "q", "sigma1", "sigma2", "expected", "computed", "status"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<12} {:>3} {:>3} {:>7} {:>7} {:>8} {:>8} {}",
                r.family.label(),
                r.p,
                r.q,
                r.sigma[0],
                r.sigma[1],
                r.expected.as_str(),
                r.classification.verdict.as_str(),
                if r.passed() { "PASS" } else { "FAIL" }
            );
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,p,q,sigma1,sigma2,expected,computed,status\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.family.label(),
                r.p,
                r.q,
                crate::fmt17(r.sigma[0]),
                crate::fmt17(r.sigma[1]),
                r.expected.as_str(),
                r.classification.verdict.as_str(),
                if r.passed() { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

/// Every family at every ordered pair of distinct primes `(p, q)` and every
/// `(sigma1, sigma2)` drawn from `sigmas`. Rows come out in a fixed order.
pub fn reproduce(primes: &[u64], sigmas: &[f64], opts: &ClassifyOptions) -> Result<TableReport> {
    let mut distinct = primes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(EulerError::InvalidArgument(
            "the table needs at least two distinct primes".into(),
        ));
    }
    if sigmas.is_empty() {
        return Err(EulerError::InvalidArgument("at least one sigma value is required".into()));
    }
    let mut jobs = Vec::new();
    for &p in primes {
        for &q in primes {
            if p == q {
                continue;
            }
            for &s1 in sigmas {
                for &s2 in sigmas {
                    for family in TableFamily::ALL {
                        jobs.push((family, p, q, [s1, s2]));
                    }
                }
            }
        }
    }
    let rows = jobs
        .into_par_iter()
        .map(|(family, p, q, sigma)| {
            let product = family.product(p, q)?;
            Ok(TableRow {
                family,
                p,
                q,
                sigma,
                expected: family.expected(),
                classification: classify(&product, sigma, opts)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TableReport { rows })
}
