//! End-to-end acceptance checks, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout; the
//! process exits nonzero if any check fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eulerlab_core::classify::DEFAULT_WITNESS_BUDGET;
use eulerlab_core::kronecker::DEFAULT_KRONECKER_BUDGET;
use eulerlab_core::reproduce::TableReport;
use eulerlab_core::{
    coeff_lattice, dsl, find_nd_witness, kronecker_t, merged_coefficients, reproduce, sample,
    shintani_distribution, AtomKey, ClassifyOptions, EvalPoint, Factor, Family, KroneckerQuery,
    Product, SignedAtomicMeasure, Verdict,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_ts(seed: u64, n: usize, half_width: f64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| [rng.random_range(-half_width..=half_width), rng.random_range(-half_width..=half_width)])
        .collect()
}

fn table() -> Result<(TableReport, Duration), String> {
    let start = Instant::now();
    let report = reproduce(&[2, 3, 5], &[0.5, 1.0, 2.0], &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    Ok((report, start.elapsed()))
}

fn cf_cases(report: &TableReport) -> Vec<(Product, [f64; 2], Verdict)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for row in &report.rows {
        let v = row.classification.verdict;
        if !matches!(v, Verdict::Id | Verdict::Qid) {
            continue;
        }
        let product = row.family.product(row.p, row.q).unwrap();
        let key = (dsl::format(&product), row.sigma.map(f64::to_bits));
        if seen.insert(key) {
            out.push((product, row.sigma, v));
        }
    }
    out
}

fn table_reproduction(report: &TableReport, elapsed: Duration) -> Check {
    ensure(report.rows.len() == 594, || format!("{} rows, want 594", report.rows.len()))?;
    let failed: Vec<String> = report
        .rows
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            format!(
                "{} p={} q={} sigma={:?}: {} != {}",
                r.family.label(),
                r.p,
                r.q,
                r.sigma,
                r.classification.verdict,
                r.expected
            )
        })
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{}, {:.1}s", report.summary(), elapsed.as_secs_f64()))
}

fn levy_khintchine(report: &TableReport) -> Check {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (i, (product, sigma, verdict)) in cf_cases(report).into_iter().enumerate() {
        if verdict != Verdict::Id {
            continue;
        }
        cases += 1;
        let m = SignedAtomicMeasure::expand_to(&product, sigma, 1e-10).map_err(|e| e.to_string())?;
        ensure(m.tail_bound < 1e-10, || format!("tail {} for {}", m.tail_bound, dsl::format(&product)))?;
        for t in random_ts(1000 + i as u64, 100, 20.0) {
            let want = product.normalize(&EvalPoint::new(sigma, t)).unwrap();
            let err = (m.lk_eval(t) - want).norm();
            worst = worst.max(err);
            ensure(err < 1e-9, || format!("{} sigma={sigma:?} t={t:?}: error {err:e}", dsl::format(&product)))?;
        }
    }
    Ok(format!("{cases} ID cases, max error {worst:.2e}"))
}

fn exact_cancellation() -> Check {
    let diag = [1, 1];
    for p in [2u64, 3, 5] {
        let fg = Product::named(Family::F, p).unwrap().times(&Product::named(Family::G, p).unwrap());
        let coeffs = merged_coefficients(&fg, 50);
        for r in 1..=50u32 {
            let got = coeffs.get(&AtomKey { p, r, a: diag }).cloned().unwrap_or_else(BigRational::zero);
            let want = if r % 2 == 0 {
                BigRational::new(BigInt::from(2), BigInt::from(r))
            } else {
                BigRational::zero()
            };
            ensure(got == want, || format!("F({p})*G({p}) r={r}: {got} != {want}"))?;
        }
        let gh = Product::named(Family::G, p).unwrap().times(&Product::named(Family::H, p).unwrap());
        let coeffs = merged_coefficients(&gh, 50);
        ensure(!coeffs.is_empty(), || format!("G({p})*H({p}) has no atoms"))?;
        for (k, c) in &coeffs {
            ensure(k.r % 2 == 0 && *c > BigRational::zero(), || {
                format!("G({p})*H({p}) key p={} r={} a={:?} coeff {c}", k.p, k.r, k.a)
            })?;
        }
    }
    Ok("F*G odd diagonal terms vanish, G*H atoms are even and positive".into())
}

fn closed_form_witnesses() -> Check {
    let s = [1.0, 1.0];
    let t = PI / (2.0 * 2f64.ln());
    let gstar = Product::named(Family::Gstar, 2).unwrap().normalize(&EvalPoint::new(s, [t, t])).unwrap().norm();
    let t = PI / 2f64.ln();
    let h = Product::named(Family::H, 2).unwrap().normalize(&EvalPoint::new(s, [t, t])).unwrap().norm();
    let rel = |x: f64, want: f64| ((x - want) / want).abs();
    ensure(rel(gstar, 5.0 / 3.0) < 1e-12, || format!("|Gstar(2)| = {gstar}"))?;
    ensure(rel(h, 9.0) < 1e-12, || format!("|H(2)| = {h}"))?;
    Ok(format!("|Gstar(2)| = {gstar}, |H(2)| = {h}"))
}

fn kronecker_witnesses() -> Check {
    let s = [1.0, 1.0];
    let mut notes = Vec::new();
    for text in ["G(2)*H(3)", "H(2)*F(3)"] {
        let product = dsl::parse(text).unwrap();
        let w = find_nd_witness(&product, s, DEFAULT_WITNESS_BUDGET)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("no witness for {text}"))?;
        let direct = product.normalize(&EvalPoint::new(s, w.t)).unwrap().norm();
        ensure(w.modulus > 1.0 && direct > 1.0, || format!("{text}: modulus {} / {direct}", w.modulus))?;
        notes.push(format!("{text} |f| = {direct:.4}"));
    }
    let eps = 0.02;
    for phis in [vec![0.0, 0.5], vec![0.5, 0.0]] {
        let q = KroneckerQuery::for_primes(&[2, 3], phis.clone(), eps, DEFAULT_KRONECKER_BUDGET);
        let t = kronecker_t(&q).map_err(|e| e.to_string())?;
        let err = [2f64, 3.0]
            .iter()
            .zip(&phis)
            .map(|(p, ph)| {
                let x = t * p.ln() / (2.0 * PI) - ph;
                (x - x.round()).abs()
            })
            .fold(0.0, f64::max);
        ensure(err < eps, || format!("phis {phis:?}: t = {t}, error {err}"))?;
    }
    notes.push(format!("kronecker_t within {eps}"));
    Ok(notes.join(", "))
}

fn brute_force_lattice(factors: &[Factor], p: u64, k: usize) -> Vec<Vec<BigRational>> {
    let n = k + 1;
    let mut acc = vec![vec![BigRational::zero(); n]; n];
    acc[0][0] = BigRational::one();
    for f in factors.iter().filter(|f| f.p() == p) {
        let alpha = BigRational::new(BigInt::from(*f.alpha().numer()), BigInt::from(*f.alpha().denom()));
        let [a1, a2] = f.direction().map(|v| v as usize);
        let mut series = vec![vec![BigRational::zero(); n]; n];
        let mut power = BigRational::one();
        for m in 0.. {
            let (i, j) = (m * a1, m * a2);
            if i >= n || j >= n {
                break;
            }
            series[i][j] = power.clone();
            power *= &alpha;
        }
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if acc[i][j].is_zero() {
                    continue;
                }
                for u in 0..n - i {
                    for v in 0..n - j {
                        if !series[u][v].is_zero() {
                            next[i + u][j + v] += &acc[i][j] * &series[u][v];
                        }
                    }
                }
            }
        }
        acc = next;
    }
    acc
}

fn series_certificate() -> Check {
    let g = Product::named(Family::G, 2).unwrap();
    let lattice = coeff_lattice(&g, 2, 64);
    let oracle = brute_force_lattice(g.factors(), 2, 64);
    for i in 0..=64 {
        for j in 0..=64 {
            let c = lattice.get(i, j);
            ensure(*c == oracle[i][j], || format!("c({i},{j}) = {c}, oracle {}", oracle[i][j]))?;
            let want = if i.min(j) % 2 == 0 { BigRational::one() } else { BigRational::zero() };
            ensure(*c == want, || format!("c({i},{j}) = {c}, want {want}"))?;
        }
    }
    ensure(lattice.is_nonnegative(), || "G(2) lattice has a negative entry".into())?;
    let h = coeff_lattice(&Product::named(Family::H, 2).unwrap(), 2, 1);
    let c10 = h.get(1, 0).clone();
    ensure(c10 == -BigRational::one(), || format!("H(2) c(1,0) = {c10}"))?;
    Ok("G(2) lattice matches oracle to K = 64, H(2) c(1,0) = -1".into())
}

fn oracle_triangle(report: &TableReport) -> Check {
    let mut cases = 0;
    let mut worst_cf = 0.0f64;
    for (i, (product, sigma, verdict)) in cf_cases(report).into_iter().enumerate() {
        cases += 1;
        let d = shintani_distribution(&product, sigma, 64).map_err(|e| e.to_string())?;
        let cf_tol = 2.0 * d.mass_deficit + 1e-12;
        let lk = if verdict == Verdict::Id {
            Some(SignedAtomicMeasure::expand_to(&product, sigma, 1e-10).map_err(|e| e.to_string())?)
        } else {
            None
        };
        let name = dsl::format(&product);
        for t in random_ts(5000 + i as u64, 100, 20.0) {
            let norm = product.normalize(&EvalPoint::new(sigma, t)).unwrap();
            let cf = d.cf_oracle(t);
            let e = (norm - cf).norm();
            worst_cf = worst_cf.max(e);
            ensure(e <= cf_tol, || format!("{name} sigma={sigma:?} t={t:?}: normalize vs cf_oracle {e:e}"))?;
            if let Some(m) = &lk {
                let l = m.lk_eval(t);
                let e1 = (norm - l).norm();
                ensure(e1 < 1e-9, || format!("{name} sigma={sigma:?} t={t:?}: normalize vs lk {e1:e}"))?;
                let e2 = (l - cf).norm();
                ensure(e2 < 1e-9 + cf_tol, || format!("{name} sigma={sigma:?} t={t:?}: lk vs cf_oracle {e2:e}"))?;
            }
        }
    }
    Ok(format!("{cases} CF cases, max |normalize - cf_oracle| {worst_cf:.2e}"))
}

fn sampler() -> Check {
    let n = 100_000;
    let tol = 5.0 / (n as f64).sqrt();
    let ts: Vec<[f64; 2]> = (0..20).map(|k| [0.35 * k as f64 - 3.0, 5.0 - 0.6 * k as f64]).collect();
    let mut worst = 0.0f64;
    for text in ["Gsharp(2)", "F(2)", "F(2)*G(2)"] {
        let product = dsl::parse(text).unwrap();
        let m = SignedAtomicMeasure::expand_to(&product, [1.0, 1.0], 1e-10).map_err(|e| e.to_string())?;
        let batch = sample(&m, n, 0).map_err(|e| e.to_string())?;
        for &t in &ts {
            let e = (batch.empirical_cf(t).unwrap() - product.normalize(&EvalPoint::new([1.0, 1.0], t)).unwrap()).norm();
            worst = worst.max(e);
            ensure(e < tol, || format!("{text} t={t:?}: error {e} >= {tol}"))?;
        }
    }
    Ok(format!("max error {worst:.4} < {tol:.4}"))
}

fn random_product(rng: &mut ChaCha8Rng) -> Product {
    const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    let mut factors = Vec::new();
    let terms = rng.random_range(1..=5);
    for _ in 0..terms {
        let p = PRIMES[rng.random_range(0..PRIMES.len())];
        if rng.random_bool(0.5) {
            let family = Family::ALL[rng.random_range(0..Family::ALL.len())];
            factors.extend(family.factors(p).unwrap());
        } else {
            let den = rng.random_range(1..=12i64);
            let num = rng.random_range(-den..=den);
            let a = loop {
                let a = [rng.random_range(0..=3u32), rng.random_range(0..=3u32)];
                if a != [0, 0] {
                    break a;
                }
            };
            factors.push(Factor::new(p, Rational64::new(num, den), a).unwrap());
        }
    }
    Product::new(factors)
}

fn dsl_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let product = random_product(&mut rng);
        let text = dsl::format(&product);
        let back = dsl::parse(&text).map_err(|e| format!("`{text}`: {e}"))?;
        ensure(back == product, || format!("`{text}` did not round-trip"))?;
    }
    Ok("1000 products".into())
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, check: Check| {
        match check {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {n} ({name}): {why}");
            }
        }
    };
    match table() {
        Ok((table, elapsed)) => {
            report(1, "table reproduction", table_reproduction(&table, elapsed));
            report(2, "Levy-Khintchine consistency", levy_khintchine(&table));
            report(3, "exact cancellation", exact_cancellation());
            report(4, "closed-form witnesses", closed_form_witnesses());
            report(5, "Kronecker witnesses", kronecker_witnesses());
            report(6, "series certificate", series_certificate());
            report(7, "oracle triangle", oracle_triangle(&table));
        }
        Err(e) => {
            for (n, name) in [(1, "table reproduction"), (2, "Levy-Khintchine consistency"), (7, "oracle triangle")] {
                report(n, name, Err(e.clone()));
            }
            report(3, "exact cancellation", exact_cancellation());
            report(4, "closed-form witnesses", closed_form_witnesses());
            report(5, "Kronecker witnesses", kronecker_witnesses());
            report(6, "series certificate", series_certificate());
        }
    }
    report(8, "sampler", sampler());
    report(9, "DSL round-trip", dsl_round_trip());
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
