use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use eulerlab_core::classify::{classify, find_nd_witness_with, ClassifyOptions, Verdict};
use eulerlab_core::euler::{EvalPoint, Product};
use eulerlab_core::expansion::{choose_order, SignedAtomicMeasure, MAX_TRUNCATION};
use eulerlab_core::kronecker::DEFAULT_KRONECKER_BUDGET;
use eulerlab_core::reproduce::reproduce;
use eulerlab_core::sampler::sample;
use eulerlab_core::series::{coeff_lattice, shintani_distribution};
use eulerlab_core::{dsl, fmt17, EulerError};

/// Smallest `<a, sigma>` accepted on the command line.
const SIGMA_MIN: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "eulerlab", version, about = "Classify normalized two-variable finite Euler products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a product as ID, QID, ND or INCONCLUSIVE.
    Classify(Common),
    /// Verdict table for all eleven families over primes and sigmas.
    Reproduce {
        /// Comma-separated primes (at least two distinct).
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        primes: Vec<u64>,
        /// Comma-separated sigma values; every ordered pair is used.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        sigmas: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the raw and normalized product at sigma + i t.
    Eval {
        #[arg(long, value_parser = parse_pair, default_value = "0,0")]
        t: [f64; 2],
        #[command(flatten)]
        common: Common,
    },
    /// Atom table of the log expansion (CSV unless --json).
    Expand {
        /// Truncation order; chosen from --truncation-target when omitted.
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Series coefficients at one prime, or the induced distribution.
    Series {
        /// Prime whose lattice is printed; required when the product has several.
        #[arg(long)]
        prime: Option<u64>,
        /// Print the combined distribution (x1, x2, mass) instead of the lattice.
        #[arg(long)]
        distribution: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Search for t0 with |f(t0)| > 1.
    Witness(Common),
    /// Compound-Poisson samples from a nonnegative expansion.
    Sample {
        #[arg(short = 'n', long, default_value_t = 1000)]
        n: usize,
        /// Also report the empirical characteristic function at this point.
        #[arg(long, value_parser = parse_pair)]
        t: Option<[f64; 2]>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Product in the text grammar; omitted means the empty product.
    #[arg(long)]
    product: Option<String>,
    #[arg(long, value_parser = parse_pair, default_value = "1,1")]
    sigma: [f64; 2],
    #[arg(long, default_value_t = 64)]
    series_order: usize,
    #[arg(long, default_value_t = 1_000_000)]
    witness_budget: usize,
    #[arg(long, default_value_t = 1e-10)]
    truncation_target: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Human,
    Json,
    Csv,
}

impl Common {
    fn mode(&self) -> Mode {
        match (self.json, self.csv) {
            (true, _) => Mode::Json,
            (_, true) => Mode::Csv,
            _ => Mode::Human,
        }
    }

    fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            series_order: self.series_order,
            witness_budget: self.witness_budget,
            kronecker_budget: DEFAULT_KRONECKER_BUDGET,
            truncation_target: self.truncation_target,
        }
    }

    fn product(&self) -> Result<Product, CliError> {
        let product = match &self.product {
            Some(text) => dsl::parse(text).map_err(|e| CliError::parse(text, e))?,
            None => Product::empty(),
        };
        for f in product.factors() {
            let s = f.pair(self.sigma);
            if !(s >= SIGMA_MIN) {
                return Err(EulerError::DomainViolation(format!(
                    "<a, sigma> = {s} is below {SIGMA_MIN:e} for {f}"
                ))
                .into());
            }
        }
        Ok(product)
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected two comma-separated numbers, got `{s}`"));
    };
    let parse = |x: &str| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok([parse(a)?, parse(b)?])
}

#[derive(Debug)]
struct CliError(String);

impl CliError {
    fn parse(text: &str, e: EulerError) -> Self {
        match e {
            EulerError::Syntax { position, .. } => {
                CliError(format!("{e}\n  {text}\n  {}^", " ".repeat(position)))
            }
            other => CliError(other.to_string()),
        }
    }
}

impl From<EulerError> for CliError {
    fn from(e: EulerError) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(e.to_string())
    }
}

struct Report {
    text: String,
    exit: u8,
}

impl Report {
    fn ok(text: String) -> Self {
        Self { text, exit: 0 }
    }
}

fn c_json(z: num_complex::Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im, "modulus": z.norm() })
}

fn run(command: Command) -> Result<(Report, Option<PathBuf>), CliError> {
    match command {
        Command::Classify(common) => {
            let product = common.product()?;
            let c = classify(&product, common.sigma, &common.options())?;
            let exit = if c.verdict == Verdict::Inconclusive { 2 } else { 0 };
            let text = match common.mode() {
                Mode::Json => serde_json::to_string_pretty(&c)? + "\n",
                Mode::Csv => {
                    let (t, m) = c.witness.map_or((String::new(), String::new()), |w| {
                        (format!("{};{}", fmt17(w.t[0]), fmt17(w.t[1])), fmt17(w.modulus))
                    });
                    format!(
                        "product,sigma1,sigma2,verdict,series_order,witness_t,witness_modulus\n{},{},{},{},{},{},{}\n",
                        dsl::format(&product),
                        fmt17(common.sigma[0]),
                        fmt17(common.sigma[1]),
                        c.verdict,
                        c.series_order,
                        t,
                        m
                    )
                }
                Mode::Human => human_classification(&product, &c),
            };
            Ok((Report { text, exit }, common.out))
        }
        Command::Reproduce { primes, sigmas, common } => {
            let report = reproduce(&primes, &sigmas, &common.options())?;
            let exit = if report.all_passed() { 0 } else { 3 };
            let text = match common.mode() {
                Mode::Json => {
                    let rows: Vec<_> = report
                        .rows
                        .iter()
                        .map(|r| {
                            json!({
                                "family": r.family.label(),
                                "p": r.p,
                                "q": r.q,
                                "sigma": r.sigma,
                                "expected": r.expected,
                                "computed": r.classification.verdict,
                                "pass": r.passed(),
                                "witness": r.classification.witness,
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&json!({
                        "rows": rows,
                        "passed": report.passed(),
                        "total": report.rows.len(),
                        "summary": report.summary(),
                    }))? + "\n"
                }
                Mode::Csv => report.to_csv(),
                Mode::Human => report.to_text(),
            };
            Ok((Report { text, exit }, common.out))
        }
        Command::Eval { t, common } => {
            let product = common.product()?;
            let point = EvalPoint::new(common.sigma, t);
            let raw = product.eval(&point)?;
            let norm = product.normalize(&point)?;
            let text = match common.mode() {
                Mode::Json => {
                    serde_json::to_string_pretty(&json!({
                        "product": dsl::format(&product),
                        "sigma": common.sigma,
                        "t": t,
                        "value": c_json(raw),
                        "normalized": c_json(norm),
                    }))? + "\n"
                }
                Mode::Csv => format!(
                    "value_re,value_im,normalized_re,normalized_im,modulus\n{},{},{},{},{}\n",
                    fmt17(raw.re),
                    fmt17(raw.im),
                    fmt17(norm.re),
                    fmt17(norm.im),
                    fmt17(norm.norm())
                ),
                Mode::Human => format!(
                    "product    {}\nvalue      {} {:+}i\nnormalized {} {:+}i\n|normalized| {}\n",
                    dsl::format(&product),
                    raw.re,
                    raw.im,
                    norm.re,
                    norm.im,
                    norm.norm()
                ),
            };
            Ok((Report::ok(text), common.out))
        }
        Command::Expand { order, common } => {
            let product = common.product()?;
            let order = match order {
                Some(r) => r,
                None => choose_order(&product, common.sigma, common.truncation_target, MAX_TRUNCATION)?,
            };
            let m = SignedAtomicMeasure::expand(&product, common.sigma, order)?;
            let text = match common.mode() {
                Mode::Json => serde_json::to_string_pretty(&m)? + "\n",
                _ => m.to_csv(),
            };
            Ok((Report::ok(text), common.out))
        }
        Command::Series { prime, distribution, common } => {
            let product = common.product()?;
            let text = if distribution {
                let d = shintani_distribution(&product, common.sigma, common.series_order)?;
                match common.mode() {
                    Mode::Json => {
                        let support: Vec<_> = d.support().into_iter().map(|(x, m)| json!([x[0], x[1], m])).collect();
                        serde_json::to_string_pretty(&json!({
                            "normalizer": d.normalizer,
                            "mass_deficit": d.mass_deficit,
                            "degree": d.degree,
                            "support": support,
                        }))? + "\n"
                    }
                    _ => d.to_csv(),
                }
            } else {
                let primes = product.primes();
                let p = match (prime, primes.as_slice()) {
                    (Some(p), _) => p,
                    (None, [p]) => *p,
                    (None, []) => return Err(CliError("empty product has no series lattice".into())),
                    (None, _) => return Err(CliError("product has several primes; pass --prime".into())),
                };
                let lattice = coeff_lattice(&product, p, common.series_order);
                match common.mode() {
                    Mode::Json => {
                        let entries: Vec<_> = lattice
                            .iter()
                            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                            .map(|((i, j), c)| json!([i, j, c.numer().to_string(), c.denom().to_string()]))
                            .collect();
                        serde_json::to_string_pretty(&json!({
                            "p": p,
                            "degree": lattice.degree(),
                            "nonnegative": lattice.is_nonnegative(),
                            "entries": entries,
                        }))? + "\n"
                    }
                    _ => lattice.to_csv(),
                }
            };
            Ok((Report::ok(text), common.out))
        }
        Command::Witness(common) => {
            let product = common.product()?;
            let w = find_nd_witness_with(&product, common.sigma, common.witness_budget, DEFAULT_KRONECKER_BUDGET)?;
            let text = match common.mode() {
                Mode::Json => serde_json::to_string_pretty(&json!({ "witness": w }))? + "\n",
                Mode::Csv => match w {
                    Some(w) => format!("t1,t2,modulus\n{},{},{}\n", fmt17(w.t[0]), fmt17(w.t[1]), fmt17(w.modulus)),
                    None => "t1,t2,modulus\n".to_string(),
                },
                Mode::Human => match w {
                    Some(w) => format!(
                        "witness t0 = ({}, {})  |f(t0)| = {}  (stage: {:?})\n",
                        w.t[0], w.t[1], w.modulus, w.stage
                    ),
                    None => "no witness found within budget\n".to_string(),
                },
            };
            Ok((Report::ok(text), common.out))
        }
        Command::Sample { n, t, common } => {
            let product = common.product()?;
            let m = SignedAtomicMeasure::expand_to(&product, common.sigma, common.truncation_target)?;
            let batch = sample(&m, n, common.seed)?;
            let text = match common.mode() {
                Mode::Csv => batch.to_csv(),
                Mode::Json => {
                    let cf = t.map(|t| batch.empirical_cf(t)).transpose()?;
                    serde_json::to_string_pretty(&json!({
                        "n": n,
                        "seed": common.seed,
                        "points": batch.points,
                        "empirical_cf": cf.map(c_json),
                    }))? + "\n"
                }
                Mode::Human => {
                    let mean = batch.mean();
                    let mut s = format!("n = {n}, seed = {}, mean = ({}, {})\n", common.seed, mean[0], mean[1]);
                    if let Some(t) = t {
                        let e = batch.empirical_cf(t)?;
                        let a = product.normalize(&EvalPoint::new(common.sigma, t))?;
                        s += &format!("empirical cf = {} {:+}i, normalized = {} {:+}i\n", e.re, e.im, a.re, a.im);
                    }
                    s
                }
            };
            Ok((Report::ok(text), common.out))
        }
    }
}

fn human_classification(product: &Product, c: &eulerlab_core::Classification) -> String {
    use eulerlab_core::Evidence;
    let mut s = format!(
        "product  {}\nsigma    ({}, {})\nverdict  {}\n",
        dsl::format(product),
        c.sigma[0],
        c.sigma[1],
        c.label()
    );
    let negatives = |atoms: &[eulerlab_core::expansion::Atom]| {
        atoms
            .iter()
            .take(5)
            .map(|a| format!("  p={} r={} a=({},{}) coeff={}\n", a.key.p, a.key.r, a.key.a[0], a.key.a[1], a.coeff))
            .collect::<String>()
    };
    match &c.evidence {
        Evidence::NonnegativeAtoms { truncation_order, tail_bound, atoms } => {
            s += &format!(
                "evidence {} nonnegative atoms (R = {truncation_order}, tail <= {tail_bound:e})\n",
                atoms.len()
            );
        }
        Evidence::SignedAtomsPlusCf { series_order, negative_atoms, .. } => {
            s += &format!("evidence series coefficients nonnegative to order {series_order}; negative atoms:\n");
            s += &negatives(negative_atoms);
        }
        Evidence::Witness { t, modulus, stage, .. } => {
            s += &format!("evidence |f(t0)| = {modulus} at t0 = ({}, {}) [{stage:?}]\n", t[0], t[1]);
        }
        Evidence::Exhausted { witness_budget, series_order, negative_coefficient, negative_atoms } => {
            let (p, i, j) = negative_coefficient;
            s += &format!(
                "evidence no witness in {witness_budget} grid points; c({i},{j}) < 0 at p = {p} (order {series_order}); negative atoms:\n"
            );
            s += &negatives(negative_atoms);
        }
    }
    s
}

fn init_threads() {
    if let Some(n) = std::env::var("EULERLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    match run(cli.command) {
        Ok((report, out)) => {
            let written = match out {
                Some(path) => fs::write(&path, &report.text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(report.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(report.exit)
        }
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
