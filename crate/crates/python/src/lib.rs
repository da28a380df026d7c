//! Python bindings: `import eulerlab`.

use num_complex::Complex64;
use num_rational::Rational64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use eulerlab_core::classify::{find_nd_witness_with, ClassifyOptions};
use eulerlab_core::kronecker::DEFAULT_KRONECKER_BUDGET;
use eulerlab_core::series::ShintaniDistribution;
use eulerlab_core::{dsl, EulerError, EvalPoint, Factor, Family, KroneckerQuery, SampleBatch, SignedAtomicMeasure};

fn err(e: EulerError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn from_json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn fraction<'py>(py: Python<'py>, num: impl ToString, den: impl ToString) -> PyResult<Bound<'py, PyAny>> {
    PyModule::import(py, "fractions")?
        .getattr("Fraction")?
        .call1((format!("{}/{}", num.to_string(), den.to_string()),))
}

/// A finite Euler product. `Product("G(2)*H(3)")` parses the text grammar;
/// `Product()` is the empty product.
#[pyclass(name = "Product", module = "eulerlab", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyProduct(eulerlab_core::Product);

#[pymethods]
impl PyProduct {
    #[new]
    #[pyo3(signature = (text=None))]
    fn new(text: Option<&str>) -> PyResult<Self> {
        match text {
            Some(t) => dsl::parse(t).map(Self).map_err(err),
            None => Ok(Self(eulerlab_core::Product::empty())),
        }
    }

    /// One of `Gsharp`, `Gstar`, `F`, `G`, `H` at prime `p`.
    #[staticmethod]
    fn named(family: &str, p: u64) -> PyResult<Self> {
        let f: Family = family.parse().map_err(err)?;
        eulerlab_core::Product::named(f, p).map(Self).map_err(err)
    }

    /// Single factor `(1 - alpha p^{-<a, s>})^{-1}` with `alpha = num/den`.
    #[staticmethod]
    fn factor(p: u64, num: i64, den: i64, a: (u32, u32)) -> PyResult<Self> {
        if den == 0 {
            return Err(PyValueError::new_err("zero denominator"));
        }
        let f = Factor::new(p, Rational64::new(num, den), [a.0, a.1]).map_err(err)?;
        Ok(Self(eulerlab_core::Product::new(vec![f])))
    }

    /// `[(p, (num, den), (a1, a2)), ...]` in canonical order.
    fn factors(&self) -> Vec<(u64, (i64, i64), (u32, u32))> {
        self.0
            .sorted_factors()
            .iter()
            .map(|f| {
                let a = f.direction();
                (f.p(), (*f.alpha().numer(), *f.alpha().denom()), (a[0], a[1]))
            })
            .collect()
    }

    fn primes(&self) -> Vec<u64> {
        self.0.primes()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(self.0.times(&other.0))
    }

    fn __str__(&self) -> String {
        dsl::format(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Product({:?})", dsl::format(&self.0))
    }

    fn eval(&self, sigma: (f64, f64), t: (f64, f64)) -> PyResult<Complex64> {
        self.0.eval(&EvalPoint::new([sigma.0, sigma.1], [t.0, t.1])).map_err(err)
    }

    fn normalize(&self, sigma: (f64, f64), t: (f64, f64)) -> PyResult<Complex64> {
        self.0.normalize(&EvalPoint::new([sigma.0, sigma.1], [t.0, t.1])).map_err(err)
    }
}

/// Truncated log expansion as a signed atomic measure.
#[pyclass(name = "Measure", module = "eulerlab", frozen)]
struct PyMeasure(SignedAtomicMeasure);

#[pymethods]
impl PyMeasure {
    #[getter]
    fn order(&self) -> usize {
        self.0.order
    }

    #[getter]
    fn tail_bound(&self) -> f64 {
        self.0.tail_bound
    }

    fn total_mass(&self) -> f64 {
        self.0.total_mass()
    }

    fn total_variation(&self) -> f64 {
        self.0.total_variation()
    }

    fn has_negative(&self) -> bool {
        self.0.has_negative()
    }

    /// `[{"p", "r", "a", "coeff", "weight", "location"}, ...]` with `coeff` a `Fraction`.
    fn atoms<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.0
            .atoms
            .iter()
            .map(|a| {
                let d = pyo3::types::PyDict::new(py);
                d.set_item("p", a.key.p)?;
                d.set_item("r", a.key.r)?;
                d.set_item("a", (a.key.a[0], a.key.a[1]))?;
                d.set_item("coeff", fraction(py, a.coeff.numer(), a.coeff.denom())?)?;
                d.set_item("weight", a.weight)?;
                d.set_item("location", (a.location[0], a.location[1]))?;
                Ok(d.into_any())
            })
            .collect()
    }

    fn lk_eval(&self, t: (f64, f64)) -> Complex64 {
        self.0.lk_eval([t.0, t.1])
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }
}

#[pyclass(name = "ShintaniDistribution", module = "eulerlab", frozen)]
struct PyShintani(ShintaniDistribution);

#[pymethods]
impl PyShintani {
    #[getter]
    fn mass_deficit(&self) -> f64 {
        self.0.mass_deficit
    }

    fn total_mass(&self) -> f64 {
        self.0.total_mass()
    }

    fn cf(&self, t: (f64, f64)) -> Complex64 {
        self.0.cf_oracle([t.0, t.1])
    }

    /// `[((x1, x2), mass), ...]`.
    fn support(&self) -> Vec<((f64, f64), f64)> {
        self.0.support().into_iter().map(|(x, m)| ((x[0], x[1]), m)).collect()
    }
}

#[pyclass(name = "SampleBatch", module = "eulerlab", frozen)]
struct PySample(SampleBatch);

#[pymethods]
impl PySample {
    fn points(&self) -> Vec<(f64, f64)> {
        self.0.points.iter().map(|x| (x[0], x[1])).collect()
    }

    fn mean(&self) -> (f64, f64) {
        let m = self.0.mean();
        (m[0], m[1])
    }

    fn empirical_cf(&self, t: (f64, f64)) -> PyResult<Complex64> {
        self.0.empirical_cf([t.0, t.1]).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.points.len()
    }
}

fn pair(s: (f64, f64)) -> [f64; 2] {
    [s.0, s.1]
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyProduct> {
    dsl::parse(text).map(PyProduct).map_err(err)
}

#[pyfunction]
fn format(product: &PyProduct) -> String {
    dsl::format(&product.0)
}

#[pyfunction]
fn tail_bound(product: &PyProduct, sigma: (f64, f64), order: usize) -> PyResult<f64> {
    eulerlab_core::tail_bound(&product.0, pair(sigma), order).map_err(err)
}

/// Expansion to `order`, or to the smallest order whose tail bound is below `target`.
#[pyfunction]
#[pyo3(signature = (product, sigma, order=None, target=1e-10))]
fn expand(product: &PyProduct, sigma: (f64, f64), order: Option<usize>, target: f64) -> PyResult<PyMeasure> {
    let m = match order {
        Some(r) => SignedAtomicMeasure::expand(&product.0, pair(sigma), r),
        None => SignedAtomicMeasure::expand_to(&product.0, pair(sigma), target),
    };
    m.map(PyMeasure).map_err(err)
}

/// `c[i][j]` as `Fraction`s for `0 <= i, j <= degree`.
#[pyfunction]
fn coeff_lattice<'py>(py: Python<'py>, product: &PyProduct, p: u64, degree: usize) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    let lattice = eulerlab_core::coeff_lattice(&product.0, p, degree);
    (0..=degree)
        .map(|i| {
            (0..=degree)
                .map(|j| {
                    let c = lattice.get(i, j);
                    fraction(py, c.numer(), c.denom())
                })
                .collect()
        })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (product, sigma, degree=64))]
fn shintani_distribution(product: &PyProduct, sigma: (f64, f64), degree: usize) -> PyResult<PyShintani> {
    eulerlab_core::shintani_distribution(&product.0, pair(sigma), degree)
        .map(PyShintani)
        .map_err(err)
}

/// Classification as a dict with keys `verdict`, `sigma`, `evidence`, `series_order`, `witness`.
#[pyfunction]
#[pyo3(signature = (product, sigma=(1.0, 1.0), series_order=64, witness_budget=1_000_000, truncation_target=1e-10))]
fn classify<'py>(
    py: Python<'py>,
    product: &PyProduct,
    sigma: (f64, f64),
    series_order: usize,
    witness_budget: usize,
    truncation_target: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = ClassifyOptions {
        series_order,
        witness_budget,
        kronecker_budget: DEFAULT_KRONECKER_BUDGET,
        truncation_target,
    };
    let c = py
        .detach(|| eulerlab_core::classify(&product.0, pair(sigma), &opts))
        .map_err(err)?;
    from_json(py, &c)
}

/// `((t1, t2), modulus)` or `None`.
#[pyfunction]
#[pyo3(signature = (product, sigma=(1.0, 1.0), budget=1_000_000))]
fn find_nd_witness(py: Python<'_>, product: &PyProduct, sigma: (f64, f64), budget: usize) -> PyResult<Option<((f64, f64), f64)>> {
    let w = py
        .detach(|| find_nd_witness_with(&product.0, pair(sigma), budget, DEFAULT_KRONECKER_BUDGET))
        .map_err(err)?;
    Ok(w.map(|w| ((w.t[0], w.t[1]), w.modulus)))
}

/// Smallest `t > 0` found with `t log p_k / (2 pi)` within `epsilon` of `phi_k` mod 1.
#[pyfunction]
#[pyo3(signature = (primes, phis, epsilon, budget=100_000))]
fn kronecker_t(primes: Vec<u64>, phis: Vec<f64>, epsilon: f64, budget: usize) -> PyResult<f64> {
    eulerlab_core::kronecker_t(&KroneckerQuery::for_primes(&primes, phis, epsilon, budget)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (product, sigma, n, seed=0, target=1e-10))]
fn sample(product: &PyProduct, sigma: (f64, f64), n: usize, seed: u64, target: f64) -> PyResult<PySample> {
    let m = SignedAtomicMeasure::expand_to(&product.0, pair(sigma), target).map_err(err)?;
    eulerlab_core::sample(&m, n, seed).map(PySample).map_err(err)
}

/// Verdict table as a dict with `rows` and `summary`.
#[pyfunction]
fn reproduce<'py>(py: Python<'py>, primes: Vec<u64>, sigmas: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let report = py
        .detach(|| eulerlab_core::reproduce(&primes, &sigmas, &ClassifyOptions::default()))
        .map_err(err)?;
    let out = from_json(py, &report)?;
    out.set_item("summary", report.summary())?;
    Ok(out)
}

#[pymodule]
fn eulerlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProduct>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyShintani>()?;
    m.add_class::<PySample>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(format, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(coeff_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(shintani_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(find_nd_witness, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker_t, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
