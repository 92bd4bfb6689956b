//! Python bindings: `import pyopuc`.

use num_complex::Complex64;
use opuc::analytic::{self, AnalyticEval, RadialLadder};
use opuc::lyapunov::{self, CoefficientLaw};
use opuc::relative::{self, RelativeSzego};
use opuc::szego;
use opuc::transfer;
use opuc::{CircleMeasure, MeasureSpec, VerblunskySeq, Weight};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(pyopuc, OpucError, PyValueError, "Raised for every numerical or input error of the core library.");

fn err(e: opuc::OpucError) -> PyErr {
    OpucError::new_err(e.to_string())
}

trait PyResultExt<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> PyResultExt<T> for opuc::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Probability measure on the unit circle: a weight relative to dθ/2π plus point masses.
#[pyclass(name = "Measure", module = "pyopuc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMeasure {
    inner: CircleMeasure,
}

impl PyMeasure {
    fn eval(&self) -> AnalyticEval {
        AnalyticEval::new(&self.inner)
    }
}

#[pymethods]
impl PyMeasure {
    #[staticmethod]
    fn lebesgue() -> Self {
        Self { inner: CircleMeasure::lebesgue() }
    }

    #[staticmethod]
    fn bernstein_szego(alpha: f64) -> PyResult<Self> {
        Ok(Self { inner: CircleMeasure::bernstein_szego(alpha).py_err()? })
    }

    /// `cos[0] + Σ cos[k] cos kθ + Σ sin[k-1] sin kθ`, normalized, with optional atoms `(θ, mass)`.
    #[staticmethod]
    #[pyo3(signature = (cos, sin = Vec::new(), atoms = Vec::new(), grid = None))]
    fn fourier(cos: Vec<f64>, sin: Vec<f64>, atoms: Vec<(f64, f64)>, grid: Option<usize>) -> PyResult<Self> {
        let spec = MeasureSpec { weight: Some(Weight::Fourier { cos, sin }), atoms, grid };
        Ok(Self { inner: spec.to_measure().py_err()? })
    }

    /// Weight samples on the uniform grid θⱼ = 2πj/N (N a power of two), plus atoms.
    #[staticmethod]
    #[pyo3(signature = (values, atoms = Vec::new()))]
    fn samples(values: Vec<f64>, atoms: Vec<(f64, f64)>) -> PyResult<Self> {
        let spec = MeasureSpec { weight: Some(Weight::Samples { values }), atoms, grid: None };
        Ok(Self { inner: spec.to_measure().py_err()? })
    }

    /// Parses the JSON measure spec used by the command-line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: MeasureSpec = serde_json::from_str(text).map_err(|e| OpucError::new_err(e.to_string()))?;
        Ok(Self { inner: spec.to_measure().py_err()? })
    }

    /// Names of the built-in preset gallery.
    #[staticmethod]
    fn gallery_names() -> Vec<&'static str> {
        opuc::measure::gallery().into_iter().map(|(name, _)| name).collect()
    }

    #[staticmethod]
    fn from_gallery(name: &str) -> PyResult<Self> {
        opuc::measure::gallery()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, inner)| Self { inner })
            .ok_or_else(|| OpucError::new_err(format!("unknown preset {name}")))
    }

    #[getter]
    fn grid(&self) -> usize {
        self.inner.grid()
    }

    #[getter]
    fn atoms(&self) -> Vec<(f64, f64)> {
        self.inner.atoms().iter().map(|a| (a.theta, a.mass)).collect()
    }

    fn total_mass(&self) -> f64 {
        self.inner.total_mass()
    }

    fn moments(&self, n_max: usize) -> PyResult<Vec<Complex64>> {
        Ok(self.inner.moments(n_max).py_err()?.as_slice().to_vec())
    }

    fn verblunsky(&self, n: usize) -> PyResult<PyVerblunsky> {
        Ok(PyVerblunsky { inner: szego::verblunsky_from_measure(&self.inner, n).py_err()? })
    }

    fn caratheodory(&self, z: Complex64) -> PyResult<Complex64> {
        self.eval().caratheodory(z).py_err()
    }

    fn r_function(&self, z: Complex64) -> PyResult<Complex64> {
        self.eval().r_function(z).py_err()
    }

    fn schur(&self, z: Complex64) -> PyResult<Complex64> {
        self.eval().schur(z).py_err()
    }

    fn szego_function(&self, z: Complex64) -> PyResult<Complex64> {
        self.eval().szego_function(z).py_err()
    }

    fn delta0d(&self, z: Complex64) -> PyResult<Complex64> {
        RelativeSzego::from_measure(&self.inner).and_then(|r| r.eval(z)).py_err()
    }

    fn boundary_weight(&self, theta: f64) -> PyResult<f64> {
        analytic::boundary_weight(&self.inner, theta, &RadialLadder::default()).py_err()
    }

    fn pure_point_mass(&self, theta: f64) -> PyResult<f64> {
        analytic::pure_point_mass(&self.inner, theta, &RadialLadder::default()).py_err()
    }

    /// Largest per-step or cumulative error of the step-by-step sum rules.
    fn step_sum_rule_error(&self, n_steps: usize) -> PyResult<f64> {
        Ok(relative::step_sum_rule_measure(&self.inner, n_steps).py_err()?.max_error())
    }

    /// `(∏ρⱼ², ∫log w⁽ⁿ⁾, ∏ρⱼ² − exp∫log w)` at truncation `n`.
    fn szego_theorem(&self, n: usize) -> PyResult<(f64, f64, f64)> {
        let r = relative::szego_theorem_measure(&self.inner, n).py_err()?;
        Ok((r.product, r.entropy, r.inequality_margin.unwrap_or(f64::NAN)))
    }

    fn __repr__(&self) -> String {
        format!("Measure({:?}, atoms={}, grid={})", self.inner.weight(), self.inner.atoms().len(), self.inner.grid())
    }
}

/// Finite Verblunsky sequence α₀ … α_{n−1}; later coefficients read as zero.
#[pyclass(name = "Verblunsky", module = "pyopuc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyVerblunsky {
    inner: VerblunskySeq,
}

#[pymethods]
impl PyVerblunsky {
    #[new]
    fn new(alphas: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self { inner: VerblunskySeq::new(alphas).py_err()? })
    }

    #[getter]
    fn alphas(&self) -> Vec<Complex64> {
        self.inner.alphas().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn rho(&self, j: usize) -> f64 {
        self.inner.rho(j)
    }

    fn shift(&self, k: usize) -> Self {
        Self { inner: self.inner.shift(k) }
    }

    fn aleksandrov(&self, lam: Complex64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.aleksandrov(lam).py_err()? })
    }

    /// Coefficient lists of the orthonormal `(φₖ, φₖ*)`, `k = 0..=upto`.
    fn polynomials(&self, upto: usize) -> PyResult<Vec<(Vec<Complex64>, Vec<Complex64>)>> {
        Ok(szego::polys_from_verblunsky(&self.inner, upto).py_err()?.into_iter().map(|p| (p.phi, p.phi_star)).collect())
    }

    /// Point values `(φₖ(z), φₖ*(z))` for `k = 0..=upto`.
    fn values(&self, z: Complex64, upto: usize) -> Vec<(Complex64, Complex64)> {
        szego::opuc_values(&self.inner, z, upto)
    }

    fn caratheodory(&self, z: Complex64) -> PyResult<Complex64> {
        transfer::caratheodory_of(&self.inner, z).py_err()
    }

    fn schur(&self, z: Complex64) -> PyResult<Complex64> {
        analytic::schur_from_alphas(&self.inner, z).py_err()
    }

    fn delta0d(&self, z: Complex64) -> PyResult<Complex64> {
        relative::delta0d(&self.inner, z).py_err()
    }

    fn m_tilde(&self, z: Complex64) -> PyResult<Complex64> {
        transfer::caratheodory_of(&self.inner, z).and_then(transfer::m_tilde).py_err()
    }

    fn m_plus(&self, z: Complex64, n: usize) -> PyResult<Vec<Complex64>> {
        transfer::m_plus_fold(&self.inner, z, n).py_err()
    }

    /// `(uₖ, uₖ*)` of the ℓ² Weyl solution for `k = 0..=n`.
    fn weyl_solution(&self, z: Complex64, n: usize) -> PyResult<Vec<(Complex64, Complex64)>> {
        transfer::weyl_solution(&self.inner, z, n).py_err()
    }

    /// Least-squares estimate of `F(z)` from the window `[k/2, k]`.
    fn weyl_beta(&self, z: Complex64, k: usize) -> PyResult<Complex64> {
        Ok(transfer::weyl_beta(&self.inner, z, k).py_err()?.beta)
    }

    /// `(Tₙ(z) as [[a, b], [c, d]], det Tₙ(z))` for the first `n` coefficients.
    fn transfer(&self, z: Complex64, n: usize) -> PyResult<([[Complex64; 2]; 2], Complex64)> {
        let t = transfer::cocycle(&self.inner, z, n).py_err()?;
        let m = t.matrix();
        Ok(([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]], t.det()))
    }

    fn ratio_identity_residual(&self, z: Complex64) -> PyResult<f64> {
        Ok(relative::ratio_identity_check(&self.inner, z).py_err()?.max())
    }

    fn step_sum_rule_error(&self, n_steps: usize) -> PyResult<f64> {
        Ok(relative::step_sum_rule(&self.inner, n_steps).py_err()?.max_error())
    }

    /// `(∏ρⱼ², ∫log w⁽ⁿ⁾)` for the first `n` coefficients.
    fn szego_theorem(&self, n: usize) -> PyResult<(f64, f64)> {
        let r = relative::szego_theorem_check(&self.inner, n).py_err()?;
        Ok((r.product, r.entropy))
    }

    fn lyapunov(&self, z: Complex64) -> PyResult<PyLyapunovReport> {
        Ok(lyapunov::lyapunov_deterministic(&self.inner, z).py_err()?.into())
    }

    fn __repr__(&self) -> String {
        format!("Verblunsky({:?})", self.inner.alphas())
    }
}

#[pyclass(name = "LyapunovReport", module = "pyopuc", frozen, get_all)]
struct PyLyapunovReport {
    z: Complex64,
    gamma2: f64,
    gamma: f64,
    mc_stderr: f64,
    gamma2_norm: f64,
    kotani_residual: f64,
    kotani_holds: bool,
    non_convergent: bool,
}

impl From<lyapunov::LyapunovReport> for PyLyapunovReport {
    fn from(r: lyapunov::LyapunovReport) -> Self {
        Self {
            z: r.z,
            gamma2: r.gamma2,
            gamma: r.gamma,
            mc_stderr: r.mc_stderr,
            gamma2_norm: r.gamma2_norm,
            kotani_residual: r.kotani_residual(),
            kotani_holds: r.kotani_holds(),
            non_convergent: r.non_convergent,
        }
    }
}

#[pymethods]
impl PyLyapunovReport {
    fn __repr__(&self) -> String {
        format!(
            "LyapunovReport(gamma2={}, gamma={}, stderr={}, kotani_residual={})",
            self.gamma2, self.gamma, self.mc_stderr, self.kotani_residual
        )
    }
}

/// Monte Carlo Kotani check for i.i.d. coefficients uniform on `|α| ≤ radius`.
#[pyfunction]
#[pyo3(signature = (radius, z, n_steps = 2000, n_samples = 200, seed = 42))]
fn lyapunov_uniform_disk(
    py: Python<'_>,
    radius: f64,
    z: Complex64,
    n_steps: usize,
    n_samples: usize,
    seed: u64,
) -> PyResult<PyLyapunovReport> {
    let law = CoefficientLaw::UniformDisk { radius };
    let report = py.detach(|| lyapunov::lyapunov_stochastic(&law, z, n_steps, n_samples, seed)).py_err()?;
    Ok(report.into())
}

/// `f₊f₋/(1 − z f₊f₋)` for the two-sided sequence `(α₀, α₁, …)`, `(α₋₁, α₋₂, …)`.
#[pyfunction]
fn cmv_green(plus: &PyVerblunsky, minus: &PyVerblunsky, z: Complex64) -> PyResult<Complex64> {
    transfer::cmv_green_two_sided(&plus.inner, &minus.inner, z).py_err()
}

#[pymodule]
fn pyopuc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyVerblunsky>()?;
    m.add_class::<PyLyapunovReport>()?;
    m.add_function(wrap_pyfunction!(lyapunov_uniform_disk, m)?)?;
    m.add_function(wrap_pyfunction!(cmv_green, m)?)?;
    m.add("OpucError", m.py().get_type::<OpucError>())?;
    Ok(())
}
