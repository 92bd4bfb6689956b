//! Carathéodory, Schur and Szegő functions on the open disk.
//!
//! Measure-backed values come from an [`AnalyticEval`], which holds the
//! Taylor coefficients of the weight part of `F` and of `log w` (both from
//! one FFT of the grid samples) plus the exact atom terms. Coefficient-backed
//! Schur functions are finite continued fractions with a zero tail.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{OpucError, Result};
use crate::fourier::{grid_angle, HerglotzSeries};
use crate::measure::{Atom, CircleMeasure, Weight, DEFAULT_GRID};
use crate::szego::VerblunskySeq;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Interior evaluators require `|z| ≤ 1 − INTERIOR_MARGIN`.
pub const INTERIOR_MARGIN: f64 = 1e-9;
/// Weight samples below this floor send `log w` to the −∞ sentinel.
pub const LOG_FLOOR: f64 = 1e-300;

// Removable singularities at the origin are filled with the Cauchy integral
// over |ζ| = CAUCHY_RADIUS for every |z| < REMOVABLE_RADIUS.
const REMOVABLE_RADIUS: f64 = 0.25;
const CAUCHY_RADIUS: f64 = 0.5;
const CAUCHY_NODES: usize = 64;

pub fn check_interior(z: Complex64) -> Result<()> {
    if z.is_finite() && z.norm() <= 1.0 - INTERIOR_MARGIN {
        Ok(())
    } else {
        Err(OpucError::BoundaryPoint { re: z.re, im: z.im })
    }
}

/// Cauchy integral `(1/2πi)∮ g(ζ)/(ζ−z) dζ` on `|ζ| = 1/2`, trapezoid rule.
/// Exact up to `(|z|/R)^M` for `g` analytic on the closed disk of radius `R`.
fn cauchy_fill(z: Complex64, g: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let mut acc = ZERO;
    for k in 0..CAUCHY_NODES {
        let zeta = Complex64::from_polar(CAUCHY_RADIUS, grid_angle(k, CAUCHY_NODES));
        acc += g(zeta) * zeta / (zeta - z);
    }
    acc / CAUCHY_NODES as f64
}

/// Herglotz kernel `(e^{iθ}+z)/(e^{iθ}−z)`.
fn herglotz_kernel(point: Complex64, z: Complex64) -> Complex64 {
    (point + z) / (point - z)
}

/// Evaluator bundle for the analytic functions attached to one measure.
#[derive(Debug, Clone)]
pub struct AnalyticEval {
    weight_series: HerglotzSeries,
    log_series: Option<HerglotzSeries>,
    log_integral: f64,
    atoms: Vec<Atom>,
    grid: usize,
}

impl AnalyticEval {
    pub fn new(m: &CircleMeasure) -> Self {
        let samples = m.weight_samples();
        let weight_series = HerglotzSeries::from_samples(&samples);
        let floor_hit = samples.iter().any(|&w| w < LOG_FLOOR);
        let (log_series, log_integral) = if floor_hit {
            (None, f64::NEG_INFINITY)
        } else {
            let logs: Vec<f64> = samples.iter().map(|w| w.ln()).collect();
            let mean = logs.iter().sum::<f64>() / logs.len() as f64;
            (Some(HerglotzSeries::from_samples(&logs)), mean)
        };
        Self { weight_series, log_series, log_integral, atoms: m.atoms().to_vec(), grid: m.grid() }
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `F(z) = ∫ (e^{iθ}+z)/(e^{iθ}−z) dμ(θ)`.
    pub fn caratheodory(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        Ok(self.caratheodory_unchecked(z))
    }

    pub(crate) fn caratheodory_unchecked(&self, z: Complex64) -> Complex64 {
        let mut f = self.weight_series.eval(z);
        for a in &self.atoms {
            f += herglotz_kernel(a.point(), z) * a.mass;
        }
        f
    }

    /// `R(z) = ∫ dμ(θ)/(e^{iθ}−z)`, summed as `Σ cₙ₊₁ zⁿ` for the weight part.
    pub fn r_function(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        let mut r = self.weight_series.eval_difference_quotient(z);
        for a in &self.atoms {
            r += a.mass / (a.point() - z);
        }
        Ok(r)
    }

    /// Schur function `f` with `F = (1+zf)/(1−zf)`.
    pub fn schur(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        schur_from_caratheodory(&|w| self.caratheodory_unchecked(w), z)
    }

    /// `∫ log w dθ/2π` on the grid, or −∞ when a sample hits the floor.
    pub fn log_integral(&self) -> f64 {
        self.log_integral
    }

    /// `D(z) = exp(∫ (e^{iθ}+z)/(e^{iθ}−z) log w(θ) dθ/4π)`.
    pub fn szego_function(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        self.szego_unchecked(z)
    }

    pub(crate) fn szego_unchecked(&self, z: Complex64) -> Result<Complex64> {
        let series = self.log_series.as_ref().ok_or(OpucError::SzegoConditionFails)?;
        Ok((series.eval(z) * 0.5).exp())
    }

    /// Weight part of `F` on the grid circle, `F(e^{iθⱼ})`; atoms are not allowed.
    pub fn boundary_caratheodory_grid(&self) -> Result<Vec<Complex64>> {
        if !self.atoms.is_empty() {
            return Err(OpucError::InvalidMeasure(
                "boundary values of F are unbounded at atoms".into(),
            ));
        }
        Ok(self.weight_series.boundary_values(self.grid))
    }
}

pub fn caratheodory(m: &CircleMeasure, z: Complex64) -> Result<Complex64> {
    AnalyticEval::new(m).caratheodory(z)
}

pub fn r_function(m: &CircleMeasure, z: Complex64) -> Result<Complex64> {
    AnalyticEval::new(m).r_function(z)
}

pub fn szego_function(m: &CircleMeasure, z: Complex64) -> Result<Complex64> {
    AnalyticEval::new(m).szego_function(z)
}

fn schur_direct(f_value: Complex64, z: Complex64) -> Result<Complex64> {
    let denom = f_value + 1.0;
    if denom.norm() < 1e-14 {
        return Err(OpucError::DegenerateF(denom.norm()));
    }
    Ok((f_value - 1.0) / (z * denom))
}

/// `f(z) = (F(z) − 1)/(z(F(z) + 1))`, with the removable point at the
/// origin filled by a Cauchy integral.
pub fn schur_from_caratheodory(
    f_eval: &dyn Fn(Complex64) -> Complex64,
    z: Complex64,
) -> Result<Complex64> {
    check_interior(z)?;
    if z.norm() >= REMOVABLE_RADIUS {
        return schur_direct(f_eval(z), z);
    }
    let err = std::cell::Cell::new(None);
    let value = cauchy_fill(z, |zeta| {
        schur_direct(f_eval(zeta), zeta).unwrap_or_else(|e| {
            err.set(Some(e));
            ZERO
        })
    });
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `F = (1 + zf)/(1 − zf)`.
pub fn caratheodory_from_schur(f: Complex64, z: Complex64) -> Complex64 {
    (ONE + z * f) / (ONE - z * f)
}

/// An analytic map of the disk into the closed disk.
pub trait SchurFunction: Send + Sync {
    fn eval(&self, z: Complex64) -> Complex64;
}

impl<F> SchurFunction for F
where
    F: Fn(Complex64) -> Complex64 + Send + Sync,
{
    fn eval(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

pub type SchurRef = Arc<dyn SchurFunction>;

/// Schur function of a measure, through its Carathéodory function.
#[derive(Debug, Clone)]
pub struct MeasureSchur {
    eval: Arc<AnalyticEval>,
}

impl MeasureSchur {
    pub fn new(eval: Arc<AnalyticEval>) -> Self {
        Self { eval }
    }
}

impl SchurFunction for MeasureSchur {
    fn eval(&self, z: Complex64) -> Complex64 {
        let f = |w: Complex64| self.eval.caratheodory_unchecked(w);
        if z.norm() >= REMOVABLE_RADIUS {
            let fz = f(z);
            (fz - 1.0) / (z * (fz + 1.0))
        } else {
            cauchy_fill(z, |zeta| {
                let fz = f(zeta);
                (fz - 1.0) / (zeta * (fz + 1.0))
            })
        }
    }
}

/// Schur function of a finite coefficient sequence with zero tail:
/// `fₖ = (αₖ + z fₖ₊₁)/(1 + ᾱₖ z fₖ₊₁)` folded back from `fₙ ≡ 0`.
/// Rational, analytic on a neighbourhood of the closed disk.
#[derive(Debug, Clone)]
pub struct AlphaSchur {
    seq: VerblunskySeq,
}

impl AlphaSchur {
    pub fn new(seq: VerblunskySeq) -> Self {
        Self { seq }
    }

    pub fn seq(&self) -> &VerblunskySeq {
        &self.seq
    }
}

impl SchurFunction for AlphaSchur {
    fn eval(&self, z: Complex64) -> Complex64 {
        fold_schur(self.seq.alphas(), z)
    }
}

pub(crate) fn fold_schur(alphas: &[Complex64], z: Complex64) -> Complex64 {
    alphas.iter().rev().fold(ZERO, |f_next, &a| {
        let w = z * f_next;
        (a + w) / (ONE + a.conj() * w)
    })
}

/// `f(z)` for the finite sequence `v` with zero tail.
pub fn schur_from_alphas(v: &VerblunskySeq, z: Complex64) -> Result<Complex64> {
    check_interior(z)?;
    Ok(fold_schur(v.alphas(), z))
}

/// `f₁` from `f` and `α₀ = f(0)`: `z f₁ = (f − α₀)/(1 − ᾱ₀ f)`.
#[derive(Clone)]
pub struct StepDown {
    parent: SchurRef,
    alpha: Complex64,
}

impl SchurFunction for StepDown {
    fn eval(&self, z: Complex64) -> Complex64 {
        let direct = |w: Complex64| {
            let f = self.parent.eval(w);
            (f - self.alpha) / (w * (ONE - self.alpha.conj() * f))
        };
        if z.norm() >= REMOVABLE_RADIUS {
            direct(z)
        } else {
            cauchy_fill(z, direct)
        }
    }
}

/// `f` from `f₁` and `α₀`: `f = (α₀ + z f₁)/(1 + ᾱ₀ z f₁)`.
#[derive(Clone)]
pub struct StepUp {
    child: SchurRef,
    alpha: Complex64,
}

impl SchurFunction for StepUp {
    fn eval(&self, z: Complex64) -> Complex64 {
        let w = z * self.child.eval(z);
        (self.alpha + w) / (ONE + self.alpha.conj() * w)
    }
}

fn check_alpha(alpha: Complex64) -> Result<()> {
    let modulus = alpha.norm();
    if modulus < 1.0 {
        Ok(())
    } else {
        Err(OpucError::InvalidAlpha { index: 0, modulus })
    }
}

pub fn schur_step_down(f: SchurRef, alpha0: Complex64) -> Result<StepDown> {
    check_alpha(alpha0)?;
    Ok(StepDown { parent: f, alpha: alpha0 })
}

pub fn schur_step_up(f1: SchurRef, alpha0: Complex64) -> Result<StepUp> {
    check_alpha(alpha0)?;
    Ok(StepUp { child: f1, alpha: alpha0 })
}

/// Schur iterates `f, f₁, f₂, …` obtained by repeatedly reading `αₙ = fₙ(0)`
/// and stepping down.
#[derive(Clone)]
pub struct SchurChain {
    current: SchurRef,
    consumed: Vec<Complex64>,
}

impl SchurChain {
    pub fn new(f: SchurRef) -> Self {
        Self { current: f, consumed: Vec::new() }
    }

    pub fn from_measure(eval: Arc<AnalyticEval>) -> Self {
        Self::new(Arc::new(MeasureSchur::new(eval)))
    }

    pub fn from_alphas(v: &VerblunskySeq) -> Self {
        Self::new(Arc::new(AlphaSchur::new(v.clone())))
    }

    /// The current iterate `fₙ`, `n = consumed().len()`.
    pub fn current(&self) -> SchurRef {
        Arc::clone(&self.current)
    }

    pub fn consumed(&self) -> &[Complex64] {
        &self.consumed
    }

    /// Reads `αₙ = fₙ(0)` and replaces `fₙ` by `fₙ₊₁`.
    pub fn peel(&mut self) -> Result<Complex64> {
        let alpha = self.current.eval(ZERO);
        let step = schur_step_down(Arc::clone(&self.current), alpha)
            .map_err(|_| OpucError::InvalidAlpha { index: self.consumed.len(), modulus: alpha.norm() })?;
        self.current = Arc::new(step);
        self.consumed.push(alpha);
        Ok(alpha)
    }
}

/// `w(θ) = Re F(e^{iθ})` for a finite coefficient sequence,
/// written as `(1 − |f|²)/|1 − e^{iθ} f|²` so it stays positive.
pub fn rational_weight(v: &VerblunskySeq, theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0, theta);
    let f = fold_schur(v.alphas(), z);
    (1.0 - f.norm_sqr()) / (ONE - z * f).norm_sqr()
}

pub fn rational_weight_samples(v: &VerblunskySeq, n: usize) -> Vec<f64> {
    (0..n).map(|j| rational_weight(v, grid_angle(j, n))).collect()
}

/// The measure `w⁽ᵛ⁾ dθ/2π` of a finite sequence with zero tail, sampled on `n` points.
pub fn rational_measure(v: &VerblunskySeq, n: usize) -> Result<CircleMeasure> {
    CircleMeasure::new(Weight::Samples { values: rational_weight_samples(v, n) }, Vec::new(), n)?
        .normalize()
}

/// Both sides of the Szegő condition for the data at hand.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoCondition {
    pub holds: bool,
    /// `Σ |αⱼ|²` over the available coefficients.
    pub sum_sq: f64,
    pub partial_sums: Vec<f64>,
    /// `∫ log w dθ/2π`; `f64::NEG_INFINITY` when the weight vanishes on the grid.
    pub log_integral: f64,
}

impl SzegoCondition {
    pub fn log_divergent(&self) -> bool {
        self.log_integral == f64::NEG_INFINITY
    }
}

fn partial_sums(v: &VerblunskySeq) -> Vec<f64> {
    v.alphas()
        .iter()
        .scan(0.0, |acc, a| {
            *acc += a.norm_sqr();
            Some(*acc)
        })
        .collect()
}

/// Coefficient side: partial sums of `|αⱼ|²` and the log integral of the
/// zero-tail weight on the default grid.
pub fn szego_condition_coeffs(v: &VerblunskySeq) -> SzegoCondition {
    let partial_sums = partial_sums(v);
    let samples = rational_weight_samples(v, DEFAULT_GRID);
    let log_integral = log_mean(&samples);
    SzegoCondition {
        holds: log_integral.is_finite(),
        sum_sq: partial_sums.last().copied().unwrap_or(0.0),
        partial_sums,
        log_integral,
    }
}

/// Measure side: the grid log integral plus partial sums of the first
/// `order` extracted coefficients.
pub fn szego_condition_measure(m: &CircleMeasure, order: usize) -> Result<SzegoCondition> {
    let v = crate::szego::verblunsky_from_measure(m, order)?;
    let partial_sums = partial_sums(&v);
    let log_integral = log_mean(&m.weight_samples());
    Ok(SzegoCondition {
        holds: log_integral.is_finite(),
        sum_sq: partial_sums.last().copied().unwrap_or(0.0),
        partial_sums,
        log_integral,
    })
}

pub(crate) fn log_mean(samples: &[f64]) -> f64 {
    if samples.iter().any(|&w| !(w >= LOG_FLOOR)) {
        return f64::NEG_INFINITY;
    }
    samples.iter().map(|w| w.ln()).sum::<f64>() / samples.len() as f64
}

/// Radii `r₀ < r₁ < … < 1` used for boundary limits.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialLadder {
    radii: Vec<f64>,
}

impl Default for RadialLadder {
    /// `r = 1 − 2⁻ᵏ`, `k = 4..=14`.
    fn default() -> Self {
        Self { radii: (4..=14).map(|k| 1.0 - 0.5f64.powi(k)).collect() }
    }
}

impl RadialLadder {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 {
            return Err(OpucError::InvalidLadder("need at least two radii".into()));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] > 0.0) {
            return Err(OpucError::InvalidLadder("radii must increase from a positive value".into()));
        }
        if radii[radii.len() - 1] > 1.0 - 1e-6 {
            return Err(OpucError::InvalidLadder("largest radius exceeds 1 - 1e-6".into()));
        }
        Ok(Self { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Limit of `g(r)` as `r ↑ 1` by Neville extrapolation in `h = 1 − r`.
    /// The diagonal estimate with the smallest successive change is kept.
    pub fn extrapolate(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let h: Vec<f64> = self.radii.iter().map(|r| 1.0 - r).collect();
        let y: Vec<f64> = self.radii.iter().map(|&r| g(r)).collect();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(OpucError::ExtrapolationUnstable(f64::INFINITY));
        }
        let n = h.len();
        let mut table = y.clone();
        let mut diag = vec![y[0]];
        // table[i] holds P_{i, j} for the current column j
        for j in 1..n {
            for i in (j..n).rev() {
                table[i] = (h[i] * table[i - 1] - h[i - j] * table[i]) / (h[i] - h[i - j]);
            }
            diag.push(table[j]);
        }
        let (best, change) = diag
            .windows(2)
            .map(|w| (w[1], (w[1] - w[0]).abs()))
            .fold((diag[0], f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if change > 1e-3 * best.abs().max(1.0) {
            return Err(OpucError::ExtrapolationUnstable(change));
        }
        Ok(best)
    }
}

/// `w(θ) = lim_{r↑1} Re F(re^{iθ})`.
pub fn boundary_weight(m: &CircleMeasure, theta: f64, ladder: &RadialLadder) -> Result<f64> {
    let eval = AnalyticEval::new(m);
    ladder.extrapolate(|r| eval.caratheodory_unchecked(Complex64::from_polar(r, theta)).re)
}

/// `μ({θ₀}) = lim_{r↑1} ((1 − r)/2) Re F(re^{iθ₀})`.
///
/// A unit atom contributes `(1 + r)/(1 − r)` to `Re F` on its own radius,
/// hence the factor one half.
pub fn pure_point_mass(m: &CircleMeasure, theta0: f64, ladder: &RadialLadder) -> Result<f64> {
    let eval = AnalyticEval::new(m);
    ladder.extrapolate(|r| {
        0.5 * (1.0 - r) * eval.caratheodory_unchecked(Complex64::from_polar(r, theta0)).re
    })
}

/// Diagnostic for singular support: `|F|` grows monotonically along the
/// ladder and ends at least ten times larger than it started.
pub fn radial_divergence(m: &CircleMeasure, theta: f64, ladder: &RadialLadder) -> bool {
    let eval = AnalyticEval::new(m);
    let mags: Vec<f64> = ladder
        .radii()
        .iter()
        .map(|&r| eval.caratheodory_unchecked(Complex64::from_polar(r, theta)).norm())
        .collect();
    mags.windows(2).all(|w| w[1] >= w[0]) && mags[mags.len() - 1] > 10.0 * mags[0]
}
