//! The relative Szegő function `δ₀D` and step-by-step sum rules.
//!
//! `δ₀D(z) = (1 − ᾱ₀f)/ρ₀ · (1 − zf₁)/(1 − zf)` compares a measure with the
//! one whose coefficients are shifted by one. Its boundary modulus squared is
//! the weight ratio `w/w₁`, and its value at the origin is `ρ₀`; iterating
//! gives the Szegő theorem `∏ρⱼ² = exp ∫ log w`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::analytic::{
    boundary_weight, check_interior, fold_schur, log_mean, rational_measure, rational_weight,
    rational_weight_samples, AlphaSchur, AnalyticEval, MeasureSchur, RadialLadder, SchurRef,
    schur_step_down, LOG_FLOOR,
};
use crate::error::{OpucError, Result};
use crate::fourier::{grid_angle, HerglotzSeries};
use crate::measure::{CircleMeasure, DEFAULT_GRID};
use crate::szego::{opuc_values, rho_of, verblunsky_from_measure, VerblunskySeq};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Boundary weights below this are treated as zeros of `w`.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// `(δ₀D)(z)` built from a Schur function `f`, its first coefficient and
/// the stepped-down `f₁`.
#[derive(Clone)]
pub struct RelativeSzego {
    alpha0: Complex64,
    rho0: f64,
    f: SchurRef,
    f1: SchurRef,
}

impl RelativeSzego {
    /// Coefficient-backed: `f` and `f₁` are the finite Schur fractions of
    /// `v` and of `v` shifted by one.
    pub fn from_coefficients(v: &VerblunskySeq) -> Self {
        let alpha0 = v.alpha(0);
        Self {
            alpha0,
            rho0: rho_of(alpha0),
            f: Arc::new(AlphaSchur::new(v.clone())),
            f1: Arc::new(AlphaSchur::new(v.shift(1))),
        }
    }

    /// Measure-backed: `f` from the Carathéodory function, `α₀ = f(0)`, and
    /// `f₁` by one Schur step.
    pub fn from_measure(m: &CircleMeasure) -> Result<Self> {
        let f: SchurRef = Arc::new(MeasureSchur::new(Arc::new(AnalyticEval::new(m))));
        let alpha0 = f.eval(Complex64::new(0.0, 0.0));
        let f1: SchurRef = Arc::new(schur_step_down(Arc::clone(&f), alpha0)?);
        Ok(Self { alpha0, rho0: rho_of(alpha0), f, f1 })
    }

    pub fn alpha0(&self) -> Complex64 {
        self.alpha0
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let f = self.f.eval(z);
        let f1 = self.f1.eval(z);
        (ONE - self.alpha0.conj() * f) / self.rho0 * (ONE - z * f1) / (ONE - z * f)
    }

    /// `lim_{r↑1} |δ₀D(re^{iθ})|²`.
    pub fn boundary_modulus_sq(&self, theta: f64, ladder: &RadialLadder) -> Result<f64> {
        ladder.extrapolate(|r| self.eval_unchecked(Complex64::from_polar(r, theta)).norm_sqr())
    }

    /// `lim_{r↑1} Re F₁(re^{iθ})` with `Re F₁ = (1 − |zf₁|²)/|1 − zf₁|²`.
    fn shifted_boundary_weight(&self, theta: f64, ladder: &RadialLadder) -> Result<f64> {
        ladder.extrapolate(|r| {
            let z = Complex64::from_polar(r, theta);
            let w = z * self.f1.eval(z);
            (1.0 - w.norm_sqr()) / (ONE - w).norm_sqr()
        })
    }
}

/// `δ₀D(z)` for a finite sequence with zero tail.
pub fn delta0d(v: &VerblunskySeq, z: Complex64) -> Result<Complex64> {
    RelativeSzego::from_coefficients(v).eval(z)
}

/// `δ₀D(z)` for a measure, through `F` and one Schur step.
pub fn delta0d_measure(m: &CircleMeasure, z: Complex64) -> Result<Complex64> {
    RelativeSzego::from_measure(m)?.eval(z)
}

/// `F(z)` as the terminal ratio `ψₙ*/φₙ*`, exact for a zero tail once `n`
/// reaches the length of `v`.
fn caratheodory_by_polynomials(v: &VerblunskySeq, z: Complex64) -> Complex64 {
    let n = v.len();
    let second = v.aleksandrov(-ONE).expect("-1 is unimodular");
    let phi_star = opuc_values(v, z, n)[n].1;
    let psi_star = opuc_values(&second, z, n)[n].1;
    psi_star / phi_star
}

/// Residuals of the interior identities tying `F`, `F₁`, `f`, `f₁` and `δ₀D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioResiduals {
    /// `|Re F/Re F₁ − |δ₀D|²(1 − |z|²|f|²)/(1 − |f|²)|`.
    pub ratio: f64,
    /// `|1 − |zf₁|² − ρ₀²(1 − |f|²)/|1 − ᾱ₀f|²|`.
    pub norm: f64,
}

impl RatioResiduals {
    pub fn max(&self) -> f64 {
        self.ratio.max(self.norm)
    }
}

/// Checks the interior ratio identity with `F` and `F₁` taken from the
/// polynomial ratio `ψₙ*/φₙ*`, independent of the Schur fractions.
pub fn ratio_identity_check(v: &VerblunskySeq, z: Complex64) -> Result<RatioResiduals> {
    check_interior(z)?;
    let shifted = v.shift(1);
    let big_f = caratheodory_by_polynomials(v, z);
    let big_f1 = caratheodory_by_polynomials(&shifted, z);
    let f = fold_schur(v.alphas(), z);
    let f1 = fold_schur(shifted.alphas(), z);
    let delta = delta0d(v, z)?;
    let alpha0 = v.alpha(0);
    let rho0_sq = rho_sq(alpha0);

    let lhs = big_f.re / big_f1.re;
    let rhs = delta.norm_sqr() * (1.0 - z.norm_sqr() * f.norm_sqr()) / (1.0 - f.norm_sqr());
    let norm_lhs = 1.0 - (z * f1).norm_sqr();
    let norm_rhs = rho0_sq * (1.0 - f.norm_sqr()) / (ONE - alpha0.conj() * f).norm_sqr();
    Ok(RatioResiduals { ratio: (lhs - rhs).abs(), norm: (norm_lhs - norm_rhs).abs() })
}

/// Boundary weight ratio computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRatio {
    pub theta: f64,
    /// Radial limit of `|δ₀D|²`.
    pub extrapolated: f64,
    /// `w(θ)/w₁(θ)` from the two weights.
    pub direct: f64,
}

impl BoundaryRatio {
    pub fn residual(&self) -> f64 {
        (self.extrapolated - self.direct).abs()
    }
}

/// `|δ₀D(e^{iθ})|²` against `w/w₁` from the rational weights of `v` and its shift.
pub fn weight_ratio_boundary(v: &VerblunskySeq, theta: f64, ladder: &RadialLadder) -> Result<BoundaryRatio> {
    let w = rational_weight(v, theta);
    if w < ZERO_WEIGHT {
        return Err(OpucError::ZeroWeight(theta));
    }
    let w1 = rational_weight(&v.shift(1), theta);
    let extrapolated = RelativeSzego::from_coefficients(v).boundary_modulus_sq(theta, ladder)?;
    Ok(BoundaryRatio { theta, extrapolated, direct: w / w1 })
}

/// Measure-backed version: `w` and `w₁` are separate radial limits of
/// `Re F` and `Re F₁`.
pub fn weight_ratio_boundary_measure(
    m: &CircleMeasure,
    theta: f64,
    ladder: &RadialLadder,
) -> Result<BoundaryRatio> {
    let w = boundary_weight(m, theta, ladder)?;
    if w < ZERO_WEIGHT {
        return Err(OpucError::ZeroWeight(theta));
    }
    let rel = RelativeSzego::from_measure(m)?;
    let w1 = rel.shifted_boundary_weight(theta, ladder)?;
    let extrapolated = rel.boundary_modulus_sq(theta, ladder)?;
    Ok(BoundaryRatio { theta, extrapolated, direct: w / w1 })
}

/// Coefficient side against entropy side of one sum rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRuleReport {
    /// Step index for per-step rules, truncation order for cumulative ones.
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl SumRuleReport {
    pub fn abs_error(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Per-step reports `ρₖ²` vs `exp ∫ log(wₖ/wₖ₊₁)` and cumulative reports
/// `(ρ₀⋯ρₙ₋₁)²` vs `exp ∫ log(w/wₙ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSumRule {
    pub steps: Vec<SumRuleReport>,
    pub cumulative: Vec<SumRuleReport>,
}

impl StepSumRule {
    pub fn max_error(&self) -> f64 {
        self.steps.iter().chain(&self.cumulative).map(SumRuleReport::abs_error).fold(0.0, f64::max)
    }
}

/// `ρ² = (1 − |α|)(1 + |α|)`.
fn rho_sq(alpha: Complex64) -> f64 {
    let r = alpha.norm();
    (1.0 - r) * (1.0 + r)
}

/// `[1, ρ₀², ρ₀²ρ₁², …]`, accumulated left to right.
pub fn rho_sq_products(v: &VerblunskySeq, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    out.push(acc);
    for j in 0..n {
        acc *= rho_sq(v.alpha(j));
        out.push(acc);
    }
    out
}

fn log_samples(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|&w| !(w >= LOG_FLOOR)) {
        return Err(OpucError::LogDivergence);
    }
    Ok(samples.iter().map(|w| w.ln()).collect())
}

fn mean_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x - y).sum::<f64>() / a.len() as f64
}

fn assemble_sum_rule(v: &VerblunskySeq, logs: &[Vec<f64>]) -> StepSumRule {
    let n_steps = logs.len() - 1;
    let products = rho_sq_products(v, n_steps);
    let steps = (0..n_steps)
        .map(|k| SumRuleReport {
            n: k,
            lhs: rho_sq(v.alpha(k)),
            rhs: mean_difference(&logs[k], &logs[k + 1]).exp(),
        })
        .collect();
    let cumulative = (1..=n_steps)
        .map(|n| SumRuleReport { n, lhs: products[n], rhs: mean_difference(&logs[0], &logs[n]).exp() })
        .collect();
    StepSumRule { steps, cumulative }
}

/// Step-by-step sum rules for a finite sequence, with `wₖ` the rational
/// weight of `v` shifted by `k`, on the default grid.
pub fn step_sum_rule(v: &VerblunskySeq, n_steps: usize) -> Result<StepSumRule> {
    let logs = (0..=n_steps)
        .map(|k| log_samples(&rational_weight_samples(&v.shift(k), DEFAULT_GRID)))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_sum_rule(v, &logs))
}

/// Step-by-step sum rules for a purely absolutely continuous measure.
///
/// The coefficients come from the Gram recursion; the shifted weights come
/// from running the Schur step on the boundary values of `f`.
pub fn step_sum_rule_measure(m: &CircleMeasure, n_steps: usize) -> Result<StepSumRule> {
    let v = verblunsky_from_measure(m, n_steps)?;
    let eval = AnalyticEval::new(m);
    let big_f = eval.boundary_caratheodory_grid()?;
    let n = big_f.len();
    let points: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, grid_angle(j, n))).collect();
    let mut f: Vec<Complex64> =
        big_f.iter().zip(&points).map(|(&fz, &z)| (fz - 1.0) / (z * (fz + 1.0))).collect();
    let mut logs = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        let weights: Vec<f64> = f
            .iter()
            .zip(&points)
            .map(|(&fk, &z)| (1.0 - fk.norm_sqr()) / (ONE - z * fk).norm_sqr())
            .collect();
        logs.push(log_samples(&weights)?);
        if k < n_steps {
            let a = v.alpha(k);
            for (fk, &z) in f.iter_mut().zip(&points) {
                *fk = (*fk - a) / (z * (ONE - a.conj() * *fk));
            }
        }
    }
    Ok(assemble_sum_rule(&v, &logs))
}

/// Both sides of the Szegő theorem at truncation order `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzegoTheoremReport {
    pub n: usize,
    /// `∏_{j<n} (1 − |αⱼ|²)`.
    pub product: f64,
    /// `∫ log w⁽ⁿ⁾ dθ/2π` for the zero-tail weight of the first `n` coefficients.
    pub entropy: f64,
    /// `product − exp ∫ log w` for the source measure, when there is one.
    pub inequality_margin: Option<f64>,
}

impl SzegoTheoremReport {
    /// `|product − exp(entropy)|`.
    pub fn equality_residual(&self) -> f64 {
        (self.product - self.entropy.exp()).abs()
    }
}

fn truncated_report(v: &VerblunskySeq, n: usize, source_entropy: Option<f64>) -> Result<SzegoTheoremReport> {
    let truncated = v.truncated(n);
    let product = rho_sq_products(&truncated, n)[n];
    let entropy = log_mean(&rational_weight_samples(&truncated, DEFAULT_GRID));
    if entropy == f64::NEG_INFINITY {
        return Err(OpucError::LogDivergence);
    }
    Ok(SzegoTheoremReport { n, product, entropy, inequality_margin: source_entropy.map(|s| product - s.exp()) })
}

/// Product against entropy for `v` with a zero tail at order `n`.
pub fn szego_theorem_check(v: &VerblunskySeq, n: usize) -> Result<SzegoTheoremReport> {
    truncated_report(v, n, None)
}

/// Same, for the first `n` coefficients of a measure, also reporting the
/// margin of `∏ρⱼ² ≥ exp ∫ log w` against the measure's own weight.
pub fn szego_theorem_measure(m: &CircleMeasure, n: usize) -> Result<SzegoTheoremReport> {
    let v = verblunsky_from_measure(m, n)?;
    truncated_report(&v, n, Some(log_mean(&m.weight_samples())))
}

/// `max_{k ≤ k_max} |cₖ⁽ⁿ⁾ − cₖ|` between a measure and the zero-tail measure
/// of its first `n` coefficients; tends to zero as the truncations converge weakly.
pub fn truncation_moment_gap(m: &CircleMeasure, n: usize, k_max: usize) -> Result<f64> {
    let v = verblunsky_from_measure(m, n)?;
    let approx = rational_measure(&v, m.grid())?;
    let (a, b) = (m.moments(k_max)?, approx.moments(k_max)?);
    Ok(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

/// `φ*ₙ₋₁(z; α₁, α₂, …)/φₙ*(z; α₀, α₁, …)` for `n = 1..=n_max`.
pub fn delta0d_polynomial_limit(v: &VerblunskySeq, z: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    check_interior(z)?;
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let full = opuc_values(v, z, n_max);
    let shifted = opuc_values(&v.shift(1), z, n_max - 1);
    Ok((1..=n_max).map(|n| shifted[n - 1].1 / full[n].1).collect())
}

/// `|δ₀D(z) − D(z; v)/D(z; v shifted)|` with both Szegő functions built
/// from the sampled rational weights.
pub fn delta0d_d_ratio_residual(v: &VerblunskySeq, z: Complex64) -> Result<f64> {
    let delta = delta0d(v, z)?;
    let d = AnalyticEval::new(&rational_measure(v, DEFAULT_GRID)?).szego_function(z)?;
    let d1 = AnalyticEval::new(&rational_measure(&v.shift(1), DEFAULT_GRID)?).szego_function(z)?;
    Ok((delta - d / d1).norm())
}

/// `|δ₀D(z) − exp(∫ (e^{iθ}+z)/(e^{iθ}−z) log(w/w₁) dθ/4π)|`.
pub fn nonlocal_sum_rule_residual(v: &VerblunskySeq, z: Complex64) -> Result<f64> {
    let delta = delta0d(v, z)?;
    let logs = log_samples(&rational_weight_samples(v, DEFAULT_GRID))?;
    let logs1 = log_samples(&rational_weight_samples(&v.shift(1), DEFAULT_GRID))?;
    let ratio: Vec<f64> = logs.iter().zip(&logs1).map(|(a, b)| a - b).collect();
    let h = HerglotzSeries::from_samples(&ratio);
    Ok(((h.eval(z) * 0.5).exp() - delta).norm())
}
