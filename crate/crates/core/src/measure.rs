//! Probability measures on the unit circle.
//!
//! A [`CircleMeasure`] is an absolutely continuous part `w dθ/2π` plus a
//! finite list of point masses. The weight is either a named preset, kept
//! symbolically so it can be resampled at any grid size, or raw samples on
//! a fixed uniform grid. All integrals use the uniform trapezoid rule,
//! which is exact for trigonometric polynomials of degree below `N/2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OpucError, Result};
use crate::fourier::{grid_angle, unit_root};

pub const DEFAULT_GRID: usize = 4096;
const MASS_TOLERANCE: f64 = 1e-12;

/// Absolutely continuous part of a measure, relative to `dθ/2π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Weight {
    Lebesgue,
    /// `(1-α²)/(1 - 2α cos θ + α²)`, the weight whose only nonzero
    /// Verblunsky coefficient is `α₀ = α`.
    BernsteinSzego { alpha: f64 },
    /// `cos[0] + Σₖ cos[k] cos kθ + Σₖ sin[k-1] sin kθ`.
    Fourier {
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Samples { values: Vec<f64> },
}

impl Weight {
    fn eval(&self, theta: f64) -> f64 {
        match self {
            Weight::Lebesgue => 1.0,
            Weight::BernsteinSzego { alpha } => {
                (1.0 - alpha * alpha) / (1.0 - 2.0 * alpha * theta.cos() + alpha * alpha)
            }
            Weight::Fourier { cos, sin } => {
                let mut w = cos.first().copied().unwrap_or(0.0);
                for (k, a) in cos.iter().enumerate().skip(1) {
                    w += a * (k as f64 * theta).cos();
                }
                for (k, b) in sin.iter().enumerate() {
                    w += b * ((k + 1) as f64 * theta).sin();
                }
                w
            }
            Weight::Samples { .. } => unreachable!("samples are only read on their own grid"),
        }
    }

    fn sample(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            Weight::Samples { values } => {
                if values.len() != n {
                    return Err(OpucError::InvalidMeasure(format!(
                        "weight has {} samples but grid has {} points",
                        values.len(),
                        n
                    )));
                }
                Ok(values.clone())
            }
            _ => Ok((0..n).map(|j| self.eval(grid_angle(j, n))).collect()),
        }
    }
}

/// A point mass `mass·δ_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub theta: f64,
    pub mass: f64,
}

impl Atom {
    pub fn point(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// Probability (after [`CircleMeasure::normalize`]) measure on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure {
    weight: Weight,
    weight_scale: f64,
    atoms: Vec<Atom>,
    grid: usize,
}

impl CircleMeasure {
    pub fn new(weight: Weight, atoms: Vec<Atom>, grid: usize) -> Result<Self> {
        if grid < 8 || !grid.is_power_of_two() {
            return Err(OpucError::InvalidMeasure(format!(
                "grid size {grid} is not a power of two >= 8"
            )));
        }
        if let Weight::BernsteinSzego { alpha } = weight {
            if !(alpha.abs() < 1.0) {
                return Err(OpucError::InvalidMeasure(format!(
                    "bernstein_szego parameter {alpha} must lie in (-1, 1)"
                )));
            }
        }
        let mut atoms = atoms;
        for a in atoms.iter_mut() {
            if !a.theta.is_finite() || !a.mass.is_finite() {
                return Err(OpucError::InvalidMeasure("non-finite atom".into()));
            }
            if a.mass <= 0.0 {
                return Err(OpucError::InvalidMeasure(format!(
                    "atom at {} has non-positive mass {}",
                    a.theta, a.mass
                )));
            }
            a.theta = a.theta.rem_euclid(2.0 * PI);
        }
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i + 1..] {
                let d = (a.theta - b.theta).abs();
                if d.min(2.0 * PI - d) < 1e-12 {
                    return Err(OpucError::InvalidMeasure(format!(
                        "duplicate atom angle {}",
                        a.theta
                    )));
                }
            }
        }
        let m = Self { weight, weight_scale: 1.0, atoms, grid };
        let samples = m.weight.sample(grid)?;
        if samples.iter().any(|w| !w.is_finite()) {
            return Err(OpucError::InvalidMeasure("non-finite weight sample".into()));
        }
        if let Some(w) = samples.iter().find(|&&w| w < 0.0) {
            return Err(OpucError::ZeroMass(format!("negative weight sample {w}")));
        }
        Ok(m)
    }

    pub fn lebesgue() -> Self {
        Self::new(Weight::Lebesgue, Vec::new(), DEFAULT_GRID).expect("valid preset")
    }

    pub fn bernstein_szego(alpha: f64) -> Result<Self> {
        Self::new(Weight::BernsteinSzego { alpha }, Vec::new(), DEFAULT_GRID)
    }

    pub fn fourier(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        Self::new(Weight::Fourier { cos, sin }, Vec::new(), DEFAULT_GRID)
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// The same measure resampled on a grid of `n` points.
    pub fn with_grid(&self, n: usize) -> Result<Self> {
        let mut m = Self::new(self.weight.clone(), self.atoms.clone(), n)?;
        m.weight_scale = self.weight_scale;
        Ok(m)
    }

    /// Weight values `w(θⱼ)` on the measure's own grid, normalization included.
    pub fn weight_samples(&self) -> Vec<f64> {
        self.weight
            .sample(self.grid)
            .expect("grid checked at construction")
            .into_iter()
            .map(|w| w * self.weight_scale)
            .collect()
    }

    pub fn has_weight(&self) -> bool {
        self.weight_samples().iter().any(|&w| w > 0.0)
    }

    pub fn weight_mass(&self) -> f64 {
        let s = self.weight_samples();
        s.iter().sum::<f64>() / s.len() as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.weight_mass() + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// Scales the weight and all atoms by one factor so the total mass is 1.
    pub fn normalize(&self) -> Result<Self> {
        let mass = self.total_mass();
        if !(mass > 0.0) {
            return Err(OpucError::ZeroMass(format!("total mass {mass}")));
        }
        if mass == 1.0 {
            return Ok(self.clone());
        }
        let mut m = self.clone();
        m.weight_scale /= mass;
        for a in m.atoms.iter_mut() {
            a.mass /= mass;
        }
        Ok(m)
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() < MASS_TOLERANCE
    }

    /// Rejects measures whose support is too small for orthogonal
    /// polynomials up to degree `n_max` to exist.
    pub fn check_nontrivial(&self, n_max: usize) -> Result<()> {
        if self.has_weight() || self.atoms.len() > n_max {
            Ok(())
        } else {
            Err(OpucError::TrivialMeasure { degree: n_max, norm_sq: 0.0 })
        }
    }

    /// `cₙ = ∫ e^{-inθ} dμ(θ)`.
    pub fn moment(&self, n: usize) -> Result<Complex64> {
        if 4 * n > self.grid {
            return Err(OpucError::ResolutionExceeded { order: n, grid: self.grid });
        }
        let samples = self.weight_samples();
        let roots = root_table(samples.len());
        Ok(self.moment_from_samples(&samples, &roots, n))
    }

    /// `c₀ … c_{n_max}` in one pass over the weight samples.
    pub fn moments(&self, n_max: usize) -> Result<MomentSeq> {
        if 4 * n_max > self.grid {
            return Err(OpucError::ResolutionExceeded { order: n_max, grid: self.grid });
        }
        let samples = self.weight_samples();
        let roots = root_table(samples.len());
        let c = (0..=n_max).map(|n| self.moment_from_samples(&samples, &roots, n)).collect();
        Ok(MomentSeq { c })
    }

    fn moment_from_samples(&self, samples: &[f64], roots: &[Complex64], n: usize) -> Complex64 {
        let len = samples.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &w) in samples.iter().enumerate() {
            if w != 0.0 {
                acc += roots[(n * j) % len] * w;
            }
        }
        acc /= len as f64;
        for a in &self.atoms {
            acc += Complex64::from_polar(a.mass, -(n as f64) * a.theta);
        }
        acc
    }

    /// `⟨p, q⟩ = ∫ conj(p) q dμ` for ascending coefficient vectors.
    pub fn inner_product(&self, p: &[Complex64], q: &[Complex64]) -> Result<Complex64> {
        let deg = p.len().max(q.len()).saturating_sub(1);
        let c = self.moments(deg)?;
        Ok(c.bilinear(p, q))
    }
}

fn root_table(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| unit_root(k, n)).collect()
}

/// Moments `c₀ … c_{n_max}`; negative indices follow from `c₋ₙ = conj(cₙ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeq {
    c: Vec<Complex64>,
}

impl MomentSeq {
    pub fn new(c: Vec<Complex64>) -> Self {
        Self { c }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.c
    }

    pub fn max_order(&self) -> usize {
        self.c.len() - 1
    }

    /// `c_k` for any integer `k` within range.
    pub fn get(&self, k: isize) -> Complex64 {
        if k >= 0 {
            self.c[k as usize]
        } else {
            self.c[(-k) as usize].conj()
        }
    }

    /// `Σ conj(pₐ) q_b c_{a-b}`, i.e. `⟨p, q⟩` with `⟨zᵃ, zᵇ⟩ = c_{a-b}`.
    pub fn bilinear(&self, p: &[Complex64], q: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, pa) in p.iter().enumerate() {
            if *pa == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for (b, qb) in q.iter().enumerate() {
                row += qb * self.get(a as isize - b as isize);
            }
            acc += pa.conj() * row;
        }
        acc
    }

    /// Hermitian Toeplitz matrix `[c_{i-j}]` of size `(k+1)×(k+1)`.
    pub fn toeplitz(&self, k: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(k + 1, k + 1, |i, j| self.get(i as isize - j as isize))
    }

    /// Smallest eigenvalue of the `(k+1)×(k+1)` Toeplitz matrix; positive
    /// exactly when the measure supports at least `k+1` points.
    pub fn min_toeplitz_eigenvalue(&self, k: usize) -> f64 {
        self.toeplitz(k)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// JSON form of a measure: `{"weight": {"preset": …}, "atoms": [[θ, mass], …], "grid": N}`.
/// A missing weight means a purely atomic measure; masses are normalized on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(default)]
    pub weight: Option<Weight>,
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub grid: Option<usize>,
}

impl MeasureSpec {
    pub fn to_measure(&self) -> Result<CircleMeasure> {
        let weight = self.weight.clone().unwrap_or(Weight::Fourier { cos: Vec::new(), sin: Vec::new() });
        let grid = match (&weight, self.grid) {
            (_, Some(n)) => n,
            (Weight::Samples { values }, None) => values.len(),
            _ => DEFAULT_GRID,
        };
        let atoms = self.atoms.iter().map(|&(theta, mass)| Atom { theta, mass }).collect();
        CircleMeasure::new(weight, atoms, grid)?.normalize()
    }
}

/// Smooth, strictly positive presets together with one mixed measure;
/// shared by tests, the CLI and the bindings.
pub fn gallery() -> Vec<(&'static str, CircleMeasure)> {
    let half_atom = CircleMeasure::new(
        Weight::Lebesgue,
        vec![Atom { theta: 0.0, mass: 1.0 }],
        DEFAULT_GRID,
    )
    .and_then(|m| m.normalize())
    .expect("valid preset");
    vec![
        ("lebesgue", CircleMeasure::lebesgue()),
        ("bernstein_szego_0.5", CircleMeasure::bernstein_szego(0.5).expect("valid preset")),
        ("bernstein_szego_-0.3", CircleMeasure::bernstein_szego(-0.3).expect("valid preset")),
        ("fourier_cos", CircleMeasure::fourier(vec![1.0, 0.5], vec![]).expect("valid preset")),
        (
            "fourier_mixed",
            CircleMeasure::fourier(vec![1.0, 0.3, 0.0, 0.1], vec![0.0, 0.2]).expect("valid preset"),
        ),
        ("half_lebesgue_half_atom", half_atom),
    ]
}

/// The presets in [`gallery`] with a strictly positive smooth weight and no atoms.
pub fn smooth_gallery() -> Vec<(&'static str, CircleMeasure)> {
    gallery()
        .into_iter()
        .filter(|(_, m)| m.atoms().is_empty())
        .collect()
}
