//! Fourier machinery shared by the Carathéodory and Szegő evaluators.
//!
//! A real periodic function sampled on the uniform grid `θⱼ = 2πj/N` is
//! replaced by its trigonometric interpolant. The analytic function whose
//! real part on the circle equals that interpolant has the Taylor series
//! `ĉ₀ + 2 Σ ĉₙ zⁿ`, where `ĉₙ` are the discrete Fourier coefficients.
//! Evaluating that series directly (instead of a trapezoid sum of the
//! Herglotz kernel) avoids the `|z|^N` aliasing error, so values stay
//! accurate all the way to the boundary.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Discrete Fourier coefficients `ĉₙ = (1/N) Σⱼ xⱼ e^{-inθⱼ}` for `n = 0..=N/2`.
pub fn fourier_coefficients(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.truncate(n / 2 + 1);
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Taylor coefficients of an analytic function `H` on the disk with
/// `Re H = g` on the circle, where `g` is given by grid samples.
#[derive(Debug, Clone)]
pub struct HerglotzSeries {
    coeffs: Vec<Complex64>,
}

impl HerglotzSeries {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let c = fourier_coefficients(samples);
        let mut coeffs = Vec::with_capacity(c.len());
        for (k, ck) in c.iter().enumerate() {
            let factor = if k == 0 || (n % 2 == 0 && k == n / 2) { 1.0 } else { 2.0 };
            coeffs.push(ck * factor);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `H(z) = Σ aₙ zⁿ` by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// `(H(z) - H(0)) / (2z)` as a series, i.e. `Σ ĉₙ₊₁ zⁿ`; well defined at `z = 0`.
    pub fn eval_difference_quotient(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
            * 0.5
    }

    /// Boundary values `H(e^{iθⱼ})` on the uniform grid of `n` points.
    pub fn boundary_values(&self, n: usize) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, &a) in self.coeffs.iter().enumerate() {
            buf[k % n] += a;
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(n).process(&mut buf);
        buf
    }
}

/// Angle of the `j`th point of an `n`-point uniform grid.
pub fn grid_angle(j: usize, n: usize) -> f64 {
    2.0 * std::f64::consts::PI * j as f64 / n as f64
}

/// Unit root `e^{-2πi k/n}` with `k` reduced modulo `n`.
pub fn unit_root(k: usize, n: usize) -> Complex64 {
    let t = -grid_angle(k % n, n);
    Complex64::new(t.cos(), t.sin())
}
