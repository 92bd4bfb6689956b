//! Decay rate of the Weyl solution and the Lyapunov exponent of the
//! transfer cocycle, deterministic and for i.i.d. random coefficients.
//!
//! `γ₂` is a log rate: `(1/n) log ‖(uₙ, uₙ*)‖ ≈ (1/n) Σ log |mⱼ⁺|`. With
//! `det Tₙ = zⁿ`, the growth rate of the cocycle is `γ = log|z| − γ₂`, and for
//! stationary random coefficients `E log|m⁺| = log|z| − γ`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::check_interior;
use crate::error::{OpucError, Result};
use crate::szego::{rho_of, VerblunskySeq};
use crate::transfer::{m_plus_fold, shifted_schur_values, TransferMatrix};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Spread of the running estimates above which a run is flagged.
pub const NONCONVERGENCE_SPREAD: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovReport {
    pub z: Complex64,
    /// Decay rate of the ℓ² solution, per step, as a natural log.
    pub gamma2: f64,
    /// Growth rate of the transfer matrices.
    pub gamma: f64,
    /// Monte Carlo standard error of `gamma2 − (log|z| − gamma)`; zero for
    /// deterministic runs.
    pub mc_stderr: f64,
    /// Second estimate of `gamma2` from the slope of `log ‖(uₙ, uₙ*)‖`;
    /// stochastic runs repeat `gamma2` here.
    pub gamma2_norm: f64,
    /// Running averages of the per-step (or per-sample) estimates.
    pub running: Vec<f64>,
    pub non_convergent: bool,
}

impl LyapunovReport {
    /// `|gamma2 − (log|z| − gamma)|`.
    pub fn kotani_residual(&self) -> f64 {
        (self.gamma2 - (self.z.norm().ln() - self.gamma)).abs()
    }

    /// Residual within three standard errors; exact agreement is required
    /// when the standard error vanishes.
    pub fn kotani_holds(&self) -> bool {
        let r = self.kotani_residual();
        if self.mc_stderr == 0.0 {
            r == 0.0
        } else {
            r < 3.0 * self.mc_stderr
        }
    }
}

fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

fn running_means(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .enumerate()
        .map(|(i, s)| s / (i + 1) as f64)
        .collect()
}

/// `γ₂` from the averages of `log|mⱼ⁺|` over the window `[n/4, 3n/4)` of a
/// finite sequence of length `n`, and from the slope of `log ‖(uⱼ, uⱼ*)‖`
/// across the same window.
///
/// The window keeps away from the start, where the average carries an
/// `O(1/n)` transient, and from the end, where the zero tail takes over.
pub fn lyapunov_deterministic(v: &VerblunskySeq, z: Complex64) -> Result<LyapunovReport> {
    check_interior(z)?;
    if z.norm() == 0.0 {
        return Err(OpucError::InvalidParameter("z = 0 has no finite decay rate".into()));
    }
    let n = v.len();
    if n < 8 {
        return Err(OpucError::InvalidParameter(format!("sequence of length {n} is too short")));
    }
    let (a, b) = (n / 4, 3 * n / 4);
    let m = m_plus_fold(v, z, b)?;
    let logs: Vec<f64> = m[a..b].iter().map(|x| x.norm().ln()).collect();
    let gamma2 = logs.iter().sum::<f64>() / logs.len() as f64;

    // log ‖(u, u*)‖ = log|u| + ½ log(1 + |z f|²) since u* = z f u
    let f = shifted_schur_values(v, z, b);
    let edge = |j: usize| 0.5 * (1.0 + (z * f[j]).norm_sqr()).ln();
    let gamma2_norm = (logs.iter().sum::<f64>() + edge(b) - edge(a)) / (b - a) as f64;

    let running = running_means(&logs);
    let non_convergent = spread(&running[running.len() / 2..]) > NONCONVERGENCE_SPREAD;
    Ok(LyapunovReport {
        z,
        gamma2,
        gamma: z.norm().ln() - gamma2,
        mc_stderr: 0.0,
        gamma2_norm,
        running,
        non_convergent,
    })
}

/// Law of i.i.d. coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum CoefficientLaw {
    /// Uniform on the closed disk `|α| ≤ radius`.
    UniformDisk { radius: f64 },
}

impl CoefficientLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CoefficientLaw::UniformDisk { radius } if (0.0..1.0).contains(&radius) => Ok(()),
            CoefficientLaw::UniformDisk { radius } => {
                Err(OpucError::InvalidParameter(format!("disk radius {radius} outside [0, 1)")))
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Complex64 {
        match *self {
            CoefficientLaw::UniformDisk { radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
            }
        }
    }
}

/// Random stream for one sample: `side` 0 drives the `m⁺` estimate and
/// side 1 the cocycle, so the two sides of the identity are independent.
pub fn sample_rng(seed: u64, sample: usize, side: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * sample as u64 + side);
    rng
}

/// `log|m₀⁺(z)|` for one draw of `n_steps` coefficients (deeper ones are zero).
fn sample_log_m_plus(law: &CoefficientLaw, z: Complex64, n_steps: usize, rng: &mut ChaCha8Rng) -> f64 {
    let alphas: Vec<Complex64> = (0..n_steps).map(|_| law.sample(rng)).collect();
    let f1 = crate::analytic::fold_schur(&alphas[1..], z);
    let a = alphas[0];
    let w = z * f1;
    let f = (a + w) / (ONE + a.conj() * w);
    (z * (ONE - a.conj() * f) / rho_of(a)).norm().ln()
}

/// Growth rate `(log‖Tₙ‖ − log‖T_b‖)/(n − b)` with burn-in `b = n/10`,
/// which removes the `O(1/n)` bias of `(1/n) log‖Tₙ‖`.
fn sample_gamma(law: &CoefficientLaw, z: Complex64, n_steps: usize, rng: &mut ChaCha8Rng) -> f64 {
    let burn = n_steps / 10;
    let mut t = TransferMatrix::identity(z);
    let mut at_burn = 0.0;
    for k in 0..n_steps {
        if k == burn {
            at_burn = t.log_norm();
        }
        t.push(law.sample(rng)).expect("law stays inside the disk");
    }
    (t.log_norm() - at_burn) / (n_steps - burn) as f64
}

fn mean_and_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo check of `E log|m⁺(z)| = log|z| − γ(z)`.
pub fn lyapunov_stochastic(
    law: &CoefficientLaw,
    z: Complex64,
    n_steps: usize,
    n_samples: usize,
    seed: u64,
) -> Result<LyapunovReport> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    lyapunov_stochastic_with_workers(law, z, n_steps, n_samples, seed, workers)
}

/// Same as [`lyapunov_stochastic`] with an explicit worker count; the
/// result does not depend on it.
pub fn lyapunov_stochastic_with_workers(
    law: &CoefficientLaw,
    z: Complex64,
    n_steps: usize,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<LyapunovReport> {
    law.validate()?;
    check_interior(z)?;
    if z.norm() == 0.0 {
        return Err(OpucError::InvalidParameter("z = 0 has no finite decay rate".into()));
    }
    if n_steps < 10 || n_samples < 2 {
        return Err(OpucError::InvalidParameter(format!(
            "need at least 10 steps and 2 samples, got {n_steps} and {n_samples}"
        )));
    }
    let workers = workers.clamp(1, n_samples);
    let chunk = n_samples.div_ceil(workers);
    let mut samples = vec![(0.0, 0.0); n_samples];
    std::thread::scope(|scope| {
        for (w, slot) in samples.chunks_mut(chunk).enumerate() {
            scope.spawn(move || {
                for (offset, out) in slot.iter_mut().enumerate() {
                    let i = w * chunk + offset;
                    let log_m = sample_log_m_plus(law, z, n_steps, &mut sample_rng(seed, i, 0));
                    let gamma = sample_gamma(law, z, n_steps, &mut sample_rng(seed, i, 1));
                    *out = (log_m, gamma);
                }
            });
        }
    });
    let log_m: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let gammas: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (gamma2, se_m) = mean_and_stderr(&log_m);
    let (gamma, se_g) = mean_and_stderr(&gammas);
    let running = running_means(&log_m);
    let non_convergent = spread(&running[running.len() / 2..]) > NONCONVERGENCE_SPREAD;
    Ok(LyapunovReport {
        z,
        gamma2,
        gamma,
        mc_stderr: se_m.hypot(se_g),
        gamma2_norm: gamma2,
        running,
        non_convergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::a_matrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_case() {
        let z = c(0.5, 0.0);
        let r = lyapunov_deterministic(&VerblunskySeq::zeros(200), z).unwrap();
        assert!((r.gamma2 - 0.5f64.ln()).abs() < 1e-15);
        assert!(r.gamma.abs() < 1e-15);
        assert!(!r.non_convergent);
    }

    #[test]
    fn estimators_agree_for_finite_rank() {
        let mut alphas = vec![c(0.5, 0.2), c(-0.3, 0.1), c(0.0, 0.6)];
        alphas.resize(200, c(0.0, 0.0));
        let v = VerblunskySeq::new(alphas).unwrap();
        for z in [c(0.5, 0.0), c(0.2, -0.6), c(-0.8, 0.1)] {
            let r = lyapunov_deterministic(&v, z).unwrap();
            assert!((r.gamma2 - r.gamma2_norm).abs() < 1e-6);
            assert!((r.gamma2 - z.norm().ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_matches_eigenvalue_oracle() {
        let z = c(0.5, 0.0);
        let v = VerblunskySeq::from_real(&[0.5; 400]).unwrap();
        let r = lyapunov_deterministic(&v, z).unwrap();
        // the ℓ² solution follows the small eigenvalue of the one-step map
        let a = a_matrix(c(0.5, 0.0), z).unwrap();
        let (tr, det) = (a[(0, 0)] + a[(1, 1)], a.determinant());
        let disc = (tr * tr - det * 4.0).sqrt();
        let small = ((tr - disc) / 2.0).norm().min(((tr + disc) / 2.0).norm());
        let large = ((tr - disc) / 2.0).norm().max(((tr + disc) / 2.0).norm());
        assert!((small - 0.3660254037844386).abs() < 1e-12);
        assert!((r.gamma2 - small.ln()).abs() < 1e-12, "{} vs {}", r.gamma2, small.ln());
        assert!((r.gamma - large.ln()).abs() < 1e-12);
        assert!((r.gamma2_norm - small.ln()).abs() < 1e-6);
    }

    #[test]
    fn degenerate_law_is_exact() {
        let law = CoefficientLaw::UniformDisk { radius: 0.0 };
        let z = c(0.5, 0.0);
        let r = lyapunov_stochastic(&law, z, 200, 8, 1).unwrap();
        assert_eq!(r.gamma2, 0.5f64.ln());
        assert_eq!(r.gamma, 0.0);
        assert!(r.kotani_holds());
    }

    #[test]
    fn seed_determines_report_for_any_worker_count() {
        let law = CoefficientLaw::UniformDisk { radius: 0.5 };
        let z = c(0.3, 0.4);
        let a = lyapunov_stochastic_with_workers(&law, z, 300, 20, 42, 1).unwrap();
        let b = lyapunov_stochastic_with_workers(&law, z, 300, 20, 42, 3).unwrap();
        let c2 = lyapunov_stochastic_with_workers(&law, z, 300, 20, 42, 20).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c2);
        let d = lyapunov_stochastic_with_workers(&law, z, 300, 20, 43, 1).unwrap();
        assert_ne!(a.gamma2, d.gamma2);
    }

    #[test]
    fn kotani_identity_small_run() {
        let law = CoefficientLaw::UniformDisk { radius: 0.5 };
        let r = lyapunov_stochastic(&law, c(0.5, 0.0), 500, 60, 7).unwrap();
        assert!(r.mc_stderr > 0.0);
        assert!(r.kotani_holds(), "{r:?}");
    }

    #[test]
    fn law_validation_and_serde() {
        assert!(CoefficientLaw::UniformDisk { radius: 1.0 }.validate().is_err());
        let law: CoefficientLaw = serde_json::from_str(r#"{"law":"uniform-disk","radius":0.5}"#).unwrap();
        assert_eq!(law, CoefficientLaw::UniformDisk { radius: 0.5 });
        let mut rng = sample_rng(3, 0, 0);
        assert!((0..1000).all(|_| law.sample(&mut rng).norm() <= 0.5));
    }
}
