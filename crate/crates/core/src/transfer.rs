//! Transfer matrices of the Szegő recursion and the objects built on them:
//! second-kind polynomials, the Weyl solution `uₖ = ψₖ + Fφₖ`, the
//! `m̃` and `m⁺` functions, and the two-sided Green's function.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::analytic::{caratheodory_from_schur, check_interior, fold_schur, AnalyticEval};
use crate::error::{OpucError, Result};
use crate::measure::CircleMeasure;
use crate::szego::{opuc_values, rho_of, verblunsky_from_measure, VerblunskySeq};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub type Mat2 = Matrix2<Complex64>;

/// Factors between rescalings of an accumulated product.
const RESCALE_EVERY: usize = 32;

fn check_alpha(index: usize, alpha: Complex64) -> Result<()> {
    let modulus = alpha.norm();
    if modulus < 1.0 {
        Ok(())
    } else {
        Err(OpucError::InvalidAlpha { index, modulus })
    }
}

/// `A(α, z) = ρ⁻¹ [[z, −ᾱ], [−αz, 1]]`, mapping `(φₙ, φₙ*)` to `(φₙ₊₁, φₙ₊₁*)`.
pub fn a_matrix(alpha: Complex64, z: Complex64) -> Result<Mat2> {
    check_alpha(0, alpha)?;
    let inv_rho = 1.0 / rho_of(alpha);
    Ok(Mat2::new(z, -alpha.conj(), -alpha * z, ONE) * Complex64::new(inv_rho, 0.0))
}

/// `U(λ) = diag(1, λ)`.
pub fn u_matrix(lambda: Complex64) -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, lambda)
}

/// `Tₙ(z) = A(αₙ₋₁, z) ⋯ A(α₀, z)`, held as `e^s · Q · R` with `Q` unitary
/// of determinant one and `R` upper triangular, periodically rescaled so
/// that long products neither overflow nor lose the determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    z: Complex64,
    n: usize,
    q: Mat2,
    r: Mat2,
    log_scale: f64,
}

impl TransferMatrix {
    pub fn identity(z: Complex64) -> Self {
        Self { z, n: 0, q: Mat2::identity(), r: Mat2::identity(), log_scale: 0.0 }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// Number of factors.
    pub fn degree(&self) -> usize {
        self.n
    }

    /// Left-multiplies by `A(α, z)`.
    pub fn push(&mut self, alpha: Complex64) -> Result<()> {
        check_alpha(self.n, alpha)?;
        let m = a_matrix(alpha, self.z)? * self.q;
        let (a, c) = (m[(0, 0)], m[(1, 0)]);
        let nu = (a.norm_sqr() + c.norm_sqr()).sqrt();
        let (q, r_step) = if nu == 0.0 {
            (Mat2::identity(), m)
        } else {
            let (q1, q2) = ((a / nu, c / nu), (-c.conj() / nu, a.conj() / nu));
            let q = Mat2::new(q1.0, q2.0, q1.1, q2.1);
            (q, q.adjoint() * m)
        };
        self.q = q;
        self.r = Mat2::new(r_step[(0, 0)], r_step[(0, 1)], ZERO, r_step[(1, 1)]) * self.r;
        self.n += 1;
        if self.n % RESCALE_EVERY == 0 {
            self.rescale();
        }
        Ok(())
    }

    fn rescale(&mut self) {
        let s = self.r.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if s > 0.0 && s.is_finite() {
            self.r /= Complex64::new(s, 0.0);
            self.log_scale += s.ln();
        }
    }

    /// The product normalized by `e^{-s}`, and `s`.
    pub fn scaled(&self) -> (Mat2, f64) {
        (self.q * self.r, self.log_scale)
    }

    /// The product itself; overflows only when the true entries do.
    pub fn matrix(&self) -> Mat2 {
        self.q * self.r * Complex64::new(self.log_scale.exp(), 0.0)
    }

    /// `Tₙ x`.
    pub fn apply(&self, x: [Complex64; 2]) -> [Complex64; 2] {
        let y = self.matrix() * nalgebra::Vector2::new(x[0], x[1]);
        [y[0], y[1]]
    }

    /// `det Tₙ` from the unitary factor and the diagonal of `R`.
    pub fn det(&self) -> Complex64 {
        self.q.determinant() * self.r[(0, 0)] * self.r[(1, 1)] * (2.0 * self.log_scale).exp()
    }

    /// `log ‖Tₙ‖` in the operator 2-norm.
    pub fn log_norm(&self) -> f64 {
        let fro_sq: f64 = self.r.iter().map(|x| x.norm_sqr()).sum();
        let det = (self.r[(0, 0)] * self.r[(1, 1)]).norm();
        let disc = ((fro_sq - 2.0 * det) * (fro_sq + 2.0 * det)).max(0.0).sqrt();
        self.log_scale + 0.5 * ((fro_sq + disc) / 2.0).ln()
    }
}

/// `Tₙ(z)` for the first `n` coefficients of `v`.
pub fn cocycle(v: &VerblunskySeq, z: Complex64, n: usize) -> Result<TransferMatrix> {
    if n > v.len() {
        return Err(OpucError::InvalidParameter(format!("{n} factors requested from {} coefficients", v.len())));
    }
    let mut t = TransferMatrix::identity(z);
    for &a in &v.alphas()[..n] {
        t.push(a)?;
    }
    Ok(t)
}

/// `(ψₖ(z), ψₖ*(z))` for `k = 0..=upto`: the orthonormal polynomials of the
/// sign-flipped coefficients `−αⱼ`.
pub fn second_kind_polys(v: &VerblunskySeq, z: Complex64, upto: usize) -> Result<Vec<(Complex64, Complex64)>> {
    if upto > v.len() {
        return Err(OpucError::InvalidParameter(format!("degree {upto} exceeds sequence length {}", v.len())));
    }
    Ok(opuc_values(&v.aleksandrov(-ONE)?, z, upto))
}

/// `F(z)` of the zero-tail measure of `v`, from its Schur fraction.
pub fn caratheodory_of(v: &VerblunskySeq, z: Complex64) -> Result<Complex64> {
    check_interior(z)?;
    Ok(caratheodory_from_schur(fold_schur(v.alphas(), z), z))
}

/// Rows `(n, |ψₙ*/φₙ* − F|)` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<(usize, f64)>,
}

impl ConvergenceTable {
    pub fn last(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.1)
    }

    /// True when the tail starting at `from` never increases by more than `slack`.
    pub fn decreasing_from(&self, from: usize, slack: f64) -> bool {
        self.rows[from..].windows(2).all(|w| w[1].1 <= w[0].1 + slack)
    }
}

fn f_limit_table(v: &VerblunskySeq, z: Complex64, n_max: usize, big_f: Complex64) -> ConvergenceTable {
    let phi = opuc_values(v, z, n_max);
    let psi = opuc_values(&v.aleksandrov(-ONE).expect("-1 is unimodular"), z, n_max);
    ConvergenceTable {
        rows: phi.iter().zip(&psi).enumerate().map(|(n, (p, s))| (n, (s.1 / p.1 - big_f).norm())).collect(),
    }
}

/// `ψₙ*/φₙ* → F` for the zero-tail sequence `v`.
pub fn f_limit_check(v: &VerblunskySeq, z: Complex64, n_max: usize) -> Result<ConvergenceTable> {
    let big_f = caratheodory_of(v, z)?;
    Ok(f_limit_table(v, z, n_max, big_f))
}

/// `ψₙ*/φₙ* → F` with the coefficients extracted from `m` and `F` from its Herglotz integral.
pub fn f_limit_check_measure(m: &CircleMeasure, z: Complex64, n_max: usize) -> Result<ConvergenceTable> {
    let big_f = AnalyticEval::new(m).caratheodory(z)?;
    let v = verblunsky_from_measure(m, n_max)?;
    Ok(f_limit_table(&v, z, n_max, big_f))
}

/// Running values of `(φₖ, φₖ*, ψₖ, ψₖ*)` sharing one scale factor `e^{s}`.
struct ScaledSolutions {
    v: [Complex64; 4],
    log_scale: f64,
}

impl ScaledSolutions {
    fn new() -> Self {
        Self { v: [ONE, ONE, ONE, ONE], log_scale: 0.0 }
    }

    /// One step of both recursions; returns the factor by which stored
    /// values were divided (1 when no rescale happened).
    fn step(&mut self, alpha: Complex64, z: Complex64) -> f64 {
        let inv_rho = 1.0 / rho_of(alpha);
        let [p, ps, q, qs] = self.v;
        let (zp, zq) = (z * p, z * q);
        self.v = [
            (zp - alpha.conj() * ps) * inv_rho,
            (ps - alpha * zp) * inv_rho,
            (zq + alpha.conj() * qs) * inv_rho,
            (qs + alpha * zq) * inv_rho,
        ];
        let big = self.v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if big > 1e100 {
            self.v.iter_mut().for_each(|x| *x /= big);
            self.log_scale += big.ln();
            big
        } else {
            1.0
        }
    }
}

/// Least-squares Weyl coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylFit {
    pub k: usize,
    /// Window start; the fit uses `n ∈ [start, K]`.
    pub start: usize,
    pub beta: Complex64,
}

/// Walks `n = 0..=k`, handing the window entries `n ≥ k/2` to `visit`
/// together with the factor by which earlier contributions must be divided
/// after a rescale. Returns the final log scale.
fn walk_window(
    v: &VerblunskySeq,
    z: Complex64,
    k: usize,
    mut visit: impl FnMut(&[Complex64; 4], f64),
) -> f64 {
    let start = k / 2;
    let mut sol = ScaledSolutions::new();
    let mut pending = 1.0;
    for n in 0..=k {
        if n > 0 {
            pending *= sol.step(v.alpha(n - 1), z);
        }
        if n >= start {
            visit(&sol.v, pending);
            pending = 1.0;
        }
    }
    sol.log_scale
}

/// `β̂ = argmin_β Σₙ |(ψₙ, −ψₙ*) + β(φₙ, φₙ*)|²` over `n ∈ [K/2, K]`.
///
/// The window excludes the head of the sequence: there the ℓ² solution is
/// still order one, so a full-range fit is pulled away from `F` by `O(1/K)`.
pub fn weyl_beta(v: &VerblunskySeq, z: Complex64, k: usize) -> Result<WeylFit> {
    check_interior(z)?;
    let (mut syy, mut syx) = (0.0, ZERO);
    walk_window(v, z, k, |&[p, ps, q, qs], rescale| {
        let f2 = rescale * rescale;
        syy = syy / f2 + p.norm_sqr() + ps.norm_sqr();
        syx = syx / f2 + p.conj() * q - ps.conj() * qs;
    });
    if !(syy > 0.0) || !syy.is_finite() {
        return Err(OpucError::IllConditioned(format!("normal-equation denominator {syy:e}")));
    }
    Ok(WeylFit { k, start: k / 2, beta: -syx / syy })
}

/// `log Σₙ |(ψₙ, −ψₙ*) + β(φₙ, φₙ*)|²` over `n ∈ [K/2, K]`, summed directly.
pub fn weyl_tail_norm(v: &VerblunskySeq, z: Complex64, k: usize, beta: Complex64) -> Result<f64> {
    check_interior(z)?;
    let mut sum = 0.0;
    let log_scale = walk_window(v, z, k, |&[p, ps, q, qs], rescale| {
        sum = sum / (rescale * rescale) + (q + beta * p).norm_sqr() + (beta * ps - qs).norm_sqr();
    });
    Ok(sum.ln() + 2.0 * log_scale)
}

/// `weyl_beta` for the coefficients extracted from a measure.
pub fn weyl_beta_measure(m: &CircleMeasure, z: Complex64, k: usize) -> Result<WeylFit> {
    weyl_beta(&verblunsky_from_measure(m, k)?, z, k)
}

/// `m̃ = (F − 1)/(F + 1) = u₀*/u₀`.
pub fn m_tilde(big_f: Complex64) -> Result<Complex64> {
    let denom = big_f + 1.0;
    if denom.norm() < 1e-14 {
        return Err(OpucError::DegenerateF(denom.norm()));
    }
    Ok((big_f - 1.0) / denom)
}

/// Schur values `fⱼ(z)` of the shifted sequences, `j = 0..=n`, by one backward fold.
pub(crate) fn shifted_schur_values(v: &VerblunskySeq, z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n + 1];
    let mut f_next = ZERO;
    for j in (0..v.len().max(n + 1)).rev() {
        let a = v.alpha(j);
        let w = z * f_next;
        f_next = (a + w) / (ONE + a.conj() * w);
        if j <= n {
            out[j] = f_next;
        }
    }
    out
}

/// The Weyl solution `(uₖ, uₖ*)`, `k = 0..=n`, normalized by `u₀ = 1 + F`.
///
/// Built from `uₖ₊₁ = mₖ⁺ uₖ` and `uₖ*/uₖ = z fₖ`, which hold because the
/// tail of the ℓ² solution is the ℓ² solution of the shifted sequence. Running
/// the transfer recursion forward instead amplifies rounding by the ratio of
/// the growing to the decaying solution; see [`weyl_solution_forward`].
pub fn weyl_solution(v: &VerblunskySeq, z: Complex64, n: usize) -> Result<Vec<(Complex64, Complex64)>> {
    let big_f = caratheodory_of(v, z)?;
    let f = shifted_schur_values(v, z, n);
    let mut u = ONE + big_f;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        out.push((u, z * f[k] * u));
        let a = v.alpha(k);
        u *= z * (ONE - a.conj() * f[k]) / rho_of(a);
    }
    Ok(out)
}

/// The same solution by the forward recursion from `(1 + F, −1 + F)`; only
/// accurate for short runs.
pub fn weyl_solution_forward(v: &VerblunskySeq, z: Complex64, n: usize) -> Result<Vec<(Complex64, Complex64)>> {
    let big_f = caratheodory_of(v, z)?;
    let mut u = (ONE + big_f, big_f - 1.0);
    let mut out = Vec::with_capacity(n + 1);
    out.push(u);
    for k in 0..n {
        let a = a_matrix(v.alpha(k), z)?;
        u = (a[(0, 0)] * u.0 + a[(0, 1)] * u.1, a[(1, 0)] * u.0 + a[(1, 1)] * u.1);
        out.push(u);
    }
    Ok(out)
}

/// `mₖ⁺ = uₖ₊₁/uₖ` for `k = 0..n`.
pub fn m_plus(v: &VerblunskySeq, z: Complex64, n: usize) -> Result<Vec<Complex64>> {
    let u = weyl_solution(v, z, n)?;
    (0..n)
        .map(|k| {
            if u[k].0.norm() == 0.0 {
                Err(OpucError::ZeroDenominator { index: k })
            } else {
                Ok(u[k + 1].0 / u[k].0)
            }
        })
        .collect()
}

/// `m₀⁺ = ρ₀⁻¹ z (1 − ᾱ₀ f)` from `α₀` and the Schur value `f(z)`.
pub fn m_plus0(alpha0: Complex64, f: Complex64, z: Complex64) -> Result<Complex64> {
    check_alpha(0, alpha0)?;
    Ok(z * (ONE - alpha0.conj() * f) / rho_of(alpha0))
}

/// `mⱼ⁺ = m₀⁺` of the sequence shifted by `j`, for `j = 0..n`, directly
/// from the backward Schur fold.
pub fn m_plus_fold(v: &VerblunskySeq, z: Complex64, n: usize) -> Result<Vec<Complex64>> {
    check_interior(z)?;
    let f = shifted_schur_values(v, z, n);
    Ok((0..n)
        .map(|j| {
            let a = v.alpha(j);
            z * (ONE - a.conj() * f[j]) / rho_of(a)
        })
        .collect())
}

/// `G(z) = f₊f₋/(1 − z f₊f₋)`.
pub fn cmv_green(f_plus: Complex64, f_minus: Complex64, z: Complex64) -> Result<Complex64> {
    check_interior(z)?;
    let p = f_plus * f_minus;
    let denom = ONE - z * p;
    if denom.norm() < 1e-14 {
        return Err(OpucError::DegenerateDenominator(denom.norm()));
    }
    Ok(p / denom)
}

/// The coefficients `(−ᾱ₋₁, −ᾱ₋₂, …)` of `f₋` from `α₋₁, α₋₂, …`.
pub fn reflected(minus: &VerblunskySeq) -> VerblunskySeq {
    VerblunskySeq::new(minus.alphas().iter().map(|a| -a.conj()).collect()).expect("moduli preserved")
}

/// `G(z)` for a two-sided sequence: `plus = (α₀, α₁, …)`, `minus = (α₋₁, α₋₂, …)`.
pub fn cmv_green_two_sided(plus: &VerblunskySeq, minus: &VerblunskySeq, z: Complex64) -> Result<Complex64> {
    check_interior(z)?;
    let f_plus = fold_schur(plus.alphas(), z);
    let f_minus = fold_schur(reflected(minus).alphas(), z);
    cmv_green(f_plus, f_minus, z)
}
