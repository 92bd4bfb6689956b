//! Szegő recursion: Verblunsky coefficients from a measure and orthogonal
//! polynomials from Verblunsky coefficients.
//!
//! Polynomials are dense coefficient vectors in ascending powers of `z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OpucError, Result};
use crate::measure::CircleMeasure;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Squared norms below this mean the measure has run out of support.
const TRIVIAL_NORM_SQ: f64 = 1e-13;
/// Coefficients this close to the circle are treated as breakdown.
const BREAKDOWN_MARGIN: f64 = 1e-13;

/// A finite prefix `α₀ … α_{n-1}` of Verblunsky coefficients, all in the
/// open unit disk. Indices past the end read as zero wherever a zero tail
/// is the stated convention.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerblunskySeq {
    alphas: Vec<Complex64>,
}

impl VerblunskySeq {
    pub fn new(alphas: Vec<Complex64>) -> Result<Self> {
        for (index, a) in alphas.iter().enumerate() {
            let modulus = a.norm();
            if !(modulus < 1.0) {
                return Err(OpucError::InvalidAlpha { index, modulus });
            }
        }
        Ok(Self { alphas })
    }

    pub fn from_real(alphas: &[f64]) -> Result<Self> {
        Self::new(alphas.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self { alphas: vec![ZERO; n] }
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    /// `αⱼ`, or zero past the stored prefix.
    pub fn alpha(&self, j: usize) -> Complex64 {
        self.alphas.get(j).copied().unwrap_or(ZERO)
    }

    /// `ρⱼ = (1 - |αⱼ|²)^{1/2}`, factored to keep precision near the circle.
    pub fn rho(&self, j: usize) -> f64 {
        rho_of(self.alpha(j))
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.alphas.iter().map(|&a| rho_of(a)).collect()
    }

    /// The shifted sequence `α_k, α_{k+1}, …`.
    pub fn shift(&self, k: usize) -> Self {
        Self { alphas: self.alphas.get(k..).map(<[_]>::to_vec).unwrap_or_default() }
    }

    /// The first `n` coefficients, padding with zeros when `n` exceeds the length.
    pub fn truncated(&self, n: usize) -> Self {
        Self { alphas: (0..n).map(|j| self.alpha(j)).collect() }
    }

    /// Coefficients of the Aleksandrov measure `μ_λ`: `αⱼ ↦ λαⱼ`.
    pub fn aleksandrov(&self, lambda: Complex64) -> Result<Self> {
        let modulus = lambda.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(OpucError::NotUnimodular(modulus));
        }
        Ok(Self { alphas: self.alphas.iter().map(|a| a * lambda).collect() })
    }

    /// `∏ⱼ ρⱼ²` over the stored prefix.
    pub fn rho_product_sq(&self) -> f64 {
        self.alphas.iter().map(|a| 1.0 - a.norm_sqr()).product()
    }
}

pub(crate) fn rho_of(alpha: Complex64) -> f64 {
    let r = alpha.norm();
    ((1.0 - r) * (1.0 + r)).sqrt()
}

/// JSON form of a coefficient sequence: `{"alphas": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSpec {
    pub alphas: Vec<[f64; 2]>,
    /// Coefficients `α₋₁, α₋₂, …` of a two-sided sequence.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphas_minus: Vec<[f64; 2]>,
}

impl CoefficientSpec {
    pub fn to_seq(&self) -> Result<VerblunskySeq> {
        VerblunskySeq::new(self.alphas.iter().map(|a| Complex64::new(a[0], a[1])).collect())
    }

    pub fn minus_seq(&self) -> Result<VerblunskySeq> {
        VerblunskySeq::new(self.alphas_minus.iter().map(|a| Complex64::new(a[0], a[1])).collect())
    }
}

impl From<&VerblunskySeq> for CoefficientSpec {
    fn from(v: &VerblunskySeq) -> Self {
        Self { alphas: v.alphas().iter().map(|a| [a.re, a.im]).collect(), alphas_minus: Vec::new() }
    }
}

/// Orthogonal polynomial of degree `n` together with its reversed partner.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPair {
    pub degree: usize,
    pub phi: Vec<Complex64>,
    pub phi_star: Vec<Complex64>,
    pub monic: bool,
}

impl PolyPair {
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        (horner(&self.phi, z), horner(&self.phi_star, z))
    }
}

/// Value of an ascending coefficient vector at `z`.
pub fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

fn degree_of(q: &[Complex64]) -> usize {
    q.iter().rposition(|c| *c != ZERO).unwrap_or(0)
}

/// The degree-`n` reversal `q*(z) = zⁿ conj(q(1/z̄))`.
pub fn star(q: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let degree = degree_of(q);
    if degree > n {
        return Err(OpucError::DegreeMismatch { degree, n });
    }
    Ok((0..=n)
        .map(|k| q.get(n - k).copied().unwrap_or(ZERO).conj())
        .collect())
}

fn shift_up(p: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(ZERO);
    out.extend_from_slice(p);
    out
}

/// Full record of a measure-driven Szegő recursion.
#[derive(Debug, Clone)]
pub struct SzegoExtraction {
    pub seq: VerblunskySeq,
    /// Monic `Φ₀ … Φₙ`.
    pub monic: Vec<Vec<Complex64>>,
    /// `‖Φₖ‖²` computed by quadrature, `k = 0..=n`.
    pub norms_sq: Vec<f64>,
    /// Largest disagreement between the inner-product quotient for `ᾱₖ`
    /// and `-Φₖ₊₁(0)` read back after the update.
    pub consistency: f64,
}

/// Runs the monic recursion against the measure for `n` steps.
pub fn extract(m: &CircleMeasure, n: usize) -> Result<SzegoExtraction> {
    if 8 * n > m.grid() {
        return Err(OpucError::ResolutionExceeded { order: n, grid: m.grid() });
    }
    m.check_nontrivial(n)?;
    let c = m.moments(n.max(1))?;
    let mut phi = vec![ONE];
    let mut phi_star = vec![ONE];
    let mut alphas = Vec::with_capacity(n);
    let mut monic = vec![phi.clone()];
    let mut norms_sq = Vec::with_capacity(n + 1);
    let mut consistency: f64 = 0.0;
    for k in 0..=n {
        let norm_sq = c.bilinear(&phi, &phi).re;
        if !(norm_sq >= TRIVIAL_NORM_SQ) {
            return Err(OpucError::TrivialMeasure { degree: k, norm_sq });
        }
        norms_sq.push(norm_sq);
        if k == n {
            break;
        }
        let z_phi = shift_up(&phi);
        let alpha_bar = c.bilinear(&phi_star, &z_phi) / norm_sq;
        let alpha = alpha_bar.conj();
        if alpha.norm() >= 1.0 - BREAKDOWN_MARGIN {
            return Err(OpucError::NumericalBreakdown { step: k, modulus: alpha.norm() });
        }
        // Φₖ₊₁ = zΦₖ − ᾱₖΦₖ*,  Φₖ₊₁* = Φₖ* − αₖ zΦₖ
        let next: Vec<Complex64> = (0..=k + 1)
            .map(|i| z_phi[i] - alpha_bar * phi_star.get(i).copied().unwrap_or(ZERO))
            .collect();
        let next_star: Vec<Complex64> = (0..=k + 1)
            .map(|i| phi_star.get(i).copied().unwrap_or(ZERO) - alpha * z_phi[i])
            .collect();
        consistency = consistency.max((-next[0].conj() - alpha).norm());
        alphas.push(alpha);
        phi = next;
        phi_star = next_star;
        monic.push(phi.clone());
    }
    Ok(SzegoExtraction { seq: VerblunskySeq { alphas }, monic, norms_sq, consistency })
}

/// `α₀ … α_{n-1}` of a nontrivial measure.
pub fn verblunsky_from_measure(m: &CircleMeasure, n: usize) -> Result<VerblunskySeq> {
    extract(m, n).map(|e| e.seq)
}

/// Orthonormal `(φₖ, φₖ*)` for `k = 0..=upto`, via
/// `φₖ₊₁ = ρₖ⁻¹(zφₖ − ᾱₖφₖ*)`, `φₖ₊₁* = ρₖ⁻¹(φₖ* − αₖzφₖ)`.
pub fn polys_from_verblunsky(v: &VerblunskySeq, upto: usize) -> Result<Vec<PolyPair>> {
    recursion(v, upto, false)
}

/// Monic `(Φₖ, Φₖ*)` for `k = 0..=upto`.
pub fn monic_polys_from_verblunsky(v: &VerblunskySeq, upto: usize) -> Result<Vec<PolyPair>> {
    recursion(v, upto, true)
}

/// Point values `(φₖ(z), φₖ*(z))` for `k = 0..=upto`, reading coefficients
/// past the end of `v` as zero.
pub fn opuc_values(v: &VerblunskySeq, z: Complex64, upto: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::with_capacity(upto + 1);
    let (mut phi, mut phi_star) = (ONE, ONE);
    out.push((phi, phi_star));
    for k in 0..upto {
        let alpha = v.alpha(k);
        let inv_rho = 1.0 / v.rho(k);
        let z_phi = z * phi;
        (phi, phi_star) = ((z_phi - alpha.conj() * phi_star) * inv_rho, (phi_star - alpha * z_phi) * inv_rho);
        out.push((phi, phi_star));
    }
    out
}

fn recursion(v: &VerblunskySeq, upto: usize, monic: bool) -> Result<Vec<PolyPair>> {
    if upto > v.len() {
        return Err(OpucError::InvalidParameter(format!(
            "degree {upto} exceeds sequence length {}",
            v.len()
        )));
    }
    let mut out = Vec::with_capacity(upto + 1);
    let mut phi = vec![ONE];
    let mut phi_star = vec![ONE];
    out.push(PolyPair { degree: 0, phi: phi.clone(), phi_star: phi_star.clone(), monic });
    for k in 0..upto {
        let alpha = v.alpha(k);
        let scale = if monic { 1.0 } else { 1.0 / v.rho(k) };
        let z_phi = shift_up(&phi);
        let next: Vec<Complex64> = (0..=k + 1)
            .map(|i| (z_phi[i] - alpha.conj() * phi_star.get(i).copied().unwrap_or(ZERO)) * scale)
            .collect();
        let next_star: Vec<Complex64> = (0..=k + 1)
            .map(|i| (phi_star.get(i).copied().unwrap_or(ZERO) - alpha * z_phi[i]) * scale)
            .collect();
        phi = next;
        phi_star = next_star;
        out.push(PolyPair { degree: k + 1, phi: phi.clone(), phi_star: phi_star.clone(), monic });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{gallery, CircleMeasure, Weight};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn star_examples() {
        let q = [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(star(&q, 3).unwrap(), vec![c(1.0, 0.0), ZERO, ZERO, ZERO]);
        let q = [c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.5)];
        assert_eq!(star(&q, 2).unwrap(), vec![c(0.5, -0.5), c(3.0, 1.0), c(1.0, -2.0)]);
        let q = [c(-0.5, 0.0), c(1.0, 0.0)];
        assert_eq!(star(&q, 1).unwrap(), vec![c(1.0, 0.0), c(-0.5, 0.0)]);
        // padding beyond the degree is allowed; true degree overflow is not
        assert_eq!(star(&[ONE], 2).unwrap(), vec![ZERO, ZERO, ONE]);
        assert!(matches!(star(&q, 0), Err(OpucError::DegreeMismatch { degree: 1, n: 0 })));
    }

    proptest! {
        #[test]
        fn star_is_an_involution(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12), extra in 0usize..3) {
            let q: Vec<Complex64> = coeffs.iter().map(|&(a, b)| c(a, b)).collect();
            let n = q.len() - 1 + extra;
            let back = star(&star(&q, n).unwrap(), n).unwrap();
            for (i, b) in back.iter().enumerate() {
                prop_assert_eq!(*b, q.get(i).copied().unwrap_or(ZERO));
            }
        }

        #[test]
        fn star_preserves_lebesgue_norm(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)) {
            let m = CircleMeasure::new(Weight::Lebesgue, vec![], 256).unwrap();
            let q: Vec<Complex64> = coeffs.iter().map(|&(a, b)| c(a, b)).collect();
            let s = star(&q, q.len() - 1).unwrap();
            let nq = m.inner_product(&q, &q).unwrap().re;
            let ns = m.inner_product(&s, &s).unwrap().re;
            prop_assert!((nq - ns).abs() < 1e-12 * nq.max(1.0));
        }
    }

    #[test]
    fn star_isometry_for_general_measure() {
        for (_, m) in gallery() {
            let q = vec![c(0.3, -0.2), c(1.0, 0.5), c(-0.7, 0.1)];
            let s = star(&q, 2).unwrap();
            let nq = m.inner_product(&q, &q).unwrap().re;
            let ns = m.inner_product(&s, &s).unwrap().re;
            assert!((nq - ns).abs() < 1e-12);
        }
    }

    #[test]
    fn lebesgue_has_zero_coefficients() {
        let v = verblunsky_from_measure(&CircleMeasure::lebesgue(), 5).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.alphas().iter().all(|a| a.norm() < 1e-15));
    }

    #[test]
    fn one_minus_cos_first_coefficient() {
        let m = CircleMeasure::fourier(vec![1.0, -1.0], vec![]).unwrap();
        let v = verblunsky_from_measure(&m, 1).unwrap();
        assert!((v.alpha(0) - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((v.alpha(0) - m.moment(1).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn norm_law_and_consistency() {
        for (name, m) in gallery() {
            let e = extract(&m, 20).unwrap();
            assert!(e.consistency < 1e-11, "{name}");
            for k in 0..20 {
                let lhs = e.norms_sq[k + 1].sqrt();
                let rhs = e.seq.rho(k) * e.norms_sq[k].sqrt();
                assert!((lhs - rhs).abs() < 1e-10, "{name} k={k}");
            }
        }
    }

    #[test]
    fn trivial_measures_rejected() {
        use crate::measure::Atom;
        let atoms: Vec<Atom> = (0..3).map(|k| Atom { theta: k as f64, mass: 1.0 }).collect();
        let m = CircleMeasure::new(Weight::Fourier { cos: vec![0.0], sin: vec![] }, atoms, 256)
            .unwrap()
            .normalize()
            .unwrap();
        assert!(verblunsky_from_measure(&m, 2).is_ok());
        assert!(matches!(verblunsky_from_measure(&m, 3), Err(OpucError::TrivialMeasure { .. })));
        assert!(matches!(
            verblunsky_from_measure(&CircleMeasure::lebesgue(), 600),
            Err(OpucError::ResolutionExceeded { .. })
        ));
    }

    #[test]
    fn free_polynomials() {
        let ps = polys_from_verblunsky(&VerblunskySeq::zeros(3), 3).unwrap();
        for (k, p) in ps.iter().enumerate() {
            let mut expect = vec![ZERO; k + 1];
            expect[k] = ONE;
            assert_eq!(p.phi, expect);
            assert_eq!(p.phi_star[0], ONE);
            assert!(p.phi_star[1..].iter().all(|x| *x == ZERO));
        }
    }

    #[test]
    fn single_step_matches_monic_and_norm() {
        let v = VerblunskySeq::from_real(&[0.5]).unwrap();
        let rho0 = 3f64.sqrt() / 2.0;
        assert!((v.rho(0) - rho0).abs() < 1e-16);
        let ortho = polys_from_verblunsky(&v, 1).unwrap();
        let monic = monic_polys_from_verblunsky(&v, 1).unwrap();
        assert_eq!(monic[1].phi, vec![c(-0.5, 0.0), ONE]);
        for i in 0..2 {
            assert!((ortho[1].phi[i] - monic[1].phi[i] / rho0).norm() < 1e-15);
        }
        assert!(polys_from_verblunsky(&v, 2).is_err());
    }

    #[test]
    fn monic_norms_are_rho_products() {
        let m = CircleMeasure::bernstein_szego(0.5).unwrap();
        let v = verblunsky_from_measure(&m, 6).unwrap();
        let monic = monic_polys_from_verblunsky(&v, 6).unwrap();
        let mut prod = 1.0;
        for (k, p) in monic.iter().enumerate() {
            let norm = m.inner_product(&p.phi, &p.phi).unwrap().re.sqrt();
            assert!((norm - prod).abs() < 1e-12, "k={k}");
            prod *= v.rho(k);
        }
    }

    #[test]
    fn rho_identity() {
        let v = VerblunskySeq::new(vec![c(0.3, 0.4), c(-0.999, 0.0), c(0.0, 0.0)]).unwrap();
        for j in 0..3 {
            let r = v.rho(j);
            assert!(r > 0.0 && r <= 1.0);
            assert!((r * r + v.alpha(j).norm_sqr() - 1.0).abs() < 1e-15);
        }
        assert!(matches!(
            VerblunskySeq::new(vec![c(0.6, 0.8)]),
            Err(OpucError::InvalidAlpha { index: 0, .. })
        ));
    }

    #[test]
    fn aleksandrov_examples() {
        let v = VerblunskySeq::from_real(&[0.5, 0.0]).unwrap();
        assert_eq!(v.aleksandrov(ONE).unwrap(), v);
        assert_eq!(v.aleksandrov(c(-1.0, 0.0)).unwrap().alphas(), &[c(-0.5, 0.0), c(-0.0, -0.0)]);
        let w = VerblunskySeq::from_real(&[0.5]).unwrap().aleksandrov(c(0.0, 1.0)).unwrap();
        assert!((w.alpha(0) - c(0.0, 0.5)).norm() < 1e-16);
        assert!((w.rho(0) - 3f64.sqrt() / 2.0).abs() < 1e-16);
        assert!(matches!(v.aleksandrov(c(1.1, 0.0)), Err(OpucError::NotUnimodular(_))));
    }

    #[test]
    fn distinct_presets_give_distinct_coefficients() {
        let g = gallery();
        let seqs: Vec<VerblunskySeq> =
            g.iter().map(|(_, m)| verblunsky_from_measure(m, 6).unwrap()).collect();
        for i in 0..seqs.len() {
            for j in i + 1..seqs.len() {
                let d = seqs[i]
                    .alphas()
                    .iter()
                    .zip(seqs[j].alphas())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(d > 1e-3, "{} vs {}", g[i].0, g[j].0);
            }
        }
    }
}
