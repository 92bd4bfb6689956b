//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p opuc-core --test acceptance`.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use num_complex::Complex;
use opuc::analytic::{caratheodory, pure_point_mass, schur_from_alphas, RadialLadder};
use opuc::lyapunov::{lyapunov_stochastic_with_workers, CoefficientLaw};
use opuc::measure::{gallery, smooth_gallery};
use opuc::relative::{
    delta0d, delta0d_polynomial_limit, ratio_identity_check, step_sum_rule, step_sum_rule_measure,
    szego_theorem_check, szego_theorem_measure, weight_ratio_boundary,
};
use opuc::szego::{opuc_values, polys_from_verblunsky, verblunsky_from_measure};
use opuc::transfer::{cocycle, f_limit_check_measure, m_tilde, weyl_beta, weyl_beta_measure, weyl_tail_norm};
use opuc::{CircleMeasure, Complex64, VerblunskySeq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn disk_point(rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> Complex64 {
    let r = r_min + (r_max - r_min) * rng.random::<f64>();
    Complex64::from_polar(r, TAU * rng.random::<f64>())
}

fn random_seq(rng: &mut ChaCha8Rng, n: usize, radius: f64, decay: f64) -> VerblunskySeq {
    let alphas = (0..n).map(|j| disk_point(rng, 0.0, radius) * decay.powi(j as i32)).collect();
    VerblunskySeq::new(alphas).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Debug>(err: E) -> String {
    format!("error: {err:?}")
}

// ---------------------------------------------------------------------------

fn roundtrip_gram() -> Outcome {
    let order = 20;
    let mut worst = 0.0f64;
    let presets = smooth_gallery();
    for (_, m) in &presets {
        let v = verblunsky_from_measure(m, order).map_err(e)?;
        let polys = polys_from_verblunsky(&v, order).map_err(e)?;
        for (j, p) in polys.iter().enumerate() {
            for (k, q) in polys.iter().enumerate() {
                let g = m.inner_product(&p.phi, &q.phi).map_err(e)?;
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
    }
    check(presets.len() == 5 && worst < 1e-9, format!("{} presets, max |G - I| = {worst:.3e}", presets.len()))
}

/// Monic orthogonal polynomials by classical Gram–Schmidt on `1, z, z², …`
/// with the Toeplitz form of independently computed moments.
fn gram_schmidt_alphas(weight: impl Fn(f64) -> f64, grid: usize, n: usize) -> Vec<Complex64> {
    let moment = |k: i64| -> Complex64 {
        (0..grid)
            .map(|j| {
                let t = TAU * j as f64 / grid as f64;
                Complex64::from_polar(weight(t), -(k as f64) * t)
            })
            .sum::<Complex64>()
            / grid as f64
    };
    let c: Vec<Complex64> = (-(n as i64) - 1..=n as i64 + 1).map(moment).collect();
    let cm = |k: i64| c[(k + n as i64 + 1) as usize];
    // ⟨p, q⟩ = Σ conj(pⱼ) qₖ c_{j−k}
    let ip = |p: &[Complex64], q: &[Complex64]| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, pj) in p.iter().enumerate() {
            for (k, qk) in q.iter().enumerate() {
                s += pj.conj() * qk * cm(j as i64 - k as i64);
            }
        }
        s
    };
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for deg in 0..=n {
        let mut p = vec![Complex64::new(0.0, 0.0); deg + 1];
        p[deg] = Complex64::new(1.0, 0.0);
        let mono = p.clone();
        for b in &basis {
            let coef = ip(b, &mono) / ip(b, b);
            for (pi, bi) in p.iter_mut().zip(b) {
                *pi -= coef * bi;
            }
        }
        basis.push(p);
    }
    (0..n).map(|k| -basis[k + 1][0].conj()).collect()
}

fn bernstein_szego_recovery() -> Outcome {
    let order = 20;
    let a = 0.5;
    let m = CircleMeasure::bernstein_szego(a).map_err(e)?;
    let v = verblunsky_from_measure(&m, order).map_err(e)?;
    let oracle = gram_schmidt_alphas(|t| (1.0 - a * a) / (1.0 - 2.0 * a * t.cos() + a * a), 4096, order);
    let vs_oracle = v.alphas().iter().zip(&oracle).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let expected: Vec<Complex64> = (0..order).map(|j| c(if j == 0 { a } else { 0.0 }, 0.0)).collect();
    let vs_exact = v.alphas().iter().zip(&expected).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let oracle_exact = oracle.iter().zip(&expected).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    check(
        vs_oracle < 1e-10 && vs_exact < 1e-10 && oracle_exact < 1e-10,
        format!("|α − GS| = {vs_oracle:.3e}, |α − (0.5,0,…)| = {vs_exact:.3e}, |GS − (0.5,0,…)| = {oracle_exact:.3e}"),
    )
}

fn determinant_law() -> Outcome {
    let n = 200;
    let mut r = rng(3);
    let v = random_seq(&mut r, n, 0.5, 1.0);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = disk_point(&mut r, 0.2, 0.95);
        let det = cocycle(&v, z, n).map_err(e)?.det();
        // compare through logarithms so that zⁿ never underflows
        let target = z.ln() * n as f64;
        let rel = ((det.ln() - target).exp() - 1.0).norm();
        worst = worst.max(rel);
    }
    check(worst < 1e-8, format!("n = {n}, 20 points, max relative error = {worst:.3e}"))
}

fn szego_theorem() -> Outcome {
    let v = VerblunskySeq::from_real(&[0.5, 1.0 / 3.0, 0.25]).map_err(e)?;
    let eq = szego_theorem_check(&v, 3).map_err(e)?.equality_residual();
    let mut margin = f64::INFINITY;
    for (_, m) in smooth_gallery() {
        for n in 1..=20 {
            let rep = szego_theorem_measure(&m, n).map_err(e)?;
            margin = margin.min(rep.inequality_margin.expect("measure-backed report"));
        }
    }
    check(eq < 1e-9 && margin >= -1e-9, format!("equality residual = {eq:.3e}, min inequality margin = {margin:.3e}"))
}

fn step_sum_rules() -> Outcome {
    let mut r = rng(5);
    let mut finite = 0.0f64;
    let mut seqs = vec![VerblunskySeq::from_real(&[0.5, 1.0 / 3.0, 0.25]).map_err(e)?];
    for len in [1, 4, 7] {
        seqs.push(random_seq(&mut r, len, 0.7, 1.0));
    }
    for v in &seqs {
        finite = finite.max(step_sum_rule(v, v.len() + 2).map_err(e)?.max_error());
    }
    let mut measured = 0.0f64;
    for (_, m) in smooth_gallery() {
        measured = measured.max(step_sum_rule_measure(&m, 10).map_err(e)?.max_error());
    }
    check(
        finite < 1e-8 && measured < 1e-5,
        format!("finite-rank max error = {finite:.3e}, measure-backed max error = {measured:.3e}"),
    )
}

fn second_kind_limit() -> Outcome {
    let mut points = vec![c(0.0, 0.0)];
    for r in [0.3, 0.6] {
        for j in 0..8 {
            points.push(Complex64::from_polar(r, TAU * j as f64 / 8.0 + 0.1));
        }
    }
    let mut worst = 0.0f64;
    let presets = gallery();
    for (_, m) in &presets {
        for &z in &points {
            worst = worst.max(f_limit_check_measure(m, z, 60).map_err(e)?.last());
        }
    }
    check(
        worst < 1e-6,
        format!("{} measures × {} points, n = 60, max |ψ*/φ* − F| = {worst:.3e}", presets.len(), points.len()),
    )
}

fn weyl_coefficient() -> Outcome {
    let k = 400;
    let points = [c(0.5, 0.0), c(0.0, 0.3), c(-0.4, 0.2)];
    let mut beta_err = 0.0f64;
    let mut min_log_gap = f64::INFINITY;
    let mut tally = |v: &VerblunskySeq, z: Complex64, beta: Complex64, big_f: Complex64| -> Result<(), String> {
        beta_err = beta_err.max((beta - big_f).norm());
        let perturbed = big_f + c(1e-4, 1e-4);
        let gap = weyl_tail_norm(v, z, k, perturbed).map_err(e)? - weyl_tail_norm(v, z, k, big_f).map_err(e)?;
        min_log_gap = min_log_gap.min(gap);
        Ok(())
    };
    for (_, m) in smooth_gallery() {
        let v = verblunsky_from_measure(&m, k).map_err(e)?;
        for &z in &points {
            let fit = weyl_beta_measure(&m, z, k).map_err(e)?;
            tally(&v, z, fit.beta, caratheodory(&m, z).map_err(e)?)?;
        }
    }
    let mut r = rng(7);
    for _ in 0..3 {
        let v = random_seq(&mut r, 60, 0.8, 0.85);
        for &z in &points {
            let fit = weyl_beta(&v, z, k).map_err(e)?;
            tally(&v, z, fit.beta, opuc::transfer::caratheodory_of(&v, z).map_err(e)?)?;
        }
    }
    let factor = min_log_gap.exp();
    check(
        beta_err < 1e-6 && min_log_gap > 1e3f64.ln(),
        format!("K = {k}, max |β̂ − F| = {beta_err:.3e}, min tail ratio = {factor:.3e}"),
    )
}

fn m_tilde_identity() -> Outcome {
    let mut r = rng(8);
    let v = random_seq(&mut r, 12, 0.7, 1.0);
    let n = v.len();
    let flipped = v.aleksandrov(c(-1.0, 0.0)).map_err(e)?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = disk_point(&mut r, 0.0, 0.95);
        // F from the terminal polynomial ratio, f from the Schur fraction
        let big_f = opuc_values(&flipped, z, n)[n].1 / opuc_values(&v, z, n)[n].1;
        let f = schur_from_alphas(&v, z).map_err(e)?;
        worst = worst.max((m_tilde(big_f).map_err(e)? - z * f).norm());
    }
    check(worst < 1e-11, format!("100 points, max |m̃ − zf| = {worst:.3e}"))
}

fn ratio_identities() -> Outcome {
    let mut r = rng(9);
    let mut seqs = vec![VerblunskySeq::from_real(&[0.5, 1.0 / 3.0, 0.25]).map_err(e)?];
    seqs.push(random_seq(&mut r, 6, 0.6, 1.0));
    let mut interior = 0.0f64;
    for v in &seqs {
        for _ in 0..50 {
            let z = disk_point(&mut r, 0.0, 0.9);
            interior = interior.max(ratio_identity_check(v, z).map_err(e)?.max());
        }
    }
    let ladder = RadialLadder::default();
    let mut boundary = 0.0f64;
    for v in &seqs {
        for j in 0..12 {
            let theta = TAU * j as f64 / 12.0;
            boundary = boundary.max(weight_ratio_boundary(v, theta, &ladder).map_err(e)?.residual());
        }
    }
    check(
        interior < 1e-11 && boundary < 1e-5,
        format!("interior max residual = {interior:.3e}, boundary max residual (12 angles) = {boundary:.3e}"),
    )
}

type Q = Complex<BigRational>;

fn q_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn q_frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn q_to_f64(x: &Q) -> Complex64 {
    c(x.re.to_f64().unwrap(), x.im.to_f64().unwrap())
}

fn q_abs(x: &Q) -> f64 {
    x.norm_sqr().to_f64().unwrap().sqrt()
}

/// `Φ*ₖ(z)` for `k = 0..=upto` in exact arithmetic, monic normalization.
fn q_monic_star(alphas: &[Q], z: &Q, upto: usize) -> Vec<Q> {
    let zero = Q::new(q_int(0), q_int(0));
    let (mut phi, mut phi_star) = (Q::one(), Q::one());
    let mut out = vec![phi_star.clone()];
    for k in 0..upto {
        let a = alphas.get(k).cloned().unwrap_or_else(|| zero.clone());
        let z_phi = z * &phi;
        let next = &z_phi - a.conj() * &phi_star;
        phi_star = &phi_star - a * z_phi;
        phi = next;
        out.push(phi_star.clone());
    }
    out
}

fn q_schur(alphas: &[Q], z: &Q) -> Q {
    let mut f = Q::zero();
    for a in alphas.iter().rev() {
        let w = z * &f;
        f = (a + &w) / (Q::one() + a.conj() * w);
    }
    f
}

fn delta0d_limit() -> Outcome {
    // finite rank: exact once n reaches the rank
    let mut finite = 0.0f64;
    let mut r = rng(10);
    for v in [VerblunskySeq::from_real(&[0.5, 1.0 / 3.0, 0.25]).map_err(e)?, random_seq(&mut r, 5, 0.7, 1.0)] {
        for _ in 0..10 {
            let z = disk_point(&mut r, 0.0, 0.9);
            let target = delta0d(&v, z).map_err(e)?;
            let ratios = delta0d_polynomial_limit(&v, z, v.len() + 10).map_err(e)?;
            for q in ratios.iter().skip(v.len() - 1) {
                finite = finite.max((q - target).norm());
            }
        }
    }

    // random decaying rational coefficients, evaluated exactly at z = 1/2
    let len = 80;
    let n_max = 60;
    // |αⱼ| ∝ 2^{−j}: random signs and a random magnitude factor per component
    let alphas_q: Vec<Q> = (0..len)
        .map(|j| {
            let den: BigInt = BigInt::from(1) << (j + 4);
            let mut entry = || {
                let sign = if r.random::<bool>() { 1 } else { -1 };
                BigRational::new(BigInt::from(sign * r.random_range(4..=5)), den.clone())
            };
            Q::new(entry(), entry())
        })
        .collect();
    let v = VerblunskySeq::new(alphas_q.iter().map(q_to_f64).collect()).map_err(e)?;
    let z_q = Q::new(q_frac(1, 2), q_int(0));
    let z = q_to_f64(&z_q);
    let full = q_monic_star(&alphas_q, &z_q, n_max);
    let shifted = q_monic_star(&alphas_q[1..], &z_q, n_max - 1);
    let a0 = &alphas_q[0];
    let f = q_schur(&alphas_q, &z_q);
    let f1 = q_schur(&alphas_q[1..], &z_q);
    // δ₀D/ρ₀ = (1 − ᾱ₀f)(1 − zf₁)/((1 − |α₀|²)(1 − zf))
    let reference = (Q::one() - a0.conj() * &f) * (Q::one() - &z_q * &f1)
        / (Q::new(BigRational::one() - a0.norm_sqr(), q_int(0)) * (Q::one() - &z_q * &f));
    let rho0 = v.rho(0);
    let exact: Vec<f64> = (1..=n_max).map(|n| rho0 * q_abs(&(&shifted[n - 1] / &full[n] - &reference))).collect();
    let monotone = exact[n_max - 20..].windows(2).all(|w| w[1] < w[0]);

    let lib = delta0d_polynomial_limit(&v, z, n_max).map_err(e)?;
    let lib_target = delta0d(&v, z).map_err(e)?;
    let ref_f64 = q_to_f64(&reference) * rho0;
    let mut agree = (lib_target - ref_f64).norm();
    for n in 1..=n_max {
        agree = agree.max((lib[n - 1] - q_to_f64(&(&shifted[n - 1] / &full[n])) * rho0).norm());
    }
    let mut at_60 = (lib[n_max - 1] - lib_target).norm();
    for theta in [PI / 2.0, PI, 2.0] {
        let zz = Complex64::from_polar(0.5, theta);
        let ratios = delta0d_polynomial_limit(&v, zz, n_max).map_err(e)?;
        at_60 = at_60.max((ratios[n_max - 1] - delta0d(&v, zz).map_err(e)?).norm());
    }
    check(
        finite < 1e-10 && exact[n_max - 1] < 1e-5 && at_60 < 1e-5 && monotone && agree < 1e-12,
        format!(
            "finite-rank max = {finite:.3e}; random: exact residual at n = 60 = {:.3e}, f64 residual = {at_60:.3e}, \
             monotone over last 20 = {monotone}, f64 vs exact = {agree:.3e}",
            exact[n_max - 1]
        ),
    )
}

fn kotani_identity() -> Outcome {
    let law = CoefficientLaw::UniformDisk { radius: 0.5 };
    let z = c(0.5, 0.0);
    let a = lyapunov_stochastic_with_workers(&law, z, 2000, 200, 42, 4).map_err(e)?;
    let b = lyapunov_stochastic_with_workers(&law, z, 2000, 200, 42, 1).map_err(e)?;
    let reproducible = a == b && a.gamma2.to_bits() == b.gamma2.to_bits() && a.gamma.to_bits() == b.gamma.to_bits();
    check(
        a.kotani_holds() && reproducible,
        format!(
            "E log|m⁺| = {:.6}, log|z| − γ = {:.6}, residual = {:.3e}, 3·stderr = {:.3e}, reproducible = {reproducible}",
            a.gamma2,
            z.norm().ln() - a.gamma,
            a.kotani_residual(),
            3.0 * a.mc_stderr
        ),
    )
}

fn pure_point_diagnostic() -> Outcome {
    let (_, m) = gallery().into_iter().find(|(name, _)| *name == "half_lebesgue_half_atom").expect("preset");
    let ladder = RadialLadder::default();
    let at_atom = pure_point_mass(&m, 0.0, &ladder).map_err(e)?;
    let mut elsewhere = 0.0f64;
    for j in 1..12 {
        let theta = TAU * j as f64 / 12.0 + 0.05;
        elsewhere = elsewhere.max(pure_point_mass(&m, theta, &ladder).map_err(e)?.abs());
    }
    check(
        (at_atom - 0.5).abs() < 1e-4 && elsewhere < 1e-6,
        format!("mass at atom = {at_atom:.8}, max elsewhere = {elsewhere:.3e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("roundtrip Gram fidelity", roundtrip_gram),
        ("Bernstein–Szegő recovery", bernstein_szego_recovery),
        ("determinant law", determinant_law),
        ("Szegő theorem", szego_theorem),
        ("step sum rule", step_sum_rules),
        ("second-kind ratio limit", second_kind_limit),
        ("Weyl coefficient", weyl_coefficient),
        ("m̃ = zf", m_tilde_identity),
        ("ratio identities", ratio_identities),
        ("δ₀D polynomial limit", delta0d_limit),
        ("Kotani identity", kotani_identity),
        ("pure-point diagnostic", pure_point_diagnostic),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
