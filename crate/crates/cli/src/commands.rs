use num_complex::Complex64;
use opuc::analytic::{
    check_interior, rational_measure, schur_from_alphas, AnalyticEval, RadialLadder,
};
use opuc::lyapunov::{lyapunov_deterministic, lyapunov_stochastic, lyapunov_stochastic_with_workers, LyapunovReport};
use opuc::measure::DEFAULT_GRID;
use opuc::relative::{
    delta0d, ratio_identity_check, step_sum_rule, step_sum_rule_measure, szego_theorem_check, szego_theorem_measure,
    weight_ratio_boundary, weight_ratio_boundary_measure, RelativeSzego, StepSumRule,
};
use opuc::szego::verblunsky_from_measure;
use opuc::transfer::{caratheodory_of, cmv_green_two_sided, m_plus0, m_tilde, weyl_beta, weyl_tail_norm};
use opuc::{CircleMeasure, VerblunskySeq};

use crate::input::{CliError, Input, LawInput, Op};

pub const DEFAULT_SEED: u64 = 42;
const DEFAULT_STEPS: usize = 2000;
const DEFAULT_SAMPLES: usize = 200;
/// Offset added to `F` when probing how sharply the Weyl tail picks out `β`.
const WEYL_PERTURBATION: Complex64 = Complex64::new(1e-4, 1e-4);

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn label(name: &str, z: Complex64) -> String {
    format!("{name}[{:+.4}{:+.4}i]", z.re, z.im)
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn interior(op: &str, z: Complex64) -> Result<(), CliError> {
    check_interior(z).op(op)
}

// ---------------------------------------------------------------------------

pub fn verblunsky(input: &Input, order: Option<usize>) -> Result<String, CliError> {
    let (v, n) = match input {
        Input::Measure(m) => {
            let n = order.unwrap_or(20);
            (verblunsky_from_measure(m, n).op("verblunsky_from_measure")?, n)
        }
        Input::Coefficients { plus, .. } => (plus.clone(), order.unwrap_or(plus.len())),
        Input::Law(_) => return Err(CliError::parse("verblunsky needs a measure or coefficient spec")),
    };
    let rows = (0..n).map(|j| {
        let a = v.alpha(j);
        vec![j.to_string(), num(a.re), num(a.im), num(v.rho(j))]
    });
    Ok(csv(&["j", "re_alpha", "im_alpha", "rho"], rows))
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    #[value(name = "F")]
    Caratheodory,
    #[value(name = "R")]
    RFunction,
    #[value(name = "f")]
    Schur,
    #[value(name = "D")]
    Szego,
    #[value(name = "delta0D")]
    RelativeSzego,
    #[value(name = "m_tilde")]
    MTilde,
    #[value(name = "m_plus0")]
    MPlus0,
    #[value(name = "green")]
    Green,
}

impl Quantity {
    fn column(self) -> &'static str {
        match self {
            Quantity::Caratheodory => "F",
            Quantity::RFunction => "R",
            Quantity::Schur => "f",
            Quantity::Szego => "D",
            Quantity::RelativeSzego => "delta0D",
            Quantity::MTilde => "m_tilde",
            Quantity::MPlus0 => "m_plus0",
            Quantity::Green => "green",
        }
    }
}

enum Source<'a> {
    Measure { eval: AnalyticEval, m: &'a CircleMeasure },
    Coefficients { plus: &'a VerblunskySeq, minus: &'a VerblunskySeq },
}

impl Source<'_> {
    fn caratheodory(&self, z: Complex64) -> opuc::Result<Complex64> {
        match self {
            Source::Measure { eval, .. } => eval.caratheodory(z),
            Source::Coefficients { plus, .. } => caratheodory_of(plus, z),
        }
    }

    fn schur(&self, z: Complex64) -> opuc::Result<Complex64> {
        match self {
            Source::Measure { eval, .. } => eval.schur(z),
            Source::Coefficients { plus, .. } => schur_from_alphas(plus, z),
        }
    }

    /// Analytic evaluator of the measure, or of the zero-tail measure of the coefficients.
    fn evaluator(&self) -> opuc::Result<AnalyticEval> {
        match self {
            Source::Measure { m, .. } => Ok(AnalyticEval::new(m)),
            Source::Coefficients { plus, .. } => Ok(AnalyticEval::new(&rational_measure(plus, DEFAULT_GRID)?)),
        }
    }
}

pub fn evaluate(input: &Input, quantity: Quantity, grid: &[Complex64]) -> Result<String, CliError> {
    let source = match input {
        Input::Measure(m) => Source::Measure { eval: AnalyticEval::new(m), m },
        Input::Coefficients { plus, minus } => Source::Coefficients { plus, minus },
        Input::Law(_) => return Err(CliError::parse("evaluate needs a measure or coefficient spec")),
    };
    if quantity == Quantity::Green && !matches!(source, Source::Coefficients { .. }) {
        return Err(CliError::parse("green needs a coefficient spec with alphas and alphas_minus"));
    }
    let op = format!("evaluate {}", quantity.column());
    for &z in grid {
        interior(&op, z)?;
    }
    let extra = match quantity {
        Quantity::RFunction | Quantity::Szego => Some(source.evaluator().op(&op)?),
        _ => None,
    };
    let relative = match (&source, quantity) {
        (Source::Measure { m, .. }, Quantity::RelativeSzego | Quantity::MPlus0) => {
            Some(RelativeSzego::from_measure(m).op(&op)?)
        }
        _ => None,
    };
    let mut rows = Vec::with_capacity(grid.len());
    for &z in grid {
        let value = match quantity {
            Quantity::Caratheodory => source.caratheodory(z),
            Quantity::RFunction => extra.as_ref().expect("built above").r_function(z),
            Quantity::Schur => source.schur(z),
            Quantity::Szego => extra.as_ref().expect("built above").szego_function(z),
            Quantity::RelativeSzego => match (&source, &relative) {
                (_, Some(rel)) => rel.eval(z),
                (Source::Coefficients { plus, .. }, None) => delta0d(plus, z),
                _ => unreachable!(),
            },
            Quantity::MTilde => source.caratheodory(z).and_then(m_tilde),
            Quantity::MPlus0 => {
                let alpha0 = match (&source, &relative) {
                    (_, Some(rel)) => rel.alpha0(),
                    (Source::Coefficients { plus, .. }, None) => plus.alpha(0),
                    _ => unreachable!(),
                };
                source.schur(z).and_then(|f| m_plus0(alpha0, f, z))
            }
            Quantity::Green => match &source {
                Source::Coefficients { plus, minus } => cmv_green_two_sided(plus, minus, z),
                Source::Measure { .. } => unreachable!(),
            },
        }
        .op(&op)?;
        rows.push(vec![num(z.re), num(z.im), num(value.re), num(value.im)]);
    }
    let (re, im) = (format!("re_{}", quantity.column()), format!("im_{}", quantity.column()));
    Ok(csv(&["re_z", "im_z", &re, &im], rows))
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Sumrule,
    Szego,
    Weyl,
    Kotani,
    Ratio,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Sumrule => "sumrule",
            Suite::Szego => "szego",
            Suite::Weyl => "weyl",
            Suite::Kotani => "kotani",
            Suite::Ratio => "ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), residual, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

pub struct VerifyOptions {
    pub order: Option<usize>,
    pub grid: Option<Vec<Complex64>>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

pub fn verify(input: &Input, suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>, CliError> {
    let tol = |default: f64| opts.tolerance.unwrap_or(default);
    let grid = |default: &str| -> Result<Vec<Complex64>, CliError> {
        match &opts.grid {
            Some(g) => Ok(g.clone()),
            None => crate::input::parse_grid(default),
        }
    };
    let mut checks = Vec::new();
    match (suite, input) {
        (Suite::Sumrule, Input::Coefficients { plus, .. }) => {
            let report = step_sum_rule(plus, opts.order.unwrap_or(plus.len() + 2)).op("step_sum_rule")?;
            push_sum_rule(&mut checks, &report, tol(1e-8));
        }
        (Suite::Sumrule, Input::Measure(m)) => {
            let report = step_sum_rule_measure(m, opts.order.unwrap_or(10)).op("step_sum_rule_measure")?;
            push_sum_rule(&mut checks, &report, tol(1e-5));
        }
        (Suite::Szego, Input::Coefficients { plus, .. }) => {
            for n in 1..=opts.order.unwrap_or(plus.len()).max(1) {
                let r = szego_theorem_check(plus, n).op("szego_theorem_check")?;
                checks.push(Check::new(format!("equality_{n}"), r.equality_residual(), tol(1e-9)));
            }
        }
        (Suite::Szego, Input::Measure(m)) => {
            for n in 1..=opts.order.unwrap_or(20) {
                let r = szego_theorem_measure(m, n).op("szego_theorem_measure")?;
                checks.push(Check::new(format!("equality_{n}"), r.equality_residual(), tol(1e-9)));
                let margin = r.inequality_margin.expect("measure-backed report");
                checks.push(Check::new(format!("inequality_{n}"), (-margin).max(0.0), tol(1e-9)));
            }
        }
        (Suite::Weyl, Input::Coefficients { plus, .. }) => {
            let k = opts.order.unwrap_or(400);
            for z in grid("polar:0.3,0.5:4")? {
                let big_f = caratheodory_of(plus, z).op("weyl")?;
                push_weyl(&mut checks, plus, z, k, big_f, tol(1e-6))?;
            }
        }
        (Suite::Weyl, Input::Measure(m)) => {
            let k = opts.order.unwrap_or(400);
            let v = verblunsky_from_measure(m, k).op("verblunsky_from_measure")?;
            let eval = AnalyticEval::new(m);
            for z in grid("polar:0.3,0.5:4")? {
                let big_f = eval.caratheodory(z).op("weyl")?;
                push_weyl(&mut checks, &v, z, k, big_f, tol(1e-6))?;
            }
        }
        (Suite::Ratio, Input::Coefficients { plus, .. }) => {
            for z in grid("polar:0.3,0.6:6")? {
                let r = ratio_identity_check(plus, z).op("ratio_identity_check")?;
                checks.push(Check::new(label("interior", z), r.max(), tol(1e-11)));
            }
            let ladder = RadialLadder::default();
            for theta in angles(12) {
                let r = weight_ratio_boundary(plus, theta, &ladder).op("weight_ratio_boundary")?;
                checks.push(Check::new(format!("boundary[{theta:.4}]"), r.residual(), tol(1e-5)));
            }
        }
        (Suite::Ratio, Input::Measure(m)) => {
            let ladder = RadialLadder::default();
            for theta in angles(12) {
                let r = weight_ratio_boundary_measure(m, theta, &ladder).op("weight_ratio_boundary")?;
                checks.push(Check::new(format!("boundary[{theta:.4}]"), r.residual(), tol(1e-5)));
            }
        }
        (Suite::Kotani, Input::Law(law)) => {
            let (steps, samples, seed) = law_params(law, opts.order, opts.seed);
            for z in grid("points:0.5,0")? {
                let report = lyapunov_stochastic(&law.law, z, steps, samples, seed).op("lyapunov_stochastic")?;
                let bound = opts.tolerance.unwrap_or(3.0 * report.mc_stderr);
                checks.push(Check::new(label("kotani", z), report.kotani_residual(), bound));
                let rerun = lyapunov_stochastic_with_workers(&law.law, z, steps, samples, seed, 1)
                    .op("lyapunov_stochastic")?;
                let same = if rerun == report { 0.0 } else { 1.0 };
                checks.push(Check::new(label("reproducible", z), same, 0.0));
            }
        }
        (Suite::Kotani, Input::Coefficients { plus, .. }) => {
            for z in grid("points:0.5,0")? {
                let report = lyapunov_deterministic(plus, z).op("lyapunov_deterministic")?;
                checks.push(Check::new(label("kotani", z), report.kotani_residual(), tol(1e-8)));
            }
        }
        (suite, input) => {
            return Err(CliError::parse(format!("suite {} does not accept a {} spec", suite.name(), input.kind())));
        }
    }
    Ok(checks)
}

fn angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| std::f64::consts::TAU * j as f64 / n as f64)
}

fn push_sum_rule(checks: &mut Vec<Check>, report: &StepSumRule, tolerance: f64) {
    for s in &report.steps {
        checks.push(Check::new(format!("step_{}", s.n), s.abs_error(), tolerance));
    }
    for s in &report.cumulative {
        checks.push(Check::new(format!("cumulative_{}", s.n), s.abs_error(), tolerance));
    }
}

fn push_weyl(
    checks: &mut Vec<Check>,
    v: &VerblunskySeq,
    z: Complex64,
    k: usize,
    big_f: Complex64,
    tolerance: f64,
) -> Result<(), CliError> {
    let fit = weyl_beta(v, z, k).op("weyl_beta")?;
    checks.push(Check::new(label("beta_error", z), (fit.beta - big_f).norm(), tolerance));
    let exact = weyl_tail_norm(v, z, k, big_f).op("weyl_tail_norm")?;
    let perturbed = weyl_tail_norm(v, z, k, big_f + WEYL_PERTURBATION).op("weyl_tail_norm")?;
    // ratio of the true-β tail to the perturbed one; small when the tail singles out F
    checks.push(Check::new(label("tail_ratio", z), (exact - perturbed).exp(), 1e-3));
    Ok(())
}

fn law_params(law: &LawInput, order: Option<usize>, seed: Option<u64>) -> (usize, usize, u64) {
    (
        order.or(law.steps).unwrap_or(DEFAULT_STEPS),
        law.samples.unwrap_or(DEFAULT_SAMPLES),
        seed.or(law.seed).unwrap_or(DEFAULT_SEED),
    )
}

pub fn report_csv(checks: &[Check]) -> String {
    csv(
        &["check", "residual", "tolerance", "pass"],
        checks.iter().map(|c| vec![c.name.clone(), num(c.residual), num(c.tolerance), c.passed().to_string()]),
    )
}

// ---------------------------------------------------------------------------

pub fn lyapunov(
    input: &Input,
    grid: Option<&[Complex64]>,
    order: Option<usize>,
    seed: Option<u64>,
) -> Result<String, CliError> {
    let default = crate::input::parse_grid("points:0.5,0")?;
    let grid = grid.unwrap_or(&default);
    let mut rows = Vec::with_capacity(grid.len());
    for &z in grid {
        interior("lyapunov", z)?;
        let report: LyapunovReport = match input {
            Input::Law(law) => {
                let (steps, samples, seed) = law_params(law, order, seed);
                lyapunov_stochastic(&law.law, z, steps, samples, seed).op("lyapunov_stochastic")?
            }
            Input::Coefficients { plus, .. } => lyapunov_deterministic(plus, z).op("lyapunov_deterministic")?,
            Input::Measure(_) => return Err(CliError::parse("lyapunov needs a law or coefficient spec")),
        };
        rows.push(vec![
            num(z.re),
            num(z.im),
            num(report.gamma2),
            num(report.gamma),
            num(report.mc_stderr),
            num(report.kotani_residual()),
            num(report.gamma2_norm),
            report.non_convergent.to_string(),
        ]);
    }
    Ok(csv(
        &["re_z", "im_z", "gamma2", "gamma", "stderr", "kotani_residual", "gamma2_norm", "non_convergent"],
        rows,
    ))
}
