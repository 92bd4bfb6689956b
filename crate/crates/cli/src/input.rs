//! Input specs, z-grids and error plumbing.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use opuc::lyapunov::CoefficientLaw;
use opuc::szego::CoefficientSpec;
use opuc::{CircleMeasure, MeasureSpec, OpucError, VerblunskySeq};
use serde_json::Value;

pub const EXIT_FAILED_CHECK: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_BOUNDARY: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    /// A library error raised by `op`; boundary points get their own code.
    pub fn numerical(op: &str, err: OpucError) -> Self {
        let code = match err {
            OpucError::BoundaryPoint { .. } => EXIT_BOUNDARY,
            _ => EXIT_NUMERICAL,
        };
        Self { code, message: format!("{op}: {err}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Shorthand for mapping library results inside a command.
pub trait Op<T> {
    fn op(self, name: &str) -> Result<T, CliError>;
}

impl<T> Op<T> for opuc::Result<T> {
    fn op(self, name: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::numerical(name, e))
    }
}

/// Stochastic run parameters: `{"law": "uniform-disk", "radius": r, "seed": s}`
/// with optional `steps` and `samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct LawInput {
    pub law: CoefficientLaw,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum Input {
    Measure(CircleMeasure),
    Coefficients { plus: VerblunskySeq, minus: VerblunskySeq },
    Law(LawInput),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::Measure(_) => "measure",
            Input::Coefficients { .. } => "coefficient",
            Input::Law(_) => "law",
        }
    }
}

pub fn load_input(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&text)
}

pub fn parse_input(text: &str) -> Result<Input, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::parse(format!("malformed JSON: {e}")))?;
    let obj = value.as_object().ok_or_else(|| CliError::parse("input must be a JSON object"))?;
    if obj.contains_key("alphas") {
        let spec: CoefficientSpec =
            serde_json::from_value(value).map_err(|e| CliError::parse(format!("coefficient spec: {e}")))?;
        let plus = spec.to_seq().map_err(|e| CliError::parse(format!("coefficient spec: {e}")))?;
        let minus = spec.minus_seq().map_err(|e| CliError::parse(format!("coefficient spec (alphas_minus): {e}")))?;
        Ok(Input::Coefficients { plus, minus })
    } else if obj.contains_key("law") {
        let law: CoefficientLaw =
            serde_json::from_value(value.clone()).map_err(|e| CliError::parse(format!("law spec: {e}")))?;
        law.validate().map_err(|e| CliError::parse(format!("law spec: {e}")))?;
        let field = |key: &str| -> Result<Option<u64>, CliError> {
            match obj.get(key) {
                None => Ok(None),
                Some(v) => {
                    v.as_u64().map(Some).ok_or_else(|| CliError::parse(format!("law spec: {key} must be a non-negative integer")))
                }
            }
        };
        Ok(Input::Law(LawInput {
            law,
            seed: field("seed")?,
            steps: field("steps")?.map(|n| n as usize),
            samples: field("samples")?.map(|n| n as usize),
        }))
    } else {
        let spec: MeasureSpec =
            serde_json::from_value(value).map_err(|e| CliError::parse(format!("measure spec: {e}")))?;
        let m = spec.to_measure().map_err(|e| CliError::parse(format!("measure spec: {e}")))?;
        Ok(Input::Measure(m))
    }
}

/// `polar:r1,r2,…:count` (radii × equally spaced angles) or
/// `points:re,im;re,im;…`.
pub fn parse_grid(text: &str) -> Result<Vec<Complex64>, CliError> {
    let bad = |why: &str| CliError::parse(format!("grid '{text}': {why}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{s}' is not a number")));
    if let Some(rest) = text.strip_prefix("polar:") {
        let (radii, count) = rest.rsplit_once(':').ok_or_else(|| bad("expected polar:r1,r2,…:count"))?;
        let count: usize = count.trim().parse().map_err(|_| bad("angle count must be a positive integer"))?;
        if count == 0 {
            return Err(bad("angle count must be a positive integer"));
        }
        let radii = radii.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        Ok(radii
            .iter()
            .flat_map(|&r| {
                (0..count).map(move |k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / count as f64))
            })
            .collect())
    } else if let Some(rest) = text.strip_prefix("points:") {
        rest.split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|pair| {
                let (re, im) = pair.split_once(',').ok_or_else(|| bad("points are re,im pairs"))?;
                Ok(Complex64::new(number(re)?, number(im)?))
            })
            .collect::<Result<Vec<_>, _>>()
            .and_then(|pts| if pts.is_empty() { Err(bad("no points")) } else { Ok(pts) })
    } else {
        Err(bad("expected polar:… or points:…"))
    }
}
