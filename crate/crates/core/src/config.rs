//! JSON run configuration.
//!
//! ```json
//! {
//!   "interval": {"a1": -1, "a2": 0},
//!   "nu1": 1, "nu2": "inf",
//!   "b1": 90, "b2": 110,
//!   "B": {"breakpoints": [-1, -0.5, 0], "values": [90, 110]}
//! }
//! ```
//!
//! Step functions may also be written as a bare number for a constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AdmissibleFamily, BoundaryParams, Interval, Nu2, Rect, ResonatorConfig, StepFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Nu2Spec {
    Finite(f64),
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSpec {
    Constant(f64),
    Pieces { breakpoints: Vec<f64>, values: Vec<f64> },
}

/// Extra scan resolution on a sub-rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOverride {
    /// `[re_min, re_max, im_min, im_max]`.
    pub rect: [f64; 4],
    /// `[h_re, h_im]`.
    pub grid: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub interval: IntervalSpec,
    pub nu1: f64,
    pub nu2: Nu2Spec,
    #[serde(default)]
    pub b1: Option<StepSpec>,
    #[serde(default)]
    pub b2: Option<StepSpec>,
    #[serde(rename = "B", default)]
    pub structure: Option<StepSpec>,
    #[serde(rename = "V", default)]
    pub direction: Option<StepSpec>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub scan_overrides: Vec<ScanOverride>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resonator(&self) -> Result<ResonatorConfig> {
        let interval = Interval::new(self.interval.a1, self.interval.a2)?;
        let nu2 = match &self.nu2 {
            Nu2Spec::Finite(v) => Nu2::Finite(*v),
            Nu2Spec::Word(w) if matches!(w.to_ascii_lowercase().as_str(), "inf" | "infinity") => Nu2::Infinite,
            Nu2Spec::Word(w) => return Err(Error::Config(format!("nu2 must be a number or \"inf\", got {w:?}"))),
        };
        Ok(ResonatorConfig::new(interval, BoundaryParams::new(self.nu1, nu2)?))
    }

    fn step(&self, spec: &StepSpec, signed: bool) -> Result<StepFunction> {
        let interval = self.resonator()?.interval;
        let f = match spec {
            StepSpec::Constant(c) if signed => StepFunction::signed(vec![interval.a1(), interval.a2()], vec![*c])?,
            StepSpec::Constant(c) => StepFunction::constant(interval, *c)?,
            StepSpec::Pieces { breakpoints, values } if signed => StepFunction::signed(breakpoints.clone(), values.clone())?,
            StepSpec::Pieces { breakpoints, values } => StepFunction::new(breakpoints.clone(), values.clone())?,
        };
        if f.interval() != interval {
            return Err(Error::MismatchedInterval);
        }
        Ok(f)
    }

    fn required(spec: &Option<StepSpec>, key: &str) -> Result<StepSpec> {
        spec.clone().ok_or_else(|| Error::Config(format!("config key `{key}` is required here")))
    }

    pub fn family(&self) -> Result<AdmissibleFamily> {
        let b1 = self.step(&Self::required(&self.b1, "b1")?, false)?;
        let b2 = self.step(&Self::required(&self.b2, "b2")?, false)?;
        AdmissibleFamily::new(b1, b2)
    }

    /// Constant constraint values, for the analyses that need them.
    pub fn constant_bounds(&self) -> Result<(f64, f64)> {
        let fam = self.family()?;
        let (lo, hi) = (fam.lower(), fam.upper());
        match (lo.values(), hi.values()) {
            ([a], [b]) => Ok((*a, *b)),
            _ => Err(Error::Config("b1 and b2 must be constants for this subcommand".into())),
        }
    }

    pub fn structure(&self) -> Result<StepFunction> {
        self.step(&Self::required(&self.structure, "B")?, false)
    }

    pub fn direction(&self) -> Result<StepFunction> {
        self.step(&Self::required(&self.direction, "V")?, true)
    }

    pub fn overrides(&self) -> Vec<(Rect, f64, f64)> {
        self.scan_overrides
            .iter()
            .map(|o| (Rect::new(o.rect[0], o.rect[1], o.rect[2], o.rect[3]), o.grid[0], o.grid[1]))
            .collect()
    }
}
