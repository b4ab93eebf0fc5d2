//! Declarative experiment configuration, read from TOML.

use std::path::Path;

use backward_dmc::codes::CoordinationTarget;
use backward_dmc::distributions::{JointLaw, Simplex};
use backward_dmc::rd_solver::{reduce_alphabet, solve_rd, DistortionMeasure, RdSolution};
use backward_dmc::rd_solver::DEFAULT_REDUCTION_THRESHOLD;
use backward_dmc::Budget;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistortionSpec {
    /// `"hamming"`.
    Named(String),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constructor {
    Exhaustive,
    Lloyd,
    Random,
    /// Smallest codebook whose best available code meets the target
    /// distortion.
    Smallest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

fn default_delta() -> f64 {
    0.25
}
fn default_seeds() -> Vec<u64> {
    vec![1]
}
fn default_budget() -> u64 {
    backward_dmc::budget::DEFAULT_MAX_BLOCKS
}
fn default_samples() -> u64 {
    backward_dmc::budget::DEFAULT_SAMPLES
}
fn default_lloyd_iters() -> usize {
    100
}
fn default_mode() -> Mode {
    Mode::Exact
}
fn default_constructor() -> Constructor {
    Constructor::Smallest
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Source law `P_X`.
    pub source: Vec<f64>,
    pub distortion: Option<DistortionSpec>,
    /// Target per-letter distortion `D`.
    pub target_distortion: Option<f64>,
    /// Explicit target joint law, rows indexed by source symbol. Overrides
    /// the rate-distortion target.
    pub target_joint: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Constant rate in nats; otherwise `I(X;Y) + n^(-1/2 + delta)`.
    pub rate: Option<f64>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_constructor")]
    pub constructor: Constructor,
    /// Codebook size for the exhaustive and Lloyd constructors.
    pub codebook_size: Option<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub distinct: bool,
    #[serde(default = "default_lloyd_iters")]
    pub lloyd_iters: usize,
    /// `[x, y]` pair to append after construction.
    pub pathological: Option<[usize; 2]>,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Distortion levels for `rd-curve`; defaults to 20 points up to `D_max`.
    pub rd_points: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn budget(&self) -> Budget {
        Budget::new(self.budget)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::Config(m));
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("n_grid must be strictly increasing, got {:?}", self.n_grid));
        }
        if self.n_grid.first() == Some(&0) {
            return bad("n_grid entries must be positive".into());
        }
        if let Some(d) = self.target_distortion {
            if !(d > 0.0) {
                return bad(format!("target_distortion must be positive, got {d}"));
            }
        }
        if !(self.delta > 0.0) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        Ok(())
    }

    pub fn source(&self) -> Result<Simplex, Failure> {
        Ok(Simplex::new(self.source.clone())?)
    }

    pub fn measure(&self) -> Result<DistortionMeasure, Failure> {
        match &self.distortion {
            Some(DistortionSpec::Named(name)) if name == "hamming" => {
                Ok(DistortionMeasure::hamming(self.source.len()))
            }
            Some(DistortionSpec::Named(name)) => {
                Err(Failure::Config(format!("unknown distortion `{name}`")))
            }
            Some(DistortionSpec::Matrix(m)) => Ok(DistortionMeasure::new(m.clone())?),
            None => Err(Failure::Config("`distortion` is required".into())),
        }
    }

    pub fn target_distortion(&self) -> Result<f64, Failure> {
        self.target_distortion
            .ok_or_else(|| Failure::Config("`target_distortion` is required".into()))
    }

    /// The coordination target and the measure codes are built with.
    pub fn target(&self) -> Result<Target, Failure> {
        let source = self.source()?;
        if let Some(rows) = &self.target_joint {
            let joint = JointLaw::from_matrix(rows.clone())?;
            let target = CoordinationTarget::from_joint(joint)?;
            let measure = match &self.distortion {
                Some(_) => Some(self.measure()?),
                None => None,
            };
            if target.source.mass().iter().zip(source.mass()).any(|(a, b)| (a - b).abs() > 1e-9) {
                return Err(Failure::Config(
                    "target_joint's source marginal differs from `source`".into(),
                ));
            }
            let encode_with = measure
                .clone()
                .unwrap_or_else(|| DistortionMeasure::from_target_joint(&target.joint));
            return Ok(Target { target, encode_with, measure, solution: None });
        }
        let full = self.measure()?;
        let sol = solve_rd(&source, &full, self.target_distortion()?, 1e-10)?;
        let sol = reduce_alphabet(&sol, DEFAULT_REDUCTION_THRESHOLD)?;
        let measure = sol.reduced_measure();
        Ok(Target {
            target: CoordinationTarget::from_rd(&sol),
            encode_with: measure.clone(),
            measure: Some(measure),
            solution: Some(sol),
        })
    }
}

pub struct Target {
    pub target: CoordinationTarget,
    /// Cost used by encoders.
    pub encode_with: DistortionMeasure,
    /// Distortion reported in outputs, when one is configured.
    pub measure: Option<DistortionMeasure>,
    pub solution: Option<RdSolution>,
}
