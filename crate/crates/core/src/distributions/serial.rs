//! JSON records for laws: alphabet labels, row-major masses and the
//! tolerance the masses were validated against.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::empirical::EmpiricalType;
use super::law::{Channel, JointLaw, Simplex};

pub fn default_labels(size: usize) -> Vec<String> {
    (0..size).map(|i| i.to_string()).collect()
}

/// Pretty-printed JSON for any of the records below.
pub fn to_json<R: Serialize>(record: &R) -> String {
    serde_json::to_string_pretty(record).expect("records hold only strings and numbers")
}

/// Parses a record; call its `to_law`/`to_channel`/`to_type` to validate.
pub fn from_json<R: DeserializeOwned>(text: &str) -> Result<R> {
    Ok(serde_json::from_str(text)?)
}

fn check_labels(labels: &[String], size: usize) -> Result<()> {
    if labels.len() != size {
        return Err(Error::InvalidLaw(format!(
            "{} labels for an alphabet of size {size}",
            labels.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexRecord {
    pub labels: Vec<String>,
    pub mass: Vec<f64>,
    pub tolerance: f64,
}

impl SimplexRecord {
    pub fn new(law: &Simplex, labels: Option<Vec<String>>) -> Self {
        Self {
            labels: labels.unwrap_or_else(|| default_labels(law.len())),
            mass: law.mass().to_vec(),
            tolerance: Simplex::TOLERANCE,
        }
    }

    pub fn to_law(&self) -> Result<Simplex> {
        check_labels(&self.labels, self.mass.len())?;
        Simplex::with_tolerance(self.mass.clone(), self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
    pub mass: Vec<f64>,
    pub tolerance: f64,
}

impl ChannelRecord {
    pub fn new(channel: &Channel) -> Self {
        Self {
            input_labels: default_labels(channel.input_size()),
            output_labels: default_labels(channel.output_size()),
            mass: channel.flat().to_vec(),
            tolerance: Simplex::TOLERANCE,
        }
    }

    pub fn to_channel(&self) -> Result<Channel> {
        let cols = self.output_labels.len();
        check_labels(&self.input_labels, self.mass.len() / cols.max(1))?;
        if cols == 0 || !self.mass.len().is_multiple_of(cols) {
            return Err(Error::InvalidLaw("channel mass is not a whole number of rows".into()));
        }
        let rows = self.mass.chunks(cols).map(|r| r.to_vec()).collect();
        Channel::new(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRecord {
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    pub mass: Vec<f64>,
    pub tolerance: f64,
}

impl JointRecord {
    pub fn new(joint: &JointLaw) -> Self {
        Self {
            x_labels: default_labels(joint.x_size()),
            y_labels: default_labels(joint.y_size()),
            mass: joint.flat().to_vec(),
            tolerance: Simplex::TOLERANCE,
        }
    }

    pub fn to_law(&self) -> Result<JointLaw> {
        let (r, c) = (self.x_labels.len(), self.y_labels.len());
        if r * c != self.mass.len() {
            return Err(Error::ShapeMismatch {
                left: (r, c),
                right: (self.mass.len(), 1),
            });
        }
        // validate against the declared tolerance, then rebuild
        Simplex::with_tolerance(self.mass.clone(), self.tolerance)?;
        Ok(JointLaw::from_flat_unchecked(r, c, self.mass.clone()))
    }
}

/// Exact record of an [`EmpiricalType`]: every entry is a `"k/n"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRecord {
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    pub n: u64,
    pub mass: Vec<String>,
}

impl EmpiricalRecord {
    pub fn new(t: &EmpiricalType) -> Self {
        let (r, c) = t.shape();
        Self {
            x_labels: default_labels(r),
            y_labels: default_labels(c),
            n: t.n(),
            mass: t.rational_strings(),
        }
    }

    pub fn to_type(&self) -> Result<EmpiricalType> {
        let mut counts = Vec::with_capacity(self.mass.len());
        for entry in &self.mass {
            let (k, n) = entry
                .split_once('/')
                .ok_or_else(|| Error::InvalidLaw(format!("expected k/n, got {entry:?}")))?;
            let k: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidLaw(format!("bad numerator in {entry:?}")))?;
            let n: u64 = n
                .trim()
                .parse()
                .map_err(|_| Error::InvalidLaw(format!("bad denominator in {entry:?}")))?;
            if n != self.n {
                return Err(Error::InvalidLaw(format!(
                    "entry {entry:?} does not use the declared denominator {}",
                    self.n
                )));
            }
            counts.push(k);
        }
        let t = EmpiricalType::from_counts(self.x_labels.len(), self.y_labels.len(), counts)?;
        if t.n() != self.n {
            return Err(Error::InvalidLaw(format!(
                "counts sum to {}, declared n = {}",
                t.n(),
                self.n
            )));
        }
        Ok(t)
    }
}
