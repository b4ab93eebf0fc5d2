use crate::error::{Error, Result};

use super::law::JointLaw;

/// Joint histogram of a sequence pair, kept as exact integer counts over `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalType {
    x_size: usize,
    y_size: usize,
    n: u64,
    counts: Vec<u64>,
}

/// Type `T_{x^n y^n}` of a sequence pair over alphabets of the given sizes.
pub fn empirical_type(
    xs: &[usize],
    ys: &[usize],
    x_size: usize,
    y_size: usize,
) -> Result<EmpiricalType> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::InvalidArgument("empirical type of an empty sequence".into()));
    }
    let mut counts = vec![0u64; x_size * y_size];
    for (&x, &y) in xs.iter().zip(ys) {
        if x >= x_size {
            return Err(Error::SymbolOutOfRange {
                symbol: x,
                size: x_size,
            });
        }
        if y >= y_size {
            return Err(Error::SymbolOutOfRange {
                symbol: y,
                size: y_size,
            });
        }
        counts[x * y_size + y] += 1;
    }
    Ok(EmpiricalType {
        x_size,
        y_size,
        n: xs.len() as u64,
        counts,
    })
}

impl EmpiricalType {
    /// Rebuilds a type from `k` counts; they must sum to `n`.
    pub fn from_counts(x_size: usize, y_size: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != x_size * y_size {
            return Err(Error::ShapeMismatch {
                left: (x_size, y_size),
                right: (counts.len(), 1),
            });
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidArgument("empirical type with n = 0".into()));
        }
        Ok(Self {
            x_size,
            y_size,
            n,
            counts,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x_size, self.y_size)
    }

    pub fn count(&self, x: usize, y: usize) -> u64 {
        self.counts[x * self.y_size + y]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn mass(&self, x: usize, y: usize) -> f64 {
        self.count(x, y) as f64 / self.n as f64
    }

    pub fn to_joint(&self) -> JointLaw {
        let n = self.n as f64;
        JointLaw::from_flat_unchecked(
            self.x_size,
            self.y_size,
            self.counts.iter().map(|&c| c as f64 / n).collect(),
        )
    }

    /// Type of the concatenated sequence pair.
    pub fn concat(&self, other: &EmpiricalType) -> Result<EmpiricalType> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(EmpiricalType {
            x_size: self.x_size,
            y_size: self.y_size,
            n: self.n + other.n,
            counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect(),
        })
    }

    /// Entries as `"k/n"` strings, row-major.
    pub fn rational_strings(&self) -> Vec<String> {
        self.counts.iter().map(|k| format!("{k}/{}", self.n)).collect()
    }
}
