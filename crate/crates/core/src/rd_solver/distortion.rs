use crate::distributions::{JointLaw, Simplex};
use crate::error::{Error, Result};

/// Per-letter distortion `d(x, y)`, normalized so every row has minimum 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionMeasure {
    x_size: usize,
    y_size: usize,
    d: Vec<f64>,
}

impl DistortionMeasure {
    /// Accepts a finite, nonnegative matrix whose rows already have minimum 0.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::raw(matrix)?;
        for x in 0..m.x_size {
            if m.row(x).iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDistortion(format!("row {x} has a non-finite entry")));
            }
            let min = m.row(x).iter().copied().fold(f64::INFINITY, f64::min);
            if min != 0.0 {
                return Err(Error::InvalidDistortion(format!(
                    "row {x} has minimum {min}; use DistortionMeasure::normalize"
                )));
            }
        }
        Ok(m)
    }

    /// Subtracts each row's minimum. Returns the measure and the removed
    /// offsets; `Σ_x P_X(x) offset(x)` is the original `D_min`.
    pub fn normalize(matrix: Vec<Vec<f64>>) -> Result<(Self, Vec<f64>)> {
        let mut m = Self::raw(matrix)?;
        let mut offsets = Vec::with_capacity(m.x_size);
        for x in 0..m.x_size {
            let min = m.row(x).iter().copied().fold(f64::INFINITY, f64::min);
            if !min.is_finite() {
                return Err(Error::InvalidDistortion(format!("row {x} is not finite")));
            }
            for y in 0..m.y_size {
                m.d[x * m.y_size + y] -= min;
            }
            offsets.push(min);
        }
        Ok((m, offsets))
    }

    fn raw(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let x_size = matrix.len();
        let y_size = matrix.first().map_or(0, Vec::len);
        if x_size == 0 || y_size == 0 {
            return Err(Error::InvalidDistortion("empty matrix".into()));
        }
        if matrix.iter().any(|r| r.len() != y_size) {
            return Err(Error::InvalidDistortion("ragged matrix".into()));
        }
        let d: Vec<f64> = matrix.into_iter().flatten().collect();
        if let Some(v) = d.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::InvalidDistortion(format!("entry {v} is negative or NaN")));
        }
        Ok(Self { x_size, y_size, d })
    }

    /// `d(x, y) = 1{x != y}` on a common alphabet.
    pub fn hamming(size: usize) -> Self {
        let d = (0..size)
            .flat_map(|x| (0..size).map(move |y| if x == y { 0.0 } else { 1.0 }))
            .collect();
        Self {
            x_size: size,
            y_size: size,
            d,
        }
    }

    /// Encoding cost for a coordination target with no distortion measure:
    /// `log(max_y P(x,y) / P(x,y))`, i.e. `-log P_XY` shifted so each row
    /// has minimum 0. Cells of zero mass cost `+inf`.
    pub fn from_target_joint(joint: &JointLaw) -> Self {
        let (rows, cols) = (joint.x_size(), joint.y_size());
        let mut d = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            let best = (0..cols).map(|y| joint.get(x, y)).fold(0.0, f64::max);
            for y in 0..cols {
                let p = joint.get(x, y);
                d.push(if best == 0.0 {
                    0.0
                } else if p == 0.0 {
                    f64::INFINITY
                } else {
                    (best / p).ln().max(0.0)
                });
            }
        }
        Self {
            x_size: rows,
            y_size: cols,
            d,
        }
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.d[x * self.y_size + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.d[x * self.y_size..(x + 1) * self.y_size]
    }

    pub fn column(&self, y: usize) -> Vec<f64> {
        (0..self.x_size).map(|x| self.get(x, y)).collect()
    }

    /// Keeps only the listed reproduction symbols, in the given order. The
    /// result need not be normalized.
    pub(crate) fn restrict(&self, keep: &[usize]) -> Self {
        let d = (0..self.x_size)
            .flat_map(|x| keep.iter().map(move |&y| self.get(x, y)))
            .collect();
        Self {
            x_size: self.x_size,
            y_size: keep.len(),
            d,
        }
    }

    /// Expected distortion `Σ_x P(x) d(x, y)` of each constant reproduction.
    pub fn constant_output_distortions(&self, source: &Simplex) -> Vec<f64> {
        (0..self.y_size)
            .map(|y| {
                (0..self.x_size)
                    .filter(|&x| source.get(x) > 0.0)
                    .map(|x| source.get(x) * self.get(x, y))
                    .sum()
            })
            .collect()
    }

    /// The best constant reproduction and its distortion `D_max`; any target
    /// at or above `D_max` is met at rate zero. Ties go to the lowest symbol.
    pub fn max_useful_distortion(&self, source: &Simplex) -> (usize, f64) {
        self.constant_output_distortions(source)
            .into_iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (y, v)| if v < best.1 { (y, v) } else { best })
    }

    /// `E d(X, Y)` under a joint law on the full alphabets.
    pub fn expected(&self, joint: &JointLaw) -> f64 {
        let mut total = 0.0;
        for x in 0..self.x_size {
            for y in 0..self.y_size {
                let p = joint.get(x, y);
                if p > 0.0 {
                    total += p * self.get(x, y);
                }
            }
        }
        total
    }

    /// Sum of per-letter distortions between two blocks.
    pub fn block_cost(&self, xs: &[usize], ys: &[usize]) -> f64 {
        xs.iter().zip(ys).map(|(&x, &y)| self.get(x, y)).sum()
    }
}
