use crate::budget::{checked_power, Budget};
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

use super::blocks::BlockIndexer;

/// Anything that is a finite mass function laid out as a `rows × cols` matrix.
///
/// A [`Simplex`] of length `k` has shape `(k, 1)`.
pub trait Law {
    fn shape(&self) -> (usize, usize);
    fn masses(&self) -> &[f64];
}

fn validate_masses(mass: &[f64], tolerance: f64) -> Result<()> {
    if mass.is_empty() {
        return Err(Error::InvalidLaw("empty mass vector".into()));
    }
    for (index, &value) in mass.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::InvalidLaw(format!("non-finite mass at index {index}")));
        }
        if value < 0.0 {
            return Err(Error::NegativeMass { index, value });
        }
    }
    let total = compensated_sum(mass.iter().copied());
    if (total - 1.0).abs() > tolerance {
        return Err(Error::InvalidLaw(format!(
            "masses sum to {total}, not 1 (tolerance {tolerance:e})"
        )));
    }
    Ok(())
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    mass: Vec<f64>,
}

impl Simplex {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(mass: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(mass, Self::TOLERANCE)
    }

    pub fn with_tolerance(mass: Vec<f64>, tolerance: f64) -> Result<Self> {
        validate_masses(&mass, tolerance)?;
        Ok(Self { mass })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total = compensated_sum(weights.iter().copied());
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidLaw(format!("weights sum to {total}")));
        }
        for (index, &value) in weights.iter().enumerate() {
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(size: usize) -> Self {
        assert!(size > 0, "uniform law over an empty alphabet");
        Self {
            mass: vec![1.0 / size as f64; size],
        }
    }

    pub fn point(size: usize, at: usize) -> Self {
        assert!(at < size);
        let mut mass = vec![0.0; size];
        mass[at] = 1.0;
        Self { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.mass
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        super::functionals::entropy(&self.mass)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.mass.iter().all(|&m| m > 0.0)
    }

    /// The i.i.d. law of `n` letters, indexed lexicographically.
    ///
    /// Block masses are accumulated as sums of logarithms and exponentiated
    /// once, so long blocks of small masses do not underflow early.
    pub fn product_extension(&self, n: usize, budget: &Budget) -> Result<Simplex> {
        let ix = BlockIndexer::new(self.len(), n, budget)?;
        let logs: Vec<f64> = self.mass.iter().map(|m| m.ln()).collect();
        let mut acc = vec![0.0f64];
        for _ in 0..n {
            let mut next = Vec::with_capacity(acc.len() * logs.len());
            for &a in &acc {
                for &l in &logs {
                    next.push(a + l);
                }
            }
            acc = next;
        }
        debug_assert_eq!(acc.len(), ix.count());
        let mass = acc.into_iter().map(f64::exp).collect();
        Simplex::with_tolerance(mass, 1e-9)
    }
}

impl Law for Simplex {
    fn shape(&self) -> (usize, usize) {
        (self.mass.len(), 1)
    }

    fn masses(&self) -> &[f64] {
        &self.mass
    }
}

/// A row-stochastic matrix: row `i` is the conditional law given input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    mass: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        let outputs = rows.first().map_or(0, Vec::len);
        if inputs == 0 || outputs == 0 {
            return Err(Error::InvalidLaw("channel needs at least one row and column".into()));
        }
        let mut mass = Vec::with_capacity(inputs * outputs);
        for row in rows {
            if row.len() != outputs {
                return Err(Error::ShapeMismatch {
                    left: (1, row.len()),
                    right: (1, outputs),
                });
            }
            validate_masses(&row, Simplex::TOLERANCE)?;
            mass.extend(row);
        }
        Ok(Self {
            inputs,
            outputs,
            mass,
        })
    }

    pub fn from_rows(rows: Vec<Simplex>) -> Result<Self> {
        Self::new(rows.into_iter().map(Simplex::into_inner).collect())
    }

    pub(crate) fn from_flat_unchecked(inputs: usize, outputs: usize, mass: Vec<f64>) -> Self {
        debug_assert_eq!(mass.len(), inputs * outputs);
        Self {
            inputs,
            outputs,
            mass,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut mass = vec![0.0; size * size];
        for i in 0..size {
            mass[i * size + i] = 1.0;
        }
        Self::from_flat_unchecked(size, size, mass)
    }

    /// Binary symmetric channel with crossover `eps`.
    pub fn bsc(eps: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])
    }

    pub fn input_size(&self) -> usize {
        self.inputs
    }

    pub fn output_size(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.mass[input * self.outputs..(input + 1) * self.outputs]
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.mass[input * self.outputs + output]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.mass.chunks(self.outputs)
    }

    pub fn flat(&self) -> &[f64] {
        &self.mass
    }

    /// Output law when the input is drawn from `input`.
    pub fn push_forward(&self, input: &Simplex) -> Result<Simplex> {
        if input.len() != self.inputs {
            return Err(Error::ShapeMismatch {
                left: (input.len(), 1),
                right: (self.inputs, self.outputs),
            });
        }
        let out = (0..self.outputs)
            .map(|y| compensated_sum((0..self.inputs).map(|x| input.get(x) * self.get(x, y))))
            .collect();
        Simplex::with_tolerance(out, 1e-10)
    }

    /// The memoryless extension `∏ W(v_i | u_i)` as a channel between blocks.
    pub fn product_extension(&self, n: usize, budget: &Budget) -> Result<Channel> {
        let cells = checked_power(self.inputs, n).saturating_mul(checked_power(self.outputs, n));
        budget.admit(cells, "reduce n or raise the block budget")?;
        let ins = BlockIndexer::unchecked(self.inputs, n);
        let outs = BlockIndexer::unchecked(self.outputs, n);
        let logs: Vec<f64> = self.mass.iter().map(|m| m.ln()).collect();
        let mut mass = Vec::with_capacity(ins.count() * outs.count());
        let mut u = vec![0; n];
        let mut v = vec![0; n];
        for ui in 0..ins.count() {
            ins.fill_symbols(ui, &mut u);
            for vi in 0..outs.count() {
                outs.fill_symbols(vi, &mut v);
                let l: f64 = u
                    .iter()
                    .zip(&v)
                    .map(|(&a, &b)| logs[a * self.outputs + b])
                    .sum();
                mass.push(l.exp());
            }
        }
        Ok(Self::from_flat_unchecked(ins.count(), outs.count(), mass))
    }
}

/// A joint law on `X × Y`, stored row-major with `x` as the row.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    rows: usize,
    cols: usize,
    mass: Vec<f64>,
}

impl JointLaw {
    pub fn new(rows: usize, cols: usize, mass: Vec<f64>) -> Result<Self> {
        if rows * cols != mass.len() || rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch {
                left: (rows, cols),
                right: (mass.len(), 1),
            });
        }
        validate_masses(&mass, Simplex::TOLERANCE)?;
        Ok(Self { rows, cols, mass })
    }

    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        if matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidLaw("ragged joint matrix".into()));
        }
        Self::new(rows, cols, matrix.into_iter().flatten().collect())
    }

    pub(crate) fn from_flat_unchecked(rows: usize, cols: usize, mass: Vec<f64>) -> Self {
        debug_assert_eq!(rows * cols, mass.len());
        Self { rows, cols, mass }
    }

    /// `P_X(x) W(y|x)`.
    pub fn from_source_channel(source: &Simplex, channel: &Channel) -> Result<Self> {
        if source.len() != channel.input_size() {
            return Err(Error::ShapeMismatch {
                left: (source.len(), 1),
                right: (channel.input_size(), channel.output_size()),
            });
        }
        let cols = channel.output_size();
        let mass = (0..source.len())
            .flat_map(|x| channel.row(x).iter().map(move |w| source.get(x) * w))
            .collect();
        Ok(Self::from_flat_unchecked(source.len(), cols, mass))
    }

    /// Product of two marginals.
    pub fn independent(px: &Simplex, py: &Simplex) -> Self {
        let mass = px
            .mass()
            .iter()
            .flat_map(|a| py.mass().iter().map(move |b| a * b))
            .collect();
        Self::from_flat_unchecked(px.len(), py.len(), mass)
    }

    pub fn x_size(&self) -> usize {
        self.rows
    }

    pub fn y_size(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.mass[x * self.cols + y]
    }

    pub fn flat(&self) -> &[f64] {
        &self.mass
    }

    pub fn marginal_x(&self) -> Simplex {
        let mass = (0..self.rows)
            .map(|x| compensated_sum((0..self.cols).map(|y| self.get(x, y))))
            .collect();
        Simplex { mass }
    }

    pub fn marginal_y(&self) -> Simplex {
        let mass = (0..self.cols)
            .map(|y| compensated_sum((0..self.rows).map(|x| self.get(x, y))))
            .collect();
        Simplex { mass }
    }

    /// `P_{Y|X}` row by row; `None` marks an `x` of zero marginal mass.
    pub fn condition_on_x(&self) -> Vec<Option<Simplex>> {
        let px = self.marginal_x();
        (0..self.rows)
            .map(|x| {
                let total = px.get(x);
                (total > 0.0).then(|| Simplex {
                    mass: (0..self.cols).map(|y| self.get(x, y) / total).collect(),
                })
            })
            .collect()
    }

    /// `P_{X|Y}` column by column; `None` marks a `y` of zero marginal mass.
    pub fn condition_on_y(&self) -> Vec<Option<Simplex>> {
        let py = self.marginal_y();
        (0..self.cols)
            .map(|y| {
                let total = py.get(y);
                (total > 0.0).then(|| Simplex {
                    mass: (0..self.rows).map(|x| self.get(x, y) / total).collect(),
                })
            })
            .collect()
    }

    /// Swaps the roles of `X` and `Y`.
    pub fn transpose(&self) -> JointLaw {
        let mut mass = Vec::with_capacity(self.mass.len());
        for y in 0..self.cols {
            for x in 0..self.rows {
                mass.push(self.get(x, y));
            }
        }
        Self::from_flat_unchecked(self.cols, self.rows, mass)
    }

    /// Relabels symbols: the new law puts `P(x, y)` at `(perm_x[x], perm_y[y])`.
    pub fn relabel(&self, perm_x: &[usize], perm_y: &[usize]) -> JointLaw {
        let mut mass = vec![0.0; self.mass.len()];
        for x in 0..self.rows {
            for y in 0..self.cols {
                mass[perm_x[x] * self.cols + perm_y[y]] = self.get(x, y);
            }
        }
        Self::from_flat_unchecked(self.rows, self.cols, mass)
    }
}

impl Law for JointLaw {
    fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn masses(&self) -> &[f64] {
        &self.mass
    }
}
