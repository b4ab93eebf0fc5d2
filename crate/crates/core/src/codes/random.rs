use std::collections::HashSet;
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::distributions::{mutual_information, BlockIndexer, Channel, JointLaw, Simplex};
use crate::error::{Error, Result};
use crate::rd_solver::{check_membership_a, DistortionMeasure, RdSolution};

use super::block_code::BlockCode;

/// The single-letter law a coordination code aims for, with the pieces the
/// induced-law computations need.
#[derive(Debug, Clone)]
pub struct CoordinationTarget {
    pub source: Simplex,
    pub joint: JointLaw,
    /// `P_{X|Y}`, one row per reproduction symbol.
    pub backward: Channel,
    pub output_marginal: Simplex,
    /// `I(X;Y)` of `joint`, in nats.
    pub mutual_information: f64,
}

impl CoordinationTarget {
    /// Target from a rate-distortion solution, on its reduced alphabet.
    pub fn from_rd(sol: &RdSolution) -> Self {
        Self {
            source: sol.source.clone(),
            joint: sol.joint(),
            backward: sol.backward.clone(),
            output_marginal: sol.output_marginal.clone(),
            mutual_information: sol.rate,
        }
    }

    /// Target from an explicit joint law. Every reproduction symbol must
    /// have positive mass, so the backward channel is defined.
    pub fn from_joint(joint: JointLaw) -> Result<Self> {
        let source = joint.marginal_x();
        let output_marginal = joint.marginal_y();
        let mut rows = Vec::with_capacity(joint.y_size());
        for (y, col) in joint.condition_on_y().into_iter().enumerate() {
            rows.push(col.ok_or(Error::ZeroMarginalOutput { symbol: y })?);
        }
        Ok(Self {
            source,
            backward: Channel::from_rows(rows)?,
            output_marginal,
            mutual_information: mutual_information(&joint),
            joint,
        })
    }

    pub fn in_set_a(&self) -> bool {
        check_membership_a(&self.joint)
    }

    /// Pairs `(x, y)` with `P_{X|Y}(x|y) = 0`.
    pub fn backward_holes(&self) -> Vec<(usize, usize)> {
        let mut holes = Vec::new();
        for y in 0..self.backward.input_size() {
            for x in 0..self.backward.output_size() {
                if self.backward.get(y, x) == 0.0 {
                    holes.push((x, y));
                }
            }
        }
        holes
    }
}

/// Rate as a function of blocklength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateSchedule {
    Constant(f64),
    /// `R_n = base + n^(-1/2 + delta)`.
    SlowApproach { base: f64, delta: f64 },
}

impl RateSchedule {
    pub fn slow_approach(base: f64, delta: f64) -> Self {
        RateSchedule::SlowApproach { base, delta }
    }

    pub fn rate(&self, n: usize) -> f64 {
        match *self {
            RateSchedule::Constant(r) => r,
            RateSchedule::SlowApproach { base, delta } => base + (n as f64).powf(-0.5 + delta),
        }
    }
}

impl fmt::Display for RateSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateSchedule::Constant(r) => write!(f, "constant({r})"),
            RateSchedule::SlowApproach { base, delta } => {
                write!(f, "{base}+n^(-1/2+{delta})")
            }
        }
    }
}

/// `M = ceil(exp(n R))`. Values within `1e-9` of an integer round to it, so
/// a rate of exactly `log k` gives `k`.
pub fn codebook_size(rate: f64, n: usize) -> Result<usize> {
    let v = (n as f64 * rate).exp();
    if !v.is_finite() || v > 1e12 {
        return Err(Error::BudgetExceeded {
            required: if v.is_finite() { v as u128 } else { u128::MAX },
            limit: 1_000_000_000_000,
            hint: "rate too high for an explicit codebook",
        });
    }
    let r = v.round();
    Ok(if (v - r).abs() < 1e-9 { r } else { v.ceil() }.max(1.0) as usize)
}

/// An i.i.d. random codebook drawn from the product of the target's output
/// marginal, at rate `schedule.rate(n)`, with a minimum-distortion encoder.
///
/// With `distinct`, duplicate codewords are redrawn one at a time from the
/// same stream (the i.i.d. law conditioned on distinctness), so the decoder
/// is a bijection onto the codebook. If `M >= |Y|^n` the codebook lists
/// every block, followed by i.i.d. extras when `M > |Y|^n`.
///
/// The encoder uses `measure` when given, else the target's
/// `-log P_XY` cost.
#[allow(clippy::too_many_arguments)]
pub fn random_coordination_code(
    target: &CoordinationTarget,
    n: usize,
    schedule: &RateSchedule,
    seed: u64,
    distinct: bool,
    measure: Option<&DistortionMeasure>,
    budget: &Budget,
) -> Result<BlockCode> {
    let rate = schedule.rate(n);
    if rate < target.mutual_information - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "rate {rate} at n = {n} is below I(X;Y) = {}",
            target.mutual_information
        )));
    }
    let m = codebook_size(rate, n)?;
    let ys = BlockIndexer::new(target.output_marginal.len(), n, budget)?;
    if distinct && m > ys.count() {
        return Err(Error::InvalidArgument(format!(
            "a bijective decoder needs M <= |Y|^n, but M = {m} and |Y|^n = {}",
            ys.count()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = WeightedIndex::new(target.output_marginal.mass())
        .map_err(|e| Error::InvalidLaw(e.to_string()))?;
    let draw = |rng: &mut ChaCha8Rng| -> usize {
        (0..n).fold(0, |acc, _| acc * ys.alphabet() + letters.sample(rng))
    };

    let mut codebook: Vec<usize>;
    if m >= ys.count() {
        codebook = (0..ys.count()).collect();
        while codebook.len() < m {
            codebook.push(draw(&mut rng));
        }
    } else if distinct {
        codebook = Vec::with_capacity(m);
        let mut seen = HashSet::with_capacity(m);
        let mut rejections = 0usize;
        let limit = 100 * m + 10_000;
        while codebook.len() < m {
            let c = draw(&mut rng);
            if seen.insert(c) {
                codebook.push(c);
            } else {
                rejections += 1;
                if rejections > limit {
                    return Err(Error::DuplicateCodewords { wanted: m });
                }
            }
        }
    } else {
        codebook = (0..m).map(|_| draw(&mut rng)).collect();
    }

    let derived;
    let measure = match measure {
        Some(d) => d,
        None => {
            derived = DistortionMeasure::from_target_joint(&target.joint);
            &derived
        }
    };
    if measure.x_size() != target.source.len() || measure.y_size() != ys.alphabet() {
        return Err(Error::ShapeMismatch {
            left: (measure.x_size(), measure.y_size()),
            right: (target.source.len(), ys.alphabet()),
        });
    }
    Ok(BlockCode::nearest(n, measure, codebook, budget)?
        .with_note("constructor", "random")
        .with_note("seed", seed.to_string())
        .with_note("schedule", schedule.to_string())
        .with_note("distinct", distinct.to_string()))
}
