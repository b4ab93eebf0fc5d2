use crate::budget::Budget;
use crate::distributions::{BlockIndexer, Simplex};
use crate::error::{Error, Result};
use crate::rd_solver::DistortionMeasure;

use super::block_code::BlockCode;
use super::lloyd::lloyd_code;

/// Limits for exhaustive codebook search.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub budget: Budget,
    /// Largest number of candidate codebooks the exhaustive search visits.
    pub max_candidates: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            budget: Budget::default(),
            max_candidates: 1 << 22,
        }
    }
}

/// Number of size-`m` multisets drawn from `n` items, `C(n + m - 1, m)`,
/// saturating.
pub fn multiset_count(n: usize, m: usize) -> u128 {
    let mut acc: u128 = 1;
    for k in 0..m as u128 {
        // acc * (n + k) / (k + 1) stays integral at every step
        acc = match acc.checked_mul(n as u128 + k) {
            Some(v) => v / (k + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The code of least expected distortion among all codebooks of `m`
/// codewords (multisets of `Y^n` blocks), with a nearest-codeword encoder.
pub fn optimal_code_exhaustive(
    source: &Simplex,
    measure: &DistortionMeasure,
    n: usize,
    m: usize,
    limits: &SearchLimits,
) -> Result<BlockCode> {
    if m == 0 {
        return Err(Error::InvalidArgument("codebook size must be positive".into()));
    }
    let xs = BlockIndexer::new(measure.x_size(), n, &limits.budget)?;
    let ys = BlockIndexer::new(measure.y_size(), n, &limits.budget)?;
    let candidates = multiset_count(ys.count(), m);
    if candidates > limits.max_candidates as u128 {
        return Err(Error::BudgetExceeded {
            required: candidates,
            limit: limits.max_candidates,
            hint: "exhaustive search is out of reach; use lloyd_code instead",
        });
    }
    limits.budget.admit(
        (xs.count() as u128) * (ys.count() as u128),
        "cost table too large for exhaustive search; use lloyd_code instead",
    )?;
    let px = source.product_extension(n, &limits.budget)?;

    // cost[x * |Y^n| + y] = Σ_i d(x_i, y_i)
    let ny = ys.count();
    let ysyms: Vec<Vec<usize>> = (0..ny).map(|y| ys.symbols(y)).collect();
    let mut cost = Vec::with_capacity(xs.count() * ny);
    for xb in 0..xs.count() {
        let xsym = xs.symbols(xb);
        for y in &ysyms {
            cost.push(measure.block_cost(&xsym, y));
        }
    }

    let mut search = Search {
        px: px.mass(),
        cost: &cost,
        ny,
        m,
        levels: vec![vec![f64::INFINITY; xs.count()]; m + 1],
        chosen: vec![0; m],
        best_value: f64::INFINITY,
        best: Vec::new(),
    };
    search.descend(0, 0);
    let codebook = search.best;
    Ok(BlockCode::nearest(n, measure, codebook, &limits.budget)?
        .with_note("constructor", "exhaustive"))
}

struct Search<'a> {
    px: &'a [f64],
    cost: &'a [f64],
    ny: usize,
    m: usize,
    levels: Vec<Vec<f64>>,
    chosen: Vec<usize>,
    best_value: f64,
    best: Vec<usize>,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, start: usize) {
        for c in start..self.ny {
            self.chosen[depth] = c;
            let (done, rest) = self.levels.split_at_mut(depth + 1);
            let prev = &done[depth];
            let next = &mut rest[0];
            for (x, slot) in next.iter_mut().enumerate() {
                *slot = prev[x].min(self.cost[x * self.ny + c]);
            }
            if depth + 1 == self.m {
                let value: f64 = next
                    .iter()
                    .zip(self.px)
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(v, p)| v * p)
                    .sum();
                // ties go to the lexicographically first multiset
                if self.best.is_empty() || value < self.best_value - 1e-12 * self.best_value.abs() {
                    self.best_value = value;
                    self.best = self.chosen.clone();
                }
            } else {
                self.descend(depth + 1, c);
            }
        }
    }
}

/// The smallest codebook size at which the best available code meets
/// `target` per-letter distortion. "Best available" is the exhaustive
/// optimum when the search fits in `limits`, otherwise the best Lloyd code
/// over `seeds`.
pub fn smallest_code_meeting(
    source: &Simplex,
    measure: &DistortionMeasure,
    n: usize,
    target: f64,
    seeds: &[u64],
    limits: &SearchLimits,
) -> Result<BlockCode> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("at least one Lloyd seed is required".into()));
    }
    let ys = BlockIndexer::new(measure.y_size(), n, &limits.budget)?;
    for m in 1..=ys.count() {
        let code = if multiset_count(ys.count(), m) <= limits.max_candidates as u128 {
            optimal_code_exhaustive(source, measure, n, m, limits)?
        } else {
            let mut best: Option<(f64, BlockCode)> = None;
            for &seed in seeds {
                let code = lloyd_code(source, measure, n, m, seed, 100, &limits.budget)?;
                let dist = code.expected_distortion(source, measure, &limits.budget)?;
                if best.as_ref().is_none_or(|(b, _)| dist < *b) {
                    best = Some((dist, code));
                }
            }
            best.map(|(_, c)| c).expect("seeds is non-empty")
        };
        if code.expected_distortion(source, measure, &limits.budget)? <= target + 1e-12 {
            return Ok(code.with_note("target_distortion", target.to_string()));
        }
    }
    unreachable!("the full codebook has zero distortion under a normalized measure")
}
