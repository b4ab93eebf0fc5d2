use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::Simplex;
use crate::error::{Error, Result};

use super::distortion::DistortionMeasure;
use super::solver::{reduce_alphabet, solve_on, RdSolution, SolverOptions, DEFAULT_REDUCTION_THRESHOLD};

/// Outcome of re-solving `R(D)` from randomized starting channels.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// Largest entrywise gap between any two merged backward channels;
    /// `inf` if the restarts disagree on the reduced alphabet.
    pub max_deviation: f64,
    pub restarts: usize,
    /// Restarts whose fixed-point iteration hit the iteration cap.
    pub non_converged: Vec<usize>,
    pub alphabet_mismatch: bool,
    /// Merged backward rows of the first restart, keyed by the smallest
    /// original symbol of each group of identical distortion columns.
    pub reference: BTreeMap<usize, Vec<f64>>,
}

/// Backward channel with reproduction symbols that have identical distortion
/// columns merged into one: `P(x | group) = Σ_{y in group} P(x,y) / P(group)`.
fn merged_backward(sol: &RdSolution) -> BTreeMap<usize, Vec<f64>> {
    let columns: Vec<Vec<u64>> = sol
        .reduced_alphabet
        .iter()
        .map(|&y| sol.measure.column(y).iter().map(|v| v.to_bits()).collect())
        .collect();
    let joint = sol.joint();
    let nx = joint.x_size();
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (pos, &y) in sol.reduced_alphabet.iter().enumerate() {
        let key = sol
            .reduced_alphabet
            .iter()
            .zip(&columns)
            .filter(|(_, c)| **c == columns[pos])
            .map(|(&z, _)| z)
            .min()
            .unwrap_or(y);
        let entry = groups.entry(key).or_insert_with(|| vec![0.0; nx]);
        for x in 0..nx {
            entry[x] += joint.get(x, pos);
        }
    }
    for row in groups.values_mut() {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
    }
    groups
}

/// Runs `num_restarts` solves from seeded random initial forward channels,
/// reduces each, and reports how far apart the backward channels landed.
pub fn backward_uniqueness_probe(
    source: &Simplex,
    d: &DistortionMeasure,
    target: f64,
    num_restarts: usize,
    seed: u64,
) -> Result<UniquenessReport> {
    if num_restarts < 2 {
        return Err(Error::InvalidArgument("uniqueness probe needs at least 2 restarts".into()));
    }
    // validate once up front so every restart fails the same way
    super::solver::solve_rd_with(source, d, target, &SolverOptions::default())?;
    let all: Vec<usize> = (0..d.y_size()).collect();
    let cells = d.x_size() * d.y_size();
    let runs: Vec<Result<RdSolution>> = (0..num_restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let noise: Vec<f64> = (0..cells).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
            let sol = solve_on(source, d, &all, target, &SolverOptions::default(), Some(&noise))?;
            reduce_alphabet(&sol, DEFAULT_REDUCTION_THRESHOLD)
        })
        .collect();
    let runs: Vec<RdSolution> = runs.into_iter().collect::<Result<_>>()?;

    let non_converged = runs
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.converged)
        .map(|(i, _)| i)
        .collect();
    let merged: Vec<_> = runs.iter().map(merged_backward).collect();
    let mut max_deviation: f64 = 0.0;
    let mut alphabet_mismatch = false;
    for a in 0..merged.len() {
        for b in a + 1..merged.len() {
            if merged[a].keys().ne(merged[b].keys()) {
                alphabet_mismatch = true;
                max_deviation = f64::INFINITY;
                continue;
            }
            for (ra, rb) in merged[a].values().zip(merged[b].values()) {
                for (u, v) in ra.iter().zip(rb) {
                    max_deviation = max_deviation.max((u - v).abs());
                }
            }
        }
    }
    Ok(UniquenessReport {
        max_deviation,
        restarts: num_restarts,
        non_converged,
        alphabet_mismatch,
        reference: merged.into_iter().next().unwrap_or_default(),
    })
}
