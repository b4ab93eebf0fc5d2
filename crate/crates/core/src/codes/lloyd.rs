use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::distributions::{BlockIndexer, Simplex};
use crate::error::{Error, Result};
use crate::rd_solver::DistortionMeasure;

use super::block_code::{nearest_encoder, BlockCode};

/// Generalized Lloyd iteration on `Y^n`. See [`lloyd_code_traced`].
pub fn lloyd_code(
    source: &Simplex,
    measure: &DistortionMeasure,
    n: usize,
    m: usize,
    seed: u64,
    max_iters: usize,
    budget: &Budget,
) -> Result<BlockCode> {
    lloyd_code_traced(source, measure, n, m, seed, max_iters, budget).map(|(code, _)| code)
}

/// Runs Lloyd's algorithm and also returns the per-letter distortion after
/// each partition step, which never increases.
///
/// The codebook starts as `m` distinct blocks drawn uniformly (all blocks
/// plus random repeats if `m > |Y|^n`). Each round assigns every source
/// block to its nearest codeword, then replaces each codeword by the block
/// minimizing the cell's expected distortion, one position at a time since
/// block distortion is additive. Stops when a round brings no strict
/// improvement.
pub fn lloyd_code_traced(
    source: &Simplex,
    measure: &DistortionMeasure,
    n: usize,
    m: usize,
    seed: u64,
    max_iters: usize,
    budget: &Budget,
) -> Result<(BlockCode, Vec<f64>)> {
    if m == 0 {
        return Err(Error::InvalidArgument("codebook size must be positive".into()));
    }
    let xs = BlockIndexer::new(measure.x_size(), n, budget)?;
    let ys = BlockIndexer::unchecked(measure.y_size(), n);
    let px = source.product_extension(n, budget)?;
    let ny = measure.y_size();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codebook: Vec<usize> = if m <= ys.count() {
        sample(&mut rng, ys.count(), m).into_vec()
    } else {
        let mut all: Vec<usize> = (0..ys.count()).collect();
        all.extend((ys.count()..m).map(|_| rng.gen_range(0..ys.count())));
        all
    };

    let evaluate = |codebook: &[usize], encoder: &[u32]| -> f64 {
        let mut total = 0.0;
        for xb in 0..xs.count() {
            let p = px.get(xb);
            if p > 0.0 {
                let y = codebook[encoder[xb] as usize];
                total += p * measure.block_cost(&xs.symbols(xb), &ys.symbols(y));
            }
        }
        total / n as f64
    };

    let mut encoder = nearest_encoder(&xs, measure, &codebook);
    let mut current = evaluate(&codebook, &encoder);
    let mut trace = vec![current];
    let mut xsym = vec![0; n];
    for _ in 0..max_iters {
        // acc[(msg * n + i) * ny + y] = Σ_{x in cell} P(x) d(x_i, y)
        let mut acc = vec![0.0; m * n * ny];
        let mut occupied = vec![false; m];
        for xb in 0..xs.count() {
            let p = px.get(xb);
            if p == 0.0 {
                continue;
            }
            let msg = encoder[xb] as usize;
            occupied[msg] = true;
            xs.fill_symbols(xb, &mut xsym);
            for (i, &x) in xsym.iter().enumerate() {
                let base = (msg * n + i) * ny;
                for y in 0..ny {
                    acc[base + y] += p * measure.get(x, y);
                }
            }
        }
        let mut next = codebook.clone();
        for msg in 0..m {
            if !occupied[msg] {
                continue;
            }
            let mut word = ys.symbols(codebook[msg]);
            for (i, slot) in word.iter_mut().enumerate() {
                let costs = &acc[(msg * n + i) * ny..(msg * n + i + 1) * ny];
                let mut best = *slot;
                for y in 0..ny {
                    if costs[y] < costs[best] {
                        best = y;
                    }
                }
                *slot = best;
            }
            next[msg] = ys.index(&word)?;
        }
        let next_encoder = nearest_encoder(&xs, measure, &next);
        let value = evaluate(&next, &next_encoder);
        if !(value < current) {
            break;
        }
        codebook = next;
        encoder = next_encoder;
        current = value;
        trace.push(current);
    }
    let code = BlockCode::new(n, measure.x_size(), measure.y_size(), codebook, encoder)?
        .with_note("constructor", "lloyd")
        .with_note("seed", seed.to_string());
    Ok((code, trace))
}
