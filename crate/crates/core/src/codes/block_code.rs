use std::collections::HashSet;

use rayon::prelude::*;

use crate::budget::Budget;
use crate::distributions::{BlockIndexer, Simplex};
use crate::error::{Error, Result};
use crate::numeric::par_index_sum;
use crate::rd_solver::DistortionMeasure;

/// An `(n, M)` block code.
///
/// The encoder is total over the `|X|^n` source blocks (lexicographic
/// index); the decoder maps each of the `M` messages to a reproduction block
/// index. Duplicate codewords are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCode {
    n: usize,
    x_size: usize,
    y_size: usize,
    encoder: Vec<u32>,
    codebook: Vec<usize>,
    notes: Vec<(String, String)>,
}

impl BlockCode {
    pub fn new(
        n: usize,
        x_size: usize,
        y_size: usize,
        codebook: Vec<usize>,
        encoder: Vec<u32>,
    ) -> Result<Self> {
        if codebook.is_empty() {
            return Err(Error::InvalidArgument("codebook must hold at least one codeword".into()));
        }
        let xs = BlockIndexer::unchecked(x_size, n);
        let ys = BlockIndexer::unchecked(y_size, n);
        if encoder.len() != xs.count() {
            return Err(Error::InvalidArgument(format!(
                "encoder covers {} blocks, expected |X|^n = {}",
                encoder.len(),
                xs.count()
            )));
        }
        if let Some(&m) = encoder.iter().find(|&&m| m as usize >= codebook.len()) {
            return Err(Error::InvalidArgument(format!(
                "encoder emits message {m} but M = {}",
                codebook.len()
            )));
        }
        if let Some(&c) = codebook.iter().find(|&&c| c >= ys.count()) {
            return Err(Error::InvalidArgument(format!("codeword index {c} out of range")));
        }
        Ok(Self {
            n,
            x_size,
            y_size,
            encoder,
            codebook,
            notes: Vec::new(),
        })
    }

    /// Code with a minimum-distortion encoder for the given codebook.
    pub fn nearest(
        n: usize,
        measure: &DistortionMeasure,
        codebook: Vec<usize>,
        budget: &Budget,
    ) -> Result<Self> {
        let xs = BlockIndexer::new(measure.x_size(), n, budget)?;
        let encoder = nearest_encoder(&xs, measure, &codebook);
        Self::new(n, measure.x_size(), measure.y_size(), codebook, encoder)
    }

    pub fn with_note(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.notes.push((key.into(), value.into()));
        self
    }

    /// Provenance recorded in the text header (constructor, seed, schedule).
    pub fn notes(&self) -> &[(String, String)] {
        &self.notes
    }

    pub fn note(&self, key: &str) -> Option<&str> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of messages `M`.
    pub fn size(&self) -> usize {
        self.codebook.len()
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    /// `R_n = (1/n) log M`, in nats.
    pub fn rate(&self) -> f64 {
        (self.size() as f64).ln() / self.n as f64
    }

    pub fn encoder(&self) -> &[u32] {
        &self.encoder
    }

    pub fn codebook(&self) -> &[usize] {
        &self.codebook
    }

    pub fn encode(&self, x_block: usize) -> usize {
        self.encoder[x_block] as usize
    }

    pub fn decode(&self, message: usize) -> usize {
        self.codebook[message]
    }

    /// `g(f(x^n))`.
    pub fn reproduce(&self, x_block: usize) -> usize {
        self.codebook[self.encoder[x_block] as usize]
    }

    pub fn x_indexer(&self) -> BlockIndexer {
        BlockIndexer::unchecked(self.x_size, self.n)
    }

    pub fn y_indexer(&self) -> BlockIndexer {
        BlockIndexer::unchecked(self.y_size, self.n)
    }

    pub fn codeword_symbols(&self, message: usize) -> Vec<usize> {
        self.y_indexer().symbols(self.codebook[message])
    }

    /// True when no codeword repeats, i.e. the decoder is injective.
    pub fn is_bijective(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.codebook.len());
        self.codebook.iter().all(|c| seen.insert(*c))
    }

    /// Per-letter expected distortion `(1/n) Σ_i E d(X_i, Y_i)`, by enumeration.
    pub fn expected_distortion(
        &self,
        source: &Simplex,
        measure: &DistortionMeasure,
        budget: &Budget,
    ) -> Result<f64> {
        self.check_measure(measure)?;
        let px = source.product_extension(self.n, budget)?;
        let xs = self.x_indexer();
        let ys = self.y_indexer();
        let total = par_index_sum(xs.count(), |xb| {
            let p = px.get(xb);
            if p == 0.0 {
                return 0.0;
            }
            p * measure.block_cost(&xs.symbols(xb), &ys.symbols(self.reproduce(xb)))
        });
        Ok(total / self.n as f64)
    }

    pub(crate) fn check_measure(&self, measure: &DistortionMeasure) -> Result<()> {
        if measure.x_size() != self.x_size || measure.y_size() != self.y_size {
            return Err(Error::ShapeMismatch {
                left: (measure.x_size(), measure.y_size()),
                right: (self.x_size, self.y_size),
            });
        }
        Ok(())
    }
}

/// For every source block, the lowest-index codeword of least block distortion.
pub(crate) fn nearest_encoder(
    xs: &BlockIndexer,
    measure: &DistortionMeasure,
    codebook: &[usize],
) -> Vec<u32> {
    let n = xs.n();
    let ny = measure.y_size();
    let ys = BlockIndexer::unchecked(ny, n);
    let words: Vec<usize> = codebook.iter().flat_map(|&c| ys.symbols(c)).collect();
    (0..xs.count())
        .into_par_iter()
        .map_init(
            || (vec![0usize; n], vec![0.0f64; n * ny]),
            |(sym, table), xb| {
                xs.fill_symbols(xb, sym);
                for (i, &x) in sym.iter().enumerate() {
                    table[i * ny..(i + 1) * ny].copy_from_slice(measure.row(x));
                }
                let mut best = f64::INFINITY;
                let mut best_m = 0u32;
                for (m, word) in words.chunks_exact(n).enumerate() {
                    let mut cost = 0.0;
                    for (i, &y) in word.iter().enumerate() {
                        cost += table[i * ny + y];
                        if cost >= best {
                            break;
                        }
                    }
                    if cost < best {
                        best = cost;
                        best_m = m as u32;
                    }
                }
                best_m
            },
        )
        .collect()
}
