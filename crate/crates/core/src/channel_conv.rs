//! A rate-distortion code read as a channel code for the backward channel.
//!
//! The source decoder `g` becomes the channel encoder (message `m` is sent
//! as codeword `g(m)`), the backward channel `P_{X|Y}` carries it to a
//! source-alphabet block, and the source encoder `f` becomes the channel
//! decoder. Under `Q` the message is uniform; under `P` the channel output
//! is the source block itself, so `f` always recovers the codeword.

use rand::distributions::{Distribution, Uniform, WeightedIndex};

use crate::budget::Budget;
use crate::codes::{BlockCode, EvalMode};
use crate::distributions::Channel;
use crate::error::{Error, Result};
use crate::estimate::{sample_chunks, wilson_std_error, Estimate};
use crate::induced::InducedPair;

/// A code with a bijective decoder paired with a backward channel.
#[derive(Debug, Clone)]
pub struct ChannelExperiment {
    code: BlockCode,
    backward: Channel,
}

/// Variational distances with and without the decoded message appended to
/// both block laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvAudit {
    pub extended: f64,
    pub unextended: f64,
}

impl ChannelExperiment {
    pub fn new(code: BlockCode, backward: Channel) -> Result<Self> {
        if !code.is_bijective() {
            return Err(Error::InvalidArgument(
                "the decoder repeats a codeword; the channel view needs distinct codewords".into(),
            ));
        }
        if backward.input_size() != code.y_size() || backward.output_size() != code.x_size() {
            return Err(Error::ShapeMismatch {
                left: (backward.output_size(), backward.input_size()),
                right: (code.x_size(), code.y_size()),
            });
        }
        Ok(Self { code, backward })
    }

    pub fn code(&self) -> &BlockCode {
        &self.code
    }

    pub fn backward(&self) -> &Channel {
        &self.backward
    }

    /// `Q(E)`, the probability that a uniform message sent through the
    /// backward channel is decoded to the wrong codeword.
    ///
    /// Exact mode uses `1 - (1/M) Σ_{x^n} Π_i P_{X|Y}(x_i | g(f(x^n))_i)`;
    /// sampled mode simulates message, channel and decoder and reports a
    /// Wilson standard error.
    pub fn error_probability_q(&self, mode: EvalMode, budget: &Budget) -> Result<Estimate> {
        if self.code.size() == 1 {
            return Ok(Estimate::exact(0.0));
        }
        match mode {
            EvalMode::Exact => {
                let blocks = budget.blocks(
                    self.code.x_size(),
                    self.code.n(),
                    "exact error probability is out of reach; use sampled mode",
                )?;
                let xsz = self.code.x_size();
                let ysz = self.code.y_size();
                let n = self.code.n();
                let logb: Vec<f64> = self.backward.flat().iter().map(|v| v.ln()).collect();
                let correct = crate::numeric::par_index_sum(blocks, |xb| {
                    let (mut x, mut y) = (xb, self.code.reproduce(xb));
                    let mut acc = 0.0;
                    for _ in 0..n {
                        acc += logb[(y % ysz) * xsz + x % xsz];
                        x /= xsz;
                        y /= ysz;
                    }
                    acc.exp()
                }) / self.code.size() as f64;
                Ok(Estimate::exact((1.0 - correct).clamp(0.0, 1.0)))
            }
            EvalMode::Sampled { samples, seed } => {
                if samples == 0 {
                    return Err(Error::InvalidArgument("sampled mode needs samples > 0".into()));
                }
                let m = self.code.size();
                let rows: Vec<WeightedIndex<f64>> = self
                    .backward
                    .rows()
                    .map(|r| WeightedIndex::new(r).map_err(|e| Error::InvalidLaw(e.to_string())))
                    .collect::<Result<_>>()?;
                let messages = Uniform::new(0, m);
                let words: Vec<Vec<usize>> =
                    (0..m).map(|k| self.code.codeword_symbols(k)).collect();
                let xsz = self.code.x_size();
                let errors: u64 = sample_chunks(samples, seed, |rng, len| {
                    let mut errors = 0u64;
                    for _ in 0..len {
                        let sent = messages.sample(rng);
                        let xb = words[sent]
                            .iter()
                            .fold(0, |acc, &y| acc * xsz + rows[y].sample(rng));
                        if self.code.encode(xb) != sent {
                            errors += 1;
                        }
                    }
                    errors
                })
                .into_iter()
                .sum();
                Ok(Estimate::sampled(
                    errors as f64 / samples as f64,
                    wilson_std_error(errors, samples),
                ))
            }
        }
    }

    /// `P(E)`: under `P` the channel output is the source block, so the
    /// decoder returns `f(x^n)` and `g(f(x^n))` must equal the reproduction
    /// recorded in `pair`. Returns the audited probability, which is zero
    /// unless this experiment's code disagrees with the one `pair` was built
    /// from, in which case an invariant error is raised.
    pub fn error_probability_p(&self, pair: &InducedPair, mode: EvalMode) -> Result<f64> {
        if pair.n() != self.code.n() || pair.x_indexer().count() != self.code.x_indexer().count()
        {
            return Err(Error::ShapeMismatch {
                left: (pair.n(), pair.x_indexer().count()),
                right: (self.code.n(), self.code.x_indexer().count()),
            });
        }
        let mismatch = |xb: usize| self.code.reproduce(xb) != pair.reproduction(xb);
        let (value, detail) = match mode {
            EvalMode::Exact => {
                let blocks = self.code.x_indexer().count();
                let v = crate::numeric::par_index_sum(blocks, |xb| {
                    if mismatch(xb) {
                        pair.p_source(xb)
                    } else {
                        0.0
                    }
                });
                (v, "exact")
            }
            EvalMode::Sampled { samples, seed } => {
                if samples == 0 {
                    return Err(Error::InvalidArgument("sampled mode needs samples > 0".into()));
                }
                let source = WeightedIndex::new(source_letters(pair))
                    .map_err(|e| Error::InvalidLaw(e.to_string()))?;
                let xsz = self.code.x_size();
                let n = self.code.n();
                let errors: u64 = sample_chunks(samples, seed, |rng, len| {
                    (0..len)
                        .filter(|_| {
                            let xb = (0..n).fold(0, |acc, _| acc * xsz + source.sample(rng));
                            mismatch(xb)
                        })
                        .count() as u64
                })
                .into_iter()
                .sum();
                (errors as f64 / samples as f64, "sampled")
            }
        };
        if value != 0.0 {
            return Err(Error::Invariant(format!(
                "P(E) = {value} ({detail}): decoder output disagrees with the induced reproduction"
            )));
        }
        Ok(value)
    }

    /// `Q(E) - P(E) = Q(E)`, a lower bound on `||P - Q||`: the event that
    /// the decoded codeword differs from `Y^n` has these probabilities under
    /// the message-extended laws, whose distance equals `||P - Q||`.
    pub fn tv_lower_bound(
        &self,
        pair: &InducedPair,
        mode: EvalMode,
        budget: &Budget,
    ) -> Result<Estimate> {
        let p = self.error_probability_p(pair, EvalMode::Exact)?;
        let q = self.error_probability_q(mode, budget)?;
        Ok(Estimate {
            value: (q.value - p).max(0.0),
            ..q
        })
    }
}

/// Single-letter source law recovered from the block law of `pair`.
fn source_letters(pair: &InducedPair) -> Vec<f64> {
    let xi = pair.x_indexer();
    let mut out = vec![0.0; xi.alphabet()];
    let stride = xi.count() / xi.alphabet();
    for (x, slot) in out.iter_mut().enumerate() {
        *slot = (0..stride).map(|r| pair.p_source(x * stride + r)).sum();
    }
    out
}

/// Compares `||P - Q||` with the distance between the laws extended by the
/// decoded message `M^ = f(X^n)`, enumerating every `(x^n, y^n, m)` with
/// `y^n` a codeword.
pub fn extend_with_message(pair: &InducedPair, code: &BlockCode, budget: &Budget) -> Result<TvAudit> {
    let blocks = pair.x_indexer().count();
    let words: Vec<usize> = pair.output_laws().map(|(c, _, _)| c).collect();
    let m = code.size();
    budget.admit(
        blocks as u128 * words.len() as u128 * m as u128,
        "message-extended audit is out of reach",
    )?;
    let unextended = pair.tv_joint_dense(budget)?;
    let l1 = crate::numeric::par_index_sum(blocks, |xb| {
        let decoded = code.encode(xb);
        let mut acc = 0.0;
        for &y in &words {
            let p = pair.p_mass(xb, y);
            let q = pair.q_mass(xb, y);
            for msg in 0..m {
                let on = (msg == decoded) as u8 as f64;
                acc += (p * on - q * on).abs();
            }
        }
        acc
    });
    Ok(TvAudit {
        extended: (0.5 * l1).clamp(0.0, 1.0),
        unextended,
    })
}
