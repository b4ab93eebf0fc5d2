//! The two block laws a code induces on `X^n × Y^n`.
//!
//! * `P(x^n, y^n) = P_X^n(x^n) · 1{y^n = g(f(x^n))}`, the law of the source
//!   and its reproduction.
//! * `Q(x^n, y^n) = Q_{Y^n}(y^n) · Π_i P_{X|Y}(x_i | y_i)`, a codeword drawn
//!   uniformly from the codebook (with multiplicity) and passed through the
//!   backward memoryless channel.
//!
//! `P` is stored sparsely, one reproduction block per source block. `Q` is
//! never materialized; it is evaluated pointwise in log space.

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::codes::BlockCode;
use crate::distributions::{
    empirical_type, variational_distance, BlockIndexer, Channel, JointLaw, Simplex,
};
use crate::error::{Error, Result};
use crate::numeric::{par_index_sum, CompensatedSum};
use crate::rd_solver::DistortionMeasure;

/// The code-induced law `P` and the backward-channel law `Q` at one
/// blocklength.
#[derive(Debug, Clone)]
pub struct InducedPair {
    n: usize,
    x_size: usize,
    y_size: usize,
    p_x: Vec<f64>,
    /// Index into `codewords` of `g(f(x^n))`, per source block.
    slot_of_x: Vec<u32>,
    /// Distinct codewords, ascending.
    codewords: Vec<usize>,
    multiplicity: Vec<usize>,
    m: usize,
    p_y: Vec<f64>,
    /// `ln P_{X|Y}(x|y)` at `y * |X| + x`.
    log_backward: Vec<f64>,
    backward: Channel,
}

impl InducedPair {
    /// `backward` has one row per reproduction symbol.
    pub fn build(
        code: &BlockCode,
        source: &Simplex,
        backward: &Channel,
        budget: &Budget,
    ) -> Result<Self> {
        if source.len() != code.x_size() {
            return Err(Error::ShapeMismatch {
                left: (source.len(), 1),
                right: (code.x_size(), code.y_size()),
            });
        }
        if backward.input_size() != code.y_size() || backward.output_size() != code.x_size() {
            return Err(Error::ShapeMismatch {
                left: (backward.output_size(), backward.input_size()),
                right: (code.x_size(), code.y_size()),
            });
        }
        let p_x = source.product_extension(code.n(), budget)?.into_inner();

        let mut codewords = code.codebook().to_vec();
        codewords.sort_unstable();
        codewords.dedup();
        let mut multiplicity = vec![0usize; codewords.len()];
        let slot_of_message: Vec<u32> = code
            .codebook()
            .iter()
            .map(|c| {
                let s = codewords.binary_search(c).expect("codeword listed");
                multiplicity[s] += 1;
                s as u32
            })
            .collect();
        let slot_of_x: Vec<u32> = code
            .encoder()
            .par_iter()
            .map(|&m| slot_of_message[m as usize])
            .collect();

        let mut p_y = vec![CompensatedSum::new(); codewords.len()];
        for (p, &s) in p_x.iter().zip(&slot_of_x) {
            p_y[s as usize].add(*p);
        }
        let p_y = p_y.iter().map(CompensatedSum::value).collect();

        let log_backward = backward.flat().iter().map(|v| v.ln()).collect();
        Ok(Self {
            n: code.n(),
            x_size: code.x_size(),
            y_size: code.y_size(),
            p_x,
            slot_of_x,
            codewords,
            multiplicity,
            m: code.size(),
            p_y,
            log_backward,
            backward: backward.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of messages `M`, counting duplicate codewords.
    pub fn messages(&self) -> usize {
        self.m
    }

    pub fn backward(&self) -> &Channel {
        &self.backward
    }

    pub fn x_indexer(&self) -> BlockIndexer {
        BlockIndexer::unchecked(self.x_size, self.n)
    }

    pub fn y_indexer(&self) -> BlockIndexer {
        BlockIndexer::unchecked(self.y_size, self.n)
    }

    /// `P_{X^n}(x^n)`.
    pub fn p_source(&self, x_block: usize) -> f64 {
        self.p_x[x_block]
    }

    /// `g(f(x^n))`.
    pub fn reproduction(&self, x_block: usize) -> usize {
        self.codewords[self.slot_of_x[x_block] as usize]
    }

    /// `P(x^n, y^n)`.
    pub fn p_mass(&self, x_block: usize, y_block: usize) -> f64 {
        if self.reproduction(x_block) == y_block {
            self.p_x[x_block]
        } else {
            0.0
        }
    }

    /// Distinct codewords with their `P_{Y^n}` and `Q_{Y^n}` masses.
    pub fn output_laws(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.codewords
            .iter()
            .zip(&self.p_y)
            .zip(&self.multiplicity)
            .map(|((&c, &p), &k)| (c, p, k as f64 / self.m as f64))
    }

    /// `ln Π_i P_{X|Y}(x_i | y_i)`.
    pub fn log_backward_block(&self, x_block: usize, y_block: usize) -> f64 {
        let (mut xb, mut yb) = (x_block, y_block);
        let mut acc = 0.0;
        for _ in 0..self.n {
            let (x, y) = (xb % self.x_size, yb % self.y_size);
            acc += self.log_backward[y * self.x_size + x];
            xb /= self.x_size;
            yb /= self.y_size;
        }
        acc
    }

    fn log_q_slot(&self, x_block: usize, slot: usize) -> f64 {
        (self.multiplicity[slot] as f64 / self.m as f64).ln()
            + self.log_backward_block(x_block, self.codewords[slot])
    }

    /// `ln Q(x^n, y^n)`; `-inf` off the support.
    pub fn log_q_mass(&self, x_block: usize, y_block: usize) -> f64 {
        match self.codewords.binary_search(&y_block) {
            Ok(slot) => self.log_q_slot(x_block, slot),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn q_mass(&self, x_block: usize, y_block: usize) -> f64 {
        self.log_q_mass(x_block, y_block).exp()
    }

    fn log_q_on_graph(&self, x_block: usize) -> f64 {
        self.log_q_slot(x_block, self.slot_of_x[x_block] as usize)
    }

    /// `Σ_{x^n} Q(x^n, g(f(x^n)))`, the `Q`-mass of the graph that carries
    /// all of `P`.
    pub fn q_mass_on_p_support(&self) -> f64 {
        par_index_sum(self.p_x.len(), |xb| self.log_q_on_graph(xb).exp())
    }

    /// Whether some source block of positive probability has `Q`-mass zero.
    pub fn escapes_q_support(&self) -> bool {
        (0..self.p_x.len())
            .into_par_iter()
            .any(|xb| self.p_x[xb] > 0.0 && self.log_q_on_graph(xb) == f64::NEG_INFINITY)
    }

    /// `D(P || Q)` in nats.
    pub fn divergence(&self) -> f64 {
        if self.escapes_q_support() {
            return f64::INFINITY;
        }
        par_index_sum(self.p_x.len(), |xb| {
            let p = self.p_x[xb];
            if p == 0.0 {
                0.0
            } else {
                p * (p.ln() - self.log_q_on_graph(xb))
            }
        })
        .max(0.0)
    }

    /// `(1/n) D(P || Q)`; `+inf` when `P` is not absolutely continuous
    /// with respect to `Q`.
    pub fn normalized_divergence(&self) -> f64 {
        self.divergence() / self.n as f64
    }

    /// `(D(P || P_{Y^n} Q_{X^n|Y^n}), D(P_{Y^n} || Q_{Y^n}))`, unnormalized.
    /// They sum to [`divergence`](Self::divergence).
    pub fn chain_rule_terms(&self) -> (f64, f64) {
        let term2 = compensated(self.output_laws().map(|(_, p, q)| {
            if p == 0.0 {
                0.0
            } else {
                p * (p / q).ln()
            }
        }))
        .max(0.0);
        let term1 = if self.escapes_q_support() {
            f64::INFINITY
        } else {
            par_index_sum(self.p_x.len(), |xb| {
                let p = self.p_x[xb];
                if p == 0.0 {
                    return 0.0;
                }
                let slot = self.slot_of_x[xb] as usize;
                let log_cond = self.log_backward_block(xb, self.codewords[slot]);
                p * (p.ln() - self.p_y[slot].ln() - log_cond)
            })
            .max(0.0)
        };
        (term1, term2)
    }

    /// `H(Y^n)` in nats.
    pub fn block_output_entropy(&self) -> f64 {
        compensated(self.p_y.iter().map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 }))
    }

    /// `(1/n) I(X^n; Y^n)` from the joint: `Σ P(x,y) ln(P(x,y) / P(x) P(y))`.
    pub fn normalized_block_mi(&self) -> f64 {
        let mi = par_index_sum(self.p_x.len(), |xb| {
            let p = self.p_x[xb];
            if p == 0.0 {
                0.0
            } else {
                -p * self.p_y[self.slot_of_x[xb] as usize].ln()
            }
        });
        mi.max(0.0) / self.n as f64
    }

    /// `P_{X_J Y_J} = (1/n) Σ_i P_{X_i Y_i}`, built position by position.
    pub fn averaged_single_letter_marginal(&self) -> JointLaw {
        let (xs, ys) = (self.x_size, self.y_size);
        let cells = xs * ys;
        let mut total = vec![CompensatedSum::new(); cells];
        for i in 0..self.n {
            let (xdiv, ydiv) = (xs.pow((self.n - 1 - i) as u32), ys.pow((self.n - 1 - i) as u32));
            let position: Vec<CompensatedSum> = (0..self.p_x.len())
                .into_par_iter()
                .fold_chunks(
                    1 << 12,
                    || vec![CompensatedSum::new(); cells],
                    |mut acc, xb| {
                        let x = (xb / xdiv) % xs;
                        let y = (self.reproduction(xb) / ydiv) % ys;
                        acc[x * ys + y].add(self.p_x[xb]);
                        acc
                    },
                )
                .collect::<Vec<_>>()
                .into_iter()
                .fold(vec![CompensatedSum::new(); cells], merge);
            for (t, p) in total.iter_mut().zip(position) {
                t.add(p.value());
            }
        }
        let mass = total.iter().map(|c| c.value() / self.n as f64).collect();
        JointLaw::from_flat_unchecked(xs, ys, mass)
    }

    /// `Σ_{x^n} P(x^n) · T_{x^n, g(f(x^n))}`, built from block types.
    pub fn expected_empirical_type(&self) -> JointLaw {
        let (xs, ys) = (self.x_size, self.y_size);
        let cells = xs * ys;
        let xi = self.x_indexer();
        let yi = self.y_indexer();
        let acc = (0..self.p_x.len())
            .into_par_iter()
            .fold_chunks(
                1 << 12,
                || vec![CompensatedSum::new(); cells],
                |mut acc, xb| {
                    let p = self.p_x[xb];
                    if p > 0.0 {
                        let x = xi.symbols(xb);
                        let y = yi.symbols(self.reproduction(xb));
                        let t = empirical_type(&x, &y, xs, ys)
                            .expect("blocks are in range")
                            .to_joint();
                        for (a, m) in acc.iter_mut().zip(t.flat()) {
                            a.add(p * m);
                        }
                    }
                    acc
                },
            )
            .collect::<Vec<_>>()
            .into_iter()
            .fold(vec![CompensatedSum::new(); cells], merge);
        JointLaw::from_flat_unchecked(xs, ys, acc.iter().map(CompensatedSum::value).collect())
    }

    /// `||P - Q||`. Since `P` lives on the graph of `g ∘ f`, this is
    /// `Σ_{x^n} (P(x^n) - Q(x^n, g(f(x^n))))^+`.
    pub fn tv_joint(&self) -> f64 {
        par_index_sum(self.p_x.len(), |xb| {
            (self.p_x[xb] - self.log_q_on_graph(xb).exp()).max(0.0)
        })
        .clamp(0.0, 1.0)
    }

    /// `||P - Q||` as half the L1 distance over every `(x^n, y^n)` with `y^n`
    /// in the codebook. Costs `|X|^n` times the number of distinct
    /// codewords.
    pub fn tv_joint_dense(&self, budget: &Budget) -> Result<f64> {
        budget.admit(
            self.p_x.len() as u128 * self.codewords.len() as u128,
            "dense variational distance is out of reach; use tv_joint",
        )?;
        let half_l1 = par_index_sum(self.p_x.len(), |xb| {
            (0..self.codewords.len())
                .map(|slot| {
                    let p = if self.slot_of_x[xb] as usize == slot {
                        self.p_x[xb]
                    } else {
                        0.0
                    };
                    (p - self.log_q_slot(xb, slot).exp()).abs()
                })
                .sum()
        });
        Ok((0.5 * half_l1).clamp(0.0, 1.0))
    }

    /// One row of a blocklength sweep.
    pub fn row(
        &self,
        code: &BlockCode,
        target: &JointLaw,
        measure: Option<&DistortionMeasure>,
        budget: &Budget,
    ) -> Result<SweepRow> {
        let (t1, t2) = self.chain_rule_terms();
        let n = self.n as f64;
        let expected_distortion = match measure {
            Some(d) => {
                let source = Simplex::with_tolerance(self.source_marginal(), 1e-9)?;
                Some(code.expected_distortion(&source, d, budget)?)
            }
            None => None,
        };
        Ok(SweepRow {
            n: self.n,
            messages: self.m,
            rate: code.rate(),
            expected_distortion,
            normalized_divergence: self.normalized_divergence(),
            term1: t1 / n,
            term2: t2 / n,
            normalized_block_mi: self.normalized_block_mi(),
            output_entropy: self.block_output_entropy() / n,
            single_letter_tv: variational_distance(&self.averaged_single_letter_marginal(), target)?,
            tv_joint: self.tv_joint(),
        })
    }

    fn source_marginal(&self) -> Vec<f64> {
        let mut out = vec![CompensatedSum::new(); self.x_size];
        let xi = self.x_indexer();
        for (xb, &p) in self.p_x.iter().enumerate() {
            out[xi.symbols(xb)[0]].add(p);
        }
        out.iter().map(CompensatedSum::value).collect()
    }
}

/// Per-blocklength statistics of a code against its target; divergences
/// and entropies are per letter, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub messages: usize,
    pub rate: f64,
    pub expected_distortion: Option<f64>,
    pub normalized_divergence: f64,
    pub term1: f64,
    pub term2: f64,
    pub normalized_block_mi: f64,
    pub output_entropy: f64,
    /// `||P_{X_J Y_J} - P_XY||`.
    pub single_letter_tv: f64,
    pub tv_joint: f64,
}

fn compensated<I: Iterator<Item = f64>>(it: I) -> f64 {
    it.collect::<CompensatedSum>().value()
}

fn merge(mut a: Vec<CompensatedSum>, b: Vec<CompensatedSum>) -> Vec<CompensatedSum> {
    for (x, y) in a.iter_mut().zip(b) {
        x.add(y.value());
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::lloyd_code;
    use crate::distributions::kl_divergence_slices;

    fn identity_pair(n: usize) -> (BlockCode, InducedPair) {
        let d = DistortionMeasure::hamming(2);
        let all: Vec<usize> = (0..1 << n).collect();
        let code = BlockCode::nearest(n, &d, all, &Budget::default()).unwrap();
        let pair =
            InducedPair::build(&code, &Simplex::uniform(2), &Channel::identity(2), &Budget::default())
                .unwrap();
        (code, pair)
    }

    #[test]
    fn identity_code_has_p_equal_q() {
        let (_, pair) = identity_pair(1);
        assert_eq!(pair.p_mass(0, 0), 0.5);
        assert_eq!(pair.p_mass(1, 1), 0.5);
        assert_eq!(pair.p_mass(0, 1), 0.0);
        assert_eq!(pair.normalized_divergence(), 0.0);
        assert_eq!(pair.chain_rule_terms(), (0.0, 0.0));
        assert_eq!(pair.tv_joint(), 0.0);
        assert!((pair.normalized_block_mi() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn constant_code() {
        let d = DistortionMeasure::hamming(2);
        let code = BlockCode::nearest(2, &d, vec![0b01], &Budget::default()).unwrap();
        let back = Channel::new(vec![vec![0.7, 0.3], vec![0.4, 0.6]]).unwrap();
        let src = Simplex::new(vec![0.2, 0.8]).unwrap();
        let pair = InducedPair::build(&code, &src, &back, &Budget::default()).unwrap();
        for xb in 0..4 {
            assert_eq!(pair.reproduction(xb), 0b01);
        }
        assert_eq!(pair.chain_rule_terms().1, 0.0);
        assert_eq!(pair.normalized_block_mi(), 0.0);
        // q at (x = 10, y = 01) is 0.4 * 0.3
        assert!((pair.q_mass(0b10, 0b01) - 0.4 * 0.3).abs() < 1e-15);
        assert_eq!(pair.q_mass(0b10, 0b11), 0.0);
    }

    #[test]
    fn single_codeword_n1_gives_single_letter_tv() {
        let d = DistortionMeasure::hamming(2);
        let code = BlockCode::nearest(1, &d, vec![1], &Budget::default()).unwrap();
        let back = Channel::new(vec![vec![0.7, 0.3], vec![0.4, 0.6]]).unwrap();
        let src = Simplex::new(vec![0.2, 0.8]).unwrap();
        let pair = InducedPair::build(&code, &src, &back, &Budget::default()).unwrap();
        assert!((pair.q_mass(0, 1) - 0.4).abs() < 1e-15);
        let single = variational_distance(&src, &Simplex::new(back.row(1).to_vec()).unwrap()).unwrap();
        assert!((pair.tv_joint() - single).abs() < 1e-15);
        assert!((pair.tv_joint_dense(&Budget::default()).unwrap() - single).abs() < 1e-15);
        let kl = kl_divergence_slices(src.mass(), back.row(1)).unwrap();
        assert!((pair.normalized_divergence() - kl).abs() < 1e-15);
    }

    #[test]
    fn lloyd_bernoulli_pair_is_normalized() {
        let d = DistortionMeasure::hamming(2);
        let src = Simplex::new(vec![0.3, 0.7]).unwrap();
        let code = lloyd_code(&src, &d, 3, 3, 4, 100, &Budget::default()).unwrap();
        let back = Channel::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let pair = InducedPair::build(&code, &src, &back, &Budget::default()).unwrap();
        let total: f64 = (0..8).map(|x| pair.p_mass(x, pair.reproduction(x))).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for xb in 0..8usize {
            let ones = xb.count_ones() as i32;
            let want = 0.7f64.powi(ones) * 0.3f64.powi(3 - ones);
            assert!((pair.p_source(xb) - want).abs() < 1e-15);
        }
        let (t1, t2) = pair.chain_rule_terms();
        assert!((t1 + t2 - pair.divergence()).abs() < 1e-12);
        let a = pair.averaged_single_letter_marginal();
        let b = pair.expected_empirical_type();
        for (u, v) in a.flat().iter().zip(b.flat()) {
            assert!((u - v).abs() < 1e-15);
        }
        let dense = pair.tv_joint_dense(&Budget::default()).unwrap();
        assert!((dense - pair.tv_joint()).abs() < 1e-14);
    }

    #[test]
    fn zero_backward_entry_gives_infinite_divergence() {
        let d = DistortionMeasure::hamming(2);
        let code = BlockCode::nearest(2, &d, vec![0b00, 0b11], &Budget::default()).unwrap();
        let back = Channel::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let pair =
            InducedPair::build(&code, &Simplex::uniform(2), &back, &Budget::default()).unwrap();
        assert!(pair.escapes_q_support());
        assert_eq!(pair.normalized_divergence(), f64::INFINITY);
        assert_eq!(pair.chain_rule_terms().0, f64::INFINITY);
    }
}
