use rand::distributions::{Distribution, WeightedIndex};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::estimate::{sample_chunks, Estimate};
use crate::numeric::par_index_sum;
use crate::rd_solver::DistortionMeasure;

use super::block_code::BlockCode;
use super::random::CoordinationTarget;

/// How a [`GoodnessReport`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

/// The three statistics by which a code is judged good for a target joint
/// law (or for a distortion level).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodnessReport {
    /// `R_n - I(X;Y)`, nats.
    pub rate_gap: f64,
    /// Per-letter `E d(X_i, Y_i)`; present when a measure was supplied.
    pub expected_distortion: Option<Estimate>,
    /// `E ||T_{X^n Y^n} - P_XY||`.
    pub expected_tv_to_target: Estimate,
    pub mode: EvalMode,
}

/// Evaluates a code against a target.
///
/// Enumerates all `|X|^n` source blocks when the budget allows; otherwise
/// draws `samples` i.i.d. source blocks (`samples = 0` disables sampling).
pub fn goodness_report(
    code: &BlockCode,
    target: &CoordinationTarget,
    measure: Option<&DistortionMeasure>,
    budget: &Budget,
    samples: u64,
    seed: u64,
) -> Result<GoodnessReport> {
    let (xsz, ysz) = (target.joint.x_size(), target.joint.y_size());
    if code.x_size() != xsz || code.y_size() != ysz {
        return Err(Error::ShapeMismatch {
            left: (code.x_size(), code.y_size()),
            right: (xsz, ysz),
        });
    }
    if let Some(d) = measure {
        code.check_measure(d)?;
    }
    let n = code.n();
    let xs = code.x_indexer();
    let ys = code.y_indexer();
    let source = target.source.mass();
    let joint = target.joint.flat();

    let statistics = |xb: usize| -> (f64, f64) {
        let x = xs.symbols(xb);
        let y = ys.symbols(code.reproduce(xb));
        let mut counts = vec![0u32; xsz * ysz];
        for (a, b) in x.iter().zip(&y) {
            counts[a * ysz + b] += 1;
        }
        let tv = 0.5
            * counts
                .iter()
                .zip(joint)
                .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
                .sum::<f64>();
        let dist = measure.map_or(0.0, |d| d.block_cost(&x, &y) / n as f64);
        (tv, dist)
    };

    let rate_gap = code.rate() - target.mutual_information;
    let exact = budget.blocks(xsz, n, "").is_ok();
    if exact {
        let weight = |xb: usize| -> f64 {
            xs.symbols(xb).iter().map(|&a| source[a]).product()
        };
        let tv = par_index_sum(xs.count(), |xb| {
            let w = weight(xb);
            if w == 0.0 {
                0.0
            } else {
                w * statistics(xb).0
            }
        });
        let dist = measure.map(|_| {
            Estimate::exact(par_index_sum(xs.count(), |xb| {
                let w = weight(xb);
                if w == 0.0 {
                    0.0
                } else {
                    w * statistics(xb).1
                }
            }))
        });
        return Ok(GoodnessReport {
            rate_gap,
            expected_distortion: dist,
            expected_tv_to_target: Estimate::exact(tv.clamp(0.0, 1.0)),
            mode: EvalMode::Exact,
        });
    }
    if samples < 2 {
        return Err(Error::BudgetExceeded {
            required: crate::budget::checked_power(xsz, n),
            limit: budget.max_blocks,
            hint: "raise the block budget or request Monte-Carlo samples",
        });
    }

    let letters =
        WeightedIndex::new(source).map_err(|e| Error::InvalidLaw(e.to_string()))?;
    let parts = sample_chunks(samples, seed, |rng, len| {
        let mut acc = [0.0f64; 4];
        for _ in 0..len {
            let xb = (0..n).fold(0, |i, _| i * xsz + letters.sample(rng));
            let (tv, dist) = statistics(xb);
            acc[0] += tv;
            acc[1] += tv * tv;
            acc[2] += dist;
            acc[3] += dist * dist;
        }
        acc
    });
    let mut tot = [0.0f64; 4];
    for p in parts {
        for (t, v) in tot.iter_mut().zip(p) {
            *t += v;
        }
    }
    let s = samples as f64;
    let estimate = |sum: f64, sq: f64| {
        let mean = sum / s;
        let var = ((sq / s - mean * mean) * s / (s - 1.0)).max(0.0);
        Estimate::sampled(mean, (var / s).sqrt())
    };
    Ok(GoodnessReport {
        rate_gap,
        expected_distortion: measure.map(|_| estimate(tot[2], tot[3])),
        expected_tv_to_target: estimate(tot[0], tot[1]),
        mode: EvalMode::Sampled { samples, seed },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{optimal_code_exhaustive, SearchLimits};
    use crate::distributions::{JointLaw, Simplex};
    use crate::rd_solver::solve_rd;

    fn binary() -> (CoordinationTarget, DistortionMeasure) {
        let d = DistortionMeasure::hamming(2);
        let sol = solve_rd(&Simplex::uniform(2), &d, 0.2, 1e-10).unwrap();
        (CoordinationTarget::from_rd(&sol), sol.reduced_measure())
    }

    #[test]
    fn n2_exhaustive_matches_hand_enumeration() {
        let (target, d) = binary();
        let code = optimal_code_exhaustive(
            &target.source,
            &d,
            2,
            2,
            &SearchLimits::default(),
        )
        .unwrap();
        let r = goodness_report(&code, &target, Some(&d), &Budget::default(), 0, 0).unwrap();
        let p = target.joint.flat();
        let mut tv = 0.0;
        let mut dist = 0.0;
        for xb in 0..4 {
            let x = [xb >> 1, xb & 1];
            let yb = code.reproduce(xb);
            let y = [yb >> 1, yb & 1];
            let mut t = [0.0; 4];
            for i in 0..2 {
                t[x[i] * 2 + y[i]] += 0.5;
                dist += 0.25 * 0.5 * (x[i] != y[i]) as u8 as f64;
            }
            tv += 0.25 * 0.5 * (0..4).map(|k| (t[k] - p[k]).abs()).sum::<f64>();
        }
        assert!(r.expected_tv_to_target.is_exact());
        assert!((r.expected_tv_to_target.value - tv).abs() < 1e-15);
        assert!((r.expected_distortion.unwrap().value - 0.25).abs() < 1e-15);
        assert!((dist - 0.25).abs() < 1e-15);
        assert!((r.rate_gap - (2f64.ln() / 2.0 - target.mutual_information)).abs() < 1e-15);
    }

    #[test]
    fn n1_type_is_a_point_mass() {
        let joint = JointLaw::from_matrix(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let target = CoordinationTarget::from_joint(joint).unwrap();
        let d = DistortionMeasure::hamming(2);
        let code = BlockCode::nearest(1, &d, vec![0, 1], &Budget::default()).unwrap();
        let r = goodness_report(&code, &target, None, &Budget::default(), 0, 0).unwrap();
        // Types are delta(0,0) and delta(1,1), each with TV 1 - 0.4 to the target.
        assert!((r.expected_tv_to_target.value - 0.6).abs() < 1e-15);
        assert!(r.expected_distortion.is_none());
    }

    #[test]
    fn sampled_mode_agrees_with_exact() {
        let (target, d) = binary();
        let code = crate::codes::lloyd_code(&target.source, &d, 8, 6, 1, 50, &Budget::default())
            .unwrap();
        let exact = goodness_report(&code, &target, Some(&d), &Budget::default(), 0, 0).unwrap();
        let tiny = Budget::new(16);
        let sampled = goodness_report(&code, &target, Some(&d), &tiny, 200_000, 7).unwrap();
        assert_eq!(sampled.mode, EvalMode::Sampled { samples: 200_000, seed: 7 });
        let tv = sampled.expected_tv_to_target;
        assert!(tv.agrees_with(exact.expected_tv_to_target.value, 4.0), "{tv:?} {exact:?}");
        let dist = sampled.expected_distortion.unwrap();
        assert!(dist.agrees_with(exact.expected_distortion.unwrap().value, 4.0));
    }

    #[test]
    fn infeasible_is_a_resource_error() {
        let (target, d) = binary();
        let code = BlockCode::nearest(4, &d, vec![0], &Budget::default()).unwrap();
        let err = goodness_report(&code, &target, None, &Budget::new(4), 0, 0).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Resource);
    }
}
