use crate::distributions::{mutual_information, Channel, JointLaw, Simplex};
use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;

use super::distortion::DistortionMeasure;

/// Output mass below which [`reduce_alphabet`] drops a reproduction symbol.
pub const DEFAULT_REDUCTION_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative change of the Lagrangian `I + s·E d` that ends an iteration.
    pub tol: f64,
    /// Largest change of the output marginal still counted as converged.
    pub marginal_tol: f64,
    pub max_iters: usize,
    /// How far below the target the final distortion may sit.
    pub distortion_tol: f64,
    pub max_bisections: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            marginal_tol: 1e-13,
            max_iters: 200_000,
            distortion_tol: 1e-12,
            max_bisections: 200,
        }
    }
}

/// One fixed-point iteration at the final slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub iteration: usize,
    pub rate: f64,
    pub distortion: f64,
}

/// A minimizer of the rate-distortion problem.
///
/// Columns of `forward`, rows of `backward` and entries of `output_marginal`
/// are indexed by position in `reduced_alphabet`, which lists the original
/// reproduction symbols that were kept.
#[derive(Debug, Clone)]
pub struct RdSolution {
    /// `I(X;Y)` of the returned joint, in nats.
    pub rate: f64,
    pub distortion: f64,
    pub target: f64,
    /// Lagrange slope; `R'(D) = -slope`. Zero for the degenerate solution.
    pub slope: f64,
    pub source: Simplex,
    pub measure: DistortionMeasure,
    pub forward: Channel,
    pub backward: Channel,
    pub output_marginal: Simplex,
    pub reduced_alphabet: Vec<usize>,
    pub trace: Vec<TraceStep>,
    pub converged: bool,
    /// True when `target >= D_max` and a constant reproduction was returned.
    pub degenerate: bool,
}

impl RdSolution {
    pub fn joint(&self) -> JointLaw {
        JointLaw::from_source_channel(&self.source, &self.forward)
            .expect("forward channel matches the source")
    }

    /// The distortion measure restricted to the kept reproduction symbols.
    pub fn reduced_measure(&self) -> DistortionMeasure {
        self.measure.restrict(&self.reduced_alphabet)
    }
}

struct FixedPoint {
    forward: Vec<f64>,
    output: Vec<f64>,
    distortion: f64,
    converged: bool,
    trace: Vec<TraceStep>,
}

/// Alternating minimization at slope `s`, starting from output law `q`.
fn blahut_arimoto(
    px: &[f64],
    d: &DistortionMeasure,
    s: f64,
    mut q: Vec<f64>,
    opts: &SolverOptions,
    record: bool,
) -> FixedPoint {
    let (nx, ny) = (px.len(), q.len());
    let mut forward = vec![0.0; nx * ny];
    let mut logits = vec![0.0; ny];
    let mut prev_objective = f64::INFINITY;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut distortion = 0.0;
    for iteration in 0..opts.max_iters {
        for x in 0..nx {
            for y in 0..ny {
                let dxy = d.get(x, y);
                logits[y] = if q[y] > 0.0 && dxy.is_finite() {
                    q[y].ln() - s * dxy
                } else {
                    f64::NEG_INFINITY
                };
            }
            let lz = log_sum_exp(&logits);
            for y in 0..ny {
                forward[x * ny + y] = (logits[y] - lz).exp();
            }
        }
        let next: Vec<f64> = (0..ny)
            .map(|y| (0..nx).map(|x| px[x] * forward[x * ny + y]).sum())
            .collect();
        let mut rate = 0.0;
        distortion = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                let w = forward[x * ny + y];
                if w > 0.0 && px[x] > 0.0 {
                    rate += px[x] * w * (w / next[y]).ln();
                    distortion += px[x] * w * d.get(x, y);
                }
            }
        }
        if record {
            trace.push(TraceStep {
                iteration,
                rate,
                distortion,
            });
        }
        let objective = rate + s * distortion;
        let shift = q
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        q = next;
        if (objective - prev_objective).abs() <= opts.tol * objective.abs().max(1.0)
            && shift <= opts.marginal_tol
        {
            converged = true;
            break;
        }
        prev_objective = objective;
    }
    FixedPoint {
        forward,
        output: q,
        distortion,
        converged,
        trace,
    }
}

/// Initial output law: forward rows proportional to `exp(-s d(x,·))`,
/// optionally scaled by per-cell factors, pushed through the source.
fn initial_output(px: &[f64], d: &DistortionMeasure, s: f64, noise: Option<&[f64]>) -> Vec<f64> {
    let ny = d.y_size();
    let mut q = vec![0.0; ny];
    let mut logits = vec![0.0; ny];
    for (x, &p) in px.iter().enumerate() {
        for y in 0..ny {
            let factor = noise.map_or(1.0, |n| n[x * ny + y]);
            let dxy = d.get(x, y);
            logits[y] = if dxy.is_finite() {
                factor.ln() - s * dxy
            } else {
                f64::NEG_INFINITY
            };
        }
        let lz = log_sum_exp(&logits);
        for y in 0..ny {
            q[y] += p * (logits[y] - lz).exp();
        }
    }
    q
}

fn validate_inputs(source: &Simplex, d: &DistortionMeasure, target: f64) -> Result<()> {
    if source.len() != d.x_size() {
        return Err(Error::ShapeMismatch {
            left: (source.len(), 1),
            right: (d.x_size(), d.y_size()),
        });
    }
    if let Some(x) = source.mass().iter().position(|&p| p <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "source mass must be strictly positive (symbol {x} has {})",
            source.get(x)
        )));
    }
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "target distortion must be positive and finite, got {target}"
        )));
    }
    Ok(())
}

/// Solve `R(D)` at `target` with default options except the stopping tolerance.
pub fn solve_rd(
    source: &Simplex,
    d: &DistortionMeasure,
    target: f64,
    tol: f64,
) -> Result<RdSolution> {
    let opts = SolverOptions {
        tol,
        ..SolverOptions::default()
    };
    solve_rd_with(source, d, target, &opts)
}

pub fn solve_rd_with(
    source: &Simplex,
    d: &DistortionMeasure,
    target: f64,
    opts: &SolverOptions,
) -> Result<RdSolution> {
    validate_inputs(source, d, target)?;
    let all: Vec<usize> = (0..d.y_size()).collect();
    solve_on(source, d, &all, target, opts, None)
}

/// Solves on the reproduction symbols `keep` of `full`; `noise` perturbs the
/// initial forward channel (restarts).
pub(crate) fn solve_on(
    source: &Simplex,
    full: &DistortionMeasure,
    keep: &[usize],
    target: f64,
    opts: &SolverOptions,
    noise: Option<&[f64]>,
) -> Result<RdSolution> {
    let d = full.restrict(keep);
    let px = source.mass();
    let (best, dmax) = d.max_useful_distortion(source);
    if target >= dmax {
        return degenerate(source, full, keep, keep[best], target);
    }

    let eval = |s: f64| {
        let q0 = initial_output(px, &d, s, noise);
        blahut_arimoto(px, &d, s, q0, opts, false)
    };

    let mut s_lo = 0.0;
    let mut s_hi = 1.0;
    let mut hi = eval(s_hi);
    while hi.distortion > target {
        s_lo = s_hi;
        s_hi *= 2.0;
        if s_hi > 1e9 {
            return Err(Error::InvalidArgument(format!(
                "target distortion {target} is below what the reproduction alphabet can reach"
            )));
        }
        hi = eval(s_hi);
    }
    for _ in 0..opts.max_bisections {
        if target - hi.distortion <= opts.distortion_tol || s_hi - s_lo <= 1e-15 * s_hi {
            break;
        }
        let mid = 0.5 * (s_lo + s_hi);
        let fp = eval(mid);
        if fp.distortion > target {
            s_lo = mid;
        } else {
            s_hi = mid;
            hi = fp;
        }
    }
    // Rerun the accepted slope once more, recording the trace.
    let q0 = initial_output(px, &d, s_hi, noise);
    let fp = blahut_arimoto(px, &d, s_hi, q0, opts, true);
    debug_assert!((fp.distortion - hi.distortion).abs() < 1e-9);
    assemble(source, full, keep, target, s_hi, fp)
}

fn degenerate(
    source: &Simplex,
    full: &DistortionMeasure,
    keep: &[usize],
    symbol: usize,
    target: f64,
) -> Result<RdSolution> {
    debug_assert!(keep.contains(&symbol));
    let forward = Channel::new(vec![vec![1.0]; source.len()])?;
    let backward = Channel::new(vec![source.mass().to_vec()])?;
    let distortion = full.constant_output_distortions(source)[symbol];
    Ok(RdSolution {
        rate: 0.0,
        distortion,
        target,
        slope: 0.0,
        source: source.clone(),
        measure: full.clone(),
        forward,
        backward,
        output_marginal: Simplex::point(1, 0),
        reduced_alphabet: vec![symbol],
        trace: Vec::new(),
        converged: true,
        degenerate: true,
    })
}

fn assemble(
    source: &Simplex,
    full: &DistortionMeasure,
    keep: &[usize],
    target: f64,
    slope: f64,
    fp: FixedPoint,
) -> Result<RdSolution> {
    let ny = keep.len();
    // Symbols whose output mass underflowed to exactly zero carry no
    // backward law; drop them here. Dust above zero is left to reduce_alphabet.
    let alive: Vec<usize> = (0..ny).filter(|&y| fp.output[y] > 0.0).collect();
    let rows: Vec<Vec<f64>> = (0..source.len())
        .map(|x| {
            let row: Vec<f64> = alive.iter().map(|&y| fp.forward[x * ny + y]).collect();
            let total: f64 = row.iter().sum();
            row.into_iter().map(|w| w / total).collect()
        })
        .collect();
    let forward = Channel::new(rows)?;
    let joint = JointLaw::from_source_channel(source, &forward)?;
    let output_marginal = forward.push_forward(source)?;
    let backward = backward_channel(source, &forward)?;
    let rate = mutual_information(&joint);
    let reduced_alphabet: Vec<usize> = alive.iter().map(|&y| keep[y]).collect();
    let distortion = full.restrict(&reduced_alphabet).expected(&joint);
    Ok(RdSolution {
        rate,
        distortion,
        target,
        slope,
        source: source.clone(),
        measure: full.clone(),
        forward,
        backward,
        output_marginal,
        reduced_alphabet,
        trace: fp.trace,
        converged: fp.converged,
        degenerate: false,
    })
}

/// Bayes inversion `P_{X|Y}(x|y) = P_X(x) W(y|x) / P_Y(y)`.
pub fn backward_channel(source: &Simplex, forward: &Channel) -> Result<Channel> {
    let joint = JointLaw::from_source_channel(source, forward)?;
    let py = joint.marginal_y();
    let mut rows = Vec::with_capacity(joint.y_size());
    for y in 0..joint.y_size() {
        let total = py.get(y);
        if total <= 0.0 {
            return Err(Error::ZeroMarginalOutput { symbol: y });
        }
        rows.push((0..joint.x_size()).map(|x| joint.get(x, y) / total).collect());
    }
    Channel::new(rows)
}

/// Drops reproduction symbols with output mass below `threshold` and
/// re-solves on what is left.
pub fn reduce_alphabet(sol: &RdSolution, threshold: f64) -> Result<RdSolution> {
    let keep: Vec<usize> = sol
        .reduced_alphabet
        .iter()
        .zip(sol.output_marginal.mass())
        .filter(|(_, &m)| m >= threshold)
        .map(|(&y, _)| y)
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyAlphabet { threshold });
    }
    if keep.len() == sol.reduced_alphabet.len() {
        return Ok(sol.clone());
    }
    solve_on(
        &sol.source,
        &sol.measure,
        &keep,
        sol.target,
        &SolverOptions::default(),
        None,
    )
}

/// Membership in the set where `P_{X|Y}(x|y) > 0` for every `x` and every
/// `y` of positive mass.
pub fn check_membership_a(joint: &JointLaw) -> bool {
    joint
        .condition_on_y()
        .into_iter()
        .flatten()
        .all(|col| col.mass().iter().all(|&p| p > 0.0))
}
