//! The experiment verbs. Each writes its tables (and charts drawn from
//! them) into the output directory.

use std::path::{Path, PathBuf};

use backward_dmc::channel_conv::ChannelExperiment;
use backward_dmc::codes::{
    append_pathological_codeword, goodness_report, lloyd_code, optimal_code_exhaustive,
    random_coordination_code, smallest_code_meeting, BlockCode, EvalMode, RateSchedule,
    SearchLimits,
};
use backward_dmc::induced::InducedPair;
use backward_dmc::numeric::nats_to_bits;
use backward_dmc::rd_solver::{reduce_alphabet, solve_rd, DEFAULT_REDUCTION_THRESHOLD};
use backward_dmc::Budget;
use rayon::prelude::*;

use crate::config::{Constructor, ExperimentConfig, Mode, Target};
use crate::failure::Failure;
use crate::plot::Chart;
use crate::table::{num, opt, Columns, Table};

pub const RD_SCHEMA: &str = "rd-curve v1";
pub const RD_BACKWARD_SCHEMA: &str = "rd-backward v1";
pub const RD_TRACE_SCHEMA: &str = "rd-trace v1";
pub const SWEEP_SCHEMA: &str = "theorem2-sweep v1";
pub const CHANNEL_SCHEMA: &str = "theorem6-experiment v1";

fn chart_for(schema: &str) -> Option<Chart<'static>> {
    Some(match schema {
        RD_SCHEMA => Chart {
            title: "Rate-distortion function",
            x: "d",
            y_label: "rate (bits)",
            series: &[("rate_bits", "R(D)")],
        },
        SWEEP_SCHEMA => Chart {
            title: "Normalized divergence between code-induced and backward-channel laws",
            x: "n",
            y_label: "nats per letter",
            series: &[
                ("normalized_divergence", "D(P||Q)/n"),
                ("term1", "term 1 / n"),
                ("term2", "term 2 / n"),
            ],
        },
        CHANNEL_SCHEMA => Chart {
            title: "Error probability floor against falling divergence",
            x: "n",
            y_label: "probability / nats per letter",
            series: &[
                ("tv_lower_bound", "Q(E) = TV lower bound"),
                ("tv_joint", "TV(P, Q)"),
                ("normalized_divergence", "D(P||Q)/n"),
            ],
        },
        _ => return None,
    })
}

/// Draws the chart for a table from its CSV text alone.
pub fn replot(csv_text: &str) -> Result<String, Failure> {
    let schema = csv_text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("#schema "))
        .ok_or_else(|| Failure::Config("missing `#schema` line".into()))?;
    let chart = chart_for(schema.trim())
        .ok_or_else(|| Failure::Config(format!("no chart for schema `{schema}`")))?;
    chart.render(&Columns::parse(csv_text)?)
}

/// Writes `<stem>.csv`, then draws `<stem>.svg` from the file just written.
fn write_with_chart(out: &Path, stem: &str, table: &Table) -> Result<(), Failure> {
    let csv_path = out.join(format!("{stem}.csv"));
    table.write(&csv_path)?;
    let svg = replot(&std::fs::read_to_string(&csv_path)?)?;
    std::fs::write(out.join(format!("{stem}.svg")), svg)?;
    Ok(())
}

pub fn rd_curve(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let source = cfg.source()?;
    let measure = cfg.measure()?;
    let points = match &cfg.rd_points {
        Some(p) => p.clone(),
        None => {
            let (_, d_max) = measure.max_useful_distortion(&source);
            (1..=20).map(|k| d_max * k as f64 / 20.0).collect()
        }
    };
    if let Some(d) = points.iter().find(|d| !(**d > 0.0)) {
        return Err(Failure::Config(format!("rd_points must be positive, got {d}")));
    }
    let solutions: Vec<_> = points
        .par_iter()
        .map(|&d| {
            // The full solve carries the informative trace; the reduced one
            // carries the backward channel on the kept symbols.
            let full = solve_rd(&source, &measure, d, 1e-10)?;
            let reduced = reduce_alphabet(&full, DEFAULT_REDUCTION_THRESHOLD)?;
            Ok::<_, backward_dmc::Error>((full, reduced))
        })
        .collect::<Result<_, _>>()?;

    let mut curve = Table::new(
        RD_SCHEMA,
        vec!["d", "rate_nats", "rate_bits", "distortion", "slope", "iterations", "flag"],
    );
    let mut backward = Table::new(RD_BACKWARD_SCHEMA, vec!["d", "y", "x", "mass"]);
    let mut trace = Table::new(RD_TRACE_SCHEMA, vec!["d", "iteration", "rate_nats", "distortion"]);
    for (d, (full, sol)) in points.iter().zip(&solutions) {
        curve.rows.push(vec![
            num(*d),
            num(sol.rate),
            num(nats_to_bits(sol.rate)),
            num(sol.distortion),
            num(sol.slope),
            full.trace.len().to_string(),
            if full.converged && sol.converged { String::new() } else { "not-converged".into() },
        ]);
        for step in &full.trace {
            trace.rows.push(vec![
                num(*d),
                step.iteration.to_string(),
                num(step.rate),
                num(step.distortion),
            ]);
        }
        for (k, &y) in sol.reduced_alphabet.iter().enumerate() {
            for (x, m) in sol.backward.row(k).iter().enumerate() {
                backward.rows.push(vec![num(*d), y.to_string(), x.to_string(), num(*m)]);
            }
        }
    }
    backward.write(&out.join("rd_backward.csv"))?;
    trace.write(&out.join("rd_trace.csv"))?;
    write_with_chart(out, "rd_curve", &curve)
}

/// Builds the code for blocklength `n` with the configured constructor.
pub fn build_code(cfg: &ExperimentConfig, t: &Target, n: usize) -> Result<BlockCode, Failure> {
    let budget = cfg.budget();
    let limits = SearchLimits { budget, ..SearchLimits::default() };
    let source = &t.target.source;
    let m = || {
        cfg.codebook_size
            .ok_or_else(|| Failure::Config("`codebook_size` is required for this constructor".into()))
    };
    let code = match cfg.constructor {
        Constructor::Exhaustive => optimal_code_exhaustive(source, &t.encode_with, n, m()?, &limits)?,
        Constructor::Lloyd => {
            let m = m()?;
            let mut best: Option<(f64, BlockCode)> = None;
            for &seed in &cfg.seeds {
                let code = lloyd_code(source, &t.encode_with, n, m, seed, cfg.lloyd_iters, &budget)?;
                let d = code.expected_distortion(source, &t.encode_with, &budget)?;
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, code));
                }
            }
            best.expect("seeds validated non-empty").1
        }
        Constructor::Smallest => smallest_code_meeting(
            source,
            &t.encode_with,
            n,
            cfg.target_distortion()?,
            &cfg.seeds,
            &limits,
        )?,
        Constructor::Random => random_coordination_code(
            &t.target,
            n,
            &schedule(cfg, t),
            cfg.seeds[0].wrapping_add(n as u64),
            cfg.distinct,
            Some(&t.encode_with),
            &budget,
        )?,
    };
    Ok(code)
}

fn schedule(cfg: &ExperimentConfig, t: &Target) -> RateSchedule {
    match cfg.rate {
        Some(r) => RateSchedule::Constant(r),
        None => RateSchedule::slow_approach(t.target.mutual_information, cfg.delta),
    }
}

fn require_grid(cfg: &ExperimentConfig) -> Result<(), Failure> {
    if cfg.n_grid.is_empty() {
        return Err(Failure::Config("`n_grid` must not be empty".into()));
    }
    Ok(())
}

/// Resource failures become flagged rows; anything else aborts the run.
fn flag_or_fail<T>(r: Result<T, Failure>) -> Result<Result<T, String>, Failure> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(Failure::Resource(m)) => Ok(Err(m)),
        Err(e) => Err(e),
    }
}

pub fn theorem2_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    require_grid(cfg)?;
    let t = cfg.target()?;
    let budget = cfg.budget();
    let results: Vec<_> = cfg
        .n_grid
        .par_iter()
        .map(|&n| {
            flag_or_fail((|| {
                let mut code = build_code(cfg, &t, n)?;
                if let Some([x, y]) = cfg.pathological {
                    code = append_pathological_codeword(&code, &t.target.backward, (x, y))?.code;
                }
                let pair = InducedPair::build(&code, &t.target.source, &t.target.backward, &budget)?;
                Ok(pair.row(&code, &t.target.joint, t.measure.as_ref(), &budget)?)
            })())
        })
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(
        SWEEP_SCHEMA,
        vec![
            "n",
            "messages",
            "rate",
            "expected_distortion",
            "normalized_divergence",
            "term1",
            "term2",
            "normalized_block_mi",
            "output_entropy",
            "single_letter_tv",
            "tv_joint",
            "flag",
        ],
    );
    for (n, r) in cfg.n_grid.iter().zip(results) {
        table.rows.push(match r {
            Ok(row) => vec![
                row.n.to_string(),
                row.messages.to_string(),
                num(row.rate),
                opt(row.expected_distortion),
                num(row.normalized_divergence),
                num(row.term1),
                num(row.term2),
                num(row.normalized_block_mi),
                num(row.output_entropy),
                num(row.single_letter_tv),
                num(row.tv_joint),
                if row.normalized_divergence.is_infinite() { "infinite".into() } else { String::new() },
            ],
            Err(reason) => flagged(*n, 12, &reason),
        });
    }
    write_with_chart(out, "theorem2_sweep", &table)
}

fn flagged(n: usize, width: usize, reason: &str) -> Vec<String> {
    let mut row = vec![String::new(); width];
    row[0] = n.to_string();
    row[width - 1] = format!("budget: {reason}");
    row
}

pub fn theorem6_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    require_grid(cfg)?;
    if cfg.constructor != Constructor::Random || !cfg.distinct {
        return Err(Failure::Config(
            "theorem6-experiment needs constructor = \"random\" and distinct = true".into(),
        ));
    }
    let t = cfg.target()?;
    let budget = cfg.budget();
    let results: Vec<_> = cfg
        .n_grid
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            flag_or_fail((|| {
                let code = build_code(cfg, &t, n)?;
                let m = code.size();
                let rate = code.rate();
                let pair = InducedPair::build(&code, &t.target.source, &t.target.backward, &budget)?;
                let exp = ChannelExperiment::new(code, t.target.backward.clone())?;
                let mode = match cfg.mode {
                    Mode::Exact => EvalMode::Exact,
                    Mode::Sampled => EvalMode::Sampled {
                        samples: cfg.samples,
                        seed: cfg.seeds[0].wrapping_add(1000 + i as u64),
                    },
                };
                let bound = exp.tv_lower_bound(&pair, mode, &budget)?;
                Ok(vec![
                    n.to_string(),
                    m.to_string(),
                    num(rate),
                    num(bound.value),
                    opt(bound.std_error),
                    num(bound.value),
                    num(pair.tv_joint()),
                    num(pair.normalized_divergence()),
                    if bound.is_exact() { "exact".into() } else { "sampled".into() },
                    String::new(),
                ])
            })())
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(
        CHANNEL_SCHEMA,
        vec![
            "n",
            "messages",
            "rate",
            "q_error",
            "std_error",
            "tv_lower_bound",
            "tv_joint",
            "normalized_divergence",
            "mode",
            "flag",
        ],
    );
    for (n, r) in cfg.n_grid.iter().zip(results) {
        table.rows.push(r.unwrap_or_else(|reason| flagged(*n, 10, &reason)));
    }
    write_with_chart(out, "theorem6_experiment", &table)
}

pub fn code_build(cfg: &ExperimentConfig, n: Option<usize>, out: &Path) -> Result<PathBuf, Failure> {
    let n = n.or_else(|| cfg.n_grid.first().copied()).ok_or_else(|| {
        Failure::Config("give --n or a non-empty `n_grid`".into())
    })?;
    let t = cfg.target()?;
    let mut code = build_code(cfg, &t, n)?;
    if let Some([x, y]) = cfg.pathological {
        code = append_pathological_codeword(&code, &t.target.backward, (x, y))?.code;
    }
    let path = out.join(format!("code_n{n}.txt"));
    std::fs::write(&path, code.to_text())?;
    Ok(path)
}

pub fn code_inspect(code_path: &Path, cfg: Option<&ExperimentConfig>) -> Result<String, Failure> {
    let text = std::fs::read_to_string(code_path)
        .map_err(|e| Failure::Config(format!("{}: {e}", code_path.display())))?;
    let code = BlockCode::from_text(&text)?;
    let mut lines = vec![
        format!("n {}", code.n()),
        format!("alphabets {} {}", code.x_size(), code.y_size()),
        format!("messages {}", code.size()),
        format!("rate {} nats", num(code.rate())),
        format!("bijective {}", code.is_bijective()),
    ];
    for (k, v) in code.notes() {
        lines.push(format!("note {k}: {v}"));
    }
    if let Some(cfg) = cfg {
        let t = cfg.target()?;
        let budget: Budget = cfg.budget();
        let report = goodness_report(
            &code,
            &t.target,
            t.measure.as_ref(),
            &budget,
            cfg.samples,
            cfg.seeds[0],
        )?;
        if let Some(sol) = &t.solution {
            lines.push(format!("rd_function {} nats at D = {}", num(sol.rate), num(sol.distortion)));
        }
        lines.push(format!("rate_gap {}", num(report.rate_gap)));
        if let Some(d) = report.expected_distortion {
            lines.push(format!("expected_distortion {}", estimate(d)));
        }
        lines.push(format!("expected_tv_to_target {}", estimate(report.expected_tv_to_target)));
        if let Ok(pair) = InducedPair::build(&code, &t.target.source, &t.target.backward, &budget) {
            let (t1, t2) = pair.chain_rule_terms();
            let n = code.n() as f64;
            lines.push(format!("normalized_divergence {}", num(pair.normalized_divergence())));
            lines.push(format!("term1 {}", num(t1 / n)));
            lines.push(format!("term2 {}", num(t2 / n)));
            lines.push(format!("normalized_block_mi {}", num(pair.normalized_block_mi())));
            lines.push(format!("tv_joint {}", num(pair.tv_joint())));
        }
    }
    Ok(lines.join("\n") + "\n")
}

fn estimate(e: backward_dmc::estimate::Estimate) -> String {
    match e.std_error {
        None => num(e.value),
        Some(se) => format!("{} +/- {}", num(e.value), num(se)),
    }
}
