use backward_dmc::channel_conv::{extend_with_message, ChannelExperiment};
use backward_dmc::codes::{random_coordination_code, BlockCode, CoordinationTarget, EvalMode, RateSchedule};
use backward_dmc::distributions::{BlockIndexer, Channel, Simplex};
use backward_dmc::induced::InducedPair;
use backward_dmc::rd_solver::{solve_rd, DistortionMeasure};
use backward_dmc::Budget;

/// `(1/M) Σ_m Σ_{x: g(f(x)) != g(m)} Π_i P_{X|Y}(x_i | g(m)_i)`, summed
/// literally over messages and source blocks.
fn double_sum(code: &BlockCode, back: &Channel) -> f64 {
    let xs = BlockIndexer::new(code.x_size(), code.n(), &Budget::default()).unwrap();
    let mut total = 0.0;
    for m in 0..code.size() {
        let y = code.codeword_symbols(m);
        for xb in 0..xs.count() {
            if code.reproduce(xb) == code.decode(m) {
                continue;
            }
            let x = xs.symbols(xb);
            total += x.iter().zip(&y).map(|(&a, &b)| back.get(b, a)).product::<f64>();
        }
    }
    total / code.size() as f64
}

fn ternary_family(n: usize, seed: u64) -> (BlockCode, Channel, Simplex) {
    let source = Simplex::uniform(3);
    let d = DistortionMeasure::hamming(3);
    let sol = solve_rd(&source, &d, 1.0 / 3.0, 1e-10).unwrap();
    let target = CoordinationTarget::from_rd(&sol);
    let schedule = RateSchedule::slow_approach(target.mutual_information, 0.25);
    let code =
        random_coordination_code(&target, n, &schedule, seed, true, Some(&d), &Budget::default())
            .unwrap();
    (code, target.backward, source)
}

#[test]
fn exact_error_probability_matches_double_sum() {
    for n in 2..=4 {
        let (code, back, _) = ternary_family(n, n as u64);
        let want = double_sum(&code, &back);
        let exp = ChannelExperiment::new(code, back).unwrap();
        let got = exp.error_probability_q(EvalMode::Exact, &Budget::default()).unwrap();
        assert!((got.value - want).abs() < 1e-12, "n={n}: {} vs {want}", got.value);
    }
}

#[test]
fn error_probability_ignores_message_order() {
    let (code, back, _) = ternary_family(4, 8);
    let m = code.size();
    // message k of the relabeled code is message (k * 7 + 3) mod M of the original
    let perm: Vec<usize> = (0..m).map(|k| (k * 7 + 3) % m).collect();
    let mut inverse = vec![0u32; m];
    for (k, &p) in perm.iter().enumerate() {
        inverse[p] = k as u32;
    }
    assert!(m % 7 != 0, "7 must be invertible mod M");
    let book = perm.iter().map(|&p| code.decode(p)).collect();
    let enc = code.encoder().iter().map(|&e| inverse[e as usize]).collect();
    let relabeled = BlockCode::new(4, 3, 3, book, enc).unwrap();
    let b = Budget::default();
    let a = ChannelExperiment::new(code, back.clone()).unwrap();
    let r = ChannelExperiment::new(relabeled, back).unwrap();
    let qa = a.error_probability_q(EvalMode::Exact, &b).unwrap().value;
    let qr = r.error_probability_q(EvalMode::Exact, &b).unwrap().value;
    assert!((qa - qr).abs() < 1e-12);
}

#[test]
fn exact_and_sampled_agree_on_small_fixtures() {
    let b = Budget::default();
    for n in 2..=8 {
        let (code, back, _) = ternary_family(n, 30 + n as u64);
        if code.size() == 1 {
            continue;
        }
        let exp = ChannelExperiment::new(code, back).unwrap();
        let exact = exp.error_probability_q(EvalMode::Exact, &b).unwrap().value;
        let s = exp
            .error_probability_q(EvalMode::Sampled { samples: 200_000, seed: n as u64 }, &b)
            .unwrap();
        assert!(s.agrees_with(exact, 3.0), "n={n}: exact {exact} sampled {s:?}");
    }
}

#[test]
fn p_error_audits_to_zero_and_bounds_the_distance() {
    let b = Budget::default();
    for n in 2..=5 {
        let (code, back, source) = ternary_family(n, 60 + n as u64);
        let pair = InducedPair::build(&code, &source, &back, &b).unwrap();
        let exp = ChannelExperiment::new(code.clone(), back).unwrap();
        assert_eq!(exp.error_probability_p(&pair, EvalMode::Exact).unwrap(), 0.0);
        let sampled = exp
            .error_probability_p(&pair, EvalMode::Sampled { samples: 100_000, seed: 3 })
            .unwrap();
        assert_eq!(sampled, 0.0);
        let bound = exp.tv_lower_bound(&pair, EvalMode::Exact, &b).unwrap().value;
        assert!(bound <= pair.tv_joint_dense(&b).unwrap() + 1e-12);
        if n <= 4 {
            let audit = extend_with_message(&pair, &code, &b).unwrap();
            assert!((audit.extended - audit.unextended).abs() < 1e-12);
        }
    }
}

#[test]
fn constant_code_extension_reduces_to_single_letter_distance() {
    let d = DistortionMeasure::hamming(2);
    let code = BlockCode::nearest(1, &d, vec![0], &Budget::default()).unwrap();
    let back = Channel::new(vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
    let source = Simplex::new(vec![0.4, 0.6]).unwrap();
    let pair = InducedPair::build(&code, &source, &back, &Budget::default()).unwrap();
    let audit = extend_with_message(&pair, &code, &Budget::default()).unwrap();
    assert!((audit.unextended - 0.4).abs() < 1e-15);
    assert!((audit.extended - 0.4).abs() < 1e-15);
    let exp = ChannelExperiment::new(code, back).unwrap();
    assert_eq!(exp.tv_lower_bound(&pair, EvalMode::Exact, &Budget::default()).unwrap().value, 0.0);
}
