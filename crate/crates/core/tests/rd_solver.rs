use backward_dmc::distributions::Simplex;
use backward_dmc::numeric::binary_entropy;
use backward_dmc::rd_solver::{
    backward_uniqueness_probe, check_membership_a, reduce_alphabet, solve_rd, DistortionMeasure,
    DEFAULT_REDUCTION_THRESHOLD,
};

/// `R(D)` of a uniform `k`-ary source under Hamming distortion, nats.
fn symmetric_closed_form(k: usize, d: f64) -> f64 {
    if d >= 1.0 - 1.0 / k as f64 {
        return 0.0;
    }
    (k as f64).ln() - binary_entropy(d) - d * ((k - 1) as f64).ln()
}

#[test]
fn uniform_hamming_matches_closed_form() {
    for k in [2, 3, 4] {
        let d = DistortionMeasure::hamming(k);
        for t in [0.01, 0.1, 0.25, 0.4, 0.6] {
            let sol = solve_rd(&Simplex::uniform(k), &d, t, 1e-10).unwrap();
            let want = symmetric_closed_form(k, t);
            assert!((sol.rate - want).abs() < 1e-8, "k={k} D={t}: {} vs {want}", sol.rate);
        }
    }
}

/// Brute-force minimum of `I(X;Y)` over binary-input ternary-output
/// channels on a lattice, under the constraint `E d <= target`.
fn binary_ternary_grid(px: [f64; 2], d: &[[f64; 3]; 2], target: f64, steps: usize) -> f64 {
    let mut rows = Vec::new();
    for a in 0..=steps {
        for b in 0..=steps - a {
            rows.push([a, b, steps - a - b].map(|v| v as f64 / steps as f64));
        }
    }
    let mut best = f64::INFINITY;
    for r0 in &rows {
        for r1 in &rows {
            let dist: f64 = (0..3).map(|y| px[0] * r0[y] * d[0][y] + px[1] * r1[y] * d[1][y]).sum();
            if dist > target + 1e-12 {
                continue;
            }
            let mut mi = 0.0;
            for y in 0..3 {
                let py = px[0] * r0[y] + px[1] * r1[y];
                for (p, r) in [(px[0], r0), (px[1], r1)] {
                    if r[y] > 0.0 {
                        mi += p * r[y] * (r[y] / py).ln();
                    }
                }
            }
            best = best.min(mi);
        }
    }
    best
}

#[test]
fn asymmetric_fixture_matches_grid_search() {
    let px = [0.6, 0.4];
    let d = [[0.0, 1.0, 0.4], [1.0, 0.0, 0.4]];
    let measure = DistortionMeasure::new(d.iter().map(|r| r.to_vec()).collect()).unwrap();
    let source = Simplex::new(px.to_vec()).unwrap();
    for target in [0.1, 0.2, 0.3] {
        let sol = solve_rd(&source, &measure, target, 1e-10).unwrap();
        let grid = binary_ternary_grid(px, &d, target, 100);
        // the lattice minimum can only overshoot the true minimum
        assert!(sol.rate <= grid + 1e-9, "D={target}: solver {} grid {grid}", sol.rate);
        assert!(grid - sol.rate < 2e-3, "D={target}: solver {} grid {grid}", sol.rate);
    }
}

#[test]
fn dominated_symbol_is_removed_without_changing_the_rate() {
    // output 3 costs 0.5 more than output 0 against every source symbol
    let measure = DistortionMeasure::new(vec![
        vec![0.0, 1.0, 1.0, 0.5],
        vec![1.0, 0.0, 1.0, 1.5],
        vec![1.0, 1.0, 0.0, 1.5],
    ])
    .unwrap();
    let source = Simplex::uniform(3);
    for target in [0.1, 0.3, 0.5] {
        let sol = solve_rd(&source, &measure, target, 1e-10).unwrap();
        let reduced = reduce_alphabet(&sol, DEFAULT_REDUCTION_THRESHOLD).unwrap();
        assert!(!reduced.reduced_alphabet.contains(&3), "{:?}", reduced.reduced_alphabet);
        assert!((reduced.rate - sol.rate).abs() < 1e-4);
        assert!((reduced.rate - symmetric_closed_form(3, target)).abs() < 1e-6);
        assert!(check_membership_a(&reduced.joint()));
    }
}

#[test]
fn uniqueness_probe_on_skewed_fixture() {
    let measure = DistortionMeasure::new(vec![
        vec![0.0, 1.0, 2.0],
        vec![1.5, 0.0, 1.0],
        vec![1.0, 2.5, 0.0],
    ])
    .unwrap();
    let source = Simplex::new(vec![0.5, 0.3, 0.2]).unwrap();
    let report = backward_uniqueness_probe(&source, &measure, 0.3, 10, 7).unwrap();
    assert!(report.max_deviation < 1e-5, "{report:?}");
    assert!(report.non_converged.is_empty());
    assert!(!report.alphabet_mismatch);
}

#[test]
fn trace_reaches_the_reported_point() {
    let sol = solve_rd(&Simplex::uniform(2), &DistortionMeasure::hamming(2), 0.2, 1e-10).unwrap();
    let last = sol.trace.last().unwrap();
    assert!((last.rate - sol.rate).abs() < 1e-8);
    assert!((last.distortion - sol.distortion).abs() < 1e-9);
    assert!(sol.converged);
}
