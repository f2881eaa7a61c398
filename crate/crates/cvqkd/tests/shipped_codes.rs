//! Properties of codes built from the shipped degree-distribution files.

use std::path::Path;

use cvqkd::formats::load_degree_distribution;
use cvqkd::parallel;
use cvqkd_core::ldpc::{build_code, DegreeDistribution, StoppingRule};

fn distribution(name: &str) -> DegreeDistribution {
    load_degree_distribution(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/ldpc").join(name)).unwrap()
}

#[test]
fn rate_two_percent_code_has_its_design_rate() {
    let code = build_code(&distribution("me_rate_0.02.json"), 100_000, 1).unwrap();
    assert_eq!(code.n(), 100_000);
    assert!(code.is_codeword(&vec![0; 100_000]));
    let realized = code.realized_rate();
    assert!((realized - 0.02).abs() <= 0.002, "{realized}");
}

#[test]
fn efficiency_above_one_needs_near_certain_failure() {
    let code = build_code(&distribution("me_rate_0.02.json"), 10_000, 3).unwrap();
    let stop = StoppingRule {
        min_word_errors: 1000,
        max_trials: 300,
    };
    let p = parallel::simulate_point(&code, 0.023, 200, stop, 5).unwrap();
    assert!(p.beta_fec > 1.0, "{p:?}");
    assert!(p.wer > 0.99, "{p:?}");
    assert!(p.ber.unwrap() <= p.wer && p.undetected_wer.unwrap() <= p.wer);
}
