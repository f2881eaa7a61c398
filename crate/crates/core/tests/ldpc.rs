use cvqkd_core::ldpc::{
    bp_decode, build_code, run_trial, simulate_point, sweep_curve, BpDecoder, DegreeDistribution, SparseParityCheck,
    StoppingRule,
};
use proptest::prelude::*;

fn code_from_rows(rows: &[&[u8]]) -> SparseParityCheck {
    SparseParityCheck::from_dense(rows).unwrap()
}

fn hamming() -> SparseParityCheck {
    code_from_rows(&[&[1, 0, 0, 1, 1, 0, 1], &[0, 1, 0, 1, 0, 1, 1], &[0, 0, 1, 0, 1, 1, 1]])
}

/// Two checks sharing a single variable: a tree.
fn cycle_free() -> SparseParityCheck {
    code_from_rows(&[&[1, 0, 1, 1, 0, 1], &[0, 1, 1, 0, 1, 0]])
}

fn codewords(code: &SparseParityCheck) -> Vec<Vec<u8>> {
    let n = code.n();
    (0u32..1 << n)
        .map(|w| (0..n).map(|i| (w >> i & 1) as u8).collect::<Vec<u8>>())
        .filter(|word| code.is_codeword(word))
        .collect()
}

/// Exact bitwise posterior LLRs by enumerating every codeword.
fn map_marginals(words: &[Vec<u8>], llr: &[f64]) -> Vec<f64> {
    let scores: Vec<f64> = words
        .iter()
        .map(|w| w.iter().zip(llr).map(|(&b, &l)| if b == 0 { 0.5 * l } else { -0.5 * l }).sum())
        .collect();
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..llr.len())
        .map(|i| {
            let (mut zero, mut one) = (0.0, 0.0);
            for (w, &s) in words.iter().zip(&scores) {
                let p = (s - max).exp();
                if w[i] == 0 {
                    zero += p;
                } else {
                    one += p;
                }
            }
            (zero / one).ln()
        })
        .collect()
}

/// Quartile midpoints of the standard normal: each level stands for a
/// quarter of the noise distribution.
const NOISE_LEVELS: [f64; 4] = [-1.1503, -0.3186, 0.3186, 1.1503];

#[derive(Debug, Default)]
struct MapComparison {
    grid_points: usize,
    /// Grid points where every hard decision matches.
    words_agreeing: usize,
    bits_agreeing: usize,
    /// Largest marginal discrepancy, relative to `max(1, |MAP LLR|)`.
    worst: f64,
}

impl MapComparison {
    fn bit_agreement(&self, n: usize) -> f64 {
        self.bits_agreeing as f64 / (self.grid_points * n) as f64
    }
}

/// Every codeword sent through every point of the quantized noise grid
/// (each bit's noise at one of four levels, scaled to SNR `s`). BP runs a
/// fixed number of iterations; decisions where the exact posterior is a
/// tie count as agreeing.
fn compare_with_map(code: &SparseParityCheck, iterations: usize, s: f64) -> MapComparison {
    let n = code.n();
    let sigma = 1.0 / s.sqrt();
    let words = codewords(code);
    let mut decoder = BpDecoder::new(code);
    let mut out = MapComparison::default();
    let mut llr = vec![0.0; n];
    for word in &words {
        for idx in 0..NOISE_LEVELS.len().pow(n as u32) {
            let mut rest = idx;
            for i in 0..n {
                let noise = sigma * NOISE_LEVELS[rest % NOISE_LEVELS.len()];
                rest /= NOISE_LEVELS.len();
                let x = if word[i] == 0 { 1.0 } else { -1.0 };
                llr[i] = 2.0 * s * (x + noise);
            }
            let exact = map_marginals(&words, &llr);
            let bp = decoder.marginals(&llr, iterations).unwrap();
            let agreeing = exact
                .iter()
                .zip(bp)
                .filter(|&(&m, &b)| m.abs() < 1e-9 || (m < 0.0) == (b < 0.0))
                .count();
            out.grid_points += 1;
            out.bits_agreeing += agreeing;
            out.words_agreeing += usize::from(agreeing == n);
            for (&m, &b) in exact.iter().zip(bp) {
                out.worst = out.worst.max((m - b).abs() / m.abs().max(1.0));
            }
        }
    }
    out
}

#[test]
fn bp_matches_map_on_hamming_code() {
    for s in [0.5, 1.0, 2.0, 4.0] {
        let cmp = compare_with_map(&hamming(), 50, s);
        assert_eq!(cmp.grid_points, 16 * 4usize.pow(7));
        assert!(cmp.bit_agreement(7) >= 0.95, "s = {s}: {cmp:?}");
    }
}

#[test]
fn bp_is_exact_on_a_tree() {
    for s in [0.5, 1.0, 4.0] {
        let cmp = compare_with_map(&cycle_free(), 10, s);
        assert_eq!(cmp.words_agreeing, cmp.grid_points, "s = {s}");
        assert!(cmp.worst < 1e-9, "s = {s}: {cmp:?}");
    }
}

#[test]
fn all_ones_input_never_reports_a_false_convergence() {
    // Odd check degree, so the all-ones word fails every check.
    let code = build_code(&DegreeDistribution::regular(3, 5).unwrap(), 100, 3).unwrap();
    assert!(!code.is_codeword(&[1; 100]));
    let r = bp_decode(&[-20.0; 100], &code, 200).unwrap();
    assert!(!r.converged || code.is_codeword(&r.bits));
    assert!(code.is_codeword(&[0; 100]));
}

#[test]
fn regular_construction_counts_and_determinism() {
    let dist = DegreeDistribution::regular(3, 6).unwrap();
    let a = build_code(&dist, 1200, 7).unwrap();
    assert!((a.rate() - 0.5).abs() <= 0.002);
    assert_eq!(a.n_edges(), 3600);
    assert!((a.realized_rate() - 0.5).abs() <= 0.002 + 1.0 / 1200.0);
    let b = build_code(&dist, 1200, 7).unwrap();
    assert_eq!(a.edges(), b.edges());
    let c = build_code(&dist, 1200, 8).unwrap();
    assert_ne!(a.edges(), c.edges());
}

#[test]
fn converged_decodes_have_zero_syndrome() {
    let code = build_code(&DegreeDistribution::regular(3, 6).unwrap(), 200, 11).unwrap();
    let mut decoder = BpDecoder::new(&code);
    let mut llr = Vec::new();
    let mut converged = 0;
    for (j, s) in [0.5, 0.8, 1.0, 1.3, 2.0].into_iter().enumerate() {
        for i in 0..2000 {
            let out = run_trial(&mut decoder, &mut llr, s, 50, j as u64, i).unwrap();
            if out.converged {
                converged += 1;
                let bits: Vec<u8> = decoder.posterior().iter().map(|&l| u8::from(l < 0.0)).collect();
                assert!(code.is_codeword(&bits));
            }
        }
    }
    assert!(converged > 1000);
}

#[test]
fn sweep_of_one_point_is_that_point() {
    let code = build_code(&DegreeDistribution::regular(3, 6).unwrap(), 300, 5).unwrap();
    let stop = StoppingRule {
        min_word_errors: 20,
        max_trials: 200,
    };
    let single = simulate_point(&code, 1.1, 30, stop, 9).unwrap();
    assert_eq!(sweep_curve(&code, &[1.1], 30, stop, 9).unwrap(), vec![single]);
    assert_eq!(simulate_point(&code, 1.1, 30, stop, 9).unwrap(), single);
}

#[test]
fn huge_snr_is_error_free() {
    let code = build_code(&DegreeDistribution::regular(3, 6).unwrap(), 500, 1).unwrap();
    let p = simulate_point(
        &code,
        100.0,
        50,
        StoppingRule {
            min_word_errors: 1,
            max_trials: 1000,
        },
        4,
    )
    .unwrap();
    assert_eq!((p.trials, p.wer), (1000, 0.0));
}

#[test]
fn waterfall_is_monotone_within_error_bars() {
    let code = build_code(&DegreeDistribution::regular(3, 6).unwrap(), 10_000, 2).unwrap();
    let stop = StoppingRule {
        min_word_errors: 100,
        max_trials: 1000,
    };
    let curve = sweep_curve(&code, &[0.8, 1.0, 1.2, 1.4], 100, stop, 6).unwrap();
    let sd = |p: &cvqkd_core::PerformancePoint| (p.wer * (1.0 - p.wer) / p.trials as f64).sqrt();
    for w in curve.windows(2) {
        let bound = 2.0 * (sd(&w[0]).powi(2) + sd(&w[1]).powi(2)).sqrt();
        assert!(w[1].wer <= w[0].wer + bound, "{:?}", curve);
    }
    assert!(curve[0].wer > 0.9 && curve[3].wer < 0.5, "{:?}", curve);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accounting_invariants(seed in any::<u64>(), s in 0.3f64..3.0, n in 60usize..400) {
        let n = n - n % 6;
        let code = build_code(&DegreeDistribution::regular(3, 6).unwrap(), n, seed).unwrap();
        let stop = StoppingRule { min_word_errors: 10, max_trials: 60 };
        let p = simulate_point(&code, s, 20, stop, seed).unwrap();
        p.validate().unwrap();
        prop_assert!(p.ber.unwrap() <= p.wer);
        prop_assert!(p.undetected_wer.unwrap() <= p.wer);
        prop_assert_eq!(simulate_point(&code, s, 20, stop, seed).unwrap(), p);
    }
}

